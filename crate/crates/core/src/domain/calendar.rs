//! A calendar that refuses overlapping events.

use super::{str_arg, ApiSpec, ParamSpec, ValueKind};
use crate::error::DomainError;
use crate::value::Value;
use crate::world::{Category, Interval, World};

pub(super) fn api_table() -> Vec<ApiSpec> {
    vec![ApiSpec {
        name: "schedule_on_calendar",
        params: vec![
            ParamSpec::entity("event", &[Category::Event]),
            ParamSpec::value("start_time", ValueKind::Str),
            ParamSpec::value("duration", ValueKind::Str),
        ],
        handler: schedule,
    }]
}

/// Parses `H:MM am` / `H:MM pm` into minutes after midnight.
pub fn parse_clock(text: &str) -> Option<u32> {
    let lower = text.trim().to_ascii_lowercase();
    let (clock, meridiem) = lower.split_once(' ')?;
    let (h, m) = clock.split_once(':')?;
    let (h, m): (u32, u32) = (h.parse().ok()?, m.parse().ok()?);
    if !(1..=12).contains(&h) || m > 59 || clock.split_once(':')?.1.len() != 2 {
        return None;
    }
    let h = match meridiem.trim() {
        "am" => h % 12,
        "pm" => h % 12 + 12,
        _ => return None,
    };
    Some(h * 60 + m)
}

/// Parses `<n> hr` / `<n> min` (plural forms accepted) into minutes.
pub fn parse_duration(text: &str) -> Option<u32> {
    let (n, unit) = text.trim().split_once(' ')?;
    let n: u32 = n.parse().ok()?;
    let per = match unit.trim() {
        "hr" | "hrs" | "hour" | "hours" => 60,
        "min" | "mins" | "minute" | "minutes" => 1,
        _ => return None,
    };
    n.checked_mul(per).filter(|m| *m > 0)
}

fn schedule(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    let event = str_arg(args, 0);
    let start_text = str_arg(args, 1);
    let duration_text = str_arg(args, 2);
    let start = parse_clock(start_text)
        .ok_or_else(|| DomainError::InvalidArgument(format!("cannot parse start time `{start_text}`")))?;
    let length = parse_duration(duration_text)
        .ok_or_else(|| DomainError::InvalidArgument(format!("cannot parse duration `{duration_text}`")))?;
    let interval = Interval {
        start,
        end: start + length,
    };
    if let Some((other, _)) = world
        .schedule()
        .iter()
        .find(|(name, iv)| name.as_str() != event && iv.overlaps(&interval))
    {
        return Err(DomainError::StateInconsistent(format!(
            "`{event}` at {start_text} for {duration_text} conflicts with `{other}`"
        )));
    }
    world.insert_interval(event, interval);
    Ok(Value::None)
}
