//! Pluggable API domains: the service robot plus two small demo domains.

mod calendar;
mod gripper;
mod robot;

use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::trace::TraceEvent;
use crate::value::Value;
use crate::world::{Category, CategorySet, World};

pub use calendar::{parse_clock, parse_duration};

/// Tunables of world synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    /// Inclusive bounds on how many fresh rooms `get_all_rooms` synthesizes.
    pub room_count_range: (usize, usize),
    pub presence_probability: f64,
    pub api_call_budget: u64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            room_count_range: (2, 5),
            presence_probability: 0.5,
            api_call_budget: 1000,
        }
    }
}

impl DomainConfig {
    pub fn validate(&self) -> Result<(), String> {
        let (min, max) = self.room_count_range;
        if min < 1 || min > max {
            return Err(format!("room_count_range [{min}, {max}] must satisfy 1 <= min <= max"));
        }
        let p = self.presence_probability;
        if !(p > 0.0 && p < 1.0) {
            return Err(format!("presence_probability {p} must lie strictly between 0 and 1"));
        }
        if self.api_call_budget == 0 {
            return Err("api_call_budget must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Str,
    Number,
    StrList,
}

impl ValueKind {
    fn accepts(self, v: &Value) -> bool {
        match self {
            ValueKind::Str => matches!(v, Value::Str(_)),
            ValueKind::Number => matches!(v, Value::Int(_) | Value::Float(_)),
            ValueKind::StrList => match v {
                Value::List(items) => items.borrow().iter().all(|i| matches!(i, Value::Str(_))),
                _ => false,
            },
        }
    }

    fn describe(self) -> &'static str {
        match self {
            ValueKind::Str => "a string",
            ValueKind::Number => "a number",
            ValueKind::StrList => "a list of strings",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ValueKind,
    /// Categories the argument must be compatible with, for entity-valued parameters.
    pub categories: Option<CategorySet>,
    /// An empty string skips entity binding (`ask("", ...)` addresses whoever is there).
    pub allow_empty: bool,
}

impl ParamSpec {
    const fn value(name: &'static str, kind: ValueKind) -> Self {
        ParamSpec {
            name,
            kind,
            categories: None,
            allow_empty: false,
        }
    }

    fn entity(name: &'static str, cats: &[Category]) -> Self {
        ParamSpec {
            name,
            kind: ValueKind::Str,
            categories: Some(CategorySet::of(cats)),
            allow_empty: false,
        }
    }
}

pub type Handler = fn(&mut World, &[Value]) -> Result<Value, DomainError>;

#[derive(Clone)]
pub struct ApiSpec {
    pub name: &'static str,
    pub params: Vec<ParamSpec>,
    /// Entity checks and world effects, run after arguments are validated and bound.
    pub handler: Handler,
}

impl std::fmt::Debug for ApiSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ApiSpec")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub name: &'static str,
    pub api_table: Vec<ApiSpec>,
    pub category_universe: CategorySet,
    pub config: DomainConfig,
}

impl DomainSpec {
    fn build(name: &'static str, universe: &[Category], api_table: Vec<ApiSpec>) -> Self {
        let spec = DomainSpec {
            name,
            api_table,
            category_universe: CategorySet::of(universe),
            config: DomainConfig::default(),
        };
        debug_assert!(spec
            .api_table
            .iter()
            .flat_map(|a| &a.params)
            .filter_map(|p| p.categories)
            .all(|c| c.is_subset(spec.category_universe)));
        spec
    }

    /// Service robot with the eight mobile-manipulation APIs.
    pub fn robot() -> Self {
        Self::build(
            "robot",
            &[Category::Object, Category::Location, Category::Person],
            robot::api_table(),
        )
    }

    /// Single-joint gripper with a bounded rotation range.
    pub fn gripper() -> Self {
        Self::build("gripper", &[Category::Gripper], gripper::api_table())
    }

    /// Calendar that must not double-book.
    pub fn calendar() -> Self {
        Self::build("calendar", &[Category::Event], calendar::api_table())
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "robot" => Some(Self::robot()),
            "gripper" => Some(Self::gripper()),
            "calendar" => Some(Self::calendar()),
            _ => None,
        }
    }

    pub const NAMES: [&'static str; 3] = ["robot", "gripper", "calendar"];

    pub fn with_config(mut self, config: DomainConfig) -> Self {
        self.config = config;
        self
    }

    pub fn api_names(&self) -> Vec<&'static str> {
        self.api_table.iter().map(|a| a.name).collect()
    }

    pub fn api(&self, name: &str) -> Option<&ApiSpec> {
        self.api_table.iter().find(|a| a.name == name)
    }

    /// Simulates one API call: validates arguments, charges the call budget,
    /// binds entity arguments and runs the API's checks and effects.
    pub fn apply_api(&self, world: &mut World, call: &str, args: &[Value]) -> Result<Value, DomainError> {
        let api = self
            .api(call)
            .ok_or_else(|| DomainError::InvalidArgument(format!("unknown API `{call}`")))?;
        world.log(TraceEvent::Call {
            api: call.to_string(),
            args: args.iter().map(Value::to_json).collect(),
        });
        if args.len() != api.params.len() {
            return Err(DomainError::InvalidArgument(format!(
                "{call}() takes {} argument(s) but {} were given",
                api.params.len(),
                args.len()
            )));
        }
        for (p, a) in api.params.iter().zip(args) {
            if !p.kind.accepts(a) {
                return Err(DomainError::InvalidArgument(format!(
                    "{call}() argument `{}` must be {}, got {}",
                    p.name,
                    p.kind.describe(),
                    a.type_name()
                )));
            }
        }
        world.api_call_count += 1;
        if world.api_call_count > world.config().api_call_budget {
            return Err(DomainError::BudgetExceeded(world.config().api_call_budget));
        }
        for (p, a) in api.params.iter().zip(args) {
            if let (Some(cats), Value::Str(name)) = (p.categories, a) {
                if p.allow_empty && name.is_empty() {
                    continue;
                }
                world.bind_entity(name, cats)?;
            }
        }
        let ret = (api.handler)(world, args)?;
        world.log(TraceEvent::Return {
            api: call.to_string(),
            value: ret.to_json(),
        });
        Ok(ret)
    }
}

fn str_arg(args: &[Value], i: usize) -> &str {
    args[i].as_str().expect("argument kinds are checked before dispatch")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::ScriptedChoices;

    fn world_for(domain: &DomainSpec) -> World {
        World::new(Box::new(ScriptedChoices::default()), domain.config.clone())
    }

    #[test]
    fn default_config_is_valid() {
        assert!(DomainConfig::default().validate().is_ok());
        let bad = DomainConfig {
            room_count_range: (0, 3),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = DomainConfig {
            room_count_range: (4, 3),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn domains_by_name() {
        for name in DomainSpec::NAMES {
            assert_eq!(DomainSpec::by_name(name).unwrap().name, name);
        }
        assert!(DomainSpec::by_name("kitchen").is_none());
        assert_eq!(DomainSpec::robot().api_table.len(), 8);
    }

    #[test]
    fn arity_and_kind_are_checked() {
        let d = DomainSpec::robot();
        let mut w = world_for(&d);
        let err = d.apply_api(&mut w, "go_to", &[]).unwrap_err();
        assert!(matches!(err, DomainError::InvalidArgument(_)));
        let err = d.apply_api(&mut w, "go_to", &[Value::Int(3)]).unwrap_err();
        assert!(matches!(err, DomainError::InvalidArgument(_)));
        assert_eq!(w.api_call_count(), 0);
    }

    #[test]
    fn call_budget() {
        let d = DomainSpec::robot().with_config(DomainConfig {
            api_call_budget: 2,
            ..Default::default()
        });
        let mut w = world_for(&d);
        d.apply_api(&mut w, "say", &["a".into()]).unwrap();
        d.apply_api(&mut w, "say", &["b".into()]).unwrap();
        let err = d.apply_api(&mut w, "say", &["c".into()]).unwrap_err();
        assert_eq!(err, DomainError::BudgetExceeded(2));
    }
}
