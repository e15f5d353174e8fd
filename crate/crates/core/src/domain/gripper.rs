//! A gripper whose single joint may only turn within ±π/6 of its start.

use std::f64::consts::PI;

use super::{str_arg, ApiSpec, ParamSpec, ValueKind};
use crate::error::DomainError;
use crate::value::Value;
use crate::world::{Category, World};

pub const ROTATION_LIMIT: f64 = PI / 6.0;
const SLACK: f64 = 1e-9;

pub(super) fn api_table() -> Vec<ApiSpec> {
    vec![ApiSpec {
        name: "rotate",
        params: vec![
            ParamSpec::entity("gripper", &[Category::Gripper]),
            ParamSpec::value("radians", ValueKind::Number),
        ],
        handler: rotate,
    }]
}

fn rotate(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    let gripper = str_arg(args, 0);
    let radians = args[1].as_number().expect("argument kinds are checked before dispatch");
    if !radians.is_finite() {
        return Err(DomainError::InvalidArgument(format!("rotation {radians} is not finite")));
    }
    let angle = world.quantity(gripper).unwrap_or(0.0) + radians;
    if angle.abs() > ROTATION_LIMIT + SLACK {
        return Err(DomainError::StateInconsistent(format!(
            "`{gripper}` would reach {angle:.4} rad, outside its range of ±{ROTATION_LIMIT:.4} rad"
        )));
    }
    world.set_quantity(gripper, angle);
    Ok(Value::None)
}
