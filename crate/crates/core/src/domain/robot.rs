//! The service mobile robot: navigation, perception, dialogue, one-item manipulation.

use super::{str_arg, ApiSpec, ParamSpec, ValueKind};
use crate::error::DomainError;
use crate::value::Value;
use crate::world::{Category, LiteralKey, Provenance, TriBool, World};

/// Return value of `ask` when no answer options are offered.
pub const OPEN_RESPONSE: &str = "response";

pub(super) fn api_table() -> Vec<ApiSpec> {
    use Category::*;
    vec![
        ApiSpec {
            name: "get_current_location",
            params: vec![],
            handler: get_current_location,
        },
        ApiSpec {
            name: "get_all_rooms",
            params: vec![],
            handler: get_all_rooms,
        },
        ApiSpec {
            name: "is_in_room",
            params: vec![ParamSpec::entity("object", &[Object, Person])],
            handler: is_in_room,
        },
        ApiSpec {
            name: "go_to",
            params: vec![ParamSpec::entity("location", &[Location])],
            handler: go_to,
        },
        ApiSpec {
            name: "ask",
            params: vec![
                ParamSpec {
                    allow_empty: true,
                    ..ParamSpec::entity("person", &[Person])
                },
                ParamSpec::value("question", ValueKind::Str),
                ParamSpec::value("options", ValueKind::StrList),
            ],
            handler: ask,
        },
        ApiSpec {
            name: "say",
            params: vec![ParamSpec::value("message", ValueKind::Str)],
            handler: say,
        },
        ApiSpec {
            name: "pick",
            params: vec![ParamSpec::entity("obj", &[Object])],
            handler: pick,
        },
        ApiSpec {
            name: "place",
            params: vec![ParamSpec::entity("obj", &[Object])],
            handler: place,
        },
    ]
}

fn get_current_location(world: &mut World, _: &[Value]) -> Result<Value, DomainError> {
    Ok(Value::str(world.robot_at()))
}

fn get_all_rooms(world: &mut World, _: &[Value]) -> Result<Value, DomainError> {
    if let Some(rooms) = world.rooms_cache() {
        return Ok(Value::list(rooms.iter().map(|r| Value::str(r.as_str())).collect()));
    }
    let (min, max) = world.config().room_count_range;
    let count = min + world.draw_index(max - min + 1);
    let loc = crate::world::CategorySet::of(&[Category::Location]);
    for i in 1..=count {
        world.bind_entity(&format!("room_{i}"), loc)?;
    }
    // BTreeMap iteration keeps the list sorted
    let rooms: Vec<String> = world
        .entities()
        .values()
        .filter(|e| e.categories.contains(Category::Location))
        .map(|e| e.name.clone())
        .collect();
    world.set_rooms_cache(rooms.clone());
    Ok(Value::list(rooms.into_iter().map(Value::Str).collect()))
}

fn is_in_room(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    let x = str_arg(args, 0);
    let key = LiteralKey::presence(x, world.robot_at());
    let value = match world.read_literal(&key) {
        TriBool::Undefined if world.holding() == Some(x) => {
            // the only known instance is the one being carried
            world.write_literal(key, TriBool::False, Provenance::Derived);
            TriBool::False
        }
        TriBool::Undefined => world.sample_literal(key),
        known => known,
    };
    Ok(Value::Bool(value == TriBool::True))
}

fn go_to(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    world.move_robot(str_arg(args, 0));
    Ok(Value::None)
}

/// Reads presence of `x` where the robot stands, assuming it angelically when unknown.
fn require_present(world: &mut World, x: &str, absent: impl FnOnce() -> String) -> Result<(), DomainError> {
    let key = LiteralKey::presence(x, world.robot_at());
    match world.read_literal(&key) {
        TriBool::False => Err(DomainError::StateInconsistent(absent())),
        TriBool::Undefined => {
            world.write_literal(key, TriBool::True, Provenance::Derived);
            Ok(())
        }
        TriBool::True => Ok(()),
    }
}

fn ask(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    let person = str_arg(args, 0).to_string();
    if !person.is_empty() {
        let at = world.robot_at().to_string();
        require_present(world, &person, || format!("cannot ask `{person}`: not present at `{at}`"))?;
    }
    let Value::List(options) = &args[2] else {
        unreachable!("argument kinds are checked before dispatch")
    };
    let options = options.borrow().clone();
    if options.is_empty() {
        return Ok(Value::str(OPEN_RESPONSE));
    }
    let i = world.draw_index(options.len());
    Ok(options[i].clone())
}

fn say(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    world.say(str_arg(args, 0));
    Ok(Value::None)
}

fn pick(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    let obj = str_arg(args, 0).to_string();
    if let Some(held) = world.holding() {
        return Err(DomainError::StateInconsistent(format!(
            "cannot pick `{obj}`: already holding `{held}`"
        )));
    }
    let at = world.robot_at().to_string();
    require_present(world, &obj, || format!("cannot pick `{obj}`: not present at `{at}`"))?;
    world.set_holding(Some(obj.clone()));
    // how many remain is unknown
    world.write_literal(LiteralKey::presence(&obj, &at), TriBool::Undefined, Provenance::Derived);
    Ok(Value::None)
}

fn place(world: &mut World, args: &[Value]) -> Result<Value, DomainError> {
    let obj = str_arg(args, 0);
    if world.holding() != Some(obj) {
        let what = match world.holding() {
            Some(h) => format!("holding `{h}`"),
            None => "holding nothing".to_string(),
        };
        return Err(DomainError::StateInconsistent(format!(
            "cannot place `{obj}`: not holding it ({what})"
        )));
    }
    let key = LiteralKey::presence(obj, world.robot_at());
    world.set_holding(None);
    world.write_literal(key, TriBool::True, Provenance::Derived);
    Ok(Value::None)
}
