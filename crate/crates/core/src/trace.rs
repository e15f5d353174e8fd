//! Structured log of everything that happens to a world during one run.

use serde::Serialize;

use crate::choice::ChoiceRecord;
use crate::world::{CategorySet, Interval, LiteralKey, Provenance, TriBool};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Call {
        api: String,
        args: Vec<serde_json::Value>,
    },
    Return {
        api: String,
        value: serde_json::Value,
    },
    Choice(ChoiceRecord),
    EntityBound {
        name: String,
        categories: CategorySet,
    },
    LiteralWrite {
        key: LiteralKey,
        value: TriBool,
        provenance: Provenance,
    },
    RobotMoved {
        to: String,
    },
    HoldingChanged {
        holding: Option<String>,
    },
    Invalidated {
        count: usize,
    },
    Said {
        message: String,
    },
    RoomsListed {
        rooms: Vec<String>,
    },
    QuantityChanged {
        entity: String,
        value: f64,
    },
    Scheduled {
        entity: String,
        interval: Interval,
    },
    Failed {
        error_class: String,
        message: String,
    },
}
