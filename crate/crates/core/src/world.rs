//! The simulation world that grows while a program runs.
//!
//! A fresh world knows only the robot's starting location. Every API call
//! that mentions an entity registers it (or narrows its categories), and
//! every state fact the program depends on starts out `Undefined` until the
//! world either samples it through the [`ChoiceSource`] or derives it from a
//! deterministic effect. Entities and literal keys are never removed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::choice::{ChoiceRecord, ChoiceSource};
use crate::domain::DomainConfig;
use crate::error::DomainError;
use crate::trace::TraceEvent;

/// Name of the location the robot starts at.
pub const START_LOCATION: &str = "start_loc";

/// Predicate used by the service-robot domain.
pub const PRESENCE: &str = "at";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Object,
    Location,
    Person,
    Gripper,
    Event,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Object,
        Category::Location,
        Category::Person,
        Category::Gripper,
        Category::Event,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Object => "Object",
            Category::Location => "Location",
            Category::Person => "Person",
            Category::Gripper => "Gripper",
            Category::Event => "Event",
        }
    }
}

/// A set of categories, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CategorySet(u8);

impl CategorySet {
    pub const EMPTY: CategorySet = CategorySet(0);

    pub fn of(cats: &[Category]) -> Self {
        CategorySet(cats.iter().fold(0, |m, c| m | c.bit()))
    }

    pub fn contains(self, c: Category) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn intersect(self, other: CategorySet) -> CategorySet {
        CategorySet(self.0 & other.0)
    }

    pub fn union(self, other: CategorySet) -> CategorySet {
        CategorySet(self.0 | other.0)
    }

    pub fn is_subset(self, other: CategorySet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Category> {
        Category::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    pub fn names(self) -> Vec<&'static str> {
        self.iter().map(Category::as_str).collect()
    }
}

impl fmt::Debug for CategorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(", "))
    }
}

impl fmt::Display for CategorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for CategorySet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.names().serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriBool {
    True,
    False,
    Undefined,
}

impl TriBool {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TriBool::True
        } else {
            TriBool::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            TriBool::True => Some(true),
            TriBool::False => Some(false),
            TriBool::Undefined => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    /// Drawn from the choice source.
    Sampled,
    /// Produced by a deterministic API effect.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LiteralKey {
    pub predicate: String,
    pub entity: String,
    pub location: String,
}

impl LiteralKey {
    pub fn presence(entity: &str, location: &str) -> Self {
        LiteralKey {
            predicate: PRESENCE.to_string(),
            entity: entity.to_string(),
            location: location.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Literal {
    pub value: TriBool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entity {
    pub name: String,
    /// Categories still compatible with every use seen so far; never empty.
    pub categories: CategorySet,
}

/// Half-open interval in minutes since midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub start: u32,
    pub end: u32,
}

impl Interval {
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Growing simulation state for one verification run.
#[derive(Debug)]
pub struct World {
    entities: BTreeMap<String, Entity>,
    literals: BTreeMap<LiteralKey, Literal>,
    robot_at: String,
    holding: Option<String>,
    rooms_cache: Option<Vec<String>>,
    /// Continuous per-entity quantities, e.g. a gripper's accumulated rotation.
    quantities: BTreeMap<String, f64>,
    schedule: BTreeMap<String, Interval>,
    transcript: Vec<String>,
    choices: Box<dyn ChoiceSource>,
    choice_log: Vec<ChoiceRecord>,
    events: Vec<TraceEvent>,
    config: DomainConfig,
    pub(crate) api_call_count: u64,
    pub(crate) step_count: u64,
}

impl World {
    /// A world containing only the robot at [`START_LOCATION`]. Consumes no choices.
    pub fn new(choices: Box<dyn ChoiceSource>, config: DomainConfig) -> World {
        let mut entities = BTreeMap::new();
        entities.insert(
            START_LOCATION.to_string(),
            Entity {
                name: START_LOCATION.to_string(),
                categories: CategorySet::of(&[Category::Location]),
            },
        );
        World {
            entities,
            literals: BTreeMap::new(),
            robot_at: START_LOCATION.to_string(),
            holding: None,
            rooms_cache: None,
            quantities: BTreeMap::new(),
            schedule: BTreeMap::new(),
            transcript: Vec::new(),
            choices,
            choice_log: Vec::new(),
            events: Vec::new(),
            config,
            api_call_count: 0,
            step_count: 0,
        }
    }

    pub fn config(&self) -> &DomainConfig {
        &self.config
    }

    pub fn entities(&self) -> &BTreeMap<String, Entity> {
        &self.entities
    }

    pub fn entity(&self, name: &str) -> Option<&Entity> {
        self.entities.get(name)
    }

    pub fn literals(&self) -> &BTreeMap<LiteralKey, Literal> {
        &self.literals
    }

    pub fn robot_at(&self) -> &str {
        &self.robot_at
    }

    pub fn holding(&self) -> Option<&str> {
        self.holding.as_deref()
    }

    pub fn rooms_cache(&self) -> Option<&[String]> {
        self.rooms_cache.as_deref()
    }

    pub fn transcript(&self) -> &[String] {
        &self.transcript
    }

    pub fn choice_log(&self) -> &[ChoiceRecord] {
        &self.choice_log
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn take_events(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.events)
    }

    pub fn quantity(&self, entity: &str) -> Option<f64> {
        self.quantities.get(entity).copied()
    }

    pub fn schedule(&self) -> &BTreeMap<String, Interval> {
        &self.schedule
    }

    pub fn api_call_count(&self) -> u64 {
        self.api_call_count
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub(crate) fn log(&mut self, event: TraceEvent) {
        self.events.push(event);
    }

    /// Registers `name` with the `required` categories, or narrows the
    /// categories of an existing entity. Fails when nothing compatible remains.
    pub fn bind_entity(&mut self, name: &str, required: CategorySet) -> Result<&Entity, DomainError> {
        debug_assert!(!required.is_empty());
        let (categories, changed) = match self.entities.get(name) {
            None => (required, true),
            Some(existing) => {
                let narrowed = existing.categories.intersect(required);
                if narrowed.is_empty() {
                    return Err(DomainError::Type {
                        entity: name.to_string(),
                        existing: existing.categories,
                        required,
                    });
                }
                (narrowed, narrowed != existing.categories)
            }
        };
        if changed {
            self.entities.insert(
                name.to_string(),
                Entity {
                    name: name.to_string(),
                    categories,
                },
            );
            self.log(TraceEvent::EntityBound {
                name: name.to_string(),
                categories,
            });
        }
        Ok(&self.entities[name])
    }

    pub fn read_literal(&self, key: &LiteralKey) -> TriBool {
        self.literals
            .get(key)
            .map_or(TriBool::Undefined, |l| l.value)
    }

    pub fn literal(&self, key: &LiteralKey) -> Option<&Literal> {
        self.literals.get(key)
    }

    pub fn write_literal(&mut self, key: LiteralKey, value: TriBool, provenance: Provenance) {
        self.log(TraceEvent::LiteralWrite {
            key: key.clone(),
            value,
            provenance,
        });
        self.literals.insert(key, Literal { value, provenance });
    }

    /// Draws a value for an undefined literal and records it as sampled.
    pub fn sample_literal(&mut self, key: LiteralKey) -> TriBool {
        debug_assert_eq!(self.read_literal(&key), TriBool::Undefined);
        let p = self.config.presence_probability;
        let value = TriBool::from_bool(self.draw_bool(p));
        self.write_literal(key, value, Provenance::Sampled);
        value
    }

    /// Forgets every sampled fact; derived facts and the robot's own state stay.
    pub fn invalidate_sampled(&mut self) -> usize {
        let mut count = 0;
        for lit in self.literals.values_mut() {
            if lit.provenance == Provenance::Sampled && lit.value != TriBool::Undefined {
                lit.value = TriBool::Undefined;
                count += 1;
            }
        }
        self.log(TraceEvent::Invalidated { count });
        count
    }

    pub fn draw_bool(&mut self, p_true: f64) -> bool {
        let b = self.choices.next_bool(p_true);
        let record = ChoiceRecord {
            arity: 2,
            value: usize::from(b),
        };
        self.choice_log.push(record);
        self.log(TraceEvent::Choice(record));
        b
    }

    pub fn draw_index(&mut self, n: usize) -> usize {
        let i = self.choices.next_index(n);
        let record = ChoiceRecord { arity: n, value: i };
        self.choice_log.push(record);
        self.log(TraceEvent::Choice(record));
        i
    }

    pub(crate) fn move_robot(&mut self, to: &str) {
        self.robot_at = to.to_string();
        self.log(TraceEvent::RobotMoved { to: to.to_string() });
    }

    pub(crate) fn set_holding(&mut self, item: Option<String>) {
        self.log(TraceEvent::HoldingChanged {
            holding: item.clone(),
        });
        self.holding = item;
    }

    pub(crate) fn set_rooms_cache(&mut self, rooms: Vec<String>) {
        self.log(TraceEvent::RoomsListed {
            rooms: rooms.clone(),
        });
        self.rooms_cache = Some(rooms);
    }

    pub(crate) fn set_quantity(&mut self, entity: &str, value: f64) {
        self.log(TraceEvent::QuantityChanged {
            entity: entity.to_string(),
            value,
        });
        self.quantities.insert(entity.to_string(), value);
    }

    pub(crate) fn insert_interval(&mut self, entity: &str, interval: Interval) {
        self.log(TraceEvent::Scheduled {
            entity: entity.to_string(),
            interval,
        });
        self.schedule.insert(entity.to_string(), interval);
    }

    pub(crate) fn say(&mut self, message: &str) {
        self.log(TraceEvent::Said {
            message: message.to_string(),
        });
        self.transcript.push(message.to_string());
    }

    /// Snapshot of the parts of the world that tests compare across runs.
    pub fn snapshot(&self) -> WorldSnapshot {
        WorldSnapshot {
            entities: self.entities.values().cloned().collect(),
            literals: self
                .literals
                .iter()
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            robot_at: self.robot_at.clone(),
            holding: self.holding.clone(),
            choices: self.choice_log.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorldSnapshot {
    pub entities: Vec<Entity>,
    pub literals: Vec<(LiteralKey, Literal)>,
    pub robot_at: String,
    pub holding: Option<String>,
    pub choices: Vec<ChoiceRecord>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::{ScriptedChoices, SeededChoices};

    fn world() -> World {
        World::new(Box::new(ScriptedChoices::default()), DomainConfig::default())
    }

    fn scripted(bools: &[bool]) -> World {
        World::new(Box::new(ScriptedChoices::from_bools(bools)), DomainConfig::default())
    }

    const OBJ: CategorySet = CategorySet(1);
    const LOC: CategorySet = CategorySet(2);
    const PER: CategorySet = CategorySet(4);

    #[test]
    fn category_bits_match_enum_order() {
        assert_eq!(CategorySet::of(&[Category::Object]), OBJ);
        assert_eq!(CategorySet::of(&[Category::Location]), LOC);
        assert_eq!(CategorySet::of(&[Category::Person]), PER);
    }

    #[test]
    fn fresh_world() {
        let w = World::new(Box::new(SeededChoices::new(42)), DomainConfig::default());
        assert_eq!(w.entities().len(), 1);
        assert!(w.literals().is_empty());
        assert_eq!(w.robot_at(), START_LOCATION);
        assert_eq!(w.holding(), None);
        assert!(w.choice_log().is_empty());
    }

    #[test]
    fn object_then_location_is_a_type_error() {
        let mut w = world();
        w.bind_entity("apple", OBJ).unwrap();
        let err = w.bind_entity("apple", LOC).unwrap_err();
        assert!(matches!(err, DomainError::Type { ref entity, .. } if entity == "apple"));
        assert_eq!(err.to_string(), "`apple` is required to be {Location} but is known to be {Object}");
    }

    #[test]
    fn object_or_person_narrows_to_person() {
        let mut w = world();
        assert_eq!(w.bind_entity("Arjun", OBJ.union(PER)).unwrap().categories, OBJ.union(PER));
        assert_eq!(w.bind_entity("Arjun", PER).unwrap().categories, PER);
        // once a person, never an object again
        assert!(w.bind_entity("Arjun", OBJ).is_err());
    }

    #[test]
    fn rebinding_is_idempotent() {
        let mut w = world();
        w.bind_entity("kitchen", LOC).unwrap();
        assert_eq!(w.bind_entity("kitchen", LOC).unwrap().categories, LOC);
        assert_eq!(w.entities().len(), 2);
    }

    #[test]
    fn literal_store() {
        let mut w = world();
        let key = LiteralKey::presence("apple", "kitchen");
        assert_eq!(w.read_literal(&key), TriBool::Undefined);
        w.write_literal(key.clone(), TriBool::True, Provenance::Derived);
        assert_eq!(w.read_literal(&key), TriBool::True);
        w.invalidate_sampled();
        assert_eq!(w.read_literal(&key), TriBool::True);
    }

    #[test]
    fn sampling_follows_the_script() {
        let mut w = scripted(&[true]);
        assert_eq!(w.sample_literal(LiteralKey::presence("a", "k")), TriBool::True);
        let mut w = scripted(&[false]);
        let key = LiteralKey::presence("a", "k");
        assert_eq!(w.sample_literal(key.clone()), TriBool::False);
        assert_eq!(w.literal(&key).unwrap().provenance, Provenance::Sampled);
    }

    #[test]
    fn sampling_is_reproducible_by_seed() {
        let run = |seed| {
            let mut w = World::new(Box::new(SeededChoices::new(seed)), DomainConfig::default());
            (0..20)
                .map(|i| w.sample_literal(LiteralKey::presence(&format!("o{i}"), "k")))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(7), run(7));
    }

    #[test]
    fn invalidation_only_touches_sampled() {
        let mut w = scripted(&[false]);
        let person = LiteralKey::presence("person", "kitchen");
        let toy = LiteralKey::presence("toy", "living room");
        w.sample_literal(person.clone());
        w.write_literal(toy.clone(), TriBool::True, Provenance::Derived);
        w.move_robot("kitchen");
        assert_eq!(w.invalidate_sampled(), 1);
        assert_eq!(w.read_literal(&person), TriBool::Undefined);
        assert_eq!(w.read_literal(&toy), TriBool::True);
        assert_eq!(w.robot_at(), "kitchen");
        // key survives with an undefined value
        assert!(w.literal(&person).is_some());
    }

    #[test]
    fn invalidating_a_fresh_world_is_a_no_op() {
        let mut w = world();
        assert_eq!(w.invalidate_sampled(), 0);
        assert!(w.literals().is_empty());
    }

    #[test]
    fn intervals_are_half_open() {
        let a = Interval { start: 540, end: 600 };
        let b = Interval { start: 600, end: 660 };
        let c = Interval { start: 570, end: 630 };
        assert!(!a.overlaps(&b));
        assert!(a.overlaps(&c));
        assert!(c.overlaps(&b));
    }
}
