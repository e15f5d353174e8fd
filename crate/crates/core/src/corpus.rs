//! Programs bundled with the crate: seed examples, known bugs, demos and
//! the small-program corpus used to cross-check the two verification modes.

/// A bundled task program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub domain: &'static str,
    pub source: &'static str,
}

macro_rules! fixtures {
    ($domain:literal, $dir:literal, [$($name:literal),* $(,)?]) => {
        &[$(Fixture {
            name: $name,
            domain: $domain,
            source: include_str!(concat!("../fixtures/", $dir, "/", $name, ".txt")),
        }),*]
    };
}

/// The six few-shot examples given to the generator.
pub const SEED_TASKS: &[Fixture] = fixtures!("robot", "seeds", ["task1", "task2", "task3", "task4", "task5", "task6"]);

/// Programs from real-world deployment; the `_gpt4` variant carries a known bug.
pub const REAL_WORLD: &[Fixture] = fixtures!(
    "robot",
    "realworld",
    ["game_double_money", "borrow_missing_items", "borrow_missing_items_gpt4"]
);

/// Invalid programs discussed as examples of what verification catches.
pub const KNOWN_BUGS: &[Fixture] = fixtures!(
    "robot",
    "known_bugs",
    [
        "pick_then_go_to_apple",
        "pick_when_absent",
        "pick_two_items",
        "pick_in_else_branch",
        "place_without_pick",
        "object_as_location",
        "ask_absent_person",
        "pick_up_toys_every_room",
    ]
);

pub const GRIPPER_DEMOS: &[Fixture] = fixtures!("gripper", "demo", ["gripper_triple_rotation", "gripper_round_trip"]);

pub const CALENDAR_DEMOS: &[Fixture] = fixtures!("calendar", "demo", ["calendar_conflict", "calendar_back_to_back"]);

pub fn find(name: &str) -> Option<&'static Fixture> {
    all().find(|f| f.name == name)
}

pub fn all() -> impl Iterator<Item = &'static Fixture> {
    SEED_TASKS
        .iter()
        .chain(REAL_WORLD)
        .chain(KNOWN_BUGS)
        .chain(GRIPPER_DEMOS)
        .chain(CALENDAR_DEMOS)
        .chain(ORACLE)
}

/// Small programs, valid and invalid, with few enough choices to enumerate.
pub const ORACLE: &[Fixture] = fixtures!(
    "robot",
    "oracle",
    [
        "valid_say_only",
        "valid_check_then_pick",
        "valid_ask_yes_no",
        "valid_two_objects_in_turn",
        "valid_count_present",
        "valid_check_person_then_ask",
        "valid_visit_every_room",
        "valid_deliver_if_missing",
        "valid_bounded_wait",
        "valid_three_options",
        "valid_elif_search",
        "valid_placed_item_is_seen",
        "valid_collect_names",
        "valid_pick_only_if_seen",
        "valid_return_early",
        "valid_room_filter",
        "valid_fetch_and_return",
        "invalid_pick_when_absent",
        "invalid_second_pick_when_present",
        "invalid_place_the_wrong_thing",
        "invalid_ask_after_seeing_absent",
        "invalid_object_as_location",
        "invalid_person_as_object",
        "invalid_answer_dependent_place",
        "invalid_two_present_two_picks",
        "invalid_three_present",
        "invalid_runtime_error_in_branch",
        "invalid_index_empty_list",
        "invalid_many_rooms_two_picks",
        "invalid_busy_wait_without_sleep",
        "invalid_recheck_after_sleep",
        "invalid_place_again",
        "invalid_third_option_double_pick",
        "invalid_count_loop_overflow_pick",
    ]
);
