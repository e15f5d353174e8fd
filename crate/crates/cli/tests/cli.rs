use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_angelsim"))
}

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("..").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn verify_valid_seed_task() {
    let p = fixture("core/fixtures/seeds/task1.txt");
    let o = run(&["verify", p.to_str().unwrap(), "--worlds", "100", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("valid"));
}

#[test]
fn verify_type_error_as_json() {
    let p = fixture("core/fixtures/known_bugs/pick_then_go_to_apple.txt");
    let o = run(&["verify", p.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["valid"], false);
    assert_eq!(v["first_failure"]["error_class"], "TypeError");
    assert!(v["first_failure"]["line"].as_u64().unwrap() > 0);
}

#[test]
fn missing_file_and_bad_usage_exit_two() {
    let o = run(&["verify", "does_not_exist.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "does_not_exist.txt", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"], "usage");
    let o = run(&["frobnicate", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    json(&o);
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "def task_program(:\n    pass\n").unwrap();
    let o = run(&["verify", p.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"], "ParseError");
}

#[test]
fn exhaustive_trace_and_other_domains() {
    let p = fixture("core/fixtures/known_bugs/pick_up_toys_every_room.txt");
    let o = run(&["verify", p.to_str().unwrap(), "--exhaustive", "--trace", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["mode"], "Exhaustive");
    assert!(v["first_failure"]["choices"].is_array());
    assert!(!v["trace"].as_array().unwrap().is_empty());

    let g = fixture("core/fixtures/demo/gripper_triple_rotation.txt");
    assert_eq!(run(&["verify", g.to_str().unwrap(), "--domain", "gripper"]).status.code(), Some(1));
    let c = fixture("core/fixtures/demo/calendar_back_to_back.txt");
    assert_eq!(run(&["verify", c.to_str().unwrap(), "--domain", "calendar", "--quiet"]).status.code(), Some(0));
}

#[test]
fn identical_invocations_print_identical_output() {
    let p = fixture("core/fixtures/known_bugs/pick_in_else_branch.txt");
    let args = ["verify", p.to_str().unwrap(), "--seed", "5", "--json", "--trace"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn generate_dedup_and_stats_from_a_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data.jsonl");
    let report = dir.path().join("report.json");
    let script = fixture("datagen/fixtures/scripted_pipeline.json");
    let gen = |k: &str| {
        run(&[
            "generate", "--mock", script.to_str().unwrap(), "--target", "10", "--seed", "2024",
            "--fixed-clock", "1000", "--parallelism", k, "--output", out.to_str().unwrap(),
            "--report", report.to_str().unwrap(), "--json",
        ])
    };
    let o = gen("1");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["written"], 7);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(gen("4").status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    let rep: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(rep["rejections_by_class"]["TypeError"], 3);

    let o = run(&["dedup", out.to_str().unwrap(), "--threshold", "0.6", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["kept"], 7);
    let o = run(&["dedup", out.to_str().unwrap()]);
    assert_eq!(stdout(&o).as_bytes(), first.as_slice());

    let o = run(&["stats", out.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["size"], 7);
}

#[test]
fn generate_reports_transport_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[llm]\nendpoint = \"http://127.0.0.1:9/v1\"\n[pipeline]\ntarget_records = 1\n").unwrap();
    let out = dir.path().join("o.jsonl");
    let o = run(&["generate", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["error"], "transport");
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn align_falls_back_and_rejects_invalid_programs() {
    let dir = tempfile::tempdir().unwrap();
    let instr = dir.path().join("i.txt");
    std::fs::write(&instr, "Go to the lab\n").unwrap();
    let replay = dir.path().join("empty.json");
    std::fs::write(&replay, "{\"responses\": {}}").unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, "def task_program():\n    go_to(\"lab\")\n").unwrap();
    // no canned response: the replay client fails like a dead endpoint
    let o = run(&["align", instr.to_str().unwrap(), good.to_str().unwrap(), "--replay", replay.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(3));

    let bad = fixture("core/fixtures/known_bugs/pick_then_go_to_apple.txt");
    let o = run(&["align", instr.to_str().unwrap(), bad.to_str().unwrap(), "--replay", replay.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["error"], "invalid_program");
}

#[test]
fn align_replays_a_recorded_completion() {
    use angelsim_datagen::pipeline::alignment_request;
    use angelsim_datagen::{MockLlm, PipelineConfig};

    let dir = tempfile::tempdir().unwrap();
    let program = "def task_program():\n    go_to(\"lab\")\n    say(\"hello\")\n";
    let (instr, prog) = (dir.path().join("i.txt"), dir.path().join("p.txt"));
    std::fs::write(&instr, "Go to the lab").unwrap();
    std::fs::write(&prog, program).unwrap();
    let mut mock = MockLlm::new();
    let req = alignment_request(&PipelineConfig::default(), "Go to the lab", program, 0);
    mock.insert(&req, "1. go_to moves.\n2. It says hello.\n3. Add the greeting.\nCorrected Instruction: Go to the lab and say hello.");
    let replay = dir.path().join("rec.json");
    std::fs::write(&replay, mock.to_json()).unwrap();

    let o = run(&["align", instr.to_str().unwrap(), prog.to_str().unwrap(), "--replay", replay.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["aligned_instruction"], "Go to the lab and say hello.");
    assert_eq!(v["alignment_fallback"], false);
}
