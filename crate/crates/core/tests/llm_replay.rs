//! Replay fixtures: each file maps prompt hashes to recorded responses.
//! Run with LANTERN_BLESS=1 to rewrite them after a prompt change.

use std::collections::BTreeMap;

use lantern_core::dfa::validate_dfa;
use lantern_core::env::EnvName;
use lantern_core::fixtures::{prompt_spec, replay_fixture_path};
use lantern_core::llm::{generate_dfa, record_replay, LlmClientConfig, LlmError};

const CHAIN: &str = r#"{"states":["ω0","ω1","ω2","ω3","ω4"],"alphabet":["key","shield","sword","dragon","none"],"initial":"ω0","accepting":["ω4"],"transitions":[{"from":"ω0","symbol":"key","to":"ω1"},{"from":"ω1","symbol":"shield","to":"ω2"},{"from":"ω2","symbol":"sword","to":"ω3"},{"from":"ω3","symbol":"dragon","to":"ω4"}],"descriptions":{"ω0":"start mission","ω1":"collect key","ω2":"collect shield","ω3":"obtain sword from chest","ω4":"defeat dragon (goal)"}}"#;

fn decorated() -> String {
    format!(
        "The task has four ordered subgoals, so a five-state chain suffices.\n\n```json\n{CHAIN}\n```\n\nEach state records the last milestone reached."
    )
}

fn nondeterministic() -> String {
    CHAIN.replace(
        r#"{"from":"ω0","symbol":"key","to":"ω1"},"#,
        r#"{"from":"ω0","symbol":"key","to":"ω1"},{"from":"ω0","symbol":"key","to":"ω2"},"#,
    )
}

fn unknown_symbol() -> String {
    CHAIN.replace(r#""dragon","none""#, r#""dragon","gold","none""#)
}

fn expected() -> Vec<(&'static str, BTreeMap<String, String>)> {
    let spec = prompt_spec(EnvName::DungeonQuest).unwrap();
    let bad_nd = nondeterministic();
    let bad_sym = unknown_symbol();
    vec![
        ("dungeon_v1", record_replay(&spec, &[CHAIN]).unwrap()),
        ("decorated", record_replay(&spec, &[&decorated()]).unwrap()),
        ("nondeterministic", record_replay(&spec, &[&bad_nd, &bad_nd, &bad_nd]).unwrap()),
        ("unknown_symbol", record_replay(&spec, &[&bad_sym, &bad_sym, &bad_sym]).unwrap()),
    ]
}

#[test]
fn fixtures_are_current() {
    let bless = std::env::var("LANTERN_BLESS").is_ok();
    for (name, map) in expected() {
        let path = replay_fixture_path(name);
        let text = serde_json::to_string_pretty(&map).unwrap() + "\n";
        if bless {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_default();
        assert_eq!(on_disk, text, "{} is stale; rerun with LANTERN_BLESS=1", path.display());
    }
}

fn run(name: &str) -> Result<lantern_core::llm::GeneratedDfa, LlmError> {
    let spec = prompt_spec(EnvName::DungeonQuest).unwrap();
    generate_dfa(&spec, &LlmClientConfig::replay(replay_fixture_path(name)))
}

#[test]
fn dungeon_fixture_yields_chain() {
    let out = run("dungeon_v1").unwrap();
    let d = &out.dfa;
    assert_eq!(d.states(), ["ω0", "ω1", "ω2", "ω3", "ω4"]);
    assert_eq!(d.step("ω0", "key").unwrap(), "ω1");
    assert_eq!(d.step("ω1", "shield").unwrap(), "ω2");
    assert_eq!(d.step("ω2", "sword").unwrap(), "ω3");
    assert_eq!(d.step("ω3", "dragon").unwrap(), "ω4");
    assert_eq!(d.accepting_states().collect::<Vec<_>>(), vec![4]);
    assert_eq!(d.description(1), "collect key");
    assert!(validate_dfa(d).errors.is_empty());
    assert_eq!(out.provenance.attempts, 1);
}

#[test]
fn replay_is_deterministic() {
    assert_eq!(run("dungeon_v1").unwrap().dfa, run("dungeon_v1").unwrap().dfa);
}

#[test]
fn decorated_fixture_parses() {
    assert_eq!(run("decorated").unwrap().dfa, run("dungeon_v1").unwrap().dfa);
}

#[test]
fn nondeterministic_fixture_retries_then_fails() {
    match run("nondeterministic") {
        Err(LlmError::Exhausted { attempts, last }) => {
            assert_eq!(attempts, 3);
            assert!(last.to_string().contains("nondeterministic"));
        }
        other => panic!("expected exhausted retries, got {other:?}"),
    }
}

#[test]
fn unknown_symbol_fixture_fails() {
    let err = run("unknown_symbol").unwrap_err();
    assert!(err.to_string().contains("unknown symbol"), "{err}");
}
