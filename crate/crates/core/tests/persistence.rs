use std::path::PathBuf;

use proptest::prelude::*;
use staeb_core::fixtures::canonical_instance;
use staeb_core::io::{
    generate_instance, load_instance, matching_from_json, matching_to_json, save_instance, GenConfig, IoError,
};
use staeb_core::{solve_exact, solve_greedy, GreedyConfig, OracleLimits};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn canonical_fixture_loads() {
    let parsed = load_instance(fixture("i0.json")).unwrap();
    assert_eq!(parsed.value, canonical_instance());
    assert!(parsed.warnings.is_empty());
}

#[test]
fn golden_matchings_are_byte_identical() {
    let i0 = canonical_instance();
    let greedy = matching_to_json(&solve_greedy(&i0, &GreedyConfig::default()).0, &i0);
    let exact = matching_to_json(&solve_exact(&i0, &OracleLimits::default()).unwrap().0, &i0);
    assert_eq!(greedy, std::fs::read_to_string(fixture("i0_greedy_matching.json")).unwrap());
    assert_eq!(exact, std::fs::read_to_string(fixture("i0_exact_matching.json")).unwrap());
    let back = matching_from_json(&greedy, &i0).unwrap().value;
    assert_eq!(matching_to_json(&back, &i0), greedy);
}

#[test]
fn missing_field_and_unknown_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("i0.json")).unwrap();

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, text.replacen("\"money_scale\": 1000", "\"money\": 1000", 1)).unwrap();
    match load_instance(&broken) {
        Err(IoError::Schema { path, message }) => {
            assert_eq!(path, "params");
            assert!(message.contains("money_scale"), "{message}");
        }
        other => panic!("expected schema error, got {other:?}"),
    }

    let extra = dir.path().join("extra.json");
    std::fs::write(&extra, text.replacen("\"schema_version\": 1,", "\"schema_version\": 1, \"note\": \"x\",", 1)).unwrap();
    let parsed = load_instance(&extra).unwrap();
    assert_eq!(parsed.value, canonical_instance());
    assert_eq!(parsed.warnings, ["ignored unknown field `note`"]);
}

#[test]
fn missing_file() {
    assert!(matches!(load_instance("/nonexistent/i.json"), Err(IoError::File { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_load_round_trip(
        tasks in 0usize..30,
        workers in 0usize..60,
        skills in 1usize..20,
        seed in any::<u64>(),
        alpha in 0.05f64..0.95,
        beta in 0.001f64..0.9,
    ) {
        let cfg = GenConfig { num_tasks: tasks, num_workers: workers, num_skills: skills, alpha, beta, seed, ..GenConfig::default() };
        let inst = generate_instance(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i.json");
        save_instance(&path, &inst).unwrap();
        let back = load_instance(&path).unwrap();
        prop_assert_eq!(back.value, inst);
        prop_assert!(back.warnings.is_empty());
    }
}
