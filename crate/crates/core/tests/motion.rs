mod support;

use foonplan::motion::{builtin_library, load_library, SlotKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use support::sim::{random_world, signature, Kind};

const SCHEMA_KEYS: [&str; 5] = ["category", "place", "status", "contents", "holding"];

#[test]
fn template_signatures_match_the_reference() {
    let library = builtin_library();
    let names: Vec<&str> = library.motion_names().collect();
    assert_eq!(names, ["Pick", "Place", "Pour", "Cut", "Mix", "Cook"]);
    for template in library.templates() {
        let kinds: Vec<Kind> = template
            .slots
            .iter()
            .map(|s| match s.kind {
                SlotKind::Object => Kind::Object,
                SlotKind::Hand => Kind::Hand,
                SlotKind::Location => Kind::Location,
            })
            .collect();
        assert_eq!(kinds, signature(&template.motion), "{}", template.motion);
    }
}

#[test]
fn every_record_uses_a_schema_key() {
    let doc: Value = serde_json::from_str(&support::read("motions.json")).unwrap();
    for motion in doc["motions"].as_array().unwrap() {
        for section in ["inputs", "outputs"] {
            for record in motion[section].as_array().unwrap() {
                let key = record["key"].as_str().unwrap();
                assert!(SCHEMA_KEYS.contains(&key), "{key}");
            }
        }
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let text = support::read("motions.json").replacen("\"key\": \"holding\"", "\"key\": \"temperature\"", 1);
    assert!(load_library(&text).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn any_well_typed_binding_instantiates(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let world = random_world(&mut rng, 4);
        let library = builtin_library();
        for step in world.all_steps() {
            let unit = library.instantiate(&step).unwrap();
            prop_assert_eq!(unit.bindings.len(), step.args.len());
            prop_assert_eq!(unit.step_text(), step.to_string());
        }
    }
}
