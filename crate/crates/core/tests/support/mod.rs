#![allow(dead_code)]

pub mod sim;

use std::path::PathBuf;

use foonplan::foon::{EnvironmentState, TargetState};
use foonplan::io::{parse_environment, parse_targets};
use foonplan::orchestrator::PlanBook;

pub const RECIPES: [&str; 5] = ["gyudon", "miso_soup", "pork_stir_fry", "scrambled_eggs", "tomato_salad"];

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read(relative: &str) -> String {
    let path = fixtures().join(relative);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub struct Recipe {
    pub name: &'static str,
    pub env: EnvironmentState,
    pub targets: Vec<TargetState>,
    pub golden: PlanBook,
}

pub fn recipe(name: &'static str) -> Recipe {
    Recipe {
        name,
        env: parse_environment(&read(&format!("{name}/environment.json"))).unwrap(),
        targets: parse_targets(&read(&format!("{name}/targets.json"))).unwrap().scenes,
        golden: serde_json::from_str(&read(&format!("{name}/golden.json"))).unwrap(),
    }
}

pub fn all_recipes() -> Vec<Recipe> {
    RECIPES.iter().map(|name| recipe(name)).collect()
}

/// A random world, a random walk of at most `max_len` feasible steps, and a
/// target built from what the walk changed.
pub fn reachable_case(seed: u64, max_objects: usize, max_len: usize) -> (sim::World, TargetState, usize) {
    use foonplan::foon::TargetObjectNode;
    use rand::seq::IndexedRandom;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let world = sim::random_world(&mut rng, max_objects);
    let (steps, states) = sim::random_plan(&world, &mut rng, max_len);
    let end = states.last().unwrap();
    let mut nodes = Vec::new();
    for (name, after) in &end.objects {
        let before = &world.objects[name];
        let mut node = TargetObjectNode::named(name.clone());
        let mut changed = false;
        if after.place != before.place && !after.place.ends_with("hand") {
            node = node.place(after.place.parse().unwrap());
            changed = true;
        }
        let gained: Vec<&String> = after.status.difference(&before.status).collect();
        if !gained.is_empty() {
            node = node.status(gained.into_iter().cloned());
            changed = true;
        }
        if changed {
            nodes.push(node);
        }
    }
    let keep = nodes.len().min(2);
    let nodes: Vec<TargetObjectNode> = nodes.choose_multiple(&mut rng, keep).cloned().collect();
    (world, TargetState::new(1, nodes), steps.len())
}
