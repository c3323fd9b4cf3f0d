//! Breadth-first search over every ground action, used as ground truth.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::foon::{EnvironmentState, Hand, Location, TargetState};
use crate::io::PlanStep;
use crate::motion::{AttrKey, AttrValue, FunctionalUnit, MotionLibrary, SlotKind, Subject, Test};
use crate::validator::{apply_action, conditions_hold, goal_satisfied};

pub const DEFAULT_NODE_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search visited more than {0} states")]
    SearchSpaceTooLarge(usize),
    #[error("depth bound must be at least 1")]
    InvalidDepth,
}

/// Every location an object could be moved to in `env`.
pub fn candidate_locations(env: &EnvironmentState) -> Vec<Location> {
    let mut out: Vec<Location> = Location::REGIONS.to_vec();
    for object in env.objects() {
        if object.category.holds_contents() {
            out.push(Location::In(object.name.clone()));
        }
    }
    for object in env.objects() {
        out.push(Location::On(object.name.clone()));
    }
    out
}

/// All ground instances of a library over the objects of one environment,
/// sorted by step text and indexed for quick candidate lookup.
#[derive(Debug, Clone)]
pub struct GroundActions {
    actions: Vec<(PlanStep, FunctionalUnit)>,
    by_place: HashMap<(String, Location), Vec<usize>>,
    by_hand: HashMap<(Hand, Option<String>), Vec<usize>>,
    free: Vec<usize>,
}

impl GroundActions {
    pub fn new(env: &EnvironmentState, library: &MotionLibrary) -> Self {
        let objects: Vec<String> = env.object_names().map(str::to_string).collect();
        let hands: Vec<String> = Hand::BOTH.iter().map(|h| h.token().to_string()).collect();
        let places: Vec<String> = candidate_locations(env).iter().map(|l| l.to_string()).collect();

        let mut actions = Vec::new();
        for template in library.templates() {
            let domains: Vec<&[String]> = template
                .slots
                .iter()
                .map(|s| match s.kind {
                    SlotKind::Object => objects.as_slice(),
                    SlotKind::Hand => hands.as_slice(),
                    SlotKind::Location => places.as_slice(),
                })
                .collect();
            for args in product(&domains) {
                let step = PlanStep::new(template.motion.clone(), args);
                if let Ok(unit) = library.instantiate(&step) {
                    actions.push((step, unit));
                }
            }
        }
        actions.sort_by_cached_key(|(step, _)| step.to_string());

        let mut ground = GroundActions {
            actions,
            by_place: HashMap::new(),
            by_hand: HashMap::new(),
            free: Vec::new(),
        };
        for (i, (_, unit)) in ground.actions.iter().enumerate() {
            if let Some(key) = place_key(unit) {
                ground.by_place.entry(key).or_default().push(i);
            } else if let Some(key) = hand_key(unit) {
                ground.by_hand.entry(key).or_default().push(i);
            } else {
                ground.free.push(i);
            }
        }
        ground
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn step(&self, index: usize) -> &PlanStep {
        &self.actions[index].0
    }

    pub fn unit(&self, index: usize) -> &FunctionalUnit {
        &self.actions[index].1
    }

    /// Indices of the actions applicable in `env`, in step-text order.
    pub fn applicable(&self, env: &EnvironmentState) -> Vec<usize> {
        let mut candidates: Vec<usize> = self.free.clone();
        for object in env.objects() {
            if let Some(ids) = self.by_place.get(&(object.name.clone(), object.place.clone())) {
                candidates.extend(ids);
            }
        }
        for hand in Hand::BOTH {
            if let Some(ids) = self.by_hand.get(&(hand, env.holding(hand).map(str::to_string))) {
                candidates.extend(ids);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates.retain(|&i| conditions_hold(env, &self.actions[i].1));
        candidates
    }
}

fn place_key(unit: &FunctionalUnit) -> Option<(String, Location)> {
    unit.inputs.iter().find_map(|c| match (&c.subject, c.key, &c.test) {
        (Subject::Object(name), AttrKey::Place, Test::Eq(AttrValue::Place(loc))) => Some((name.clone(), loc.clone())),
        _ => None,
    })
}

fn hand_key(unit: &FunctionalUnit) -> Option<(Hand, Option<String>)> {
    unit.inputs.iter().find_map(|c| match (&c.subject, c.key, &c.test) {
        (Subject::Hand(hand), AttrKey::Holding, Test::Eq(AttrValue::Holding(held))) => Some((*hand, held.clone())),
        _ => None,
    })
}

fn product(domains: &[&[String]]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![Vec::new()];
    for domain in domains {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                domain.iter().map(move |item| {
                    let mut next = prefix.clone();
                    next.push(item.clone());
                    next
                })
            })
            .collect();
    }
    out
}

fn fingerprint(env: &EnvironmentState) -> u64 {
    let mut h = DefaultHasher::new();
    env.hash(&mut h);
    h.finish()
}

/// Shortest plan reaching `target`, ties broken by step text; `None` when no
/// plan of at most `depth` steps exists.
pub fn oracle_plan(
    env: &EnvironmentState,
    target: &TargetState,
    library: &MotionLibrary,
    depth: usize,
    node_cap: usize,
) -> Result<Option<Vec<PlanStep>>, OracleError> {
    if depth == 0 {
        return Err(OracleError::InvalidDepth);
    }
    if goal_satisfied(env, target) {
        return Ok(Some(Vec::new()));
    }
    let unreachable = target.targets.iter().any(|node| match env.object(&node.name) {
        None => true,
        Some(o) => node.category.is_some_and(|c| c != o.category),
    });
    if unreachable {
        return Ok(None);
    }

    let ground = GroundActions::new(env, library);
    // (parent, action) for every discovered state; index 0 is the root.
    let mut tree: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    let mut seen: HashSet<u64> = HashSet::from([fingerprint(env)]);
    let mut frontier: Vec<(usize, EnvironmentState)> = vec![(0, env.clone())];

    for _ in 0..depth {
        let mut next = Vec::new();
        for (node, state) in &frontier {
            for action in ground.applicable(state) {
                let Ok(child) = apply_action(state, ground.unit(action)) else { continue };
                if !seen.insert(fingerprint(&child)) {
                    continue;
                }
                tree.push((*node, action));
                let id = tree.len() - 1;
                if goal_satisfied(&child, target) {
                    return Ok(Some(path(&tree, id, &ground)));
                }
                if seen.len() > node_cap {
                    return Err(OracleError::SearchSpaceTooLarge(node_cap));
                }
                next.push((id, child));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}

fn path(tree: &[(usize, usize)], mut id: usize, ground: &GroundActions) -> Vec<PlanStep> {
    let mut steps = Vec::new();
    while id != 0 {
        let (parent, action) = tree[id];
        steps.push(ground.step(action).clone());
        id = parent;
    }
    steps.reverse();
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foon::{Category, HandState, ObjectState, TargetObjectNode};
    use crate::motion::builtin_library;

    fn hands() -> [HandState; 2] {
        [HandState::empty(Hand::Left), HandState::empty(Hand::Right)]
    }

    #[test]
    fn single_pick() {
        let env = EnvironmentState::new(
            vec![ObjectState::new("Knife", Category::Tool, Location::RightStorage)],
            hands(),
        )
        .unwrap();
        let target = TargetState::new(1, vec![TargetObjectNode::named("Knife").place(Location::InHand(Hand::Right))]);
        let plan = oracle_plan(&env, &target, &builtin_library(), 3, DEFAULT_NODE_CAP).unwrap().unwrap();
        assert_eq!(plan, vec![PlanStep::new("Pick", ["Knife", "Right hand", "Right storage"])]);
    }

    #[test]
    fn chopping_a_machine_is_impossible() {
        let env = EnvironmentState::new(
            vec![
                ObjectState::new("Stove", Category::Machine, Location::Workspace),
                ObjectState::new("Knife", Category::Tool, Location::RightStorage),
                ObjectState::new("Cutting board", Category::Tool, Location::RightStorage),
            ],
            hands(),
        )
        .unwrap();
        let target = TargetState::new(1, vec![TargetObjectNode::named("Stove").status(["chopped"])]);
        assert_eq!(oracle_plan(&env, &target, &builtin_library(), 4, DEFAULT_NODE_CAP), Ok(None));
    }

    #[test]
    fn satisfied_target_needs_no_steps() {
        let env = EnvironmentState::empty();
        assert_eq!(
            oracle_plan(&env, &TargetState::new(1, vec![]), &builtin_library(), 1, 10),
            Ok(Some(vec![]))
        );
        assert_eq!(
            oracle_plan(&env, &TargetState::new(1, vec![]), &builtin_library(), 0, 10),
            Err(OracleError::InvalidDepth)
        );
    }

    #[test]
    fn node_cap_is_enforced() {
        let env = EnvironmentState::new(
            vec![
                ObjectState::new("Onion", Category::Ingredient, Location::LeftStorage),
                ObjectState::new("Bowl", Category::Container, Location::Workspace),
                ObjectState::new("Spoon", Category::Tool, Location::RightStorage),
            ],
            hands(),
        )
        .unwrap();
        let target = TargetState::new(1, vec![TargetObjectNode::named("Onion").status(["cooked"])]);
        assert_eq!(
            oracle_plan(&env, &target, &builtin_library(), 8, 50),
            Err(OracleError::SearchSpaceTooLarge(50))
        );
    }
}
