use serde::{Deserialize, Serialize};

use super::location::Hand;
use super::state::{EnvironmentState, HandState, ObjectState};
use crate::motion::FunctionalUnit;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Object { id: usize, state: ObjectState },
    Hand { id: usize, state: HandState },
    Motion { id: usize, unit: usize, motion: String },
}

impl Node {
    pub fn id(&self) -> usize {
        match self {
            Node::Object { id, .. } | Node::Hand { id, .. } | Node::Motion { id, .. } => *id,
        }
    }

    pub fn is_motion(&self) -> bool {
        matches!(self, Node::Motion { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
}

/// Participant of a functional unit: a hand or a named object.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Participant {
    Hand(Hand),
    Object(String),
}

/// The accumulated FOON: functional units chained through object-state nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskGraph {
    pub units: Vec<FunctionalUnit>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl TaskGraph {
    pub fn new() -> Self {
        TaskGraph::default()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    /// Returns a new graph with `unit` appended.
    pub fn append_unit(&self, unit: FunctionalUnit, pre: &EnvironmentState, post: &EnvironmentState) -> TaskGraph {
        let mut next = self.clone();
        next.push_unit(unit, pre, post);
        next
    }

    /// In-place form of [`TaskGraph::append_unit`].
    ///
    /// Input nodes reuse the latest node of a participant when its recorded
    /// state equals the pre-state, so consecutive units share object nodes.
    pub fn push_unit(&mut self, unit: FunctionalUnit, pre: &EnvironmentState, post: &EnvironmentState) {
        let participants = participants(&unit, pre, post);
        let unit_index = self.units.len();
        let motion_id = self.nodes.len();
        self.nodes.push(Node::Motion {
            id: motion_id,
            unit: unit_index,
            motion: unit.motion.clone(),
        });

        let mut inputs = Vec::new();
        for p in &participants {
            let Some(state) = snapshot(p, pre) else { continue };
            let id = match self.latest(p) {
                Some(id) if self.nodes[id] == with_id(state.clone(), id) => id,
                _ => {
                    let id = self.nodes.len();
                    self.nodes.push(with_id(state, id));
                    id
                }
            };
            inputs.push(id);
        }
        let mut outputs = Vec::new();
        for p in &participants {
            let Some(state) = snapshot(p, post) else { continue };
            let id = self.nodes.len();
            self.nodes.push(with_id(state, id));
            outputs.push(id);
        }
        for id in inputs {
            self.edges.push(Edge { from: id, to: motion_id });
        }
        for id in outputs {
            self.edges.push(Edge { from: motion_id, to: id });
        }
        self.units.push(unit);
    }

    /// Units in validation order.
    pub fn chronological_units(&self) -> &[FunctionalUnit] {
        &self.units
    }

    pub fn motion_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_motion())
    }

    fn latest(&self, p: &Participant) -> Option<usize> {
        self.nodes.iter().rev().find_map(|n| match (n, p) {
            (Node::Object { id, state }, Participant::Object(name)) if &state.name == name => Some(*id),
            (Node::Hand { id, state }, Participant::Hand(h)) if state.hand == *h => Some(*id),
            _ => None,
        })
    }
}

#[derive(Clone)]
enum Snapshot {
    Object(ObjectState),
    Hand(HandState),
}

fn snapshot(p: &Participant, env: &EnvironmentState) -> Option<Snapshot> {
    match p {
        Participant::Hand(h) => Some(Snapshot::Hand(env.hand_state(*h))),
        Participant::Object(name) => env.object(name).cloned().map(Snapshot::Object),
    }
}

fn with_id(s: Snapshot, id: usize) -> Node {
    match s {
        Snapshot::Object(state) => Node::Object { id, state },
        Snapshot::Hand(state) => Node::Hand { id, state },
    }
}

/// Hands bound by the unit, then bound objects, then any other object whose
/// state changed (e.g. contents moved by a pour).
fn participants(unit: &FunctionalUnit, pre: &EnvironmentState, post: &EnvironmentState) -> Vec<Participant> {
    let mut out: Vec<Participant> = unit.bound_hands().into_iter().map(Participant::Hand).collect();
    for name in unit.bound_objects() {
        out.push(Participant::Object(name.to_string()));
    }
    for object in post.objects() {
        let p = Participant::Object(object.name.clone());
        if pre.object(&object.name) != Some(object) && !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Replays `units` from `initial` through `apply`, returning the final state.
pub fn replay<E>(
    initial: &EnvironmentState,
    units: &[FunctionalUnit],
    mut apply: impl FnMut(&EnvironmentState, &FunctionalUnit) -> Result<EnvironmentState, E>,
) -> Result<EnvironmentState, (usize, E)> {
    let mut env = initial.clone();
    for (i, unit) in units.iter().enumerate() {
        env = apply(&env, unit).map_err(|e| (i, e))?;
    }
    Ok(env)
}
