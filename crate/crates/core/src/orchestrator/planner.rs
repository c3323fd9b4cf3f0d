use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::oracle::{candidate_locations, oracle_plan, DEFAULT_NODE_CAP};
use super::prompt::{Feedback, PromptMessages};
use crate::foon::{EnvironmentState, Hand, TargetState};
use crate::io::{PlanStep, ResponseKind};
use crate::motion::{MotionLibrary, SlotKind};
use crate::validator::{check_action, validate_plan};

pub struct PlannerRequest<'a> {
    pub scene_id: u32,
    /// 1-based.
    pub round: u32,
    pub kind: ResponseKind,
    pub prompt: &'a PromptMessages,
    pub env: &'a EnvironmentState,
    pub target: &'a TargetState,
    pub feedback: Option<&'a Feedback>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error("planner transport failed: {0}")]
    Transport(String),
    #[error("planner failed: {0}")]
    Failed(String),
}

/// Anything that answers a prompt with response text.
pub trait Planner {
    fn respond(&mut self, request: &PlannerRequest<'_>) -> Result<String, PlannerError>;
}

/// Plan steps per scene: `{"scenes": {"3": ["Pick | ...", ...]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanBook {
    pub scenes: BTreeMap<u32, Vec<PlanStep>>,
}

impl PlanBook {
    pub fn plan(&self, scene_id: u32) -> &[PlanStep] {
        self.scenes.get(&scene_id).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Raw responses per scene and round: `{"scenes": {"3": ["round 1 text", ...]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptBook {
    pub scenes: BTreeMap<u32, Vec<String>>,
}

pub fn plan_response(steps: &[PlanStep]) -> String {
    serde_json::json!({ "plan": steps }).to_string()
}

/// Replays recorded responses; the last one repeats once a scene runs out.
#[derive(Debug, Clone)]
pub struct ScriptedPlanner {
    book: ScriptBook,
}

impl ScriptedPlanner {
    pub fn new(book: ScriptBook) -> Self {
        ScriptedPlanner { book }
    }
}

impl Planner for ScriptedPlanner {
    fn respond(&mut self, request: &PlannerRequest<'_>) -> Result<String, PlannerError> {
        let responses = self
            .book
            .scenes
            .get(&request.scene_id)
            .filter(|r| !r.is_empty())
            .ok_or_else(|| PlannerError::Failed(format!("no scripted response for scene {}", request.scene_id)))?;
        let at = (request.round as usize).saturating_sub(1).min(responses.len() - 1);
        Ok(responses[at].clone())
    }
}

/// One replaced argument of one golden step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fault {
    pub scene: u32,
    /// 0-based step index within the scene plan.
    pub step: usize,
    /// 0-based argument index (the motion name is not an argument).
    pub arg: usize,
    pub token: String,
}

impl Fault {
    pub fn apply(&self, steps: &mut [PlanStep]) {
        if let Some(arg) = steps.get_mut(self.step).and_then(|s| s.args.get_mut(self.arg)) {
            *arg = self.token.clone();
        }
    }
}

/// Every single-token substitution for `step` that makes it fail in `env`,
/// in random order.
pub fn infeasible_substitutions(
    env: &EnvironmentState,
    step: &PlanStep,
    library: &MotionLibrary,
    rng: &mut impl Rng,
) -> Vec<(usize, String)> {
    let Some(template) = library.get(&step.motion) else { return Vec::new() };
    let objects: Vec<String> = env.object_names().map(str::to_string).collect();
    let places: Vec<String> = candidate_locations(env).iter().map(|l| l.to_string()).collect();
    let mut options = Vec::new();
    for (arg, slot) in template.slots.iter().enumerate() {
        let Some(current) = step.args.get(arg) else { continue };
        let pool: Vec<String> = match slot.kind {
            SlotKind::Hand => Hand::BOTH.iter().map(|h| h.token().to_string()).collect(),
            SlotKind::Location => places.clone(),
            SlotKind::Object => objects.clone(),
        };
        for token in pool {
            if token.eq_ignore_ascii_case(current) {
                continue;
            }
            let mut changed = step.clone();
            changed.args[arg] = token.clone();
            let fails = match library.instantiate(&changed) {
                Ok(unit) => check_action(env, &unit).is_err(),
                Err(_) => true,
            };
            if fails {
                options.push((arg, token));
            }
        }
    }
    options.shuffle(rng);
    options
}

/// Picks `count` distinct steps of the golden plans and a substitution for
/// each that is infeasible in the state the golden plan reaches before it.
pub fn seeded_faults(
    initial: &EnvironmentState,
    book: &PlanBook,
    scene_order: &[u32],
    library: &MotionLibrary,
    count: usize,
    seed: u64,
) -> Vec<Fault> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut positions: Vec<(u32, usize, EnvironmentState)> = Vec::new();
    let mut env = initial.clone();
    for &scene in scene_order {
        let Ok(plan) = validate_plan(&env, book.plan(scene), library) else { break };
        for (i, pre) in plan.trace.iter().take(plan.len()).enumerate() {
            positions.push((scene, i, pre.clone()));
        }
        env = plan.final_env().clone();
    }
    positions.shuffle(&mut rng);
    let mut faults = Vec::new();
    for (scene, step, pre) in positions {
        if faults.len() == count {
            break;
        }
        let golden = &book.plan(scene)[step];
        if let Some((arg, token)) = infeasible_substitutions(&pre, golden, library, &mut rng).into_iter().next() {
            faults.push(Fault { scene, step, arg, token });
        }
    }
    faults.sort_by_key(|f| (f.scene, f.step));
    faults
}

/// Starts from the golden plan with faults applied and, after each
/// diagnosis, restores the golden step at the diagnosed index.
#[derive(Debug, Clone)]
pub struct CorrectingPlanner {
    book: PlanBook,
    faults: Vec<Fault>,
    current: HashMap<u32, Vec<PlanStep>>,
}

impl CorrectingPlanner {
    pub fn new(book: PlanBook, faults: Vec<Fault>) -> Self {
        CorrectingPlanner {
            book,
            faults,
            current: HashMap::new(),
        }
    }

    pub fn faults(&self) -> &[Fault] {
        &self.faults
    }

    fn faulted(&self, scene: u32) -> Vec<PlanStep> {
        let mut steps = self.book.plan(scene).to_vec();
        for fault in self.faults.iter().filter(|f| f.scene == scene) {
            fault.apply(&mut steps);
        }
        steps
    }
}

impl Planner for CorrectingPlanner {
    fn respond(&mut self, request: &PlannerRequest<'_>) -> Result<String, PlannerError> {
        let scene = request.scene_id;
        let golden = self.book.plan(scene).to_vec();
        let plan = match (self.current.get(&scene), request.feedback) {
            (Some(current), Some(Feedback::Diagnosis(d))) => {
                let mut fixed = current.clone();
                if let (Some(slot), Some(good)) = (fixed.get_mut(d.step_index), golden.get(d.step_index)) {
                    *slot = good.clone();
                }
                if fixed == *current {
                    golden
                } else {
                    fixed
                }
            }
            (Some(_), Some(_)) => golden,
            _ => self.faulted(scene),
        };
        self.current.insert(scene, plan.clone());
        Ok(plan_response(&plan))
    }
}

/// Ignores feedback. Each round, with probability `error_rate`, one golden
/// step gets a substitution that is infeasible where it stands.
#[derive(Debug, Clone)]
pub struct FaultyPlanner {
    book: PlanBook,
    library: MotionLibrary,
    error_rate: f64,
    seed: u64,
}

impl FaultyPlanner {
    pub fn new(book: PlanBook, library: MotionLibrary, error_rate: f64, seed: u64) -> Result<Self, PlannerError> {
        if !(0.0..=1.0).contains(&error_rate) {
            return Err(PlannerError::Failed(format!("error rate {error_rate} is outside [0, 1]")));
        }
        Ok(FaultyPlanner {
            book,
            library,
            error_rate,
            seed,
        })
    }

    /// Deterministic per (seed, scene, round).
    pub fn rng(seed: u64, scene: u32, round: u32) -> ChaCha8Rng {
        let key = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(((scene as u64) << 32) | round as u64);
        ChaCha8Rng::seed_from_u64(key)
    }
}

impl Planner for FaultyPlanner {
    fn respond(&mut self, request: &PlannerRequest<'_>) -> Result<String, PlannerError> {
        let mut rng = Self::rng(self.seed, request.scene_id, request.round);
        let mut steps = self.book.plan(request.scene_id).to_vec();
        if !steps.is_empty() && rng.random_bool(self.error_rate) {
            let trace = match validate_plan(request.env, &steps, &self.library) {
                Ok(plan) => plan.trace,
                Err(failure) => failure.prefix.trace,
            };
            let mut order: Vec<usize> = (0..steps.len().min(trace.len())).collect();
            order.shuffle(&mut rng);
            for i in order {
                let options = infeasible_substitutions(&trace[i], &steps[i], &self.library, &mut rng);
                if let Some((arg, token)) = options.into_iter().next() {
                    steps[i].args[arg] = token;
                    break;
                }
            }
        }
        Ok(plan_response(&steps))
    }
}

/// Answers with the breadth-first oracle's plan.
#[derive(Debug, Clone)]
pub struct OraclePlanner {
    library: MotionLibrary,
    depth: usize,
    node_cap: usize,
}

impl OraclePlanner {
    pub fn new(library: MotionLibrary, depth: usize) -> Self {
        OraclePlanner {
            library,
            depth,
            node_cap: DEFAULT_NODE_CAP,
        }
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }
}

impl Planner for OraclePlanner {
    fn respond(&mut self, request: &PlannerRequest<'_>) -> Result<String, PlannerError> {
        match oracle_plan(request.env, request.target, &self.library, self.depth, self.node_cap) {
            Ok(plan) => Ok(plan_response(&plan.unwrap_or_default())),
            Err(e) => Err(PlannerError::Failed(e.to_string())),
        }
    }
}

impl<P: Planner + ?Sized> Planner for Box<P> {
    fn respond(&mut self, request: &PlannerRequest<'_>) -> Result<String, PlannerError> {
        (**self).respond(request)
    }
}
