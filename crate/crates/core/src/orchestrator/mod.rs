//! The plan, validate, feedback loop over the scenes of a recipe.
//!
//! Each scene gets up to `budget` planner rounds. A round builds the action
//! prompt (with the previous round's feedback), asks the planner, parses the
//! response and validates the whole plan from the scene's entry state. A
//! rejected plan or an unmet target is rendered as feedback for the next round.

mod oracle;
mod planner;
mod prompt;
mod remote;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use oracle::{candidate_locations, oracle_plan, GroundActions, OracleError, DEFAULT_NODE_CAP};
pub use planner::{
    infeasible_substitutions, plan_response, seeded_faults, CorrectingPlanner, Fault, FaultyPlanner, OraclePlanner,
    PlanBook, Planner, PlannerError, PlannerRequest, ScriptBook, ScriptedPlanner,
};
pub use prompt::{
    build_action_prompt, build_target_prompt, render_diagnosis, render_feedback, Feedback, Message, PromptMessages,
    Role, ALLOWED_ACTIONS_HEADER, ERROR_HEADER,
};
pub use remote::{RemoteConfig, RemotePlanner, MODEL_VAR, TOKEN_VAR, URL_VAR};

use crate::foon::{EnvironmentState, TargetState, TaskGraph};
use crate::io::{parse_planner_response, PlanStep, PlannerResponse, ResponseKind};
use crate::motion::MotionLibrary;
use crate::validator::{apply_action, check_action, check_goal, validate_plan, GoalReport, ValidatedPlan};

pub const DEFAULT_BUDGET: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Planner rounds allowed per scene.
    pub budget: u32,
    /// `false` accepts planner output unchecked and audits it afterwards.
    pub validate: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: DEFAULT_BUDGET,
            validate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrchestratorError {
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error("iteration budget must be at least 1")]
    InvalidBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptRound {
    pub round: u32,
    pub prompt: PromptMessages,
    pub response: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback: Option<Feedback>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SceneOutcome {
    Success,
    Exhausted { feedback: Feedback },
    /// Unchecked mode: the audit found invalid steps or an unmet target.
    AuditFailed {
        invalid_steps: Vec<usize>,
        goal: GoalReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        response_error: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SceneResult {
    pub scene_id: u32,
    pub outcome: SceneOutcome,
    pub rounds: u32,
    /// The committed plan, or the last one tried.
    pub plan: Vec<PlanStep>,
    pub transcript: Vec<TranscriptRound>,
    #[serde(skip)]
    pub validated: Option<ValidatedPlan>,
}

impl SceneResult {
    pub fn succeeded(&self) -> bool {
        self.outcome == SceneOutcome::Success
    }

    pub fn replans(&self) -> u32 {
        self.rounds.saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecipeResult {
    pub scenes: Vec<SceneResult>,
    pub graph: TaskGraph,
    pub final_env: EnvironmentState,
    pub success: bool,
    pub validated: bool,
}

impl RecipeResult {
    pub fn total_rounds(&self) -> u32 {
        self.scenes.iter().map(|s| s.rounds).sum()
    }

    pub fn total_replans(&self) -> u32 {
        self.scenes.iter().map(SceneResult::replans).sum()
    }

    pub fn report(&self) -> RunReport {
        RunReport {
            mode: if self.validated { "validated" } else { "unchecked" }.to_string(),
            success: self.success,
            scenes_total: self.scenes.len(),
            scenes_succeeded: self.scenes.iter().filter(|s| s.succeeded()).count(),
            total_rounds: self.total_rounds(),
            total_replans: self.total_replans(),
            units: self.graph.len(),
            scenes: self
                .scenes
                .iter()
                .map(|s| SceneReport {
                    scene_id: s.scene_id,
                    outcome: s.outcome.clone(),
                    rounds: s.rounds,
                    replans: s.replans(),
                    plan: s.plan.clone(),
                })
                .collect(),
        }
    }

    pub fn transcript(&self) -> Vec<SceneTranscript<'_>> {
        self.scenes
            .iter()
            .map(|s| SceneTranscript {
                scene_id: s.scene_id,
                rounds: &s.transcript,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SceneReport {
    pub scene_id: u32,
    pub outcome: SceneOutcome,
    pub rounds: u32,
    pub replans: u32,
    pub plan: Vec<PlanStep>,
}

/// Per-scene and per-recipe round counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub mode: String,
    pub success: bool,
    pub scenes_total: usize,
    pub scenes_succeeded: usize,
    pub total_rounds: u32,
    pub total_replans: u32,
    pub units: usize,
    pub scenes: Vec<SceneReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SceneTranscript<'a> {
    pub scene_id: u32,
    pub rounds: &'a [TranscriptRound],
}

fn parse_steps(response: &str) -> Result<Vec<PlanStep>, String> {
    match parse_planner_response(response, ResponseKind::ActionPlan) {
        Ok(PlannerResponse::ActionPlan(steps)) => Ok(steps),
        Ok(other) => Err(format!("unexpected response {other:?}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Runs the validated loop for one scene and returns the state it ends in.
pub fn run_scene(
    env: &EnvironmentState,
    target: &TargetState,
    planner: &mut dyn Planner,
    library: &MotionLibrary,
    config: &RunConfig,
) -> Result<(SceneResult, EnvironmentState), OrchestratorError> {
    if config.budget == 0 {
        return Err(OrchestratorError::InvalidBudget);
    }
    let mut transcript = Vec::new();
    let mut feedback: Option<Feedback> = None;
    let mut last_plan = Vec::new();
    for round in 1..=config.budget {
        let feedback_text = feedback.as_ref().map(render_feedback);
        let prompt = build_action_prompt(env, target, feedback_text.as_deref(), library);
        let response = planner.respond(&PlannerRequest {
            scene_id: target.scene_id,
            round,
            kind: ResponseKind::ActionPlan,
            prompt: &prompt,
            env,
            target,
            feedback: feedback.as_ref(),
        })?;
        let verdict = match parse_steps(&response) {
            Err(detail) => Err(Feedback::Response { detail }),
            Ok(steps) => {
                last_plan = steps;
                match validate_plan(env, &last_plan, library) {
                    Err(failure) => Err(Feedback::Diagnosis(failure.diagnosis)),
                    Ok(plan) => {
                        let report = check_goal(plan.final_env(), target);
                        if report.satisfied {
                            Ok(plan)
                        } else {
                            Err(Feedback::Goal(report))
                        }
                    }
                }
            }
        };
        match verdict {
            Ok(plan) => {
                transcript.push(TranscriptRound {
                    round,
                    prompt,
                    response,
                    feedback: None,
                    feedback_text: None,
                });
                let exit = plan.final_env().clone();
                let result = SceneResult {
                    scene_id: target.scene_id,
                    outcome: SceneOutcome::Success,
                    rounds: round,
                    plan: last_plan,
                    transcript,
                    validated: Some(plan),
                };
                return Ok((result, exit));
            }
            Err(next) => {
                transcript.push(TranscriptRound {
                    round,
                    prompt,
                    response,
                    feedback: Some(next.clone()),
                    feedback_text: Some(render_feedback(&next)),
                });
                feedback = Some(next);
            }
        }
    }
    let result = SceneResult {
        scene_id: target.scene_id,
        outcome: SceneOutcome::Exhausted {
            feedback: feedback.expect("budget is at least one round"),
        },
        rounds: config.budget,
        plan: last_plan,
        transcript,
        validated: None,
    };
    Ok((result, env.clone()))
}

/// Runs every scene in order, threading the environment, and assembles the graph.
pub fn run_recipe(
    env: &EnvironmentState,
    targets: &[TargetState],
    planner: &mut dyn Planner,
    library: &MotionLibrary,
    config: &RunConfig,
) -> Result<RecipeResult, OrchestratorError> {
    if !config.validate {
        return run_unchecked(env, targets, planner, library);
    }
    let mut current = env.clone();
    let mut graph = TaskGraph::new();
    let mut scenes = Vec::new();
    for target in targets {
        let (result, next) = run_scene(&current, target, planner, library, config)?;
        if let Some(plan) = &result.validated {
            plan.extend_graph(&mut graph);
        }
        let ok = result.succeeded();
        scenes.push(result);
        current = next;
        if !ok {
            break;
        }
    }
    let success = scenes.len() == targets.len() && scenes.iter().all(SceneResult::succeeded);
    Ok(RecipeResult {
        scenes,
        graph,
        final_env: current,
        success,
        validated: true,
    })
}

/// One planner round per scene, output applied without precondition checks,
/// then replayed with checks to find the invalid steps.
fn run_unchecked(
    env: &EnvironmentState,
    targets: &[TargetState],
    planner: &mut dyn Planner,
    library: &MotionLibrary,
) -> Result<RecipeResult, OrchestratorError> {
    let mut current = env.clone();
    let mut graph = TaskGraph::new();
    let mut plans = Vec::new();
    for target in targets {
        let prompt = build_action_prompt(&current, target, None, library);
        let response = planner.respond(&PlannerRequest {
            scene_id: target.scene_id,
            round: 1,
            kind: ResponseKind::ActionPlan,
            prompt: &prompt,
            env: &current,
            target,
            feedback: None,
        })?;
        let parsed = parse_steps(&response);
        for step in parsed.as_deref().unwrap_or_default() {
            let Ok(unit) = library.instantiate(step) else { continue };
            if let Ok(next) = apply_action(&current, &unit) {
                graph.push_unit(unit, &current, &next);
                current = next;
            }
        }
        let round = TranscriptRound {
            round: 1,
            prompt,
            response,
            feedback: None,
            feedback_text: None,
        };
        plans.push((target, parsed, round));
    }

    let mut audited = env.clone();
    let mut scenes = Vec::new();
    for (target, parsed, round) in plans {
        let steps = parsed.clone().unwrap_or_default();
        let mut invalid = Vec::new();
        for (i, step) in steps.iter().enumerate() {
            let applied = library
                .instantiate(step)
                .ok()
                .filter(|unit| check_action(&audited, unit).is_ok())
                .and_then(|unit| apply_action(&audited, &unit).ok());
            match applied {
                Some(next) => audited = next,
                None => invalid.push(i),
            }
        }
        let goal = check_goal(&audited, target);
        let outcome = if parsed.is_ok() && invalid.is_empty() && goal.satisfied {
            SceneOutcome::Success
        } else {
            SceneOutcome::AuditFailed {
                invalid_steps: invalid,
                goal,
                response_error: parsed.err(),
            }
        };
        scenes.push(SceneResult {
            scene_id: target.scene_id,
            outcome,
            rounds: 1,
            plan: steps,
            transcript: vec![round],
            validated: None,
        });
    }
    let success = scenes.iter().all(SceneResult::succeeded);
    Ok(RecipeResult {
        scenes,
        graph,
        final_env: current,
        success,
        validated: false,
    })
}
