use std::fmt::Write as _;
use std::path::Path;

use foonplan::foon::EnvironmentState;
use foonplan::io::{
    export_dot, parse_environment, parse_graph, parse_plan_file, parse_srt, parse_targets, serialize_environment,
    serialize_graph, to_canonical_json, NumberedStep,
};
use foonplan::motion::{builtin_library, load_library, MotionLibrary};
use foonplan::orchestrator::{
    oracle_plan, run_recipe, OrchestratorError, PlannerError, RecipeResult, RunConfig, SceneOutcome,
    DEFAULT_NODE_CAP,
};
use foonplan::segmenter::{segment, SceneDocument};
use foonplan::validator::{validate_plan, Diagnosis, DiagnosisKind};
use serde::Serialize;

use crate::error::{read, write, CliError};
use crate::manifest::{load_lexicon, OutputLock, RunManifest};

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn library(path: Option<&Path>) -> Result<MotionLibrary, CliError> {
    match path {
        Some(path) => load_library(&read(path)?).map_err(|e| CliError::parse(path, e)),
        None => Ok(builtin_library()),
    }
}

fn environment(path: &Path) -> Result<EnvironmentState, CliError> {
    parse_environment(&read(path)?).map_err(|e| CliError::parse(path, e))
}

pub fn segment_cmd(
    subtitles: &Path,
    lexicon: Option<&Path>,
    library_path: Option<&Path>,
    threshold: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let text = read(subtitles)?;
    let lexicon = load_lexicon(lexicon, &library(library_path)?)?;
    let cues = parse_srt(&text).map_err(|e| CliError::parse(subtitles, e))?;
    let scenes = segment(&cues, &lexicon, threshold).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(out, &to_canonical_json(&SceneDocument { scenes }))
}

pub fn plan_cmd(manifest: &RunManifest) -> Result<RecipeResult, CliError> {
    let mut inputs = manifest.load_inputs()?;
    let _lock = OutputLock::acquire(&manifest.out)?;
    if let Some(cues) = &inputs.cues {
        let scenes = segment(cues, &inputs.lexicon, manifest.threshold).map_err(|e| CliError::Usage(e.to_string()))?;
        write(&manifest.out.join("scenes.json"), &to_canonical_json(&SceneDocument { scenes }))?;
    }
    let config = RunConfig {
        budget: manifest.budget,
        validate: manifest.validate,
    };
    let result = run_recipe(&inputs.env, &inputs.targets, &mut inputs.planner, &inputs.library, &config)
        .map_err(|e| match e {
            OrchestratorError::Planner(PlannerError::Transport(d)) => CliError::Transport(d),
            OrchestratorError::Planner(PlannerError::Failed(d)) => CliError::Infeasible(format!("planner failed: {d}")),
            OrchestratorError::InvalidBudget => CliError::Usage(e.to_string()),
        })?;

    write(&manifest.out.join("manifest.json"), &to_canonical_json(manifest))?;
    write(&manifest.out.join("graph.json"), &serialize_graph(&result.graph))?;
    write(&manifest.out.join("transcript.json"), &to_canonical_json(&result.transcript()))?;
    write(&manifest.out.join("report.json"), &to_canonical_json(&result.report()))?;

    for scene in &result.scenes {
        let verdict = match &scene.outcome {
            SceneOutcome::Success => "success".to_string(),
            SceneOutcome::Exhausted { .. } => "budget exhausted".to_string(),
            SceneOutcome::AuditFailed { invalid_steps, goal, .. } => {
                format!("audit failed ({} invalid steps, target met: {})", invalid_steps.len(), goal.satisfied)
            }
        };
        let rounds = if scene.rounds == 1 { "round" } else { "rounds" };
        println!("scene {}: {verdict} after {} {rounds}", scene.scene_id, scene.rounds);
    }
    let report = result.report();
    println!(
        "{} mode: {}/{} scenes, {} replans, {} units",
        report.mode, report.scenes_succeeded, report.scenes_total, report.total_replans, report.units
    );
    if !result.success {
        let detail = if manifest.validate {
            "recipe failed: a scene exhausted its planning budget"
        } else {
            "recipe failed the post-hoc audit"
        };
        return Err(CliError::Infeasible(detail.into()));
    }
    Ok(result)
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum Verdict {
    Valid,
    Invalid,
    NotChecked,
}

#[derive(Serialize)]
struct StepReport {
    line: usize,
    step: String,
    verdict: Verdict,
}

#[derive(Serialize)]
struct ValidationReport {
    valid: bool,
    steps: Vec<StepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnosis: Option<Diagnosis>,
    final_env: EnvironmentState,
}

fn describe(d: &Diagnosis) -> Vec<String> {
    match &d.kind {
        DiagnosisKind::Infeasible => d.mismatches.iter().map(|m| m.describe()).collect(),
        DiagnosisKind::UnknownObject { name } => vec![format!("unknown object {name:?}")],
        DiagnosisKind::UnknownMotion { name } => vec![format!("unknown motion {name:?}")],
        DiagnosisKind::BindingError { detail } => vec![detail.clone()],
    }
}

pub fn validate_cmd(
    env_path: &Path,
    plan_path: &Path,
    library_path: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<(), CliError> {
    let env = environment(env_path)?;
    let numbered: Vec<NumberedStep> =
        parse_plan_file(&read(plan_path)?).map_err(|e| CliError::parse(plan_path, e))?;
    let library = library(library_path)?;
    let steps: Vec<_> = numbered.iter().map(|n| n.step.clone()).collect();

    let (diagnosis, final_env) = match validate_plan(&env, &steps, &library) {
        Ok(plan) => (None, plan.final_env().clone()),
        Err(failure) => (Some(failure.diagnosis), failure.env),
    };
    let failed_at = diagnosis.as_ref().map(|d| d.step_index);
    let mut text = String::new();
    let mut reports = Vec::new();
    for (i, n) in numbered.iter().enumerate() {
        let verdict = match failed_at {
            Some(at) if i == at => Verdict::Invalid,
            Some(at) if i > at => Verdict::NotChecked,
            _ => Verdict::Valid,
        };
        let label = match verdict {
            Verdict::Valid => "ok",
            Verdict::Invalid => "INFEASIBLE",
            Verdict::NotChecked => "not checked",
        };
        writeln!(text, "line {}: {label}: {}", n.line, n.step).unwrap();
        if let (Verdict::Invalid, Some(d)) = (&verdict, &diagnosis) {
            for reason in describe(d) {
                writeln!(text, "    {reason}").unwrap();
            }
        }
        reports.push(StepReport {
            line: n.line,
            step: n.step.to_string(),
            verdict,
        });
    }
    text.push_str("final environment:\n");
    text.push_str(&serialize_environment(&final_env));
    print!("{text}");

    let valid = diagnosis.is_none();
    if let Some(path) = report_path {
        let report = ValidationReport {
            valid,
            steps: reports,
            diagnosis: diagnosis.clone(),
            final_env,
        };
        write(path, &to_canonical_json(&report))?;
    }
    match failed_at {
        None => Ok(()),
        Some(at) => Err(CliError::Infeasible(format!(
            "plan is infeasible at line {}",
            numbered[at].line
        ))),
    }
}

pub fn export_cmd(graph_path: &Path, dot: bool, out: Option<&Path>) -> Result<(), CliError> {
    let graph = parse_graph(&read(graph_path)?).map_err(|e| CliError::parse(graph_path, e))?;
    let text = if dot { export_dot(&graph) } else { serialize_graph(&graph) };
    emit(out, &text)
}

pub fn oracle_cmd(
    env_path: &Path,
    targets_path: &Path,
    library_path: Option<&Path>,
    depth: usize,
    node_cap: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut env = environment(env_path)?;
    let targets = parse_targets(&read(targets_path)?)
        .map_err(|e| CliError::parse(targets_path, e))?
        .scenes;
    let library = library(library_path)?;
    let mut text = String::new();
    for target in &targets {
        let plan = oracle_plan(&env, target, &library, depth, node_cap.unwrap_or(DEFAULT_NODE_CAP))
            .map_err(|e| CliError::Usage(e.to_string()))?
            .ok_or_else(|| {
                CliError::Infeasible(format!("scene {}: no plan of at most {depth} steps", target.scene_id))
            })?;
        writeln!(text, "# scene {}", target.scene_id).unwrap();
        for step in &plan {
            writeln!(text, "{step}").unwrap();
        }
        text.push('\n');
        env = validate_plan(&env, &plan, &library)
            .map_err(|f| CliError::Infeasible(format!("oracle plan rejected: {:?}", f.diagnosis)))?
            .final_env()
            .clone();
    }
    emit(out, &text)
}
