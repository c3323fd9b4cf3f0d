//! Run manifests: every input of a planning run in one JSON file.

use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use foonplan::foon::{EnvironmentState, TargetState};
use foonplan::io::{parse_environment, parse_srt, parse_targets, SubtitleCue};
use foonplan::motion::{builtin_library, load_library, MotionLibrary};
use foonplan::orchestrator::{
    seeded_faults, CorrectingPlanner, FaultyPlanner, OraclePlanner, PlanBook, Planner, RemoteConfig, RemotePlanner,
    ScriptBook, ScriptedPlanner, DEFAULT_BUDGET,
};
use foonplan::segmenter::{ActionLexicon, DEFAULT_THRESHOLD};
use serde::{Deserialize, Serialize};

use crate::error::{read, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    /// Chat-completion endpoint from FOON_PLANNER_URL / _MODEL / _TOKEN.
    Remote,
    /// Recorded responses per scene and round.
    Scripted,
    /// Golden plans with seeded faults, repaired from feedback.
    Correcting,
    /// Golden plans corrupted at random; ignores feedback.
    Faulty,
    /// Breadth-first search.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub env: PathBuf,
    pub targets: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtitles: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub library: Option<PathBuf>,
    pub planner: PlannerKind,
    /// Script book for `scripted`, plan book for `correcting` and `faulty`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_budget")]
    pub budget: u32,
    pub out: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub faults: usize,
    #[serde(default = "default_error_rate")]
    pub error_rate: f64,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_validate")]
    pub validate: bool,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_budget() -> u32 {
    DEFAULT_BUDGET
}

fn default_error_rate() -> f64 {
    0.3
}

fn default_depth() -> usize {
    8
}

fn default_validate() -> bool {
    true
}

/// Everything a manifest references, read and parsed.
pub struct Inputs {
    pub env: EnvironmentState,
    pub targets: Vec<TargetState>,
    pub cues: Option<Vec<SubtitleCue>>,
    pub lexicon: ActionLexicon,
    pub library: MotionLibrary,
    pub planner: Box<dyn Planner>,
}

impl RunManifest {
    /// Reads a manifest, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let mut manifest: RunManifest = serde_json::from_str(&read(path)?).map_err(|e| CliError::parse(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut manifest.env);
        resolve(&mut manifest.targets);
        resolve(&mut manifest.out);
        for p in [
            &mut manifest.subtitles,
            &mut manifest.lexicon,
            &mut manifest.library,
            &mut manifest.fixture,
        ]
        .into_iter()
        .flatten()
        {
            resolve(p);
        }
        Ok(manifest)
    }

    pub fn check(&self) -> Result<(), CliError> {
        if self.budget == 0 {
            return Err(CliError::Usage("budget must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(CliError::Usage(format!("threshold {} is outside [0, 1]", self.threshold)));
        }
        if !(0.0..=1.0).contains(&self.error_rate) {
            return Err(CliError::Usage(format!("error rate {} is outside [0, 1]", self.error_rate)));
        }
        if self.depth == 0 {
            return Err(CliError::Usage("depth must be at least 1".into()));
        }
        let seeded = self.planner == PlannerKind::Faulty || (self.planner == PlannerKind::Correcting && self.faults > 0);
        if seeded && self.seed.is_none() {
            return Err(CliError::Usage(format!("--seed is required for the {:?} planner", self.planner)));
        }
        let needs_fixture = matches!(
            self.planner,
            PlannerKind::Scripted | PlannerKind::Correcting | PlannerKind::Faulty
        );
        if needs_fixture && self.fixture.is_none() {
            return Err(CliError::Usage(format!("--fixture is required for the {:?} planner", self.planner)));
        }
        Ok(())
    }

    /// Reads and parses every referenced file before any stage runs.
    pub fn load_inputs(&self) -> Result<Inputs, CliError> {
        self.check()?;
        let env = parse_environment(&read(&self.env)?).map_err(|e| CliError::parse(&self.env, e))?;
        let targets = parse_targets(&read(&self.targets)?)
            .map_err(|e| CliError::parse(&self.targets, e))?
            .scenes;
        let cues = match &self.subtitles {
            Some(path) => Some(parse_srt(&read(path)?).map_err(|e| CliError::parse(path, e))?),
            None => None,
        };
        let library = match &self.library {
            Some(path) => load_library(&read(path)?).map_err(|e| CliError::parse(path, e))?,
            None => builtin_library(),
        };
        let lexicon = load_lexicon(self.lexicon.as_deref(), &library)?;
        let planner = self.planner(&env, &targets, &library)?;
        Ok(Inputs {
            env,
            targets,
            cues,
            lexicon,
            library,
            planner,
        })
    }

    fn planner(
        &self,
        env: &EnvironmentState,
        targets: &[TargetState],
        library: &MotionLibrary,
    ) -> Result<Box<dyn Planner>, CliError> {
        let fixture = || -> Result<(&Path, String), CliError> {
            let path = self.fixture.as_deref().expect("checked");
            Ok((path, read(path)?))
        };
        let book = || -> Result<PlanBook, CliError> {
            let (path, text) = fixture()?;
            serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
        };
        let seed = self.seed.unwrap_or(0);
        Ok(match self.planner {
            PlannerKind::Remote => {
                let config = RemoteConfig::from_env().map_err(|e| CliError::Transport(e.to_string()))?;
                Box::new(RemotePlanner::new(config).map_err(|e| CliError::Transport(e.to_string()))?)
            }
            PlannerKind::Scripted => {
                let (path, text) = fixture()?;
                let book: ScriptBook = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
                Box::new(ScriptedPlanner::new(book))
            }
            PlannerKind::Correcting => {
                let book = book()?;
                let order: Vec<u32> = targets.iter().map(|t| t.scene_id).collect();
                let faults = seeded_faults(env, &book, &order, library, self.faults, seed);
                Box::new(CorrectingPlanner::new(book, faults))
            }
            PlannerKind::Faulty => Box::new(
                FaultyPlanner::new(book()?, library.clone(), self.error_rate, seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?,
            ),
            PlannerKind::Oracle => Box::new(OraclePlanner::new(library.clone(), self.depth)),
        })
    }
}

pub fn load_lexicon(path: Option<&Path>, library: &MotionLibrary) -> Result<ActionLexicon, CliError> {
    let lexicon = match path {
        Some(path) => serde_json::from_str(&read(path)?).map_err(|e| CliError::parse(path, e))?,
        None => ActionLexicon::default(),
    };
    lexicon
        .check_against(library)
        .map_err(|e| CliError::parse(path.unwrap_or(Path::new("<default lexicon>")), e))?;
    Ok(lexicon)
}

/// Exclusive claim on an output directory, released on drop.
pub struct OutputLock {
    path: PathBuf,
    _file: File,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(file) => Ok(OutputLock { path, _file: file }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked(dir.to_path_buf())),
            Err(source) => Err(CliError::Io { path, source }),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}
