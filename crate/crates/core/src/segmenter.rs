//! Subtitle scene segmentation by text similarity against an action lexicon.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::SubtitleCue;
use crate::motion::MotionLibrary;

pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SegmentError {
    #[error("lexicon has no motions")]
    EmptyLexicon,
    #[error("motion {0:?} has no phrases")]
    EmptyPhrases(String),
    #[error("lexicon motion {0:?} is not in the motion library")]
    UnknownMotion(String),
    #[error("threshold {0} is outside [0, 1]")]
    InvalidThreshold(f64),
}

/// Motion name to keyword phrases, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IndexMap<String, Vec<String>>", into = "IndexMap<String, Vec<String>>")]
pub struct ActionLexicon {
    entries: IndexMap<String, Vec<String>>,
}

impl ActionLexicon {
    pub fn new(entries: IndexMap<String, Vec<String>>) -> Result<Self, SegmentError> {
        if entries.is_empty() {
            return Err(SegmentError::EmptyLexicon);
        }
        let mut clean = IndexMap::new();
        for (motion, phrases) in entries {
            let phrases: Vec<String> = phrases
                .iter()
                .map(|p| p.trim().to_lowercase())
                .filter(|p| !p.is_empty())
                .collect();
            if phrases.is_empty() {
                return Err(SegmentError::EmptyPhrases(motion));
            }
            clean.insert(motion, phrases);
        }
        Ok(ActionLexicon { entries: clean })
    }

    pub fn entries(&self) -> &IndexMap<String, Vec<String>> {
        &self.entries
    }

    pub fn check_against(&self, library: &MotionLibrary) -> Result<(), SegmentError> {
        match self.entries.keys().find(|m| library.get(m).is_none()) {
            Some(m) => Err(SegmentError::UnknownMotion(m.clone())),
            None => Ok(()),
        }
    }

    /// Best-scoring motion for `text`; earlier entries win ties.
    pub fn best_match(&self, text: &str) -> Option<(&str, f64)> {
        let mut best: Option<(&str, f64)> = None;
        for (motion, phrases) in &self.entries {
            let score = phrases.iter().map(|p| similarity(text, p)).fold(0.0, f64::max);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((motion, score));
            }
        }
        best
    }
}

impl Default for ActionLexicon {
    fn default() -> Self {
        let table: [(&str, &[&str]); 6] = [
            ("Pick", &["pick", "grab", "take", "pick up"]),
            ("Place", &["place", "put", "set", "lay"]),
            ("Pour", &["pour", "drizzle"]),
            ("Cut", &["cut", "chop", "slice", "dice", "mince"]),
            ("Mix", &["mix", "stir", "whisk", "combine", "toss"]),
            ("Cook", &["cook", "fry", "heat", "simmer", "boil", "bake"]),
        ];
        let entries = table
            .iter()
            .map(|(m, ps)| (m.to_string(), ps.iter().map(|p| p.to_string()).collect()))
            .collect();
        ActionLexicon::new(entries).expect("default lexicon is valid")
    }
}

impl TryFrom<IndexMap<String, Vec<String>>> for ActionLexicon {
    type Error = SegmentError;

    fn try_from(entries: IndexMap<String, Vec<String>>) -> Result<Self, Self::Error> {
        ActionLexicon::new(entries)
    }
}

impl From<ActionLexicon> for IndexMap<String, Vec<String>> {
    fn from(lexicon: ActionLexicon) -> Self {
        lexicon.entries
    }
}

fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Cosine similarity of token multisets, raised to 1.0 when the phrase occurs
/// in the text as a whole-word sequence.
pub fn similarity(text: &str, phrase: &str) -> f64 {
    let a = tokens(text);
    let b = tokens(phrase);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    if a.windows(b.len()).any(|w| w == b.as_slice()) {
        return 1.0;
    }
    let (ca, cb) = (count(&a), count(&b));
    let dot: f64 = ca.iter().map(|(t, x)| x * cb.get(t).copied().unwrap_or(0.0)).sum();
    let norm = |m: &HashMap<&str, f64>| m.values().map(|x| x * x).sum::<f64>().sqrt();
    dot / (norm(&ca) * norm(&cb))
}

fn count(tokens: &[String]) -> HashMap<&str, f64> {
    let mut m: HashMap<&str, f64> = HashMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_default() += 1.0;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneFlag {
    Cooking,
    CandidateUnnecessary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneRecord {
    /// 1-based.
    pub scene_id: u32,
    /// Cue indices as written in the subtitle file.
    pub first_cue: u32,
    pub last_cue: u32,
    pub motion: Option<String>,
    pub text: String,
    pub start_ms: u64,
    pub end_ms: u64,
    pub flag: SceneFlag,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SceneDocument {
    pub scenes: Vec<SceneRecord>,
}

/// Labels every cue with its best motion (when the score reaches `threshold`)
/// and merges maximal runs of equally labelled cues into scenes.
pub fn label_cues(cues: &[SubtitleCue], lexicon: &ActionLexicon, threshold: f64) -> Result<Vec<Option<String>>, SegmentError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(SegmentError::InvalidThreshold(threshold));
    }
    Ok(cues
        .iter()
        .map(|cue| match lexicon.best_match(&cue.text) {
            Some((motion, score)) if score > 0.0 && score >= threshold => Some(motion.to_string()),
            _ => None,
        })
        .collect())
}

pub fn segment(cues: &[SubtitleCue], lexicon: &ActionLexicon, threshold: f64) -> Result<Vec<SceneRecord>, SegmentError> {
    let labels = label_cues(cues, lexicon, threshold)?;
    let mut scenes: Vec<SceneRecord> = Vec::new();
    for (cue, label) in cues.iter().zip(labels) {
        match scenes.last_mut() {
            Some(scene) if scene.motion == label => {
                scene.last_cue = cue.index;
                scene.end_ms = cue.end_ms;
                scene.text.push(' ');
                scene.text.push_str(&cue.text.replace('\n', " "));
            }
            _ => scenes.push(SceneRecord {
                scene_id: scenes.len() as u32 + 1,
                first_cue: cue.index,
                last_cue: cue.index,
                flag: if label.is_some() {
                    SceneFlag::Cooking
                } else {
                    SceneFlag::CandidateUnnecessary
                },
                motion: label,
                text: cue.text.replace('\n', " "),
                start_ms: cue.start_ms,
                end_ms: cue.end_ms,
            }),
        }
    }
    Ok(scenes)
}
