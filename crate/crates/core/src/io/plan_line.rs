use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One pipe-delimited plan line: `Pick | Knife | Right hand | Right storage`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlanStep {
    pub motion: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanLineError {
    #[error("empty plan line")]
    EmptyLine,
    /// 1-based field position; the motion name is field 1.
    #[error("field {0} is empty")]
    EmptyField(usize),
}

impl PlanStep {
    pub fn new<I, S>(motion: impl Into<String>, args: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PlanStep {
            motion: motion.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

pub fn parse_plan_line(text: &str) -> Result<PlanStep, PlanLineError> {
    if text.trim().is_empty() {
        return Err(PlanLineError::EmptyLine);
    }
    let mut fields = Vec::new();
    for (position, field) in text.split('|').enumerate() {
        let field = field.trim();
        if field.is_empty() {
            return Err(PlanLineError::EmptyField(position + 1));
        }
        fields.push(field.to_string());
    }
    let motion = fields.remove(0);
    Ok(PlanStep { motion, args: fields })
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.motion)?;
        for arg in &self.args {
            write!(f, " | {arg}")?;
        }
        Ok(())
    }
}

impl FromStr for PlanStep {
    type Err = PlanLineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_plan_line(s)
    }
}

impl Serialize for PlanStep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlanStep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        parse_plan_line(&raw).map_err(serde::de::Error::custom)
    }
}

/// A plan step together with the 1-based line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberedStep {
    pub line: usize,
    pub step: PlanStep,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct PlanFileError {
    pub line: usize,
    pub source: PlanLineError,
}

/// Parses a plan text file: one step per line, `#` comments and blank lines ignored.
pub fn parse_plan_file(text: &str) -> Result<Vec<NumberedStep>, PlanFileError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let step = parse_plan_line(line).map_err(|source| PlanFileError { line: i + 1, source })?;
        steps.push(NumberedStep { line: i + 1, step });
    }
    Ok(steps)
}
