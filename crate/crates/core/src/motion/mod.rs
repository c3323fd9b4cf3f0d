//! Motion library: functional-unit templates and their instantiation from plan lines.

mod builtin;
mod template;

pub use builtin::{builtin_library, DEFAULT_CUT_SURFACES};
pub use template::{
    AttrKey, AttrValue, Binding, Change, Condition, ConditionOp, ConditionRecord, Effect, EffectOp, EffectRecord,
    FunctionalUnit, FunctionalUnitTemplate, SlotKind, Subject, Test, ValueSpec, VariableSlot,
};

use std::collections::{BTreeMap, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foon::{Category, Hand, Location};
use crate::io::PlanStep;

/// Placeholder value expanding to the library's configured cut surfaces.
pub const CUT_SURFACES_VALUE: &str = "$cut_surfaces";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LibraryError {
    #[error("cannot parse template document at {location}: {detail}")]
    ParseError { location: String, detail: String },
    #[error("motion {0:?} is defined twice")]
    DuplicateMotion(String),
    #[error("template {template:?} references undeclared slot {slot:?}")]
    UnboundSlot { template: String, slot: String },
    #[error("template {template:?} is invalid: {detail}")]
    InvalidTemplate { template: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("unknown motion {0:?}")]
    UnknownMotion(String),
    #[error("{motion} expects {expected} arguments after the motion name, {got} given")]
    ArityMismatch { motion: String, expected: usize, got: usize },
    #[error("{token:?} is not a valid {kind} for slot {slot}")]
    SlotDomainError { slot: String, kind: SlotKind, token: String },
    #[error("template {motion:?} produced an unusable value: {detail}")]
    Template { motion: String, detail: String },
}

/// On-disk template document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LibraryDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_surfaces: Option<Vec<String>>,
    pub motions: Vec<FunctionalUnitTemplate>,
}

/// Motion name → template, looked up case-insensitively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotionLibrary {
    templates: IndexMap<String, FunctionalUnitTemplate>,
    cut_surfaces: Vec<String>,
}

impl MotionLibrary {
    pub fn new(templates: Vec<FunctionalUnitTemplate>, cut_surfaces: Vec<String>) -> Result<Self, LibraryError> {
        let mut map = IndexMap::new();
        for template in templates {
            validate_template(&template)?;
            let key = template.motion.to_lowercase();
            if map.contains_key(&key) {
                return Err(LibraryError::DuplicateMotion(template.motion));
            }
            map.insert(key, template);
        }
        Ok(MotionLibrary {
            templates: map,
            cut_surfaces,
        })
    }

    pub fn get(&self, motion: &str) -> Option<&FunctionalUnitTemplate> {
        self.templates.get(&motion.trim().to_lowercase())
    }

    /// Canonical motion names in declaration order.
    pub fn motion_names(&self) -> impl Iterator<Item = &str> {
        self.templates.values().map(|t| t.motion.as_str())
    }

    pub fn templates(&self) -> impl Iterator<Item = &FunctionalUnitTemplate> {
        self.templates.values()
    }

    pub fn cut_surfaces(&self) -> &[String] {
        &self.cut_surfaces
    }

    pub fn with_cut_surfaces(mut self, surfaces: Vec<String>) -> Self {
        self.cut_surfaces = surfaces;
        self
    }

    pub fn to_document(&self) -> LibraryDocument {
        LibraryDocument {
            cut_surfaces: Some(self.cut_surfaces.clone()),
            motions: self.templates.values().cloned().collect(),
        }
    }

    /// Binds the step's arguments positionally and grounds every condition and effect.
    pub fn instantiate(&self, step: &PlanStep) -> Result<FunctionalUnit, InstantiateError> {
        let template = self
            .get(&step.motion)
            .ok_or_else(|| InstantiateError::UnknownMotion(step.motion.clone()))?;
        if template.slots.len() != step.args.len() {
            return Err(InstantiateError::ArityMismatch {
                motion: template.motion.clone(),
                expected: template.slots.len(),
                got: step.args.len(),
            });
        }

        let mut bindings = Vec::with_capacity(step.args.len());
        for (slot, raw) in template.slots.iter().zip(&step.args) {
            let token = canonical_token(slot, raw.trim())?;
            bindings.push(Binding {
                slot: slot.name.clone(),
                kind: slot.kind,
                token,
            });
        }
        let grounder = Grounder {
            template,
            bindings: bindings.iter().map(|b| (b.slot.as_str(), b)).collect(),
            cut_surfaces: &self.cut_surfaces,
        };

        let mut inputs = Vec::new();
        for record in &template.inputs {
            for subject in grounder.subject(&record.subject)? {
                inputs.push(Condition {
                    subject,
                    key: record.key,
                    test: grounder.test(record)?,
                });
            }
        }
        let mut outputs = Vec::new();
        for record in &template.outputs {
            for subject in grounder.subject(&record.subject)? {
                let value = grounder.substitute(&record.value);
                let change = match record.op {
                    EffectOp::Set => Change::Set(grounder.value(record.key, &value)?),
                    EffectOp::Add => Change::Add(value),
                    EffectOp::Remove => Change::Remove(value),
                };
                outputs.push(Effect {
                    subject,
                    key: record.key,
                    change,
                });
            }
        }

        Ok(FunctionalUnit {
            motion: template.motion.clone(),
            bindings,
            inputs,
            outputs,
        })
    }
}


/// Parses a template document and builds the library.
///
/// Accepts either `{cut_surfaces?, motions: [...]}` or a bare array of templates.
pub fn load_library(text: &str) -> Result<MotionLibrary, LibraryError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| LibraryError::ParseError {
        location: format!("line {} column {}", e.line(), e.column()),
        detail: e.to_string(),
    })?;
    let schema_error = |location: &str, e: serde_json::Error| LibraryError::ParseError {
        location: location.to_string(),
        detail: e.to_string(),
    };
    let (templates, surfaces) = if value.is_array() {
        let templates: Vec<FunctionalUnitTemplate> =
            serde_json::from_value(value).map_err(|e| schema_error("motions", e))?;
        (templates, None)
    } else {
        let doc: LibraryDocument = serde_json::from_value(value).map_err(|e| schema_error("document", e))?;
        (doc.motions, doc.cut_surfaces)
    };
    let surfaces = surfaces.unwrap_or_else(|| DEFAULT_CUT_SURFACES.iter().map(|s| s.to_string()).collect());
    MotionLibrary::new(templates, surfaces)
}

fn canonical_token(slot: &VariableSlot, raw: &str) -> Result<String, InstantiateError> {
    let domain_error = || InstantiateError::SlotDomainError {
        slot: slot.name.clone(),
        kind: slot.kind,
        token: raw.to_string(),
    };
    match slot.kind {
        SlotKind::Hand => Hand::parse_token(raw).map(|h| h.token().to_string()).ok_or_else(domain_error),
        SlotKind::Location => match raw.parse::<Location>() {
            Ok(Location::InHand(_)) | Err(_) => Err(domain_error()),
            Ok(loc) => Ok(loc.to_string()),
        },
        SlotKind::Object => {
            if raw.is_empty() || raw.parse::<Location>().is_ok() {
                Err(domain_error())
            } else {
                Ok(raw.to_string())
            }
        }
    }
}

struct Grounder<'a> {
    template: &'a FunctionalUnitTemplate,
    bindings: BTreeMap<&'a str, &'a Binding>,
    cut_surfaces: &'a [String],
}

impl Grounder<'_> {
    fn template_error(&self, detail: String) -> InstantiateError {
        InstantiateError::Template {
            motion: self.template.motion.clone(),
            detail,
        }
    }

    /// Resolves a subject expression. Location slots bound to a region yield no subject.
    fn subject(&self, expr: &str) -> Result<Vec<Subject>, InstantiateError> {
        let (slot, contents) = split_subject(expr);
        let binding = self
            .bindings
            .get(slot)
            .ok_or_else(|| self.template_error(format!("unbound subject {expr}")))?;
        let object = match binding.kind {
            SlotKind::Hand => {
                let hand = Hand::parse_token(&binding.token).expect("canonical hand token");
                return Ok(vec![Subject::Hand(hand)]);
            }
            SlotKind::Object => binding.token.clone(),
            SlotKind::Location => match binding.token.parse::<Location>() {
                Ok(Location::In(name)) | Ok(Location::On(name)) => name,
                _ => return Ok(Vec::new()),
            },
        };
        Ok(vec![if contents {
            Subject::ContentsOf(object)
        } else {
            Subject::Object(object)
        }])
    }

    fn substitute(&self, value: &str) -> String {
        let mut out = String::with_capacity(value.len());
        let mut rest = value;
        while let Some(at) = rest.find('?') {
            out.push_str(&rest[..at]);
            let tail = &rest[at..];
            let len = slot_ref_len(tail);
            match self.bindings.get(&tail[..len]) {
                Some(b) if len > 1 => out.push_str(&b.token),
                _ => out.push_str(&tail[..len.max(1)]),
            }
            rest = &tail[len.max(1)..];
        }
        out.push_str(rest);
        out
    }

    fn value(&self, key: AttrKey, text: &str) -> Result<AttrValue, InstantiateError> {
        parse_value(key, text).map_err(|e| self.template_error(e))
    }

    fn test(&self, record: &ConditionRecord) -> Result<Test, InstantiateError> {
        let items = || -> Vec<String> {
            record
                .value
                .as_ref()
                .map(|v| v.items().into_iter().map(|s| self.substitute(s)).collect())
                .unwrap_or_default()
        };
        let single = || -> Result<String, InstantiateError> {
            let mut all = items();
            if all.len() != 1 {
                return Err(self.template_error(format!("{:?} needs exactly one value", record.op)));
            }
            Ok(all.remove(0))
        };
        Ok(match record.op {
            ConditionOp::Eq => Test::Eq(self.value(record.key, &single()?)?),
            ConditionOp::Ne => Test::Ne(self.value(record.key, &single()?)?),
            ConditionOp::OneOf => Test::OneOf(
                items()
                    .iter()
                    .map(|v| self.value(record.key, v))
                    .collect::<Result<_, _>>()?,
            ),
            ConditionOp::Has => Test::Has(single()?),
            ConditionOp::Lacks => Test::Lacks(single()?),
            ConditionOp::NonEmpty => Test::NonEmpty,
            ConditionOp::OnSurface => {
                let names: Vec<String> = match &record.value {
                    Some(ValueSpec::One(v)) if v == CUT_SURFACES_VALUE => self.cut_surfaces.to_vec(),
                    _ => items(),
                };
                Test::OneOf(
                    names
                        .into_iter()
                        .flat_map(|s| {
                            [
                                AttrValue::Place(Location::On(s.clone())),
                                AttrValue::Place(Location::In(s)),
                            ]
                        })
                        .collect(),
                )
            }
        })
    }
}

fn split_subject(expr: &str) -> (&str, bool) {
    match expr.strip_suffix(".contents") {
        Some(slot) => (slot, true),
        None => (expr, false),
    }
}

/// Length of a `?name` reference at the start of `text` (0 if none).
fn slot_ref_len(text: &str) -> usize {
    if !text.starts_with('?') {
        return 0;
    }
    1 + text[1..]
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
        .map(char::len_utf8)
        .sum::<usize>()
}

fn slot_refs(value: &str) -> Vec<&str> {
    let mut refs = Vec::new();
    let mut rest = value;
    while let Some(at) = rest.find('?') {
        let tail = &rest[at..];
        let len = slot_ref_len(tail);
        if len > 1 {
            refs.push(&tail[..len]);
        }
        rest = &tail[len.max(1)..];
    }
    refs
}

pub(crate) fn parse_value(key: AttrKey, text: &str) -> Result<AttrValue, String> {
    match key {
        AttrKey::Category => text
            .parse::<Category>()
            .map(AttrValue::Category)
            .map_err(|e| e.to_string()),
        AttrKey::Place => text.parse::<Location>().map(AttrValue::Place).map_err(|e| e.to_string()),
        AttrKey::Holding => Ok(AttrValue::Holding(match text.trim() {
            "none" | "" => None,
            other => Some(other.to_string()),
        })),
        AttrKey::Status | AttrKey::Contents => Ok(AttrValue::Token(text.to_string())),
    }
}

fn validate_template(t: &FunctionalUnitTemplate) -> Result<(), LibraryError> {
    let invalid = |detail: String| LibraryError::InvalidTemplate {
        template: t.motion.clone(),
        detail,
    };
    if t.motion.trim().is_empty() {
        return Err(invalid("motion name is empty".into()));
    }
    let mut seen = HashSet::new();
    for slot in &t.slots {
        if !slot.name.starts_with('?') || slot_ref_len(&slot.name) != slot.name.len() || slot.name.len() < 2 {
            return Err(invalid(format!("slot name {:?} must look like ?name", slot.name)));
        }
        if !seen.insert(slot.name.as_str()) {
            return Err(invalid(format!("slot {} declared twice", slot.name)));
        }
    }
    let unbound = |slot: &str| LibraryError::UnboundSlot {
        template: t.motion.clone(),
        slot: slot.to_string(),
    };
    let check_subject = |expr: &str, key: AttrKey| -> Result<(), LibraryError> {
        let (name, contents) = split_subject(expr);
        let slot = t.slot(name).ok_or_else(|| unbound(name))?;
        match (slot.kind, contents) {
            (SlotKind::Hand, false) if key == AttrKey::Holding => Ok(()),
            (SlotKind::Hand, _) => Err(invalid(format!("hand subject {expr} only has the holding attribute"))),
            (_, _) if key == AttrKey::Holding => Err(invalid(format!("object subject {expr} has no holding attribute"))),
            _ => Ok(()),
        }
    };
    let check_refs = |value: &str| -> Result<(), LibraryError> {
        for r in slot_refs(value) {
            if t.slot(r).is_none() {
                return Err(unbound(r));
            }
        }
        Ok(())
    };
    let check_literal = |key: AttrKey, value: &str| -> Result<(), LibraryError> {
        if slot_refs(value).is_empty() {
            parse_value(key, value).map_err(|e| invalid(format!("{key}: {e}")))?;
        }
        Ok(())
    };

    for c in &t.inputs {
        check_subject(&c.subject, c.key)?;
        if let Some(v) = &c.value {
            for item in v.items() {
                if item != CUT_SURFACES_VALUE {
                    check_refs(item)?;
                }
            }
        }
        let count = c.value.as_ref().map(|v| v.items().len()).unwrap_or(0);
        let ok = match c.op {
            ConditionOp::Eq | ConditionOp::Ne => {
                matches!(c.key, AttrKey::Category | AttrKey::Place | AttrKey::Holding) && count == 1
            }
            ConditionOp::OneOf => matches!(c.key, AttrKey::Category | AttrKey::Place) && count >= 1,
            ConditionOp::Has | ConditionOp::Lacks => matches!(c.key, AttrKey::Status | AttrKey::Contents) && count == 1,
            ConditionOp::NonEmpty => matches!(c.key, AttrKey::Status | AttrKey::Contents) && count == 0,
            ConditionOp::OnSurface => c.key == AttrKey::Place && count >= 1,
        };
        if !ok {
            return Err(invalid(format!(
                "operator {:?} does not apply to {} with {count} value(s)",
                c.op, c.key
            )));
        }
        if matches!(c.op, ConditionOp::Eq | ConditionOp::Ne | ConditionOp::OneOf) {
            for item in c.value.iter().flat_map(|v| v.items()) {
                check_literal(c.key, item)?;
            }
        }
    }
    for e in &t.outputs {
        check_subject(&e.subject, e.key)?;
        check_refs(&e.value)?;
        let ok = match e.op {
            EffectOp::Set => matches!(e.key, AttrKey::Place | AttrKey::Holding),
            EffectOp::Add | EffectOp::Remove => e.key == AttrKey::Status,
        };
        if !ok {
            return Err(invalid(format!("effect {:?} cannot change {}", e.op, e.key)));
        }
        if e.op == EffectOp::Set {
            check_literal(e.key, &e.value)?;
        }
    }
    Ok(())
}
