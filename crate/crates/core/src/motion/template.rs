//! Functional units with variables, and their ground instances.
//!
//! A template names its slots (`?obj`, `?hand`, ...) and states its input
//! conditions and output effects as `{subject, key, op, value}` records.
//! Subjects are `?slot` or `?slot.contents` (every object inside the slot
//! object). Values are literal tokens, slot references, or strings embedding
//! slot references such as `In(?dest)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::foon::{Category, Hand, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Object,
    Hand,
    Location,
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlotKind::Object => "object",
            SlotKind::Hand => "hand",
            SlotKind::Location => "location",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSlot {
    pub name: String,
    pub kind: SlotKind,
}

impl VariableSlot {
    pub fn new(name: &str, kind: SlotKind) -> Self {
        VariableSlot {
            name: name.to_string(),
            kind,
        }
    }
}

/// The closed attribute schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrKey {
    Category,
    Place,
    Status,
    Contents,
    Holding,
}

impl AttrKey {
    pub fn as_str(self) -> &'static str {
        match self {
            AttrKey::Category => "category",
            AttrKey::Place => "place",
            AttrKey::Status => "status",
            AttrKey::Contents => "contents",
            AttrKey::Holding => "holding",
        }
    }

    pub fn is_object_key(self) -> bool {
        !matches!(self, AttrKey::Holding)
    }
}

impl fmt::Display for AttrKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionOp {
    #[default]
    Eq,
    Ne,
    OneOf,
    Has,
    Lacks,
    NonEmpty,
    /// Place is `On(s)` or `In(s)` for some cut surface `s`.
    OnSurface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectOp {
    #[default]
    Set,
    Add,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    One(String),
    Many(Vec<String>),
}

impl ValueSpec {
    pub fn items(&self) -> Vec<&str> {
        match self {
            ValueSpec::One(v) => vec![v.as_str()],
            ValueSpec::Many(vs) => vs.iter().map(String::as_str).collect(),
        }
    }
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionRecord {
    pub subject: String,
    pub key: AttrKey,
    #[serde(default, skip_serializing_if = "is_default")]
    pub op: ConditionOp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<ValueSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectRecord {
    pub subject: String,
    pub key: AttrKey,
    #[serde(default, skip_serializing_if = "is_default")]
    pub op: EffectOp,
    pub value: String,
}

/// A functional unit with variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalUnitTemplate {
    pub motion: String,
    pub slots: Vec<VariableSlot>,
    #[serde(default)]
    pub inputs: Vec<ConditionRecord>,
    #[serde(default)]
    pub outputs: Vec<EffectRecord>,
}

impl FunctionalUnitTemplate {
    pub fn slot(&self, name: &str) -> Option<&VariableSlot> {
        self.slots.iter().find(|s| s.name == name)
    }
}

/// Who a ground condition or effect talks about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Object(String),
    Hand(Hand),
    /// Every object currently inside the named container.
    ContentsOf(String),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Object(name) => f.write_str(name),
            Subject::Hand(hand) => f.write_str(hand.subject_name()),
            Subject::ContentsOf(name) => write!(f, "{name}.contents[*]"),
        }
    }
}

/// A concrete attribute value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrValue {
    Category(Category),
    Place(Location),
    Holding(Option<String>),
    /// A status token or a contents member.
    Token(String),
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Category(c) => write!(f, "{c}"),
            AttrValue::Place(l) => write!(f, "{l}"),
            AttrValue::Holding(None) => f.write_str("none"),
            AttrValue::Holding(Some(o)) => f.write_str(o),
            AttrValue::Token(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Test {
    Eq(AttrValue),
    Ne(AttrValue),
    OneOf(Vec<AttrValue>),
    Has(String),
    Lacks(String),
    NonEmpty,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub subject: Subject,
    pub key: AttrKey,
    pub test: Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Change {
    Set(AttrValue),
    Add(String),
    Remove(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Effect {
    pub subject: Subject,
    pub key: AttrKey,
    pub change: Change,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binding {
    pub slot: String,
    pub kind: SlotKind,
    pub token: String,
}

/// A fully ground functional unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionalUnit {
    pub motion: String,
    pub bindings: Vec<Binding>,
    pub inputs: Vec<Condition>,
    pub outputs: Vec<Effect>,
}

impl FunctionalUnit {
    pub fn binding(&self, slot: &str) -> Option<&str> {
        self.bindings.iter().find(|b| b.slot == slot).map(|b| b.token.as_str())
    }

    /// Plan line this unit was instantiated from, in canonical spelling.
    pub fn step_text(&self) -> String {
        let mut text = self.motion.clone();
        for b in &self.bindings {
            text.push_str(" | ");
            text.push_str(&b.token);
        }
        text
    }

    /// Objects named by object slots or by location-slot referents, in slot order.
    pub fn bound_objects(&self) -> Vec<&str> {
        let mut names = Vec::new();
        for b in &self.bindings {
            let name = match b.kind {
                SlotKind::Object => Some(b.token.as_str()),
                SlotKind::Location => {
                    // tokens were canonicalised at instantiation
                    match b.token.parse::<Location>() {
                        Ok(Location::In(_)) | Ok(Location::On(_)) => {
                            let start = b.token.find('(').map(|i| i + 1).unwrap_or(0);
                            Some(&b.token[start..b.token.len() - 1])
                        }
                        _ => None,
                    }
                }
                SlotKind::Hand => None,
            };
            if let Some(name) = name {
                if !names.contains(&name) {
                    names.push(name);
                }
            }
        }
        names
    }

    pub fn bound_hands(&self) -> Vec<Hand> {
        let mut hands = Vec::new();
        for b in &self.bindings {
            if b.kind == SlotKind::Hand {
                if let Some(h) = Hand::parse_token(&b.token) {
                    if !hands.contains(&h) {
                        hands.push(h);
                    }
                }
            }
        }
        hands
    }
}
