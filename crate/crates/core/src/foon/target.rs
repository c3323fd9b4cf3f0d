use serde::{Deserialize, Serialize};

use super::location::{Category, Location};

/// Partial requirements on one object; absent attributes are wildcards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetObjectNode {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
    /// Tokens that must all be present (subset semantics).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub place: Option<Location>,
    /// Compared as a set, order-insensitive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contents: Option<Vec<String>>,
}

impl TargetObjectNode {
    pub fn named(name: impl Into<String>) -> Self {
        TargetObjectNode {
            name: name.into(),
            category: None,
            status: None,
            place: None,
            contents: None,
        }
    }

    pub fn status<I, S>(mut self, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.status = Some(tokens.into_iter().map(Into::into).collect());
        self
    }

    pub fn place(mut self, place: Location) -> Self {
        self.place = Some(place);
        self
    }

    pub fn category(mut self, category: Category) -> Self {
        self.category = Some(category);
        self
    }

    pub fn contents<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.contents = Some(names.into_iter().map(Into::into).collect());
        self
    }
}

/// Goal for one scene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetState {
    pub scene_id: u32,
    #[serde(default)]
    pub targets: Vec<TargetObjectNode>,
}

impl TargetState {
    pub fn new(scene_id: u32, targets: Vec<TargetObjectNode>) -> Self {
        TargetState { scene_id, targets }
    }
}

/// On-disk target file: `{scenes: [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDocument {
    pub scenes: Vec<TargetState>,
}
