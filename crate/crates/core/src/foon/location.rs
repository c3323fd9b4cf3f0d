use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One of the robot's two hands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hand {
    Left,
    Right,
}

impl Hand {
    pub const BOTH: [Hand; 2] = [Hand::Left, Hand::Right];

    pub fn other(self) -> Hand {
        match self {
            Hand::Left => Hand::Right,
            Hand::Right => Hand::Left,
        }
    }

    /// Name used when a hand is the subject of a mismatch, e.g. `RightHand`.
    pub fn subject_name(self) -> &'static str {
        match self {
            Hand::Left => "LeftHand",
            Hand::Right => "RightHand",
        }
    }

    /// Plan-line token, e.g. `Right hand`.
    pub fn token(self) -> &'static str {
        match self {
            Hand::Left => "Left hand",
            Hand::Right => "Right hand",
        }
    }

    /// Accepts `Right hand`, `right`, `RightHand`, `right_hand` and similar spellings.
    pub fn parse_token(token: &str) -> Option<Hand> {
        match squash(token).as_str() {
            "righthand" | "right" => Some(Hand::Right),
            "lefthand" | "left" => Some(Hand::Left),
            _ => None,
        }
    }
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl Serialize for Hand {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Hand::Left => "left",
            Hand::Right => "right",
        })
    }
}

impl<'de> Deserialize<'de> for Hand {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        Hand::parse_token(&raw).ok_or_else(|| serde::de::Error::custom(format!("unknown hand {raw:?}")))
    }
}

/// Symbolic placement of an object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    RightStorage,
    LeftStorage,
    Workspace,
    InHand(Hand),
    In(String),
    On(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a location: {0:?}")]
pub struct LocationParseError(pub String);

impl Location {
    pub const REGIONS: [Location; 3] = [Location::RightStorage, Location::LeftStorage, Location::Workspace];

    /// The object this location points at, if any.
    pub fn referent(&self) -> Option<&str> {
        match self {
            Location::In(name) | Location::On(name) => Some(name),
            _ => None,
        }
    }

    pub fn is_region(&self) -> bool {
        matches!(self, Location::RightStorage | Location::LeftStorage | Location::Workspace)
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::RightStorage => f.write_str("Right storage"),
            Location::LeftStorage => f.write_str("Left storage"),
            Location::Workspace => f.write_str("Workspace"),
            Location::InHand(hand) => f.write_str(hand.token()),
            Location::In(name) => write!(f, "In({name})"),
            Location::On(name) => write!(f, "On({name})"),
        }
    }
}

impl FromStr for Location {
    type Err = LocationParseError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let text = raw.trim();
        match squash(text).as_str() {
            "rightstorage" => return Ok(Location::RightStorage),
            "leftstorage" => return Ok(Location::LeftStorage),
            "workspace" => return Ok(Location::Workspace),
            _ => {}
        }
        if let Some(hand) = Hand::parse_token(text) {
            return Ok(Location::InHand(hand));
        }
        if let Some((prefix, inner)) = text.split_once('(') {
            let inner = inner.strip_suffix(')').map(str::trim).filter(|s| !s.is_empty());
            if let Some(inner) = inner {
                match prefix.trim().to_ascii_lowercase().as_str() {
                    "in" => return Ok(Location::In(inner.to_string())),
                    "on" => return Ok(Location::On(inner.to_string())),
                    _ => {}
                }
            }
        }
        Err(LocationParseError(raw.to_string()))
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Closed set of object categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Ingredient,
    Container,
    Tool,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown category {0:?}")]
pub struct CategoryParseError(pub String);

impl Category {
    pub const ALL: [Category; 4] = [Category::Ingredient, Category::Container, Category::Tool, Category::Machine];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Ingredient => "ingredient",
            Category::Container => "container",
            Category::Tool => "tool",
            Category::Machine => "machine",
        }
    }

    /// Containers and machines may hold contents.
    pub fn holds_contents(self) -> bool {
        matches!(self, Category::Container | Category::Machine)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = CategoryParseError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(raw.trim()))
            .ok_or_else(|| CategoryParseError(raw.to_string()))
    }
}

impl Serialize for Category {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Category {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Lowercase with whitespace, `_` and `-` removed.
fn squash(token: &str) -> String {
    token
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}
