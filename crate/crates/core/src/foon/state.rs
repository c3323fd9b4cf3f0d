use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::location::{Category, Hand, Location};

/// One object in the environment (or a fully specified target object).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectState {
    pub name: String,
    pub category: Category,
    pub place: Location,
    #[serde(default)]
    pub status: BTreeSet<String>,
    #[serde(default)]
    pub contents: Vec<String>,
}

impl ObjectState {
    pub fn new(name: impl Into<String>, category: Category, place: Location) -> Self {
        ObjectState {
            name: name.into(),
            category,
            place,
            status: BTreeSet::new(),
            contents: Vec::new(),
        }
    }

    pub fn with_status<I, S>(mut self, tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.status.extend(tokens.into_iter().map(Into::into));
        self
    }

    pub fn with_contents<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.contents.extend(names.into_iter().map(Into::into));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HandState {
    pub hand: Hand,
    pub holding: Option<String>,
}

impl HandState {
    pub fn empty(hand: Hand) -> Self {
        HandState { hand, holding: None }
    }

    pub fn holding(hand: Hand, object: impl Into<String>) -> Self {
        HandState {
            hand,
            holding: Some(object.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("duplicate object name {0:?}")]
    DuplicateName(String),
    #[error("{object:?} is placed at {location} which names no object")]
    DanglingReference { object: String, location: String },
    #[error("{hand} and {object:?} disagree about what is held")]
    HandInconsistency { hand: Hand, object: String },
    #[error("hands must be exactly one left and one right")]
    HandPair,
    #[error("contents of {container:?} are inconsistent: {detail}")]
    ContentsInconsistency { container: String, detail: String },
    #[error("containment cycle through {0:?}")]
    ContainmentCycle(String),
}

/// The tracked world: every object plus both hands.
///
/// Values are immutable from the outside; actions produce new states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "EnvDocument", into = "EnvDocument")]
pub struct EnvironmentState {
    objects: BTreeMap<String, ObjectState>,
    hands: [Option<String>; 2],
}

fn slot(hand: Hand) -> usize {
    match hand {
        Hand::Left => 0,
        Hand::Right => 1,
    }
}

impl EnvironmentState {
    /// Builds a state and checks every invariant eagerly.
    pub fn new(objects: Vec<ObjectState>, hands: [HandState; 2]) -> Result<Self, EnvError> {
        if hands[0].hand == hands[1].hand {
            return Err(EnvError::HandPair);
        }
        let mut map = BTreeMap::new();
        for object in objects {
            if map.contains_key(&object.name) {
                return Err(EnvError::DuplicateName(object.name));
            }
            map.insert(object.name.clone(), object);
        }
        let mut held = [None, None];
        for h in hands {
            held[slot(h.hand)] = h.holding;
        }
        let env = EnvironmentState { objects: map, hands: held };
        env.audit()?;
        Ok(env)
    }

    /// Environment with no objects and two empty hands.
    pub fn empty() -> Self {
        EnvironmentState {
            objects: BTreeMap::new(),
            hands: [None, None],
        }
    }

    pub fn object(&self, name: &str) -> Option<&ObjectState> {
        self.objects.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.objects.contains_key(name)
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectState> {
        self.objects.values()
    }

    pub fn object_names(&self) -> impl Iterator<Item = &str> {
        self.objects.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn holding(&self, hand: Hand) -> Option<&str> {
        self.hands[slot(hand)].as_deref()
    }

    pub fn hand_state(&self, hand: Hand) -> HandState {
        HandState {
            hand,
            holding: self.hands[slot(hand)].clone(),
        }
    }

    pub(crate) fn object_mut(&mut self, name: &str) -> Option<&mut ObjectState> {
        self.objects.get_mut(name)
    }

    pub(crate) fn set_holding(&mut self, hand: Hand, object: Option<String>) {
        self.hands[slot(hand)] = object;
    }

    /// Moves `name` to `place`, keeping container contents in step.
    pub(crate) fn relocate(&mut self, name: &str, place: Location) {
        let Some(old) = self.objects.get(name).map(|o| o.place.clone()) else {
            return;
        };
        if old == place {
            return;
        }
        if let Location::In(container) = &old {
            if let Some(c) = self.objects.get_mut(container) {
                c.contents.retain(|n| n != name);
            }
        }
        if let Location::In(container) = &place {
            if let Some(c) = self.objects.get_mut(container) {
                c.contents.push(name.to_string());
            }
        }
        if let Some(o) = self.objects.get_mut(name) {
            o.place = place;
        }
    }

    /// Full invariant check: referential closure, hand duality, contents
    /// consistency and acyclic containment.
    pub fn audit(&self) -> Result<(), EnvError> {
        for object in self.objects.values() {
            if let Some(referent) = object.place.referent() {
                if !self.objects.contains_key(referent) {
                    return Err(EnvError::DanglingReference {
                        object: object.name.clone(),
                        location: object.place.to_string(),
                    });
                }
            }
            if let Location::InHand(hand) = object.place {
                if self.holding(hand) != Some(object.name.as_str()) {
                    return Err(EnvError::HandInconsistency {
                        hand,
                        object: object.name.clone(),
                    });
                }
            }
        }
        for hand in Hand::BOTH {
            if let Some(held) = self.holding(hand) {
                match self.objects.get(held) {
                    Some(o) if o.place == Location::InHand(hand) => {}
                    _ => {
                        return Err(EnvError::HandInconsistency {
                            hand,
                            object: held.to_string(),
                        })
                    }
                }
            }
        }
        for container in self.objects.values() {
            let inside: Vec<&str> = self
                .objects
                .values()
                .filter(|o| o.place == Location::In(container.name.clone()))
                .map(|o| o.name.as_str())
                .collect();
            if !container.category.holds_contents() && !(inside.is_empty() && container.contents.is_empty()) {
                return Err(EnvError::ContentsInconsistency {
                    container: container.name.clone(),
                    detail: format!("a {} cannot hold contents", container.category),
                });
            }
            let listed: BTreeSet<&str> = container.contents.iter().map(String::as_str).collect();
            if listed.len() != container.contents.len() {
                return Err(EnvError::ContentsInconsistency {
                    container: container.name.clone(),
                    detail: "an object is listed twice".into(),
                });
            }
            let actual: BTreeSet<&str> = inside.into_iter().collect();
            if listed != actual {
                return Err(EnvError::ContentsInconsistency {
                    container: container.name.clone(),
                    detail: format!("listed {listed:?} but objects placed inside are {actual:?}"),
                });
            }
        }
        for object in self.objects.values() {
            if self.chain_reaches(&object.place, &object.name) {
                return Err(EnvError::ContainmentCycle(object.name.clone()));
            }
        }
        Ok(())
    }

    /// True if following In/On referents from `start` arrives at `target`.
    pub fn chain_reaches(&self, start: &Location, target: &str) -> bool {
        let mut current = start.referent();
        let mut steps = 0;
        while let Some(name) = current {
            if name == target {
                return true;
            }
            steps += 1;
            if steps > self.objects.len() {
                // a cycle not passing through `target`
                return false;
            }
            current = self.objects.get(name).and_then(|o| o.place.referent());
        }
        false
    }
}

/// On-disk environment document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvDocument {
    pub objects: Vec<ObjectState>,
    #[serde(default)]
    pub hands: HandsDocument,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandsDocument {
    #[serde(default)]
    pub left: HeldDocument,
    #[serde(default)]
    pub right: HeldDocument,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeldDocument {
    pub holding: Option<String>,
}

impl TryFrom<EnvDocument> for EnvironmentState {
    type Error = EnvError;

    fn try_from(doc: EnvDocument) -> Result<Self, Self::Error> {
        EnvironmentState::new(
            doc.objects,
            [
                HandState {
                    hand: Hand::Left,
                    holding: doc.hands.left.holding,
                },
                HandState {
                    hand: Hand::Right,
                    holding: doc.hands.right.holding,
                },
            ],
        )
    }
}

impl From<EnvironmentState> for EnvDocument {
    fn from(env: EnvironmentState) -> Self {
        let [left, right] = env.hands;
        EnvDocument {
            objects: env.objects.into_values().collect(),
            hands: HandsDocument {
                left: HeldDocument { holding: left },
                right: HeldDocument { holding: right },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hands_empty() -> [HandState; 2] {
        [HandState::empty(Hand::Left), HandState::empty(Hand::Right)]
    }

    #[test]
    fn kitchen_layout_is_valid() {
        let env = EnvironmentState::new(
            vec![
                ObjectState::new("Knife", Category::Tool, Location::RightStorage),
                ObjectState::new("Cutting board", Category::Tool, Location::RightStorage),
                ObjectState::new("Frying pan", Category::Container, Location::RightStorage),
                ObjectState::new("Onion", Category::Ingredient, Location::LeftStorage).with_status(["raw"]),
                ObjectState::new("Pork", Category::Ingredient, Location::LeftStorage).with_status(["raw"]),
                ObjectState::new("Stove", Category::Machine, Location::Workspace),
            ],
            hands_empty(),
        )
        .unwrap();
        assert_eq!(env.len(), 6);
        assert_eq!(env.holding(Hand::Right), None);
    }

    #[test]
    fn empty_environment_is_valid() {
        let env = EnvironmentState::new(vec![], hands_empty()).unwrap();
        assert!(env.is_empty());
        assert_eq!(env, EnvironmentState::empty());
    }

    #[test]
    fn held_object_must_be_in_hand() {
        let err = EnvironmentState::new(
            vec![ObjectState::new("Knife", Category::Tool, Location::RightStorage)],
            [HandState::empty(Hand::Left), HandState::holding(Hand::Right, "Knife")],
        )
        .unwrap_err();
        assert_eq!(
            err,
            EnvError::HandInconsistency {
                hand: Hand::Right,
                object: "Knife".into()
            }
        );
    }

    #[test]
    fn in_hand_object_must_be_held() {
        let err = EnvironmentState::new(
            vec![ObjectState::new("Knife", Category::Tool, Location::InHand(Hand::Left))],
            hands_empty(),
        )
        .unwrap_err();
        assert!(matches!(err, EnvError::HandInconsistency { hand: Hand::Left, .. }));
    }

    #[test]
    fn rejects_duplicates_and_dangling_referents() {
        let dup = EnvironmentState::new(
            vec![
                ObjectState::new("Bowl", Category::Container, Location::Workspace),
                ObjectState::new("Bowl", Category::Container, Location::Workspace),
            ],
            hands_empty(),
        );
        assert_eq!(dup.unwrap_err(), EnvError::DuplicateName("Bowl".into()));

        let dangling = EnvironmentState::new(
            vec![ObjectState::new("Egg", Category::Ingredient, Location::In("Bowl".into()))],
            hands_empty(),
        );
        assert!(matches!(dangling.unwrap_err(), EnvError::DanglingReference { .. }));
    }

    #[test]
    fn contents_must_match_placements() {
        let unlisted = EnvironmentState::new(
            vec![
                ObjectState::new("Bowl", Category::Container, Location::Workspace),
                ObjectState::new("Egg", Category::Ingredient, Location::In("Bowl".into())),
            ],
            hands_empty(),
        );
        assert!(matches!(unlisted.unwrap_err(), EnvError::ContentsInconsistency { .. }));

        let tool_with_contents = EnvironmentState::new(
            vec![
                ObjectState::new("Knife", Category::Tool, Location::Workspace).with_contents(["Egg"]),
                ObjectState::new("Egg", Category::Ingredient, Location::In("Knife".into())),
            ],
            hands_empty(),
        );
        assert!(matches!(tool_with_contents.unwrap_err(), EnvError::ContentsInconsistency { .. }));

        let ok = EnvironmentState::new(
            vec![
                ObjectState::new("Bowl", Category::Container, Location::Workspace).with_contents(["Egg"]),
                ObjectState::new("Egg", Category::Ingredient, Location::In("Bowl".into())),
            ],
            hands_empty(),
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn rejects_containment_cycles() {
        let err = EnvironmentState::new(
            vec![
                ObjectState::new("Plate", Category::Tool, Location::On("Tray".into())),
                ObjectState::new("Tray", Category::Tool, Location::On("Plate".into())),
            ],
            hands_empty(),
        )
        .unwrap_err();
        assert!(matches!(err, EnvError::ContainmentCycle(_)));
    }

    #[test]
    fn document_round_trip() {
        let text = r#"{
            "objects": [
                {"name": "Bowl", "category": "container", "place": "Workspace", "contents": ["Egg"]},
                {"name": "Egg", "category": "ingredient", "place": "In(Bowl)", "status": ["raw"]},
                {"name": "Whisk", "category": "tool", "place": "Right hand"}
            ],
            "hands": {"right": {"holding": "Whisk"}}
        }"#;
        let env: EnvironmentState = serde_json::from_str(text).unwrap();
        assert_eq!(env.holding(Hand::Right), Some("Whisk"));
        let again: EnvironmentState = serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
        assert_eq!(env, again);
    }

    #[test]
    fn relocate_maintains_contents() {
        let mut env = EnvironmentState::new(
            vec![
                ObjectState::new("Bowl", Category::Container, Location::Workspace).with_contents(["Egg"]),
                ObjectState::new("Pan", Category::Container, Location::Workspace),
                ObjectState::new("Egg", Category::Ingredient, Location::In("Bowl".into())),
            ],
            hands_empty(),
        )
        .unwrap();
        env.relocate("Egg", Location::In("Pan".into()));
        assert!(env.object("Bowl").unwrap().contents.is_empty());
        assert_eq!(env.object("Pan").unwrap().contents, vec!["Egg".to_string()]);
        env.audit().unwrap();
    }
}
