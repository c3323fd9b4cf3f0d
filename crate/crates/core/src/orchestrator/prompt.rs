use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::foon::{Category, EnvironmentState, TargetDocument, TargetState};
use crate::io::to_canonical_json;
use crate::motion::{MotionLibrary, SlotKind};
use crate::segmenter::SceneRecord;
use crate::validator::{Diagnosis, DiagnosisKind, GoalReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
    /// Opaque image references, forwarded untouched.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub images: Vec<String>,
}

impl Message {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Message {
            role,
            content: content.into(),
            images: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PromptMessages {
    pub messages: Vec<Message>,
}

impl PromptMessages {
    pub fn system(&self) -> Option<&Message> {
        self.messages.first().filter(|m| m.role == Role::System)
    }

    pub fn last_user(&self) -> Option<&Message> {
        self.messages.iter().rev().find(|m| m.role == Role::User)
    }
}

/// What went wrong in the previous round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Feedback {
    Diagnosis(Diagnosis),
    Goal(GoalReport),
    Response { detail: String },
}

pub const ALLOWED_ACTIONS_HEADER: &str = "Allowed actions:";
pub const ERROR_HEADER: &str = "Errors in your previous plan:";

const ACTION_BACKGROUND: &str = "You are the task planner of a two-armed cooking robot. \
The robot's knowledge is a functional object-oriented network: object and hand states \
linked by motions. Each motion is written as one pipe-delimited line naming the motion \
followed by its variables in order.";

const ACTION_TASK: &str = "Produce the sequence of actions that changes the environment \
object node into a state that satisfies every requirement of the target object node.";

const ACTION_THOUGHTS: &str = "Think it through before answering: list the target \
attributes not yet satisfied, find the motion that produces each one, check what that \
motion needs (a free hand, an object in a given place, a held tool) and add the actions \
that establish it first. A hand holds at most one object. Tools and containers can be \
put back after use.";

const ACTION_FORMAT: &str = "Answer with a single JSON object and nothing else: \
{\"plan\": [\"Motion | arg | arg\", ...]}. Use object names exactly as written in the \
environment. Hands are \"Left hand\" and \"Right hand\". Locations are \"Right storage\", \
\"Left storage\", \"Workspace\", \"In(<object>)\" or \"On(<object>)\".";

const ACTION_EXAMPLE: &str = "Example.\nEnvironment: Knife in Right storage, Onion in \
Left storage, Cutting board in Right storage, both hands empty.\nTarget: Onion status \
includes chopped.\nAnswer: {\"plan\": [\"Pick | Onion | Left hand | Left storage\", \
\"Place | Onion | Left hand | On(Cutting board)\", \"Pick | Knife | Right hand | Right storage\", \
\"Cut | Onion | Knife | Right hand\"]}";

const TARGET_BACKGROUND: &str = "You watch cooking videos for a robot. Each scene comes \
with its subtitles and a few key frames. You describe the state the objects must reach \
by the end of the scene.";

const TARGET_TASK: &str = "Estimate the target object node of this scene: every object \
whose state the scene changes, with the attributes it has once the scene ends.";

const TARGET_THOUGHTS: &str = "Think it through before answering: name the action the \
subtitles describe, the objects it involves, and how their place, status or contents \
change. Intros, outros and talk that shows no cooking need no target.";

const TARGET_FORMAT: &str = "Answer with a single JSON object and nothing else: \
{\"targets\": [{\"name\": ..., \"category\": ..., \"status\": [...], \"place\": ..., \
\"contents\": [...]}]}, leaving out attributes the scene does not determine. \
Categories are exactly ingredient, container, tool or machine. If the scene needs no \
target, answer {\"unnecessary\": true}.";

const TARGET_EXAMPLE: &str = "Example.\nSubtitles: \"Chop the onion finely\"\n\
Answer: {\"targets\": [{\"name\": \"Onion\", \"category\": \"ingredient\", \"status\": [\"chopped\"]}]}";

fn allowed_actions(library: &MotionLibrary) -> String {
    let mut out = String::from(ALLOWED_ACTIONS_HEADER);
    for template in library.templates() {
        out.push_str("\n- ");
        out.push_str(&template.motion);
        for slot in &template.slots {
            let kind = match slot.kind {
                SlotKind::Object => "object",
                SlotKind::Hand => "hand",
                SlotKind::Location => "location",
            };
            write!(out, " | {}:{kind}", slot.name).unwrap();
        }
    }
    out
}

fn attribute_schema() -> String {
    let categories: Vec<&str> = Category::ALL.iter().map(|c| c.as_str()).collect();
    format!(
        "Object node attributes:\n- name: unique object name\n- category: one of {}\n\
         - place: Right storage, Left storage, Workspace, Left hand, Right hand, In(<object>) or On(<object>)\n\
         - status: set of tokens such as raw, chopped, mixed, cooked, empty\n\
         - contents: objects inside a container or machine",
        categories.join(", ")
    )
}

/// Prompt asking for the target object node of one scene.
pub fn build_target_prompt(scene: &SceneRecord, library: &MotionLibrary, images: &[String]) -> PromptMessages {
    let system = [TARGET_BACKGROUND, TARGET_TASK, TARGET_THOUGHTS, TARGET_FORMAT, TARGET_EXAMPLE].join("\n\n");
    let mut user = format!(
        "{}\n\n{}\n\nScene {} subtitles:\n{}",
        allowed_actions(library),
        attribute_schema(),
        scene.scene_id,
        scene.text
    );
    if !images.is_empty() {
        user.push_str("\n\nKey frames:");
        for image in images {
            write!(user, "\n- {image}").unwrap();
        }
    }
    let mut message = Message::new(Role::User, user);
    message.images = images.to_vec();
    PromptMessages {
        messages: vec![Message::new(Role::System, system), message],
    }
}

/// Prompt asking for the action plan of one scene, with optional feedback from the last round.
pub fn build_action_prompt(
    env: &EnvironmentState,
    target: &TargetState,
    feedback: Option<&str>,
    library: &MotionLibrary,
) -> PromptMessages {
    let system = [ACTION_BACKGROUND, ACTION_TASK, ACTION_THOUGHTS, ACTION_FORMAT, ACTION_EXAMPLE].join("\n\n");
    let target_doc = TargetDocument {
        scenes: vec![target.clone()],
    };
    let mut user = format!(
        "{}\n\n{}\n\nEnvironment object node:\n{}\nTarget object node:\n{}",
        allowed_actions(library),
        attribute_schema(),
        to_canonical_json(env),
        to_canonical_json(&target_doc),
    );
    if let Some(text) = feedback {
        write!(user, "\n{ERROR_HEADER}\n{text}\nReturn a corrected plan for the whole scene.").unwrap();
    }
    PromptMessages {
        messages: vec![Message::new(Role::System, system), Message::new(Role::User, user)],
    }
}

/// One line per mismatch, in a fixed wording.
pub fn render_feedback(feedback: &Feedback) -> String {
    match feedback {
        Feedback::Diagnosis(d) => render_diagnosis(d),
        Feedback::Goal(report) => report
            .unmet
            .iter()
            .map(|m| format!("Target not reached: {}.", m.describe()))
            .collect::<Vec<_>>()
            .join("\n"),
        Feedback::Response { detail } => format!("Response rejected: {detail}."),
    }
}

pub fn render_diagnosis(d: &Diagnosis) -> String {
    let head = format!("Action {} '{}'", d.step_index, d.step_text);
    match &d.kind {
        DiagnosisKind::Infeasible => d
            .mismatches
            .iter()
            .map(|m| format!("{head} infeasible: {}.", m.describe()))
            .collect::<Vec<_>>()
            .join("\n"),
        DiagnosisKind::UnknownObject { name } => format!("{head} invalid: unknown object '{name}'."),
        DiagnosisKind::UnknownMotion { name } => format!("{head} invalid: unknown motion '{name}'."),
        DiagnosisKind::BindingError { detail } => format!("{head} invalid: {detail}."),
    }
}
