//! Planner response documents.
//!
//! Planners wrap JSON in prose and markdown fences. Fence lines are dropped,
//! then the first balanced `{...}` or `[...]` that parses as JSON is taken and
//! checked against the expected schema:
//!
//! * target estimate: `{"targets": [{name, category?, status?, place?, contents?}]}`
//!   or `{"unnecessary": true}`
//! * action plan: `{"plan": ["Pick | Knife | Right hand | Right storage", ...]}`

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::plan_line::{parse_plan_line, PlanStep};
use crate::foon::{Category, Location, TargetObjectNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    TargetEstimate,
    ActionPlan,
}

impl fmt::Display for ResponseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResponseKind::TargetEstimate => "target estimate",
            ResponseKind::ActionPlan => "action plan",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetEstimate {
    Targets(Vec<TargetObjectNode>),
    Unnecessary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerResponse {
    TargetEstimate(TargetEstimate),
    ActionPlan(Vec<PlanStep>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResponseError {
    #[error("no JSON value found in planner response")]
    NoJsonFound,
    #[error("schema error at {path}: {detail}")]
    SchemaError { path: String, detail: String },
    #[error("expected {expected}, found {found}")]
    VariantMismatch { expected: ResponseKind, found: ResponseKind },
}

fn schema(path: impl Into<String>, detail: impl Into<String>) -> ResponseError {
    ResponseError::SchemaError {
        path: path.into(),
        detail: detail.into(),
    }
}

/// Extracts and validates the first JSON value in `text`.
pub fn parse_planner_response(text: &str, expected: ResponseKind) -> Result<PlannerResponse, ResponseError> {
    let value = first_json_value(&strip_fences(text)).ok_or(ResponseError::NoJsonFound)?;
    let Value::Object(map) = value else {
        return Err(schema("$", "expected a JSON object"));
    };
    let found = if map.contains_key("plan") {
        ResponseKind::ActionPlan
    } else if map.contains_key("targets") || map.contains_key("unnecessary") {
        ResponseKind::TargetEstimate
    } else {
        return Err(schema("$", format!("expected a {expected} object")));
    };
    if found != expected {
        return Err(ResponseError::VariantMismatch { expected, found });
    }
    match found {
        ResponseKind::ActionPlan => parse_plan(&map).map(PlannerResponse::ActionPlan),
        ResponseKind::TargetEstimate => parse_targets(&map).map(PlannerResponse::TargetEstimate),
    }
}

fn strip_fences(text: &str) -> String {
    text.lines()
        .filter(|line| !line.trim_start().starts_with("```"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn first_json_value(text: &str) -> Option<Value> {
    let bytes = text.as_bytes();
    for (start, &b) in bytes.iter().enumerate() {
        if b != b'{' && b != b'[' {
            continue;
        }
        if let Some(end) = balanced_end(&bytes[start..]) {
            if let Ok(value) = serde_json::from_str::<Value>(&text[start..start + end]) {
                return Some(value);
            }
        }
    }
    None
}

/// Length of the bracket-balanced prefix of `bytes`, honouring JSON strings.
fn balanced_end(bytes: &[u8]) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate() {
        if in_string {
            match (escaped, b) {
                (true, _) => escaped = false,
                (false, b'\\') => escaped = true,
                (false, b'"') => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' | b'[' => depth += 1,
            b'}' | b']' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_plan(map: &Map<String, Value>) -> Result<Vec<PlanStep>, ResponseError> {
    reject_unknown(map, &["plan"], "")?;
    let Some(Value::Array(items)) = map.get("plan") else {
        return Err(schema("plan", "expected an array of plan lines"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let path = format!("plan[{i}]");
            let Value::String(line) = item else {
                return Err(schema(path, "expected a string"));
            };
            parse_plan_line(line).map_err(|e| schema(path, e.to_string()))
        })
        .collect()
}

fn parse_targets(map: &Map<String, Value>) -> Result<TargetEstimate, ResponseError> {
    reject_unknown(map, &["targets", "unnecessary"], "")?;
    match map.get("unnecessary") {
        None | Some(Value::Bool(false)) => {}
        Some(Value::Bool(true)) => return Ok(TargetEstimate::Unnecessary),
        Some(_) => return Err(schema("unnecessary", "expected a boolean")),
    }
    let Some(Value::Array(items)) = map.get("targets") else {
        return Err(schema("targets", "expected an array of target nodes"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| parse_target_node(item, &format!("targets[{i}]")))
        .collect::<Result<_, _>>()
        .map(TargetEstimate::Targets)
}

fn parse_target_node(value: &Value, path: &str) -> Result<TargetObjectNode, ResponseError> {
    let Value::Object(map) = value else {
        return Err(schema(path, "expected an object"));
    };
    reject_unknown(map, &["name", "category", "status", "place", "contents"], path)?;
    let field = |key: &str| format!("{path}.{key}");
    let name = match map.get("name") {
        Some(Value::String(s)) if !s.trim().is_empty() => s.trim().to_string(),
        _ => return Err(schema(field("name"), "expected a non-empty string")),
    };
    let mut node = TargetObjectNode::named(name);
    if let Some(v) = map.get("category") {
        let text = string_at(v, &field("category"))?;
        node.category = Some(
            text.parse::<Category>()
                .map_err(|_| schema(field("category"), text.to_string()))?,
        );
    }
    if let Some(v) = map.get("place") {
        let text = string_at(v, &field("place"))?;
        node.place = Some(
            text.parse::<Location>()
                .map_err(|_| schema(field("place"), text.to_string()))?,
        );
    }
    if let Some(v) = map.get("status") {
        node.status = Some(strings_at(v, &field("status"))?);
    }
    if let Some(v) = map.get("contents") {
        node.contents = Some(strings_at(v, &field("contents"))?);
    }
    Ok(node)
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), ResponseError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(key) if path.is_empty() => Err(schema(key.clone(), "unknown field")),
        Some(key) => Err(schema(format!("{path}.{key}"), "unknown field")),
        None => Ok(()),
    }
}

fn string_at<'a>(value: &'a Value, path: &str) -> Result<&'a str, ResponseError> {
    value.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn strings_at(value: &Value, path: &str) -> Result<Vec<String>, ResponseError> {
    let Value::Array(items) = value else {
        return Err(schema(path, "expected an array of strings"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, v)| string_at(v, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_estimate_inside_prose() {
        let text = r#"Sure! Here are the targets: {"targets":[{"name":"Onion","status":["chopped"]}]} Hope it helps."#;
        let parsed = parse_planner_response(text, ResponseKind::TargetEstimate).unwrap();
        assert_eq!(
            parsed,
            PlannerResponse::TargetEstimate(TargetEstimate::Targets(vec![
                TargetObjectNode::named("Onion").status(["chopped"])
            ]))
        );
    }

    #[test]
    fn dish_category_is_a_schema_error() {
        let text = r#"{"targets":[{"name":"Gyudon","category":"Dish"}]}"#;
        let err = parse_planner_response(text, ResponseKind::TargetEstimate).unwrap_err();
        assert_eq!(
            err,
            ResponseError::SchemaError {
                path: "targets[0].category".into(),
                detail: "Dish".into()
            }
        );
    }

    #[test]
    fn single_step_plan() {
        let text = r#"{"plan":["Pick | Knife | Right hand | Right storage"]}"#;
        let parsed = parse_planner_response(text, ResponseKind::ActionPlan).unwrap();
        assert_eq!(
            parsed,
            PlannerResponse::ActionPlan(vec![PlanStep::new("Pick", ["Knife", "Right hand", "Right storage"])])
        );
    }

    #[test]
    fn fenced_response_with_braces_in_strings() {
        let text = "Plan below.\n```json\n{\"plan\": [\"Place | Lid } | Left hand | Workspace\"]}\n```\n";
        let PlannerResponse::ActionPlan(steps) = parse_planner_response(text, ResponseKind::ActionPlan).unwrap() else {
            panic!()
        };
        assert_eq!(steps[0].args[0], "Lid }");
    }

    #[test]
    fn skips_bracketed_prose() {
        let text = "Step [one] of the answer: {\"unnecessary\": true}";
        assert_eq!(
            parse_planner_response(text, ResponseKind::TargetEstimate).unwrap(),
            PlannerResponse::TargetEstimate(TargetEstimate::Unnecessary)
        );
    }

    #[test]
    fn errors_are_typed() {
        assert_eq!(
            parse_planner_response("no json here", ResponseKind::ActionPlan),
            Err(ResponseError::NoJsonFound)
        );
        assert_eq!(
            parse_planner_response(r#"{"plan":[]}"#, ResponseKind::TargetEstimate),
            Err(ResponseError::VariantMismatch {
                expected: ResponseKind::TargetEstimate,
                found: ResponseKind::ActionPlan
            })
        );
        assert!(matches!(
            parse_planner_response(r#"{"plan":["Pick || x"]}"#, ResponseKind::ActionPlan),
            Err(ResponseError::SchemaError { path, .. }) if path == "plan[0]"
        ));
        assert!(matches!(
            parse_planner_response("[1, 2]", ResponseKind::ActionPlan),
            Err(ResponseError::SchemaError { .. })
        ));
    }
}
