//! Environment, target and graph documents, plus DOT export.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::foon::{EnvironmentState, Node, TargetDocument, TaskGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {column}: {detail}")]
pub struct DocumentError {
    pub line: usize,
    pub column: usize,
    pub detail: String,
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError {
            line: e.line(),
            column: e.column(),
            detail: e.to_string(),
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    Ok(serde_json::from_str(text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("document types always serialize");
    text.push('\n');
    text
}

pub fn parse_environment(text: &str) -> Result<EnvironmentState, DocumentError> {
    parse(text)
}

pub fn serialize_environment(env: &EnvironmentState) -> String {
    to_canonical_json(env)
}

pub fn parse_targets(text: &str) -> Result<TargetDocument, DocumentError> {
    parse(text)
}

pub fn serialize_targets(doc: &TargetDocument) -> String {
    to_canonical_json(doc)
}

pub fn parse_graph(text: &str) -> Result<TaskGraph, DocumentError> {
    parse(text)
}

pub fn serialize_graph(graph: &TaskGraph) -> String {
    to_canonical_json(graph)
}

/// Graphviz rendering: state nodes as ellipses, motion nodes as boxes.
pub fn export_dot(graph: &TaskGraph) -> String {
    let mut out = String::from("digraph foon {\n");
    for node in &graph.nodes {
        let (shape, label) = match node {
            Node::Motion { motion, .. } => ("box", motion.clone()),
            Node::Hand { state, .. } => (
                "ellipse",
                format!("{}\nholding: {}", state.hand.token(), state.holding.as_deref().unwrap_or("none")),
            ),
            Node::Object { state, .. } => {
                let mut label = format!("{}\n{}", state.name, state.place);
                if !state.status.is_empty() {
                    let status: Vec<&str> = state.status.iter().map(String::as_str).collect();
                    write!(label, "\n{}", status.join(", ")).unwrap();
                }
                if !state.contents.is_empty() {
                    write!(label, "\ncontains: {}", state.contents.join(", ")).unwrap();
                }
                ("ellipse", label)
            }
        };
        writeln!(out, "  n{} [shape={shape}, label=\"{}\"];", node.id(), escape(&label)).unwrap();
    }
    for edge in &graph.edges {
        writeln!(out, "  n{} -> n{};", edge.from, edge.to).unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for c in label.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foon::{Category, Hand, HandState, Location, ObjectState};
    use crate::io::parse_plan_line;
    use crate::motion::builtin_library;
    use crate::validator::validate_plan;

    fn pick_graph() -> TaskGraph {
        let env = EnvironmentState::new(
            vec![ObjectState::new("Knife", Category::Tool, Location::RightStorage)],
            [HandState::empty(Hand::Left), HandState::empty(Hand::Right)],
        )
        .unwrap();
        let steps = [parse_plan_line("Pick | Knife | Right hand | Right storage").unwrap()];
        validate_plan(&env, &steps, &builtin_library()).unwrap().fragment()
    }

    #[test]
    fn empty_graph_round_trips() {
        let text = serialize_graph(&TaskGraph::new());
        assert_eq!(parse_graph(&text).unwrap(), TaskGraph::new());
        assert_eq!(export_dot(&TaskGraph::new()), "digraph foon {\n}\n");
    }

    #[test]
    fn pick_graph_round_trips_and_exports() {
        let graph = pick_graph();
        assert_eq!(graph.nodes.len(), 5);
        let text = serialize_graph(&graph);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back, graph);
        assert_eq!(serialize_graph(&back), text);
        let dot = export_dot(&graph);
        assert_eq!(dot.matches("shape=").count(), 5);
        assert_eq!(dot.matches("->").count(), 4);
        assert_eq!(dot.matches("shape=box").count(), 1);
        assert_eq!(dot, export_dot(&graph.clone()));
    }

    #[test]
    fn environment_errors_carry_position() {
        let err = parse_environment("{\n  \"objects\": [\n    {\"name\": 3}\n  ]\n}").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(parse_environment(r#"{"objects":[],"hands":{"left":{"holding":"Ghost"},"right":{"holding":null}}}"#).is_err());
    }
}
