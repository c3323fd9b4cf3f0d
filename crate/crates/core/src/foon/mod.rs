//! FOON vocabulary: hands, locations, object and environment state, targets, and the task graph.

mod graph;
mod location;
mod state;
mod target;

pub use graph::{replay, Edge, Node, TaskGraph};
pub use location::{Category, CategoryParseError, Hand, Location, LocationParseError};
pub use state::{EnvDocument, EnvError, EnvironmentState, HandState, HandsDocument, HeldDocument, ObjectState};
pub use target::{TargetDocument, TargetObjectNode, TargetState};
