//! Validation and replanning of FOON cooking task graphs.
//!
//! Plans arrive as pipe-delimited steps (`Pick | Knife | Right hand | Right storage`),
//! are bound to functional-unit templates from a [`motion::MotionLibrary`], checked
//! against a tracked [`foon::EnvironmentState`], and chained into a [`foon::TaskGraph`].
//! Infeasible steps produce attribute-level diagnoses that the [`orchestrator`]
//! feeds back to a planner until every scene reaches its target state.

pub mod foon;
pub mod io;
pub mod motion;
pub mod orchestrator;
pub mod segmenter;
pub mod validator;
