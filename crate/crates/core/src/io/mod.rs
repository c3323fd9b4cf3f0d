//! Text formats: plan lines, planner responses, SubRip subtitles, JSON documents and DOT.

mod documents;
mod plan_line;
mod response;
mod srt;

pub use documents::{
    export_dot, parse_environment, parse_graph, parse_targets, serialize_environment, serialize_graph,
    serialize_targets, to_canonical_json, DocumentError,
};
pub use plan_line::{parse_plan_file, parse_plan_line, NumberedStep, PlanFileError, PlanLineError, PlanStep};
pub use response::{parse_planner_response, PlannerResponse, ResponseError, ResponseKind, TargetEstimate};
pub use srt::{parse_srt, SrtError, SubtitleCue};
