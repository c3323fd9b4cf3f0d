use super::template::*;
use super::{MotionLibrary, CUT_SURFACES_VALUE};

pub const DEFAULT_CUT_SURFACES: &[&str] = &["Cutting board"];

fn slot(name: &str, kind: SlotKind) -> VariableSlot {
    VariableSlot::new(name, kind)
}

fn when(subject: &str, key: AttrKey, op: ConditionOp, value: &[&str]) -> ConditionRecord {
    ConditionRecord {
        subject: subject.to_string(),
        key,
        op,
        value: match value {
            [] => None,
            [one] if op != ConditionOp::OneOf => Some(ValueSpec::One(one.to_string())),
            many => Some(ValueSpec::Many(many.iter().map(|s| s.to_string()).collect())),
        },
    }
}

fn then(subject: &str, key: AttrKey, op: EffectOp, value: &str) -> EffectRecord {
    EffectRecord {
        subject: subject.to_string(),
        key,
        op,
        value: value.to_string(),
    }
}

use AttrKey::*;
use ConditionOp::{Eq, Ne, NonEmpty, OneOf, OnSurface};
use EffectOp::{Add, Set};
use SlotKind::{Hand, Location, Object};

/// The six cooking motions.
pub fn builtin_templates() -> Vec<FunctionalUnitTemplate> {
    vec![
        FunctionalUnitTemplate {
            motion: "Pick".into(),
            slots: vec![slot("?obj", Object), slot("?hand", Hand), slot("?place", Location)],
            inputs: vec![
                when("?hand", Holding, Eq, &["none"]),
                when("?obj", Place, Eq, &["?place"]),
                when("?obj", Category, Ne, &["machine"]),
            ],
            outputs: vec![
                then("?hand", Holding, Set, "?obj"),
                then("?obj", Place, Set, "?hand"),
            ],
        },
        FunctionalUnitTemplate {
            motion: "Place".into(),
            slots: vec![slot("?obj", Object), slot("?hand", Hand), slot("?dest", Location)],
            inputs: vec![when("?hand", Holding, Eq, &["?obj"])],
            outputs: vec![
                then("?obj", Place, Set, "?dest"),
                then("?hand", Holding, Set, "none"),
            ],
        },
        FunctionalUnitTemplate {
            motion: "Pour".into(),
            slots: vec![slot("?src", Object), slot("?hand", Hand), slot("?dest", Object)],
            inputs: vec![
                when("?hand", Holding, Eq, &["?src"]),
                when("?src", Category, Eq, &["container"]),
                when("?src", Contents, NonEmpty, &[]),
                when("?dest", Category, OneOf, &["container", "machine"]),
                when("?dest", Place, Ne, &["?hand"]),
            ],
            outputs: vec![
                then("?src.contents", Place, Set, "In(?dest)"),
                then("?src", Status, Add, "empty"),
            ],
        },
        FunctionalUnitTemplate {
            motion: "Cut".into(),
            slots: vec![slot("?obj", Object), slot("?tool", Object), slot("?hand", Hand)],
            inputs: vec![
                when("?hand", Holding, Eq, &["?tool"]),
                when("?tool", Category, Eq, &["tool"]),
                when("?obj", Place, OnSurface, &[CUT_SURFACES_VALUE]),
            ],
            outputs: vec![then("?obj", Status, Add, "chopped")],
        },
        FunctionalUnitTemplate {
            motion: "Mix".into(),
            slots: vec![slot("?container", Object), slot("?tool", Object), slot("?hand", Hand)],
            inputs: vec![
                when("?hand", Holding, Eq, &["?tool"]),
                when("?tool", Category, Eq, &["tool"]),
                when("?container", Contents, NonEmpty, &[]),
            ],
            outputs: vec![then("?container.contents", Status, Add, "mixed")],
        },
        FunctionalUnitTemplate {
            motion: "Cook".into(),
            slots: vec![slot("?container", Object), slot("?appliance", Object)],
            inputs: vec![
                when("?container", Place, OneOf, &["On(?appliance)", "In(?appliance)"]),
                when("?appliance", Category, Eq, &["machine"]),
            ],
            outputs: vec![then("?container.contents", Status, Add, "cooked")],
        },
    ]
}

pub fn builtin_library() -> MotionLibrary {
    MotionLibrary::new(
        builtin_templates(),
        DEFAULT_CUT_SURFACES.iter().map(|s| s.to_string()).collect(),
    )
    .expect("builtin templates are valid")
}
