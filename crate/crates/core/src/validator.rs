//! Feasibility checking of functional units against the environment, effect
//! application, whole-plan validation, and scene goal checks.
//!
//! Matching is exact on every attribute a condition names; anything a
//! condition does not name is a wildcard. Besides the template conditions,
//! every effect that moves an object to `In(x)`/`On(x)` is checked
//! structurally: `x` must exist, `In` needs a container or machine, and
//! the move must not create a containment cycle.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foon::{Category, EnvError, EnvironmentState, Location, ObjectState, TargetState, TaskGraph};
use crate::io::PlanStep;
use crate::motion::{AttrKey, AttrValue, Change, Condition, FunctionalUnit, InstantiateError, MotionLibrary, Subject, Test};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equals,
    NotEquals,
    OneOf,
    Includes,
    Excludes,
    Outside,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equals => "=",
            Relation::NotEquals => "≠",
            Relation::OneOf => "∈",
            Relation::Includes => "⊇",
            Relation::Excludes => "∌",
            Relation::Outside => "outside",
        }
    }
}

/// One attribute that did not hold.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mismatch {
    pub subject: String,
    pub attribute: String,
    pub relation: Relation,
    pub required: String,
    pub actual: String,
}

impl Mismatch {
    /// `required Onion.status ⊇ chopped, but actual = raw`
    pub fn describe(&self) -> String {
        format!(
            "required {}.{} {} {}, but actual = {}",
            self.subject,
            self.attribute,
            self.relation.symbol(),
            self.required,
            self.actual
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagnosisKind {
    Infeasible,
    UnknownObject { name: String },
    UnknownMotion { name: String },
    BindingError { detail: String },
}

/// Why a plan step was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    /// 0-based position in the plan.
    pub step_index: usize,
    pub step_text: String,
    pub kind: DiagnosisKind,
    pub mismatches: Vec<Mismatch>,
}

impl Diagnosis {
    pub fn names(&self, subject: &str, attribute: &str) -> bool {
        self.mismatches
            .iter()
            .any(|m| m.subject == subject && m.attribute == attribute)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GoalReport {
    pub satisfied: bool,
    pub unmet: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckFailure {
    #[error("infeasible: {} mismatch(es)", .0.len())]
    Infeasible(Vec<Mismatch>),
    #[error("unknown object {0:?}")]
    UnknownObject(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("effect would break an environment invariant: {0}")]
    InvariantViolation(#[from] EnvError),
    #[error("effect names unknown object {0:?}")]
    UnknownObject(String),
}

/// Checks every input condition of `unit` against `env`, reporting all mismatches.
pub fn check_action(env: &EnvironmentState, unit: &FunctionalUnit) -> Result<(), CheckFailure> {
    if let Some(name) = missing_object(env, unit) {
        return Err(CheckFailure::UnknownObject(name.to_string()));
    }
    let mut mismatches = Vec::new();
    for cond in &unit.inputs {
        for_each_target(env, &cond.subject, |target| {
            if !holds(target, cond.key, &cond.test) {
                push_unique(&mut mismatches, condition_mismatch(target, cond));
            }
        });
    }
    destination_checks(env, unit, |m| push_unique(&mut mismatches, m));
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(CheckFailure::Infeasible(mismatches))
    }
}

/// Allocation-light feasibility test with early exit.
pub fn is_applicable(env: &EnvironmentState, unit: &FunctionalUnit) -> bool {
    missing_object(env, unit).is_none() && conditions_hold(env, unit)
}

/// [`is_applicable`] for units whose bound objects are known to exist.
pub(crate) fn conditions_hold(env: &EnvironmentState, unit: &FunctionalUnit) -> bool {
    for cond in &unit.inputs {
        let mut ok = true;
        for_each_target(env, &cond.subject, |target| ok &= holds(target, cond.key, &cond.test));
        if !ok {
            return false;
        }
    }
    let mut ok = true;
    destination_checks(env, unit, |_| ok = false);
    ok
}

/// Applies every output effect atomically and returns the new state.
pub fn apply_action(env: &EnvironmentState, unit: &FunctionalUnit) -> Result<EnvironmentState, ApplyError> {
    let mut next = env.clone();
    for effect in &unit.outputs {
        let movers: Vec<String> = match &effect.subject {
            Subject::Hand(hand) => {
                match &effect.change {
                    Change::Set(AttrValue::Holding(held)) => next.set_holding(*hand, held.clone()),
                    other => {
                        return Err(ApplyError::InvariantViolation(EnvError::HandInconsistency {
                            hand: *hand,
                            object: format!("{other:?}"),
                        }))
                    }
                }
                continue;
            }
            Subject::Object(name) => vec![name.clone()],
            Subject::ContentsOf(name) => env
                .object(name)
                .ok_or_else(|| ApplyError::UnknownObject(name.clone()))?
                .contents
                .clone(),
        };
        for name in movers {
            if !next.contains(&name) {
                return Err(ApplyError::UnknownObject(name));
            }
            match &effect.change {
                Change::Set(AttrValue::Place(loc)) => next.relocate(&name, loc.clone()),
                Change::Add(token) => {
                    next.object_mut(&name).expect("checked").status.insert(token.clone());
                }
                Change::Remove(token) => {
                    next.object_mut(&name).expect("checked").status.remove(token);
                }
                Change::Set(other) => {
                    return Err(ApplyError::InvariantViolation(EnvError::ContentsInconsistency {
                        container: name,
                        detail: format!("cannot set {} to {other}", effect.key),
                    }))
                }
            }
        }
    }
    next.audit()?;
    Ok(next)
}

/// A plan prefix that passed validation, with the state before and after every step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedPlan {
    pub steps: Vec<PlanStep>,
    pub units: Vec<FunctionalUnit>,
    /// `trace[0]` is the entry state; `trace[i + 1]` follows step `i`.
    pub trace: Vec<EnvironmentState>,
}

impl ValidatedPlan {
    fn start(env: &EnvironmentState) -> Self {
        ValidatedPlan {
            steps: Vec::new(),
            units: Vec::new(),
            trace: vec![env.clone()],
        }
    }

    pub fn final_env(&self) -> &EnvironmentState {
        self.trace.last().expect("trace holds the entry state")
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Appends every validated unit to `graph`.
    pub fn extend_graph(&self, graph: &mut TaskGraph) {
        for (i, unit) in self.units.iter().enumerate() {
            graph.push_unit(unit.clone(), &self.trace[i], &self.trace[i + 1]);
        }
    }

    /// This plan alone as a graph fragment.
    pub fn fragment(&self) -> TaskGraph {
        let mut graph = TaskGraph::new();
        self.extend_graph(&mut graph);
        graph
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanFailure {
    pub diagnosis: Diagnosis,
    /// State in which the failing step was checked.
    pub env: EnvironmentState,
    pub prefix: ValidatedPlan,
}

/// Instantiates, checks and applies each step in order, stopping at the first failure.
pub fn validate_plan(
    env: &EnvironmentState,
    steps: &[PlanStep],
    library: &MotionLibrary,
) -> Result<ValidatedPlan, Box<PlanFailure>> {
    let mut done = ValidatedPlan::start(env);
    for (index, step) in steps.iter().enumerate() {
        let current = done.final_env().clone();
        let fail = |kind: DiagnosisKind, mismatches: Vec<Mismatch>, prefix: ValidatedPlan| {
            Box::new(PlanFailure {
                diagnosis: Diagnosis {
                    step_index: index,
                    step_text: step.to_string(),
                    kind,
                    mismatches,
                },
                env: current.clone(),
                prefix,
            })
        };
        let unit = match library.instantiate(step) {
            Ok(unit) => unit,
            Err(InstantiateError::UnknownMotion(name)) => {
                return Err(fail(DiagnosisKind::UnknownMotion { name }, Vec::new(), done))
            }
            Err(e) => {
                return Err(fail(DiagnosisKind::BindingError { detail: e.to_string() }, Vec::new(), done))
            }
        };
        match check_action(&current, &unit) {
            Ok(()) => {}
            Err(CheckFailure::Infeasible(mismatches)) => {
                return Err(fail(DiagnosisKind::Infeasible, mismatches, done))
            }
            Err(CheckFailure::UnknownObject(name)) => {
                return Err(fail(DiagnosisKind::UnknownObject { name }, Vec::new(), done))
            }
        }
        let next = match apply_action(&current, &unit) {
            Ok(next) => next,
            Err(e) => {
                return Err(fail(DiagnosisKind::BindingError { detail: e.to_string() }, Vec::new(), done))
            }
        };
        done.steps.push(step.clone());
        done.units.push(unit);
        done.trace.push(next);
    }
    Ok(done)
}

/// Compares `env` against every target node. Status uses subset semantics,
/// contents compare as sets, other attributes by equality.
pub fn check_goal(env: &EnvironmentState, target: &TargetState) -> GoalReport {
    let mut unmet = Vec::new();
    for node in &target.targets {
        let Some(object) = env.object(&node.name) else {
            unmet.push(Mismatch {
                subject: node.name.clone(),
                attribute: "object".into(),
                relation: Relation::Equals,
                required: "present".into(),
                actual: "absent".into(),
            });
            continue;
        };
        let mut miss = |attribute: &str, relation: Relation, required: String, actual: String| {
            unmet.push(Mismatch {
                subject: node.name.clone(),
                attribute: attribute.into(),
                relation,
                required,
                actual,
            })
        };
        if let Some(category) = node.category {
            if category != object.category {
                miss("category", Relation::Equals, category.to_string(), object.category.to_string());
            }
        }
        if let Some(place) = &node.place {
            if *place != object.place {
                miss("place", Relation::Equals, place.to_string(), object.place.to_string());
            }
        }
        if let Some(status) = &node.status {
            if !status.iter().all(|t| object.status.contains(t)) {
                miss("status", Relation::Includes, join(status.iter()), join(object.status.iter()));
            }
        }
        if let Some(contents) = &node.contents {
            if !same_set(contents, &object.contents) {
                miss("contents", Relation::Equals, join_sorted(contents), join_sorted(&object.contents));
            }
        }
    }
    GoalReport {
        satisfied: unmet.is_empty(),
        unmet,
    }
}

/// Boolean form of [`check_goal`].
pub fn goal_satisfied(env: &EnvironmentState, target: &TargetState) -> bool {
    target.targets.iter().all(|node| {
        let Some(object) = env.object(&node.name) else { return false };
        node.category.is_none_or(|c| c == object.category)
            && node.place.as_ref().is_none_or(|p| *p == object.place)
            && node
                .status
                .as_ref()
                .is_none_or(|s| s.iter().all(|t| object.status.contains(t)))
            && node.contents.as_ref().is_none_or(|c| same_set(c, &object.contents))
    })
}

#[derive(Clone, Copy)]
enum Target<'a> {
    Object(&'a ObjectState),
    Hand(Option<&'a str>, &'a str),
}

fn missing_object<'a>(env: &EnvironmentState, unit: &'a FunctionalUnit) -> Option<&'a str> {
    unit.bound_objects().into_iter().find(|name| !env.contains(name))
}

fn for_each_target<'a>(env: &'a EnvironmentState, subject: &Subject, mut f: impl FnMut(Target<'a>)) {
    match subject {
        Subject::Hand(hand) => f(Target::Hand(env.holding(*hand), hand.subject_name())),
        Subject::Object(name) => {
            if let Some(o) = env.object(name) {
                f(Target::Object(o))
            }
        }
        Subject::ContentsOf(name) => {
            if let Some(container) = env.object(name) {
                for member in &container.contents {
                    if let Some(o) = env.object(member) {
                        f(Target::Object(o))
                    }
                }
            }
        }
    }
}

fn value_of(target: &Target<'_>, key: AttrKey) -> Option<AttrValue> {
    match (target, key) {
        (Target::Hand(held, _), AttrKey::Holding) => Some(AttrValue::Holding(held.map(str::to_string))),
        (Target::Object(o), AttrKey::Category) => Some(AttrValue::Category(o.category)),
        (Target::Object(o), AttrKey::Place) => Some(AttrValue::Place(o.place.clone())),
        _ => None,
    }
}

fn equals(target: &Target<'_>, key: AttrKey, value: &AttrValue) -> bool {
    match (target, key, value) {
        (Target::Hand(held, _), AttrKey::Holding, AttrValue::Holding(want)) => *held == want.as_deref(),
        (Target::Object(o), AttrKey::Category, AttrValue::Category(c)) => o.category == *c,
        (Target::Object(o), AttrKey::Place, AttrValue::Place(p)) => o.place == *p,
        _ => false,
    }
}

fn members<'a>(target: &Target<'a>, key: AttrKey) -> Option<Box<dyn Iterator<Item = &'a String> + 'a>> {
    match (target, key) {
        (Target::Object(o), AttrKey::Status) => Some(Box::new(o.status.iter())),
        (Target::Object(o), AttrKey::Contents) => Some(Box::new(o.contents.iter())),
        _ => None,
    }
}

fn has_member(target: &Target<'_>, key: AttrKey, token: &str) -> Option<bool> {
    match (target, key) {
        (Target::Object(o), AttrKey::Status) => Some(o.status.contains(token)),
        (Target::Object(o), AttrKey::Contents) => Some(o.contents.iter().any(|c| c == token)),
        _ => None,
    }
}

fn holds(target: Target<'_>, key: AttrKey, test: &Test) -> bool {
    match test {
        Test::Eq(v) => equals(&target, key, v),
        Test::Ne(v) => value_of(&target, key).is_some() && !equals(&target, key, v),
        Test::OneOf(vs) => vs.iter().any(|v| equals(&target, key, v)),
        Test::Has(t) => has_member(&target, key, t) == Some(true),
        Test::Lacks(t) => has_member(&target, key, t) == Some(false),
        Test::NonEmpty => members(&target, key).is_some_and(|mut it| it.next().is_some()),
    }
}

fn condition_mismatch(target: Target<'_>, cond: &Condition) -> Mismatch {
    let subject = match &target {
        Target::Object(o) => o.name.clone(),
        Target::Hand(_, name) => name.to_string(),
    };
    let actual = match value_of(&target, cond.key) {
        Some(v) => v.to_string(),
        None => members(&target, cond.key).map(join).unwrap_or_else(|| "none".into()),
    };
    let (relation, required) = match &cond.test {
        Test::Eq(v) => (Relation::Equals, v.to_string()),
        Test::Ne(v) => (Relation::NotEquals, v.to_string()),
        Test::OneOf(vs) => (Relation::OneOf, braced(vs.iter())),
        Test::Has(t) => (Relation::Includes, t.clone()),
        Test::Lacks(t) => (Relation::Excludes, t.clone()),
        Test::NonEmpty => (Relation::NotEquals, "none".into()),
    };
    Mismatch {
        subject,
        attribute: cond.key.to_string(),
        relation,
        required,
        actual,
    }
}

fn destination_checks(env: &EnvironmentState, unit: &FunctionalUnit, mut report: impl FnMut(Mismatch)) {
    for effect in &unit.outputs {
        let Change::Set(AttrValue::Place(dest)) = &effect.change else { continue };
        let Some(referent) = dest.referent() else { continue };
        let Some(receiver) = env.object(referent) else { continue };
        let movers: Vec<&str> = match &effect.subject {
            Subject::Object(name) => vec![name.as_str()],
            Subject::ContentsOf(name) => env
                .object(name)
                .map(|c| c.contents.iter().map(String::as_str).collect())
                .unwrap_or_default(),
            Subject::Hand(_) => continue,
        };
        if movers.is_empty() {
            continue;
        }
        if matches!(dest, Location::In(_)) && !receiver.category.holds_contents() {
            report(Mismatch {
                subject: receiver.name.clone(),
                attribute: "category".into(),
                relation: Relation::OneOf,
                required: braced([Category::Container, Category::Machine].iter()),
                actual: receiver.category.to_string(),
            });
        }
        for mover in movers {
            if env.chain_reaches(dest, mover) {
                report(Mismatch {
                    subject: receiver.name.clone(),
                    attribute: "place".into(),
                    relation: Relation::Outside,
                    required: mover.to_string(),
                    actual: receiver.place.to_string(),
                });
            }
        }
    }
}

fn push_unique(list: &mut Vec<Mismatch>, m: Mismatch) {
    if !list.contains(&m) {
        list.push(m);
    }
}

fn join<'a, T: fmt::Display + 'a>(items: impl Iterator<Item = &'a T>) -> String {
    let parts: Vec<String> = items.map(|t| t.to_string()).collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(", ")
    }
}

fn join_sorted(items: &[String]) -> String {
    let mut sorted: Vec<&String> = items.iter().collect();
    sorted.sort();
    sorted.dedup();
    join(sorted.into_iter())
}

fn braced<'a, T: fmt::Display + 'a>(items: impl Iterator<Item = &'a T>) -> String {
    let parts: Vec<String> = items.map(|t| t.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn same_set(a: &[String], b: &[String]) -> bool {
    a.iter().all(|x| b.contains(x)) && b.iter().all(|x| a.contains(x))
}
