//! A second, deliberately naive implementation of the six cooking motions,
//! written against plain strings. Tests compare the engine with it.

use std::collections::{BTreeMap, BTreeSet};

use foonplan::foon::{Category, EnvironmentState, Hand, HandState, Location, ObjectState};
use foonplan::io::PlanStep;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub const REGIONS: [&str; 3] = ["Right storage", "Left storage", "Workspace"];
pub const HANDS: [&str; 2] = ["Left hand", "Right hand"];
pub const CUT_SURFACE: &str = "Cutting board";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Object,
    Hand,
    Location,
}

pub fn signature(motion: &str) -> &'static [Kind] {
    use Kind::*;
    match motion {
        "Pick" | "Place" => &[Object, Hand, Location],
        "Pour" => &[Object, Hand, Object],
        "Cut" | "Mix" => &[Object, Object, Hand],
        "Cook" => &[Object, Object],
        _ => &[],
    }
}

pub const MOTIONS: [&str; 6] = ["Pick", "Place", "Pour", "Cut", "Mix", "Cook"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obj {
    pub category: &'static str,
    pub place: String,
    pub status: BTreeSet<String>,
    pub contents: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub objects: BTreeMap<String, Obj>,
    /// Left, right.
    pub hands: [Option<String>; 2],
}

/// (subject, attribute) pairs that block a step.
pub type Blockers = BTreeSet<(String, String)>;

fn referent(place: &str) -> Option<&str> {
    place
        .strip_prefix("In(")
        .or_else(|| place.strip_prefix("On("))
        .and_then(|rest| rest.strip_suffix(')'))
}

fn hand_index(token: &str) -> usize {
    if token == "Left hand" {
        0
    } else {
        1
    }
}

fn hand_subject(token: &str) -> String {
    if token == "Left hand" { "LeftHand" } else { "RightHand" }.to_string()
}

fn pair(subject: &str, attribute: &str) -> (String, String) {
    (subject.to_string(), attribute.to_string())
}

impl World {
    fn obj(&self, name: &str) -> &Obj {
        &self.objects[name]
    }

    fn holds(&self, hand: &str, object: &str) -> bool {
        self.hands[hand_index(hand)].as_deref() == Some(object)
    }

    fn reaches(&self, place: &str, target: &str) -> bool {
        let mut current = referent(place);
        let mut guard = 0;
        while let Some(name) = current {
            if name == target {
                return true;
            }
            guard += 1;
            if guard > self.objects.len() + 1 {
                return true;
            }
            current = self.objects.get(name).and_then(|o| referent(&o.place));
        }
        false
    }

    fn destination(&self, dest: &str, movers: &[String], out: &mut Blockers) {
        let Some(r) = referent(dest) else { return };
        if movers.is_empty() {
            return;
        }
        if dest.starts_with("In(") && !matches!(self.obj(r).category, "container" | "machine") {
            out.insert(pair(r, "category"));
        }
        if movers.iter().any(|m| self.reaches(dest, m)) {
            out.insert(pair(r, "place"));
        }
    }

    /// `Err` names an object the step mentions that does not exist.
    pub fn blockers(&self, motion: &str, args: &[String]) -> Result<Blockers, String> {
        for (kind, arg) in signature(motion).iter().zip(args) {
            let name = match kind {
                Kind::Object => Some(arg.as_str()),
                Kind::Location => referent(arg),
                Kind::Hand => None,
            };
            if let Some(name) = name {
                if !self.objects.contains_key(name) {
                    return Err(name.to_string());
                }
            }
        }
        let mut out = Blockers::new();
        let a = |i: usize| args[i].as_str();
        match motion {
            "Pick" => {
                let (o, h, p) = (a(0), a(1), a(2));
                if self.hands[hand_index(h)].is_some() {
                    out.insert((hand_subject(h), "holding".into()));
                }
                if self.obj(o).place != p {
                    out.insert(pair(o, "place"));
                }
                if self.obj(o).category == "machine" {
                    out.insert(pair(o, "category"));
                }
            }
            "Place" => {
                let (o, h, d) = (a(0), a(1), a(2));
                if !self.holds(h, o) {
                    out.insert((hand_subject(h), "holding".into()));
                }
                self.destination(d, &[o.to_string()], &mut out);
            }
            "Pour" => {
                let (s, h, d) = (a(0), a(1), a(2));
                if !self.holds(h, s) {
                    out.insert((hand_subject(h), "holding".into()));
                }
                if self.obj(s).category != "container" {
                    out.insert(pair(s, "category"));
                }
                if self.obj(s).contents.is_empty() {
                    out.insert(pair(s, "contents"));
                }
                if !matches!(self.obj(d).category, "container" | "machine") {
                    out.insert(pair(d, "category"));
                }
                if self.obj(d).place == h {
                    out.insert(pair(d, "place"));
                }
                let movers = self.obj(s).contents.clone();
                self.destination(&format!("In({d})"), &movers, &mut out);
            }
            "Cut" => {
                let (o, t, h) = (a(0), a(1), a(2));
                if !self.holds(h, t) {
                    out.insert((hand_subject(h), "holding".into()));
                }
                if self.obj(t).category != "tool" {
                    out.insert(pair(t, "category"));
                }
                let place = &self.obj(o).place;
                if *place != format!("On({CUT_SURFACE})") && *place != format!("In({CUT_SURFACE})") {
                    out.insert(pair(o, "place"));
                }
            }
            "Mix" => {
                let (c, t, h) = (a(0), a(1), a(2));
                if !self.holds(h, t) {
                    out.insert((hand_subject(h), "holding".into()));
                }
                if self.obj(t).category != "tool" {
                    out.insert(pair(t, "category"));
                }
                if self.obj(c).contents.is_empty() {
                    out.insert(pair(c, "contents"));
                }
            }
            "Cook" => {
                let (c, m) = (a(0), a(1));
                let place = &self.obj(c).place;
                if *place != format!("On({m})") && *place != format!("In({m})") {
                    out.insert(pair(c, "place"));
                }
                if self.obj(m).category != "machine" {
                    out.insert(pair(m, "category"));
                }
            }
            other => return Err(other.to_string()),
        }
        Ok(out)
    }

    fn move_to(&mut self, name: &str, place: String) {
        let old = self.objects[name].place.clone();
        if old == place {
            return;
        }
        if let Some(container) = old.strip_prefix("In(").and_then(|r| r.strip_suffix(')')) {
            self.objects.get_mut(container).unwrap().contents.retain(|c| c != name);
        }
        if let Some(container) = place.strip_prefix("In(").and_then(|r| r.strip_suffix(')')) {
            self.objects.get_mut(container).unwrap().contents.push(name.to_string());
        }
        self.objects.get_mut(name).unwrap().place = place;
    }

    fn mark_contents(&mut self, container: &str, token: &str) {
        for c in self.obj(container).contents.clone() {
            self.objects.get_mut(&c).unwrap().status.insert(token.to_string());
        }
    }

    /// Applies a step whose blockers are empty.
    pub fn apply(&mut self, motion: &str, args: &[String]) {
        let a = |i: usize| args[i].clone();
        match motion {
            "Pick" => {
                self.hands[hand_index(&a(1))] = Some(a(0));
                self.move_to(&a(0), a(1));
            }
            "Place" => {
                self.hands[hand_index(&a(1))] = None;
                self.move_to(&a(0), a(2));
            }
            "Pour" => {
                for c in self.obj(&a(0)).contents.clone() {
                    self.move_to(&c, format!("In({})", a(2)));
                }
                self.objects.get_mut(&a(0)).unwrap().status.insert("empty".into());
            }
            "Cut" => {
                self.objects.get_mut(&a(0)).unwrap().status.insert("chopped".into());
            }
            "Mix" => self.mark_contents(&a(0), "mixed"),
            "Cook" => self.mark_contents(&a(0), "cooked"),
            _ => unreachable!(),
        }
    }

    pub fn locations(&self) -> Vec<String> {
        let mut out: Vec<String> = REGIONS.iter().map(|r| r.to_string()).collect();
        for name in self.objects.keys() {
            out.push(format!("In({name})"));
            out.push(format!("On({name})"));
        }
        out
    }

    pub fn domain(&self, kind: Kind) -> Vec<String> {
        match kind {
            Kind::Object => self.objects.keys().cloned().collect(),
            Kind::Hand => HANDS.iter().map(|h| h.to_string()).collect(),
            Kind::Location => self.locations(),
        }
    }

    pub fn all_steps(&self) -> Vec<PlanStep> {
        let mut out = Vec::new();
        for motion in MOTIONS {
            let mut partial: Vec<Vec<String>> = vec![vec![]];
            for kind in signature(motion) {
                let domain = self.domain(*kind);
                partial = partial
                    .into_iter()
                    .flat_map(|p| {
                        domain.iter().map(move |d| {
                            let mut n = p.clone();
                            n.push(d.clone());
                            n
                        })
                    })
                    .collect();
            }
            out.extend(partial.into_iter().map(|args| PlanStep::new(motion, args)));
        }
        out
    }

    pub fn feasible_steps(&self) -> Vec<PlanStep> {
        self.all_steps()
            .into_iter()
            .filter(|s| self.blockers(&s.motion, &s.args).is_ok_and(|b| b.is_empty()))
            .collect()
    }

    pub fn to_env(&self) -> EnvironmentState {
        let objects = self
            .objects
            .iter()
            .map(|(name, o)| ObjectState {
                name: name.clone(),
                category: o.category.parse::<Category>().unwrap(),
                place: o.place.parse::<Location>().unwrap(),
                status: o.status.clone(),
                contents: o.contents.clone(),
            })
            .collect();
        EnvironmentState::new(
            objects,
            [
                HandState {
                    hand: Hand::Left,
                    holding: self.hands[0].clone(),
                },
                HandState {
                    hand: Hand::Right,
                    holding: self.hands[1].clone(),
                },
            ],
        )
        .expect("simulated worlds are consistent")
    }
}

const POOL: [(&str, &str); 11] = [
    ("Knife", "tool"),
    ("Cutting board", "tool"),
    ("Spoon", "tool"),
    ("Bowl", "container"),
    ("Pan", "container"),
    ("Cup", "container"),
    ("Onion", "ingredient"),
    ("Egg", "ingredient"),
    ("Carrot", "ingredient"),
    ("Stove", "machine"),
    ("Oven", "machine"),
];

/// A random consistent world of 2 to `max_objects` objects.
pub fn random_world(rng: &mut impl Rng, max_objects: usize) -> World {
    let mut pool = POOL.to_vec();
    pool.shuffle(rng);
    let count = rng.random_range(2..=max_objects.max(2));
    let mut world = World {
        objects: BTreeMap::new(),
        hands: [None, None],
    };
    let mut order: Vec<&str> = Vec::new();
    for &(name, category) in pool.iter().take(count) {
        let holders: Vec<&str> = order
            .iter()
            .copied()
            .filter(|n| matches!(world.objects[*n].category, "container" | "machine"))
            .collect();
        let roll = rng.random_range(0..10);
        let place = if roll < 2 && !holders.is_empty() {
            format!("In({})", holders.choose(rng).unwrap())
        } else if roll < 4 && !order.is_empty() {
            format!("On({})", order.choose(rng).unwrap())
        } else {
            REGIONS.choose(rng).unwrap().to_string()
        };
        let mut status = BTreeSet::new();
        if category == "ingredient" && rng.random_bool(0.5) {
            status.insert("raw".to_string());
        }
        world.objects.insert(
            name.to_string(),
            Obj {
                category,
                place: String::new(),
                status,
                contents: Vec::new(),
            },
        );
        world.objects.get_mut(name).unwrap().place = "Workspace".into();
        world.move_to(name, place);
        order.push(name);
    }
    for hand in HANDS {
        if !rng.random_bool(0.25) {
            continue;
        }
        let free: Vec<String> = world
            .objects
            .iter()
            .filter(|(n, o)| {
                o.category != "machine"
                    && REGIONS.contains(&o.place.as_str())
                    && !world.objects.values().any(|x| referent(&x.place) == Some(n.as_str()))
            })
            .map(|(n, _)| n.clone())
            .collect();
        if let Some(name) = free.choose(rng) {
            world.hands[hand_index(hand)] = Some(name.clone());
            world.move_to(name, hand.to_string());
        }
    }
    world
}

/// Forward-simulates up to `max_len` random feasible steps.
pub fn random_plan(world: &World, rng: &mut impl Rng, max_len: usize) -> (Vec<PlanStep>, Vec<World>) {
    let len = rng.random_range(1..=max_len);
    let mut states = vec![world.clone()];
    let mut steps = Vec::new();
    for _ in 0..len {
        let current = states.last().unwrap();
        let options = current.feasible_steps();
        let Some(step) = options.choose(rng) else { break };
        let mut next = current.clone();
        next.apply(&step.motion, &step.args);
        steps.push(step.clone());
        states.push(next);
    }
    (steps, states)
}

pub struct Corruption {
    pub steps: Vec<PlanStep>,
    pub index: usize,
    pub arg: usize,
    pub expected: Blockers,
}

/// Replaces one hand, place or object token of one step so that the step
/// fails in the state the original plan reaches before it.
pub fn corrupt(steps: &[PlanStep], states: &[World], rng: &mut impl Rng) -> Option<Corruption> {
    for _ in 0..64 {
        let index = rng.random_range(0..steps.len());
        let step = &steps[index];
        let kinds = signature(&step.motion);
        let arg = rng.random_range(0..kinds.len());
        let world = &states[index];
        let mut pool = world.domain(kinds[arg]);
        pool.retain(|t| *t != step.args[arg]);
        pool.shuffle(rng);
        for token in pool {
            let mut args = step.args.clone();
            args[arg] = token;
            let Ok(expected) = world.blockers(&step.motion, &args) else { continue };
            if expected.is_empty() {
                continue;
            }
            let mut changed = steps.to_vec();
            changed[index] = PlanStep::new(step.motion.clone(), args);
            return Some(Corruption {
                steps: changed,
                index,
                arg,
                expected,
            });
        }
    }
    None
}
