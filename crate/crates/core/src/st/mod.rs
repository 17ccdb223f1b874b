//! ST-configuration structures: families of pairs `(S, T)` of started and
//! terminated events with `T ⊆ S`.
//!
//! Events are indexed densely and sets of events are bitsets, so a structure
//! holds at most [`EventSet::CAPACITY`] events.

mod config;
mod convert;
mod relations;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::hda::Label;
use crate::paths::StepKind;

pub use config::{ConfigProperties, ConfigurationStructure};
pub use convert::{from_hda, to_hda, HdaCorrespondence};
pub use relations::{causality, concurrency, conflict};

/// A set of event indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventSet(u64);

impl EventSet {
    pub const CAPACITY: usize = 64;

    pub const fn empty() -> Self {
        EventSet(0)
    }

    pub const fn from_bits(bits: u64) -> Self {
        EventSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(e: usize) -> Self {
        EventSet(1 << e)
    }

    pub fn contains(self, e: usize) -> bool {
        e < Self::CAPACITY && self.0 & (1 << e) != 0
    }

    pub fn with(self, e: usize) -> Self {
        EventSet(self.0 | 1 << e)
    }

    pub fn without(self, e: usize) -> Self {
        EventSet(self.0 & !(1 << e))
    }

    pub fn union(self, other: Self) -> Self {
        EventSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        EventSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        EventSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..Self::CAPACITY).filter(move |&e| self.contains(e))
    }
}

impl FromIterator<usize> for EventSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(EventSet::empty(), EventSet::with)
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub name: String,
    pub label: Label,
}

/// `(S, T)`: the events started and the events terminated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StConfig {
    pub s: EventSet,
    pub t: EventSet,
}

impl StConfig {
    pub const ROOT: StConfig = StConfig { s: EventSet::empty(), t: EventSet::empty() };

    pub fn new(s: EventSet, t: EventSet) -> Self {
        StConfig { s, t }
    }

    /// Events started but not terminated.
    pub fn executing(self) -> EventSet {
        self.s.difference(self.t)
    }

    /// Componentwise inclusion.
    pub fn is_within(self, other: StConfig) -> bool {
        self.s.is_subset(other.s) && self.t.is_subset(other.t)
    }

    pub fn union(self, other: StConfig) -> StConfig {
        StConfig::new(self.s.union(other.s), self.t.union(other.t))
    }

    pub fn intersection(self, other: StConfig) -> StConfig {
        StConfig::new(self.s.intersection(other.s), self.t.intersection(other.t))
    }

    pub fn is_valid(self) -> bool {
        self.t.is_subset(self.s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StError {
    #[error("{0} events exceed the supported maximum of 64")]
    TooManyEvents(usize),
    #[error("event name `{0}` is used twice")]
    DuplicateEvent(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("configuration {0} terminates an event it has not started")]
    TerminatedNotStarted(String),
    #[error("configuration {0} is present but its completion with S = T is not")]
    MissingCompletion(String),
    #[error("configuration {0} is not in the structure")]
    NotInStructure(String),
    #[error("event `{0}` is not started in the configuration")]
    EventNotInConfiguration(String),
    #[error("the relation needs two distinct events")]
    EqualEvents,
    #[error("the event set is empty")]
    EmptyEventSet,
    #[error("the configuration structure is not stable")]
    Unstable,
    #[error("the path does not start at the empty configuration")]
    NotRooted,
    #[error("step {position} of the path is not a step of the structure")]
    InvalidStep { position: usize },
    #[error("the model has a cycle")]
    Cyclic,
    #[error("the model is not cubical")]
    NonCubical,
    #[error("the model violates a structural law: {0}")]
    InvalidHda(String),
    #[error("expected exactly one initial cell, found {0}")]
    InitialCount(usize),
    #[error("cells could not be assigned distinct configurations: {0}")]
    Identification(String),
    #[error("configuration {config} has no {face} face for event `{event}`")]
    MissingFace { config: String, face: char, event: String },
}

/// A labelled ST-configuration structure. Every `(S, T)` present has
/// `(S, S)` present too.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StStructure {
    events: Vec<Event>,
    configs: BTreeSet<StConfig>,
}

/// Outcome of the closure checks of [`StStructure::properties`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PropertyReport {
    pub rooted: bool,
    pub connected: bool,
    pub union_closed: bool,
    pub intersection_closed: bool,
    pub stable: bool,
    pub adjacent_closed: bool,
    pub single_event_closed: bool,
}

/// One move `from -a-> to` that starts or terminates `event`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StStep {
    pub from: StConfig,
    pub to: StConfig,
    pub kind: StepKind,
    pub event: usize,
}

/// How a termination in an ST-trace points back at its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TracePolicy {
    /// Number of steps from the start of the event to its termination.
    #[default]
    BackwardDistance,
    /// Ordinal of the start among earlier starts with the same label.
    StartOccurrence,
}

/// An ST-trace entry `a^n`; `n = 0` marks a start.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceItem {
    pub label: Label,
    pub pointer: usize,
}

impl fmt::Display for TraceItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.label, self.pointer)
    }
}

impl StStructure {
    pub fn new(events: Vec<Event>, configs: impl IntoIterator<Item = StConfig>) -> Result<Self, StError> {
        if events.len() > EventSet::CAPACITY {
            return Err(StError::TooManyEvents(events.len()));
        }
        let mut names = BTreeSet::new();
        for e in &events {
            if !names.insert(e.name.as_str()) {
                return Err(StError::DuplicateEvent(e.name.clone()));
            }
        }
        let st = StStructure { events, configs: configs.into_iter().collect() };
        let all: EventSet = (0..st.events.len()).collect();
        for &c in &st.configs {
            if !c.s.is_subset(all) {
                let stray = c.s.difference(all).iter().next().unwrap_or(0);
                return Err(StError::UnknownEvent(format!("#{stray}")));
            }
            if !c.is_valid() {
                return Err(StError::TerminatedNotStarted(st.format_config(c)));
            }
            if !st.configs.contains(&StConfig::new(c.s, c.s)) {
                return Err(StError::MissingCompletion(st.format_config(c)));
            }
        }
        Ok(st)
    }

    /// Builds a structure from events given as `(name, label)` and
    /// configurations given by event names.
    pub fn from_named<'a>(
        events: &[(&str, &str)],
        configs: impl IntoIterator<Item = (&'a [&'a str], &'a [&'a str])>,
    ) -> Result<Self, StError> {
        let events: Vec<Event> = events.iter().map(|(n, l)| Event { name: (*n).into(), label: (*l).into() }).collect();
        let lookup =
            |name: &str| events.iter().position(|e| e.name == name).ok_or_else(|| StError::UnknownEvent(name.into()));
        let mut out = Vec::new();
        for (s, t) in configs {
            let s = s.iter().map(|n| lookup(n)).collect::<Result<EventSet, _>>()?;
            let t = t.iter().map(|n| lookup(n)).collect::<Result<EventSet, _>>()?;
            out.push(StConfig::new(s, t));
        }
        StStructure::new(events, out)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event_id(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e.name == name)
    }

    pub fn label(&self, e: usize) -> &Label {
        &self.events[e].label
    }

    pub fn configs(&self) -> &BTreeSet<StConfig> {
        &self.configs
    }

    pub fn contains(&self, c: StConfig) -> bool {
        self.configs.contains(&c)
    }

    pub fn all_events(&self) -> EventSet {
        (0..self.events.len()).collect()
    }

    pub fn format_set(&self, set: EventSet) -> String {
        let names: Vec<&str> = set.iter().map(|e| self.events.get(e).map_or("?", |ev| ev.name.as_str())).collect();
        format!("{{{}}}", names.join(","))
    }

    /// `({a1,b1},{a1})`.
    pub fn format_config(&self, c: StConfig) -> String {
        format!("({},{})", self.format_set(c.s), self.format_set(c.t))
    }

    pub fn properties(&self) -> PropertyReport {
        let rooted = self.contains(StConfig::ROOT);
        let connected = self.is_connected();
        let union_closed = self.bounded_closed(StConfig::union);
        let intersection_closed = self.bounded_closed(StConfig::intersection);
        PropertyReport {
            rooted,
            connected,
            union_closed,
            intersection_closed,
            stable: rooted && connected && union_closed && intersection_closed,
            adjacent_closed: self.is_adjacent_closed(),
            single_event_closed: self.is_single_event_closed(),
        }
    }

    fn is_connected(&self) -> bool {
        self.configs.iter().all(|&c| {
            c.s.is_empty()
                || c.s.iter().any(|e| {
                    self.contains(StConfig::new(c.s.without(e), c.t))
                        || self.contains(StConfig::new(c.s, c.t.without(e)))
                })
        })
    }

    fn bounded_closed(&self, op: fn(StConfig, StConfig) -> StConfig) -> bool {
        let configs: Vec<StConfig> = self.configs.iter().copied().collect();
        for (k, &x) in configs.iter().enumerate() {
            for &y in &configs[k + 1..] {
                let join = x.union(y);
                if configs.iter().any(|&z| join.is_within(z)) && !self.contains(op(x, y)) {
                    return false;
                }
            }
        }
        true
    }

    fn is_adjacent_closed(&self) -> bool {
        let n = self.events.len();
        let has = |s: EventSet, t: EventSet| self.contains(StConfig::new(s, t));
        for &StConfig { s, t } in &self.configs {
            for e in 0..n {
                if !s.contains(e) && has(s.with(e), t) {
                    let se = s.with(e);
                    for f in (0..n).filter(|&f| f != e) {
                        // start e then start f
                        if !se.contains(f) && has(se.with(f), t) && !has(s.with(f), t) {
                            return false;
                        }
                        // start e then terminate f
                        if !t.contains(f) && has(se, t.with(f)) && !has(s, t.with(f)) {
                            return false;
                        }
                    }
                }
                if s.contains(e) && !t.contains(e) && has(s, t.with(e)) {
                    let te = t.with(e);
                    for f in (0..n).filter(|&f| f != e) {
                        // terminate e then terminate f
                        if !te.contains(f) && has(s, te.with(f)) && !has(s, t.with(f)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn is_single_event_closed(&self) -> bool {
        self.configs.iter().all(|&c| {
            c.executing().iter().all(|e| {
                self.contains(StConfig::new(c.s, c.t.with(e))) && self.contains(StConfig::new(c.s.without(e), c.t))
            })
        })
    }

    /// Every s-step and t-step leaving `c`, sorted.
    pub fn steps(&self, c: StConfig) -> Result<Vec<StStep>, StError> {
        if !self.contains(c) {
            return Err(StError::NotInStructure(self.format_config(c)));
        }
        let mut out = Vec::new();
        for e in 0..self.events.len() {
            if !c.s.contains(e) {
                let to = StConfig::new(c.s.with(e), c.t);
                if self.contains(to) {
                    out.push(StStep { from: c, to, kind: StepKind::Start, event: e });
                }
            } else if !c.t.contains(e) {
                let to = StConfig::new(c.s, c.t.with(e));
                if self.contains(to) {
                    out.push(StStep { from: c, to, kind: StepKind::Terminate, event: e });
                }
            }
        }
        Ok(out)
    }

    /// Steps arriving in `c`: starts undone by removing from `S`,
    /// terminations undone by removing from `T`.
    pub fn steps_into(&self, c: StConfig) -> Result<Vec<StStep>, StError> {
        if !self.contains(c) {
            return Err(StError::NotInStructure(self.format_config(c)));
        }
        let mut out = Vec::new();
        for e in c.s.iter() {
            if c.t.contains(e) {
                let from = StConfig::new(c.s, c.t.without(e));
                if self.contains(from) {
                    out.push(StStep { from, to: c, kind: StepKind::Terminate, event: e });
                }
            } else {
                let from = StConfig::new(c.s.without(e), c.t);
                if self.contains(from) {
                    out.push(StStep { from, to: c, kind: StepKind::Start, event: e });
                }
            }
        }
        Ok(out)
    }

    /// Checks that `steps` is a path of this structure starting at the empty
    /// configuration.
    pub fn check_rooted_path(&self, steps: &[StStep]) -> Result<(), StError> {
        let mut at = StConfig::ROOT;
        if !self.contains(at) {
            return Err(StError::NotRooted);
        }
        for (k, step) in steps.iter().enumerate() {
            if step.from != at {
                return Err(if k == 0 { StError::NotRooted } else { StError::InvalidStep { position: k } });
            }
            if !self.steps(at)?.contains(step) {
                return Err(StError::InvalidStep { position: k });
            }
            at = step.to;
        }
        Ok(())
    }

    /// The ST-trace of a rooted path: starts print as `a^0`, terminations
    /// point back at their start according to `policy`.
    pub fn trace(&self, steps: &[StStep], policy: TracePolicy) -> Result<Vec<TraceItem>, StError> {
        self.check_rooted_path(steps)?;
        let mut out = Vec::with_capacity(steps.len());
        for (k, step) in steps.iter().enumerate() {
            let label = self.label(step.event).clone();
            let pointer = match step.kind {
                StepKind::Start => 0,
                StepKind::Terminate => {
                    let started = steps[..k]
                        .iter()
                        .rposition(|p| p.kind == StepKind::Start && p.event == step.event)
                        .ok_or(StError::InvalidStep { position: k })?;
                    match policy {
                        TracePolicy::BackwardDistance => k - started,
                        TracePolicy::StartOccurrence => steps[..=started]
                            .iter()
                            .filter(|p| p.kind == StepKind::Start && *self.label(p.event) == label)
                            .count(),
                    }
                }
            };
            out.push(TraceItem { label, pointer });
        }
        Ok(out)
    }

    /// Keeps only the configurations with `S = T`.
    pub fn to_configuration_structure(&self) -> ConfigurationStructure {
        ConfigurationStructure::new_unchecked(
            self.events.clone(),
            self.configs.iter().filter(|c| c.s == c.t).map(|c| c.s).collect(),
        )
    }
}
