use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{Event, EventSet, StConfig, StError, StStructure};

/// A plain configuration structure: a family of event sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigurationStructure {
    events: Vec<Event>,
    configs: BTreeSet<EventSet>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfigProperties {
    pub rooted: bool,
    pub connected: bool,
    pub union_closed: bool,
    pub intersection_closed: bool,
    pub stable: bool,
}

impl ConfigurationStructure {
    pub fn new(events: Vec<Event>, configs: impl IntoIterator<Item = EventSet>) -> Result<Self, StError> {
        if events.len() > EventSet::CAPACITY {
            return Err(StError::TooManyEvents(events.len()));
        }
        let all: EventSet = (0..events.len()).collect();
        let configs: BTreeSet<EventSet> = configs.into_iter().collect();
        if let Some(bad) = configs.iter().find(|c| !c.is_subset(all)) {
            let stray = bad.difference(all).iter().next().unwrap_or(0);
            return Err(StError::UnknownEvent(alloc::format!("#{stray}")));
        }
        Ok(ConfigurationStructure { events, configs })
    }

    pub(super) fn new_unchecked(events: Vec<Event>, configs: BTreeSet<EventSet>) -> Self {
        ConfigurationStructure { events, configs }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn configs(&self) -> &BTreeSet<EventSet> {
        &self.configs
    }

    pub fn properties(&self) -> ConfigProperties {
        let rooted = self.configs.contains(&EventSet::empty());
        let connected =
            self.configs.iter().all(|&x| x.is_empty() || x.iter().any(|e| self.configs.contains(&x.without(e))));
        let union_closed = self.bounded_closed(EventSet::union);
        let intersection_closed = self.bounded_closed(EventSet::intersection);
        ConfigProperties {
            rooted,
            connected,
            union_closed,
            intersection_closed,
            stable: rooted && connected && union_closed && intersection_closed,
        }
    }

    fn bounded_closed(&self, op: fn(EventSet, EventSet) -> EventSet) -> bool {
        let configs: Vec<EventSet> = self.configs.iter().copied().collect();
        for (k, &x) in configs.iter().enumerate() {
            for &y in &configs[k + 1..] {
                let join = x.union(y);
                if configs.iter().any(|&z| join.is_subset(z)) && !self.configs.contains(&op(x, y)) {
                    return false;
                }
            }
        }
        true
    }

    /// The stable ST-structure with these configurations as its `S = T`
    /// members: each step `X -> X ∪ {e}` gains the intermediate
    /// `(X ∪ {e}, X)`, then the family is closed under bounded unions and
    /// intersections.
    pub fn to_st_structure(&self) -> Result<StStructure, StError> {
        if !self.properties().stable {
            return Err(StError::Unstable);
        }
        let mut configs: BTreeSet<StConfig> = self.configs.iter().map(|&x| StConfig::new(x, x)).collect();
        for &x in &self.configs {
            for e in (0..self.events.len()).filter(|&e| !x.contains(e)) {
                if self.configs.contains(&x.with(e)) {
                    configs.insert(StConfig::new(x.with(e), x));
                }
            }
        }
        loop {
            let current: Vec<StConfig> = configs.iter().copied().collect();
            let mut added = false;
            for (k, &x) in current.iter().enumerate() {
                for &y in &current[k + 1..] {
                    let join = x.union(y);
                    if current.iter().any(|&z| join.is_within(z)) {
                        added |= configs.insert(join);
                        added |= configs.insert(x.intersection(y));
                    }
                }
            }
            if !added {
                break;
            }
        }
        StStructure::new(self.events.clone(), configs)
    }
}
