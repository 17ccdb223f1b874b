//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use geoconc_core::hda::{carve, make_hypercube, upward_closure};
use geoconc_core::st::{ConfigurationStructure, Event};
use geoconc_core::{CellId, EventSet, Hda, StConfig, StStructure};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn events(n: usize, labels: &[&str], rng: &mut impl Rng) -> Vec<Event> {
    (0..n)
        .map(|k| {
            let label = *labels.choose(rng).expect("labels");
            Event { name: format!("{label}{k}"), label: label.into() }
        })
        .collect()
}

/// A cube of up to `max_events` dimensions labelled from `{a, b}` with a
/// random upward-closed set of cells removed, the initial state kept, and
/// what became unreachable dropped.
pub fn carved_cube(rng: &mut impl Rng, max_events: usize) -> Hda {
    let n = rng.gen_range(1..=max_events);
    let labels: Vec<&str> = (0..n).map(|_| *["a", "b"].choose(rng).expect("labels")).collect();
    let cube = make_hypercube(&labels).expect("cube");
    carve_randomly(&cube, rng)
}

pub fn carve_randomly(cube: &Hda, rng: &mut impl Rng) -> Hda {
    let root = cube.initial()[0];
    let others: Vec<CellId> = cube.cell_ids().filter(|&q| q != root).collect();
    let picks = rng.gen_range(0..=3.min(others.len()));
    let seeds: BTreeSet<CellId> = others.choose_multiple(rng, picks).copied().collect();
    let carved = carve(cube, &upward_closure(cube, &seeds)).expect("upward closed removals orphan nothing");
    let reachable = carved.reachable();
    let unreachable: BTreeSet<CellId> = carved.cell_ids().filter(|q| !reachable.contains(q)).collect();
    carve(&carved, &upward_closure(&carved, &unreachable)).expect("unreachable cells are upward closed")
}

fn close(configs: &mut BTreeSet<StConfig>) {
    configs.insert(StConfig::ROOT);
    loop {
        let current: Vec<StConfig> = configs.iter().copied().collect();
        let before = configs.len();
        for c in current {
            configs.insert(StConfig::new(c.s, c.s));
            for e in c.executing().iter() {
                configs.insert(StConfig::new(c.s, c.t.with(e)));
                configs.insert(StConfig::new(c.s.without(e), c.t));
            }
            let has_predecessor = c.s.is_empty()
                || c.s.iter().any(|e| configs.contains(&StConfig::new(c.s.without(e), c.t)))
                || c.t.iter().any(|e| configs.contains(&StConfig::new(c.s, c.t.without(e))));
            if !has_predecessor {
                match c.t.iter().next() {
                    Some(e) => configs.insert(StConfig::new(c.s, c.t.without(e))),
                    None => configs.insert(StConfig::new(c.s.without(c.s.iter().next().expect("nonempty")), c.t)),
                };
            }
        }
        if configs.len() == before {
            return;
        }
    }
}

/// A random rooted, connected, single-event-closed ST-structure.
pub fn random_st(rng: &mut impl Rng, max_events: usize) -> StStructure {
    let n = rng.gen_range(1..=max_events);
    let events = events(n, &["a", "b"], rng);
    let mut configs = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=4) {
        let s: EventSet = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let t: EventSet = s.iter().filter(|_| rng.gen_bool(0.5)).collect();
        configs.insert(StConfig::new(s, t));
    }
    close(&mut configs);
    StStructure::new(events, configs).expect("closed families are structures")
}

/// A random stable configuration structure, built as the configurations
/// of a random partial order with random conflicts.
pub fn random_stable_cfg(rng: &mut impl Rng, max_events: usize) -> ConfigurationStructure {
    let n = rng.gen_range(1..=max_events);
    let events = events(n, &["a", "b", "c"], rng);
    let before: Vec<EventSet> = (0..n).map(|e| (0..e).filter(|_| rng.gen_bool(0.3)).collect()).collect();
    let clash: Vec<(usize, usize)> =
        (0..n).flat_map(|e| (e + 1..n).map(move |f| (e, f))).filter(|_| rng.gen_bool(0.2)).collect();
    let configs = (0u64..1 << n).map(|bits| (0..n).filter(|e| bits >> e & 1 == 1).collect::<EventSet>()).filter(|x| {
        x.iter().all(|e| before[e].is_subset(*x)) && !clash.iter().any(|&(e, f)| x.contains(e) && x.contains(f))
    });
    ConfigurationStructure::new(events, configs).expect("events are known")
}
