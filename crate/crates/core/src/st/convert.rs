//! Translation between acyclic cubical automata and adjacent-closed
//! ST-structures.
//!
//! Going from an automaton, each reachable cell becomes the configuration of
//! the events started and terminated along any rooted path to it. Event
//! identity starts from the cube structure: the `k`-th coordinate of a cell
//! and the matching coordinate of each of its faces are one event. Where two
//! paths reach the same cell with differently named events (the two sides of
//! a hollow square), the events are identified so that both paths agree,
//! trying each label-preserving matching until every cell gets a distinct
//! configuration.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Event, EventSet, StConfig, StError, StStructure};
use crate::hda::{event_labels, is_cubical, validate, Cell, CellId, Face, Hda, HdaError, Label};

/// The structure of an automaton together with the configuration of each
/// reachable cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HdaCorrespondence {
    pub st: StStructure,
    pub config_of: BTreeMap<CellId, StConfig>,
}

impl HdaCorrespondence {
    pub fn cell_of(&self, c: StConfig) -> Option<CellId> {
        self.config_of.iter().find(|(_, &d)| d == c).map(|(&q, _)| q)
    }
}

#[derive(Clone, Debug)]
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&self, mut x: usize) -> usize {
        while self.0[x] != x {
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.0[hi] = lo;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Derived {
    s: BTreeSet<usize>,
    t: BTreeSet<usize>,
    // executing events in coordinate order
    coord: Vec<usize>,
}

struct Context<'a> {
    hda: &'a Hda,
    order: Vec<CellId>,
    root: CellId,
    // provisional event of coordinate k (0-based) of each cell
    provisional: Vec<Vec<usize>>,
    labels: Vec<Label>,
}

enum Attempt {
    Done(Vec<Option<Derived>>),
    Retry(Vec<Vec<(usize, usize)>>),
    Dead(String),
}

const MAX_MATCHINGS: usize = 5040;

impl Context<'_> {
    fn attempt(&self, merge: &UnionFind) -> Attempt {
        let hda = self.hda;
        let mut derived: Vec<Option<Derived>> = alloc::vec![None; hda.len()];
        for &q in &self.order {
            if q == self.root {
                derived[q.index()] = Some(Derived { s: BTreeSet::new(), t: BTreeSet::new(), coord: Vec::new() });
                continue;
            }
            let mut found: Option<Derived> = None;
            let mut candidates = Vec::new();
            for i in 1..=hda.dim(q) {
                let Some(dx) = &derived[hda.source(q, i).index()] else { continue };
                let new = merge.find(self.provisional[q.index()][i - 1]);
                if dx.s.contains(&new) {
                    return Attempt::Dead(format!("cell {} starts an event twice", hda.name(q)));
                }
                let mut d = dx.clone();
                d.s.insert(new);
                d.coord.insert(i - 1, new);
                candidates.push(d);
            }
            for &(face, i, p) in hda.cofaces(q) {
                let Some(dp) = (face == Face::Target).then(|| derived[p.index()].as_ref()).flatten() else { continue };
                let mut d = dp.clone();
                let e = d.coord.remove(i - 1);
                d.t.insert(e);
                candidates.push(d);
            }
            for d in candidates {
                match &found {
                    None => found = Some(d),
                    Some(prev) if *prev == d => {}
                    Some(prev) => return self.clash(q, prev, &d),
                }
            }
            derived[q.index()] = found;
        }
        let mut seen: BTreeMap<(&BTreeSet<usize>, &BTreeSet<usize>), CellId> = BTreeMap::new();
        for &q in &self.order {
            let d = derived[q.index()].as_ref().expect("reachable cells are derived");
            if let Some(other) = seen.insert((&d.s, &d.t), q) {
                return Attempt::Dead(format!(
                    "cells {} and {} get the same configuration",
                    hda.name(other),
                    hda.name(q)
                ));
            }
        }
        Attempt::Done(derived)
    }

    /// Ways of identifying events so that `a` and `b` become equal.
    fn clash(&self, q: CellId, a: &Derived, b: &Derived) -> Attempt {
        let dead = || Attempt::Dead(format!("paths to {} disagree on its events", self.hda.name(q)));
        if a.coord.len() != b.coord.len() {
            return dead();
        }
        let forced: Vec<(usize, usize)> =
            a.coord.iter().zip(&b.coord).filter(|(x, y)| x != y).map(|(&x, &y)| (x, y)).collect();
        let left: Vec<usize> = a.t.difference(&b.t).copied().collect();
        let right: Vec<usize> = b.t.difference(&a.t).copied().collect();
        if left.len() != right.len() {
            return dead();
        }
        let mut groups: BTreeMap<&Label, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for &x in &left {
            groups.entry(&self.labels[x]).or_default().0.push(x);
        }
        for &y in &right {
            groups.entry(&self.labels[y]).or_default().1.push(y);
        }
        let mut options: Vec<Vec<(usize, usize)>> = alloc::vec![forced];
        for (xs, ys) in groups.values() {
            if xs.len() != ys.len() {
                return dead();
            }
            let mut next = Vec::new();
            for perm in permutations(ys.len()) {
                for base in &options {
                    let mut o = base.clone();
                    o.extend(xs.iter().zip(&perm).map(|(&x, &k)| (x, ys[k])));
                    next.push(o);
                    if next.len() > MAX_MATCHINGS {
                        return Attempt::Dead(format!(
                            "too many ways to match the events reaching {}",
                            self.hda.name(q)
                        ));
                    }
                }
            }
            options = next;
        }
        Attempt::Retry(options)
    }

    fn solve(&self, merge: UnionFind) -> Result<(Vec<Option<Derived>>, UnionFind), String> {
        match self.attempt(&merge) {
            Attempt::Done(d) => Ok((d, merge)),
            Attempt::Dead(msg) => Err(msg),
            Attempt::Retry(options) => {
                let mut last = String::from("no consistent identification of events");
                for option in options {
                    if option.iter().any(|&(x, y)| self.labels[x] != self.labels[y]) {
                        continue;
                    }
                    let mut m = merge.clone();
                    for &(x, y) in &option {
                        m.union(x, y);
                    }
                    match self.solve(m) {
                        Ok(done) => return Ok(done),
                        Err(msg) => last = msg,
                    }
                }
                Err(last)
            }
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return alloc::vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn topological_order(hda: &Hda, cells: &BTreeSet<CellId>) -> Vec<CellId> {
    let succ = |q: CellId| -> Vec<CellId> {
        let up = hda.cofaces(q).iter().filter(|(f, _, _)| *f == Face::Source).map(|&(_, _, c)| c);
        up.chain(hda.cell(q).targets.iter().copied()).filter(|c| cells.contains(c)).collect()
    };
    let mut indegree: BTreeMap<CellId, usize> = cells.iter().map(|&q| (q, 0)).collect();
    for &q in cells {
        for s in succ(q) {
            *indegree.get_mut(&s).expect("successor is in the set") += 1;
        }
    }
    let mut ready: Vec<CellId> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&q, _)| q).collect();
    ready.reverse();
    let mut out = Vec::with_capacity(cells.len());
    while let Some(q) = ready.pop() {
        out.push(q);
        for s in succ(q) {
            let d = indegree.get_mut(&s).expect("successor is in the set");
            *d -= 1;
            if *d == 0 {
                ready.push(s);
            }
        }
    }
    out
}

/// The ST-structure of an acyclic cubical automaton with one initial cell,
/// restricted to the cells reachable from it.
pub fn from_hda(hda: &Hda) -> Result<HdaCorrespondence, StError> {
    if let Some(v) = validate(hda).violations.first() {
        return Err(StError::InvalidHda(v.to_string()));
    }
    match is_cubical(hda) {
        Err(HdaError::Cyclic) => return Err(StError::Cyclic),
        Err(e) => return Err(StError::InvalidHda(e.to_string())),
        Ok(false) => return Err(StError::NonCubical),
        Ok(true) => {}
    }
    let initial: BTreeSet<CellId> = hda.initial().iter().copied().collect();
    if initial.len() != 1 {
        return Err(StError::InitialCount(initial.len()));
    }
    let root = *initial.first().expect("one initial cell");
    let reachable = hda.reachable();
    let order = topological_order(hda, &reachable);

    // one token per (cell, coordinate); faces share the coordinates they keep
    let mut offset = Vec::with_capacity(hda.len());
    let mut total = 0;
    for q in hda.cell_ids() {
        offset.push(total);
        total += hda.dim(q);
    }
    let token = |q: CellId, k: usize| offset[q.index()] + k - 1;
    let mut tokens = UnionFind::new(total);
    let mut token_label: Vec<Option<Label>> = alloc::vec![None; total];
    for &q in &reachable {
        let n = hda.dim(q);
        if n == 0 {
            continue;
        }
        let labels = event_labels(hda, q).map_err(|e| StError::InvalidHda(e.to_string()))?;
        for (k, l) in labels.into_iter().enumerate() {
            token_label[token(q, k + 1)] = Some(l);
        }
        for face in Face::BOTH {
            for i in 1..=n {
                let f = hda.face(q, face, i);
                for k in (1..=n).filter(|&k| k != i) {
                    tokens.union(token(q, k), token(f, if k < i { k } else { k - 1 }));
                }
            }
        }
    }
    let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
    let mut labels: Vec<Label> = Vec::new();
    let mut provisional = alloc::vec![Vec::new(); hda.len()];
    for &q in &order {
        for k in 1..=hda.dim(q) {
            let class = tokens.find(token(q, k));
            let label = token_label[token(q, k)].clone().expect("reachable coordinates are labelled");
            let id = *dense.entry(class).or_insert_with(|| {
                labels.push(label.clone());
                labels.len() - 1
            });
            if labels[id] != label {
                return Err(StError::Identification(format!("coordinate {k} of {} changes label", hda.name(q))));
            }
            provisional[q.index()].push(id);
        }
    }

    let ctx = Context { hda, order, root, provisional, labels };
    let (derived, merge) = ctx.solve(UnionFind::new(ctx.labels.len())).map_err(StError::Identification)?;

    // events are numbered by label, then by the order in which they start
    let mut by_index: Vec<usize> = Vec::new();
    for &q in &ctx.order {
        for &e in &derived[q.index()].as_ref().expect("derived").coord {
            if !by_index.contains(&e) {
                by_index.push(e);
            }
        }
    }
    if by_index.len() > EventSet::CAPACITY {
        return Err(StError::TooManyEvents(by_index.len()));
    }
    by_index.sort_by(|&x, &y| ctx.labels[merge.find(x)].cmp(&ctx.labels[merge.find(y)]));
    let index: BTreeMap<usize, usize> = by_index.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let events = name_events(by_index.iter().map(|&e| ctx.labels[merge.find(e)].clone()).collect());
    let to_set = |xs: &BTreeSet<usize>| xs.iter().map(|e| index[e]).collect::<EventSet>();
    let mut config_of = BTreeMap::new();
    for &q in &ctx.order {
        let d = derived[q.index()].as_ref().expect("derived");
        config_of.insert(q, StConfig::new(to_set(&d.s), to_set(&d.t)));
    }
    let st = StStructure::new(events, config_of.values().copied())?;
    Ok(HdaCorrespondence { st, config_of })
}

/// Names events by label and occurrence: `a1`, `a2`, `b1`.
fn name_events(labels: Vec<Label>) -> Vec<Event> {
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    let mut used = BTreeSet::new();
    let mut out = Vec::with_capacity(labels.len());
    for label in &labels {
        let n = counters.entry(label.as_str()).or_insert(0);
        *n += 1;
        let mut name = format!("{label}{n}");
        while used.contains(&name) {
            name.push('\'');
        }
        used.insert(name.clone());
        out.push(Event { name, label: label.clone() });
    }
    out
}

/// The automaton whose cells are the configurations of `st`. The `i`-th
/// coordinate of a cell is its `i`-th executing event in index order; every
/// face must be present.
pub fn to_hda(st: &StStructure) -> Result<Hda, StError> {
    let configs: Vec<StConfig> = st.configs().iter().copied().collect();
    let id: BTreeMap<StConfig, CellId> = configs.iter().enumerate().map(|(k, &c)| (c, CellId::from_index(k))).collect();
    let mut cells = Vec::with_capacity(configs.len());
    let mut labels = BTreeMap::new();
    for (k, &c) in configs.iter().enumerate() {
        let executing: Vec<usize> = c.executing().iter().collect();
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        for &e in &executing {
            let missing = |face: char| StError::MissingFace {
                config: st.format_config(c),
                face,
                event: st.events()[e].name.clone(),
            };
            sources.push(*id.get(&StConfig::new(c.s.without(e), c.t)).ok_or_else(|| missing('s'))?);
            targets.push(*id.get(&StConfig::new(c.s, c.t.with(e))).ok_or_else(|| missing('t'))?);
        }
        if executing.len() == 1 {
            labels.insert(CellId::from_index(k), st.label(executing[0]).clone());
        }
        cells.push(Cell { name: st.format_config(c), dim: executing.len(), sources, targets });
    }
    let initial = id.get(&StConfig::ROOT).copied().into_iter().collect();
    let finals =
        configs.iter().filter(|c| c.s == c.t && st.steps(**c).is_ok_and(|s| s.is_empty())).map(|c| id[c]).collect();
    Ok(Hda::from_parts(cells, labels, initial, finals, BTreeMap::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hda::fixtures::{filled_square, hollow_square};
    use crate::hda::{carve, is_acyclic, make_hypercube, HdaBuilder};
    use crate::paths::StepGraph;
    use crate::st::fixtures::*;

    /// Every automaton step is a structure step between the mapped
    /// configurations with the same kind and label, and vice versa.
    fn assert_steps_match(hda: &Hda, corr: &HdaCorrespondence) {
        let graph = StepGraph::new(hda).unwrap();
        let mut from_hda = BTreeSet::new();
        for (&q, &c) in &corr.config_of {
            for step in graph.steps_from(q) {
                from_hda.insert((c, corr.config_of[&step.to], step.kind, step.label.clone()));
            }
        }
        let mut from_st = BTreeSet::new();
        for &c in corr.st.configs() {
            for s in corr.st.steps(c).unwrap() {
                from_st.insert((s.from, s.to, s.kind, corr.st.label(s.event).clone()));
            }
        }
        assert_eq!(from_hda, from_st);
    }

    fn check(hda: &Hda) -> HdaCorrespondence {
        let corr = from_hda(hda).unwrap();
        let p = corr.st.properties();
        assert!(p.rooted && p.connected && p.adjacent_closed, "{p:?}");
        for (&q, &c) in &corr.config_of {
            assert_eq!(c.executing().len(), hda.dim(q));
        }
        assert_steps_match(hda, &corr);
        corr
    }

    #[test]
    fn squares() {
        let filled = check(&filled_square());
        assert_eq!(filled.st.configs(), filled_square_st().configs());
        let hollow = check(&hollow_square());
        assert_eq!(hollow.st.configs(), hollow_square_st().configs());
        let names: Vec<&str> = hollow.st.events().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["a1", "b1"]);
    }

    #[test]
    fn single_state() {
        let hda = HdaBuilder::new().state("x").initial("x").build().unwrap();
        let corr = check(&hda);
        assert_eq!(corr.st.configs().iter().collect::<Vec<_>>(), [&StConfig::ROOT]);
    }

    #[test]
    fn hollow_square_with_one_label() {
        // both sides labelled `a`: the events must cross over
        let mut b = HdaBuilder::new();
        b.states(&["x", "y", "z", "w"])
            .transition("bottom", "x", "y", "a")
            .transition("right", "y", "z", "a")
            .transition("left", "x", "w", "a")
            .transition("top", "w", "z", "a")
            .initial("x");
        let corr = check(&b.build().unwrap());
        assert_eq!(corr.st.events().len(), 2);
        assert_eq!(corr.st.configs().len(), 8);
    }

    #[test]
    fn cubes_and_carvings() {
        for labels in [&["a", "b", "c"][..], &["a", "a", "b"], &["a", "a", "a"]] {
            let cube = make_hypercube(labels).unwrap();
            let corr = check(&cube);
            assert_eq!(corr.st.configs().len(), 27);
            assert!(corr.st.properties().stable);
            let gone: BTreeSet<CellId> = cube.cell_ids().filter(|&q| cube.dim(q) == 3).collect();
            let carved = carve(&cube, &gone).unwrap();
            assert_eq!(check(&carved).st.configs().len(), 26);
        }
    }

    #[test]
    fn branches_keep_their_events_apart() {
        let hda = HdaBuilder::new()
            .states(&["x", "y", "z"])
            .transition("one", "x", "y", "a")
            .transition("two", "x", "z", "a")
            .initial("x")
            .build()
            .unwrap();
        let corr = check(&hda);
        assert_eq!(corr.st.events().len(), 2);
        assert_eq!(super::super::conflict(&corr.st, corr.st.all_events()), Ok(true));
    }

    #[test]
    fn rejects_bad_inputs() {
        let looped = HdaBuilder::new()
            .states(&["x", "y"])
            .transition("go", "x", "y", "a")
            .transition("back", "y", "x", "b")
            .initial("x")
            .build()
            .unwrap();
        assert!(!is_acyclic(&looped));
        assert_eq!(from_hda(&looped), Err(StError::Cyclic));
        let two = HdaBuilder::new().states(&["x", "y"]).initial("x").initial("y").build().unwrap();
        assert_eq!(from_hda(&two), Err(StError::InitialCount(2)));
    }

    #[test]
    fn round_trip_through_to_hda() {
        for hda in [filled_square(), hollow_square(), make_hypercube(&["a", "b", "c"]).unwrap()] {
            let st = from_hda(&hda).unwrap().st;
            let back = to_hda(&st).unwrap();
            assert!(validate(&back).is_clean());
            assert_eq!(back.len(), st.configs().len());
            assert_eq!(from_hda(&back).unwrap().st.configs().len(), st.configs().len());
        }
    }

    #[test]
    fn to_hda_needs_faces() {
        // ({a}, ∅) without its target face ({a}, {a}) cannot be a cell
        let st = StStructure::from_named(
            &[("e", "a"), ("f", "b")],
            [(&[][..], &[][..]), (&["e", "f"][..], &["f"][..]), (&["e", "f"][..], &["e", "f"][..])],
        )
        .unwrap();
        assert!(matches!(to_hda(&st), Err(StError::MissingFace { .. })));
    }
}
