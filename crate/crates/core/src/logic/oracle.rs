//! Bounded modal equivalence.
//!
//! Two points agree on every formula of modal depth at most `k` exactly when
//! they fall in the same block after `k` rounds of partition refinement over
//! the disjoint union of both models, where a round splits blocks by the set
//! of `(modality, label, block)` moves available. When the points separate,
//! a formula witnessing the split is read off the refinement history.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{Formula, HdaModel, LabelSel, LogicError, ModalStructure, Modality, StModel};
use crate::hda::{CellId, Hda, Label};
use crate::st::{StConfig, StStructure};

/// A point of some model: a cell of an automaton or a configuration of an
/// ST-structure.
#[derive(Clone, Copy, Debug)]
pub enum ModelPoint<'a> {
    Hda(&'a Hda, CellId),
    St(&'a StStructure, StConfig),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalVerdict {
    /// No formula of modal depth at most the bound separates the points.
    pub equivalent: bool,
    /// A formula true at the first point and false at the second.
    pub distinguishing: Option<Formula>,
    /// The smallest depth at which the points separate, or the number of
    /// refinement rounds run when they do not.
    pub depth: usize,
    /// Refinement reached a fixpoint, so the verdict holds for every depth.
    pub stable: bool,
}

type Moves = [Vec<(Label, usize)>; 4];

struct Union {
    moves: Vec<Moves>,
    atoms: Vec<BTreeSet<String>>,
}

impl Union {
    fn add<M: ModalStructure>(&mut self, model: &M, atoms: &BTreeSet<String>) -> usize {
        let offset = self.moves.len();
        for p in 0..model.point_count() {
            let mut per: Moves = Default::default();
            for m in Modality::ALL {
                per[m as usize] = model.moves(p, m).iter().map(|(l, q)| (l.clone(), q + offset)).collect();
            }
            self.moves.push(per);
            self.atoms.push(atoms.iter().filter(|a| model.holds(p, a)).cloned().collect());
        }
        offset
    }

    fn add_point(&mut self, point: ModelPoint<'_>, atoms: &BTreeSet<String>) -> Result<usize, LogicError> {
        match point {
            ModelPoint::Hda(hda, q) => {
                if !hda.contains(q) {
                    return Err(LogicError::UnknownCell(q));
                }
                Ok(self.add(&HdaModel::new(hda), atoms) + q.index())
            }
            ModelPoint::St(st, c) => {
                let model = StModel::new(st);
                let p = model.point(c).ok_or(LogicError::NotInStructure(c))?;
                Ok(self.add(&model, atoms) + p)
            }
        }
    }
}

/// Decides whether `first` and `second` agree on all formulas of modal
/// depth at most `depth` over the given atoms, producing a distinguishing
/// formula when they do not.
pub fn modal_equiv_bounded(
    first: ModelPoint<'_>,
    second: ModelPoint<'_>,
    depth: usize,
    atoms: &BTreeSet<String>,
) -> Result<ModalVerdict, LogicError> {
    if depth == 0 {
        return Err(LogicError::ZeroDepth);
    }
    let mut union = Union { moves: Vec::new(), atoms: Vec::new() };
    let p = union.add_point(first, atoms)?;
    let q = union.add_point(second, atoms)?;

    let mut levels: Vec<Vec<usize>> = alloc::vec![classify(union.atoms.iter().cloned())];
    let mut stable = false;
    while levels.len() <= depth && levels.last().expect("level")[p] == levels.last().expect("level")[q] {
        let prev = levels.last().expect("level");
        let next = classify((0..union.moves.len()).map(|x| {
            let sig: BTreeSet<(Modality, &Label, usize)> = Modality::ALL
                .iter()
                .flat_map(|&m| union.moves[x][m as usize].iter().map(move |(l, y)| (m, l, *y)))
                .map(|(m, l, y)| (m, l, prev[y]))
                .collect();
            (prev[x], sig)
        }));
        let count = |v: &[usize]| v.iter().copied().max().map_or(0, |m| m + 1);
        let done = count(&next) == count(prev);
        levels.push(next);
        if done {
            stable = true;
            break;
        }
    }
    let last = levels.last().expect("level");
    if last[p] == last[q] {
        return Ok(ModalVerdict { equivalent: true, distinguishing: None, depth: levels.len() - 1, stable });
    }
    let mut synth = Synth { union: &union, levels: &levels, memo: BTreeMap::new() };
    let formula = synth.distinguish(p, q);
    Ok(ModalVerdict { equivalent: false, distinguishing: Some(formula), depth: levels.len() - 1, stable })
}

/// Numbers the distinct keys in order of first appearance.
fn classify<K: Ord>(keys: impl Iterator<Item = K>) -> Vec<usize> {
    let mut ids = BTreeMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

struct Synth<'a> {
    union: &'a Union,
    levels: &'a [Vec<usize>],
    memo: BTreeMap<(usize, usize), Formula>,
}

fn conjunction(parts: Vec<Formula>) -> Formula {
    let mut unique: Vec<Formula> = Vec::new();
    for f in parts {
        if !unique.contains(&f) {
            unique.push(f);
        }
    }
    unique.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
}

impl Synth<'_> {
    /// A formula true at `p` and false at `q`; they must be separated at
    /// the last level.
    fn distinguish(&mut self, p: usize, q: usize) -> Formula {
        if let Some(f) = self.memo.get(&(p, q)) {
            return f.clone();
        }
        let level = self.levels.iter().position(|l| l[p] != l[q]).expect("points are separated");
        let f = if level == 0 {
            let (ap, aq) = (&self.union.atoms[p], &self.union.atoms[q]);
            match ap.difference(aq).next() {
                Some(a) => Formula::atom(a.clone()),
                None => Formula::atom(aq.difference(ap).next().expect("atoms differ").clone()).not(),
            }
        } else {
            self.by_moves(p, q, level - 1)
        };
        self.memo.insert((p, q), f.clone());
        f
    }

    fn by_moves(&mut self, p: usize, q: usize, below: usize) -> Formula {
        let (union, levels) = (self.union, self.levels);
        let class = &levels[below];
        let mut best: Option<Formula> = None;
        let mut keep = |f: Formula| {
            if best.as_ref().is_none_or(|b| f.size() < b.size()) {
                best = Some(f);
            }
        };
        let mut keys: BTreeSet<(Modality, &Label)> = BTreeSet::new();
        for x in [p, q] {
            for m in Modality::ALL {
                keys.extend(union.moves[x][m as usize].iter().map(|(l, _)| (m, l)));
            }
        }
        let targets = |x: usize, m: Modality, l: &Label| -> Vec<usize> {
            union.moves[x][m as usize].iter().filter(|(k, _)| k == l).map(|&(_, y)| y).collect()
        };
        for (m, l) in keys {
            let (ps, qs) = (targets(p, m, l), targets(q, m, l));
            for &p2 in &ps {
                if qs.iter().all(|&q2| class[q2] != class[p2]) {
                    let parts = qs.iter().map(|&q2| self.distinguish(p2, q2)).collect();
                    keep(Formula::Diamond(m, LabelSel::Named(l.clone()), Box::new(conjunction(parts))));
                }
            }
            for &q2 in &qs {
                if ps.iter().all(|&p2| class[p2] != class[q2]) {
                    let parts = ps.iter().map(|&p2| self.distinguish(q2, p2)).collect();
                    keep(Formula::Diamond(m, LabelSel::Named(l.clone()), Box::new(conjunction(parts))).not());
                }
            }
        }
        best.expect("separated points differ in their moves")
    }
}
