//! Labelled cubical sets and higher dimensional automata.
//!
//! A cell of dimension `n` carries `n` source and `n` target faces, indexed
//! from 1 like the face maps `s_i`/`t_i`. Cells reference each other through
//! [`CellId`]s that index into the owning [`Hda`].

mod construct;
mod shape;
mod validate;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use construct::{carve, make_hypercube, upward_closure};
pub use shape::{cell_label, coordinate_edges, event_labels, faces, faces_by_level, is_acyclic, is_cubical};
pub use validate::{validate, ValidationReport, Violation};

/// Action label drawn from the alphabet of a model.
pub type Label = String;

/// Identifier of a cell inside one [`Hda`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub u32);

impl CellId {
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn from_index(index: usize) -> Self {
        CellId(index as u32)
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Which family of face maps: sources `s_i` or targets `t_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    Source,
    Target,
}

impl Face {
    pub const BOTH: [Face; 2] = [Face::Source, Face::Target];

    pub fn symbol(self) -> char {
        match self {
            Face::Source => 's',
            Face::Target => 't',
        }
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One cell with its face maps. `sources[i - 1]` is `s_i(cell)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub dim: usize,
    pub sources: Vec<CellId>,
    pub targets: Vec<CellId>,
}

impl Cell {
    pub fn faces(&self, face: Face) -> &[CellId] {
        match face {
            Face::Source => &self.sources,
            Face::Target => &self.targets,
        }
    }
}

/// Multiset of action labels; the label of a cell of dimension `n` has `n`
/// elements, one per concurrently executing event.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelMultiset(BTreeMap<Label, usize>);

impl LabelMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<Label>) {
        *self.0.entry(label.into()).or_insert(0) += 1;
    }

    pub fn with(mut self, label: impl Into<Label>) -> Self {
        self.insert(label);
        self
    }

    pub fn len(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, label: &str) -> usize {
        self.0.get(label).copied().unwrap_or(0)
    }

    /// If `self = smaller ⊎ {a}`, returns `a`.
    pub fn extension_of(&self, smaller: &LabelMultiset) -> Option<&Label> {
        if self.len() != smaller.len() + 1 {
            return None;
        }
        let mut extra = None;
        for (label, &count) in &self.0 {
            let other = smaller.count(label);
            if count == other + 1 && extra.is_none() {
                extra = Some(label);
            } else if count != other {
                return None;
            }
        }
        extra
    }

    /// Labels in sorted order, repeated by multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = &Label> + '_ {
        self.0.iter().flat_map(|(label, &count)| core::iter::repeat_n(label, count))
    }
}

impl<S: Into<Label>> FromIterator<S> for LabelMultiset {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut m = LabelMultiset::new();
        for label in iter {
            m.insert(label);
        }
        m
    }
}

impl fmt::Display for LabelMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, label) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(label)?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HdaError {
    #[error("unknown cell {0}")]
    UnknownCell(CellId),
    #[error("the automaton has a cycle in its step graph")]
    Cyclic,
    #[error("the automaton is not cubical")]
    NonCubical,
    #[error("a hypercube needs at least one label")]
    EmptyLabels,
    #[error("removing {removed} would orphan the {face} face of kept cell {kept}")]
    WouldOrphan { kept: CellId, removed: CellId, face: Face },
    #[error("cell {0} has malformed face maps")]
    Malformed(CellId),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("cell `{0}` is declared twice")]
    DuplicateCell(String),
    #[error("reference to undeclared cell `{0}`")]
    UnknownCell(String),
    #[error("transition `{0}` has no label")]
    MissingLabel(String),
    #[error("cell `{0}` is not a transition and cannot carry a label")]
    LabelOnNonTransition(String),
}

/// A higher dimensional automaton `(Q, s̄, t̄, l, I, F)` with a valuation of
/// atomic propositions on its cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hda {
    cells: Vec<Cell>,
    labels: BTreeMap<CellId, Label>,
    initial: Vec<CellId>,
    finals: Vec<CellId>,
    valuation: BTreeMap<CellId, BTreeSet<String>>,
    // (face, index, higher cell) for every higher cell having this one as a face
    cofaces: Vec<Vec<(Face, usize, CellId)>>,
    by_name: BTreeMap<String, CellId>,
}

impl Hda {
    /// Assembles an automaton without checking any structural law; run
    /// [`validate`] to find out what is wrong with it.
    pub fn from_parts(
        cells: Vec<Cell>,
        labels: BTreeMap<CellId, Label>,
        initial: Vec<CellId>,
        finals: Vec<CellId>,
        valuation: BTreeMap<CellId, BTreeSet<String>>,
    ) -> Self {
        let mut cofaces = alloc::vec![Vec::new(); cells.len()];
        for (k, cell) in cells.iter().enumerate() {
            for face in Face::BOTH {
                for (i, f) in cell.faces(face).iter().enumerate() {
                    if let Some(list) = cofaces.get_mut(f.index()) {
                        list.push((face, i + 1, CellId::from_index(k)));
                    }
                }
            }
        }
        let by_name = cells.iter().enumerate().map(|(k, c)| (c.name.clone(), CellId::from_index(k))).collect();
        Hda { cells, labels, initial, finals, valuation, cofaces, by_name }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cells.len()).map(CellId::from_index)
    }

    pub fn contains(&self, q: CellId) -> bool {
        q.index() < self.cells.len()
    }

    pub fn check(&self, q: CellId) -> Result<(), HdaError> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(HdaError::UnknownCell(q))
        }
    }

    pub fn cell(&self, q: CellId) -> &Cell {
        &self.cells[q.index()]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn dim(&self, q: CellId) -> usize {
        self.cells[q.index()].dim
    }

    pub fn name(&self, q: CellId) -> &str {
        &self.cells[q.index()].name
    }

    pub fn cell_by_name(&self, name: &str) -> Option<CellId> {
        self.by_name.get(name).copied()
    }

    /// `s_i(q)` or `t_i(q)`, with `i` counted from 1.
    pub fn face(&self, q: CellId, face: Face, i: usize) -> CellId {
        self.cells[q.index()].faces(face)[i - 1]
    }

    pub fn try_face(&self, q: CellId, face: Face, i: usize) -> Option<CellId> {
        let cell = self.cells.get(q.index())?;
        let f = *cell.faces(face).get(i.checked_sub(1)?)?;
        self.contains(f).then_some(f)
    }

    pub fn source(&self, q: CellId, i: usize) -> CellId {
        self.face(q, Face::Source, i)
    }

    pub fn target(&self, q: CellId, i: usize) -> CellId {
        self.face(q, Face::Target, i)
    }

    /// Every `(face, i, q')` with `face_i(q') = q`.
    pub fn cofaces(&self, q: CellId) -> &[(Face, usize, CellId)] {
        &self.cofaces[q.index()]
    }

    pub fn label(&self, q: CellId) -> Option<&Label> {
        self.labels.get(&q)
    }

    pub fn labels(&self) -> &BTreeMap<CellId, Label> {
        &self.labels
    }

    pub fn alphabet(&self) -> BTreeSet<Label> {
        self.labels.values().cloned().collect()
    }

    pub fn initial(&self) -> &[CellId] {
        &self.initial
    }

    pub fn finals(&self) -> &[CellId] {
        &self.finals
    }

    pub fn propositions(&self, q: CellId) -> impl Iterator<Item = &String> + '_ {
        self.valuation.get(&q).into_iter().flatten()
    }

    pub fn holds(&self, q: CellId, prop: &str) -> bool {
        self.valuation.get(&q).is_some_and(|ps| ps.contains(prop))
    }

    pub fn valuation(&self) -> &BTreeMap<CellId, BTreeSet<String>> {
        &self.valuation
    }

    /// Cells reachable from some initial cell along start and terminate steps.
    pub fn reachable(&self) -> BTreeSet<CellId> {
        let mut seen: BTreeSet<CellId> = self.initial.iter().copied().filter(|&q| self.contains(q)).collect();
        let mut stack: Vec<CellId> = seen.iter().copied().collect();
        while let Some(q) = stack.pop() {
            let up = self.cofaces(q).iter().filter(|(f, _, _)| *f == Face::Source).map(|&(_, _, c)| c);
            let down = self.cell(q).targets.iter().copied().filter(|&c| self.contains(c));
            for next in up.chain(down).collect::<Vec<_>>() {
                if seen.insert(next) {
                    stack.push(next);
                }
            }
        }
        seen
    }
}

/// Builds an [`Hda`] from named cells.
#[derive(Clone, Debug, Default)]
pub struct HdaBuilder {
    cells: Vec<(String, usize, Vec<String>, Vec<String>)>,
    labels: Vec<(String, Label)>,
    initial: Vec<String>,
    finals: Vec<String>,
    valuation: Vec<(String, String)>,
}

impl HdaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: &str) -> &mut Self {
        self.raw_cell(name, 0, Vec::new(), Vec::new())
    }

    pub fn states(&mut self, names: &[&str]) -> &mut Self {
        for name in names {
            self.state(name);
        }
        self
    }

    /// A transition `from --label--> to`.
    pub fn transition(&mut self, name: &str, from: &str, to: &str, label: &str) -> &mut Self {
        self.cell(name, &[from], &[to]).label(name, label)
    }

    /// A cell whose dimension is the number of faces given.
    pub fn cell(&mut self, name: &str, sources: &[&str], targets: &[&str]) -> &mut Self {
        self.raw_cell(
            name,
            sources.len(),
            sources.iter().map(|s| s.to_string()).collect(),
            targets.iter().map(|s| s.to_string()).collect(),
        )
    }

    /// A cell with an explicit dimension, which may disagree with its faces.
    pub fn raw_cell(&mut self, name: &str, dim: usize, sources: Vec<String>, targets: Vec<String>) -> &mut Self {
        self.cells.push((name.to_string(), dim, sources, targets));
        self
    }

    pub fn label(&mut self, cell: &str, label: &str) -> &mut Self {
        self.labels.push((cell.to_string(), label.to_string()));
        self
    }

    pub fn initial(&mut self, cell: &str) -> &mut Self {
        self.initial.push(cell.to_string());
        self
    }

    pub fn final_state(&mut self, cell: &str) -> &mut Self {
        self.finals.push(cell.to_string());
        self
    }

    pub fn proposition(&mut self, cell: &str, prop: &str) -> &mut Self {
        self.valuation.push((cell.to_string(), prop.to_string()));
        self
    }

    pub fn build(&self) -> Result<Hda, BuildError> {
        let mut ids = BTreeMap::new();
        for (k, (name, ..)) in self.cells.iter().enumerate() {
            if ids.insert(name.clone(), CellId::from_index(k)).is_some() {
                return Err(BuildError::DuplicateCell(name.clone()));
            }
        }
        let resolve = |name: &String| ids.get(name).copied().ok_or_else(|| BuildError::UnknownCell(name.clone()));
        let mut cells = Vec::with_capacity(self.cells.len());
        for (name, dim, sources, targets) in &self.cells {
            cells.push(Cell {
                name: name.clone(),
                dim: *dim,
                sources: sources.iter().map(resolve).collect::<Result<_, _>>()?,
                targets: targets.iter().map(resolve).collect::<Result<_, _>>()?,
            });
        }
        let mut labels = BTreeMap::new();
        for (cell, label) in &self.labels {
            let id = resolve(cell)?;
            if cells[id.index()].dim != 1 {
                return Err(BuildError::LabelOnNonTransition(cell.clone()));
            }
            labels.insert(id, label.clone());
        }
        if let Some(c) =
            cells.iter().enumerate().find(|(k, c)| c.dim == 1 && !labels.contains_key(&CellId::from_index(*k)))
        {
            return Err(BuildError::MissingLabel(c.1.name.clone()));
        }
        let initial = self.initial.iter().map(resolve).collect::<Result<_, _>>()?;
        let finals = self.finals.iter().map(resolve).collect::<Result<_, _>>()?;
        let mut valuation: BTreeMap<CellId, BTreeSet<String>> = BTreeMap::new();
        for (cell, prop) in &self.valuation {
            valuation.entry(resolve(cell)?).or_default().insert(prop.clone());
        }
        Ok(Hda::from_parts(cells, labels, initial, finals, valuation))
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_missing_label() {
        let err = HdaBuilder::new().states(&["x", "y"]).cell("e", &["x"], &["y"]).build().unwrap_err();
        assert_eq!(err, BuildError::MissingLabel("e".into()));
    }

    #[test]
    fn builder_rejects_unknown_reference() {
        let err = HdaBuilder::new().state("x").transition("e", "x", "nowhere", "a").build().unwrap_err();
        assert_eq!(err, BuildError::UnknownCell("nowhere".into()));
    }

    #[test]
    fn builder_rejects_label_on_state() {
        let err = HdaBuilder::new().state("x").label("x", "a").build().unwrap_err();
        assert_eq!(err, BuildError::LabelOnNonTransition("x".into()));
    }

    #[test]
    fn multiset_extension() {
        let ab: LabelMultiset = ["a", "b"].into_iter().collect();
        let a: LabelMultiset = ["a"].into_iter().collect();
        let aa: LabelMultiset = ["a", "a"].into_iter().collect();
        assert_eq!(ab.extension_of(&a).map(String::as_str), Some("b"));
        assert_eq!(aa.extension_of(&a).map(String::as_str), Some("a"));
        assert_eq!(ab.extension_of(&ab), None);
        assert_eq!(aa.extension_of(&LabelMultiset::new()), None);
        assert_eq!(alloc::format!("{aa}"), "{a, a}");
    }

    #[test]
    fn cofaces_are_indexed() {
        let sq = fixtures::filled_square();
        let bottom = sq.cell_by_name("bottom").unwrap();
        let q2 = sq.cell_by_name("q2").unwrap();
        assert!(sq.cofaces(bottom).contains(&(Face::Source, 2, q2)));
        assert_eq!(sq.reachable().len(), 9);
    }
}
