//! Satisfaction, computed bottom-up for every point of a model at once.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{Formula, LogicError, Modality};
use crate::hda::{cell_label, CellId, Face, Hda, Label, LabelMultiset};
use crate::paths::StepKind;
use crate::st::{StConfig, StStructure};

/// A finite model seen as points with labelled moves for each modality.
pub trait ModalStructure {
    fn point_count(&self) -> usize;
    fn holds(&self, point: usize, atom: &str) -> bool;
    /// Every `(label, target)` reachable from `point` by one move of `m`.
    fn moves(&self, point: usize, m: Modality) -> &[(Label, usize)];

    /// The points satisfying `formula`, indexed by point.
    fn eval(&self, formula: &Formula) -> Vec<bool>
    where
        Self: Sized,
    {
        let core = formula.desugar();
        let mut memo = BTreeMap::new();
        eval_core(self, &core, &mut memo)
    }
}

fn eval_core<M: ModalStructure>(model: &M, f: &Formula, memo: &mut BTreeMap<Formula, Vec<bool>>) -> Vec<bool> {
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let n = model.point_count();
    let out = match f {
        Formula::False => alloc::vec![false; n],
        Formula::Atom(p) => (0..n).map(|x| model.holds(x, p)).collect(),
        Formula::Implies(a, b) => {
            let (a, b) = (eval_core(model, a, memo), eval_core(model, b, memo));
            a.iter().zip(&b).map(|(&x, &y)| !x || y).collect()
        }
        Formula::Diamond(m, l, a) => {
            let inner = eval_core(model, a, memo);
            (0..n).map(|x| model.moves(x, *m).iter().any(|(label, y)| l.matches(label) && inner[*y])).collect()
        }
        other => return eval_core(model, &other.desugar(), memo),
    };
    memo.insert(f.clone(), out.clone());
    out
}

/// Moves of an automaton following the satisfaction clauses on cells: the
/// label of the higher cell must extend the label of the lower one by the
/// label of the move.
#[derive(Clone, Debug)]
pub struct HdaModel<'a> {
    hda: &'a Hda,
    moves: Vec<[Vec<(Label, usize)>; 4]>,
}

impl<'a> HdaModel<'a> {
    pub fn new(hda: &'a Hda) -> Self {
        let labels: Vec<Option<LabelMultiset>> = hda.cell_ids().map(|q| cell_label(hda, q).ok()).collect();
        let extension = |higher: CellId, lower: CellId| -> Option<Label> {
            let (h, l) = (labels[higher.index()].as_ref()?, labels[lower.index()].as_ref()?);
            h.extension_of(l).cloned()
        };
        let mut moves: Vec<[Vec<(Label, usize)>; 4]> = (0..hda.len()).map(|_| Default::default()).collect();
        for q in hda.cell_ids() {
            let mut add = |m: Modality, from: CellId, higher: CellId, lower: CellId, to: CellId| {
                if let Some(a) = extension(higher, lower) {
                    moves[from.index()][m as usize].push((a, to.index()));
                }
            };
            for face in Face::BOTH {
                for i in 1..=hda.dim(q) {
                    let Some(f) = hda.try_face(q, face, i) else { continue };
                    // q is the higher cell; f the lower one
                    match face {
                        Face::Source => {
                            add(Modality::During, f, q, f, q);
                            add(Modality::BackDuring, q, q, f, f);
                        }
                        Face::Target => {
                            add(Modality::After, q, q, f, f);
                            add(Modality::BackAfter, f, q, f, q);
                        }
                    }
                }
            }
        }
        for per in &mut moves {
            for list in per.iter_mut() {
                list.sort();
                list.dedup();
            }
        }
        HdaModel { hda, moves }
    }

    pub fn hda(&self) -> &Hda {
        self.hda
    }
}

impl ModalStructure for HdaModel<'_> {
    fn point_count(&self) -> usize {
        self.hda.len()
    }

    fn holds(&self, point: usize, atom: &str) -> bool {
        self.hda.holds(CellId::from_index(point), atom)
    }

    fn moves(&self, point: usize, m: Modality) -> &[(Label, usize)] {
        &self.moves[point][m as usize]
    }
}

/// Moves of an ST-structure: `{a}` and `<a>` follow s-steps and t-steps,
/// the backward modalities follow them in reverse.
#[derive(Clone, Debug)]
pub struct StModel<'a> {
    st: &'a StStructure,
    points: Vec<StConfig>,
    index: BTreeMap<StConfig, usize>,
    valuation: BTreeMap<StConfig, BTreeSet<String>>,
    moves: Vec<[Vec<(Label, usize)>; 4]>,
}

impl<'a> StModel<'a> {
    pub fn new(st: &'a StStructure) -> Self {
        Self::with_valuation(st, BTreeMap::new())
    }

    pub fn with_valuation(st: &'a StStructure, valuation: BTreeMap<StConfig, BTreeSet<String>>) -> Self {
        let points: Vec<StConfig> = st.configs().iter().copied().collect();
        let index: BTreeMap<StConfig, usize> = points.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut moves: Vec<[Vec<(Label, usize)>; 4]> = (0..points.len()).map(|_| Default::default()).collect();
        for (k, &c) in points.iter().enumerate() {
            for step in st.steps(c).expect("point is a member") {
                let label = st.label(step.event).clone();
                let to = index[&step.to];
                let (fwd, bwd) = match step.kind {
                    StepKind::Start => (Modality::During, Modality::BackDuring),
                    StepKind::Terminate => (Modality::After, Modality::BackAfter),
                };
                moves[k][fwd as usize].push((label.clone(), to));
                moves[to][bwd as usize].push((label, k));
            }
        }
        for per in &mut moves {
            for list in per.iter_mut() {
                list.sort();
                list.dedup();
            }
        }
        StModel { st, points, index, valuation, moves }
    }

    pub fn point(&self, c: StConfig) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn config(&self, point: usize) -> StConfig {
        self.points[point]
    }

    pub fn structure(&self) -> &StStructure {
        self.st
    }
}

impl ModalStructure for StModel<'_> {
    fn point_count(&self) -> usize {
        self.points.len()
    }

    fn holds(&self, point: usize, atom: &str) -> bool {
        self.valuation.get(&self.points[point]).is_some_and(|ps| ps.contains(atom))
    }

    fn moves(&self, point: usize, m: Modality) -> &[(Label, usize)] {
        &self.moves[point][m as usize]
    }
}

/// `hda, q ⊨ formula`.
pub fn sat_hda(hda: &Hda, q: CellId, formula: &Formula) -> Result<bool, LogicError> {
    if !hda.contains(q) {
        return Err(LogicError::UnknownCell(q));
    }
    Ok(HdaModel::new(hda).eval(formula)[q.index()])
}

/// `st, c ⊨ formula`.
pub fn sat_st(st: &StStructure, c: StConfig, formula: &Formula) -> Result<bool, LogicError> {
    let model = StModel::new(st);
    let point = model.point(c).ok_or(LogicError::NotInStructure(c))?;
    Ok(model.eval(formula)[point])
}
