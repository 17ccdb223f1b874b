use alloc::vec::Vec;
use core::fmt;

use super::{CellId, Face, Hda};

/// One broken structural law.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// The number of source or target faces differs from the dimension.
    Arity {
        cell: CellId,
        dim: usize,
        sources: usize,
        targets: usize,
    },
    /// A face map points outside the automaton.
    Dangling {
        cell: CellId,
        face: Face,
        index: usize,
        target: CellId,
    },
    /// A face of an `n`-cell is not an `(n-1)`-cell.
    Dimension {
        cell: CellId,
        face: Face,
        index: usize,
        found: usize,
    },
    /// `alpha_i(beta_j(cell)) != beta_{j-1}(alpha_i(cell))`.
    CubicalLaw {
        alpha: Face,
        beta: Face,
        i: usize,
        j: usize,
        cell: CellId,
    },
    /// `l(s_i(cell)) != l(t_i(cell))` for a square.
    LabelCoherence {
        cell: CellId,
        index: usize,
    },
    MissingLabel {
        cell: CellId,
    },
    LabelOnNonTransition {
        cell: CellId,
    },
    InitialNotState {
        cell: CellId,
    },
    FinalNotState {
        cell: CellId,
    },
    ValuationUnknownCell {
        cell: CellId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Arity { cell, dim, sources, targets } => {
                write!(f, "cell {cell} has dimension {dim} but {sources} source and {targets} target faces")
            }
            Violation::Dangling { cell, face, index, target } => {
                write!(f, "{face}_{index}({cell}) = {target} does not exist")
            }
            Violation::Dimension { cell, face, index, found } => {
                write!(f, "{face}_{index}({cell}) has dimension {found}")
            }
            Violation::CubicalLaw { alpha, beta, i, j, cell } => {
                write!(f, "cubical law {alpha}_{i}∘{beta}_{j} = {beta}_{}∘{alpha}_{i} fails on {cell}", j - 1)
            }
            Violation::LabelCoherence { cell, index } => {
                write!(f, "l(s_{index}({cell})) differs from l(t_{index}({cell}))")
            }
            Violation::MissingLabel { cell } => write!(f, "transition {cell} has no label"),
            Violation::LabelOnNonTransition { cell } => write!(f, "cell {cell} is labelled but is not a transition"),
            Violation::InitialNotState { cell } => write!(f, "initial cell {cell} is not a state"),
            Violation::FinalNotState { cell } => write!(f, "final cell {cell} is not a state"),
            Violation::ValuationUnknownCell { cell } => write!(f, "valuation mentions unknown cell {cell}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural law and reports all violations at once.
pub fn validate(hda: &Hda) -> ValidationReport {
    let mut out = Vec::new();
    // cells whose own face maps are sound; laws are only checked through these
    let mut sound = alloc::vec![true; hda.len()];

    for q in hda.cell_ids() {
        let cell = hda.cell(q);
        if cell.sources.len() != cell.dim || cell.targets.len() != cell.dim {
            out.push(Violation::Arity {
                cell: q,
                dim: cell.dim,
                sources: cell.sources.len(),
                targets: cell.targets.len(),
            });
            sound[q.index()] = false;
        }
        for face in Face::BOTH {
            for (k, &f) in cell.faces(face).iter().enumerate() {
                if !hda.contains(f) {
                    out.push(Violation::Dangling { cell: q, face, index: k + 1, target: f });
                    sound[q.index()] = false;
                } else if hda.dim(f) + 1 != cell.dim {
                    out.push(Violation::Dimension { cell: q, face, index: k + 1, found: hda.dim(f) });
                    sound[q.index()] = false;
                }
            }
        }
    }

    for q in hda.cell_ids() {
        let n = hda.dim(q);
        if n < 2 || !sound[q.index()] {
            continue;
        }
        let faces_sound = Face::BOTH.iter().all(|&face| hda.cell(q).faces(face).iter().all(|f| sound[f.index()]));
        if !faces_sound {
            continue;
        }
        for alpha in Face::BOTH {
            for beta in Face::BOTH {
                for j in 2..=n {
                    for i in 1..j {
                        let lhs = hda.face(hda.face(q, beta, j), alpha, i);
                        let rhs = hda.face(hda.face(q, alpha, i), beta, j - 1);
                        if lhs != rhs {
                            out.push(Violation::CubicalLaw { alpha, beta, i, j, cell: q });
                        }
                    }
                }
            }
        }
    }

    for q in hda.cell_ids() {
        let dim = hda.dim(q);
        match (dim, hda.label(q)) {
            (1, None) => out.push(Violation::MissingLabel { cell: q }),
            (d, Some(_)) if d != 1 => out.push(Violation::LabelOnNonTransition { cell: q }),
            _ => {}
        }
        if dim == 2 && sound[q.index()] {
            for i in 1..=2 {
                let s = hda.label(hda.source(q, i));
                let t = hda.label(hda.target(q, i));
                if s != t {
                    out.push(Violation::LabelCoherence { cell: q, index: i });
                }
            }
        }
    }
    for &q in hda.labels().keys() {
        if !hda.contains(q) {
            out.push(Violation::LabelOnNonTransition { cell: q });
        }
    }

    for &q in hda.initial() {
        if !hda.contains(q) || hda.dim(q) != 0 {
            out.push(Violation::InitialNotState { cell: q });
        }
    }
    for &q in hda.finals() {
        if !hda.contains(q) || hda.dim(q) != 0 {
            out.push(Violation::FinalNotState { cell: q });
        }
    }
    for &q in hda.valuation().keys() {
        if !hda.contains(q) {
            out.push(Violation::ValuationUnknownCell { cell: q });
        }
    }

    ValidationReport { violations: out }
}
