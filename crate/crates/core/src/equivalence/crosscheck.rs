//! Instance checks tying the deciders to each other and to the logic.

use alloc::collections::BTreeSet;
use alloc::string::String;

use super::{hh_bisim_hda, hh_bisim_st, EquivOptions, EquivalenceError, HdaVerdict, StVerdict};
use crate::hda::{CellId, Hda};
use crate::logic::{modal_equiv_bounded, sat_hda, ModalVerdict, ModelPoint};
use crate::st::from_hda;

#[derive(Clone, Debug)]
pub struct StCrossCheck {
    pub hda: HdaVerdict,
    pub st: StVerdict,
    /// Both translations are rooted, connected and adjacent-closed.
    pub translations_qualify: bool,
}

impl StCrossCheck {
    pub fn agree(&self) -> bool {
        self.hda.is_equivalent() == self.st.is_equivalent()
    }
}

/// Decides the pair as automata from their initial cells and again as
/// their ST-structures.
pub fn crosscheck_st(first: &Hda, second: &Hda, options: &EquivOptions) -> Result<StCrossCheck, EquivalenceError> {
    let root = |h: &Hda| h.initial().first().copied().ok_or(crate::st::StError::InitialCount(0));
    let hda = hh_bisim_hda(first, root(first)?, second, root(second)?, options)?;
    let (a, b) = (from_hda(first)?.st, from_hda(second)?.st);
    let qualifies = |r: crate::st::PropertyReport| r.rooted && r.connected && r.adjacent_closed;
    let translations_qualify = qualifies(a.properties()) && qualifies(b.properties());
    let st = hh_bisim_st(&a, &b, options)?;
    Ok(StCrossCheck { hda, st, translations_qualify })
}

#[derive(Clone, Debug)]
pub struct LogicCrossCheck {
    pub hda: HdaVerdict,
    pub modal: ModalVerdict,
    /// When the oracle found a formula: it holds at the first point and
    /// fails at the second.
    pub formula_confirmed: Option<bool>,
}

impl LogicCrossCheck {
    pub fn agree(&self) -> bool {
        self.hda.is_equivalent() == self.modal.equivalent
    }
}

/// Compares the hh verdict with bounded modal equivalence over the
/// propositions of both models.
pub fn crosscheck_logic(
    first: &Hda,
    first_root: CellId,
    second: &Hda,
    second_root: CellId,
    depth: usize,
    options: &EquivOptions,
) -> Result<LogicCrossCheck, EquivalenceError> {
    let hda = hh_bisim_hda(first, first_root, second, second_root, options)?;
    let atoms: BTreeSet<String> =
        first.valuation().values().chain(second.valuation().values()).flatten().cloned().collect();
    let modal =
        modal_equiv_bounded(ModelPoint::Hda(first, first_root), ModelPoint::Hda(second, second_root), depth, &atoms)?;
    let formula_confirmed = match &modal.distinguishing {
        Some(f) => Some(sat_hda(first, first_root, f)? && !sat_hda(second, second_root, f)?),
        None => None,
    };
    Ok(LogicCrossCheck { hda, modal, formula_confirmed })
}
