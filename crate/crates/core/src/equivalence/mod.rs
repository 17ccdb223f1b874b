//! Hereditary history-preserving bisimulation.
//!
//! Both deciders build the finite candidate relation (pairs of rooted paths
//! with equal traces for automata, matched configurations with an event
//! bijection for ST-structures), attach to every candidate the moves it must
//! answer, and delete candidates with an unanswered move until nothing
//! changes. The models are equivalent iff the root candidate survives.
//!
//! Pairs of paths are only related when their observable traces agree:
//! matching forward moves from the root pair forces this, so the filter
//! loses no bisimulation.

mod crosscheck;
mod fixpoint;
mod hda;
mod st;

use alloc::vec::Vec;

use crate::hda::HdaError;
use crate::logic::LogicError;
use crate::paths::PathError;
use crate::st::StError;

pub use crosscheck::{crosscheck_logic, crosscheck_st, LogicCrossCheck, StCrossCheck};
pub use hda::{audit_hda_witness, hh_bisim_hda, replay_hda_refutation, HdaMove, HdaVerdict};
pub use st::{audit_st_witness, hh_bisim_st, replay_st_refutation, StMatch, StVerdict};

/// Which back conditions the ST decider enforces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BackConditions {
    /// Undoing a step on either side must be answered on the other.
    #[default]
    Symmetric,
    /// Only steps undone in the first structure must be answered.
    FirstOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivOptions {
    /// Largest number of candidate pairs (or paths per model) to build.
    pub budget: usize,
    pub back: BackConditions,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { budget: 2_000_000, back: BackConditions::Symmetric }
    }
}

/// One link of a refutation: the related candidate `at` was deleted
/// because the move `movement`, made in the first model or in the second,
/// has no surviving answer. The next link, if any, is the answer that
/// survived longest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefutationStep<W, M> {
    pub condition: u8,
    pub in_second: bool,
    pub at: W,
    pub movement: M,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceVerdict<W, M> {
    /// The root survives; `witness` is the greatest bisimulation found.
    Equivalent { witness: Vec<W> },
    /// The root was deleted; the chain ends at a move with no answer.
    Inequivalent { refutation: Vec<RefutationStep<W, M>> },
}

impl<W, M> EquivalenceVerdict<W, M> {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Equivalent { .. })
    }

    pub fn witness(&self) -> Option<&[W]> {
        match self {
            EquivalenceVerdict::Equivalent { witness } => Some(witness),
            EquivalenceVerdict::Inequivalent { .. } => None,
        }
    }

    pub fn refutation(&self) -> Option<&[RefutationStep<W, M>]> {
        match self {
            EquivalenceVerdict::Equivalent { .. } => None,
            EquivalenceVerdict::Inequivalent { refutation } => Some(refutation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EquivalenceError {
    #[error(transparent)]
    Hda(#[from] HdaError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    St(#[from] StError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("the {model} model is not {property}")]
    Precondition { model: &'static str, property: &'static str },
    #[error("more than {budget} candidates; raise the budget")]
    BudgetExceeded { budget: usize },
    #[error("internal error: the witness fails {violations} closure checks")]
    AuditFailed { violations: usize },
}

pub(crate) fn model_name(second: bool) -> &'static str {
    if second {
        "second"
    } else {
        "first"
    }
}
