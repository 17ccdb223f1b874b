//! Geometric models of concurrency.
//!
//! This crate holds the algorithmic core: higher dimensional automata as
//! labelled cubical sets ([`hda`]), paths with their adjacency and homotopy
//! ([`paths`]), ST-configuration structures ([`st`]), the history-aware
//! higher dimensional modal logic ([`logic`]) and hereditary
//! history-preserving bisimulation ([`equivalence`]).
//!
//! The crate is `no_std` and only needs an allocator. File formats and the
//! command-line front end live in the `geoconc` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod equivalence;
pub mod hda;
pub mod logic;
pub mod paths;
pub mod st;

pub use equivalence::{hh_bisim_hda, hh_bisim_st, EquivalenceVerdict};
pub use hda::{Cell, CellId, Face, Hda, HdaBuilder, Label, LabelMultiset};
pub use logic::{parse, sat_hda, sat_st, Formula};
pub use paths::{HdaPath, Step, StepKind};
pub use st::{ConfigurationStructure, EventSet, StConfig, StStructure};
