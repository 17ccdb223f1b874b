//! History-aware higher dimensional modal logic.
//!
//! Formulas are built from atoms, `false` and implication with four
//! existential modalities: `{a}` starts an `a`-event, `<a>` terminates one,
//! `back{a}` undoes a start and `back<a>` undoes a termination. Everything
//! else (negation, conjunction, disjunction, the universal boxes and the
//! concurrent step `<<a,b>>`) is sugar that [`Formula::desugar`] removes.

mod eval;
mod oracle;
mod parse;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::hda::{CellId, Label};
use crate::st::StConfig;

pub use eval::{sat_hda, sat_st, HdaModel, ModalStructure, StModel};
pub use oracle::{modal_equiv_bounded, ModalVerdict, ModelPoint};
pub use parse::parse;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    /// `{a}`: start an event.
    During,
    /// `<a>`: terminate an event.
    After,
    /// `back{a}`: undo the start of an event.
    BackDuring,
    /// `back<a>`: undo the termination of an event.
    BackAfter,
}

impl Modality {
    pub const ALL: [Modality; 4] = [Modality::During, Modality::After, Modality::BackDuring, Modality::BackAfter];

    fn brackets(self, boxed: bool) -> (&'static str, &'static str) {
        match (self, boxed) {
            (Modality::During, false) => ("{", "}"),
            (Modality::After, false) => ("<", ">"),
            (Modality::BackDuring, false) => ("back{", "}"),
            (Modality::BackAfter, false) => ("back<", ">"),
            (Modality::During, true) => ("[[", "]]"),
            (Modality::After, true) => ("[", "]"),
            (Modality::BackDuring, true) => ("back[[", "]]"),
            (Modality::BackAfter, true) => ("back[", "]"),
        }
    }
}

/// The label a modality moves along; `_` matches any label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelSel {
    Any,
    Named(Label),
}

impl LabelSel {
    pub fn matches(&self, label: &str) -> bool {
        match self {
            LabelSel::Any => true,
            LabelSel::Named(l) => l == label,
        }
    }
}

impl fmt::Display for LabelSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelSel::Any => f.write_str("_"),
            LabelSel::Named(l) => f.write_str(l),
        }
    }
}

impl From<&str> for LabelSel {
    fn from(s: &str) -> Self {
        if s == "_" {
            LabelSel::Any
        } else {
            LabelSel::Named(s.into())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Existential modality.
    Diamond(Modality, LabelSel, Box<Formula>),
    /// Universal modality, the dual of [`Formula::Diamond`].
    Boxed(Modality, LabelSel, Box<Formula>),
    /// `<<a1,...,an>>φ`: start all of the events, then terminate them all.
    Step(Vec<Label>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn diamond(m: Modality, label: impl Into<LabelSel>, inner: Formula) -> Self {
        Formula::Diamond(m, label.into(), Box::new(inner))
    }

    pub fn boxed(m: Modality, label: impl Into<LabelSel>, inner: Formula) -> Self {
        Formula::Boxed(m, label.into(), Box::new(inner))
    }

    /// `{a}φ`.
    pub fn during(label: &str, inner: Formula) -> Self {
        Self::diamond(Modality::During, label, inner)
    }

    /// `<a>φ`.
    pub fn after(label: &str, inner: Formula) -> Self {
        Self::diamond(Modality::After, label, inner)
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(a) | Formula::Diamond(_, _, a) | Formula::Boxed(_, _, a) => 1 + a.size(),
            Formula::Step(labels, a) => labels.len() + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Nesting depth of modalities; a concurrent step of `n` labels counts
    /// `2n`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(a) => a.modal_depth(),
            Formula::Diamond(_, _, a) | Formula::Boxed(_, _, a) => 1 + a.modal_depth(),
            Formula::Step(labels, a) => 2 * labels.len() + a.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.modal_depth().max(b.modal_depth()),
        }
    }

    /// The equivalent formula over atoms, `false`, `->` and the four
    /// existential modalities only.
    pub fn desugar(&self) -> Formula {
        let neg = |f: Formula| f.implies(Formula::False);
        match self {
            Formula::True => neg(Formula::False),
            Formula::False => Formula::False,
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Not(a) => neg(a.desugar()),
            Formula::And(a, b) => neg(a.desugar().implies(neg(b.desugar()))),
            Formula::Or(a, b) => neg(a.desugar()).implies(b.desugar()),
            Formula::Implies(a, b) => a.desugar().implies(b.desugar()),
            Formula::Diamond(m, l, a) => Formula::Diamond(*m, l.clone(), Box::new(a.desugar())),
            Formula::Boxed(m, l, a) => neg(Formula::Diamond(*m, l.clone(), Box::new(neg(a.desugar())))),
            Formula::Step(labels, a) => {
                let mut f = a.desugar();
                for l in labels.iter().rev() {
                    f = Formula::diamond(Modality::After, l.as_str(), f);
                }
                for l in labels.iter().rev() {
                    f = Formula::diamond(Modality::During, l.as_str(), f);
                }
                f
            }
        }
    }

    /// True iff only core connectives occur.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::False | Formula::Atom(_) => true,
            Formula::Implies(a, b) => a.is_core() && b.is_core(),
            Formula::Diamond(_, _, a) => a.is_core(),
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) | Formula::Diamond(..) | Formula::Boxed(..) | Formula::Step(..) => 4,
            Formula::True | Formula::False | Formula::Atom(_) => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, child: &Formula, min: u8) -> fmt::Result {
    if child.precedence() < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    /// Prints in the ASCII grammar read by [`parse`], with only the
    /// parentheses needed to parse back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(p) => f.write_str(p),
            Formula::Not(a) => {
                f.write_str("!")?;
                write_operand(f, a, 4)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (op, level) = if matches!(self, Formula::And(..)) { (" & ", 3) } else { (" | ", 2) };
                write_operand(f, a, level)?;
                f.write_str(op)?;
                write_operand(f, b, level + 1)
            }
            Formula::Implies(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(" -> ")?;
                write_operand(f, b, 1)
            }
            Formula::Diamond(m, l, a) | Formula::Boxed(m, l, a) => {
                let (open, close) = m.brackets(matches!(self, Formula::Boxed(..)));
                write!(f, "{open}{l}{close}")?;
                write_operand(f, a, 4)
            }
            Formula::Step(labels, a) => {
                write!(f, "<<{}>>", labels.join(","))?;
                write_operand(f, a, 4)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("syntax error at offset {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown cell {0}")]
    UnknownCell(CellId),
    #[error("configuration {0:?} is not in the structure")]
    NotInStructure(StConfig),
    #[error("the depth bound must be positive")]
    ZeroDepth,
}
