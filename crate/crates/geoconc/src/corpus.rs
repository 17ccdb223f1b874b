//! The example pairs `(E, F)` separating models of concurrency, with the
//! formula that holds at the initial cell of `E` but not of `F`.
//!
//! Each automaton is transcribed from a drawing of squares; the comments
//! beside each builder say which cell is which. In the drawings the `a`
//! arrow leaving the initial cell goes right and the `b` arrow goes up.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use geoconc_core::equivalence::{EquivOptions, EquivalenceError};
use geoconc_core::hda::{carve, is_acyclic, is_cubical, make_hypercube, validate};
use geoconc_core::st::from_hda;
use geoconc_core::{hh_bisim_hda, parse, sat_hda, Hda, HdaBuilder, StStructure};

use crate::format::{load_model, save_model, FormatError, Model};

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub title: &'static str,
    pub first: Hda,
    pub second: Hda,
    /// Holds at the initial cell of `first` and fails at that of `second`.
    pub formula: &'static str,
}

/// Adds the square whose first coordinate runs along `x0` (leaving the
/// origin) and `x1`, and whose second runs along `y0` and `y1`.
fn square(b: &mut HdaBuilder, name: &str, x0: &str, y0: &str, x1: &str, y1: &str) {
    b.cell(name, &[y0, x0], &[y1, x1]);
}

/// `a ∥ b` on the corners `i`, `a` (after `a`), `b` and `ab`, optionally
/// without the square.
fn diamond(b: &mut HdaBuilder, tag: &str, filled: bool, la: &str, lb: &str) {
    let i = "i";
    let (ca, cb, cab) = (format!("A{tag}"), format!("B{tag}"), format!("AB{tag}"));
    let (a0, b0, a1, b1) = (format!("{la}{tag}"), format!("{lb}{tag}"), format!("{la}{tag}'"), format!("{lb}{tag}'"));
    b.states(&[&ca, &cb, &cab])
        .transition(&a0, i, &ca, la)
        .transition(&b0, i, &cb, lb)
        .transition(&a1, &cb, &cab, la)
        .transition(&b1, &ca, &cab, lb);
    if filled {
        square(b, &format!("{la}{lb}{tag}"), &a0, &b0, &a1, &b1);
    }
}

fn start() -> HdaBuilder {
    let mut b = HdaBuilder::new();
    b.state("i").initial("i");
    b
}

fn built(b: &HdaBuilder) -> Hda {
    b.build().expect("corpus automata are well formed")
}

/// Concurrency against interleaving: the filled square `a ∥ b` and the
/// hollow one `a;b + b;a`.
pub fn fig2() -> CorpusEntry {
    let mut e = start();
    diamond(&mut e, "", true, "a", "b");
    let mut f = start();
    diamond(&mut f, "", false, "a", "b");
    CorpusEntry {
        name: "fig2",
        title: "concurrency vs. interleaving",
        first: built(&e),
        second: built(&f),
        formula: "{a}{b}true",
    }
}

/// Three concurrent `a` events and a `b`: the full 4-cube against the
/// 4-cube without its top cell, where at most three events run at once.
/// Cells are named by their coordinates; the last one is `b`.
pub fn fig3() -> CorpusEntry {
    let e = make_hypercube(&["a", "a", "a", "b"]).expect("cube");
    let top: BTreeSet<_> = e.cell_ids().filter(|&q| e.dim(q) == 4).collect();
    let f = carve(&e, &top).expect("the top cell is no face");
    CorpusEntry { name: "fig3", title: "limits of wh-bisimulation", first: e, second: f, formula: "{a}{a}{a}{b}true" }
}

/// `a ∥ b + a;b` against `a;b + b;a + a;b`. `E` is the filled square on
/// `i` with a separate sequential branch `i -a-> C -b-> D`; `F` has the
/// hollow square instead.
pub fn fig4() -> CorpusEntry {
    let branch = |b: &mut HdaBuilder| {
        b.states(&["C", "D"]).transition("a2", "i", "C", "a").transition("b2", "C", "D", "b");
    };
    let mut e = start();
    diamond(&mut e, "", true, "a", "b");
    branch(&mut e);
    let mut f = start();
    diamond(&mut f, "", false, "a", "b");
    branch(&mut f);
    CorpusEntry {
        name: "fig4",
        title: "causality vs. ST-bisimulations",
        first: built(&e),
        second: built(&f),
        formula: "{a}<a>{b}back<a>true",
    }
}

/// The absorption law. `E = (a|(b + c)) + (b|(a + c))`: branch 1 holds the
/// squares `(a1, b1)` and `(a1, c1)` glued along the edge `a1`, branch 2 the
/// squares `(b2, a2)` and `(b2, c2)` glued along `b2`. `F` adds a third
/// branch, the plain square `(a3, b3)`. No edge is shared between branches.
pub fn fig5() -> CorpusEntry {
    let shared = |b: &mut HdaBuilder, tag: &str, main: &str, other: &str| {
        // `main` runs with either `other` or `c`
        let m0 = format!("{main}{tag}");
        let o_corner = format!("O{tag}");
        let c_corner = format!("C{tag}");
        let m_corner = format!("M{tag}");
        let (mo, mc) = (format!("MO{tag}"), format!("MC{tag}"));
        let (o0, c0) = (format!("{other}{tag}"), format!("c{tag}"));
        let (m_after_o, m_after_c) = (format!("{main}{tag}'"), format!("{main}{tag}''"));
        let (o1, c1) = (format!("{other}{tag}'"), format!("c{tag}'"));
        b.states(&[&m_corner, &o_corner, &c_corner, &mo, &mc])
            .transition(&m0, "i", &m_corner, main)
            .transition(&o0, "i", &o_corner, other)
            .transition(&c0, "i", &c_corner, "c")
            .transition(&m_after_o, &o_corner, &mo, main)
            .transition(&o1, &m_corner, &mo, other)
            .transition(&m_after_c, &c_corner, &mc, main)
            .transition(&c1, &m_corner, &mc, "c");
        square(b, &format!("{main}{other}{tag}"), &m0, &o0, &m_after_o, &o1);
        square(b, &format!("{main}c{tag}"), &m0, &c0, &m_after_c, &c1);
    };
    let mut e = start();
    shared(&mut e, "1", "a", "b");
    shared(&mut e, "2", "b", "a");
    let mut f = e.clone();
    diamond(&mut f, "3", true, "a", "b");
    CorpusEntry {
        name: "fig5",
        title: "absorption law",
        first: built(&e),
        second: built(&f),
        formula: "[[a]][[b]](back{b}{c}true | back{a}{c}true)",
    }
}

/// Conflicting futures. Branch 1 of `E` is the square `(a1, b1)` with a
/// `c` edge after `a1` alone, in conflict with `b1`; branch 2 the square
/// `(a2, b2)` with a `d` edge after `b2` alone. `F` adds the plain square
/// `(a3, b3)`.
pub fn fig6() -> CorpusEntry {
    let mut e = start();
    diamond(&mut e, "1", true, "a", "b");
    e.state("C1").transition("c1", "A1", "C1", "c");
    diamond(&mut e, "2", true, "a", "b");
    e.state("D2").transition("d2", "B2", "D2", "d");
    let mut f = e.clone();
    diamond(&mut f, "3", true, "a", "b");
    CorpusEntry {
        name: "fig6",
        title: "conflicting futures",
        first: built(&e),
        second: built(&f),
        formula: "[[a]][[b]](<b>back{a}{d}true | <a>back{b}{c}true)",
    }
}

/// Non-binary conflict among three `a` events. `E` is the 3-cube without
/// the cells where all three have started: any two may run together, never
/// all three. `F` is the full 3-cube.
pub fn fig7() -> CorpusEntry {
    let f = make_hypercube(&["a", "a", "a"]).expect("cube");
    let all_started: BTreeSet<_> = f.cell_ids().filter(|&q| !f.name(q).contains('0')).collect();
    let e = carve(&f, &all_started).expect("upward closed");
    CorpusEntry {
        name: "fig7",
        title: "non-binary conflict",
        first: e,
        second: f,
        formula: "{a}{a}([a]{a}true & <a>{a}back{a}{a}<a>back{a}<a>!{a}true)",
    }
}

pub fn entries() -> Vec<CorpusEntry> {
    vec![fig2(), fig3(), fig4(), fig5(), fig6(), fig7()]
}

pub fn entry(name: &str) -> Option<CorpusEntry> {
    entries().into_iter().find(|e| e.name == name)
}

/// The filled square alone, as a standalone model file.
pub fn filled_square() -> Hda {
    fig2().first
}

/// Three sides of a cube: `c` may start once `a` or `b` has terminated,
/// and never before. Built by carving the cube over `a`, `b`, `c`.
pub fn parallel_switch() -> Hda {
    let cube = make_hypercube(&["a", "b", "c"]).expect("cube");
    let removed: BTreeSet<_> = cube
        .cell_ids()
        .filter(|&q| {
            let n: Vec<char> = cube.name(q).chars().collect();
            n[2] != '0' && n[0] != '1' && n[1] != '1'
        })
        .collect();
    carve(&cube, &removed).expect("upward closed")
}

pub fn parallel_switch_st() -> StStructure {
    from_hda(&parallel_switch()).expect("acyclic and cubical").st
}

/// Outcome of checking one entry against its expected verdicts.
#[derive(Clone, Debug)]
pub struct EntryReport {
    pub name: &'static str,
    pub well_formed: bool,
    pub first_satisfies: bool,
    pub second_satisfies: bool,
    /// `None` when the equivalence budget ran out.
    pub hh_equivalent: Option<bool>,
    pub elapsed: Duration,
}

impl EntryReport {
    pub fn passed(&self) -> bool {
        self.well_formed && self.first_satisfies && !self.second_satisfies && self.hh_equivalent == Some(false)
    }
}

fn well_formed(h: &Hda) -> bool {
    validate(h).is_clean() && is_acyclic(h) && is_cubical(h) == Ok(true)
}

pub fn run_entry(entry: &CorpusEntry, options: &EquivOptions) -> Result<EntryReport, EquivalenceError> {
    let clock = Instant::now();
    let formula = parse(entry.formula)?;
    let (e, f) = (&entry.first, &entry.second);
    let (ie, jf) = (e.initial()[0], f.initial()[0]);
    let hh_equivalent = match hh_bisim_hda(e, ie, f, jf, options) {
        Ok(v) => Some(v.is_equivalent()),
        Err(EquivalenceError::BudgetExceeded { .. }) => None,
        Err(other) => return Err(other),
    };
    Ok(EntryReport {
        name: entry.name,
        well_formed: well_formed(e) && well_formed(f),
        first_satisfies: sat_hda(e, ie, &formula)?,
        second_satisfies: sat_hda(f, jf, &formula)?,
        hh_equivalent,
        elapsed: clock.elapsed(),
    })
}

/// Writes every entry as `<name>_E.json` and `<name>_F.json`, plus the
/// filled square and the parallel switch.
pub fn export(dir: &Path) -> Result<(), FormatError> {
    std::fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.to_path_buf(), source })?;
    for e in entries() {
        save_model(&dir.join(format!("{}_E.json", e.name)), &Model::Hda(e.first))?;
        save_model(&dir.join(format!("{}_F.json", e.name)), &Model::Hda(e.second))?;
    }
    save_model(&dir.join("fig1_filled.json"), &Model::Hda(filled_square()))?;
    save_model(&dir.join("parallel_switch_st.json"), &Model::St(parallel_switch_st()))?;
    Ok(())
}

/// Reads an exported entry back, replacing the built-in models.
pub fn load(dir: &Path, name: &str) -> Result<CorpusEntry, FormatError> {
    let mut entry = entry(name).ok_or(FormatError::UnknownKind)?;
    let read = |side: &str| -> Result<Hda, FormatError> {
        let path = dir.join(format!("{name}_{side}.json"));
        match load_model(&path)? {
            Model::Hda(h) => Ok(h),
            _ => Err(FormatError::InFile { path, source: Box::new(FormatError::UnknownKind) }),
        }
    };
    entry.first = read("E")?;
    entry.second = read("F")?;
    Ok(entry)
}
