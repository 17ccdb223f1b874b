//! The `geoconc` command line.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use geoconc_core::equivalence::{
    crosscheck_logic, crosscheck_st, BackConditions, EquivOptions, EquivalenceError, HdaMove, HdaVerdict, StMatch,
    StVerdict,
};
use geoconc_core::hda::{is_acyclic, is_cubical, validate};
use geoconc_core::logic::LogicError;
use geoconc_core::paths::StepKind;
use geoconc_core::st::{causality, concurrency, conflict, from_hda, to_hda, StError, StStep};
use geoconc_core::{hh_bisim_hda, hh_bisim_st, parse, sat_hda, sat_st, EventSet, Hda, StConfig, StStructure};
use serde_json::{json, Value};

use crate::corpus::{self, EntryReport};
use crate::format::{load_model, parse_config, save_model, FormatError, Model};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "geoconc", version, about = "Higher dimensional automata, ST-structures and hh-bisimulation")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file against the structural laws.
    Validate { model: PathBuf },
    /// Decide whether a formula holds at a point of a model.
    Check {
        model: PathBuf,
        formula: String,
        /// Cell name, or a configuration such as `({a1,b1},{a1})`.
        /// Defaults to the initial cell or the empty configuration.
        #[arg(long)]
        at: Option<String>,
    },
    /// Decide hh-bisimilarity of two models.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Hda)]
        mode: Mode,
        /// Also decide the ST translations and bounded modal equivalence.
        #[arg(long)]
        crosscheck: bool,
        /// Depth bound for the modal oracle; defaults to the combined size.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = EquivOptions::default().budget)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = Back::Symmetric)]
        back: Back,
        /// Print the whole witness relation.
        #[arg(long)]
        witness: bool,
    },
    /// Translate a model between automata, ST-structures and configuration
    /// structures.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Tabulate concurrency, causality and conflict among events.
    Relations {
        model: PathBuf,
        /// Configuration to relate the events at; defaults to every
        /// configuration containing all events, or the largest one.
        #[arg(long)]
        at: Option<String>,
    },
    /// Check the built-in examples against their expected verdicts.
    Corpus {
        #[arg(long)]
        run_all: bool,
        #[arg(long)]
        entry: Option<String>,
        /// Write the corpus as model files into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Read the models from files written by `--export`.
        #[arg(long)]
        load: Option<PathBuf>,
        #[arg(long, default_value_t = EquivOptions::default().budget)]
        budget: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Hda,
    St,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Back {
    Symmetric,
    FirstOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Hda,
    St,
    Cfg,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
    #[error(transparent)]
    St(#[from] StError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Equivalence(EquivalenceError::BudgetExceeded { .. }) => EXIT_BUDGET,
            _ => EXIT_INPUT,
        }
    }
}

/// What a command prints and how it exits.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn new(code: i32, text: String, json: Value) -> Self {
        Outcome { code, text, json }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let mut s = serde_json::to_string_pretty(&self.json).expect("values serialize");
            s.push('\n');
            s
        } else {
            self.text.clone()
        }
    }
}

/// Runs a parsed command line; errors become exit code 2 or 3.
pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Validate { model } => cmd_validate(model),
        Command::Check { model, formula, at } => cmd_check(model, formula, at.as_deref()),
        Command::Equiv { first, second, mode, crosscheck, depth, budget, back, witness } => {
            let back = match back {
                Back::Symmetric => BackConditions::Symmetric,
                Back::FirstOnly => BackConditions::FirstOnly,
            };
            let options = EquivOptions { budget: *budget, back };
            cmd_equiv(first, second, *mode, *crosscheck, *depth, &options, *witness)
        }
        Command::Convert { input, output, to } => cmd_convert(input, output, *to),
        Command::Relations { model, at } => cmd_relations(model, at.as_deref()),
        Command::Corpus { run_all, entry, export, load, budget } => {
            cmd_corpus(*run_all, entry.as_deref(), export.as_deref(), load.as_deref(), *budget)
        }
    };
    result.unwrap_or_else(|e| Outcome::new(e.exit_code(), format!("error: {e}\n"), json!({ "error": e.to_string() })))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_validate(path: &Path) -> Result<Outcome, CliError> {
    let model = load_model(path)?;
    let mut text = String::new();
    match &model {
        Model::Hda(h) => {
            let report = validate(h);
            let acyclic = is_acyclic(h);
            let cubical = acyclic && is_cubical(h) == Ok(true);
            let clean = report.is_clean() && acyclic && cubical;
            let _ = writeln!(text, "model: hda with {} cells", h.len());
            let _ = writeln!(text, "violations: {}", report.violations.len());
            let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            for v in &violations {
                let _ = writeln!(text, "  - {v}");
            }
            let _ = writeln!(text, "acyclic: {}\ncubical: {}\nclean: {}", yes(acyclic), yes(cubical), yes(clean));
            let json = json!({ "kind": "hda", "cells": h.len(), "violations": violations,
                "acyclic": acyclic, "cubical": cubical, "clean": clean });
            Ok(Outcome::new(if clean { EXIT_OK } else { EXIT_NEGATIVE }, text, json))
        }
        Model::St(st) => {
            let p = st.properties();
            let flags = [
                ("rooted", p.rooted),
                ("connected", p.connected),
                ("union_closed", p.union_closed),
                ("intersection_closed", p.intersection_closed),
                ("stable", p.stable),
                ("adjacent_closed", p.adjacent_closed),
                ("single_event_closed", p.single_event_closed),
            ];
            let _ =
                writeln!(text, "model: st with {} events and {} configurations", st.events().len(), st.configs().len());
            for (name, v) in flags {
                let _ = writeln!(text, "{name}: {}", yes(v));
            }
            let mut json = json!({ "kind": "st", "events": st.events().len(), "configs": st.configs().len() });
            for (name, v) in flags {
                json[name] = json!(v);
            }
            Ok(Outcome::new(EXIT_OK, text, json))
        }
        Model::Cfg(cfg) => {
            let p = cfg.properties();
            let flags = [
                ("rooted", p.rooted),
                ("connected", p.connected),
                ("union_closed", p.union_closed),
                ("intersection_closed", p.intersection_closed),
                ("stable", p.stable),
            ];
            let _ = writeln!(
                text,
                "model: cfg with {} events and {} configurations",
                cfg.events().len(),
                cfg.configs().len()
            );
            for (name, v) in flags {
                let _ = writeln!(text, "{name}: {}", yes(v));
            }
            let mut json = json!({ "kind": "cfg", "events": cfg.events().len(), "configs": cfg.configs().len() });
            for (name, v) in flags {
                json[name] = json!(v);
            }
            Ok(Outcome::new(EXIT_OK, text, json))
        }
    }
}

fn initial_cell(h: &Hda) -> Result<geoconc_core::CellId, CliError> {
    h.initial().first().copied().ok_or_else(|| CliError::Usage("the automaton has no initial cell".into()))
}

fn cell(h: &Hda, name: Option<&str>) -> Result<geoconc_core::CellId, CliError> {
    match name {
        Some(n) => h.cell_by_name(n).ok_or_else(|| CliError::Usage(format!("unknown cell `{n}`"))),
        None => initial_cell(h),
    }
}

fn config(st: &StStructure, text: Option<&str>) -> Result<StConfig, CliError> {
    Ok(match text {
        Some(t) => parse_config(st, t)?,
        None => StConfig::ROOT,
    })
}

/// Any model as an ST-structure, for commands defined on those.
fn as_st(model: Model) -> Result<StStructure, CliError> {
    Ok(match model {
        Model::Hda(h) => from_hda(&h)?.st,
        Model::St(st) => st,
        Model::Cfg(cfg) => cfg.to_st_structure()?,
    })
}

fn cmd_check(path: &Path, formula: &str, at: Option<&str>) -> Result<Outcome, CliError> {
    let model = load_model(path)?;
    let phi = parse(formula)?;
    let (holds, point) = match model {
        Model::Hda(h) => {
            let q = cell(&h, at)?;
            (sat_hda(&h, q, &phi)?, h.name(q).to_string())
        }
        other => {
            let st = as_st(other)?;
            let c = config(&st, at)?;
            (sat_st(&st, c, &phi)?, st.format_config(c))
        }
    };
    let verdict = if holds { "sat" } else { "unsat" };
    let text = format!("{verdict}: {phi} at {point}\n");
    let json = json!({ "verdict": verdict, "holds": holds, "formula": phi.to_string(), "point": point });
    Ok(Outcome::new(if holds { EXIT_OK } else { EXIT_NEGATIVE }, text, json))
}

fn step_token(h: &Hda, kind: StepKind, index: usize, to: geoconc_core::CellId) -> String {
    match kind {
        StepKind::Start => format!("s{index}:{}", h.name(to)),
        StepKind::Terminate => format!("t{index}"),
    }
}

fn hda_move(h: &Hda, m: &HdaMove) -> String {
    match m {
        HdaMove::Extend(s) => format!("extend {} ({})", step_token(h, s.kind, s.index, s.to), s.annotated()),
        HdaMove::Retract(s) => format!("retract {} ({})", step_token(h, s.kind, s.index, s.to), s.annotated()),
        HdaMove::Swap(l) => format!("swap at {l}"),
    }
}

fn model_side(in_second: bool) -> &'static str {
    if in_second {
        "second"
    } else {
        "first"
    }
}

fn hda_verdict(a: &Hda, b: &Hda, v: &HdaVerdict, dump: bool, text: &mut String) -> Value {
    let _ = writeln!(text, "equivalent: {}", yes(v.is_equivalent()));
    match (v.witness(), v.refutation()) {
        (Some(w), _) => {
            let pairs: Vec<Value> = w.iter().map(|(p, q)| json!([p.encode(a), q.encode(b)])).collect();
            let _ = writeln!(text, "witness: {} related path pairs", w.len());
            if dump {
                for (p, q) in w {
                    let _ = writeln!(text, "  {} ~ {}", p.encode(a), q.encode(b));
                }
            }
            json!({ "equivalent": true, "witness": pairs })
        }
        (_, Some(r)) => {
            let _ = writeln!(text, "refutation:");
            let links: Vec<Value> = r
                .iter()
                .map(|link| {
                    let mover = if link.in_second { b } else { a };
                    let (p, q) = (link.at.0.encode(a), link.at.1.encode(b));
                    let mv = hda_move(mover, &link.movement);
                    let _ = writeln!(text, "  condition {} in the {} model at [{p}] ~ [{q}]: {mv}", link.condition, model_side(link.in_second));
                    json!({ "condition": link.condition, "model": model_side(link.in_second), "at": [p, q], "move": mv })
                })
                .collect();
            json!({ "equivalent": false, "refutation": links })
        }
        _ => unreachable!("a verdict has a witness or a refutation"),
    }
}

fn st_step(st: &StStructure, s: &StStep) -> String {
    let sign = match s.kind {
        StepKind::Start => "start",
        StepKind::Terminate => "terminate",
    };
    format!("{sign} {} ({})", st.events()[s.event].name, st.label(s.event))
}

fn st_match(a: &StStructure, b: &StStructure, m: &StMatch) -> (String, String, Value) {
    let map: serde_json::Map<String, Value> =
        m.map.iter().map(|&(x, y)| (a.events()[x].name.clone(), json!(b.events()[y].name))).collect();
    (a.format_config(m.first), b.format_config(m.second), Value::Object(map))
}

fn st_verdict(a: &StStructure, b: &StStructure, v: &StVerdict, dump: bool, text: &mut String) -> Value {
    let _ = writeln!(text, "equivalent: {}", yes(v.is_equivalent()));
    match (v.witness(), v.refutation()) {
        (Some(w), _) => {
            let _ = writeln!(text, "witness: {} related triples", w.len());
            let triples: Vec<Value> = w
                .iter()
                .map(|m| {
                    let (c, d, f) = st_match(a, b, m);
                    if dump {
                        let _ = writeln!(text, "  {c} ~ {d} via {f}");
                    }
                    json!({ "first": c, "second": d, "map": f })
                })
                .collect();
            json!({ "equivalent": true, "witness": triples })
        }
        (_, Some(r)) => {
            let _ = writeln!(text, "refutation:");
            let links: Vec<Value> = r
                .iter()
                .map(|link| {
                    let (c, d, f) = st_match(a, b, &link.at);
                    let mv = st_step(if link.in_second { b } else { a }, &link.movement);
                    let _ = writeln!(
                        text,
                        "  condition {} in the {} structure at {c} ~ {d} via {f}: {mv}",
                        link.condition,
                        model_side(link.in_second)
                    );
                    json!({ "condition": link.condition, "model": model_side(link.in_second),
                        "at": { "first": c, "second": d, "map": f }, "move": mv })
                })
                .collect();
            json!({ "equivalent": false, "refutation": links })
        }
        _ => unreachable!("a verdict has a witness or a refutation"),
    }
}

fn cmd_equiv(
    first: &Path,
    second: &Path,
    mode: Mode,
    crosscheck: bool,
    depth: Option<usize>,
    options: &EquivOptions,
    dump: bool,
) -> Result<Outcome, CliError> {
    let (ma, mb) = (load_model(first)?, load_model(second)?);
    let mut text = String::new();
    let (equivalent, mut json) = match mode {
        Mode::Hda => {
            let (Model::Hda(a), Model::Hda(b)) = (&ma, &mb) else {
                return Err(CliError::Usage("--mode hda needs two automata".into()));
            };
            let v = hh_bisim_hda(a, initial_cell(a)?, b, initial_cell(b)?, options)?;
            (v.is_equivalent(), hda_verdict(a, b, &v, dump, &mut text))
        }
        Mode::St => {
            let (a, b) = (as_st(ma.clone())?, as_st(mb.clone())?);
            let v = hh_bisim_st(&a, &b, options)?;
            (v.is_equivalent(), st_verdict(&a, &b, &v, dump, &mut text))
        }
    };
    if crosscheck {
        let (Model::Hda(a), Model::Hda(b)) = (&ma, &mb) else {
            return Err(CliError::Usage("--crosscheck needs two automata".into()));
        };
        let st = crosscheck_st(a, b, options)?;
        let depth = depth.unwrap_or(a.len() + b.len());
        let logic = crosscheck_logic(a, initial_cell(a)?, b, initial_cell(b)?, depth, options)?;
        let agree = |ok: bool| if ok { "agree" } else { "DISAGREE" };
        let _ = writeln!(
            text,
            "crosscheck st: {} (automata {}, ST-structures {})",
            agree(st.agree()),
            yes(st.hda.is_equivalent()),
            yes(st.st.is_equivalent())
        );
        let _ = write!(text, "crosscheck logic at depth {depth}: {}", agree(logic.agree()));
        let formula = logic.modal.distinguishing.as_ref().map(|f| f.to_string());
        if let Some(f) = &formula {
            let _ = write!(text, ", separated by {f} (confirmed: {})", yes(logic.formula_confirmed == Some(true)));
        }
        text.push('\n');
        json["crosscheck"] = json!({
            "st": { "agree": st.agree(), "hda_equivalent": st.hda.is_equivalent(),
                    "st_equivalent": st.st.is_equivalent(), "translations_qualify": st.translations_qualify },
            "logic": { "agree": logic.agree(), "depth": depth, "modal_equivalent": logic.modal.equivalent,
                       "formula": formula, "confirmed": logic.formula_confirmed },
        });
    }
    Ok(Outcome::new(if equivalent { EXIT_OK } else { EXIT_NEGATIVE }, text, json))
}

fn cmd_convert(input: &Path, output: &Path, to: Target) -> Result<Outcome, CliError> {
    let model = load_model(input)?;
    let from = model.kind();
    let converted = match (model, to) {
        (Model::Hda(h), Target::Hda) => Model::Hda(h),
        (Model::Hda(h), Target::St) => Model::St(from_hda(&h)?.st),
        (Model::Hda(h), Target::Cfg) => Model::Cfg(from_hda(&h)?.st.to_configuration_structure()),
        (Model::St(st), Target::Hda) => Model::Hda(to_hda(&st)?),
        (Model::St(st), Target::St) => Model::St(st),
        (Model::St(st), Target::Cfg) => Model::Cfg(st.to_configuration_structure()),
        (Model::Cfg(cfg), Target::Hda) => Model::Hda(to_hda(&cfg.to_st_structure()?)?),
        (Model::Cfg(cfg), Target::St) => Model::St(cfg.to_st_structure()?),
        (Model::Cfg(cfg), Target::Cfg) => Model::Cfg(cfg),
    };
    let size = match &converted {
        Model::Hda(h) => h.len(),
        Model::St(st) => st.configs().len(),
        Model::Cfg(cfg) => cfg.configs().len(),
    };
    save_model(output, &converted)?;
    let unit = if converted.kind() == "hda" { "cells" } else { "configurations" };
    let text = format!("{from} -> {}: {size} {unit} written to {}\n", converted.kind(), output.display());
    let json = json!({ "from": from, "to": converted.kind(), "size": size, "output": output.display().to_string() });
    Ok(Outcome::new(EXIT_OK, text, json))
}

fn cmd_relations(path: &Path, at: Option<&str>) -> Result<Outcome, CliError> {
    let st = as_st(load_model(path)?)?;
    let c = match at {
        Some(t) => parse_config(&st, t)?,
        None => *st.configs().iter().max_by_key(|c| (c.s.len(), c.t.len())).expect("rooted structures are nonempty"),
    };
    if !st.contains(c) {
        return Err(StError::NotInStructure(st.format_config(c)).into());
    }
    let started: Vec<usize> = c.s.iter().collect();
    let name = |e: usize| st.events()[e].name.clone();
    let mut text = format!("relations at {}\n", st.format_config(c));
    let mut rows = Vec::new();
    for &e in &started {
        for &f in &started {
            if e == f {
                continue;
            }
            let conc = concurrency(&st, c, e, f)?;
            let before = causality(&st, c, e, f)?;
            let clash = conflict(&st, EventSet::singleton(e).with(f))?;
            let mut marks = Vec::new();
            if conc {
                marks.push("||");
            }
            if before {
                marks.push("<");
            }
            if clash {
                marks.push("#");
            }
            let _ = writeln!(
                text,
                "  {} {} {}",
                name(e),
                if marks.is_empty() { "-".into() } else { marks.join(" ") },
                name(f)
            );
            rows.push(
                json!({ "first": name(e), "second": name(f), "concurrent": conc, "causal": before, "conflict": clash }),
            );
        }
    }
    let all: BTreeSet<usize> = (0..st.events().len()).collect();
    let conflicting: Vec<Value> = all
        .iter()
        .flat_map(|&e| all.iter().filter(move |&&f| e < f).map(move |&f| (e, f)))
        .filter(|&(e, f)| conflict(&st, EventSet::singleton(e).with(f)).unwrap_or(false))
        .map(|(e, f)| json!([name(e), name(f)]))
        .collect();
    if !conflicting.is_empty() {
        let _ = writeln!(text, "conflicts in the structure:");
        for pair in &conflicting {
            let _ = writeln!(text, "  {} # {}", pair[0].as_str().unwrap_or(""), pair[1].as_str().unwrap_or(""));
        }
    }
    let json = json!({ "config": st.format_config(c), "pairs": rows, "conflicts": conflicting });
    Ok(Outcome::new(EXIT_OK, text, json))
}

fn report_json(r: &EntryReport) -> Value {
    json!({ "name": r.name, "passed": r.passed(), "well_formed": r.well_formed,
        "first_satisfies": r.first_satisfies, "second_satisfies": r.second_satisfies,
        "hh_equivalent": r.hh_equivalent, "millis": r.elapsed.as_millis() as u64 })
}

fn cmd_corpus(
    run_all: bool,
    entry: Option<&str>,
    export: Option<&Path>,
    load: Option<&Path>,
    budget: usize,
) -> Result<Outcome, CliError> {
    let mut text = String::new();
    if let Some(dir) = export {
        corpus::export(dir)?;
        let _ = writeln!(text, "corpus written to {}", dir.display());
    }
    let names: Vec<&str> = match entry {
        Some(n) => vec![n],
        None if run_all || export.is_none() => corpus::entries().iter().map(|e| e.name).collect(),
        None => Vec::new(),
    };
    let options = EquivOptions { budget, ..EquivOptions::default() };
    let mut reports = Vec::new();
    for name in names {
        let entry = match load {
            Some(dir) => corpus::load(dir, name)?,
            None => corpus::entry(name).ok_or_else(|| CliError::Usage(format!("no corpus entry `{name}`")))?,
        };
        let r = corpus::run_entry(&entry, &options)?;
        let hh = match r.hh_equivalent {
            Some(b) => yes(b).to_string(),
            None => "budget exceeded".to_string(),
        };
        let _ = writeln!(
            text,
            "{} {}: {} on E {}, on F {}; hh-equivalent {}; {:.0?}",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            entry.formula,
            yes(r.first_satisfies),
            yes(r.second_satisfies),
            hh,
            r.elapsed
        );
        reports.push(r);
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    if !reports.is_empty() {
        let _ = writeln!(text, "{passed}/{} entries pass", reports.len());
    }
    let code = if reports.iter().any(|r| r.hh_equivalent.is_none()) {
        EXIT_BUDGET
    } else if passed == reports.len() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let json = json!({ "passed": passed, "total": reports.len(), "entries": reports.iter().map(report_json).collect::<Vec<_>>() });
    Ok(Outcome::new(code, text, json))
}
