//! Paths through an automaton, their observable content, adjacency and
//! homotopy.
//!
//! A path `q^0 -> q^1 -> ... -> q^m` is a start cell followed by steps. Each
//! step either starts an event (`q^k = s_i(q^{k+1})`) or terminates one
//! (`q^{k+1} = t_i(q^k)`). Adjacency positions count the intermediate cells:
//! position `l` rewrites the two steps around `q^l`, for `1 <= l < m`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::hda::{event_labels, is_acyclic, is_cubical, CellId, Face, Hda, HdaError, Label};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Start,
    Terminate,
}

impl StepKind {
    pub fn face(self) -> Face {
        match self {
            StepKind::Start => Face::Source,
            StepKind::Terminate => Face::Target,
        }
    }

    fn sign(self) -> char {
        match self {
            StepKind::Start => '+',
            StepKind::Terminate => '-',
        }
    }
}

/// A label tagged with `+` when its event starts and `-` when it terminates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotatedLabel {
    pub label: Label,
    pub kind: StepKind,
}

impl AnnotatedLabel {
    pub fn new(label: impl Into<Label>, kind: StepKind) -> Self {
        AnnotatedLabel { label: label.into(), kind }
    }

    pub fn start(label: impl Into<Label>) -> Self {
        Self::new(label, StepKind::Start)
    }

    pub fn terminate(label: impl Into<Label>) -> Self {
        Self::new(label, StepKind::Terminate)
    }
}

impl fmt::Display for AnnotatedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.label, self.kind.sign())
    }
}

/// Renders a trace as whitespace-separated `a+`/`a-` tokens.
pub fn format_trace(trace: &[AnnotatedLabel]) -> String {
    let parts: Vec<String> = trace.iter().map(|a| format!("{a}")).collect();
    parts.join(" ")
}

/// Parses `a+ b+ a-`; the inverse of [`format_trace`].
pub fn parse_trace(text: &str) -> Result<Vec<AnnotatedLabel>, PathError> {
    text.split_whitespace()
        .map(|tok| {
            let (label, sign) = tok.split_at(tok.len() - tok.chars().last().map_or(0, char::len_utf8));
            let kind = match sign {
                "+" => StepKind::Start,
                "-" => StepKind::Terminate,
                _ => return Err(PathError::Syntax(format!("`{tok}` is not of the form a+ or a-"))),
            };
            if label.is_empty() {
                return Err(PathError::Syntax(format!("`{tok}` has no label")));
            }
            Ok(AnnotatedLabel::new(label, kind))
        })
        .collect()
}

/// One step `from -> to`. For a start `from = s_index(to)`, for a
/// termination `to = t_index(from)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub from: CellId,
    pub to: CellId,
    pub kind: StepKind,
    pub index: usize,
    pub label: Label,
}

impl Step {
    pub fn annotated(&self) -> AnnotatedLabel {
        AnnotatedLabel::new(self.label.clone(), self.kind)
    }

    /// The higher of the two cells, whose `index`-th event moves.
    pub fn higher(&self) -> CellId {
        match self.kind {
            StepKind::Start => self.to,
            StepKind::Terminate => self.from,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HdaPath {
    start: CellId,
    steps: Vec<Step>,
}

impl HdaPath {
    pub fn empty(start: CellId) -> Self {
        HdaPath { start, steps: Vec::new() }
    }

    /// Joins `steps` onto `start`, checking that consecutive steps compose.
    pub fn from_steps(start: CellId, steps: Vec<Step>) -> Result<Self, PathError> {
        let mut at = start;
        for (k, step) in steps.iter().enumerate() {
            if step.from != at {
                return Err(PathError::NotComposable { position: k });
            }
            at = step.to;
        }
        Ok(HdaPath { start, steps })
    }

    pub fn start(&self) -> CellId {
        self.start
    }

    pub fn end(&self) -> CellId {
        self.steps.last().map_or(self.start, |s| s.to)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// `q^0, ..., q^m`.
    pub fn cells(&self) -> Vec<CellId> {
        core::iter::once(self.start).chain(self.steps.iter().map(|s| s.to)).collect()
    }

    /// This path followed by `step`.
    pub fn extended(&self, step: Step) -> Result<Self, PathError> {
        if step.from != self.end() {
            return Err(PathError::NotComposable { position: self.len() });
        }
        let mut steps = self.steps.clone();
        steps.push(step);
        Ok(HdaPath { start: self.start, steps })
    }

    /// The first `len` steps.
    pub fn prefix(&self, len: usize) -> Self {
        HdaPath { start: self.start, steps: self.steps[..len.min(self.len())].to_vec() }
    }

    /// Writes the path as its start cell followed by `s<i>:<cell>` for starts
    /// and `t<i>` for terminations, using cell names. Starts name their
    /// target because several cells may share the same `i`-th source.
    pub fn encode(&self, hda: &Hda) -> String {
        let mut out = String::from(hda.name(self.start));
        for step in &self.steps {
            match step.kind {
                StepKind::Start => out.push_str(&format!(" s{}:{}", step.index, hda.name(step.to))),
                StepKind::Terminate => out.push_str(&format!(" t{}", step.index)),
            }
        }
        out
    }

    /// Reads the format written by [`HdaPath::encode`] and checks it against
    /// the model.
    pub fn decode(hda: &Hda, text: &str) -> Result<Self, PathError> {
        let mut tokens = text.split_whitespace();
        let first = tokens.next().ok_or_else(|| PathError::Syntax("empty path".into()))?;
        let lookup =
            |name: &str| hda.cell_by_name(name).ok_or_else(|| PathError::Syntax(format!("unknown cell `{name}`")));
        let start = lookup(first)?;
        let mut path = HdaPath::empty(start);
        for tok in tokens {
            let at = path.end();
            let (kind, rest) = if let Some(rest) = tok.strip_prefix('s') {
                (StepKind::Start, rest)
            } else if let Some(rest) = tok.strip_prefix('t') {
                (StepKind::Terminate, rest)
            } else {
                return Err(PathError::Syntax(format!("bad step `{tok}`")));
            };
            let (index, target) = match kind {
                StepKind::Start => {
                    let (i, name) = rest
                        .split_once(':')
                        .ok_or_else(|| PathError::Syntax(format!("start step `{tok}` needs a target cell")))?;
                    (i, Some(lookup(name)?))
                }
                StepKind::Terminate => (rest, None),
            };
            let index: usize = index.parse().map_err(|_| PathError::Syntax(format!("bad index in `{tok}`")))?;
            let to = match target {
                Some(to) => to,
                None => hda.try_face(at, Face::Target, index).ok_or(PathError::InvalidStep { position: path.len() })?,
            };
            let step = make_step(hda, at, to, kind, index).ok_or(PathError::InvalidStep { position: path.len() })?;
            path.steps.push(step);
        }
        Ok(path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error(transparent)]
    Hda(#[from] HdaError),
    #[error("step {position} does not start where the previous one ends")]
    NotComposable { position: usize },
    #[error("step {position} is not a face map of the model")]
    InvalidStep { position: usize },
    #[error("position {position} is outside 1..{len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("more than one adjacent path at position {position}")]
    AmbiguousAdjacency { position: usize },
    #[error("the model has a cycle; give a length bound")]
    Cyclic,
    #[error("the model is not cubical")]
    NonCubical,
    #[error("cell {0} is not reachable from an initial cell")]
    Unreachable(CellId),
    #[error("{0}")]
    Syntax(String),
}

/// Builds the step `from -> to` if `to`/`from` is the `index`-th face of
/// the other, with its label.
fn make_step(hda: &Hda, from: CellId, to: CellId, kind: StepKind, index: usize) -> Option<Step> {
    let (higher, lower) = match kind {
        StepKind::Start => (to, from),
        StepKind::Terminate => (from, to),
    };
    if !hda.contains(higher) || hda.try_face(higher, kind.face(), index) != Some(lower) {
        return None;
    }
    let label = event_labels(hda, higher).ok()?.get(index - 1)?.clone();
    Some(Step { from, to, kind, index, label })
}

/// Outgoing steps of every cell, with labels resolved once.
#[derive(Clone, Debug)]
pub struct StepGraph {
    out: Vec<Vec<Step>>,
}

impl StepGraph {
    pub fn new(hda: &Hda) -> Result<Self, PathError> {
        let mut labels = Vec::with_capacity(hda.len());
        for q in hda.cell_ids() {
            labels.push(if hda.dim(q) == 0 { Vec::new() } else { event_labels(hda, q)? });
        }
        let out = hda
            .cell_ids()
            .map(|q| {
                let mut steps: Vec<Step> = hda
                    .cofaces(q)
                    .iter()
                    .filter(|(f, _, _)| *f == Face::Source)
                    .map(|&(_, i, up)| Step {
                        from: q,
                        to: up,
                        kind: StepKind::Start,
                        index: i,
                        label: labels[up.index()][i - 1].clone(),
                    })
                    .collect();
                for (k, &down) in hda.cell(q).targets.iter().enumerate() {
                    if hda.contains(down) {
                        steps.push(Step {
                            from: q,
                            to: down,
                            kind: StepKind::Terminate,
                            index: k + 1,
                            label: labels[q.index()][k].clone(),
                        });
                    }
                }
                steps.sort();
                steps
            })
            .collect();
        Ok(StepGraph { out })
    }

    pub fn steps_from(&self, q: CellId) -> &[Step] {
        &self.out[q.index()]
    }
}

/// Checks that every step of `path` is a face map of `hda` carrying the
/// right label.
pub fn check_path(hda: &Hda, path: &HdaPath) -> Result<(), PathError> {
    hda.check(path.start)?;
    let mut at = path.start;
    for (k, step) in path.steps.iter().enumerate() {
        if step.from != at {
            return Err(PathError::NotComposable { position: k });
        }
        match make_step(hda, step.from, step.to, step.kind, step.index) {
            Some(ok) if ok == *step => {}
            _ => return Err(PathError::InvalidStep { position: k }),
        }
        at = step.to;
    }
    Ok(())
}

/// Every one-step extension of `path`, sorted.
pub fn extensions(hda: &Hda, path: &HdaPath) -> Result<Vec<(AnnotatedLabel, HdaPath)>, PathError> {
    check_path(hda, path)?;
    let end = path.end();
    let mut out: Vec<(AnnotatedLabel, HdaPath)> = Vec::new();
    for &(face, i, up) in hda.cofaces(end) {
        if face == Face::Source {
            let step =
                make_step(hda, end, up, StepKind::Start, i).ok_or(PathError::InvalidStep { position: path.len() })?;
            out.push((step.annotated(), path.extended(step)?));
        }
    }
    for i in 1..=hda.dim(end) {
        let down = hda.try_face(end, Face::Target, i).ok_or(HdaError::Malformed(end))?;
        let step =
            make_step(hda, end, down, StepKind::Terminate, i).ok_or(PathError::InvalidStep { position: path.len() })?;
        out.push((step.annotated(), path.extended(step)?));
    }
    out.sort();
    Ok(out)
}

pub fn observable_trace(path: &HdaPath) -> Vec<AnnotatedLabel> {
    path.steps.iter().map(Step::annotated).collect()
}

/// All paths obtained from `path` by one replacement rule at position `l`.
/// On cubical models there is at most one.
pub fn adjacency_candidates(hda: &Hda, path: &HdaPath, l: usize) -> Result<Vec<HdaPath>, PathError> {
    let m = path.len();
    if l == 0 || l >= m {
        return Err(PathError::PositionOutOfRange { position: l, len: m });
    }
    check_path(hda, path)?;
    let first = &path.steps[l - 1];
    let second = &path.steps[l];
    let x = first.from;
    let y = second.to;
    let (a, b) = (first.index, second.index);

    // (kind, index) pairs for the two new steps and the new middle cell
    let mut plans: Vec<(StepKind, usize, CellId, StepKind, usize)> = Vec::new();
    let face = |q: CellId, f: Face, i: usize| hda.try_face(q, f, i);
    use StepKind::{Start as S, Terminate as T};
    match (first.kind, second.kind) {
        (S, S) => {
            let (i1, i2, via) = if a < b { (b - 1, a, a) } else { (b, a + 1, a + 1) };
            if let Some(mid) = face(y, Face::Source, via) {
                plans.push((S, i1, mid, S, i2));
            }
        }
        (T, T) => {
            let (i1, i2) = if a > b { (b, a - 1) } else { (b + 1, a) };
            if let Some(mid) = face(x, Face::Target, i1) {
                plans.push((T, i1, mid, T, i2));
            }
        }
        (S, T) => {
            let plan = match a.cmp(&b) {
                core::cmp::Ordering::Less => Some((b - 1, a)),
                core::cmp::Ordering::Greater => Some((b, a - 1)),
                core::cmp::Ordering::Equal => None,
            };
            if let Some((i1, i2)) = plan {
                if let Some(mid) = face(x, Face::Target, i1) {
                    plans.push((T, i1, mid, S, i2));
                }
            }
        }
        (T, S) => {
            let mut shapes = Vec::new();
            if b <= a {
                shapes.push((b, a + 1));
            }
            if a <= b {
                shapes.push((b + 1, a));
            }
            for (i1, i2) in shapes {
                for &(f, i, z) in hda.cofaces(x) {
                    if f == Face::Source && i == i1 && face(z, Face::Target, i2) == Some(y) {
                        plans.push((S, i1, z, T, i2));
                    }
                }
            }
        }
    }

    let mut out = Vec::new();
    for (k1, i1, mid, k2, i2) in plans {
        let (Some(s1), Some(s2)) = (make_step(hda, x, mid, k1, i1), make_step(hda, mid, y, k2, i2)) else {
            continue;
        };
        let mut steps = path.steps.clone();
        steps[l - 1] = s1;
        steps[l] = s2;
        out.push(HdaPath { start: path.start, steps });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The path `l`-adjacent to `path`, if a replacement rule applies at `l`.
pub fn l_adjacent(hda: &Hda, path: &HdaPath, l: usize) -> Result<Option<HdaPath>, PathError> {
    let mut found = adjacency_candidates(hda, path, l)?;
    if found.len() > 1 {
        return Err(PathError::AmbiguousAdjacency { position: l });
    }
    Ok(found.pop())
}

/// All paths from an initial cell, of length at most `bound` when given.
pub fn enumerate_rooted_paths(hda: &Hda, bound: Option<usize>) -> Result<Vec<HdaPath>, PathError> {
    if bound.is_none() && !is_acyclic(hda) {
        return Err(PathError::Cyclic);
    }
    let graph = StepGraph::new(hda)?;
    let mut out = Vec::new();
    let mut roots: Vec<CellId> = hda.initial().to_vec();
    roots.sort();
    roots.dedup();
    for root in roots {
        hda.check(root)?;
        let mut stack = alloc::vec![HdaPath::empty(root)];
        while let Some(path) = stack.pop() {
            if bound.is_none_or(|b| path.len() < b) {
                for step in graph.steps_from(path.end()).iter().rev() {
                    let mut steps = path.steps.clone();
                    steps.push(step.clone());
                    stack.push(HdaPath { start: path.start, steps });
                }
            }
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Every path reachable from `path` by repeated adjacency.
pub fn homotopy_class(hda: &Hda, path: &HdaPath) -> Result<BTreeSet<HdaPath>, PathError> {
    check_path(hda, path)?;
    let mut seen = BTreeSet::new();
    seen.insert(path.clone());
    let mut queue = VecDeque::from([path.clone()]);
    while let Some(p) = queue.pop_front() {
        for l in 1..p.len() {
            if let Some(next) = l_adjacent(hda, &p, l)? {
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen)
}

/// The rooted paths ending in `q`, partitioned into homotopy classes. Each
/// class is a history of `q`.
pub fn homotopy_classes(hda: &Hda, q: CellId) -> Result<Vec<BTreeSet<HdaPath>>, PathError> {
    hda.check(q)?;
    match is_cubical(hda) {
        Err(HdaError::Cyclic) => return Err(PathError::Cyclic),
        Err(e) => return Err(e.into()),
        Ok(false) => return Err(PathError::NonCubical),
        Ok(true) => {}
    }
    let ending: Vec<HdaPath> = enumerate_rooted_paths(hda, None)?.into_iter().filter(|p| p.end() == q).collect();
    if ending.is_empty() {
        return Err(PathError::Unreachable(q));
    }
    let mut class_of: BTreeMap<HdaPath, usize> = BTreeMap::new();
    let mut classes = Vec::new();
    for p in ending {
        if class_of.contains_key(&p) {
            continue;
        }
        let class = homotopy_class(hda, &p)?;
        for member in &class {
            class_of.insert(member.clone(), classes.len());
        }
        classes.push(class);
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::*;
    use crate::hda::fixtures::{filled_square, hollow_square};
    use crate::hda::make_hypercube;

    fn path(hda: &Hda, text: &str) -> HdaPath {
        HdaPath::decode(hda, text).unwrap()
    }

    fn trace(p: &HdaPath) -> String {
        format_trace(&observable_trace(p))
    }

    /// Walks valuations in `{0, 1, 2}^n` directly: each move advances one
    /// event from not started to executing or from executing to done.
    fn count_walks(n: usize, allowed: &dyn Fn(&[u8]) -> bool) -> usize {
        fn go(v: &mut Vec<u8>, allowed: &dyn Fn(&[u8]) -> bool) -> usize {
            let mut total = 1;
            for k in 0..v.len() {
                if v[k] < 2 {
                    v[k] += 1;
                    if allowed(v) {
                        total += go(v, allowed);
                    }
                    v[k] -= 1;
                }
            }
            total
        }
        go(&mut vec![0; n], allowed)
    }

    #[test]
    fn rooted_path_counts_match_valuation_walks() {
        let filled = enumerate_rooted_paths(&filled_square(), None).unwrap();
        assert_eq!(filled.len(), count_walks(2, &|_| true));
        assert_eq!(filled.len(), 19);
        let hollow = enumerate_rooted_paths(&hollow_square(), None).unwrap();
        assert_eq!(hollow.len(), count_walks(2, &|v| v != [1, 1]));
        assert_eq!(hollow.len(), 9);
        let cube = make_hypercube(&["a", "b", "c"]).unwrap();
        assert_eq!(enumerate_rooted_paths(&cube, None).unwrap().len(), count_walks(3, &|_| true));
    }

    #[test]
    fn single_state_has_only_the_empty_path() {
        let hda = crate::HdaBuilder::new().state("x").initial("x").build().unwrap();
        assert_eq!(enumerate_rooted_paths(&hda, None).unwrap(), vec![HdaPath::empty(CellId(0))]);
    }

    #[test]
    fn bound_limits_length_and_allows_cycles() {
        let looped = crate::HdaBuilder::new()
            .states(&["x", "y"])
            .transition("go", "x", "y", "a")
            .transition("back", "y", "x", "b")
            .initial("x")
            .build()
            .unwrap();
        assert_eq!(enumerate_rooted_paths(&looped, None), Err(PathError::Cyclic));
        let bounded = enumerate_rooted_paths(&looped, Some(4)).unwrap();
        assert_eq!(bounded.len(), 5);
        assert!(bounded.iter().all(|p| p.len() <= 4));
    }

    #[test]
    fn extensions_from_the_initial_corner() {
        let sq = filled_square();
        let root = HdaPath::empty(sq.cell_by_name("q01").unwrap());
        let ext = extensions(&sq, &root).unwrap();
        let targets: BTreeSet<&str> = ext.iter().map(|(_, p)| sq.name(p.end())).collect();
        assert_eq!(targets, ["bottom", "left"].into());
        let labels: Vec<String> = ext.iter().map(|(a, _)| format!("{a}")).collect();
        assert_eq!(labels, ["a+", "b+"]);
    }

    #[test]
    fn no_extensions_at_the_final_corner() {
        let sq = filled_square();
        let end = HdaPath::empty(sq.cell_by_name("q03").unwrap());
        assert!(extensions(&sq, &end).unwrap().is_empty());
    }

    #[test]
    fn hollow_square_cannot_start_b_during_a() {
        let h = hollow_square();
        let p = path(&h, "q01 s1:bottom");
        let ext = extensions(&h, &p).unwrap();
        assert_eq!(ext.len(), 1);
        assert_eq!(format!("{}", ext[0].0), "a-");
    }

    #[test]
    fn traces() {
        let sq = filled_square();
        assert!(observable_trace(&HdaPath::empty(CellId(0))).is_empty());
        let through = path(&sq, "q01 s1:bottom s2:q2 t1 t1");
        assert_eq!(trace(&through), "a+ b+ a- b-");
        let h = hollow_square();
        assert_eq!(trace(&path(&h, "q01 s1:left t1 s1:top t1")), "b+ b- a+ a-");
        assert_eq!(parse_trace("b+ b- a+ a-").unwrap(), observable_trace(&path(&h, "q01 s1:left t1 s1:top t1")));
        assert!(parse_trace("a").is_err());
    }

    #[test]
    fn encode_decode_round_trip() {
        let sq = filled_square();
        for p in enumerate_rooted_paths(&sq, None).unwrap() {
            assert_eq!(HdaPath::decode(&sq, &p.encode(&sq)).unwrap(), p);
        }
        assert!(matches!(HdaPath::decode(&sq, "q01 t1"), Err(PathError::InvalidStep { position: 0 })));
        assert!(matches!(HdaPath::decode(&sq, "q01 s1"), Err(PathError::Syntax(_))));
        assert!(matches!(HdaPath::decode(&sq, "nowhere"), Err(PathError::Syntax(_))));
    }

    #[test]
    fn swapping_two_starts_in_the_square() {
        let sq = filled_square();
        let ab = path(&sq, "q01 s1:bottom s2:q2");
        let ba = l_adjacent(&sq, &ab, 1).unwrap().unwrap();
        assert_eq!(ba, path(&sq, "q01 s1:left s1:q2"));
        assert_eq!(trace(&ba), "b+ a+");
        assert_eq!(l_adjacent(&sq, &ba, 1).unwrap(), Some(ab));
    }

    #[test]
    fn hollow_square_has_no_adjacency() {
        let h = hollow_square();
        for p in enumerate_rooted_paths(&h, None).unwrap() {
            for l in 1..p.len() {
                assert_eq!(l_adjacent(&h, &p, l).unwrap(), None);
            }
        }
    }

    #[test]
    fn position_out_of_range() {
        let sq = filled_square();
        let p = path(&sq, "q01 s1:bottom t1");
        assert_eq!(l_adjacent(&sq, &p, 0), Err(PathError::PositionOutOfRange { position: 0, len: 2 }));
        assert_eq!(l_adjacent(&sq, &p, 2), Err(PathError::PositionOutOfRange { position: 2, len: 2 }));
    }

    #[test]
    fn homotopy_in_the_square() {
        let sq = filled_square();
        let q03 = sq.cell_by_name("q03").unwrap();
        let classes = homotopy_classes(&sq, q03).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].len(), 6);
        let a_first = path(&sq, "q01 s1:bottom t1 s1:right t1");
        let b_first = path(&sq, "q01 s1:left t1 s1:top t1");
        assert!(classes[0].contains(&a_first) && classes[0].contains(&b_first));

        let h = hollow_square();
        let classes = homotopy_classes(&h, h.cell_by_name("q03").unwrap()).unwrap();
        assert_eq!(classes.len(), 2);
        assert!(classes.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn homotopy_of_the_root_and_unreachable_cells() {
        let sq = filled_square();
        let q01 = sq.cell_by_name("q01").unwrap();
        assert_eq!(homotopy_classes(&sq, q01).unwrap(), vec![BTreeSet::from([HdaPath::empty(q01)])]);
        let lone = crate::HdaBuilder::new().states(&["x", "y"]).initial("x").build().unwrap();
        assert_eq!(homotopy_classes(&lone, CellId(1)), Err(PathError::Unreachable(CellId(1))));
    }

    #[test]
    fn every_rule_fires_in_the_cube() {
        let cube = make_hypercube(&["a", "b", "c"]).unwrap();
        let mut fired = BTreeSet::new();
        for p in enumerate_rooted_paths(&cube, None).unwrap() {
            for l in 1..p.len() {
                let found = adjacency_candidates(&cube, &p, l).unwrap();
                assert!(found.len() <= 1);
                if let Some(q) = found.first() {
                    let (a, b) = (&p.steps[l - 1], &p.steps[l]);
                    fired.insert((a.kind, b.kind, a.index.cmp(&b.index)));
                    assert_eq!(l_adjacent(&cube, q, l).unwrap().as_ref(), Some(&p));
                    assert_eq!((q.start(), q.end()), (p.start(), p.end()));
                    let mut t1 = observable_trace(&p);
                    let mut t2 = observable_trace(q);
                    t1.sort();
                    t2.sort();
                    assert_eq!(t1, t2);
                } else {
                    // only starting and then terminating the same event is rigid
                    let (a, b) = (&p.steps[l - 1], &p.steps[l]);
                    assert_eq!((a.kind, b.kind, a.index), (StepKind::Start, StepKind::Terminate, b.index));
                }
            }
        }
        use core::cmp::Ordering::*;
        use StepKind::*;
        for shape in [
            (Start, Start, Less),
            (Start, Start, Greater),
            (Start, Start, Equal),
            (Terminate, Terminate, Less),
            (Terminate, Terminate, Greater),
            (Terminate, Terminate, Equal),
            (Start, Terminate, Less),
            (Start, Terminate, Greater),
            (Terminate, Start, Less),
            (Terminate, Start, Greater),
            (Terminate, Start, Equal),
        ] {
            assert!(fired.contains(&shape), "{shape:?}");
        }
    }
}
