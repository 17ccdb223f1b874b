use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::fixpoint::{failure_chain, solve, Obligation};
use super::{model_name, EquivOptions, EquivalenceError, EquivalenceVerdict, RefutationStep};
use crate::hda::{is_acyclic, is_cubical, validate, CellId, Hda};
use crate::paths::{extensions, l_adjacent, AnnotatedLabel, HdaPath, Step, StepGraph};

/// A move on one path of a related pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HdaMove {
    /// Append a step.
    Extend(Step),
    /// Drop the last step.
    Retract(Step),
    /// Replace the steps around a position by the adjacent ones.
    Swap(usize),
}

pub type HdaVerdict = EquivalenceVerdict<(HdaPath, HdaPath), HdaMove>;

/// Every rooted path of one model, with its one-step moves as indices.
struct Arena {
    paths: Vec<HdaPath>,
    trace: Vec<u32>,
    parent: Vec<Option<u32>>,
    children: Vec<Vec<u32>>,
    /// `adjacent[p][l - 1]` is the path `l`-adjacent to `p`.
    adjacent: Vec<Vec<Option<u32>>>,
}

/// Interns traces as (prefix trace, last label) chains.
#[derive(Default)]
struct Traces {
    ids: HashMap<(u32, AnnotatedLabel), u32>,
}

const EMPTY_TRACE: u32 = 0;

impl Traces {
    fn extend(&mut self, prefix: u32, label: AnnotatedLabel) -> u32 {
        let next = self.ids.len() as u32 + 1;
        *self.ids.entry((prefix, label)).or_insert(next)
    }
}

fn check_model(hda: &Hda, root: CellId, second: bool) -> Result<(), EquivalenceError> {
    hda.check(root)?;
    let model = model_name(second);
    if !validate(hda).violations.is_empty() {
        return Err(EquivalenceError::Precondition { model, property: "a valid automaton" });
    }
    if !is_acyclic(hda) {
        return Err(EquivalenceError::Precondition { model, property: "acyclic" });
    }
    if !is_cubical(hda)? {
        return Err(EquivalenceError::Precondition { model, property: "cubical" });
    }
    Ok(())
}

impl Arena {
    fn build(hda: &Hda, root: CellId, traces: &mut Traces, budget: usize) -> Result<Self, EquivalenceError> {
        let graph = StepGraph::new(hda)?;
        let mut paths = Vec::new();
        let mut stack = vec![HdaPath::empty(root)];
        while let Some(path) = stack.pop() {
            if paths.len() >= budget {
                return Err(EquivalenceError::BudgetExceeded { budget });
            }
            for step in graph.steps_from(path.end()) {
                stack.push(path.extended(step.clone())?);
            }
            paths.push(path);
        }
        paths.sort();
        let index: HashMap<&HdaPath, u32> = paths.iter().enumerate().map(|(k, p)| (p, k as u32)).collect();

        let n = paths.len();
        let mut trace = vec![EMPTY_TRACE; n];
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut adjacent = Vec::with_capacity(n);
        // sorted order puts every prefix before its extensions
        for (k, path) in paths.iter().enumerate() {
            if let Some(last) = path.steps().last() {
                let up = index[&path.prefix(path.len() - 1)];
                parent[k] = Some(up);
                children[up as usize].push(k as u32);
                trace[k] = traces.extend(trace[up as usize], last.annotated());
            }
            let mut adj = Vec::with_capacity(path.len().saturating_sub(1));
            for l in 1..path.len() {
                adj.push(l_adjacent(hda, path, l)?.map(|other| index[&other]));
            }
            adjacent.push(adj);
        }
        drop(index);
        Ok(Arena { paths, trace, parent, children, adjacent })
    }
}

/// Which path of the pair a compact move acts on, and how.
#[derive(Clone, Copy, Debug)]
enum Compact {
    Child(u32),
    Parent,
    Swap(u32),
}

/// Decides whether `(first, first_root)` and `(second, second_root)` are
/// hh-bisimilar.
pub fn hh_bisim_hda(
    first: &Hda,
    first_root: CellId,
    second: &Hda,
    second_root: CellId,
    options: &EquivOptions,
) -> Result<HdaVerdict, EquivalenceError> {
    check_model(first, first_root, false)?;
    check_model(second, second_root, true)?;
    let mut traces = Traces::default();
    let a = Arena::build(first, first_root, &mut traces, options.budget)?;
    let b = Arena::build(second, second_root, &mut traces, options.budget)?;

    let mut by_trace: HashMap<u32, Vec<u32>> = HashMap::new();
    for (j, &t) in b.trace.iter().enumerate() {
        by_trace.entry(t).or_default().push(j as u32);
    }
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (i, t) in a.trace.iter().enumerate() {
        for &j in by_trace.get(t).map_or(&[][..], Vec::as_slice) {
            if pairs.len() >= options.budget {
                return Err(EquivalenceError::BudgetExceeded { budget: options.budget });
            }
            pairs.push((i as u32, j));
        }
    }
    let pair_id: HashMap<(u32, u32), u32> = pairs.iter().enumerate().map(|(k, &p)| (p, k as u32)).collect();
    let pair = |i: u32, j: u32| pair_id.get(&(i, j)).copied();

    let mut obligations: Vec<Vec<Obligation<Compact>>> = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let mut obs = Vec::new();
        for &i2 in &a.children[i as usize] {
            let candidates = b.children[j as usize].iter().filter_map(|&j2| pair(i2, j2)).collect();
            obs.push(Obligation { condition: 1, movement: Compact::Child(i2), candidates });
        }
        for &j2 in &b.children[j as usize] {
            let candidates = a.children[i as usize].iter().filter_map(|&i2| pair(i2, j2)).collect();
            obs.push(Obligation { condition: 2, movement: Compact::Child(j2), candidates });
        }
        let (adj_a, adj_b) = (&a.adjacent[i as usize], &b.adjacent[j as usize]);
        for (l, (&x, &y)) in adj_a.iter().zip(adj_b).enumerate() {
            let answer = match (x, y) {
                (Some(i2), Some(j2)) => pair(i2, j2),
                _ => None,
            };
            for (condition, moved) in [(3, x), (4, y)] {
                if moved.is_some() {
                    let candidates = answer.into_iter().collect();
                    obs.push(Obligation { condition, movement: Compact::Swap(l as u32 + 1), candidates });
                }
            }
        }
        if let (Some(i2), Some(j2)) = (a.parent[i as usize], b.parent[j as usize]) {
            let candidates: Vec<u32> = pair(i2, j2).into_iter().collect();
            obs.push(Obligation { condition: 5, movement: Compact::Parent, candidates: candidates.clone() });
            obs.push(Obligation { condition: 6, movement: Compact::Parent, candidates });
        }
        obligations.push(obs);
    }

    let fix = solve(&obligations);
    let root = pair(0, 0).expect("empty paths share the empty trace");
    let as_paths = |x: u32| {
        let (i, j) = pairs[x as usize];
        (a.paths[i as usize].clone(), b.paths[j as usize].clone())
    };

    if fix.alive(root) {
        let witness: Vec<(HdaPath, HdaPath)> =
            (0..pairs.len() as u32).filter(|&x| fix.alive(x)).map(as_paths).collect();
        let violations = audit_hda_witness(first, second, &witness)?.len();
        if violations > 0 {
            return Err(EquivalenceError::AuditFailed { violations });
        }
        return Ok(EquivalenceVerdict::Equivalent { witness });
    }

    let refutation = failure_chain(&obligations, &fix, root)
        .into_iter()
        .map(|(x, k)| {
            let ob = &obligations[x as usize][k as usize];
            let at = as_paths(x);
            let moved = if ob.condition % 2 == 1 { &at.0 } else { &at.1 };
            let arena = if ob.condition % 2 == 1 { &a } else { &b };
            let movement = match ob.movement {
                Compact::Child(c) => HdaMove::Extend(arena.paths[c as usize].steps().last().expect("child").clone()),
                Compact::Parent => HdaMove::Retract(moved.steps().last().expect("nonempty").clone()),
                Compact::Swap(l) => HdaMove::Swap(l as usize),
            };
            RefutationStep { condition: ob.condition, in_second: ob.condition.is_multiple_of(2), at, movement }
        })
        .collect();
    Ok(EquivalenceVerdict::Inequivalent { refutation })
}

/// The moves of a path: its extensions, its prefix and its adjacent paths,
/// each with the path reached.
fn moves(hda: &Hda, path: &HdaPath) -> Result<Vec<(HdaMove, HdaPath)>, EquivalenceError> {
    let mut out = Vec::new();
    for (_, next) in extensions(hda, path)? {
        let step = next.steps().last().expect("extension").clone();
        out.push((HdaMove::Extend(step), next));
    }
    if let Some(last) = path.steps().last() {
        out.push((HdaMove::Retract(last.clone()), path.prefix(path.len() - 1)));
    }
    for l in 1..path.len() {
        if let Some(next) = l_adjacent(hda, path, l)? {
            out.push((HdaMove::Swap(l), next));
        }
    }
    Ok(out)
}

/// The answers to `movement` available from `path`: same annotated label
/// for extensions and retractions, same position for swaps.
fn answers(hda: &Hda, path: &HdaPath, movement: &HdaMove) -> Result<Vec<HdaPath>, EquivalenceError> {
    Ok(match movement {
        HdaMove::Extend(step) => extensions(hda, path)?
            .into_iter()
            .filter(|(label, _)| *label == step.annotated())
            .map(|(_, next)| next)
            .collect(),
        HdaMove::Retract(step) => match path.steps().last() {
            Some(last) if last.annotated() == step.annotated() => vec![path.prefix(path.len() - 1)],
            _ => Vec::new(),
        },
        HdaMove::Swap(l) if *l < path.len() => l_adjacent(hda, path, *l)?.into_iter().collect(),
        HdaMove::Swap(_) => Vec::new(),
    })
}

/// Rechecks the six closure conditions over a relation from scratch and
/// returns the failures as `(condition, pair index)`.
pub fn audit_hda_witness(
    first: &Hda,
    second: &Hda,
    witness: &[(HdaPath, HdaPath)],
) -> Result<Vec<(u8, usize)>, EquivalenceError> {
    let related: BTreeSet<(&HdaPath, &HdaPath)> = witness.iter().map(|(p, q)| (p, q)).collect();
    let mut failures = Vec::new();
    for (k, (p, q)) in witness.iter().enumerate() {
        for (mover, other, flip) in [(first, second, false), (second, first, true)] {
            let (from, to) = if flip { (q, p) } else { (p, q) };
            for (movement, next) in moves(mover, from)? {
                let condition = match movement {
                    HdaMove::Extend(_) => 1,
                    HdaMove::Swap(_) => 3,
                    HdaMove::Retract(_) => 5,
                } + u8::from(flip);
                let answered = answers(other, to, &movement)?.iter().any(|reply| {
                    let pair = if flip { (reply, &next) } else { (&next, reply) };
                    related.contains(&pair)
                });
                if !answered {
                    failures.push((condition, k));
                }
            }
        }
    }
    Ok(failures)
}

/// Replays a refutation on both models: each link's move must be possible,
/// the next link must pair its result with an answer, and the last move must
/// have no answer with the same trace.
pub fn replay_hda_refutation(
    first: &Hda,
    second: &Hda,
    refutation: &[RefutationStep<(HdaPath, HdaPath), HdaMove>],
) -> Result<bool, EquivalenceError> {
    let Some(head) = refutation.first() else {
        return Ok(false);
    };
    if !head.at.0.is_empty() || !head.at.1.is_empty() {
        return Ok(false);
    }
    for (k, link) in refutation.iter().enumerate() {
        let flip = link.in_second;
        let (mover, other) = if flip { (second, first) } else { (first, second) };
        let (from, to) = if flip { (&link.at.1, &link.at.0) } else { (&link.at.0, &link.at.1) };
        if from.steps().iter().map(Step::annotated).ne(to.steps().iter().map(Step::annotated)) {
            return Ok(false);
        }
        let Some((_, moved)) = moves(mover, from)?.into_iter().find(|(m, _)| *m == link.movement) else {
            return Ok(false);
        };
        let same_trace =
            |reply: &HdaPath| reply.steps().iter().map(Step::annotated).eq(moved.steps().iter().map(Step::annotated));
        let replies: Vec<HdaPath> = answers(other, to, &link.movement)?.into_iter().filter(same_trace).collect();
        match refutation.get(k + 1) {
            Some(next) => {
                let (n_from, n_to) = if flip { (&next.at.1, &next.at.0) } else { (&next.at.0, &next.at.1) };
                if *n_from != moved || !replies.contains(n_to) {
                    return Ok(false);
                }
            }
            None => return Ok(replies.is_empty()),
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hda::fixtures::{filled_square, hollow_square};
    use crate::hda::{carve, make_hypercube, HdaBuilder};

    fn decide(a: &Hda, b: &Hda) -> HdaVerdict {
        hh_bisim_hda(a, a.initial()[0], b, b.initial()[0], &EquivOptions::default()).unwrap()
    }

    #[test]
    fn squares_differ_by_concurrency() {
        let (e, f) = (filled_square(), hollow_square());
        let v = decide(&e, &f);
        let chain = v.refutation().unwrap();
        assert!(replay_hda_refutation(&e, &f, chain).unwrap());
        // start one edge, then the other cannot be started in the hollow square
        let last = chain.last().unwrap();
        assert_eq!(last.condition, 1);
        assert!(matches!(&last.movement, HdaMove::Extend(s) if s.kind == crate::paths::StepKind::Start));
        assert_eq!(last.at.0.len(), 1);

        let back = decide(&f, &e);
        assert!(!back.is_equivalent());
        assert_eq!(back.refutation().unwrap().last().unwrap().condition, 2);
    }

    #[test]
    fn every_model_is_equivalent_to_itself() {
        for h in [filled_square(), hollow_square(), make_hypercube(&["a", "b", "c"]).unwrap()] {
            let v = decide(&h, &h);
            let witness = v.witness().unwrap();
            assert!(witness.iter().any(|(p, q)| p.is_empty() && q.is_empty()));
            assert!(audit_hda_witness(&h, &h, witness).unwrap().is_empty());
            // the identity is contained in the greatest bisimulation
            assert!(enumerate_rooted(&h).iter().all(|p| witness.contains(&(p.clone(), p.clone()))));
        }
    }

    fn enumerate_rooted(h: &Hda) -> Vec<HdaPath> {
        crate::paths::enumerate_rooted_paths(h, None).unwrap()
    }

    #[test]
    fn isomorphic_copies_are_equivalent() {
        let mut b = HdaBuilder::new();
        b.states(&["x", "y", "z", "w"])
            .transition("p", "x", "y", "b")
            .transition("q", "x", "z", "a")
            .transition("r", "y", "w", "a")
            .transition("u", "z", "w", "b")
            .cell("sq", &["q", "p"], &["r", "u"])
            .initial("x");
        let copy = b.build().unwrap();
        assert!(decide(&filled_square(), &copy).is_equivalent());
    }

    #[test]
    fn interleavings_without_a_square_differ() {
        // both interleavings, ending in different corners
        let mut b = HdaBuilder::new();
        b.states(&["o", "x", "y", "u", "v"])
            .transition("a1", "o", "x", "a")
            .transition("b1", "o", "y", "b")
            .transition("b2", "x", "u", "b")
            .transition("a2", "y", "v", "a")
            .initial("o");
        let split = b.build().unwrap();
        let v = decide(&filled_square(), &split);
        assert!(!v.is_equivalent());
        assert!(replay_hda_refutation(&filled_square(), &split, v.refutation().unwrap()).unwrap());
    }

    #[test]
    fn carved_cube_is_caught() {
        let e = make_hypercube(&["a", "a", "b"]).unwrap();
        let top: BTreeSet<CellId> = e.cell_ids().filter(|&q| e.dim(q) == 3).collect();
        let f = carve(&e, &top).unwrap();
        let v = decide(&e, &f);
        assert!(!v.is_equivalent());
        assert!(replay_hda_refutation(&e, &f, v.refutation().unwrap()).unwrap());
        assert_eq!(decide(&f, &e).is_equivalent(), v.is_equivalent());
    }

    #[test]
    fn invalid_models_are_rejected() {
        let mut b = HdaBuilder::new();
        b.states(&["x", "y", "z", "w"])
            .transition("p", "x", "y", "b")
            .transition("q", "x", "z", "a")
            .transition("r", "y", "w", "a")
            .transition("u", "z", "w", "b")
            .cell("sq", &["q", "p"], &["u", "r"])
            .initial("x");
        let twisted = b.build().unwrap();
        assert_eq!(
            hh_bisim_hda(&twisted, CellId(0), &twisted, CellId(0), &EquivOptions::default()),
            Err(EquivalenceError::Precondition { model: "first", property: "a valid automaton" })
        );
    }

    #[test]
    fn tiny_budget_is_reported() {
        let e = make_hypercube(&["a", "b"]).unwrap();
        let options = EquivOptions { budget: 3, ..EquivOptions::default() };
        assert_eq!(
            hh_bisim_hda(&e, e.initial()[0], &e, e.initial()[0], &options),
            Err(EquivalenceError::BudgetExceeded { budget: 3 })
        );
    }

    #[test]
    fn tampered_refutations_do_not_replay() {
        let (e, f) = (filled_square(), hollow_square());
        let mut chain = decide(&e, &f).refutation().unwrap().to_vec();
        chain.pop();
        assert!(!replay_hda_refutation(&e, &f, &chain).unwrap());
        assert!(!replay_hda_refutation(&e, &f, &[]).unwrap());
    }
}
