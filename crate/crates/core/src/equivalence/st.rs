use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use super::fixpoint::{failure_chain, solve, Obligation};
use super::{model_name, BackConditions, EquivOptions, EquivalenceError, EquivalenceVerdict, RefutationStep};
use crate::paths::StepKind;
use crate::st::{StConfig, StStep, StStructure};

/// Two configurations related through a label-preserving bijection between
/// their started events that maps terminated events onto terminated events.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StMatch {
    pub first: StConfig,
    pub second: StConfig,
    /// `(event of the first structure, event of the second)`, sorted.
    pub map: Vec<(usize, usize)>,
}

pub type StVerdict = EquivalenceVerdict<StMatch, StStep>;

impl StMatch {
    fn image(&self, e: usize) -> Option<usize> {
        self.map.iter().find(|&&(x, _)| x == e).map(|&(_, y)| y)
    }

    fn flipped(&self) -> StMatch {
        let mut map: Vec<(usize, usize)> = self.map.iter().map(|&(x, y)| (y, x)).collect();
        map.sort_unstable();
        StMatch { first: self.second, second: self.first, map }
    }

    /// True iff the map is a label-preserving bijection from `S` onto `S'`
    /// that sends `T` onto `T'`.
    pub fn is_isomorphism(&self, first: &StStructure, second: &StStructure) -> bool {
        let (c, d) = (self.first, self.second);
        let sources: BTreeSet<usize> = self.map.iter().map(|&(x, _)| x).collect();
        let images: BTreeSet<usize> = self.map.iter().map(|&(_, y)| y).collect();
        sources.len() == self.map.len()
            && images.len() == self.map.len()
            && sources.iter().copied().eq(c.s.iter())
            && images.iter().copied().eq(d.s.iter())
            && self.map.iter().all(|&(x, y)| first.label(x) == second.label(y) && c.t.contains(x) == d.t.contains(y))
    }
}

/// Answers in `second` to the step `step` of `first` from `m.first`.
fn forward_answers(first: &StStructure, second: &StStructure, m: &StMatch, step: &StStep) -> Vec<StMatch> {
    let label = first.label(step.event);
    let Ok(replies) = second.steps(m.second) else {
        return Vec::new();
    };
    replies
        .into_iter()
        .filter(|r| r.kind == step.kind && second.label(r.event) == label)
        .filter_map(|r| {
            let mut map = m.map.clone();
            match step.kind {
                StepKind::Start => {
                    map.push((step.event, r.event));
                    map.sort_unstable();
                }
                StepKind::Terminate if m.image(step.event) != Some(r.event) => return None,
                StepKind::Terminate => {}
            }
            Some(StMatch { first: step.to, second: r.to, map })
        })
        .collect()
}

/// The answer in `second` to undoing `step` of `first` into `m.first`: undo
/// the image of the same event, keeping the rest of the map.
fn back_answer(second: &StStructure, m: &StMatch, step: &StStep) -> Option<StMatch> {
    let image = m.image(step.event)?;
    let d = m.second;
    let from = match step.kind {
        StepKind::Start if !d.t.contains(image) => StConfig::new(d.s.without(image), d.t),
        StepKind::Terminate if d.t.contains(image) => StConfig::new(d.s, d.t.without(image)),
        _ => return None,
    };
    if !second.contains(from) {
        return None;
    }
    let map = m.map.iter().copied().filter(|&(x, _)| step.kind == StepKind::Terminate || x != step.event).collect();
    Some(StMatch { first: step.from, second: from, map })
}

/// One move of a triple with every answer, under a condition number.
struct Move {
    condition: u8,
    in_second: bool,
    step: StStep,
    answers: Vec<StMatch>,
}

fn moves(
    first: &StStructure,
    second: &StStructure,
    m: &StMatch,
    back: BackConditions,
) -> Result<Vec<Move>, EquivalenceError> {
    let mut out = Vec::new();
    let flipped = m.flipped();
    for (a, b, view, in_second) in [(first, second, m, false), (second, first, &flipped, true)] {
        let unflip = |answers: Vec<StMatch>| -> Vec<StMatch> {
            if in_second {
                answers.iter().map(StMatch::flipped).collect()
            } else {
                answers
            }
        };
        for step in a.steps(view.first)? {
            let answers = unflip(forward_answers(a, b, view, &step));
            out.push(Move { condition: 2 + u8::from(in_second), in_second, step, answers });
        }
        if in_second && back == BackConditions::FirstOnly {
            continue;
        }
        for step in a.steps_into(view.first)? {
            let answers = unflip(back_answer(b, view, &step).into_iter().collect());
            out.push(Move { condition: 4 + u8::from(in_second), in_second, step, answers });
        }
    }
    Ok(out)
}

fn check_structure(st: &StStructure, second: bool) -> Result<(), EquivalenceError> {
    let report = st.properties();
    let model = model_name(second);
    for (ok, property) in
        [(report.rooted, "rooted"), (report.connected, "connected"), (report.adjacent_closed, "adjacent-closed")]
    {
        if !ok {
            return Err(EquivalenceError::Precondition { model, property });
        }
    }
    Ok(())
}

/// Decides whether two ST-structures are hh-bisimilar, starting from the
/// empty configurations with the empty map.
pub fn hh_bisim_st(
    first: &StStructure,
    second: &StStructure,
    options: &EquivOptions,
) -> Result<StVerdict, EquivalenceError> {
    check_structure(first, false)?;
    check_structure(second, true)?;

    // every triple reachable from the root through some answer
    let root = StMatch::default();
    let mut seen: HashSet<StMatch> = HashSet::new();
    let mut queue = VecDeque::from([root.clone()]);
    seen.insert(root.clone());
    while let Some(m) = queue.pop_front() {
        for mv in moves(first, second, &m, options.back)? {
            for answer in mv.answers {
                if !seen.contains(&answer) {
                    if seen.len() >= options.budget {
                        return Err(EquivalenceError::BudgetExceeded { budget: options.budget });
                    }
                    seen.insert(answer.clone());
                    queue.push_back(answer);
                }
            }
        }
    }
    let mut triples: Vec<StMatch> = seen.into_iter().collect();
    triples.sort();
    let id: HashMap<&StMatch, u32> = triples.iter().enumerate().map(|(k, m)| (m, k as u32)).collect();

    let mut obligations = Vec::with_capacity(triples.len());
    for m in &triples {
        let obs: Vec<Obligation<(bool, StStep)>> = moves(first, second, m, options.back)?
            .into_iter()
            .map(|mv| Obligation {
                condition: mv.condition,
                movement: (mv.in_second, mv.step),
                candidates: mv.answers.iter().map(|a| id[a]).collect(),
            })
            .collect();
        obligations.push(obs);
    }
    drop(id);

    let fix = solve(&obligations);
    let root_id = triples.binary_search(&root).expect("root") as u32;
    if fix.alive(root_id) {
        let witness: Vec<StMatch> =
            triples.iter().enumerate().filter(|&(k, _)| fix.alive(k as u32)).map(|(_, m)| m.clone()).collect();
        let violations = audit_st_witness(first, second, &witness, options.back)?.len();
        if violations > 0 {
            return Err(EquivalenceError::AuditFailed { violations });
        }
        return Ok(EquivalenceVerdict::Equivalent { witness });
    }
    let refutation = failure_chain(&obligations, &fix, root_id)
        .into_iter()
        .map(|(x, k)| {
            let ob = &obligations[x as usize][k as usize];
            let (in_second, step) = ob.movement;
            RefutationStep { condition: ob.condition, in_second, at: triples[x as usize].clone(), movement: step }
        })
        .collect();
    Ok(EquivalenceVerdict::Inequivalent { refutation })
}

/// Rechecks every condition over a relation from scratch and returns the
/// failures as `(condition, triple index)`; condition 1 is the isomorphism
/// requirement on the triple itself.
pub fn audit_st_witness(
    first: &StStructure,
    second: &StStructure,
    witness: &[StMatch],
    back: BackConditions,
) -> Result<Vec<(u8, usize)>, EquivalenceError> {
    let related: BTreeSet<&StMatch> = witness.iter().collect();
    let mut failures = Vec::new();
    for (k, m) in witness.iter().enumerate() {
        if !m.is_isomorphism(first, second) {
            failures.push((1, k));
        }
        for mv in moves(first, second, m, back)? {
            // an extension must restrict to the parent map
            let restricts = |a: &StMatch| {
                mv.condition > 3 || a.map.iter().filter(|&&(x, _)| m.map.iter().any(|&(y, _)| x == y)).eq(m.map.iter())
            };
            if !mv.answers.iter().any(|a| related.contains(a) && restricts(a)) {
                failures.push((mv.condition, k));
            }
        }
    }
    Ok(failures)
}

/// Replays a refutation: each link's step must leave (or enter) the moving
/// side's configuration, the next link must be one of its answers, and the
/// last step must have none.
pub fn replay_st_refutation(
    first: &StStructure,
    second: &StStructure,
    refutation: &[RefutationStep<StMatch, StStep>],
    back: BackConditions,
) -> Result<bool, EquivalenceError> {
    if refutation.first().map(|l| &l.at) != Some(&StMatch::default()) {
        return Ok(false);
    }
    for (k, link) in refutation.iter().enumerate() {
        if !link.at.is_isomorphism(first, second) {
            return Ok(false);
        }
        let Some(mv) = moves(first, second, &link.at, back)?
            .into_iter()
            .find(|mv| mv.in_second == link.in_second && mv.condition == link.condition && mv.step == link.movement)
        else {
            return Ok(false);
        };
        match refutation.get(k + 1) {
            Some(next) if mv.answers.contains(&next.at) => {}
            Some(_) => return Ok(false),
            None => return Ok(mv.answers.is_empty()),
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::st::fixtures::*;
    use crate::st::EventSet;

    fn decide(a: &StStructure, b: &StStructure) -> StVerdict {
        hh_bisim_st(a, b, &EquivOptions::default()).unwrap()
    }

    #[test]
    fn squares_differ() {
        let (e, f) = (filled_square_st(), hollow_square_st());
        let v = decide(&e, &f);
        let chain = v.refutation().unwrap();
        assert!(replay_st_refutation(&e, &f, chain, BackConditions::Symmetric).unwrap());
        let last = chain.last().unwrap();
        assert_eq!((last.condition, last.movement.kind), (2, StepKind::Start));
        assert!(!decide(&f, &e).is_equivalent());
    }

    #[test]
    fn renamed_events_are_matched_by_the_renaming() {
        let e = filled_square_st();
        let mut configs = Vec::new();
        for c in e.configs() {
            // swap the two events
            let swap = |s: EventSet| s.iter().map(|x| 1 - x).collect::<EventSet>();
            configs.push(StConfig::new(swap(c.s), swap(c.t)));
        }
        let mut events = e.events().to_vec();
        events.reverse();
        let renamed = StStructure::new(events, configs).unwrap();
        let v = decide(&e, &renamed);
        let witness = v.witness().unwrap();
        let full = witness.iter().find(|m| m.first.t == e.all_events()).unwrap();
        assert_eq!(full.map, alloc::vec![(0, 1), (1, 0)]);
        assert!(audit_st_witness(&e, &renamed, witness, BackConditions::Symmetric).unwrap().is_empty());
    }

    #[test]
    fn reflexive_and_symmetric() {
        let all = [filled_square_st(), hollow_square_st(), sequence_st(), choice_st()];
        for a in &all {
            assert!(decide(a, a).is_equivalent());
            for b in &all {
                assert_eq!(decide(a, b).is_equivalent(), decide(b, a).is_equivalent());
            }
        }
    }

    #[test]
    fn one_sided_back_conditions_are_weaker_or_equal() {
        let all = [filled_square_st(), hollow_square_st(), sequence_st(), choice_st()];
        let first_only = EquivOptions { back: BackConditions::FirstOnly, ..EquivOptions::default() };
        for a in &all {
            for b in &all {
                let both = decide(a, b).is_equivalent();
                let one = hh_bisim_st(a, b, &first_only).unwrap().is_equivalent();
                assert!(!both || one);
            }
        }
    }

    #[test]
    fn unqualified_structures_are_rejected() {
        let e = filled_square_st();
        let mut configs: Vec<StConfig> = e.configs().iter().copied().collect();
        configs.retain(|c| c.s.len() != 2 || c.t != EventSet::singleton(0));
        let broken = StStructure::new(e.events().to_vec(), configs).unwrap();
        assert_eq!(
            hh_bisim_st(&e, &broken, &EquivOptions::default()),
            Err(EquivalenceError::Precondition { model: "second", property: "adjacent-closed" })
        );
    }
}
