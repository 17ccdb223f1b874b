//! Greatest fixpoint of a finite relation under "every move has an answer"
//! obligations, computed in deterministic rounds.

use alloc::vec;
use alloc::vec::Vec;

/// One closure condition instance of a node: some answer among
/// `candidates` must survive.
#[derive(Clone, Debug)]
pub(crate) struct Obligation<M> {
    pub condition: u8,
    pub movement: M,
    pub candidates: Vec<u32>,
}

pub(crate) const ALIVE: u32 = u32::MAX;

pub(crate) struct Fixpoint {
    /// Round in which each node was deleted, or [`ALIVE`].
    pub round: Vec<u32>,
    /// Index of the obligation that deleted each node.
    pub failed: Vec<u32>,
}

impl Fixpoint {
    pub fn alive(&self, x: u32) -> bool {
        self.round[x as usize] == ALIVE
    }
}

/// Deletes, round by round, every node with an obligation whose candidates
/// are all deleted. Within a round the lowest-numbered failing obligation is
/// recorded, so the result depends only on the numbering.
pub(crate) fn solve<M>(obligations: &[Vec<Obligation<M>>]) -> Fixpoint {
    let n = obligations.len();
    let mut round = vec![ALIVE; n];
    let mut failed = vec![0u32; n];

    // live answer counts per obligation and who waits on each node
    let mut offset = Vec::with_capacity(n + 1);
    offset.push(0usize);
    for obs in obligations {
        offset.push(offset.last().copied().unwrap_or(0) + obs.len());
    }
    let mut live = vec![0u32; offset[n]];
    let mut waiting: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut doomed: Vec<(u32, u32)> = Vec::new();
    for (x, obs) in obligations.iter().enumerate() {
        for (k, ob) in obs.iter().enumerate() {
            live[offset[x] + k] = ob.candidates.len() as u32;
            for &y in &ob.candidates {
                waiting[y as usize].push((x as u32, k as u32));
            }
            if ob.candidates.is_empty() {
                doomed.push((x as u32, k as u32));
            }
        }
    }

    let mut r = 0;
    while !doomed.is_empty() {
        doomed.sort_unstable();
        doomed.dedup_by_key(|d| d.0);
        let mut next = Vec::new();
        for &(x, k) in &doomed {
            if round[x as usize] != ALIVE {
                continue;
            }
            round[x as usize] = r;
            failed[x as usize] = k;
        }
        for &(x, _) in &doomed {
            if round[x as usize] != r {
                continue;
            }
            for &(owner, k) in &waiting[x as usize] {
                let slot = &mut live[offset[owner as usize] + k as usize];
                *slot -= 1;
                if *slot == 0 && round[owner as usize] == ALIVE {
                    next.push((owner, k));
                }
            }
        }
        doomed = next;
        r += 1;
    }
    Fixpoint { round, failed }
}

/// Follows the recorded failures from `root`: at each deleted node, the
/// failing obligation and then its earliest-deleted candidate.
pub(crate) fn failure_chain<M>(obligations: &[Vec<Obligation<M>>], fix: &Fixpoint, root: u32) -> Vec<(u32, u32)> {
    let mut chain = Vec::new();
    let mut x = root;
    while !fix.alive(x) {
        let k = fix.failed[x as usize];
        chain.push((x, k));
        let ob = &obligations[x as usize][k as usize];
        match ob.candidates.iter().copied().min_by_key(|&y| (fix.round[y as usize], y)) {
            Some(y) => x = y,
            None => break,
        }
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ob(candidates: &[u32]) -> Obligation<()> {
        Obligation { condition: 1, movement: (), candidates: candidates.to_vec() }
    }

    #[test]
    fn deletion_propagates_in_rounds() {
        // 0 needs 1 or 2; 1 needs 3; 2 needs 3 or 4; 3 needs nothing
        // satisfiable; 4 has an unanswerable move
        let obligations = vec![vec![ob(&[1, 2])], vec![ob(&[4])], vec![ob(&[4])], vec![], vec![ob(&[])]];
        let fix = solve(&obligations);
        assert_eq!(fix.round, vec![2, 1, 1, ALIVE, 0]);
        assert_eq!(failure_chain(&obligations, &fix, 0), vec![(0, 0), (1, 0), (4, 0)]);
        assert!(failure_chain(&obligations, &fix, 3).is_empty());
    }

    #[test]
    fn cycles_of_mutual_support_survive() {
        let obligations = vec![vec![ob(&[1])], vec![ob(&[0])], vec![ob(&[0]), ob(&[])]];
        let fix = solve(&obligations);
        assert!(fix.alive(0) && fix.alive(1) && !fix.alive(2));
        assert_eq!(fix.failed[2], 1);
    }
}
