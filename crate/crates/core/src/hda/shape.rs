use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{CellId, Face, Hda, HdaError, Label, LabelMultiset};

/// All cells reachable from `q` through any composition of face maps,
/// including `q` itself.
pub fn faces(hda: &Hda, q: CellId) -> Result<BTreeSet<CellId>, HdaError> {
    Ok(faces_by_level(hda, q)?.into_iter().flatten().collect())
}

/// `result[k]` holds the faces of `q` of dimension `k`.
pub fn faces_by_level(hda: &Hda, q: CellId) -> Result<Vec<BTreeSet<CellId>>, HdaError> {
    hda.check(q)?;
    let n = hda.dim(q);
    let mut levels = alloc::vec![BTreeSet::new(); n + 1];
    levels[n].insert(q);
    for k in (0..n).rev() {
        let mut next = BTreeSet::new();
        for &c in &levels[k + 1] {
            for face in Face::BOTH {
                for i in 1..=hda.dim(c) {
                    next.insert(hda.try_face(c, face, i).ok_or(HdaError::Malformed(c))?);
                }
            }
        }
        levels[k] = next;
    }
    Ok(levels)
}

/// True iff no path visits a cell twice, i.e. the step graph (`s_i(q) → q`
/// and `q → t_i(q)`) has no cycle.
pub fn is_acyclic(hda: &Hda) -> bool {
    let n = hda.len();
    let mut indegree = alloc::vec![0usize; n];
    let succ = |q: CellId| -> Vec<CellId> {
        let up = hda.cofaces(q).iter().filter(|(f, _, _)| *f == Face::Source).map(|&(_, _, c)| c);
        let down = hda.cell(q).targets.iter().copied().filter(|&c| hda.contains(c));
        up.chain(down).collect()
    };
    for q in hda.cell_ids() {
        for s in succ(q) {
            indegree[s.index()] += 1;
        }
    }
    let mut ready: Vec<CellId> = hda.cell_ids().filter(|q| indegree[q.index()] == 0).collect();
    let mut removed = 0;
    while let Some(q) = ready.pop() {
        removed += 1;
        for s in succ(q) {
            indegree[s.index()] -= 1;
            if indegree[s.index()] == 0 {
                ready.push(s);
            }
        }
    }
    removed == n
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// True iff every cell has pairwise distinct faces on every level.
pub fn is_cubical(hda: &Hda) -> Result<bool, HdaError> {
    if !is_acyclic(hda) {
        return Err(HdaError::Cyclic);
    }
    for q in hda.cell_ids() {
        let n = hda.dim(q);
        let levels = faces_by_level(hda, q)?;
        for (k, level) in levels.iter().enumerate() {
            if level.len() != binomial(n, k) << (n - k) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every 1-cell representing the `k`-th event of `q` (1-based), reached by
/// removing all other coordinates with any choice of source/target faces,
/// highest coordinate first.
pub fn coordinate_edges(hda: &Hda, q: CellId, k: usize) -> Result<BTreeSet<CellId>, HdaError> {
    hda.check(q)?;
    let n = hda.dim(q);
    if k == 0 || k > n {
        return Err(HdaError::Malformed(q));
    }
    let mut frontier: BTreeSet<(CellId, usize)> = BTreeSet::new();
    frontier.insert((q, k));
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for &(c, pos) in &frontier {
            let d = hda.dim(c);
            // drop the highest coordinate that is not ours
            let drop = if pos == d { d - 1 } else { d };
            let pos = if drop < pos { pos - 1 } else { pos };
            for face in Face::BOTH {
                next.insert((hda.try_face(c, face, drop).ok_or(HdaError::Malformed(c))?, pos));
            }
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|(c, _)| c).collect())
}

/// Label of each coordinate of `q`, in coordinate order.
pub fn event_labels(hda: &Hda, q: CellId) -> Result<Vec<Label>, HdaError> {
    hda.check(q)?;
    if hda.dim(q) == 1 {
        return hda.label(q).cloned().map(|l| alloc::vec![l]).ok_or(HdaError::Malformed(q));
    }
    (1..=hda.dim(q))
        .map(|k| {
            let mut c = q;
            let mut pos = k;
            // walk down through sources only
            while hda.dim(c) > 1 {
                let d = hda.dim(c);
                let drop = if pos == 1 { 2 } else { 1 };
                c = hda.try_face(c, Face::Source, drop).ok_or(HdaError::Malformed(c))?;
                if drop < pos {
                    pos -= 1;
                }
                debug_assert!(pos < d);
            }
            hda.label(c).cloned().ok_or(HdaError::Malformed(c))
        })
        .collect()
}

/// The multiset of labels of the events executing in `q`.
pub fn cell_label(hda: &Hda, q: CellId) -> Result<LabelMultiset, HdaError> {
    Ok(event_labels(hda, q)?.into_iter().collect())
}
