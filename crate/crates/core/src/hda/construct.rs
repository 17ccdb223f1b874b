use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{Cell, CellId, Face, Hda, HdaError};

const NOT_STARTED: u8 = 0;
const EXECUTING: u8 = 1;
const TERMINATED: u8 = 2;

fn cell_name(valuation: &[u8]) -> String {
    valuation
        .iter()
        .map(|&v| match v {
            NOT_STARTED => '0',
            EXECUTING => '*',
            _ => '1',
        })
        .collect()
}

/// The full `n`-cube over `labels`: one cell per valuation of the events in
/// `{0, ½, 1}`, written `0`, `*` and `1` in cell names. `s_i`/`t_i` move the
/// `i`-th executing event back to `0` or forward to `1`.
pub fn make_hypercube<S: AsRef<str>>(labels: &[S]) -> Result<Hda, HdaError> {
    let n = labels.len();
    if n == 0 {
        return Err(HdaError::EmptyLabels);
    }
    let total = 3usize.pow(n as u32);
    let decode = |mut code: usize| -> Vec<u8> {
        let mut v = alloc::vec![0u8; n];
        for slot in v.iter_mut() {
            *slot = (code % 3) as u8;
            code /= 3;
        }
        v
    };
    let encode = |v: &[u8]| -> usize { v.iter().rev().fold(0, |acc, &x| acc * 3 + x as usize) };

    let mut cells = Vec::with_capacity(total);
    let mut labelling = BTreeMap::new();
    for code in 0..total {
        let v = decode(code);
        let executing: Vec<usize> = (0..n).filter(|&k| v[k] == EXECUTING).collect();
        let face = |k: usize, value: u8| {
            let mut w = v.clone();
            w[k] = value;
            CellId::from_index(encode(&w))
        };
        if executing.len() == 1 {
            labelling.insert(CellId::from_index(code), String::from(labels[executing[0]].as_ref()));
        }
        cells.push(Cell {
            name: cell_name(&v),
            dim: executing.len(),
            sources: executing.iter().map(|&k| face(k, NOT_STARTED)).collect(),
            targets: executing.iter().map(|&k| face(k, TERMINATED)).collect(),
        });
    }
    let initial = alloc::vec![CellId::from_index(0)];
    let finals = alloc::vec![CellId::from_index(total - 1)];
    Ok(Hda::from_parts(cells, labelling, initial, finals, BTreeMap::new()))
}

/// Removes `removed` from the automaton, keeping the names of the remaining
/// cells. No kept cell may have a removed face.
pub fn carve(hda: &Hda, removed: &BTreeSet<CellId>) -> Result<Hda, HdaError> {
    for &r in removed {
        hda.check(r)?;
    }
    for q in hda.cell_ids().filter(|q| !removed.contains(q)) {
        for face in Face::BOTH {
            if let Some(&r) = hda.cell(q).faces(face).iter().find(|f| removed.contains(f)) {
                return Err(HdaError::WouldOrphan { kept: q, removed: r, face });
            }
        }
    }
    let mut remap = BTreeMap::new();
    for q in hda.cell_ids().filter(|q| !removed.contains(q)) {
        remap.insert(q, CellId::from_index(remap.len()));
    }
    let map = |q: &CellId| remap.get(q).copied();
    let cells = remap
        .keys()
        .map(|&q| {
            let c = hda.cell(q);
            Cell {
                name: c.name.clone(),
                dim: c.dim,
                sources: c.sources.iter().filter_map(map).collect(),
                targets: c.targets.iter().filter_map(map).collect(),
            }
        })
        .collect();
    let labels = hda.labels().iter().filter_map(|(q, l)| Some((map(q)?, l.clone()))).collect();
    let initial = hda.initial().iter().filter_map(map).collect();
    let finals = hda.finals().iter().filter_map(map).collect();
    let valuation = hda.valuation().iter().filter_map(|(q, ps)| Some((map(q)?, ps.clone()))).collect();
    Ok(Hda::from_parts(cells, labels, initial, finals, valuation))
}

/// Closes `cells` upwards: everything having one of them as a face.
pub fn upward_closure(hda: &Hda, cells: &BTreeSet<CellId>) -> BTreeSet<CellId> {
    let mut out = cells.clone();
    let mut stack: Vec<CellId> = cells.iter().copied().collect();
    while let Some(q) = stack.pop() {
        for &(_, _, c) in hda.cofaces(q) {
            if out.insert(c) {
                stack.push(c);
            }
        }
    }
    out
}
