//! Persistence pairing of the lower-star filtration over Z/2.

use std::collections::HashMap;

use serde::Serialize;

use crate::complex::{CellComplex, CellId};
use crate::field::ScalarField;
use crate::gradient::CriticalCell;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PersistencePair {
    pub birth: CriticalCell,
    pub death: Option<CriticalCell>,
    /// `value(death) - value(birth)`; infinite for essential classes.
    #[serde(skip)]
    pub persistence: f64,
    pub essential: bool,
}

/// Cells in filtration order: by maximum vertex, then dimension, then the
/// lower-star key.
pub fn filtration(c: &CellComplex, f: &ScalarField) -> Vec<CellId> {
    let mut cells: Vec<CellId> = c.cells().collect();
    cells.sort_by_cached_key(|&x| (f.cell_rank(c, x), x.dim, f.cell_key(c, x), x.index));
    cells
}

/// Standard column reduction. Pairs whose two cells share a maximum vertex
/// are dropped; they carry no topological change.
pub fn persistence_pairs(c: &CellComplex, f: &ScalarField) -> Vec<PersistencePair> {
    let order = filtration(c, f);
    let position: HashMap<CellId, usize> = order.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let n = order.len();
    let mut pivot_of_low: Vec<Option<usize>> = vec![None; n];
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut paired = vec![false; n];
    let mut out = Vec::new();

    for (j, &cell) in order.iter().enumerate() {
        let mut col: Vec<usize> = c.faces(cell).iter().map(|x| position[x]).collect();
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match pivot_of_low[low] {
                Some(k) => col = sym_diff(&col, &columns[k]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivot_of_low[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let birth = order[low];
            if f.max_vertex(c, birth) != f.max_vertex(c, cell) {
                let b = CriticalCell::of(c, f, birth);
                let d = CriticalCell::of(c, f, cell);
                out.push(PersistencePair {
                    birth: b,
                    death: Some(d),
                    persistence: d.value - b.value,
                    essential: false,
                });
            }
        }
        columns.push(col);
    }
    for (i, &cell) in order.iter().enumerate() {
        if !paired[i] {
            out.push(PersistencePair {
                birth: CriticalCell::of(c, f, cell),
                death: None,
                persistence: f64::INFINITY,
                essential: true,
            });
        }
    }
    out
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Finite pairs with persistence at most `threshold`, as `(p, q)` =
/// `(death, birth)` candidates, ascending by persistence.
pub fn schedule(pairs: &[PersistencePair], threshold: f64) -> Vec<(CellId, CellId)> {
    let mut finite: Vec<&PersistencePair> =
        pairs.iter().filter(|p| !p.essential && p.persistence <= threshold).collect();
    finite.sort_by(|a, b| {
        let (da, db) = (a.death.unwrap().cell, b.death.unwrap().cell);
        a.persistence
            .partial_cmp(&b.persistence)
            .unwrap()
            .then(da.dim.cmp(&db.dim))
            .then(da.index.cmp(&db.index))
            .then(a.birth.cell.index.cmp(&b.birth.cell.index))
    });
    finite.into_iter().map(|p| (p.death.unwrap().cell, p.birth.cell)).collect()
}

/// Number of essential classes per dimension (the mod-2 Betti numbers).
pub fn essential_counts(pairs: &[PersistencePair]) -> [usize; 3] {
    let mut n = [0; 3];
    for p in pairs.iter().filter(|p| p.essential) {
        n[p.birth.cell.dim as usize] += 1;
    }
    n
}
