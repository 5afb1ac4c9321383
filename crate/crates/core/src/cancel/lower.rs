//! Moving a critical value into a thin band while keeping the gradient.

use std::collections::BTreeSet;

use crate::complex::{CellComplex, CellId};
use crate::error::{MorseError, Result};
use crate::field::ScalarField;
use crate::gradient::{end_value, DiscreteGradient, PathDag, PathEnd};

/// Lowers the value of the critical cell `p` into `(a, a + epsilon)`.
///
/// Every maximal descending path from `p` must reach a value `<= a`. Only
/// vertices of cells on those paths with value above `a` move; they are
/// re-spread monotonically into the band so the matching `g` stays a valid
/// lower-star gradient of the result.
pub fn lower_critical_value(
    c: &CellComplex,
    g: &DiscreteGradient,
    f: &ScalarField,
    p: CellId,
    a: f64,
    epsilon: f64,
) -> Result<ScalarField> {
    c.check(p)?;
    if !g.is_critical(p) {
        return Err(MorseError::NotCritical(p));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() || !a.is_finite() {
        return Err(MorseError::InvalidArgument("band must be finite with positive width".into()));
    }
    let vp = f.cell_value(c, p);
    if vp > a && vp < a + epsilon {
        return Ok(f.clone());
    }
    if vp <= a {
        return Err(MorseError::InvalidArgument(format!("value {vp} of {p} is not above {a}")));
    }

    let mut region: BTreeSet<u32> = BTreeSet::new();
    if p.dim == 0 {
        region.insert(p.index);
    } else {
        let dag = PathDag::build(c, g, p)?;
        for end in dag.terminals.keys() {
            if end_value(c, g, f, *end) > a {
                return Err(MorseError::OrbitBelowLevelMissing(p));
            }
        }
        let mut cells = dag.cells(c, g);
        for end in dag.terminals.keys() {
            if let PathEnd::DeadEnd(x) = *end {
                cells.extend(flow_cells(c, g, f, x, a));
            }
        }
        for cell in cells {
            if f.cell_value(c, cell) > a {
                region.extend(c.vertices_of(cell));
            }
        }
        region.retain(|&v| f.value(v) > a);
    }

    // stay above untouched neighbours that already sit inside the band
    let mut lo = a;
    for &v in &region {
        for u in c.neighbors(v) {
            if !region.contains(&u) {
                let x = f.value(u);
                if x >= a && x < a + epsilon && f.value(v) > x {
                    lo = lo.max(x);
                }
            }
        }
    }
    let hi = a + epsilon;
    if !(lo < hi) {
        return Err(MorseError::BudgetTooTight(p));
    }
    let mut moved: Vec<u32> = region.into_iter().collect();
    moved.sort_by_key(|&v| f.rank(v));
    let n = moved.len() as f64;
    let mut values = f.values().to_vec();
    for (i, &v) in moved.iter().enumerate() {
        let x = lo + (hi - lo) * (i as f64 + 1.0) / (n + 1.0);
        if !(x > lo && x < hi) {
            return Err(MorseError::BudgetTooTight(p));
        }
        values[v as usize] = x;
    }
    let out = ScalarField::from_values(values)?;
    if g.validate_against(c, &out).is_err() || g.check_acyclic(c).is_err() {
        return Err(MorseError::BudgetTooTight(p));
    }
    Ok(out)
}

/// Cells of the vertex flow continuing a dead end, while above `a`.
fn flow_cells(c: &CellComplex, g: &DiscreteGradient, f: &ScalarField, dead: CellId, a: f64) -> Vec<CellId> {
    let mut x = if dead.dim == 0 {
        dead.index
    } else {
        let paired = g.down(dead).map(|v| v.index).unwrap_or(u32::MAX);
        let [u, w] = c.edge(dead.index);
        if u == paired {
            w
        } else {
            u
        }
    };
    let mut out = Vec::new();
    for _ in 0..=c.n_vertices() {
        if f.value(x) <= a {
            break;
        }
        out.push(CellId::vertex(x));
        match g.up(CellId::vertex(x)) {
            Some(e) => {
                out.push(e);
                let [u, w] = c.edge(e.index);
                x = if u == x { w } else { u };
            }
            None => break,
        }
    }
    out
}

/// The critical cell of `g_neg` (the gradient of `-f`) that stands for the
/// critical vertex `q` of `f`: the top-dimensional critical cell in the
/// lower star of `q` under `-f`.
pub fn mirror_cell(c: &CellComplex, g_neg: &DiscreteGradient, f_neg: &ScalarField, q: CellId) -> Result<CellId> {
    c.check(q)?;
    if q.dim != 0 {
        return Err(MorseError::InvalidArgument("only vertices have a mirror cell".into()));
    }
    let top = c.dim();
    g_neg
        .critical_ids()
        .into_iter()
        .find(|x| x.dim == top && f_neg.max_vertex(c, *x) == q.index)
        .ok_or(MorseError::NotCritical(q))
}

/// Raises the critical vertex `q` into `(b - epsilon, b)` by lowering its
/// mirror cell on the negated field. Returns the new field and the mirror.
pub fn raise_critical_value(
    c: &CellComplex,
    f: &ScalarField,
    q: CellId,
    b: f64,
    epsilon: f64,
) -> Result<(ScalarField, CellId)> {
    let neg = f.negated();
    let g_neg = DiscreteGradient::build(c, &neg);
    let m = mirror_cell(c, &g_neg, &neg, q)?;
    let lowered = lower_critical_value(c, &g_neg, &neg, m, -b, epsilon)?;
    Ok((lowered.negated(), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshes;

    #[test]
    fn lowers_cycle_saddle() {
        let c = meshes::cycle_graph(4);
        let f = ScalarField::load(&c, &[0.0, 3.0, 1.0, 4.0]).unwrap();
        let g = DiscreteGradient::build(&c, &f);
        let p = CellId::edge(c.find_edge(1, 2).unwrap());
        let f2 = lower_critical_value(&c, &g, &f, p, 1.5, 0.5).unwrap();
        let v = f2.cell_value(&c, p);
        assert!(v > 1.5 && v < 2.0);
        assert_eq!(f2.value(3), 4.0);
        assert_eq!(f2.value(0), 0.0);
        assert_eq!(DiscreteGradient::build(&c, &f2), g);
    }

    #[test]
    fn already_in_band() {
        let c = meshes::cycle_graph(4);
        let f = ScalarField::load(&c, &[0.0, 3.0, 1.0, 4.0]).unwrap();
        let g = DiscreteGradient::build(&c, &f);
        let p = CellId::edge(c.find_edge(1, 2).unwrap());
        assert_eq!(lower_critical_value(&c, &g, &f, p, 2.9, 0.2).unwrap(), f);
    }

    #[test]
    fn needs_orbits_below() {
        let c = meshes::cycle_graph(4);
        let f = ScalarField::load(&c, &[0.0, 3.0, 1.0, 4.0]).unwrap();
        let g = DiscreteGradient::build(&c, &f);
        let p = CellId::edge(c.find_edge(1, 2).unwrap());
        assert_eq!(lower_critical_value(&c, &g, &f, p, 0.5, 0.1), Err(MorseError::OrbitBelowLevelMissing(p)));
    }

    #[test]
    fn raises_minimum() {
        let c = meshes::path_graph(5);
        let f = ScalarField::load(&c, &[-1.0, 4.0, 1.0, 3.0, 2.0]).unwrap();
        let (f2, _) = raise_critical_value(&c, &f, CellId::vertex(2), 2.5, 0.5).unwrap();
        assert!(f2.value(2) > 2.0 && f2.value(2) < 2.5);
        assert_eq!(DiscreteGradient::build(&c, &f2).census(), DiscreteGradient::build(&c, &f).census());
    }
}
