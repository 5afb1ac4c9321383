//! Vertex values for a cancelled gradient.
//!
//! The plan's region is moved into a thin band just beyond the saddle
//! value: a basin is raised to just above `value(p)`, a cap is lowered to
//! just below `value(q)`. Inside the band the vertices are ordered by the
//! harmonic interpolant between the outlet and the rest of the region's
//! frontier, which has no interior extrema. The band is kept narrow compared with the
//! value gaps inside the region, so the straight-line homotopy between the
//! two fields reorders nothing until its final stretch.

use std::collections::{BTreeSet, HashMap};

use super::CancellationPlan;
use crate::complex::{CellComplex, CellId};
use crate::error::{MorseError, Result};
use crate::field::ScalarField;
use crate::gradient::DiscreteGradient;

/// A neighbour pair whose order flips crosses at `t >= 1 / (1 + BAND_FRACTION)`.
const BAND_FRACTION: f64 = 0.04;

pub fn realize_function(
    c: &CellComplex,
    g_new: &DiscreteGradient,
    f: &ScalarField,
    plan: &CancellationPlan,
) -> Result<ScalarField> {
    realize_with_gradient(c, g_new, f, &DiscreteGradient::build(c, f), plan).map(|(out, _)| out)
}

/// `realize_function` given `g_f`, the lower-star gradient of `f`; also
/// returns the lower-star gradient of the realized field.
pub(crate) fn realize_with_gradient(
    c: &CellComplex,
    g_new: &DiscreteGradient,
    f: &ScalarField,
    g_f: &DiscreteGradient,
    plan: &CancellationPlan,
) -> Result<(ScalarField, DiscreteGradient)> {
    let conflict = |reason: String| MorseError::FrontierConflict { p: plan.p.cell, q: plan.q.cell, reason };
    if f.len() != c.n_vertices() {
        return Err(MorseError::LengthMismatch { expected: c.n_vertices(), got: f.len() });
    }
    if g_new.is_critical(plan.p.cell) || g_new.is_critical(plan.q.cell) {
        return Err(MorseError::InvalidArgument("gradient still has the pair critical".into()));
    }
    if plan.region.is_empty() {
        return Err(conflict("empty region".into()));
    }
    // raise a basin (edge, vertex) or lower a cap (triangle, edge)
    let raise = plan.p.cell.dim == 1;
    let region: BTreeSet<u32> = plan.region.iter().copied().collect();
    let outlet = plan.outlet;
    let extreme = if raise { plan.q.cell.index } else { f.max_vertex(c, plan.p.cell) };

    let is_min = |v: u32| c.neighbors(v).all(|u| f.less(v, u));
    let is_top = |v: u32| !c.is_boundary(CellId::vertex(v)) && c.neighbors(v).all(|u| f.less(u, v));
    let beyond = |a: u32, b: u32| if raise { f.less(a, b) } else { f.less(b, a) };
    if region.iter().any(|&v| beyond(v, extreme)) {
        return Err(conflict(format!("region reaches past v{extreme}")));
    }
    // other extrema of the kind being removed stay where they are
    let fixed: BTreeSet<u32> =
        region.iter().copied().filter(|&v| v != extreme && if raise { is_min(v) } else { is_top(v) }).collect();
    let free: Vec<u32> = region.iter().copied().filter(|v| !fixed.contains(v)).collect();
    let slot: HashMap<u32, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // band coordinate s: 0 at the outlet and fixed extrema, 1 on the rest of
    // the frontier (and, when raising, along the mesh boundary)
    let anchored = |u: u32| u == outlet || fixed.contains(&u);
    let n = free.len();
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &v) in free.iter().enumerate() {
        for u in c.neighbors(v) {
            diag[i] += 1.0;
            if let Some(&j) = slot.get(&u) {
                adj[i].push(j);
            } else if !anchored(u) {
                rhs[i] += 1.0;
            }
        }
        if raise && c.is_boundary(CellId::vertex(v)) {
            diag[i] += 1.0;
            rhs[i] += 1.0;
        }
    }
    let s = solve_laplacian(&diag, &adj, &rhs).ok_or_else(|| conflict("harmonic solve did not converge".into()))?;

    // only the order of s matters; values are spread evenly by rank
    let mut by_s: Vec<usize> = (0..n).collect();
    by_s.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(free[a].cmp(&free[b])));
    let mut pos = vec![0.0; n];
    for (k, &i) in by_s.iter().enumerate() {
        pos[i] = (k + 1) as f64 / (n + 1) as f64;
    }

    // band width: clear of the frontier and of epsilon, and narrow enough
    // that every adjacent pair whose order flips does so late in the homotopy
    let anchor = f.value(outlet);
    let dir = if raise { 1.0 } else { -1.0 };
    let mut eta = plan.epsilon / 2.0;
    for (i, &v) in free.iter().enumerate() {
        for u in c.neighbors(v) {
            let after = match slot.get(&u) {
                Some(&j) => dir * (pos[i] - pos[j]),
                None if u == outlet => dir * pos[i],
                None if fixed.contains(&u) => continue,
                None => {
                    eta = eta.min((f.value(u) - anchor).abs() / 2.0);
                    continue;
                }
            };
            let before = f.value(v) - f.value(u);
            if before != 0.0 && before.signum() != after.signum() {
                eta = eta.min(BAND_FRACTION * before.abs() / after.abs());
            }
        }
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(conflict(format!("no room for the band (eta {eta})")));
    }

    let mut values = f.values().to_vec();
    let mut last = anchor;
    for &i in &by_s {
        let x = anchor + dir * eta * pos[i];
        if x == last {
            return Err(conflict(format!("band value for v{} collapsed", free[i])));
        }
        last = x;
        values[free[i] as usize] = x;
    }
    let out = ScalarField::from_values(values)?;

    for v in 0..c.n_vertices() as u32 {
        if !plan.in_support(CellId::vertex(v)) && out.value(v).to_bits() != f.value(v).to_bits() {
            return Err(conflict(format!("v{v} outside the support changed")));
        }
    }
    let mut touched: BTreeSet<u32> = BTreeSet::new();
    for &v in &free {
        touched.insert(v);
        touched.extend(c.neighbors(v));
    }
    let touched: Vec<u32> = touched.into_iter().collect();
    let g_out = DiscreteGradient::rebuild_lower_stars(c, &out, g_f, &touched);
    let census = g_out.census();
    if census != g_new.census() {
        return Err(conflict(format!("realized census {:?} differs from {:?}", census, g_new.census())));
    }
    let moved = out.max_abs_diff(f);
    if moved > plan.persistence + plan.epsilon {
        return Err(conflict(format!("perturbation {moved} exceeds the bound")));
    }
    Ok((out, g_out))
}

/// Conjugate gradients for `diag_i x_i - sum_{j in adj_i} x_j = rhs_i`.
fn solve_laplacian(diag: &[f64], adj: &[Vec<usize>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            y[i] = diag[i] * x[i] - adj[i].iter().map(|&j| x[j]).sum::<f64>();
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut d = r.clone();
    let mut ad = vec![0.0; n];
    let norm_b = dot(rhs, rhs).sqrt();
    if norm_b == 0.0 {
        return Some(x);
    }
    let mut rr = dot(&r, &r);
    for _ in 0..(20 * n + 100) {
        if rr.sqrt() <= 1e-15 * norm_b {
            return Some(x);
        }
        apply(&d, &mut ad);
        let alpha = rr / dot(&d, &ad);
        for i in 0..n {
            x[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        let next = dot(&r, &r);
        let beta = next / rr;
        rr = next;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
    }
    (rr.sqrt() <= 1e-10 * norm_b).then_some(x)
}
