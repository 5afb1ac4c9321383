//! Batch driver: cancel pairs in persistence order up to a threshold.

use std::collections::HashSet;

use log::{debug, info};
use serde::Serialize;

use super::realize::realize_with_gradient;
use super::{cancel_pair, is_cancelable, sample_deformation, CancellationPlan};
use crate::complex::{CellComplex, CellId};
use crate::error::{MorseError, Result};
use crate::field::ScalarField;
use crate::gradient::{DiscreteGradient, PathDag, PathEnd};
use crate::persist::persistence_pairs;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSummary {
    pub p: String,
    pub q: String,
    pub p_value: f64,
    pub q_value: f64,
    pub persistence: f64,
    pub epsilon: f64,
    pub support_size: usize,
    pub max_perturbation: f64,
    /// First sampled `t` at which the pair is gone, when scanned.
    pub transition: Option<f64>,
}

impl PlanSummary {
    pub fn of(plan: &CancellationPlan, moved: f64, transition: Option<f64>) -> Self {
        PlanSummary {
            p: plan.p.cell.to_string(),
            q: plan.q.cell.to_string(),
            p_value: plan.p.value,
            q_value: plan.q.value,
            persistence: plan.persistence,
            epsilon: plan.epsilon,
            support_size: plan.support.len(),
            max_perturbation: moved,
            transition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplifyReport {
    pub threshold: f64,
    pub plans: Vec<PlanSummary>,
    pub final_census: [usize; 3],
    pub euler: i64,
    /// `max |f_final - f|` over all vertices.
    pub total_perturbation: f64,
    /// `threshold + sum of per-step epsilon`.
    pub perturbation_bound: f64,
}

/// Cancels pairs of persistence at most `threshold` until none is left.
/// With `scan = Some(n)`, each cancellation's deformation is sampled at `n`
/// points and its transition recorded.
pub fn simplify(
    c: &CellComplex,
    f: &ScalarField,
    threshold: f64,
    scan: Option<usize>,
) -> Result<(ScalarField, SimplifyReport)> {
    if !(threshold >= 0.0) {
        return Err(MorseError::InvalidArgument(format!("threshold must be non-negative, got {threshold}")));
    }
    if f.len() != c.n_vertices() {
        return Err(MorseError::LengthMismatch { expected: c.n_vertices(), got: f.len() });
    }
    let mut current = f.clone();
    let mut plans = Vec::new();
    let mut eps_sum = 0.0;
    let mut g = DiscreteGradient::build(c, &current);
    loop {
        let mut conflict = None;
        let mut done = None;
        for (p, q) in candidates(c, &g, &current, threshold)? {
            let plan = match is_cancelable(c, &g, &current, p, q, None)? {
                Ok(plan) => plan,
                Err(why) => {
                    debug!("skip ({p}, {q}): {}", why.tag());
                    continue;
                }
            };
            let g2 = cancel_pair(c, &g, &plan)?;
            match realize_with_gradient(c, &g2, &current, &g, &plan) {
                Ok(next) => {
                    done = Some((plan, next));
                    break;
                }
                Err(e @ MorseError::FrontierConflict { .. }) => {
                    debug!("{e}");
                    conflict.get_or_insert(e);
                }
                Err(e) => return Err(e),
            }
        }
        let Some((plan, (next, g_next))) = done else {
            if let Some(e) = conflict {
                return Err(e);
            }
            break;
        };
        let transition = match scan {
            Some(n) => sample_deformation(c, &current, &next, &plan, n)?.transition,
            None => None,
        };
        let moved = next.max_abs_diff(&current);
        info!("cancelled ({}, {}) persistence {} moved {}", plan.p.cell, plan.q.cell, plan.persistence, moved);
        eps_sum += plan.epsilon;
        plans.push(PlanSummary::of(&plan, moved, transition));
        current = next;
        g = g_next;
    }
    let report = SimplifyReport {
        threshold,
        plans,
        final_census: g.census(),
        euler: c.euler_characteristic(),
        total_perturbation: current.max_abs_diff(f),
        perturbation_bound: threshold + eps_sum,
    };
    Ok((current, report))
}

/// Critical pairs joined by exactly one V-path whose lower stars carry a
/// persistence pair of persistence at most `threshold`, ordered by
/// persistence then by cell.
pub fn candidates(
    c: &CellComplex,
    g: &DiscreteGradient,
    f: &ScalarField,
    threshold: f64,
) -> Result<Vec<(CellId, CellId)>> {
    let paired: HashSet<(u8, u32, u32)> = persistence_pairs(c, f)
        .into_iter()
        .filter_map(|x| {
            let d = x.death?;
            (x.persistence <= threshold).then(|| (d.cell.dim, f.max_vertex(c, d.cell), f.max_vertex(c, x.birth.cell)))
        })
        .collect();
    let mut out: Vec<(f64, CellId, CellId)> = Vec::new();
    let deaths: HashSet<(u8, u32)> = paired.iter().map(|&(d, m, _)| (d, m)).collect();
    for p in g.critical_ids() {
        if p.dim == 0 || !deaths.contains(&(p.dim, f.max_vertex(c, p))) {
            continue;
        }
        let vp = f.cell_value(c, p);
        let dag = PathDag::build(c, g, p)?;
        for (end, &count) in &dag.terminals {
            if let PathEnd::Critical(q) = *end {
                let pers = vp - f.cell_value(c, q);
                let key = (p.dim, f.max_vertex(c, p), f.max_vertex(c, q));
                if count == 1 && pers <= threshold && paired.contains(&key) {
                    out.push((pers, p, q));
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite values")
            .then(a.1.dim.cmp(&b.1.dim))
            .then(a.1.index.cmp(&b.1.index))
            .then(a.2.index.cmp(&b.2.index))
    });
    Ok(out.into_iter().map(|(_, p, q)| (p, q)).collect())
}
