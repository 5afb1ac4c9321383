//! Cancellation of critical pairs.
//!
//! A pair `(p, q)` with `dim p = dim q + 1` is cancelable when exactly one
//! V-path joins them and every other descending path from `p` drops below
//! `value(q) - epsilon`. [`cancel_pair`] reverses the connector in the
//! matching; [`realize_function`] then produces a vertex field whose own
//! lower-star gradient has the reduced critical census and which agrees with
//! the input outside the plan's support.

mod deform;
mod kernel;
mod lower;
mod realize;
mod simplify;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::complex::{CellComplex, CellId};
use crate::error::{MorseError, Result};
use crate::field::ScalarField;
use crate::gradient::{end_value, CriticalCell, DiscreteGradient, PathDag, PathEnd, VPath};

pub use deform::{sample_deformation, PathCensus};
pub use kernel::{cancel_1d, cancel_1d_with, MonotoneProfile, Spacing};
pub use lower::{lower_critical_value, mirror_cell, raise_critical_value};
pub use realize::realize_function;
pub use simplify::{candidates, simplify, PlanSummary, SimplifyReport};

/// A validated cancelable pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellationPlan {
    pub p: CriticalCell,
    pub q: CriticalCell,
    /// The unique connecting V-path.
    pub path: VPath,
    /// Sorted support cells; values may change only on support vertices.
    pub support: Vec<CellId>,
    pub epsilon: f64,
    pub persistence: f64,
    /// Cells on descending paths from `p` at or above `value(q) - epsilon`,
    /// before neighbourhood expansion.
    pub descent: Vec<CellId>,
    /// Vertices whose values are reassigned: the sublevel basin of `q` below
    /// `p` for an (edge, vertex) pair, the superlevel cap of `p` above `q`
    /// for a (triangle, edge) pair.
    pub region: Vec<u32>,
    /// Maximum vertex of the saddle through which the region drains.
    pub outlet: u32,
    #[serde(skip)]
    pub(crate) gradient_fingerprint: u64,
}

impl CancellationPlan {
    pub fn support_vertices(&self) -> Vec<u32> {
        self.support.iter().filter(|c| c.dim == 0).map(|c| c.index).collect()
    }

    pub fn in_support(&self, cell: CellId) -> bool {
        self.support.binary_search(&cell).is_ok()
    }

    /// Level below which other orbits must escape.
    pub fn level(&self) -> f64 {
        self.q.value - self.epsilon
    }
}

/// Why a pair failed the cancelability test.
#[derive(Debug, Clone, PartialEq)]
pub enum Rejection {
    IndexMismatch,
    NoPath,
    MultiplePaths(u64),
    /// Another descending path from `p` stays at or above the level. The
    /// gradient-level plan is still carried, for callers that only cancel
    /// in the matching.
    TrappedOrbit {
        end: PathEnd,
        end_value: f64,
        plan: Box<CancellationPlan>,
    },
}

impl Rejection {
    pub fn tag(&self) -> &'static str {
        match self {
            Rejection::IndexMismatch => "IndexMismatch",
            Rejection::NoPath => "NoPath",
            Rejection::MultiplePaths(_) => "MultiplePaths",
            Rejection::TrappedOrbit { .. } => "TrappedOrbit",
        }
    }
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rejection::IndexMismatch => write!(f, "dimensions do not differ by one"),
            Rejection::NoPath => write!(f, "no V-path joins the pair"),
            Rejection::MultiplePaths(n) => write!(f, "{n} V-paths join the pair"),
            Rejection::TrappedOrbit { end, end_value, .. } => {
                write!(f, "path to {} stays at {end_value}, not below the level", end.cell())
            }
        }
    }
}

pub type Verdict = std::result::Result<CancellationPlan, Rejection>;

/// `persistence / 100`, or a small positive value when the pair is tied.
pub fn default_epsilon(persistence: f64, f: &ScalarField) -> f64 {
    if persistence > 0.0 {
        persistence / 100.0
    } else {
        let scale = f.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        scale * 1e-9
    }
}

/// Tests the cancelability hypotheses for `(p, q)`; `epsilon = None` uses
/// [`default_epsilon`].
pub fn is_cancelable(
    c: &CellComplex,
    g: &DiscreteGradient,
    f: &ScalarField,
    p: CellId,
    q: CellId,
    epsilon: Option<f64>,
) -> Result<Verdict> {
    c.check(p)?;
    c.check(q)?;
    for x in [p, q] {
        if !g.is_critical(x) {
            return Err(MorseError::NotCritical(x));
        }
    }
    if p.dim != q.dim + 1 {
        return Ok(Err(Rejection::IndexMismatch));
    }
    let pc = CriticalCell::of(c, f, p);
    let qc = CriticalCell::of(c, f, q);
    let persistence = pc.value - qc.value;
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(persistence, f));
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(MorseError::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }

    let dag = PathDag::build(c, g, p)?;
    match dag.count_to(q) {
        0 => return Ok(Err(Rejection::NoPath)),
        1 => {}
        n => return Ok(Err(Rejection::MultiplePaths(n))),
    }
    if f.cell_rank(c, p) <= f.cell_rank(c, q) {
        return Ok(Err(Rejection::NoPath));
    }
    let path = unique_path(c, g, &dag, q)?;
    let level = qc.value - epsilon;

    let mut trapped = None;
    let mut ends: Vec<(&PathEnd, &u64)> = dag.terminals.iter().collect();
    ends.sort();
    for (end, _) in ends {
        if *end == PathEnd::Critical(q) {
            continue;
        }
        let v = end_value(c, g, f, *end);
        if !(v < level) {
            trapped = Some((*end, v));
            break;
        }
    }

    let descent = descent_cells(c, g, f, &dag, &path, level);
    let (region, outlet) = if p.dim == 1 {
        let s = f.max_vertex(c, p);
        (level_component(c, q.index, |v| f.rank(v) < f.rank(s)), s)
    } else {
        let s = f.max_vertex(c, q);
        (level_component(c, f.max_vertex(c, p), |v| f.rank(v) > f.rank(s)), s)
    };
    let mut seeds = descent.clone();
    seeds.extend(region.iter().map(|&v| CellId::vertex(v)));
    let support = neighbourhood(c, &seeds);
    let plan = CancellationPlan {
        p: pc,
        q: qc,
        path,
        support,
        epsilon,
        persistence,
        descent,
        region,
        outlet,
        gradient_fingerprint: g.fingerprint(),
    };
    Ok(match trapped {
        Some((end, end_value)) => Err(Rejection::TrappedOrbit { end, end_value, plan: Box::new(plan) }),
        None => Ok(plan),
    })
}

fn unique_path(c: &CellComplex, g: &DiscreteGradient, dag: &PathDag, q: CellId) -> Result<VPath> {
    let target = PathEnd::Critical(q);
    let on_route: BTreeSet<CellId> = dag.cells_toward(c, g, target).into_iter().collect();
    let mut cells = vec![dag.start];
    let mut tau = dag.start;
    loop {
        let own = g.down(tau);
        let mut next = None;
        for s in c.faces(tau) {
            if Some(s) == own {
                continue;
            }
            if s == q {
                cells.push(s);
                return Ok(VPath { cells, end: target });
            }
            if let Some(t) = g.up(s) {
                if on_route.contains(&t) {
                    next = Some((s, t));
                    break;
                }
            }
        }
        let (s, t) = next.ok_or_else(|| MorseError::InvariantViolation("connector lost while tracing".into()))?;
        cells.push(s);
        cells.push(t);
        tau = t;
    }
}

/// Cells of all descending paths from `p` (and of the vertex flows that
/// continue their dead ends) at or above `level`, plus the connector.
fn descent_cells(
    c: &CellComplex,
    g: &DiscreteGradient,
    f: &ScalarField,
    dag: &PathDag,
    path: &VPath,
    level: f64,
) -> Vec<CellId> {
    let mut out: BTreeSet<CellId> = path.cells.iter().copied().collect();
    for cell in dag.cells(c, g) {
        if f.cell_value(c, cell) >= level {
            out.insert(cell);
        }
    }
    for end in dag.terminals.keys() {
        let start = match *end {
            PathEnd::DeadEnd(e) if e.dim == 1 => {
                let paired = g.down(e).expect("dead end is matched downward").index;
                let [a, b] = c.edge(e.index);
                if a == paired {
                    b
                } else {
                    a
                }
            }
            PathEnd::Critical(v) | PathEnd::DeadEnd(v) if v.dim == 0 => v.index,
            _ => continue,
        };
        let mut x = start;
        loop {
            if f.value(x) < level {
                break;
            }
            out.insert(CellId::vertex(x));
            match g.up(CellId::vertex(x)) {
                Some(e) => {
                    out.insert(e);
                    let [a, b] = c.edge(e.index);
                    x = if a == x { b } else { a };
                }
                None => break,
            }
        }
    }
    out.into_iter().collect()
}

/// Closure of the star of the closure: the cells touching the descent set
/// together with all their faces.
fn neighbourhood(c: &CellComplex, cells: &[CellId]) -> Vec<CellId> {
    let mut closure: BTreeSet<CellId> = BTreeSet::new();
    for &x in cells {
        add_closure(c, x, &mut closure);
    }
    let mut star: BTreeSet<CellId> = BTreeSet::new();
    for &x in &closure {
        star.insert(x);
        for e in c.cofaces(x) {
            star.insert(e);
            for t in c.cofaces(e) {
                star.insert(t);
            }
        }
    }
    let mut out: BTreeSet<CellId> = BTreeSet::new();
    for &x in &star {
        add_closure(c, x, &mut out);
    }
    out.into_iter().collect()
}

fn add_closure(c: &CellComplex, x: CellId, out: &mut BTreeSet<CellId>) {
    if out.insert(x) {
        for f in c.faces(x) {
            add_closure(c, f, out);
        }
    }
}

/// Connected component of `{v : inside(v)}` containing `seed`, sorted.
fn level_component(c: &CellComplex, seed: u32, inside: impl Fn(u32) -> bool) -> Vec<u32> {
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    if !inside(seed) {
        return Vec::new();
    }
    let mut stack = vec![seed];
    seen.insert(seed);
    while let Some(v) = stack.pop() {
        for u in c.neighbors(v) {
            if inside(u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen.into_iter().collect()
}

/// Reverses the plan's connecting path in the matching.
pub fn cancel_pair(c: &CellComplex, g: &DiscreteGradient, plan: &CancellationPlan) -> Result<DiscreteGradient> {
    if g.fingerprint() != plan.gradient_fingerprint {
        return Err(MorseError::StalePlan);
    }
    if !g.is_critical(plan.p.cell) || !g.is_critical(plan.q.cell) {
        return Err(MorseError::StalePlan);
    }
    let cells = &plan.path.cells;
    let mut out = g.clone();
    // old pairs (sigma_{i-1}, tau_i)
    for i in (2..cells.len()).step_by(2) {
        out.unset(cells[i]);
    }
    for i in (0..cells.len()).step_by(2) {
        out.set_pair(cells[i + 1], cells[i]);
    }
    out.check_acyclic(c)?;
    Ok(out)
}
