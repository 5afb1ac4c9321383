//! JSON reports and SVG schematics.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cancel::SimplifyReport;
use crate::complex::{CellComplex, CellId};
use crate::error::Result;
use crate::field::ScalarField;
use crate::gradient::{DiscreteGradient, PathDag, PathEnd};
use crate::persist::{essential_counts, persistence_pairs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Census {
    pub c0: usize,
    pub c1: usize,
    pub c2: usize,
}

impl From<[usize; 3]> for Census {
    fn from(c: [usize; 3]) -> Self {
        Census { c0: c[0], c1: c[1], c2: c[2] }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalEntry {
    pub cell: String,
    pub index: u8,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Connection {
    pub p: String,
    pub q: String,
    pub paths: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler: i64,
    pub census: Census,
    pub morse_relation: bool,
    pub critical: Vec<CriticalEntry>,
    pub connections: Vec<Connection>,
}

pub fn analyze(c: &CellComplex, f: &ScalarField) -> Result<AnalyzeReport> {
    let g = DiscreteGradient::build(c, f);
    let census = g.census();
    let euler = c.euler_characteristic();
    let alternating = census[0] as i64 - census[1] as i64 + census[2] as i64;
    let critical = g
        .critical_cells(c, f)
        .into_iter()
        .map(|x| CriticalEntry { cell: x.cell.to_string(), index: x.morse_index, value: x.value })
        .collect();
    let mut connections = Vec::new();
    for p in g.critical_ids().into_iter().filter(|p| p.dim > 0) {
        let dag = PathDag::build(c, &g, p)?;
        let mut ends: Vec<(CellId, u64)> = dag
            .terminals
            .iter()
            .filter_map(|(e, &n)| match *e {
                PathEnd::Critical(q) => Some((q, n)),
                PathEnd::DeadEnd(_) => None,
            })
            .collect();
        ends.sort();
        connections.extend(ends.into_iter().map(|(q, n)| Connection { p: p.to_string(), q: q.to_string(), paths: n }));
    }
    Ok(AnalyzeReport {
        vertices: c.n_vertices(),
        edges: c.n_edges(),
        triangles: c.n_triangles(),
        euler,
        census: census.into(),
        morse_relation: alternating == euler,
        critical,
        connections,
    })
}

/// The `report.json` layout for `cancel-pair` and `simplify`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub plans: Vec<crate::cancel::PlanSummary>,
    pub final_census: Census,
    pub euler: i64,
    pub transitions: Vec<f64>,
    pub total_perturbation: f64,
    pub perturbation_bound: f64,
}

impl From<&SimplifyReport> for RunReport {
    fn from(r: &SimplifyReport) -> Self {
        RunReport {
            plans: r.plans.clone(),
            final_census: r.final_census.into(),
            euler: r.euler,
            transitions: r.plans.iter().filter_map(|p| p.transition).collect(),
            total_perturbation: r.total_perturbation,
            perturbation_bound: r.perturbation_bound,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub checks: Vec<Check>,
}

/// Re-checks the invariants of every layer on `(c, f)`.
pub fn verify(c: &CellComplex, f: &ScalarField) -> VerifyReport {
    let mut checks = Vec::new();
    let mut push = |name, r: std::result::Result<(), String>| {
        let (ok, detail) = match r {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e),
        };
        checks.push(Check { name, ok, detail });
    };
    push("complex", c.validate().map_err(|e| e.to_string()));
    push(
        "field",
        if f.len() == c.n_vertices() && f.values().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(format!("{} values for {} vertices", f.len(), c.n_vertices()))
        },
    );
    let g = DiscreteGradient::build(c, f);
    push("gradient", g.validate_against(c, f).map_err(|e| e.to_string()));

    let census = g.census();
    let euler = c.euler_characteristic();
    let alternating = census[0] as i64 - census[1] as i64 + census[2] as i64;
    push(
        "morse_relation",
        if alternating == euler {
            Ok(())
        } else {
            Err(format!("census {census:?} sums to {alternating}, euler {euler}"))
        },
    );

    let pairs = persistence_pairs(c, f);
    let betti = essential_counts(&pairs);
    push(
        "weak_morse_inequalities",
        if (0..3).all(|k| census[k] >= betti[k]) {
            Ok(())
        } else {
            Err(format!("census {census:?} below betti {betti:?}"))
        },
    );
    let mut from_pairs = [0usize; 3];
    for p in &pairs {
        from_pairs[p.birth.cell.dim as usize] += 1;
        if let Some(d) = p.death {
            from_pairs[d.cell.dim as usize] += 1;
        }
    }
    push(
        "persistence_census",
        if from_pairs == census { Ok(()) } else { Err(format!("pairs give {from_pairs:?}, gradient {census:?}")) },
    );
    let ok = checks.iter().all(|c| c.ok);
    VerifyReport { ok, checks }
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 24.0;

/// Schematic of critical cells and the V-paths leaving them. Graphs are drawn
/// as value profiles; surfaces need planar coordinates.
pub fn svg(c: &CellComplex, f: &ScalarField) -> Result<String> {
    let g = DiscreteGradient::build(c, f);
    let pos = layout(c, f);
    let centre = |cell: CellId| -> (f64, f64) {
        let vs = c.vertices_of(cell);
        let n = vs.len() as f64;
        let (x, y) = vs.iter().fold((0.0, 0.0), |(x, y), &v| (x + pos[v as usize].0, y + pos[v as usize].1));
        (x / n, y / n)
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for &[a, b] in c.edges() {
        let (x0, y0) = pos[a as usize];
        let (x1, y1) = pos[b as usize];
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="#ccc" stroke-width="1"/>"##
        );
    }
    for p in g.critical_ids().into_iter().filter(|p| p.dim > 0) {
        let dag = PathDag::build(c, &g, p)?;
        for tau in &dag.nodes {
            let (x0, y0) = centre(*tau);
            let own = g.down(*tau);
            for sigma in c.faces(*tau).into_iter().filter(|s| Some(*s) != own) {
                let (x1, y1) = centre(sigma);
                let _ = writeln!(
                    s,
                    r##"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="#7a7" stroke-width="1.5"/>"##
                );
            }
        }
    }
    for cell in g.critical_ids() {
        let (x, y) = centre(cell);
        let colour = ["#2458d6", "#2a9d3a", "#d62828"][cell.dim as usize];
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{colour}"><title>{cell} = {}</title></circle>"#,
            f.cell_value(c, cell)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn layout(c: &CellComplex, f: &ScalarField) -> Vec<(f64, f64)> {
    let n = c.n_vertices();
    let raw: Vec<(f64, f64)> = match c.coords() {
        Some(cs) if c.dim() == 2 => cs.iter().map(|p| (p[0], p[1])).collect(),
        _ => (0..n).map(|v| (v as f64, f.value(v as u32))).collect(),
    };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &raw {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let sx = if x1 > x0 { (W - 2.0 * PAD) / (x1 - x0) } else { 1.0 };
    let sy = if y1 > y0 { (H - 2.0 * PAD) / (y1 - y0) } else { 1.0 };
    raw.into_iter().map(|(x, y)| (PAD + (x - x0) * sx, H - PAD - (y - y0) * sy)).collect()
}
