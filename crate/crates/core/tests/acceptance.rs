//! The ten acceptance criteria. Run with
//! `cargo test -p morse-forge --test acceptance -- --nocapture` to see one
//! line per criterion.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::time::{Duration, Instant};

use morse_forge::cancel::{candidates, raise_critical_value};
use morse_forge::synth::{uniform_values, Mixture};
use morse_forge::{
    cancel_1d, cancel_pair, is_cancelable, lower_critical_value, meshes, realize_function, sample_deformation,
    simplify, CancellationPlan, CellComplex, CellId, DiscreteGradient, Rejection, ScalarField,
};

const MORSE_FIELDS_PER_MESH: u64 = 200;
const MORSE_RUNTIME: Duration = Duration::from_secs(5);
const SCAN_SAMPLES: usize = 21;
const KERNEL_PROFILES: u64 = 100;
const KERNEL_SAMPLES: usize = 101;
const LOWER_INSTANCES: u64 = 50;
const TWO_BUMP_SEED: u64 = 1;
const TWO_BUMP_THRESHOLD: f64 = 1.0;
const TWO_BUMP_RUNTIME: Duration = Duration::from_secs(2);
const SMALL_BUMP: (f64, f64) = (23.0, 21.0);

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn field(c: &CellComplex, seed: u64) -> ScalarField {
    ScalarField::load(c, &uniform_values(c.n_vertices(), -10.0, 10.0, seed)).unwrap()
}

fn interior_critical(c: &CellComplex, g: &DiscreteGradient) -> Vec<CellId> {
    g.critical_ids().into_iter().filter(|&x| !c.is_boundary(x)).collect()
}

struct Executed {
    label: String,
    c: CellComplex,
    f: ScalarField,
    plan: CancellationPlan,
    before: [usize; 3],
    after: [usize; 3],
    realized: ScalarField,
}

fn execute(label: String, c: &CellComplex, f: &ScalarField, plan: CancellationPlan) -> Option<Executed> {
    let g = DiscreteGradient::build(c, f);
    let g2 = cancel_pair(c, &g, &plan).ok()?;
    let realized = realize_function(c, &g2, f, &plan).ok()?;
    Some(Executed {
        label,
        c: c.clone(),
        f: f.clone(),
        plan,
        before: g.census(),
        after: DiscreteGradient::build(c, &realized).census(),
        realized,
    })
}

/// Up to `per_field` cancellations of the original field, one per
/// candidate pair, for each seed.
fn sweep(name: &str, c: &CellComplex, seeds: std::ops::Range<u64>, per_field: usize) -> Vec<Executed> {
    let mut out = Vec::new();
    for seed in seeds {
        let f = field(c, seed);
        let g = DiscreteGradient::build(c, &f);
        let mut done = 0;
        for (p, q) in candidates(c, &g, &f, f64::INFINITY).unwrap() {
            if done == per_field {
                break;
            }
            if let Ok(Ok(plan)) = is_cancelable(c, &g, &f, p, q, None) {
                if let Some(x) = execute(format!("{name} seed {seed} ({p}, {q})"), c, &f, plan) {
                    out.push(x);
                    done += 1;
                }
            }
        }
    }
    out
}

fn cylinder_fixture() -> (CellComplex, ScalarField, u32) {
    let (circ, rings) = (8, 4);
    let c = meshes::cylinder(circ, rings);
    let dip = (2 * circ + 3) as u32;
    let values: Vec<f64> = (0..circ * rings)
        .map(|v| {
            let (i, j) = (v % circ, v / circ);
            if v as u32 == dip {
                0.5
            } else {
                j as f64 + 0.03 * i as f64
            }
        })
        .collect();
    let f = ScalarField::load(&c, &values).unwrap();
    (c, f, dip)
}

/// Path graph whose pair (edge v3-v4, interior minimum v4) straddles the
/// regular value 2.5.
fn straddle_fixture() -> (CellComplex, ScalarField, CellId, CellId, f64) {
    let c = meshes::path_graph(6);
    let f = ScalarField::load(&c, &[-1.0, 4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
    let p = CellId::edge(c.find_edge(3, 4).unwrap());
    (c, f, p, CellId::vertex(4), 2.5)
}

/// Cycle whose pair (edge v1-v2, vertex v2) straddles the regular value 2.
fn straddle_cycle_fixture() -> (CellComplex, ScalarField, CellId, CellId, f64) {
    let c = meshes::cycle_graph(6);
    let f = ScalarField::load(&c, &[0.0, 3.0, 1.0, 5.0, -0.5, 4.0]).unwrap();
    let p = CellId::edge(c.find_edge(1, 2).unwrap());
    (c, f, p, CellId::vertex(2), 2.0)
}

fn executed_pool() -> Vec<Executed> {
    let mut pool = Vec::new();
    pool.extend(sweep("octahedron", &meshes::octahedron(), 0..20, 2));
    pool.extend(sweep("torus", &meshes::torus(3, 3), 100..120, 2));
    pool.extend(sweep("grid8", &meshes::grid(8, 8), 200..220, 3));
    pool.extend(sweep("cycle8", &meshes::cycle_graph(8), 300..320, 2));
    let (c, f, _) = cylinder_fixture();
    let g = DiscreteGradient::build(&c, &f);
    for (p, q) in candidates(&c, &g, &f, f64::INFINITY).unwrap() {
        if let Ok(Ok(plan)) = is_cancelable(&c, &g, &f, p, q, None) {
            pool.extend(execute(format!("cylinder ({p}, {q})"), &c, &f, plan));
        }
    }
    for (c, f, p, q, _) in [straddle_fixture(), straddle_cycle_fixture()] {
        let g = DiscreteGradient::build(&c, &f);
        let plan = is_cancelable(&c, &g, &f, p, q, None).unwrap().unwrap();
        pool.extend(execute(format!("straddle ({p}, {q})"), &c, &f, plan));
    }
    pool
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let meshes =
        [("octahedron", meshes::octahedron()), ("torus9", meshes::torus(3, 3)), ("grid8x8", meshes::grid(8, 8))];
    let mut runs = 0;
    for (name, c) in &meshes {
        let euler = c.euler_characteristic();
        for seed in 0..MORSE_FIELDS_PER_MESH {
            let census = DiscreteGradient::build(c, &field(c, seed)).census();
            let alt = census[0] as i64 - census[1] as i64 + census[2] as i64;
            ensure!(alt == euler, "{name} seed {seed}: census {census:?} gives {alt}, euler {euler}");
            runs += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took < MORSE_RUNTIME, "took {took:?}");
    Ok(format!("{runs} fields, c0 - c1 + c2 = euler on all, {took:.2?}"))
}

fn criterion_2(pool: &[Executed], two_bump_plans: usize, two_bump_transitions: usize) -> Outcome {
    ensure!(pool.len() >= 100, "only {} executed plans", pool.len());
    for x in pool {
        let drop: usize = x.before.iter().sum::<usize>() - x.after.iter().sum::<usize>();
        ensure!(drop == 2, "{}: census {:?} -> {:?}", x.label, x.before, x.after);
        let k = x.plan.q.cell.dim as usize;
        ensure!(
            x.after[k] + 1 == x.before[k] && x.after[k + 1] + 1 == x.before[k + 1],
            "{}: wrong dimensions removed",
            x.label
        );
        for v in 0..x.c.n_vertices() as u32 {
            if !x.plan.in_support(CellId::vertex(v)) {
                ensure!(
                    x.realized.value(v).to_bits() == x.f.value(v).to_bits(),
                    "{}: v{v} outside the support moved",
                    x.label
                );
            }
        }
        let scan = sample_deformation(&x.c, &x.f, &x.realized, &x.plan, SCAN_SAMPLES)
            .map_err(|e| format!("{}: {e}", x.label))?;
        ensure!(scan.transitions() == 1, "{}: {} transitions", x.label, scan.transitions());
        let excess = scan.excess();
        ensure!(excess[0].iter().sum::<i64>() == 2, "{}: excess at t=0 {:?}", x.label, excess[0]);
        ensure!(excess[SCAN_SAMPLES - 1] == [0, 0, 0], "{}: excess at t=1", x.label);
    }
    ensure!(
        two_bump_transitions == two_bump_plans,
        "two-bump: {two_bump_transitions} scans for {two_bump_plans} plans"
    );
    Ok(format!(
        "{} single plans and {} two-bump plans: census -2, outside support bit-identical, one transition in {} samples",
        pool.len(),
        two_bump_plans,
        SCAN_SAMPLES
    ))
}

fn criterion_3() -> Outcome {
    // two connectors: on the 3-cycle 0 < 1 < 2 the top edge {1,2} reaches
    // v0 through v1 and through v2
    let c = meshes::cycle_graph(3);
    let f = ScalarField::load(&c, &[0.0, 1.0, 2.0]).unwrap();
    let g = DiscreteGradient::build(&c, &f);
    let top = CellId::edge(c.find_edge(1, 2).unwrap());
    let r = is_cancelable(&c, &g, &f, top, CellId::vertex(0), None).unwrap();
    ensure!(r == Err(Rejection::MultiplePaths(2)), "3-cycle gave {r:?}");

    // trapped orbit: on the path 2, 5, 0, 3 the critical edge {0,1} descends
    // to v2 (value 0) and to the boundary minimum v0 (value 2)
    let c = meshes::path_graph(4);
    let f = ScalarField::load(&c, &[2.0, 5.0, 0.0, 3.0]).unwrap();
    let g = DiscreteGradient::build(&c, &f);
    let p = CellId::edge(c.find_edge(0, 1).unwrap());
    ensure!(g.is_critical(p), "{p} should be critical");
    match is_cancelable(&c, &g, &f, p, CellId::vertex(2), None).unwrap() {
        Err(Rejection::TrappedOrbit { end, end_value, .. }) => {
            ensure!(end.cell() == CellId::vertex(0) && end_value == 2.0, "trapped at {end:?} value {end_value}");
            ensure!(c.is_boundary(end.cell()), "trap should sit on the boundary");
        }
        other => return Err(format!("path fixture gave {other:?}")),
    }
    Ok("MultiplePaths(2) on the 3-cycle, TrappedOrbit at boundary v0 on the path".into())
}

fn admissible_profile(seed: u64) -> (Vec<f64>, usize) {
    let noise = uniform_values(KERNEL_SAMPLES, -1.0, 1.0, 10_000 + seed);
    let margin = 1 + (seed as usize % 5);
    let mut h: Vec<f64> = (0..KERNEL_SAMPLES)
        .map(|i| {
            let u = i as f64 / (KERNEL_SAMPLES - 1) as f64;
            // rise, dip, rise again, plus noise
            2.0 * u + (6.0 * u).sin() + 0.3 * noise[i]
        })
        .collect();
    // strictly increasing margins; the head also has to sit below the rest,
    // since h1 keeps the head values and stays under h
    let low = h[margin..].iter().copied().fold(f64::INFINITY, f64::min);
    for (i, x) in h[..margin].iter_mut().enumerate() {
        *x = low - 0.5 + 0.01 * i as f64;
    }
    let n = KERNEL_SAMPLES;
    let top = h[..n - margin].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    h[n - margin] = top.max(h[0]) + 0.5;
    for i in n - margin + 1..n {
        h[i] = h[i - 1] + 0.01 + 0.01 * noise[i].abs();
    }
    (h, margin)
}

fn criterion_4() -> Outcome {
    let mut violations = 0;
    for seed in 0..KERNEL_PROFILES {
        let (h, margin) = admissible_profile(seed);
        let out = cancel_1d(&h, margin).map_err(|e| format!("seed {seed}: {e}"))?;
        let n = h.len();
        violations += out.h1.windows(2).filter(|w| !(w[0] < w[1])).count();
        violations += out.h1.iter().zip(&h).filter(|(a, b)| a > b).count();
        violations += (0..margin).chain(n - margin..n).filter(|&i| out.h1[i] != h[i]).count();
    }
    ensure!(violations == 0, "{violations} violations");
    Ok(format!("{KERNEL_PROFILES} profiles of {KERNEL_SAMPLES} samples, 0 violations"))
}

fn criterion_5() -> Outcome {
    let mut done = 0;
    let mut seed = 0;
    while done < LOWER_INSTANCES {
        seed += 1;
        ensure!(seed < 10 * LOWER_INSTANCES, "too few valid instances");
        let n = 12 + (seed as usize % 10);
        let c = meshes::path_graph(n);
        let f = ScalarField::load(&c, &uniform_values(n, 0.0, 10.0, 20_000 + seed)).unwrap();
        let g = DiscreteGradient::build(&c, &f);
        let Some(p) = g.critical_ids().into_iter().find(|x| x.dim == 1) else { continue };
        let [u, w] = c.edge(p.index);
        let v = f.values();
        let floor =
            v[common::walk_down(v, w as usize, u as usize)].max(v[common::walk_down(v, u as usize, w as usize)]);
        let top = f.cell_value(&c, p);
        let r = uniform_values(2, 0.1, 0.9, 30_000 + seed);
        let a = floor + (top - floor) * r[0];
        let eps = (top - a) * r[1];
        let f2 = lower_critical_value(&c, &g, &f, p, a, eps).map_err(|e| format!("seed {seed}: {e}"))?;
        let val = f2.cell_value(&c, p);
        ensure!(val > a && val < a + eps, "seed {seed}: value {val} not in ({a}, {})", a + eps);
        g.validate_against(&c, &f2).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(DiscreteGradient::build(&c, &f2) == g, "seed {seed}: gradient changed");
        let run = common::path_run_above(&f, [u, w], a);
        for x in 0..n as u32 {
            if !run.contains(&x) {
                ensure!(f2.value(x).to_bits() == f.value(x).to_bits(), "seed {seed}: v{x} moved");
            }
        }
        done += 1;
    }
    Ok(format!(
        "{LOWER_INSTANCES} instances: value in (a, a + eps), gradient re-validates, other vertices bit-identical"
    ))
}

fn criterion_6(pool: &[Executed], simplify_runs: &[(String, f64, f64)]) -> Outcome {
    for x in pool {
        let moved = x.realized.max_abs_diff(&x.f);
        let bound = x.plan.persistence + x.plan.epsilon;
        ensure!(moved <= bound, "{}: moved {moved} > {bound}", x.label);
    }
    for (label, total, bound) in simplify_runs {
        ensure!(total <= bound, "{label}: total {total} > {bound}");
    }
    Ok(format!("{} single cancellations and {} simplify runs within bound", pool.len(), simplify_runs.len()))
}

fn criterion_7() -> Outcome {
    let (c, f, dip) = cylinder_fixture();
    ensure!(c.n_triangles() >= 48, "cylinder too small");
    let g = DiscreteGradient::build(&c, &f);
    let inner = interior_critical(&c, &g);
    ensure!(inner.len() == 2, "expected one interior pair, found {inner:?}");
    let q = CellId::vertex(dip);
    let p = *inner.iter().find(|x| x.dim == 1).ok_or("no interior saddle")?;
    ensure!(inner.contains(&q), "dip v{dip} is not critical");
    let plan = is_cancelable(&c, &g, &f, p, q, None).unwrap().map_err(|r| format!("rejected: {r}"))?;
    let g2 = cancel_pair(&c, &g, &plan).map_err(|e| e.to_string())?;
    let f2 = realize_function(&c, &g2, &f, &plan).map_err(|e| e.to_string())?;
    let left = interior_critical(&c, &DiscreteGradient::build(&c, &f2));
    ensure!(left.is_empty(), "interior critical cells remain: {left:?}");
    ensure!(interior_critical(&c, &g2).is_empty(), "cancelled gradient keeps interior cells");
    Ok(format!("cylinder with {} triangles: ({p}, {q}) cancelled, 0 interior critical cells", c.n_triangles()))
}

fn straddle_pipeline(c: &CellComplex, f: &ScalarField, p: CellId, q: CellId, a: f64) -> Result<(), String> {
    let g = DiscreteGradient::build(c, f);
    ensure!(f.cell_value(c, q) < a && a < f.cell_value(c, p), "pair does not straddle {a}");
    let eps = 0.1;
    let f1 = lower_critical_value(c, &g, f, p, a, eps).map_err(|e| e.to_string())?;
    let (f2, _) = raise_critical_value(c, &f1, q, a, eps).map_err(|e| e.to_string())?;
    let g2 = DiscreteGradient::build(c, &f2);
    ensure!(g2.census() == g.census(), "band moves changed the census");
    let plan = is_cancelable(c, &g2, &f2, p, q, None).unwrap().map_err(|r| format!("after moves: {r}"))?;
    let via = realize_function(c, &cancel_pair(c, &g2, &plan).map_err(|e| e.to_string())?, &f2, &plan)
        .map_err(|e| e.to_string())?;
    let direct_plan = is_cancelable(c, &g, f, p, q, None).unwrap().map_err(|r| format!("direct: {r}"))?;
    let direct_g = cancel_pair(c, &g, &direct_plan).map_err(|e| e.to_string())?;
    let direct = realize_function(c, &direct_g, f, &direct_plan).map_err(|e| e.to_string())?;
    let (a_census, b_census) =
        (DiscreteGradient::build(c, &via).census(), DiscreteGradient::build(c, &direct).census());
    ensure!(a_census == b_census && a_census == direct_g.census(), "pipeline {a_census:?} vs direct {b_census:?}");
    Ok(())
}

fn criterion_8() -> Outcome {
    let (c, f, p, q, a) = straddle_fixture();
    straddle_pipeline(&c, &f, p, q, a).map_err(|e| format!("path: {e}"))?;
    let (c, f, p, q, a) = straddle_cycle_fixture();
    straddle_pipeline(&c, &f, p, q, a).map_err(|e| format!("cycle: {e}"))?;
    Ok("path and cycle fixtures: lower p, raise q, cancel gives the direct census".into())
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    for (name, c) in common::small_complexes() {
        ensure!(c.n_cells() <= 12, "{name} has {} cells", c.n_cells());
        for seed in 0..25 {
            let f = field(&c, 40_000 + seed);
            let g = DiscreteGradient::build(&c, &f);
            ensure!(g.census() == common::oracle_census(&c, &f), "{name} seed {seed}: census");
            ensure!(
                common::library_pairs(&c, &f) == common::oracle_pairs(&c, &f),
                "{name} seed {seed}: persistence pairs"
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} fields on complexes of at most 12 cells agree with the brute-force oracle"))
}

fn criterion_10() -> Outcome {
    let (c, f) = Mixture::two_bumps().sample(TWO_BUMP_SEED).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (f2, report) = simplify(&c, &f, TWO_BUMP_THRESHOLD, None).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let g2 = DiscreteGradient::build(&c, &f2);
    let maxima = interior_critical(&c, &g2).into_iter().filter(|x| x.dim == 2).count();
    ensure!(maxima == 1, "{maxima} interior maxima survive");

    // the small bump's peak: highest vertex within 3 cells of its centre
    let near = |v: u32| {
        let (i, j) = ((v % 32) as f64, (v / 32) as f64);
        (i - SMALL_BUMP.0).hypot(j - SMALL_BUMP.1) <= 3.0
    };
    let peak =
        (0..c.n_vertices() as u32).filter(|&v| near(v)).max_by(|&a, &b| f.value(a).total_cmp(&f.value(b))).unwrap();
    let hit = report.plans.iter().find(|pl| {
        let cell: CellId = pl.p.parse().unwrap();
        cell.dim == 2 && c.vertices_of(cell).contains(&peak) && pl.p_value == f.value(peak)
    });
    let hit = hit.ok_or(format!("no executed plan removes the small bump's peak v{peak}"))?;
    let original = morse_forge::persistence_pairs(&c, &f)
        .into_iter()
        .find(|x| x.death.is_some_and(|d| d.cell.dim == 2 && f.max_vertex(&c, d.cell) == peak))
        .map_or(f64::NAN, |x| x.persistence);
    ensure!(took < TWO_BUMP_RUNTIME, "took {took:?}");
    Ok(format!(
        "seed {TWO_BUMP_SEED}: {} plans, 1 interior maximum left, small bump pair ({}, {}) executed at persistence {:.3} (input {:.3}), {took:.2?}",
        report.plans.len(),
        hit.p,
        hit.q,
        hit.persistence,
        original
    ))
}

#[test]
fn acceptance() {
    let pool = executed_pool();

    let (c, f) = Mixture::two_bumps().sample(TWO_BUMP_SEED).unwrap();
    let (_, scanned) = simplify(&c, &f, TWO_BUMP_THRESHOLD, Some(SCAN_SAMPLES)).expect("two-bump scan");
    let mut simplify_runs =
        vec![("two-bump scanned".to_string(), scanned.total_perturbation, scanned.perturbation_bound)];
    for (name, c) in
        [("octahedron", meshes::octahedron()), ("torus9", meshes::torus(3, 3)), ("cycle10", meshes::cycle_graph(10))]
    {
        for seed in 0..5 {
            let (_, r) = simplify(&c, &field(&c, 50_000 + seed), 8.0, None).expect("simplify");
            simplify_runs.push((format!("{name} seed {seed}"), r.total_perturbation, r.perturbation_bound));
        }
    }
    let transitions = scanned.plans.iter().filter(|p| p.transition.is_some()).count();

    let results: Vec<(&str, Outcome)> = vec![
        ("Morse relation", criterion_1()),
        ("cancellation contract", criterion_2(&pool, scanned.plans.len(), transitions)),
        ("hypothesis gating", criterion_3()),
        ("1-D kernel", criterion_4()),
        ("value lowering", criterion_5()),
        ("perturbation bound", criterion_6(&pool, &simplify_runs)),
        ("cylinder", criterion_7()),
        ("straddling pair", criterion_8()),
        ("brute-force oracle", criterion_9()),
        ("two-bump simplification", criterion_10()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
