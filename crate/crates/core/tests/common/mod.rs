//! Brute-force oracles and small fixtures shared by the integration tests.
//!
//! Nothing here calls the library's gradient or persistence code: sublevel
//! homology is computed from boundary matrices over Z/2 and matchings are
//! enumerated exhaustively.

#![allow(dead_code)]

use std::collections::BTreeMap;

use morse_forge::{meshes, CellComplex, CellId, ScalarField};

/// Complexes with at most 12 cells.
pub fn small_complexes() -> Vec<(&'static str, CellComplex)> {
    let mut out: Vec<(&'static str, CellComplex)> = vec![
        ("path2", meshes::path_graph(2)),
        ("path3", meshes::path_graph(3)),
        ("path4", meshes::path_graph(4)),
        ("path5", meshes::path_graph(5)),
        ("path6", meshes::path_graph(6)),
        ("cycle3", meshes::cycle_graph(3)),
        ("cycle4", meshes::cycle_graph(4)),
        ("cycle5", meshes::cycle_graph(5)),
        ("cycle6", meshes::cycle_graph(6)),
        ("triangle", CellComplex::from_triangles(3, &[[0, 1, 2]]).unwrap()),
        ("square", CellComplex::from_triangles(4, &[[0, 1, 2], [0, 2, 3]]).unwrap()),
        ("strip", CellComplex::from_triangles(5, &[[0, 1, 2], [1, 2, 3], [2, 3, 4]]).unwrap()),
        ("fan", CellComplex::from_triangles(5, &[[0, 1, 2], [0, 2, 3], [0, 3, 4]]).unwrap()),
        ("bowtie_graph", CellComplex::from_edges(5, &[[0, 1], [1, 2], [2, 0], [2, 3], [3, 4], [4, 2]]).unwrap()),
    ];
    out.retain(|(_, c)| c.n_cells() <= 12);
    out
}

fn rank_gf2(vectors: impl IntoIterator<Item = u64>) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Kernel of a map given by its column images, as bitmasks over the domain.
fn kernel_gf2(columns: &[(usize, u64)]) -> Vec<u64> {
    // rows: (image, combination of domain cells)
    let mut rows: Vec<(u64, u64)> = columns.iter().map(|&(i, img)| (img, 1u64 << i)).collect();
    let mut kernel = Vec::new();
    let mut pivots: Vec<(u64, u64)> = Vec::new();
    for (mut img, mut comb) in rows.drain(..) {
        for &(pi, pc) in &pivots {
            if img ^ pi < img {
                img ^= pi;
                comb ^= pc;
            }
        }
        if img == 0 {
            kernel.push(comb);
        } else {
            pivots.push((img, comb));
            pivots.sort_unstable_by_key(|p| std::cmp::Reverse(p.0));
        }
    }
    kernel
}

/// Vertex order by `(value, index)`.
pub fn vertex_ranks(f: &ScalarField) -> Vec<usize> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f.values()[a].total_cmp(&f.values()[b]).then(a.cmp(&b)));
    let mut rank = vec![0; f.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    rank
}

fn cell_level(c: &CellComplex, rank: &[usize], cell: CellId) -> usize {
    c.vertices_of(cell).into_iter().map(|v| rank[v as usize]).max().unwrap()
}

fn boundary_mask(c: &CellComplex, cell: CellId) -> u64 {
    c.faces(cell).into_iter().fold(0, |m, s| m | (1u64 << s.index))
}

/// Sublevel persistence from rank functions. Keys are
/// `(dim, birth level, death level)` with `None` for essential classes;
/// values are multiplicities.
pub type LevelPairs = BTreeMap<(u8, usize, Option<usize>), usize>;

pub fn oracle_pairs(c: &CellComplex, f: &ScalarField) -> LevelPairs {
    let rank = vertex_ranks(f);
    let n = c.n_vertices();
    let level = |cell: CellId| cell_level(c, &rank, cell);
    // beta_k(i, j): rank of H_k(K_i) -> H_k(K_j); i = None is the empty complex
    let beta = |k: u8, i: Option<usize>, j: usize| -> usize {
        let Some(i) = i else { return 0 };
        let cols: Vec<(usize, u64)> = (0..c.count(k))
            .map(|x| CellId::new(k, x as u32))
            .filter(|&x| level(x) <= i)
            .map(|x| (x.index as usize, if k == 0 { 0 } else { boundary_mask(c, x) }))
            .collect();
        let cycles = kernel_gf2(&cols);
        let bounds: Vec<u64> = if k + 1 > c.dim() {
            Vec::new()
        } else {
            (0..c.count(k + 1))
                .map(|x| CellId::new(k + 1, x as u32))
                .filter(|&x| level(x) <= j)
                .map(|x| boundary_mask(c, x))
                .collect()
        };
        let rb = rank_gf2(bounds.iter().copied());
        rank_gf2(cycles.iter().copied().chain(bounds.iter().copied())) - rb
    };
    let prev = |i: usize| i.checked_sub(1);
    let mut out = LevelPairs::new();
    for k in 0..=c.dim() {
        for i in 0..n {
            for j in i + 1..n {
                let mu = beta(k, Some(i), j - 1) as i64 - beta(k, Some(i), j) as i64 - beta(k, prev(i), j - 1) as i64
                    + beta(k, prev(i), j) as i64;
                assert!(mu >= 0, "negative multiplicity");
                if mu > 0 {
                    *out.entry((k, i, Some(j))).or_default() += mu as usize;
                }
            }
            let mu = beta(k, Some(i), n - 1) as i64 - beta(k, prev(i), n - 1) as i64;
            assert!(mu >= 0, "negative multiplicity");
            if mu > 0 {
                *out.entry((k, i, None)).or_default() += mu as usize;
            }
        }
    }
    out
}

/// Critical census implied by the sublevel homology changes.
pub fn oracle_census(c: &CellComplex, f: &ScalarField) -> [usize; 3] {
    let mut census = [0; 3];
    for (&(k, _, death), &m) in &oracle_pairs(c, f) {
        census[k as usize] += m;
        if death.is_some() {
            census[k as usize + 1] += m;
        }
    }
    census
}

/// Library persistence pairs in the oracle's key format.
pub fn library_pairs(c: &CellComplex, f: &ScalarField) -> LevelPairs {
    let rank = vertex_ranks(f);
    let mut out = LevelPairs::new();
    for p in morse_forge::persistence_pairs(c, f) {
        let b = cell_level(c, &rank, p.birth.cell);
        let d = p.death.map(|d| cell_level(c, &rank, d.cell));
        *out.entry((p.birth.cell.dim, b, d)).or_default() += 1;
    }
    out
}

/// Every acyclic matching whose pairs lie inside one lower star, searched
/// one lower star at a time. Returns the census of each matching with the
/// fewest critical cells; matchings in different lower stars cannot form a
/// closed V-path because a V-path never climbs to a higher lower star.
pub fn optimal_matching_censuses(c: &CellComplex, f: &ScalarField) -> Vec<[usize; 3]> {
    let rank = vertex_ranks(f);
    let mut stars: BTreeMap<usize, Vec<CellId>> = BTreeMap::new();
    for cell in c.cells() {
        stars.entry(cell_level(c, &rank, cell)).or_default().push(cell);
    }
    let mut totals: Vec<[usize; 3]> = vec![[0; 3]];
    for cells in stars.values() {
        let edges: Vec<(usize, usize)> = (0..cells.len())
            .flat_map(|a| (0..cells.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| cells[b].dim == cells[a].dim + 1 && c.faces(cells[b]).contains(&cells[a]))
            .collect();
        let mut best: Vec<[usize; 3]> = Vec::new();
        let mut best_count = usize::MAX;
        let mut partner = vec![None; cells.len()];
        enumerate(&edges, 0, &mut partner, &mut |partner| {
            if !acyclic(c, cells, partner) {
                return;
            }
            let mut census = [0; 3];
            for (i, p) in partner.iter().enumerate() {
                if p.is_none() {
                    census[cells[i].dim as usize] += 1;
                }
            }
            let count: usize = census.iter().sum();
            if count < best_count {
                best_count = count;
                best.clear();
            }
            if count == best_count && !best.contains(&census) {
                best.push(census);
            }
        });
        totals =
            totals.iter().flat_map(|t| best.iter().map(move |b| [t[0] + b[0], t[1] + b[1], t[2] + b[2]])).collect();
        totals.sort_unstable();
        totals.dedup();
    }
    totals
}

fn enumerate(
    edges: &[(usize, usize)],
    from: usize,
    partner: &mut Vec<Option<usize>>,
    visit: &mut dyn FnMut(&[Option<usize>]),
) {
    visit(partner);
    for k in from..edges.len() {
        let (a, b) = edges[k];
        if partner[a].is_none() && partner[b].is_none() {
            partner[a] = Some(b);
            partner[b] = Some(a);
            enumerate(edges, k + 1, partner, visit);
            partner[a] = None;
            partner[b] = None;
        }
    }
}

/// No closed V-path among the star's cells: the directed graph with
/// `face -> coface` for matched pairs and `coface -> face` otherwise has
/// no cycle.
fn acyclic(c: &CellComplex, cells: &[CellId], partner: &[Option<usize>]) -> bool {
    let n = cells.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, &tau) in cells.iter().enumerate() {
        for sigma in c.faces(tau) {
            if let Some(a) = cells.iter().position(|&x| x == sigma) {
                if partner[a] == Some(b) {
                    succ[a].push(b);
                } else {
                    succ[b].push(a);
                }
            }
        }
    }
    let mut state = vec![0u8; n];
    fn dfs(v: usize, succ: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &succ[v] {
            if state[w] == 1 || (state[w] == 0 && !dfs(w, succ, state)) {
                return false;
            }
        }
        state[v] = 2;
        true
    }
    (0..n).all(|v| state[v] != 0 || dfs(v, &succ, &mut state))
}

/// 1-D oracle: the maximal run of vertices above `a` around the edge `p` of
/// a path graph.
pub fn path_run_above(f: &ScalarField, edge: [u32; 2], a: f64) -> Vec<u32> {
    let v = f.values();
    let (mut lo, mut hi) = (edge[0] as usize, edge[1] as usize);
    while lo > 0 && v[lo - 1] > a {
        lo -= 1;
    }
    while hi + 1 < v.len() && v[hi + 1] > a {
        hi += 1;
    }
    (lo as u32..=hi as u32).filter(|&x| v[x as usize] > a).collect()
}

/// 1-D oracle: the minimum reached by walking strictly downhill from
/// vertex `start` away from `from`.
pub fn walk_down(values: &[f64], from: usize, start: usize) -> usize {
    let mut prev = from;
    let mut cur = start;
    loop {
        let next = if cur > prev { cur + 1 } else { cur.wrapping_sub(1) };
        if next >= values.len() || values[next] >= values[cur] {
            return cur;
        }
        prev = cur;
        cur = next;
    }
}
