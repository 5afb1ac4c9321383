//! Discrete gradients (acyclic matchings) built one lower star at a time,
//! critical cells, and V-path queries.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::complex::{CellComplex, CellId};
use crate::error::{MorseError, Result};
use crate::field::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalCell {
    pub cell: CellId,
    pub morse_index: u8,
    pub value: f64,
}

impl CriticalCell {
    pub fn of(c: &CellComplex, f: &ScalarField, cell: CellId) -> Self {
        CriticalCell { cell, morse_index: cell.dim, value: f.cell_value(c, cell) }
    }
}

/// A partial matching of cells with their cofaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteGradient {
    partner: [Vec<Option<CellId>>; 3],
}

impl DiscreteGradient {
    /// Empty matching: every cell critical.
    pub fn empty(c: &CellComplex) -> Self {
        DiscreteGradient { partner: [vec![None; c.n_vertices()], vec![None; c.n_edges()], vec![None; c.n_triangles()]] }
    }

    /// Matching from an explicit list of `(face, coface)` pairs.
    pub fn from_pairs(c: &CellComplex, pairs: &[(CellId, CellId)]) -> Result<Self> {
        let mut g = Self::empty(c);
        for &(s, t) in pairs {
            c.check(s)?;
            c.check(t)?;
            if t.dim != s.dim + 1 || !c.faces(t).contains(&s) {
                return Err(MorseError::InvalidMatching(format!("{s} is not a face of {t}")));
            }
            if g.partner(s).is_some() || g.partner(t).is_some() {
                return Err(MorseError::InvalidMatching(format!("cell matched twice in ({s}, {t})")));
            }
            g.set_pair(s, t);
        }
        Ok(g)
    }

    /// Lower-star matching: within each lower star, cells are handled in
    /// key order and paired with their unique available coface.
    pub fn build(c: &CellComplex, f: &ScalarField) -> Self {
        let mut g = Self::empty(c);
        for v in 0..c.n_vertices() as u32 {
            g.process_lower_star(c, f, v);
        }
        g
    }

    /// The gradient of `f` given `base`, which must already agree with it
    /// on every lower star outside `vertices`. The lower stars of
    /// `vertices` are matched afresh.
    pub fn rebuild_lower_stars(c: &CellComplex, f: &ScalarField, base: &DiscreteGradient, vertices: &[u32]) -> Self {
        let mut g = base.clone();
        for &v in vertices {
            g.unset(CellId::vertex(v));
            for &e in c.vertex_edges(v) {
                if f.max_vertex(c, CellId::edge(e)) == v {
                    g.unset(CellId::edge(e));
                }
            }
            for t in c.vertex_triangles(v) {
                if f.max_vertex(c, CellId::triangle(t)) == v {
                    g.unset(CellId::triangle(t));
                }
            }
        }
        for &v in vertices {
            g.process_lower_star(c, f, v);
        }
        g
    }

    fn process_lower_star(&mut self, c: &CellComplex, f: &ScalarField, v: u32) {
        let lower_edges: Vec<u32> =
            c.vertex_edges(v).iter().copied().filter(|&e| f.max_vertex(c, CellId::edge(e)) == v).collect();
        if lower_edges.is_empty() {
            return;
        }
        let lower_tris: Vec<u32> =
            c.vertex_triangles(v).into_iter().filter(|&t| f.max_vertex(c, CellId::triangle(t)) == v).collect();
        let key = |cell: CellId| (f.cell_key(c, cell), cell);

        // cells paired or declared critical within this lower star
        let mut classified = Classified::default();
        let in_star_edges = |t: u32| -> Vec<CellId> {
            c.triangle_edges(t).iter().copied().filter(|e| lower_edges.contains(e)).map(CellId::edge).collect()
        };
        let unclassified_faces = |t: u32, classified: &Classified| -> Vec<CellId> {
            in_star_edges(t).into_iter().filter(|e| !classified.contains(e)).collect()
        };
        let star_cofaces = |e: CellId| -> Vec<u32> {
            c.edge_triangles(e.index).iter().copied().filter(|t| lower_tris.contains(t)).collect()
        };

        let steepest = lower_edges.iter().map(|&e| CellId::edge(e)).min_by_key(|&e| key(e)).expect("nonempty");
        self.set_pair(CellId::vertex(v), steepest);
        classified.insert(steepest);

        let mut pq_zero: BTreeSet<([u32; 3], CellId)> =
            lower_edges.iter().map(|&e| CellId::edge(e)).filter(|&e| e != steepest).map(key).collect();
        let mut pq_one: BTreeSet<([u32; 3], CellId)> = BTreeSet::new();
        for t in star_cofaces(steepest) {
            if unclassified_faces(t, &classified).len() == 1 {
                pq_one.insert(key(CellId::triangle(t)));
            }
        }

        loop {
            while let Some((_, alpha)) = pq_one.pop_first() {
                if classified.contains(&alpha) {
                    continue;
                }
                let free = unclassified_faces(alpha.index, &classified);
                if free.is_empty() {
                    pq_zero.insert(key(alpha));
                } else {
                    let sigma = free[0];
                    self.set_pair(sigma, alpha);
                    classified.insert(sigma);
                    classified.insert(alpha);
                    pq_zero.remove(&key(sigma));
                    for t in star_cofaces(sigma) {
                        if !classified.contains(&CellId::triangle(t)) && unclassified_faces(t, &classified).len() == 1 {
                            pq_one.insert(key(CellId::triangle(t)));
                        }
                    }
                }
            }
            match pq_zero.pop_first() {
                Some((_, gamma)) => {
                    if classified.contains(&gamma) {
                        continue;
                    }
                    classified.insert(gamma);
                    if gamma.dim == 1 {
                        for t in star_cofaces(gamma) {
                            if !classified.contains(&CellId::triangle(t))
                                && unclassified_faces(t, &classified).len() == 1
                            {
                                pq_one.insert(key(CellId::triangle(t)));
                            }
                        }
                    }
                }
                None => break,
            }
        }
    }

    pub(crate) fn set_pair(&mut self, face: CellId, coface: CellId) {
        self.partner[face.dim as usize][face.index as usize] = Some(coface);
        self.partner[coface.dim as usize][coface.index as usize] = Some(face);
    }

    pub(crate) fn unset(&mut self, cell: CellId) {
        if let Some(p) = self.partner(cell) {
            self.partner[p.dim as usize][p.index as usize] = None;
        }
        self.partner[cell.dim as usize][cell.index as usize] = None;
    }

    pub fn partner(&self, cell: CellId) -> Option<CellId> {
        self.partner[cell.dim as usize][cell.index as usize]
    }

    /// Partner one dimension up, if any.
    pub fn up(&self, cell: CellId) -> Option<CellId> {
        self.partner(cell).filter(|p| p.dim > cell.dim)
    }

    /// Partner one dimension down, if any.
    pub fn down(&self, cell: CellId) -> Option<CellId> {
        self.partner(cell).filter(|p| p.dim < cell.dim)
    }

    pub fn is_critical(&self, cell: CellId) -> bool {
        self.partner(cell).is_none()
    }

    pub fn pairs(&self) -> Vec<(CellId, CellId)> {
        let mut out = Vec::new();
        for d in 0..2u8 {
            for (i, p) in self.partner[d as usize].iter().enumerate() {
                if let Some(t) = p {
                    if t.dim == d + 1 {
                        out.push((CellId::new(d, i as u32), *t));
                    }
                }
            }
        }
        out
    }

    pub fn critical_ids(&self) -> Vec<CellId> {
        (0..3u8)
            .flat_map(|d| {
                self.partner[d as usize]
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.is_none())
                    .map(move |(i, _)| CellId::new(d, i as u32))
            })
            .collect()
    }

    /// Critical cells sorted by (dimension, value, index).
    pub fn critical_cells(&self, c: &CellComplex, f: &ScalarField) -> Vec<CriticalCell> {
        let mut out: Vec<(u32, CriticalCell)> =
            self.critical_ids().into_iter().map(|cell| (f.cell_rank(c, cell), CriticalCell::of(c, f, cell))).collect();
        out.sort_by_key(|(r, cc)| (cc.cell.dim, *r, cc.cell.index));
        out.into_iter().map(|(_, cc)| cc).collect()
    }

    /// Number of critical cells per dimension.
    pub fn census(&self) -> [usize; 3] {
        let mut n = [0usize; 3];
        for (d, slot) in n.iter_mut().enumerate() {
            *slot = self.partner[d].iter().filter(|p| p.is_none()).count();
        }
        n
    }

    /// Stable digest of the matching, used to detect stale plans.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.partner.hash(&mut h);
        h.finish()
    }

    /// Checks that the matching is a symmetric face/coface matching with
    /// no closed V-path.
    pub fn check_acyclic(&self, c: &CellComplex) -> Result<()> {
        for cell in c.cells() {
            if let Some(p) = self.partner(cell) {
                if self.partner(p) != Some(cell) {
                    return Err(MorseError::InvalidMatching(format!("{cell} -> {p} is not symmetric")));
                }
                let (lo, hi) = if p.dim > cell.dim { (cell, p) } else { (p, cell) };
                if hi.dim != lo.dim + 1 || !c.faces(hi).contains(&lo) {
                    return Err(MorseError::InvalidMatching(format!("{lo} is not a face of {hi}")));
                }
            }
        }
        for d in 1..=c.dim() {
            // graph on d-cells: tau -> up(sigma) for free faces sigma
            let n = c.count(d);
            let mut color = vec![0u8; n];
            for s in 0..n {
                if color[s] != 0 {
                    continue;
                }
                let mut stack: Vec<(u32, Vec<u32>)> = vec![(s as u32, self.successors(c, CellId::new(d, s as u32)))];
                color[s] = 1;
                while let Some((node, succ)) = stack.last_mut() {
                    if let Some(nx) = succ.pop() {
                        match color[nx as usize] {
                            0 => {
                                color[nx as usize] = 1;
                                let s2 = self.successors(c, CellId::new(d, nx));
                                stack.push((nx, s2));
                            }
                            1 => return Err(MorseError::CycleDetected(CellId::new(d, nx))),
                            _ => {}
                        }
                    } else {
                        color[*node as usize] = 2;
                        stack.pop();
                    }
                }
            }
        }
        Ok(())
    }

    fn successors(&self, c: &CellComplex, tau: CellId) -> Vec<u32> {
        let own = self.down(tau);
        c.faces(tau)
            .into_iter()
            .filter(|&s| Some(s) != own)
            .filter_map(|s| self.up(s))
            .filter(|&t| t != tau)
            .map(|t| t.index)
            .collect()
    }

    /// Checks that the matching is a valid gradient for `f`: acyclic and
    /// every pair lies in a single lower star.
    pub fn validate_against(&self, c: &CellComplex, f: &ScalarField) -> Result<()> {
        self.check_acyclic(c)?;
        for (s, t) in self.pairs() {
            if f.max_vertex(c, s) != f.max_vertex(c, t) {
                return Err(MorseError::InvariantViolation(format!("pair ({s}, {t}) straddles two lower stars")));
            }
        }
        Ok(())
    }
}

/// Lower stars hold a handful of cells, so a vector beats a hash map.
#[derive(Default)]
struct Classified(Vec<CellId>);

impl Classified {
    fn contains(&self, cell: &CellId) -> bool {
        self.0.contains(cell)
    }

    fn insert(&mut self, cell: CellId) {
        self.0.push(cell);
    }
}

/// How a maximal V-path ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PathEnd {
    /// At an unmatched face.
    Critical(CellId),
    /// At a face matched downward: the flow continues in lower dimension.
    DeadEnd(CellId),
}

impl PathEnd {
    pub fn cell(&self) -> CellId {
        match *self {
            PathEnd::Critical(c) | PathEnd::DeadEnd(c) => c,
        }
    }
}

/// Alternating sequence tau_0 > sigma_0, tau_1 > sigma_1, ... of a descending V-path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VPath {
    pub cells: Vec<CellId>,
    pub end: PathEnd,
}

impl VPath {
    pub fn start(&self) -> CellId {
        self.cells[0]
    }

    pub fn terminal(&self) -> CellId {
        *self.cells.last().expect("paths are nonempty")
    }

    /// The upper-dimensional cells tau_i.
    pub fn upper(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells.iter().step_by(2).copied()
    }

    /// The lower-dimensional cells sigma_i.
    pub fn lower(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells.iter().skip(1).step_by(2).copied()
    }
}

const MAX_PATHS: usize = 1_000_000;

/// All maximal descending V-paths from a critical cell, with multiplicity.
pub fn descending_paths(c: &CellComplex, g: &DiscreteGradient, start: CellId) -> Result<Vec<VPath>> {
    c.check(start)?;
    if !g.is_critical(start) {
        return Err(MorseError::NotCritical(start));
    }
    if start.dim == 0 {
        return Err(MorseError::InvalidArgument("descending paths start at cells of dimension >= 1".into()));
    }
    let mut out = Vec::new();
    let mut prefix = vec![start];
    let mut on_path = vec![false; c.count(start.dim)];
    on_path[start.index as usize] = true;
    walk(c, g, &mut prefix, &mut on_path, &mut out)?;
    Ok(out)
}

fn walk(
    c: &CellComplex,
    g: &DiscreteGradient,
    prefix: &mut Vec<CellId>,
    on_path: &mut [bool],
    out: &mut Vec<VPath>,
) -> Result<()> {
    let tau = *prefix.last().unwrap();
    let own = g.down(tau);
    for sigma in c.faces(tau) {
        if Some(sigma) == own {
            continue;
        }
        prefix.push(sigma);
        match g.partner(sigma) {
            None => {
                if out.len() >= MAX_PATHS {
                    return Err(MorseError::TooManyPaths(MAX_PATHS));
                }
                out.push(VPath { cells: prefix.clone(), end: PathEnd::Critical(sigma) });
            }
            Some(next) if next.dim > sigma.dim => {
                if on_path[next.index as usize] {
                    return Err(MorseError::CycleDetected(next));
                }
                on_path[next.index as usize] = true;
                prefix.push(next);
                walk(c, g, prefix, on_path, out)?;
                prefix.pop();
                on_path[next.index as usize] = false;
            }
            Some(_) => {
                if out.len() >= MAX_PATHS {
                    return Err(MorseError::TooManyPaths(MAX_PATHS));
                }
                out.push(VPath { cells: prefix.clone(), end: PathEnd::DeadEnd(sigma) });
            }
        }
        prefix.pop();
    }
    Ok(())
}

/// Descending paths from `p` that end exactly at critical `q`.
pub fn connecting_paths(c: &CellComplex, g: &DiscreteGradient, p: CellId, q: CellId) -> Result<Vec<VPath>> {
    if p.dim != q.dim + 1 {
        return Err(MorseError::IndexMismatch { p_dim: p.dim, q_dim: q.dim });
    }
    Ok(descending_paths(c, g, p)?.into_iter().filter(|path| path.end == PathEnd::Critical(q)).collect())
}

/// The V-path DAG below a critical cell, with saturating path counts.
#[derive(Debug, Clone)]
pub struct PathDag {
    pub start: CellId,
    /// Reachable upper cells in topological order (start first).
    pub nodes: Vec<CellId>,
    /// Number of paths from `start` reaching each node.
    pub paths_to: HashMap<CellId, u64>,
    /// Number of maximal paths per terminal.
    pub terminals: HashMap<PathEnd, u64>,
}

impl PathDag {
    pub fn build(c: &CellComplex, g: &DiscreteGradient, start: CellId) -> Result<Self> {
        if start.dim == 0 {
            return Err(MorseError::InvalidArgument("path DAG needs a start of dimension >= 1".into()));
        }
        let succ = |tau: CellId| -> Vec<(CellId, Option<CellId>)> {
            let own = g.down(tau);
            c.faces(tau).into_iter().filter(|&s| Some(s) != own).map(|s| (s, g.up(s))).collect()
        };
        // iterative DFS for reverse postorder
        let mut state: HashMap<CellId, u8> = HashMap::new();
        let mut post = Vec::new();
        let mut stack: Vec<(CellId, Vec<CellId>)> = Vec::new();
        let next_of = |tau: CellId| -> Vec<CellId> { succ(tau).into_iter().filter_map(|(_, n)| n).collect() };
        state.insert(start, 1);
        stack.push((start, next_of(start)));
        while let Some((node, rest)) = stack.last_mut() {
            if let Some(nx) = rest.pop() {
                match state.get(&nx).copied().unwrap_or(0) {
                    0 => {
                        state.insert(nx, 1);
                        let r = next_of(nx);
                        stack.push((nx, r));
                    }
                    1 => return Err(MorseError::CycleDetected(nx)),
                    _ => {}
                }
            } else {
                state.insert(*node, 2);
                post.push(*node);
                stack.pop();
            }
        }
        post.reverse();
        let mut paths_to: HashMap<CellId, u64> = HashMap::new();
        let mut terminals: HashMap<PathEnd, u64> = HashMap::new();
        paths_to.insert(start, 1);
        for &tau in &post {
            let n = paths_to.get(&tau).copied().unwrap_or(0);
            for (s, next) in succ(tau) {
                match next {
                    Some(nx) => {
                        let e = paths_to.entry(nx).or_insert(0);
                        *e = e.saturating_add(n);
                    }
                    None => {
                        let end = if g.is_critical(s) { PathEnd::Critical(s) } else { PathEnd::DeadEnd(s) };
                        let e = terminals.entry(end).or_insert(0);
                        *e = e.saturating_add(n);
                    }
                }
            }
        }
        Ok(PathDag { start, nodes: post, paths_to, terminals })
    }

    pub fn count_to(&self, q: CellId) -> u64 {
        self.terminals.get(&PathEnd::Critical(q)).copied().unwrap_or(0)
    }

    /// Every cell lying on some maximal path (upper cells and their free faces).
    pub fn cells(&self, c: &CellComplex, g: &DiscreteGradient) -> Vec<CellId> {
        let mut out = Vec::new();
        for &tau in &self.nodes {
            out.push(tau);
            let own = g.down(tau);
            out.extend(c.faces(tau).into_iter().filter(|&s| Some(s) != own));
        }
        out.sort();
        out.dedup();
        out
    }

    /// Upper cells lying on a path from `start` to `target`, i.e. nodes that
    /// both are reachable and reach the terminal.
    pub fn cells_toward(&self, c: &CellComplex, g: &DiscreteGradient, target: PathEnd) -> Vec<CellId> {
        let mut reaches: HashMap<CellId, bool> = HashMap::new();
        for &tau in self.nodes.iter().rev() {
            let own = g.down(tau);
            let hit = c.faces(tau).into_iter().filter(|&s| Some(s) != own).any(|s| match g.up(s) {
                Some(nx) => reaches.get(&nx).copied().unwrap_or(false),
                None => {
                    let end = if g.is_critical(s) { PathEnd::Critical(s) } else { PathEnd::DeadEnd(s) };
                    end == target
                }
            });
            reaches.insert(tau, hit);
        }
        self.nodes.iter().copied().filter(|t| reaches[t]).collect()
    }
}

/// Follows the vertex flow (steepest descent) from `v` to a critical vertex.
pub fn vertex_flow_floor(c: &CellComplex, g: &DiscreteGradient, v: u32) -> u32 {
    let mut x = v;
    let mut steps = 0usize;
    while let Some(e) = g.up(CellId::vertex(x)) {
        let [a, b] = c.edge(e.index);
        x = if a == x { b } else { a };
        steps += 1;
        debug_assert!(steps <= c.n_vertices(), "vertex flow cycles");
        if steps > c.n_vertices() {
            break;
        }
    }
    x
}

/// Value at which the flow continuing a path ending at `end` settles: the
/// terminal's own value when critical, otherwise the floor of the vertex
/// flow leaving the dead end.
pub fn end_value(c: &CellComplex, g: &DiscreteGradient, f: &ScalarField, end: PathEnd) -> f64 {
    match end {
        PathEnd::Critical(cell) => f.cell_value(c, cell),
        PathEnd::DeadEnd(cell) if cell.dim == 0 => f.value(vertex_flow_floor(c, g, cell.index)),
        PathEnd::DeadEnd(cell) => {
            let paired = g.down(cell).expect("dead ends are matched downward").index;
            let [a, b] = c.edge(cell.index);
            let other = if a == paired { b } else { a };
            f.value(vertex_flow_floor(c, g, other))
        }
    }
}
