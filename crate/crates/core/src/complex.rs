//! Simplicial complexes of dimension at most two.
//!
//! Cells are addressed by [`CellId`] (dimension, dense index). Edges and
//! triangles store their vertices in ascending order; the vertex-tuple to
//! [`CellId`] dictionaries are kept for I/O and fixture construction.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{MorseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub dim: u8,
    pub index: u32,
}

impl CellId {
    pub const fn new(dim: u8, index: u32) -> Self {
        CellId { dim, index }
    }

    pub const fn vertex(index: u32) -> Self {
        CellId { dim: 0, index }
    }

    pub const fn edge(index: u32) -> Self {
        CellId { dim: 1, index }
    }

    pub const fn triangle(index: u32) -> Self {
        CellId { dim: 2, index }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dim, self.index)
    }
}

impl FromStr for CellId {
    type Err = MorseError;

    fn from_str(s: &str) -> Result<Self> {
        let (d, i) = s
            .split_once(':')
            .ok_or_else(|| MorseError::Parse(format!("cell id `{s}` is not of the form dim:index")))?;
        let dim: u8 = d.trim().parse().map_err(|_| MorseError::Parse(format!("bad dimension in `{s}`")))?;
        let index: u32 = i.trim().parse().map_err(|_| MorseError::Parse(format!("bad index in `{s}`")))?;
        if dim > 2 {
            return Err(MorseError::Parse(format!("dimension {dim} > 2 in `{s}`")));
        }
        Ok(CellId { dim, index })
    }
}

/// An immutable simplicial complex with face/coface incidence.
#[derive(Debug, Clone)]
pub struct CellComplex {
    n_vertices: usize,
    edges: Vec<[u32; 2]>,
    triangles: Vec<[u32; 3]>,
    /// Edge indices of each triangle.
    triangle_edges: Vec<[u32; 3]>,
    vertex_cofaces: Vec<Vec<u32>>,
    edge_cofaces: Vec<Vec<u32>>,
    edge_lookup: HashMap<[u32; 2], u32>,
    triangle_lookup: HashMap<[u32; 3], u32>,
    boundary: [Vec<bool>; 3],
    coords: Option<Vec<[f64; 3]>>,
}

fn sorted2(a: u32, b: u32) -> [u32; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn sorted3(t: [u32; 3]) -> [u32; 3] {
    let mut t = t;
    t.sort_unstable();
    t
}

impl CellComplex {
    /// Builds a 2-complex from triangles, instantiating every implied edge once.
    pub fn from_triangles(n_vertices: usize, triangles: &[[u32; 3]]) -> Result<Self> {
        let mut tri_list = Vec::with_capacity(triangles.len());
        let mut triangle_lookup = HashMap::with_capacity(triangles.len());
        for t in triangles {
            for &v in t {
                if v as usize >= n_vertices {
                    return Err(MorseError::DanglingVertexIndex { index: v, count: n_vertices });
                }
            }
            let s = sorted3(*t);
            if s[0] == s[1] || s[1] == s[2] {
                return Err(MorseError::DegenerateSimplex(t.to_vec()));
            }
            if triangle_lookup.insert(s, tri_list.len() as u32).is_some() {
                return Err(MorseError::DuplicateCell(s.to_vec()));
            }
            tri_list.push(s);
        }

        let mut edges = Vec::new();
        let mut edge_lookup: HashMap<[u32; 2], u32> = HashMap::new();
        let mut triangle_edges = Vec::with_capacity(tri_list.len());
        for s in &tri_list {
            let mut te = [0u32; 3];
            for (k, pair) in [[s[0], s[1]], [s[0], s[2]], [s[1], s[2]]].into_iter().enumerate() {
                let idx = *edge_lookup.entry(pair).or_insert_with(|| {
                    edges.push(pair);
                    (edges.len() - 1) as u32
                });
                te[k] = idx;
            }
            triangle_edges.push(te);
        }
        Self::assemble(n_vertices, edges, edge_lookup, tri_list, triangle_edges, triangle_lookup)
    }

    /// Builds a 1-complex (graph) from an edge list.
    pub fn from_edges(n_vertices: usize, edge_list: &[[u32; 2]]) -> Result<Self> {
        let mut edges = Vec::with_capacity(edge_list.len());
        let mut edge_lookup = HashMap::with_capacity(edge_list.len());
        for e in edge_list {
            for &v in e {
                if v as usize >= n_vertices {
                    return Err(MorseError::DanglingVertexIndex { index: v, count: n_vertices });
                }
            }
            if e[0] == e[1] {
                return Err(MorseError::DegenerateSimplex(e.to_vec()));
            }
            let s = sorted2(e[0], e[1]);
            if edge_lookup.insert(s, edges.len() as u32).is_some() {
                return Err(MorseError::DuplicateCell(s.to_vec()));
            }
            edges.push(s);
        }
        Self::assemble(n_vertices, edges, edge_lookup, Vec::new(), Vec::new(), HashMap::new())
    }

    fn assemble(
        n_vertices: usize,
        edges: Vec<[u32; 2]>,
        edge_lookup: HashMap<[u32; 2], u32>,
        triangles: Vec<[u32; 3]>,
        triangle_edges: Vec<[u32; 3]>,
        triangle_lookup: HashMap<[u32; 3], u32>,
    ) -> Result<Self> {
        let mut vertex_cofaces = vec![Vec::new(); n_vertices];
        for (i, e) in edges.iter().enumerate() {
            vertex_cofaces[e[0] as usize].push(i as u32);
            vertex_cofaces[e[1] as usize].push(i as u32);
        }
        let mut edge_cofaces = vec![Vec::new(); edges.len()];
        for (t, te) in triangle_edges.iter().enumerate() {
            for &e in te {
                edge_cofaces[e as usize].push(t as u32);
            }
        }
        for (i, cof) in edge_cofaces.iter().enumerate() {
            if cof.len() > 2 {
                return Err(MorseError::NonManifoldEdge(edges[i][0], edges[i][1]));
            }
        }

        let mut boundary = [vec![false; n_vertices], vec![false; edges.len()], vec![false; triangles.len()]];
        if triangles.is_empty() {
            // graphs: endpoints of degree one
            for v in 0..n_vertices {
                if vertex_cofaces[v].len() == 1 {
                    boundary[0][v] = true;
                }
            }
        } else {
            for (i, cof) in edge_cofaces.iter().enumerate() {
                if cof.len() == 1 {
                    boundary[1][i] = true;
                    boundary[0][edges[i][0] as usize] = true;
                    boundary[0][edges[i][1] as usize] = true;
                }
            }
        }

        Ok(CellComplex {
            n_vertices,
            edges,
            triangles,
            triangle_edges,
            vertex_cofaces,
            edge_cofaces,
            edge_lookup,
            triangle_lookup,
            boundary,
            coords: None,
        })
    }

    /// Attaches vertex coordinates (used only for report output).
    pub fn with_coords(mut self, coords: Vec<[f64; 3]>) -> Result<Self> {
        if coords.len() != self.n_vertices {
            return Err(MorseError::LengthMismatch { expected: self.n_vertices, got: coords.len() });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn coords(&self) -> Option<&[[f64; 3]]> {
        self.coords.as_deref()
    }

    /// Top dimension (0, 1 or 2).
    pub fn dim(&self) -> u8 {
        if !self.triangles.is_empty() {
            2
        } else if !self.edges.is_empty() {
            1
        } else {
            0
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn count(&self, dim: u8) -> usize {
        match dim {
            0 => self.n_vertices,
            1 => self.edges.len(),
            2 => self.triangles.len(),
            _ => 0,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.n_vertices + self.edges.len() + self.triangles.len()
    }

    pub fn contains(&self, c: CellId) -> bool {
        (c.index as usize) < self.count(c.dim)
    }

    pub fn check(&self, c: CellId) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(MorseError::UnknownCell(c))
        }
    }

    /// All cells in (dimension, index) order.
    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..=2u8).flat_map(move |d| (0..self.count(d) as u32).map(move |i| CellId::new(d, i)))
    }

    pub fn edge(&self, e: u32) -> [u32; 2] {
        self.edges[e as usize]
    }

    pub fn triangle(&self, t: u32) -> [u32; 3] {
        self.triangles[t as usize]
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle_edges(&self, t: u32) -> [u32; 3] {
        self.triangle_edges[t as usize]
    }

    pub fn find_edge(&self, a: u32, b: u32) -> Option<u32> {
        self.edge_lookup.get(&sorted2(a, b)).copied()
    }

    pub fn find_triangle(&self, t: [u32; 3]) -> Option<u32> {
        self.triangle_lookup.get(&sorted3(t)).copied()
    }

    /// Cell id for a vertex tuple of length 1, 2 or 3.
    pub fn find_cell(&self, verts: &[u32]) -> Option<CellId> {
        match verts {
            [v] if (*v as usize) < self.n_vertices => Some(CellId::vertex(*v)),
            [a, b] => self.find_edge(*a, *b).map(CellId::edge),
            [a, b, c] => self.find_triangle([*a, *b, *c]).map(CellId::triangle),
            _ => None,
        }
    }

    /// Vertices spanning a cell, ascending.
    pub fn vertices_of(&self, c: CellId) -> Vec<u32> {
        match c.dim {
            0 => vec![c.index],
            1 => self.edges[c.index as usize].to_vec(),
            _ => self.triangles[c.index as usize].to_vec(),
        }
    }

    /// Codimension-one faces.
    pub fn faces(&self, c: CellId) -> Vec<CellId> {
        match c.dim {
            0 => Vec::new(),
            1 => self.edges[c.index as usize].iter().map(|&v| CellId::vertex(v)).collect(),
            _ => self.triangle_edges[c.index as usize].iter().map(|&e| CellId::edge(e)).collect(),
        }
    }

    /// Codimension-one cofaces.
    pub fn cofaces(&self, c: CellId) -> Vec<CellId> {
        match c.dim {
            0 => self.vertex_cofaces[c.index as usize].iter().map(|&e| CellId::edge(e)).collect(),
            1 => self.edge_cofaces[c.index as usize].iter().map(|&t| CellId::triangle(t)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn vertex_edges(&self, v: u32) -> &[u32] {
        &self.vertex_cofaces[v as usize]
    }

    pub fn edge_triangles(&self, e: u32) -> &[u32] {
        &self.edge_cofaces[e as usize]
    }

    /// Neighbouring vertices of `v` along edges.
    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.vertex_cofaces[v as usize].iter().map(move |&e| {
            let [a, b] = self.edges[e as usize];
            if a == v {
                b
            } else {
                a
            }
        })
    }

    /// Triangles incident to vertex `v`, each reported once.
    pub fn vertex_triangles(&self, v: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self.vertex_cofaces[v as usize]
            .iter()
            .flat_map(|&e| self.edge_cofaces[e as usize].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_boundary(&self, c: CellId) -> bool {
        self.boundary[c.dim as usize][c.index as usize]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Checks the structural invariants; used by `verify`.
    pub fn validate(&self) -> Result<()> {
        for (t, te) in self.triangle_edges.iter().enumerate() {
            let tri = self.triangles[t];
            for &e in te {
                let [a, b] = self.edges[e as usize];
                if !tri.contains(&a) || !tri.contains(&b) {
                    return Err(MorseError::InvariantViolation(format!("triangle {t} lists foreign edge {e}")));
                }
                if !self.edge_cofaces[e as usize].contains(&(t as u32)) {
                    return Err(MorseError::InvariantViolation(format!("edge {e} misses coface {t}")));
                }
            }
            // every vertex of the triangle is shared by exactly two of its edges
            for &v in &tri {
                let n = te.iter().filter(|&&e| self.edges[e as usize].contains(&v)).count();
                if n != 2 {
                    return Err(MorseError::InvariantViolation(format!(
                        "triangle {t} fails boundary-of-boundary at {v}"
                    )));
                }
            }
        }
        for (e, cof) in self.edge_cofaces.iter().enumerate() {
            if cof.len() > 2 {
                let [a, b] = self.edges[e];
                return Err(MorseError::NonManifoldEdge(a, b));
            }
            for &v in &self.edges[e] {
                if !self.vertex_cofaces[v as usize].contains(&(e as u32)) {
                    return Err(MorseError::InvariantViolation(format!("vertex {v} misses coface {e}")));
                }
            }
        }
        Ok(())
    }
}
