//! Vertex scalar fields with a strict total order.
//!
//! Vertices compare lexicographically on `(value, vertex index)`, so equal
//! samples are ordered by index. A cell takes the value of its maximum
//! vertex under that order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::complex::{CellComplex, CellId};
use crate::error::{MorseError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
    /// Position of each vertex in the total order.
    rank: Vec<u32>,
}

fn vertex_cmp(values: &[f64], a: usize, b: usize) -> Ordering {
    values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b))
}

impl ScalarField {
    /// Loads one value per vertex of `c`.
    pub fn load(c: &CellComplex, per_vertex: &[f64]) -> Result<Self> {
        if per_vertex.len() != c.n_vertices() {
            return Err(MorseError::LengthMismatch { expected: c.n_vertices(), got: per_vertex.len() });
        }
        Self::from_values(per_vertex.to_vec())
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MorseError::NonFiniteValue(i));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| vertex_cmp(&values, a, b));
        let mut rank = vec![0u32; values.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r as u32;
        }
        Ok(ScalarField { values, rank })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: u32) -> f64 {
        self.values[v as usize]
    }

    pub fn rank(&self, v: u32) -> u32 {
        self.rank[v as usize]
    }

    /// Vertices in ascending order.
    pub fn order(&self) -> Vec<u32> {
        let mut o = vec![0u32; self.rank.len()];
        for (v, &r) in self.rank.iter().enumerate() {
            o[r as usize] = v as u32;
        }
        o
    }

    pub fn less(&self, a: u32, b: u32) -> bool {
        self.rank[a as usize] < self.rank[b as usize]
    }

    /// Maximum vertex of a cell under the total order.
    pub fn max_vertex(&self, c: &CellComplex, cell: CellId) -> u32 {
        let top = |vs: &[u32]| *vs.iter().max_by_key(|&&v| self.rank[v as usize]).expect("nonempty cell");
        match cell.dim {
            0 => cell.index,
            1 => top(&c.edge(cell.index)),
            _ => top(&c.triangle(cell.index)),
        }
    }

    pub fn cell_value(&self, c: &CellComplex, cell: CellId) -> f64 {
        self.value(self.max_vertex(c, cell))
    }

    pub fn cell_rank(&self, c: &CellComplex, cell: CellId) -> u32 {
        self.rank(self.max_vertex(c, cell))
    }

    /// Lexicographic key used inside a lower star: ranks of the cell's
    /// vertices in descending order, padded with zero, shifted by one so a
    /// shorter tuple sorts first.
    pub fn cell_key(&self, c: &CellComplex, cell: CellId) -> [u32; 3] {
        let r = |v: u32| self.rank[v as usize] + 1;
        let mut k = match cell.dim {
            0 => [r(cell.index), 0, 0],
            1 => {
                let [a, b] = c.edge(cell.index);
                [r(a), r(b), 0]
            }
            _ => {
                let [a, b, d] = c.triangle(cell.index);
                [r(a), r(b), r(d)]
            }
        };
        k.sort_unstable_by(|a, b| b.cmp(a));
        k
    }

    /// Cells whose maximum vertex is `v`.
    pub fn lower_star(&self, c: &CellComplex, v: u32) -> Result<Vec<CellId>> {
        c.check(CellId::vertex(v))?;
        let mut out = vec![CellId::vertex(v)];
        for &e in c.vertex_edges(v) {
            if self.max_vertex(c, CellId::edge(e)) == v {
                out.push(CellId::edge(e));
            }
        }
        for t in c.vertex_triangles(v) {
            if self.max_vertex(c, CellId::triangle(t)) == v {
                out.push(CellId::triangle(t));
            }
        }
        Ok(out)
    }

    pub fn negated(&self) -> ScalarField {
        ScalarField::from_values(self.values.iter().map(|v| -v).collect()).expect("negation keeps values finite")
    }

    /// `scale * f + shift`, for `scale > 0`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<ScalarField> {
        if !(scale > 0.0) {
            return Err(MorseError::InvalidArgument("affine scale must be positive".into()));
        }
        ScalarField::from_values(self.values.iter().map(|v| scale * v + shift).collect())
    }

    /// Sup-norm distance between two fields on the same vertex set.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &ScalarField, t: f64) -> ScalarField {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        ScalarField::from_values(values).expect("interpolation of finite values is finite")
    }
}

/// A level set side, `f < value` or `f >= value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Side {
    Below,
    AtOrAbove,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelThreshold {
    pub value: f64,
    pub side: Side,
}

impl LevelThreshold {
    pub fn below(value: f64) -> Self {
        LevelThreshold { value, side: Side::Below }
    }

    pub fn at_or_above(value: f64) -> Self {
        LevelThreshold { value, side: Side::AtOrAbove }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.side {
            Side::Below => x < self.value,
            Side::AtOrAbove => x >= self.value,
        }
    }
}
