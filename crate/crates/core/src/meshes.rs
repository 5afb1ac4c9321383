//! Standard fixture complexes: graphs, grids, octahedron, cylinder, torus.

use crate::complex::CellComplex;

/// Splits a quad given in cyclic corner order along the diagonal from its
/// lowest-index corner to the opposite corner.
pub fn split_quad(q: [u32; 4]) -> [[u32; 3]; 2] {
    let k = (0..4).min_by_key(|&i| q[i]).unwrap();
    let c = |o: usize| q[(k + o) % 4];
    [[c(0), c(1), c(2)], [c(0), c(2), c(3)]]
}

pub fn path_graph(n: usize) -> CellComplex {
    let edges: Vec<[u32; 2]> = (1..n as u32).map(|i| [i - 1, i]).collect();
    CellComplex::from_edges(n, &edges).expect("path graph is valid")
}

/// Cycle graph on `n >= 3` vertices with edges (i, i+1 mod n).
pub fn cycle_graph(n: usize) -> CellComplex {
    assert!(n >= 3, "cycle graph needs at least three vertices");
    let edges: Vec<[u32; 2]> = (0..n as u32).map(|i| [i, (i + 1) % n as u32]).collect();
    CellComplex::from_edges(n, &edges).expect("cycle graph is valid")
}

pub fn octahedron() -> CellComplex {
    let mut tris = Vec::with_capacity(8);
    for x in [0u32, 1] {
        for y in [2u32, 3] {
            for z in [4u32, 5] {
                tris.push([x, y, z]);
            }
        }
    }
    let coords =
        vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    CellComplex::from_triangles(6, &tris).and_then(|c| c.with_coords(coords)).expect("octahedron is valid")
}

/// Planar `w x h` vertex grid (a disk), vertex `(i, j)` at index `j * w + i`.
pub fn grid(w: usize, h: usize) -> CellComplex {
    assert!(w >= 2 && h >= 2);
    let idx = |i: usize, j: usize| (j * w + i) as u32;
    let mut tris = Vec::with_capacity(2 * (w - 1) * (h - 1));
    for j in 0..h - 1 {
        for i in 0..w - 1 {
            tris.extend(split_quad([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]));
        }
    }
    let coords = (0..h).flat_map(|j| (0..w).map(move |i| [i as f64, j as f64, 0.0])).collect();
    CellComplex::from_triangles(w * h, &tris).and_then(|c| c.with_coords(coords)).expect("grid is valid")
}

/// Periodic quads always split along the same geometric diagonal so the
/// wrap-around seam stays a valid triangulation.
fn periodic_quads(w: usize, h: usize, wrap_j: bool) -> Vec<[u32; 3]> {
    let rows = if wrap_j { h } else { h - 1 };
    let hv = h;
    let idx = |i: usize, j: usize| ((j % hv) * w + (i % w)) as u32;
    let mut tris = Vec::with_capacity(2 * w * rows);
    for j in 0..rows {
        for i in 0..w {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    tris
}

/// Cylinder with `circumference` vertices per ring and `rings` rings;
/// ring 0 and ring `rings - 1` are the two boundary circles.
pub fn cylinder(circumference: usize, rings: usize) -> CellComplex {
    assert!(circumference >= 3 && rings >= 2);
    let tris = periodic_quads(circumference, rings, false);
    let coords = (0..rings)
        .flat_map(|j| {
            (0..circumference).map(move |i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / circumference as f64;
                [a.cos(), a.sin(), j as f64]
            })
        })
        .collect();
    CellComplex::from_triangles(circumference * rings, &tris)
        .and_then(|c| c.with_coords(coords))
        .expect("cylinder is valid")
}

/// Periodic `w x h` torus; `torus(3, 3)` is the 9-vertex, 27-edge, 18-triangle torus.
pub fn torus(w: usize, h: usize) -> CellComplex {
    assert!(w >= 3 && h >= 3);
    let tris = periodic_quads(w, h, true);
    CellComplex::from_triangles(w * h, &tris).expect("torus is valid")
}
