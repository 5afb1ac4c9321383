//! Text formats: OFF meshes, one-column value lists, `vertex_id,value` fields.

use std::fmt::Write as _;

use crate::complex::CellComplex;
use crate::error::{MorseError, Result};
use crate::field::ScalarField;
use crate::meshes;
use crate::persist::PersistencePair;

fn parse_err(line: usize, msg: impl std::fmt::Display) -> MorseError {
    MorseError::Parse(format!("line {line}: {msg}"))
}

/// Non-empty lines with `#` comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| parse_err(line, format!("bad number '{tok}'")))
}

/// Parses an OFF surface. Quads are split along the diagonal through their
/// lowest-index corner.
pub fn parse_off(text: &str) -> Result<CellComplex> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| MorseError::Parse("empty OFF file".into()))?;
    let mut rest: Vec<&str> = header.split_whitespace().collect();
    if rest.first() != Some(&"OFF") {
        return Err(parse_err(ln, "missing OFF header"));
    }
    rest.remove(0);
    let (ln, counts) = if rest.is_empty() {
        let (ln, l) = lines.next().ok_or_else(|| MorseError::Parse("missing counts line".into()))?;
        (ln, l.split_whitespace().collect::<Vec<_>>())
    } else {
        (ln, rest)
    };
    if counts.len() < 2 {
        return Err(parse_err(ln, "counts line needs V F [E]"));
    }
    let nv: usize = num(ln, counts[0])?;
    let nf: usize = num(ln, counts[1])?;

    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| MorseError::Parse("truncated vertex list".into()))?;
        let xs: Vec<f64> = l.split_whitespace().map(|t| num(ln, t)).collect::<Result<_>>()?;
        if xs.len() < 3 {
            return Err(parse_err(ln, "vertex needs three coordinates"));
        }
        coords.push([xs[0], xs[1], xs[2]]);
    }
    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| MorseError::Parse("truncated face list".into()))?;
        let toks: Vec<u32> = l.split_whitespace().map(|t| num(ln, t)).collect::<Result<_>>()?;
        let k = *toks.first().ok_or_else(|| parse_err(ln, "empty face"))? as usize;
        if toks.len() < k + 1 {
            return Err(parse_err(ln, format!("face declares {k} vertices, has {}", toks.len() - 1)));
        }
        let vs = &toks[1..=k];
        match k {
            3 => tris.push([vs[0], vs[1], vs[2]]),
            4 => tris.extend(meshes::split_quad([vs[0], vs[1], vs[2], vs[3]])),
            _ => return Err(parse_err(ln, format!("unsupported face size {k}"))),
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content after faces"));
    }
    CellComplex::from_triangles(nv, &tris)?.with_coords(coords)
}

pub fn write_off(c: &CellComplex) -> String {
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} {}", c.n_vertices(), c.n_triangles(), c.n_edges());
    for v in 0..c.n_vertices() {
        let [x, y, z] = c.coords().map(|cs| cs[v]).unwrap_or([v as f64, 0.0, 0.0]);
        let _ = writeln!(s, "{x} {y} {z}");
    }
    for t in c.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

/// One value per line.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    content_lines(text).map(|(ln, l)| num::<f64>(ln, l)).collect()
}

/// `vertex_id,value` rows after a header; every vertex exactly once.
pub fn parse_field_csv(text: &str, n_vertices: usize) -> Result<Vec<f64>> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| MorseError::Parse("empty field file".into()))?;
    if header.replace(' ', "") != "vertex_id,value" {
        return Err(parse_err(ln, "expected header 'vertex_id,value'"));
    }
    let mut values: Vec<Option<f64>> = vec![None; n_vertices];
    for (ln, l) in lines {
        let (id, val) = l.split_once(',').ok_or_else(|| parse_err(ln, "expected 'vertex_id,value'"))?;
        let id: usize = num(ln, id.trim())?;
        let val: f64 = num(ln, val.trim())?;
        let slot = values
            .get_mut(id)
            .ok_or_else(|| parse_err(ln, format!("vertex {id} out of range ({n_vertices} vertices)")))?;
        if slot.replace(val).is_some() {
            return Err(parse_err(ln, format!("vertex {id} listed twice")));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| MorseError::Parse(format!("vertex {i} has no value"))))
        .collect()
}

pub fn write_field_csv(f: &ScalarField) -> String {
    let mut s = String::from("vertex_id,value\n");
    for (i, v) in f.values().iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    s
}

pub fn write_values(values: &[f64]) -> String {
    let mut s = String::new();
    for v in values {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn write_pairs_csv(pairs: &[PersistencePair]) -> String {
    let mut s =
        String::from("birth_dim,birth_index,birth_value,death_dim,death_index,death_value,persistence,essential\n");
    for p in pairs {
        let b = p.birth;
        match p.death {
            Some(d) => {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},false",
                    b.cell.dim, b.cell.index, b.value, d.cell.dim, d.cell.index, d.value, p.persistence
                );
            }
            None => {
                let _ = writeln!(s, "{},{},{},,,,inf,true", b.cell.dim, b.cell.index, b.value);
            }
        }
    }
    s
}
