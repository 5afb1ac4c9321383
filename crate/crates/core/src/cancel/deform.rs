//! Census scan along the straight-line homotopy `f_t = (1 - t) f + t f'`.

use serde::Serialize;

use super::CancellationPlan;
use crate::complex::{CellComplex, CellId};
use crate::error::{MorseError, Result};
use crate::field::ScalarField;
use crate::gradient::DiscreteGradient;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathCensus {
    pub t_samples: Vec<f64>,
    /// Critical cells per dimension whose lower star (under `f_t`) belongs to
    /// a support vertex, per sample.
    pub census_per_t: Vec<[usize; 3]>,
    /// First sample at which the support census reaches its final value.
    pub transition: Option<f64>,
}

impl PathCensus {
    /// Census at each sample minus the census at `t = 1`: the cells that the
    /// cancellation still has to remove.
    pub fn excess(&self) -> Vec<[i64; 3]> {
        let last = *self.census_per_t.last().expect("at least three samples");
        self.census_per_t.iter().map(|c| std::array::from_fn(|d| c[d] as i64 - last[d] as i64)).collect()
    }

    /// Number of consecutive samples whose censuses differ.
    pub fn transitions(&self) -> usize {
        self.census_per_t.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

pub fn sample_deformation(
    c: &CellComplex,
    f: &ScalarField,
    f_prime: &ScalarField,
    plan: &CancellationPlan,
    n: usize,
) -> Result<PathCensus> {
    if n < 3 {
        return Err(MorseError::InvalidArgument(format!("need at least 3 samples, got {n}")));
    }
    if f.len() != f_prime.len() {
        return Err(MorseError::LengthMismatch { expected: f.len(), got: f_prime.len() });
    }
    let t_samples: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let census_per_t: Vec<[usize; 3]> = t_samples
        .iter()
        .map(|&t| {
            let ft = f.lerp(f_prime, t);
            let g = DiscreteGradient::build(c, &ft);
            let mut census = [0; 3];
            for cell in g.critical_ids() {
                if plan.in_support(CellId::vertex(ft.max_vertex(c, cell))) {
                    census[cell.dim as usize] += 1;
                }
            }
            census
        })
        .collect();

    let k = plan.q.cell.dim as usize;
    let first = census_per_t[0];
    let last = census_per_t[n - 1];
    let mut expected = first;
    expected[k] = expected[k].wrapping_sub(1);
    expected[k + 1] = expected[k + 1].wrapping_sub(1);
    let out = PathCensus { transition: None, t_samples, census_per_t };
    if last != expected || out.transitions() != 1 {
        return Err(MorseError::NonMonotoneCensus);
    }
    let idx = out.census_per_t.iter().position(|c| *c == last).expect("last sample matches");
    Ok(PathCensus { transition: Some(out.t_samples[idx]), ..out })
}
