//! Seeded synthetic fields: Gaussian bumps plus uniform noise on a grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::CellComplex;
use crate::error::Result;
use crate::field::ScalarField;
use crate::meshes;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub cx: f64,
    pub cy: f64,
    pub sigma: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mixture {
    pub width: usize,
    pub height: usize,
    pub bumps: Vec<Bump>,
    /// Noise is uniform in `[-noise, noise]`.
    pub noise: f64,
}

impl Mixture {
    /// The 32x32 fixture: a tall bump, a 0.3 bump and noise of amplitude 0.1.
    pub fn two_bumps() -> Self {
        Mixture {
            width: 32,
            height: 32,
            bumps: vec![
                Bump { cx: 10.0, cy: 11.0, sigma: 4.5, amplitude: 10.0 },
                Bump { cx: 23.0, cy: 21.0, sigma: 2.5, amplitude: 0.3 },
            ],
            noise: 0.1,
        }
    }

    pub fn smooth_value(&self, x: f64, y: f64) -> f64 {
        self.bumps
            .iter()
            .map(|b| {
                let d2 = (x - b.cx).powi(2) + (y - b.cy).powi(2);
                b.amplitude * (-d2 / (2.0 * b.sigma * b.sigma)).exp()
            })
            .sum()
    }

    /// Grid mesh with vertex `j * width + i` at `(i, j)` and the sampled field.
    pub fn sample(&self, seed: u64) -> Result<(CellComplex, ScalarField)> {
        let c = meshes::grid(self.width, self.height);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(self.width * self.height);
        for j in 0..self.height {
            for i in 0..self.width {
                let n = if self.noise > 0.0 { rng.gen_range(-self.noise..=self.noise) } else { 0.0 };
                values.push(self.smooth_value(i as f64, j as f64) + n);
            }
        }
        let f = ScalarField::load(&c, &values)?;
        Ok((c, f))
    }
}

/// `n` values drawn uniformly from `[lo, hi)`.
pub fn uniform_values(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}
