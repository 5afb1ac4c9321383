//! One-dimensional cancellation: replace a profile that rises to a maximum,
//! falls to a minimum and rises again by a strictly increasing profile lying
//! below it and agreeing with it near both ends.

use serde::Serialize;

use crate::error::{MorseError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneProfile {
    pub u: Vec<f64>,
    pub h: Vec<f64>,
    pub h1: Vec<f64>,
    pub margin: usize,
}

impl MonotoneProfile {
    /// Checks the three kernel guarantees sample by sample.
    pub fn check(&self) -> Result<()> {
        let n = self.h.len();
        if self.h1.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MorseError::InvariantViolation("h1 is not strictly increasing".into()));
        }
        if self.h1.iter().zip(&self.h).any(|(a, b)| a > b) {
            return Err(MorseError::InvariantViolation("h1 exceeds h".into()));
        }
        let m = self.margin.min(n);
        if (0..m).chain(n - m..n).any(|i| self.h1[i] != self.h[i]) {
            return Err(MorseError::InvariantViolation("h1 differs from h on a margin".into()));
        }
        Ok(())
    }
}

/// Spacing used by the strict-monotonicity repair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    /// Constant step `(h_last - h_first) / (10 N)`.
    Uniform,
    /// Step proportional to the local variation of `h` (factor `scale`),
    /// so a falling run of `h` is mirrored into a rising run of `h1`.
    Proportional { scale: f64 },
}

/// Kernel with the default uniform spacing.
pub fn cancel_1d(h: &[f64], margin: usize) -> Result<MonotoneProfile> {
    cancel_1d_with(h, margin, Spacing::Uniform)
}

pub fn cancel_1d_with(h: &[f64], margin: usize, spacing: Spacing) -> Result<MonotoneProfile> {
    let n = h.len();
    if n < 2 {
        return Err(MorseError::ProfileTooShort { needed: 2, got: n });
    }
    if margin == 0 {
        return Err(MorseError::InvalidArgument("margin must be at least 1".into()));
    }
    if let Some(i) = h.iter().position(|x| !x.is_finite()) {
        return Err(MorseError::NonFiniteValue(i));
    }
    let (first, last) = (h[0], h[n - 1]);
    if first >= last {
        return Err(MorseError::EndpointOrder { first, last });
    }
    let u: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let m = margin.min(n);
    let head = &h[..m];
    let tail = &h[n - m..];
    if head.windows(2).any(|w| !(w[0] < w[1])) || tail.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(MorseError::MarginNotMonotone);
    }
    if 2 * m >= n {
        // margins cover everything: h must already be increasing
        if h.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(MorseError::MarginNotMonotone);
        }
        return Ok(MonotoneProfile { u, h: h.to_vec(), h1: h.to_vec(), margin });
    }

    // the interior must fit strictly between the head and everything after it
    let floor = h[m - 1];
    let suffix_min = h[m..].iter().copied().fold(f64::INFINITY, f64::min);
    let gap = suffix_min - floor;
    if !(gap > 0.0) {
        return Err(MorseError::MarginNotMonotone);
    }
    let uniform = ((last - first) / (10.0 * n as f64)).min(gap / (n as f64 + 1.0));
    let steps: Vec<f64> = match spacing {
        Spacing::Uniform => vec![uniform; n],
        Spacing::Proportional { scale } => {
            let tv: f64 = h[m - 1..n - m + 1].windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            let c = if tv > 0.0 { scale.min(gap / (2.0 * tv)) } else { scale };
            let min_step = uniform * 1e-3;
            (0..n).map(|i| if i + 1 < n { (c * (h[i + 1] - h[i]).abs()).max(min_step) } else { min_step }).collect()
        }
    };

    let mut h1 = h.to_vec();
    for i in (m..n - m).rev() {
        if !(h[i] < h1[i + 1]) {
            h1[i] = h1[i + 1] - steps[i];
        }
    }
    let profile = MonotoneProfile { u, h: h.to_vec(), h1, margin };
    profile.check()?;
    Ok(profile)
}
