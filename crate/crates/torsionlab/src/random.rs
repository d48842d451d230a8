//! Random polynomial curve families.
//!
//! Coefficients are drawn uniformly from `[-b, b]`; curves with identically
//! vanishing torsion are rejected and redrawn. Curve `i` of a family uses its
//! own random stream, so a family's members do not depend on its size.

use serde::{Deserialize, Serialize};
use torsionlab_core::poly::Polynomial;
use torsionlab_core::rng::{stream, uniform};
use torsionlab_core::{Error, PolyCurve};

/// Redraws allowed per curve before giving up.
const MAX_REDRAWS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFamily {
    pub dim: usize,
    pub degree: usize,
    #[serde(default = "default_box")]
    pub coeff_box: f64,
    pub count: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Scale every component after the first by this factor, which shrinks
    /// the torsion by `scale^{d-1}` while leaving the curve's shape alone.
    #[serde(default)]
    pub near_degenerate: Option<f64>,
}

fn default_box() -> f64 {
    1.0
}

#[derive(Clone, Debug)]
pub struct Family {
    pub curves: Vec<PolyCurve>,
    /// Degenerate draws thrown away, per curve.
    pub rejected: Vec<usize>,
}

impl Family {
    pub fn total_rejected(&self) -> usize {
        self.rejected.iter().sum()
    }
}

impl RandomFamily {
    pub fn generate(&self, seed: u64) -> Result<Family, Error> {
        if self.degree < self.dim {
            return Err(Error::InvalidArgument(format!(
                "degree {} cannot carry nondegenerate curves in dimension {}",
                self.degree, self.dim
            )));
        }
        if !(self.coeff_box > 0.0) || !self.coeff_box.is_finite() {
            return Err(Error::InvalidArgument("coefficient box must be positive".into()));
        }
        let mut curves = Vec::with_capacity(self.count);
        let mut rejected = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let mut rng = stream(seed, i as u64);
            let mut misses = 0;
            let curve = loop {
                let comps = (0..self.dim)
                    .map(|j| {
                        let scale = match self.near_degenerate {
                            Some(s) if j > 0 => s,
                            _ => 1.0,
                        };
                        let cs = (0..=self.degree).map(|_| scale * uniform(&mut rng, -self.coeff_box, self.coeff_box)).collect();
                        Polynomial::new(cs)
                    })
                    .collect();
                let c = PolyCurve::new(comps)?;
                if !c.is_degenerate() {
                    break c;
                }
                misses += 1;
                if misses >= MAX_REDRAWS {
                    return Err(Error::DegenerateTorsion);
                }
            };
            curves.push(curve);
            rejected.push(misses);
        }
        Ok(Family { curves, rejected })
    }
}
