use nalgebra::Matrix2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::states::CovarianceMatrix;
use crate::CensusError;

/// Box sampler: diagonal entries uniform on `[0, k)`, off-diagonal entries
/// uniform on `[-l, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub k: f64,
    pub l: f64,
    pub samples: u64,
    pub seed: u64,
    pub mode_count: u8,
}

impl SamplerConfig {
    pub fn two_mode(k: f64, l: f64, samples: u64, seed: u64) -> Self {
        Self { k, l, samples, seed, mode_count: 2 }
    }

    pub fn one_mode(k: f64, l: f64, samples: u64, seed: u64) -> Self {
        Self { k, l, samples, seed, mode_count: 1 }
    }

    pub fn validate(&self) -> Result<(), CensusError> {
        if !(self.k > 0.0 && self.k.is_finite() && self.l > 0.0 && self.l.is_finite()) {
            return Err(CensusError::InvalidConfig(format!(
                "k and l must be positive and finite (k = {}, l = {})",
                self.k, self.l
            )));
        }
        if !matches!(self.mode_count, 1 | 2) {
            return Err(CensusError::InvalidConfig(format!("mode count {} is not 1 or 2", self.mode_count)));
        }
        Ok(())
    }
}

/// Draws the four diagonal entries, then the six upper entries in the
/// order 12, 13, 14, 23, 24, 34.
pub fn sample_matrix<R: Rng + ?Sized>(cfg: &SamplerConfig, rng: &mut R) -> CovarianceMatrix {
    let diag: [f64; 4] = std::array::from_fn(|_| cfg.k * rng.random::<f64>());
    let upper: [f64; 6] = std::array::from_fn(|_| cfg.l * (2.0 * rng.random::<f64>() - 1.0));
    CovarianceMatrix::from_entries(diag, upper)
}

pub fn sample_one_mode<R: Rng + ?Sized>(cfg: &SamplerConfig, rng: &mut R) -> Matrix2<f64> {
    let a = cfg.k * rng.random::<f64>();
    let b = cfg.k * rng.random::<f64>();
    let c = cfg.l * (2.0 * rng.random::<f64>() - 1.0);
    Matrix2::new(a, c, c, b)
}
