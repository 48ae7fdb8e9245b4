use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::MeasureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    Regular,
    Random,
}

/// Coordinates along one axis; the same list is used for every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    coords: Vec<f64>,
    kind: GridKind,
}

impl GridSpec {
    /// `m` points with unit spacing centered on the origin.
    pub fn regular(m: usize) -> Result<Self, MeasureError> {
        if m == 0 {
            return Err(MeasureError::InvalidGrid("grid size must be positive".into()));
        }
        let half = (m as f64 - 1.0) / 2.0;
        Ok(Self {
            coords: (0..m).map(|i| i as f64 - half).collect(),
            kind: GridKind::Regular,
        })
    }

    /// `m` sorted uniform draws from `[lo, hi]`, redrawn until no two lie
    /// closer than `min_gap`.
    pub fn random<R: Rng + ?Sized>(
        m: usize,
        (lo, hi): (f64, f64),
        min_gap: f64,
        rng: &mut R,
    ) -> Result<Self, MeasureError> {
        if m == 0 || !(hi > lo) {
            return Err(MeasureError::InvalidGrid(format!(
                "need m > 0 and lo < hi (m = {m}, range [{lo}, {hi}])"
            )));
        }
        if (m as f64 - 1.0) * min_gap >= hi - lo {
            return Err(MeasureError::InvalidGrid("range too narrow for the spacing".into()));
        }
        loop {
            let mut coords: Vec<f64> = (0..m).map(|_| rng.random_range(lo..=hi)).collect();
            coords.sort_by(f64::total_cmp);
            if coords.windows(2).all(|w| w[1] - w[0] >= min_gap) {
                return Ok(Self { coords, kind: GridKind::Random });
            }
        }
    }

    pub fn from_coords(coords: Vec<f64>, kind: GridKind) -> Result<Self, MeasureError> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(MeasureError::InvalidGrid("coordinates must be finite and nonempty".into()));
        }
        if !coords.windows(2).all(|w| w[0] < w[1]) {
            return Err(MeasureError::InvalidGrid("coordinates must be strictly increasing".into()));
        }
        Ok(Self { coords, kind })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}
