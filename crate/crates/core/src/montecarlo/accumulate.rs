use serde::{Deserialize, Serialize};

/// Streaming `ln Σ exp(xᵢ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSumExp {
    max: f64,
    /// `Σ exp(xᵢ - max)`
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self { max: f64::NEG_INFINITY, scaled: 0.0 }
    }
}

impl LogSumExp {
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            self.scaled = self.scaled * (self.max - other.max).exp() + other.scaled;
            self.max = other.max;
        } else {
            self.scaled += other.scaled * (other.max - self.max).exp();
        }
    }

    /// `-∞` for an empty sum.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }
}

/// Weighted tallies of one measure: sums of `w` and `w²` over accepted,
/// separable and classical samples, all in log form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightedTally {
    pub accepted: LogSumExp,
    pub separable: LogSumExp,
    pub classical: LogSumExp,
    pub accepted_sq: LogSumExp,
    pub separable_sq: LogSumExp,
    pub classical_sq: LogSumExp,
}

impl WeightedTally {
    pub fn add(&mut self, log_weight: f64, separable: bool, classical: bool) {
        let sq = 2.0 * log_weight;
        self.accepted.add(log_weight);
        self.accepted_sq.add(sq);
        if separable {
            self.separable.add(log_weight);
            self.separable_sq.add(sq);
        }
        if classical {
            self.classical.add(log_weight);
            self.classical_sq.add(sq);
        }
    }

    pub fn merge(&mut self, other: &WeightedTally) {
        self.accepted.merge(&other.accepted);
        self.separable.merge(&other.separable);
        self.classical.merge(&other.classical);
        self.accepted_sq.merge(&other.accepted_sq);
        self.separable_sq.merge(&other.separable_sq);
        self.classical_sq.merge(&other.classical_sq);
    }

    /// `None` when nothing was accepted.
    pub fn estimate(&self) -> Option<WeightedEstimate> {
        if self.accepted.is_empty() {
            return None;
        }
        let total = self.accepted.value();
        let (sep, sep_se) = ratio(total, &self.separable, &self.separable_sq, &self.accepted_sq);
        let (cls, cls_se) = ratio(total, &self.classical, &self.classical_sq, &self.accepted_sq);
        Some(WeightedEstimate {
            prob_sep: sep,
            prob_classical: cls,
            se_sep: sep_se,
            se_classical: cls_se,
            log_total_weight: total,
            effective_samples: (2.0 * total - self.accepted_sq.value()).exp(),
        })
    }
}

/// Ratio estimate `Σ w s / Σ w` and its delta-method standard error
/// `√(Σ w² (s - p)²) / Σ w`, using `s² = s` for indicators.
fn ratio(log_total: f64, hit: &LogSumExp, hit_sq: &LogSumExp, all_sq: &LogSumExp) -> (f64, f64) {
    let p = (hit.value() - log_total).exp().min(1.0);
    let a = (hit_sq.value() - 2.0 * log_total).exp();
    let b = (all_sq.value() - 2.0 * log_total).exp();
    let var = (a * (1.0 - 2.0 * p) + p * p * b).max(0.0);
    (p, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedEstimate {
    pub prob_sep: f64,
    pub prob_classical: f64,
    pub se_sep: f64,
    pub se_classical: f64,
    pub log_total_weight: f64,
    /// Kish effective sample size `(Σw)² / Σw²`.
    pub effective_samples: f64,
}
