//! Statistics of the maximal product overlap over Haar-random qubit states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometric::{seesaw, SeeSawConfig};
use crate::par;
use crate::rng;
use crate::tensor::{PureState, Shape};

pub const MAX_QUBITS: usize = 12;

/// Every `SPOT_EVERY`-th sample keeps its fixed-point residual.
pub const SPOT_EVERY: usize = 100;

/// See-saw settings used for sampling: fewer restarts than elsewhere.
pub fn sampling_config() -> SeeSawConfig {
    SeeSawConfig {
        restarts: 20,
        ..SeeSawConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaStats {
    pub n_qubits: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub restarts: usize,
    /// See-saw values of `Lambda^2`, one per sample in index order.
    pub values: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    /// `(index, residual)` of the spot-checked samples.
    pub spot_residuals: Vec<(usize, f64)>,
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn check_qubits(n: usize) -> Result<Shape> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Shape(format!("qubit count must be in 1..={MAX_QUBITS}, got {n}")));
    }
    Shape::uniform(n, 2)
}

/// `Lambda^2` of `n_samples` Haar-random `n`-qubit states. Sample `i` is
/// drawn from stream `(seed, i)`, so results do not depend on scheduling.
pub fn sample_lambda(n_qubits: usize, n_samples: usize, seed: u64, cfg: &SeeSawConfig) -> Result<LambdaStats> {
    let shape = check_qubits(n_qubits)?;
    cfg.validate()?;
    let runs = par::map_indexed(n_samples, |i| -> Result<(f64, f64)> {
        let psi = PureState::haar_random_indexed(shape.clone(), seed, i as u64);
        let r = seesaw(&psi, &cfg.with_seed(rng::child_seed(seed, i as u64)))?;
        Ok((r.lambda_sq, r.residual))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let spot_residuals = runs
        .iter()
        .enumerate()
        .filter(|(i, _)| i % SPOT_EVERY == 0)
        .map(|(i, r)| (i, r.1))
        .collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let mean = if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    Ok(LambdaStats {
        n_qubits,
        n_samples,
        seed,
        restarts: cfg.restarts,
        mean,
        min: sorted.first().copied().unwrap_or(f64::NAN),
        max: sorted.last().copied().unwrap_or(f64::NAN),
        q05: quantile(&sorted, 0.05),
        q50: quantile(&sorted, 0.5),
        q95: quantile(&sorted, 0.95),
        values,
        spot_residuals,
    })
}

/// `3 n^2 2^-n`.
pub fn gross_threshold(n_qubits: usize) -> f64 {
    3.0 * (n_qubits * n_qubits) as f64 * 0.5f64.powi(n_qubits as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrossFraction {
    pub threshold: f64,
    /// Share of samples whose see-saw value exceeds the threshold. The
    /// see-saw underestimates `Lambda^2`, so this is a lower bound.
    pub fraction: f64,
    pub stats: LambdaStats,
}

pub fn gross_fraction(n_qubits: usize, n_samples: usize, seed: u64, cfg: &SeeSawConfig) -> Result<GrossFraction> {
    let stats = sample_lambda(n_qubits, n_samples, seed, cfg)?;
    let threshold = gross_threshold(n_qubits);
    let above = stats.values.iter().filter(|&&v| v > threshold).count();
    let fraction = if n_samples == 0 { 0.0 } else { above as f64 / n_samples as f64 };
    Ok(GrossFraction {
        threshold,
        fraction,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_is_product() {
        let s = sample_lambda(1, 20, 0, &sampling_config()).unwrap();
        assert!(s.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn two_qubit_floor() {
        let s = sample_lambda(2, 300, 1, &sampling_config().with_restarts(2)).unwrap();
        assert!(s.min >= 0.25 - 1e-9);
        assert!(s.values.iter().all(|&v| v > 0.0 && v <= 1.0));
        assert!(s.q05 <= s.q50 && s.q50 <= s.q95);
        assert_eq!(s.spot_residuals.len(), 3);
        assert!(s.spot_residuals.iter().all(|r| r.1 <= 1e-8));
    }

    #[test]
    fn thresholds() {
        assert_eq!(gross_threshold(5), 75.0 / 32.0);
        assert_eq!(gross_threshold(12), 0.10546875);
        let g = gross_fraction(5, 10, 0, &sampling_config().with_restarts(2)).unwrap();
        assert_eq!(g.fraction, 0.0);
    }

    #[test]
    fn qubit_cap() {
        assert!(matches!(sample_lambda(13, 1, 0, &sampling_config()), Err(Error::Shape(_))));
        assert!(matches!(sample_lambda(0, 1, 0, &sampling_config()), Err(Error::Shape(_))));
    }

    #[test]
    fn quantile_interpolates() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.0);
        assert_eq!(quantile(&v, 0.05), 0.2);
    }
}
