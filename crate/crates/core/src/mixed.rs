//! Mixed states: the two-qubit closed form of the geometric measure,
//! Uhlmann fidelity, witness-based lower bounds and the discrimination
//! capacity inequality.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometric::{max_overlap, SeeSawConfig};
use crate::hermitian::{eigh, hermiticity_error, CMatrix, DensityMatrix};
use crate::svd::svd;
use crate::par;
use crate::tensor::{PureState, Shape};

/// Hermitian observable on the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    matrix: CMatrix,
    label: String,
}

impl Witness {
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::State("witness must be square".into()));
        }
        let herm = hermiticity_error(&matrix);
        if herm > 1e-12 {
            return Err(Error::State(format!("witness is not Hermitian (deviation {herm:.3e})")));
        }
        Ok(Witness {
            matrix,
            label: label.into(),
        })
    }

    /// `|psi><psi|`, the fidelity observable for `psi`.
    pub fn fidelity(psi: &PureState, label: impl Into<String>) -> Self {
        Witness {
            matrix: crate::hermitian::projector(psi.amplitudes()),
            label: label.into(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let v = DVector::from_column_slice(psi);
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::State(format!("expected a two-qubit state, got dimension {}", rho.dim())));
    }
    Ok(())
}

/// Two-qubit concurrence `max(0, mu_1 - mu_2 - mu_3 - mu_4)`.
/// `W` with `h = W W^dagger`, keeping eigenvalues above 1e-14.
fn support_factor(h: &CMatrix) -> CMatrix {
    let (w, v) = eigh(h);
    let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 1e-14).collect();
    CMatrix::from_fn(h.nrows(), support.len(), |r, c| v[(r, support[c])] * w[support[c]].sqrt())
}

fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let data: Vec<Complex64> = (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)]))
        .collect();
    svd(&data, m.nrows(), m.ncols()).values
}

pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let m = rho.matrix();
    // sigma_y (x) sigma_y is real anti-diagonal with signs (-1, 1, 1, -1).
    let flip = CMatrix::from_fn(4, 4, |r, c| {
        if r + c == 3 {
            Complex64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    // With rho = W W^dagger over its support, the mu_i are the singular
    // values of the symmetric matrix W^T flip W.
    let big_w = support_factor(m);
    let mut mu = singular_values(&(big_w.transpose() * &flip * &big_w));
    mu.resize(4, 0.0);
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

/// `E = (1 - sqrt(1 - C^2)) / 2`. Ill-conditioned near `C = 1`, where a
/// rounding error `r` in `C` becomes `sqrt(r / 2)` in `E`.
pub fn gm_2q(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence_2q(rho)?;
    Ok(0.5 * (1.0 - (1.0 - c * c).max(0.0).sqrt()))
}

/// `F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::State(format!("dimensions differ: {} vs {}", rho.dim(), sigma.dim())));
    }
    // F = ||A^dagger B||_1^2 for rho = A A^dagger, sigma = B B^dagger.
    let a = support_factor(rho.matrix());
    let b = support_factor(sigma.matrix());
    let t: f64 = singular_values(&(a.adjoint() * b)).iter().sum();
    Ok((t * t).clamp(0.0, 1.0))
}

/// 50 log-spaced points in `[1e-2, 1e2]`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-2, 1e2, 50)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Random states drawn once to guard the inner maximization.
pub const REPAIR_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreBound {
    pub bound: f64,
    /// Grid point attaining the bound (`None` when clipped to 0).
    pub best_lambda: Option<f64>,
    /// `E^(lambda W)` per grid point.
    pub transform: Vec<f64>,
}

/// `max_{lambda} [lambda w - E^(lambda W)]`, clipped at 0, where
/// `E^(lambda W) = sup_psi [lambda <psi|W|psi> - E(psi)]`.
///
/// The supremum is approached by alternating `psi <- top eigenvector of
/// lambda W + |pi><pi|` and `pi <- closest product state of psi`, and then
/// raised to the best of [`REPAIR_SAMPLES`] random states. Because the
/// inner step is heuristic the bound is only as reliable as that search.
pub fn legendre_lower_bound(
    witness: &Witness,
    shape: &Shape,
    w: f64,
    grid: &[f64],
    cfg: &SeeSawConfig,
) -> Result<LegendreBound> {
    let transform = legendre_transform(witness, shape, grid, cfg)?;
    Ok(bound_from_transform(w, grid, transform))
}

/// Evaluates the bound for a transform computed once.
pub fn bound_from_transform(w: f64, grid: &[f64], transform: Vec<f64>) -> LegendreBound {
    let mut bound = 0.0;
    let mut best_lambda = None;
    for (&lambda, e) in grid.iter().zip(&transform) {
        let v = lambda * w - e;
        if v > bound {
            bound = v;
            best_lambda = Some(lambda);
        }
    }
    LegendreBound {
        bound,
        best_lambda,
        transform,
    }
}

/// `E^(lambda W)` for every `lambda` in `grid`.
pub fn legendre_transform(witness: &Witness, shape: &Shape, grid: &[f64], cfg: &SeeSawConfig) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Kind("empty lambda grid".into()));
    }
    if witness.matrix.nrows() != shape.total() {
        return Err(Error::Shape(format!(
            "witness acts on dimension {}, shape has {}",
            witness.matrix.nrows(),
            shape.total()
        )));
    }
    cfg.validate()?;
    let sample_cfg = cfg.with_restarts(cfg.restarts.min(5));
    let samples: Vec<(f64, f64)> = par::map_indexed(REPAIR_SAMPLES, |i| -> Result<(f64, f64)> {
        let s = PureState::haar_random_indexed(shape.clone(), cfg.seed, i as u64);
        Ok((witness.expectation(s.amplitudes()), max_overlap(&s, &sample_cfg)?.measure))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    par::map_indexed(grid.len(), |i| -> Result<f64> {
        let lambda = grid[i];
        let alternating = alternating_sup(witness, shape, lambda, cfg)?;
        let sampled = samples
            .iter()
            .map(|(wv, e)| lambda * wv - e)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(alternating.max(sampled))
    })
    .into_iter()
    .collect()
}

fn top_eigenvector(h: &CMatrix) -> (f64, Vec<Complex64>) {
    let (w, v) = eigh(h);
    let last = w.len() - 1;
    (w[last], v.column(last).iter().copied().collect())
}

/// `sup_{psi, pi} <psi|lambda W + |pi><pi||psi> - 1` by alternation.
fn alternating_sup(witness: &Witness, shape: &Shape, lambda: f64, cfg: &SeeSawConfig) -> Result<f64> {
    let inner_cfg = cfg.with_restarts(cfg.restarts.min(5));
    let scaled = witness.matrix() * Complex64::new(lambda, 0.0);
    let mut best = f64::NEG_INFINITY;
    let starts = 1 + inner_cfg.restarts;
    for start in 0..starts {
        let mut psi = if start == 0 {
            top_eigenvector(witness.matrix()).1
        } else {
            PureState::haar_random_indexed(shape.clone(), cfg.seed ^ 0x5eed, start as u64)
                .amplitudes()
                .to_vec()
        };
        let mut value = f64::NEG_INFINITY;
        for _ in 0..200 {
            let state = PureState::new(shape.clone(), psi.clone())?;
            let closest = max_overlap(&state, &inner_cfg)?.closest.to_state();
            let h = &scaled + crate::hermitian::projector(closest.amplitudes());
            let (top, v) = top_eigenvector(&h);
            let next = top - 1.0;
            psi = v;
            if next - value <= 1e-12 * next.abs().max(1.0) {
                value = value.max(next);
                break;
            }
            value = next;
        }
        best = best.max(value);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrimination {
    pub sum_inv: f64,
    pub feasible: bool,
    pub lambda_sq: Vec<f64>,
}

/// `sum_i 1 / Lambda^2(psi_i)` against the joint dimension. A sum above the
/// dimension rules out perfect discrimination by local operations and
/// classical communication; a sum below it decides nothing.
pub fn discrimination_capacity(states: &[PureState], cfg: &SeeSawConfig) -> Result<Discrimination> {
    let first = states.first().ok_or_else(|| Error::Kind("empty state list".into()))?;
    for (i, a) in states.iter().enumerate() {
        if a.shape() != first.shape() {
            return Err(Error::Shape("states have different shapes".into()));
        }
        for b in &states[i + 1..] {
            let o = a.overlap(b)?.norm();
            if o > 1e-8 {
                return Err(Error::Kind(format!("states are not orthogonal (overlap {o:.3e})")));
            }
        }
    }
    let lambda_sq = par::map_slice(states, |s| max_overlap(s, cfg).map(|r| r.lambda_sq))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let sum_inv: f64 = lambda_sq.iter().map(|l| 1.0 / l).sum();
    Ok(Discrimination {
        sum_inv,
        feasible: sum_inv <= first.total() as f64 + 1e-6,
        lambda_sq,
    })
}
