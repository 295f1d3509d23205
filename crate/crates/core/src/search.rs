//! Searches over states: ascent towards maximal geometric measure, the
//! measure on a subspace, and failure of multiplicativity of the overlap.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometric::{bipartite_exact, max_overlap, run_endpoints, SeeSawConfig};
use crate::hermitian::project_simplex;
use crate::par;
use crate::rng;
use crate::tensor::{inner, normalize_in_place, norm, ProductState, PureState, Shape};

/// Consecutive rejected updates after which the ascent stops.
pub const MAX_REJECTIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub eps0: f64,
    pub decay: f64,
    pub steps: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            eps0: 0.1,
            decay: 0.9,
            steps: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub state: PureState,
    pub measure: f64,
    /// Measure after the start and after every accepted update.
    pub trace: Vec<f64>,
    pub accepted: usize,
    pub steps: usize,
    /// The rejection limit was hit (as opposed to running out of steps).
    pub converged: bool,
}

/// Cheaper see-saw settings for the per-step acceptance test: accurate to
/// about 1e-6 in the measure, which is all the comparison needs.
pub fn inner_config() -> SeeSawConfig {
    SeeSawConfig {
        max_iters: 300,
        tol: 1e-10,
        step_tol: 1e-5,
        restarts: 4,
        seed: 0,
    }
}

/// Overlaps within this relative distance of the best one count as active.
const ACTIVE_WINDOW: f64 = 1e-3;

/// Distinct product states whose overlap with `psi` is close to the largest.
fn active_set(psi: &PureState, shape: &Shape, cfg: &SeeSawConfig, warm: &[ProductState]) -> Result<(f64, Vec<ProductState>)> {
    if shape.parties() == 2 {
        let r = bipartite_exact(psi);
        return Ok((r.measure, vec![r.closest]));
    }
    let mut runs = run_endpoints(psi, cfg, warm);
    runs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let best = runs[0].0;
    let mut active: Vec<ProductState> = Vec::new();
    for (lambda, p) in runs {
        if lambda < best * (1.0 - ACTIVE_WINDOW) {
            break;
        }
        if active.iter().all(|q| q.distance(&p) > 1e-6) {
            active.push(p);
        }
    }
    Ok((1.0 - best * best, active))
}

/// Unit direction orthogonal to `psi` that decreases the overlap with every
/// active product state to first order: minus the min-norm point of the
/// convex hull of their gradients `(1 - |psi><psi|) pi <pi|psi>`.
fn ascent_direction(psi: &PureState, active: &[ProductState]) -> Option<Vec<Complex64>> {
    let amps = psi.amplitudes();
    let grads: Vec<Vec<Complex64>> = active
        .iter()
        .map(|p| {
            let pi = p.to_state();
            let c = inner(pi.amplitudes(), amps);
            let mut g: Vec<Complex64> = pi.amplitudes().iter().map(|x| x * c).collect();
            let o = inner(amps, &g);
            g.iter_mut().zip(amps).for_each(|(x, a)| *x -= a * o);
            g
        })
        .collect();
    let k = grads.len();
    let gram: Vec<Vec<f64>> = grads
        .iter()
        .map(|a| grads.iter().map(|b| inner(a, b).re).collect())
        .collect();
    let scale = (0..k).map(|i| gram[i][i]).fold(0.0, f64::max);
    if scale < 1e-28 {
        return None;
    }
    let mut w = vec![1.0 / k as f64; k];
    for _ in 0..500 {
        let grad: Vec<f64> = (0..k).map(|i| (0..k).map(|j| gram[i][j] * w[j]).sum()).collect();
        let next = project_simplex(&w.iter().zip(&grad).map(|(x, g)| x - g / (k as f64 * scale)).collect::<Vec<_>>());
        let moved = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum::<f64>();
        w = next;
        if moved < 1e-14 {
            break;
        }
    }
    let mut d = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (wi, g) in w.iter().zip(&grads) {
        d.iter_mut().zip(g).for_each(|(x, y)| *x -= y * wi);
    }
    if norm(&d) < 1e-14 {
        return None;
    }
    normalize_in_place(&mut d);
    Some(d)
}

/// Repeatedly pushes the state away from its closest product states:
/// `phi = (psi + eps eta) / N` with `eta` orthogonal to `psi` and pointing
/// away from every (nearly) closest product state, keeping the update only
/// if the measured geometric measure goes up. `eps` shrinks by `decay` on
/// every rejection and grows back by the same factor (up to `eps0`) on
/// every acceptance.
pub fn max_entangled_search(shape: &Shape, search: &SearchConfig, cfg: &SeeSawConfig) -> Result<SearchResult> {
    if !(search.eps0 >= 0.0) || !(search.decay > 0.0 && search.decay <= 1.0) {
        return Err(Error::Kind(format!(
            "need eps0 >= 0 and 0 < decay <= 1, got {} and {}",
            search.eps0, search.decay
        )));
    }
    cfg.validate()?;
    let mut psi = PureState::haar_random(shape.clone(), search.seed);
    let (mut measure, mut active) = active_set(&psi, shape, cfg, &[])?;
    let mut trace = vec![measure];
    let mut eps = search.eps0;
    let mut rejections = 0;
    let mut accepted = 0;
    let mut steps = 0;
    let mut converged = search.eps0 == 0.0;
    while steps < search.steps && !converged {
        steps += 1;
        let eta = match ascent_direction(&psi, &active) {
            Some(d) => d,
            None => {
                // psi is itself a product state, or stationary.
                let mut g = rng::stream(search.seed, steps as u64);
                let mut r = rng::unit_vector(&mut g, psi.total());
                let o = inner(psi.amplitudes(), &r);
                r.iter_mut().zip(psi.amplitudes()).for_each(|(e, q)| *e -= q * o);
                normalize_in_place(&mut r);
                r
            }
        };
        let phi: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .zip(&eta)
            .map(|(p, e)| p + e * eps)
            .collect();
        let phi = PureState::new(shape.clone(), phi)?;
        let step_cfg = cfg.with_seed(cfg.seed.wrapping_add(steps as u64));
        let (cand, cand_active) = active_set(&phi, shape, &step_cfg, &active)?;
        if cand > measure {
            psi = phi;
            measure = cand;
            active = cand_active;
            trace.push(measure);
            eps = (eps / search.decay).min(search.eps0);
            rejections = 0;
            accepted += 1;
        } else {
            eps *= search.decay;
            rejections += 1;
            converged = rejections >= MAX_REJECTIONS;
        }
    }
    Ok(SearchResult {
        state: psi,
        measure,
        trace,
        accepted,
        steps,
        converged,
    })
}

/// Smallest and largest geometric measure over the basis vectors and
/// `n_samples` Haar-random unit vectors in their span.
pub fn subspace_min_gm(basis: &[PureState], n_samples: usize, seed: u64, cfg: &SeeSawConfig) -> Result<(f64, f64)> {
    let first = basis.first().ok_or_else(|| Error::Kind("empty basis".into()))?;
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            let o = a.overlap(b)?.norm();
            if o > 1e-10 {
                return Err(Error::Kind(format!("basis is not orthogonal (overlap {o:.3e})")));
            }
        }
    }
    let shape = first.shape().clone();
    let k = basis.len();
    let measures = par::map_indexed(k + n_samples, |i| -> Result<f64> {
        let coeffs = if i < k {
            let mut e = vec![Complex64::new(0.0, 0.0); k];
            e[i] = Complex64::new(1.0, 0.0);
            e
        } else {
            let mut g = rng::stream(seed, i as u64);
            rng::unit_vector(&mut g, k)
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); shape.total()];
        for (c, b) in coeffs.iter().zip(basis) {
            amps.iter_mut().zip(b.amplitudes()).for_each(|(a, x)| *a += x * c);
        }
        let state = PureState::new(shape.clone(), amps)?;
        Ok(max_overlap(&state, cfg)?.measure)
    });
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in measures {
        let m = m?;
        lo = lo.min(m);
        hi = hi.max(m);
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplicativity {
    pub l1sq: f64,
    pub l2sq: f64,
    pub multiplicative: bool,
}

/// Compares `Lambda^2(psi (x) psi)` (parties regrouped pairwise) with
/// `Lambda^2(psi)^2`.
pub fn nonmultiplicativity_demo(psi: &PureState, cfg: &SeeSawConfig) -> Result<Multiplicativity> {
    let double = psi.tensor_product_regroup(psi)?;
    let l1sq = max_overlap(psi, cfg)?.lambda_sq;
    let l2sq = max_overlap(&double, cfg)?.lambda_sq;
    Ok(Multiplicativity {
        l1sq,
        l2sq,
        multiplicative: (l2sq - l1sq * l1sq).abs() <= 1e-6,
    })
}
