//! Maximal product overlap and the geometric measure.
//!
//! The see-saw iteration updates one local vector at a time to the
//! normalized contraction of the state with all the others. Every update
//! can only increase the overlap, so each restart produces a monotone
//! sequence that ends at a fixed point (a singular value tuple of the
//! coefficient tensor). Fixed points need not be global maxima, hence the
//! restarts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::rng::{self, StreamRng};
use crate::schmidt::{schmidt, DEFAULT_RANK_TOL};
use crate::tensor::{inner, norm, Bipartition, ComplexTensor, ProductState, PureState, Shape};

/// Below this norm a contraction counts as zero and the local vector is
/// redrawn.
const ZERO_CONTRACTION: f64 = 1e-14;

/// Symmetry tolerance used by [`symmetric_power`].
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeeSawConfig {
    pub max_iters: usize,
    /// Relative change of the overlap between sweeps that counts as converged.
    pub tol: f64,
    /// Number of random restarts (two deterministic warm starts are added).
    pub restarts: usize,
    pub seed: u64,
    /// Largest change of any local vector in the final sweep. Keeps returned
    /// closest product states accurate as fixed points, not only in overlap.
    pub step_tol: f64,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        SeeSawConfig {
            max_iters: 10_000,
            tol: 1e-12,
            restarts: 50,
            seed: 0,
            step_tol: 1e-10,
        }
    }
}

impl SeeSawConfig {
    pub fn with_restarts(self, restarts: usize) -> Self {
        SeeSawConfig { restarts, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SeeSawConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.restarts == 0 || !(self.tol > 0.0) || !(self.step_tol > 0.0)
        {
            return Err(Error::Kind(format!(
                "invalid see-saw config: max_iters={}, tol={}, restarts={}, step_tol={}",
                self.max_iters, self.tol, self.restarts, self.step_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeeSawResult {
    pub lambda: f64,
    pub lambda_sq: f64,
    /// `1 - lambda^2`.
    pub measure: f64,
    pub closest: ProductState,
    /// Sweeps used by the winning restart.
    pub iters: usize,
    pub converged: bool,
    /// Final overlap of every restart, warm starts first.
    pub restart_values: Vec<f64>,
    /// Overlap after each sweep of the winning restart.
    pub trace: Vec<f64>,
    /// Largest violation of the fixed-point equations at `closest`.
    pub residual: f64,
}

impl SeeSawResult {
    fn from_lambda(lambda: f64, closest: ProductState, run: RunOutcome, values: Vec<f64>, residual: f64) -> Self {
        let lambda_sq = lambda * lambda;
        SeeSawResult {
            lambda,
            lambda_sq,
            measure: 1.0 - lambda_sq,
            closest,
            iters: run.iters,
            converged: run.converged,
            restart_values: values,
            trace: run.trace,
            residual,
        }
    }

    /// `-ln lambda`.
    pub fn log_measure(&self) -> f64 {
        (-self.lambda.ln()).max(0.0)
    }
}

#[derive(Debug, Clone)]
struct RunOutcome {
    lambda: f64,
    locals: Vec<Vec<Complex64>>,
    iters: usize,
    converged: bool,
    trace: Vec<f64>,
}

/// Largest `||<others|psi> - <x|psi> x_k||` over parties, i.e. how far a
/// product state is from satisfying the singular-tuple equations.
pub fn fixed_point_residual(tensor: &ComplexTensor, locals: &[Vec<Complex64>]) -> f64 {
    let overlap = tensor.overlap_product(locals);
    (0..locals.len())
        .map(|k| {
            let alpha = tensor.contract_except(locals, k);
            alpha
                .iter()
                .zip(&locals[k])
                .map(|(a, x)| (a - overlap * x).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// One see-saw run from `locals`.
fn run_seesaw(
    tensor: &ComplexTensor,
    mut locals: Vec<Vec<Complex64>>,
    cfg: &SeeSawConfig,
    rng: &mut StreamRng,
) -> RunOutcome {
    let n = locals.len();
    let mut lambda = tensor.overlap_product(&locals).norm();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;
    while iters < cfg.max_iters {
        iters += 1;
        let mut step: f64 = 0.0;
        let mut redrawn = false;
        for k in 0..n {
            let mut alpha = tensor.contract_except(&locals, k);
            let a = norm(&alpha);
            if a < ZERO_CONTRACTION {
                locals[k] = rng::unit_vector(rng, alpha.len());
                redrawn = true;
                continue;
            }
            alpha.iter_mut().for_each(|z| *z /= a);
            let moved = alpha
                .iter()
                .zip(&locals[k])
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            step = step.max(moved);
            locals[k] = alpha;
        }
        let next = tensor.overlap_product(&locals).norm();
        debug_assert!(
            redrawn || next >= lambda * (1.0 - 1e-13) - 1e-14,
            "see-saw overlap decreased: {lambda} -> {next}"
        );
        let change = (next - lambda).abs();
        lambda = next;
        trace.push(lambda);
        if !redrawn && change <= cfg.tol * lambda.max(f64::MIN_POSITIVE) && step <= cfg.step_tol {
            converged = true;
            break;
        }
    }
    RunOutcome {
        lambda,
        locals,
        iters,
        converged,
        trace,
    }
}

/// Per-party top Schmidt vectors of the cuts `k | rest`.
fn schmidt_warm_start(psi: &PureState) -> Vec<Vec<Complex64>> {
    let n = psi.parties();
    (0..n)
        .map(|k| {
            let cut = Bipartition::new(&[k], n).expect("single party cut");
            let dec = schmidt(psi, &cut, DEFAULT_RANK_TOL);
            dec.left_vectors()[0].clone()
        })
        .collect()
}

/// Basis product state on the largest-magnitude amplitude. Starting here
/// guarantees `lambda^2 >= max_i |psi_i|^2 >= 1/total`.
fn basis_warm_start(psi: &PureState) -> Vec<Vec<Complex64>> {
    let (best, _) = psi
        .amplitudes()
        .iter()
        .enumerate()
        .fold((0, -1.0), |acc, (i, z)| if z.norm_sqr() > acc.1 { (i, z.norm_sqr()) } else { acc });
    let idx = psi.shape().multi_index(best);
    ProductState::basis(psi.dims(), &idx)
        .expect("index from shape")
        .locals()
        .to_vec()
}

fn trivial_single_party(psi: &PureState) -> SeeSawResult {
    let closest = ProductState::from_normalized(vec![psi.amplitudes().to_vec()]);
    let run = RunOutcome {
        lambda: 1.0,
        locals: closest.locals().to_vec(),
        iters: 0,
        converged: true,
        trace: vec![1.0],
    };
    SeeSawResult::from_lambda(1.0, closest, run, vec![1.0], 0.0)
}

/// Picks the best outcome; ties go to the lowest index.
fn best_of(runs: &[RunOutcome]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        if r.lambda > runs[best].lambda {
            best = i;
        }
    }
    best
}

/// See-saw with the default warm starts, `cfg.restarts` random starts and
/// any caller-supplied starting product states.
pub fn seesaw_with_starts(
    psi: &PureState,
    cfg: &SeeSawConfig,
    extra: &[ProductState],
) -> Result<SeeSawResult> {
    cfg.validate()?;
    for p in extra {
        p.check_shape(psi.shape())?;
    }
    if psi.parties() == 1 {
        return Ok(trivial_single_party(psi));
    }
    let runs = runs_from_starts(psi, cfg, extra);
    let tensor = psi.tensor();
    let best = best_of(&runs);
    let values = runs.iter().map(|r| r.lambda).collect();
    let run = runs[best].clone();
    let residual = fixed_point_residual(tensor, &run.locals);
    let closest = ProductState::from_normalized(run.locals.clone());
    Ok(SeeSawResult::from_lambda(run.lambda.min(1.0), closest, run, values, residual))
}

fn runs_from_starts(psi: &PureState, cfg: &SeeSawConfig, extra: &[ProductState]) -> Vec<RunOutcome> {
    let mut starts: Vec<Option<Vec<Vec<Complex64>>>> = vec![
        Some(schmidt_warm_start(psi)),
        Some(basis_warm_start(psi)),
    ];
    starts.extend(extra.iter().map(|p| Some(p.locals().to_vec())));
    starts.extend((0..cfg.restarts).map(|_| None));

    let tensor = psi.tensor();
    let dims = psi.dims().to_vec();
    par::map_indexed(starts.len(), |i| {
        let mut g = rng::stream(cfg.seed, i as u64);
        let init = match &starts[i] {
            Some(v) => v.clone(),
            None => dims.iter().map(|&d| rng::unit_vector(&mut g, d)).collect(),
        };
        run_seesaw(tensor, init, cfg, &mut g)
    })
}

/// Final local vectors of every see-saw run (warm, extra and random starts).
pub(crate) fn all_runs(psi: &PureState, cfg: &SeeSawConfig, extra: &[ProductState]) -> Vec<Vec<Vec<Complex64>>> {
    runs_from_starts(psi, cfg, extra).into_iter().map(|r| r.locals).collect()
}

/// `(lambda, end point)` of every see-saw run, in start order.
pub(crate) fn run_endpoints(psi: &PureState, cfg: &SeeSawConfig, extra: &[ProductState]) -> Vec<(f64, ProductState)> {
    runs_from_starts(psi, cfg, extra)
        .into_iter()
        .map(|r| (r.lambda.min(1.0), ProductState::from_normalized(r.locals)))
        .collect()
}

/// Exactly `sweeps` see-saw sweeps from `locals`, no stopping rule.
pub(crate) fn iterate_map(
    tensor: &ComplexTensor,
    locals: Vec<Vec<Complex64>>,
    sweeps: usize,
    rng: &mut StreamRng,
) -> Vec<Vec<Complex64>> {
    let cfg = SeeSawConfig {
        max_iters: sweeps,
        tol: -1.0,
        step_tol: -1.0,
        ..SeeSawConfig::default()
    };
    run_seesaw(tensor, locals, &cfg, rng).locals
}

/// Two parties: the top Schmidt pair is the closest product state.
pub fn bipartite_exact(psi: &PureState) -> SeeSawResult {
    let dec = schmidt(psi, &Bipartition::new(&[0], 2).expect("two parties"), 0.0);
    let locals = vec![dec.left_vectors()[0].clone(), dec.right_vectors()[0].clone()];
    let lambda = dec.top().min(1.0);
    let residual = fixed_point_residual(psi.tensor(), &locals);
    let run = RunOutcome {
        lambda,
        locals: locals.clone(),
        iters: 0,
        converged: true,
        trace: vec![lambda],
    };
    SeeSawResult::from_lambda(lambda, ProductState::from_normalized(locals), run, vec![lambda], residual)
}

/// Best see-saw overlap over restarts.
pub fn seesaw(psi: &PureState, cfg: &SeeSawConfig) -> Result<SeeSawResult> {
    seesaw_with_starts(psi, cfg, &[])
}

/// `g(x) = <x^(N-1)| psi>` on the last party, and `c = <x^N|psi>`.
fn symmetric_contraction(tensor: &ComplexTensor, x: &[Complex64]) -> (Vec<Complex64>, Complex64) {
    let n = tensor.shape().parties();
    let refs: Vec<&[Complex64]> = (0..n - 1).map(|_| x).collect();
    let left = crate::tensor::kron(&refs, true);
    let g = tensor.contract_with(&left, n - 1, &[Complex64::new(1.0, 0.0)]);
    let c = inner(x, &g);
    (g, c)
}

/// Rotates `x` so that `<x^N|psi>` is real and non-negative.
fn canonical_phase(x: &mut [Complex64], c: Complex64, n: usize) {
    if c.norm() > 0.0 {
        let rot = Complex64::from_polar(1.0, c.arg() / n as f64);
        x.iter_mut().for_each(|z| *z *= rot);
    }
}

/// Shifted symmetric power iteration `x <- normalize(g(x) + shift x)` on
/// the canonical phase. The shift doubles whenever a step would lower the
/// overlap, which keeps the trace monotone.
pub(crate) fn run_symmetric_power(
    tensor: &ComplexTensor,
    mut x: Vec<Complex64>,
    cfg: &SeeSawConfig,
) -> (f64, Vec<Complex64>, usize, bool, Vec<f64>) {
    let n = tensor.shape().parties();
    let (_, c) = symmetric_contraction(tensor, &x);
    canonical_phase(&mut x, c, n);
    let (mut g, c) = symmetric_contraction(tensor, &x);
    let mut lambda = c.norm();
    let mut shift = 1.0;
    let mut trace = Vec::new();
    let mut iters = 0;
    let mut converged = false;
    while iters < cfg.max_iters {
        iters += 1;
        let (cand, cand_g, cand_lambda) = loop {
            let mut y: Vec<Complex64> = g.iter().zip(&x).map(|(a, b)| a + b * shift).collect();
            let ny = norm(&y);
            if ny < ZERO_CONTRACTION {
                shift = shift * 2.0 + 1.0;
                continue;
            }
            y.iter_mut().for_each(|z| *z /= ny);
            let (_, cy) = symmetric_contraction(tensor, &y);
            canonical_phase(&mut y, cy, n);
            let (gy, cy) = symmetric_contraction(tensor, &y);
            let ly = cy.norm();
            if ly >= lambda * (1.0 - 1e-14) || shift > 1e8 {
                break (y, gy, ly);
            }
            shift *= 2.0;
        };
        let step = cand
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let change = (cand_lambda - lambda).abs();
        x = cand;
        g = cand_g;
        lambda = cand_lambda;
        trace.push(lambda);
        if change <= cfg.tol * lambda.max(f64::MIN_POSITIVE) && step <= cfg.step_tol {
            converged = true;
            break;
        }
    }
    (lambda, x, iters, converged, trace)
}

/// Tensor power method for permutation-symmetric states: the optimum is
/// searched among symmetric product states `|x x ... x>`. For three or more
/// parties the closest product state of a symmetric state is itself
/// symmetric, so this equals the see-saw optimum; for two parties the
/// result is only a candidate.
pub fn symmetric_power(psi: &PureState, cfg: &SeeSawConfig) -> Result<SeeSawResult> {
    cfg.validate()?;
    let dev = psi.symmetry_deviation()?;
    if dev > SYMMETRY_TOL {
        return Err(Error::Symmetry(dev));
    }
    if psi.parties() == 1 {
        return Ok(trivial_single_party(psi));
    }
    let n = psi.parties();
    let d = psi.dims()[0];
    let warm = schmidt_warm_start(psi).swap_remove(0);
    let tensor = psi.tensor();
    let runs = par::map_indexed(cfg.restarts + 1, |i| {
        let x = if i == 0 {
            warm.clone()
        } else {
            let mut g = rng::stream(cfg.seed, i as u64);
            rng::unit_vector(&mut g, d)
        };
        let (lambda, x, iters, converged, trace) = run_symmetric_power(tensor, x, cfg);
        RunOutcome {
            lambda,
            locals: vec![x; n],
            iters,
            converged,
            trace,
        }
    });
    let best = best_of(&runs);
    let values = runs.iter().map(|r| r.lambda).collect();
    let run = runs[best].clone();
    let residual = fixed_point_residual(tensor, &run.locals);
    let closest = ProductState::from_normalized(run.locals.clone());
    Ok(SeeSawResult::from_lambda(run.lambda.min(1.0), closest, run, values, residual))
}

/// Maximal product overlap, using the symmetric power method when the state
/// is symmetric with at least three parties and the see-saw otherwise.
pub fn max_overlap(psi: &PureState, cfg: &SeeSawConfig) -> Result<SeeSawResult> {
    cfg.validate()?;
    if psi.parties() == 2 {
        return Ok(bipartite_exact(psi));
    }
    let symmetric = psi.parties() >= 3
        && psi.shape().uniform_dim().is_some()
        && psi.symmetry_deviation()? <= SYMMETRY_TOL;
    if symmetric {
        symmetric_power(psi, cfg)
    } else {
        seesaw(psi, cfg)
    }
}

/// `E = 1 - Lambda^2`.
pub fn geometric_measure(psi: &PureState, cfg: &SeeSawConfig) -> Result<f64> {
    Ok(max_overlap(psi, cfg)?.measure)
}

/// `-ln Lambda`.
pub fn log_measure(psi: &PureState, cfg: &SeeSawConfig) -> Result<f64> {
    Ok(max_overlap(psi, cfg)?.log_measure())
}

/// Overlap of W with the normalized rank-two state
/// `(|0> + eps|1>)^(x3) - |000>`.
pub fn w_rank_two_overlap(eps: f64) -> Result<f64> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::Kind(format!("eps must be a positive number, got {eps}")));
    }
    let shape = Shape::uniform(3, 2)?;
    let data: Vec<Complex64> = (0..8usize)
        .map(|i| {
            let ones = i.count_ones() as i32;
            let v = eps.powi(ones) - if i == 0 { 1.0 } else { 0.0 };
            Complex64::new(v, 0.0)
        })
        .collect();
    let phi = PureState::new(shape, data)?;
    let w = crate::named::NamedState::W { n: 3 }.build()?;
    Ok(w.overlap(&phi)?.norm())
}
