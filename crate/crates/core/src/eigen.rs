//! Tensor eigenpairs: Z- and H-eigenpairs of real symmetric tensors,
//! US-eigenpairs of complex symmetric states, and singular value tuples.
//!
//! Searches are local (shifted power iterations from many starts) and make
//! no completeness claim: they report the pairs they found, each one
//! re-verified against its defining equation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometric::{self, fixed_point_residual, SeeSawConfig};
use crate::par;
use crate::rng;
use crate::schmidt::{schmidt, DEFAULT_RANK_TOL};
use crate::tensor::{inner, kron, Bipartition, ComplexTensor, ProductState, PureState};

/// Acceptance threshold for every returned pair.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Eigenvalues closer than this are merged when vectors also agree.
pub const MERGE_TOL: f64 = 1e-7;
/// Distance below which two eigenvectors with merged values are the same.
pub const VECTOR_MERGE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EigenKind {
    Z,
    H,
    US,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub kind: EigenKind,
    pub lambda: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSearchConfig {
    /// Random starts (the standard basis is always added for Z searches).
    pub starts: usize,
    pub seed: u64,
    /// Fixed initial shift; `None` starts unshifted and grows the shift
    /// whenever a step would move the objective the wrong way.
    pub shift: Option<f64>,
    pub max_iters: usize,
}

impl Default for EigenSearchConfig {
    fn default() -> Self {
        EigenSearchConfig {
            starts: 200,
            seed: 0,
            shift: None,
            max_iters: 5000,
        }
    }
}

/// Real symmetric tensor of order `order` on `R^dim`.
#[derive(Debug, Clone)]
pub struct RealSymTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl RealSymTensor {
    /// Checks that `tau` is real and permutation symmetric.
    pub fn new(tau: &ComplexTensor) -> Result<Self> {
        let dim = tau
            .shape()
            .uniform_dim()
            .ok_or_else(|| Error::Kind(format!("unequal local dimensions {:?}", tau.dims())))?;
        if !tau.is_real(1e-12) {
            return Err(Error::Kind("tensor has complex entries".into()));
        }
        let dev = tau.symmetry_deviation()?;
        if dev > 1e-10 {
            return Err(Error::Kind(format!("tensor is not symmetric (deviation {dev:.3e})")));
        }
        Ok(RealSymTensor {
            order: tau.shape().parties(),
            dim,
            data: tau.data().iter().map(|z| z.re).collect(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn power(&self, x: &[f64], times: usize) -> Vec<f64> {
        let mut out = vec![1.0];
        for _ in 0..times {
            out = out.iter().flat_map(|a| x.iter().map(move |b| a * b)).collect();
        }
        out
    }

    /// `tau x^(m-1)`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let left = self.power(x, self.order - 1);
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (l, w) in left.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                *o += w * self.data[l * d + i];
            }
        }
        out
    }

    /// `tau x^m`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `tau x^(m-2)` as a `dim x dim` matrix.
    fn partial(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim;
        let left = self.power(x, self.order.saturating_sub(2));
        let mut m = DMatrix::zeros(d, d);
        for (l, w) in left.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += w * self.data[(l * d + i) * d + j];
                }
            }
        }
        m
    }
}

fn real_norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `||tau x^(m-1) - lambda x||`, plus the deviation of `||x||` from one.
pub fn z_residual(tau: &RealSymTensor, lambda: f64, x: &[f64]) -> f64 {
    let g = tau.apply(x);
    let r = g.iter().zip(x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
    r + (real_norm(x) - 1.0).abs()
}

/// `||tau x^(m-1) - lambda x^[m-1]||` (componentwise power on the right).
pub fn h_eigen_residual(tau: &RealSymTensor, lambda: f64, x: &[f64]) -> f64 {
    let g = tau.apply(x);
    let p = (tau.order - 1) as i32;
    g.iter().zip(x).map(|(a, b)| (a - lambda * b.powi(p)).powi(2)).sum::<f64>().sqrt()
}

/// H-spectrum of a diagonal tensor of even order: its diagonal entries.
pub fn h_eigen_diagonal(tau: &RealSymTensor) -> Result<Vec<f64>> {
    if !tau.order.is_multiple_of(2) {
        return Err(Error::Kind(format!("order {} is odd", tau.order)));
    }
    let d = tau.dim;
    let diag_stride: usize = (0..tau.order).map(|k| d.pow(k as u32)).sum();
    let mut diag = Vec::with_capacity(d);
    for (flat, &v) in tau.data.iter().enumerate() {
        if flat % diag_stride == 0 && flat / diag_stride < d {
            diag.push(v);
        } else if v.abs() > 1e-12 {
            return Err(Error::Kind("tensor is not diagonal".into()));
        }
    }
    Ok(diag)
}

/// `sum_i x_i^2` without conjugation.
pub fn e_normalization(x: &[Complex64]) -> Complex64 {
    x.iter().map(|z| z * z).sum()
}

/// Shifted power iteration on `sign * tau`; returns the final vector.
fn shifted_power(
    tau: &RealSymTensor,
    sign: f64,
    mut x: Vec<f64>,
    shift: Option<f64>,
    max_iters: usize,
) -> Vec<f64> {
    let mut alpha = shift.unwrap_or(0.0);
    let adaptive = shift.is_none();
    let mut f = sign * tau.value(&x);
    for _ in 0..max_iters {
        let g = tau.apply(&x);
        let mut y: Vec<f64> = g.iter().zip(&x).map(|(a, b)| sign * a + alpha * b).collect();
        let ny = real_norm(&y);
        if ny < 1e-300 {
            alpha = alpha * 2.0 + 1.0;
            continue;
        }
        y.iter_mut().for_each(|v| *v /= ny);
        let fy = sign * tau.value(&y);
        if adaptive && fy < f - 1e-15 * f.abs().max(1.0) && alpha < 1e6 {
            alpha = alpha * 2.0 + 1.0;
            continue;
        }
        let step = y.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        x = y;
        f = fy;
        if step < 1e-11 {
            break;
        }
    }
    x
}

/// Newton refinement of `tau x^(m-1) = lambda x, |x| = 1`.
fn newton_polish(tau: &RealSymTensor, x0: &[f64], steps: usize) -> (f64, Vec<f64>) {
    let d = tau.dim;
    let m = tau.order as f64;
    let mut x = x0.to_vec();
    let mut lambda = tau.value(&x);
    let mut best = (z_residual(tau, lambda, &x), lambda, x.clone());
    for _ in 0..steps {
        let g = tau.apply(&x);
        let mut rhs = DVector::zeros(d + 1);
        for i in 0..d {
            rhs[i] = -(g[i] - lambda * x[i]);
        }
        rhs[d] = -(1.0 - x.iter().map(|v| v * v).sum::<f64>()) / 2.0;
        let h = tau.partial(&x) * (m - 1.0);
        let mut jac = DMatrix::zeros(d + 1, d + 1);
        for i in 0..d {
            for j in 0..d {
                jac[(i, j)] = h[(i, j)] - if i == j { lambda } else { 0.0 };
            }
            jac[(i, d)] = -x[i];
            jac[(d, i)] = -x[i];
        }
        let Some(delta) = jac.lu().solve(&rhs) else { break };
        for i in 0..d {
            x[i] += delta[i];
        }
        let n = real_norm(&x);
        x.iter_mut().for_each(|v| *v /= n);
        lambda = tau.value(&x);
        let r = z_residual(tau, lambda, &x);
        if r < best.0 {
            best = (r, lambda, x.clone());
        }
        if r < 1e-15 {
            break;
        }
    }
    (best.1, best.2)
}

/// Flips `x` so its first significant component is positive.
fn sign_canonical(x: &mut [f64]) {
    if let Some(lead) = x.iter().find(|v| v.abs() > 1e-8) {
        if *lead < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

fn vector_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Sort by eigenvalue descending, then lexicographically by vector.
fn sort_pairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| {
        b.lambda.total_cmp(&a.lambda).then_with(|| {
            a.vector
                .iter()
                .zip(&b.vector)
                .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
}

/// Z-eigenpairs found by shifted power iterations on `tau` and `-tau` from
/// random starts and every standard basis vector, each refined by Newton
/// steps and kept only if its residual is at most [`RESIDUAL_TOL`].
pub fn z_eigen_search(tau: &ComplexTensor, cfg: &EigenSearchConfig) -> Result<Vec<EigenPair>> {
    let t = RealSymTensor::new(tau)?;
    Ok(z_eigen_search_real(&t, cfg))
}

pub fn z_eigen_search_real(t: &RealSymTensor, cfg: &EigenSearchConfig) -> Vec<EigenPair> {
    let d = t.dim;
    let starts = d + cfg.starts;
    // Per start: power iteration on tau and on -tau, then plain Newton,
    // which also reaches saddle points of the form on the sphere.
    let found: Vec<Option<EigenPair>> = par::map_indexed(3 * starts, |job| {
        let i = job / 3;
        let x0 = if i < d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        } else {
            let mut g = rng::stream(cfg.seed, i as u64);
            rng::real_unit_vector(&mut g, d)
        };
        let (lambda, mut x) = match job % 3 {
            0 => newton_polish(t, &shifted_power(t, 1.0, x0, cfg.shift, cfg.max_iters), 30),
            1 => newton_polish(t, &shifted_power(t, -1.0, x0, cfg.shift, cfg.max_iters), 30),
            _ => newton_polish(t, &x0, 100),
        };
        if t.order.is_multiple_of(2) {
            sign_canonical(&mut x);
        }
        let residual = z_residual(t, lambda, &x);
        (residual <= RESIDUAL_TOL).then(|| EigenPair {
            kind: EigenKind::Z,
            lambda,
            vector: to_complex(&x),
            residual,
        })
    });
    // Near-degenerate pairs leave a cloud of points that all pass the
    // residual test; keep the most accurate one.
    let mut found: Vec<EigenPair> = found.into_iter().flatten().collect();
    found.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut pairs: Vec<EigenPair> = Vec::new();
    for p in found {
        let dup = pairs.iter().any(|q| {
            (q.lambda - p.lambda).abs() <= MERGE_TOL && vector_distance(&q.vector, &p.vector) <= VECTOR_MERGE_TOL
        });
        if !dup {
            pairs.push(p);
        }
    }
    sort_pairs(&mut pairs);
    pairs
}

/// `||g(x) - lambda x||` with `g(x) = <x^(N-1)|psi>` and `x` rotated so that
/// `<x^N|psi>` is real and non-negative; returns `(lambda, residual)`.
pub fn us_residual(psi: &ComplexTensor, x: &[Complex64]) -> (f64, f64) {
    let n = psi.shape().parties();
    let refs: Vec<&[Complex64]> = (0..n - 1).map(|_| x).collect();
    let left = kron(&refs, true);
    let g = psi.contract_with(&left, n - 1, &[Complex64::new(1.0, 0.0)]);
    let c = inner(x, &g);
    let lambda = c.norm();
    // After x -> e^{i phi} x with phi = arg(c)/N, g picks up e^{-i(N-1) phi}.
    let phi = c.arg() / n as f64;
    let rot_x = Complex64::from_polar(1.0, phi);
    let rot_g = Complex64::from_polar(1.0, -(n as f64 - 1.0) * phi);
    let r = g
        .iter()
        .zip(x)
        .map(|(a, b)| (a * rot_g - b * rot_x * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let norm_err = (crate::tensor::norm(x) - 1.0).abs();
    (lambda, r + norm_err)
}

/// US-eigenpairs of a symmetric state from shifted symmetric power
/// iterations. The largest one is the maximal product overlap.
pub fn us_eigen_search(psi: &PureState, cfg: &EigenSearchConfig) -> Result<Vec<EigenPair>> {
    let dev = psi.symmetry_deviation()?;
    if dev > geometric::SYMMETRY_TOL {
        return Err(Error::Symmetry(dev));
    }
    if psi.parties() < 2 {
        return Err(Error::Kind("US-eigenpairs need at least two parties".into()));
    }
    let d = psi.dims()[0];
    let tensor = psi.tensor();
    let inner_cfg = SeeSawConfig {
        max_iters: cfg.max_iters.max(20_000),
        tol: 1e-15,
        step_tol: 1e-13,
        ..SeeSawConfig::default()
    };
    let warm = schmidt(psi, &Bipartition::new(&[0], psi.parties())?, DEFAULT_RANK_TOL)
        .left_vectors()[0]
        .clone();
    let found: Vec<Option<EigenPair>> = par::map_indexed(cfg.starts + 1, |i| {
        let x0 = if i == 0 {
            warm.clone()
        } else {
            let mut g = rng::stream(cfg.seed, i as u64);
            rng::unit_vector(&mut g, d)
        };
        let (_, x, _, _, _) = geometric::run_symmetric_power(tensor, x0, &inner_cfg);
        let (lambda, residual) = us_residual(tensor, &x);
        (residual <= RESIDUAL_TOL).then_some(EigenPair {
            kind: EigenKind::US,
            lambda,
            vector: x,
            residual,
        })
    });
    let mut pairs: Vec<EigenPair> = Vec::new();
    for p in found.into_iter().flatten() {
        let dup = pairs.iter().any(|q| {
            (q.lambda - p.lambda).abs() <= MERGE_TOL && inner(&q.vector, &p.vector).norm() >= 1.0 - 1e-9
        });
        if !dup {
            pairs.push(p);
        }
    }
    sort_pairs(&mut pairs);
    Ok(pairs)
}

/// A fixed point of the see-saw map: `<psi|x_1..(skip k)..x_N> = lambda <x_k|`
/// for every `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTuple {
    pub lambda: f64,
    pub vectors: ProductState,
    pub residual: f64,
}

/// Singular value tuples reached by the see-saw from random starts (and, for
/// two parties, from every Schmidt pair), deduplicated.
pub fn singular_tuples(psi: &PureState, cfg: &EigenSearchConfig) -> Result<Vec<SingularTuple>> {
    if psi.parties() < 2 {
        return Err(Error::Shape("singular tuples need at least two parties".into()));
    }
    let see = SeeSawConfig {
        max_iters: cfg.max_iters.max(20_000),
        tol: 1e-15,
        step_tol: 1e-13,
        restarts: cfg.starts.max(1),
        seed: cfg.seed,
    };
    let mut starts: Vec<ProductState> = Vec::new();
    if psi.parties() == 2 {
        let dec = schmidt(psi, &Bipartition::new(&[0], 2)?, DEFAULT_RANK_TOL);
        for (a, b) in dec.left_vectors().iter().zip(dec.right_vectors()) {
            starts.push(ProductState::from_normalized(vec![a.clone(), b.clone()]));
        }
    }
    let runs = geometric::all_runs(psi, &see, &starts);
    let tensor = psi.tensor();
    let mut tuples: Vec<SingularTuple> = Vec::new();
    for locals in runs {
        let residual = fixed_point_residual(tensor, &locals);
        if residual > RESIDUAL_TOL {
            continue;
        }
        let lambda = tensor.overlap_product(&locals).norm();
        let vectors = ProductState::from_normalized(locals);
        let dup = tuples
            .iter()
            .any(|t| (t.lambda - lambda).abs() <= MERGE_TOL && t.vectors.distance(&vectors) <= 1e-6);
        if !dup {
            tuples.push(SingularTuple {
                lambda,
                vectors,
                residual,
            });
        }
    }
    tuples.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
    Ok(tuples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointClass {
    Robust,
    Repelling,
    Marginal,
}

/// Sweeps run on every probe before measuring its distance.
const PROBE_SWEEPS: usize = 500;

/// Perturbs a verified fixed point in `n_probes` random directions of size
/// `delta`, runs the see-saw map, and reports whether all probes came back
/// (`Robust`), all left (`Repelling`), or neither.
pub fn classify_fixed_point(
    psi: &PureState,
    tuple: &ProductState,
    n_probes: usize,
    delta: f64,
    seed: u64,
) -> Result<FixedPointClass> {
    tuple.check_shape(psi.shape())?;
    let tensor = psi.tensor();
    let residual = fixed_point_residual(tensor, tuple.locals());
    if residual > RESIDUAL_TOL {
        return Err(Error::Kind(format!(
            "not a fixed point (residual {residual:.3e})"
        )));
    }
    let outcomes = par::map_indexed(n_probes, |i| {
        let mut g = rng::stream(seed, i as u64);
        let locals: Vec<Vec<Complex64>> = tuple
            .locals()
            .iter()
            .map(|v| {
                let dir = rng::unit_vector(&mut g, v.len());
                let mut p: Vec<Complex64> = v.iter().zip(&dir).map(|(a, b)| a + b * delta).collect();
                crate::tensor::normalize_in_place(&mut p);
                p
            })
            .collect();
        let end = geometric::iterate_map(tensor, locals, PROBE_SWEEPS, &mut g);
        ProductState::from_normalized(end).distance(tuple)
    });
    let returned = outcomes.iter().filter(|&&d| d < delta / 10.0).count();
    let escaped = outcomes.iter().filter(|&&d| d > delta).count();
    Ok(if returned == n_probes {
        FixedPointClass::Robust
    } else if escaped == n_probes {
        FixedPointClass::Repelling
    } else {
        FixedPointClass::Marginal
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdecoResult {
    pub is_odeco: bool,
    /// `(weight, vector)` pairs, weights descending.
    pub components: Vec<(f64, Vec<Complex64>)>,
    pub residual: f64,
    pub orthogonality: f64,
}

/// Tests whether a symmetric state is `sum_i s_i |a_i>^(x N)` with
/// orthonormal `a_i`. Components are taken one at a time as the attracting
/// fixed point of the symmetric power map on the deflated remainder.
pub fn odeco_check(psi: &PureState, cfg: &EigenSearchConfig) -> Result<OdecoResult> {
    let dev = psi.symmetry_deviation()?;
    if dev > geometric::SYMMETRY_TOL {
        return Err(Error::Symmetry(dev));
    }
    let n = psi.parties();
    let d = psi.dims()[0];
    let inner_cfg = SeeSawConfig {
        max_iters: cfg.max_iters.max(20_000),
        tol: 1e-15,
        step_tol: 1e-13,
        ..SeeSawConfig::default()
    };
    let mut remainder = psi.tensor().clone();
    let mut vectors: Vec<Vec<Complex64>> = Vec::new();
    for round in 0..d {
        if remainder.norm() <= 1e-9 {
            break;
        }
        let best = par::map_indexed(cfg.starts.max(1), |i| {
            let mut g = rng::stream(cfg.seed, (round * 1_000_003 + i) as u64);
            let x0 = rng::unit_vector(&mut g, d);
            let (lambda, x, _, _, _) = geometric::run_symmetric_power(&remainder, x0, &inner_cfg);
            (lambda, x)
        })
        .into_iter()
        .fold(None::<(f64, Vec<Complex64>)>, |acc, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("at least one start");
        let (lambda, x) = best;
        let refs: Vec<&[Complex64]> = (0..n).map(|_| x.as_slice()).collect();
        let rank_one = kron(&refs, false);
        for (r, v) in remainder.data_mut().iter_mut().zip(&rank_one) {
            *r -= v * lambda;
        }
        vectors.push(x);
    }

    let mut components: Vec<(f64, Vec<Complex64>)> = vectors
        .into_iter()
        .map(|x| {
            let refs: Vec<&[Complex64]> = (0..n).map(|_| x.as_slice()).collect();
            let c = inner(&kron(&refs, false), psi.amplitudes());
            // Absorb the phase of the weight into the vector.
            let rot = Complex64::from_polar(1.0, -c.arg() / n as f64);
            (c.norm(), x.iter().map(|z| z * rot.conj()).collect())
        })
        .collect();
    components.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut recon = vec![Complex64::new(0.0, 0.0); psi.total()];
    for (s, x) in &components {
        let refs: Vec<&[Complex64]> = (0..n).map(|_| x.as_slice()).collect();
        for (r, v) in recon.iter_mut().zip(kron(&refs, false)) {
            *r += v * s;
        }
    }
    let residual = vector_distance(&recon, psi.amplitudes());
    let mut orthogonality: f64 = 0.0;
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            orthogonality = orthogonality.max(inner(&components[i].1, &components[j].1).norm());
        }
    }
    let is_odeco = residual <= 1e-7 && orthogonality <= 1e-8;
    Ok(OdecoResult {
        is_odeco,
        components,
        residual,
        orthogonality,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
}

/// Extreme eigenvalues of the frame operator `sum_k |v_k><v_k|`.
pub fn frame_bounds(vectors: &[Vec<Complex64>], dim: usize) -> Result<FrameBounds> {
    if vectors.is_empty() || vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::Shape(format!("frame vectors must be non-empty and of length {dim}")));
    }
    let mut s = crate::hermitian::CMatrix::zeros(dim, dim);
    for v in vectors {
        s += crate::hermitian::projector(v);
    }
    let (w, _) = crate::hermitian::eigh(&s);
    let (lower, upper) = (w[0].max(0.0), w[dim - 1]);
    Ok(FrameBounds {
        lower,
        upper,
        tight: upper - lower <= 1e-10,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochCriterion {
    pub min_z: f64,
    pub entangled: bool,
    pub pairs_found: usize,
}

/// Real symmetric tensor `T_{i..k} = <sigma_i (x) .. (x) sigma_k>` over the
/// three Pauli directions.
pub fn bloch_tensor(psi: &PureState) -> Result<ComplexTensor> {
    let n = psi.parties();
    if psi.dims().iter().any(|&d| d != 2) {
        return Err(Error::Kind("Bloch tensor needs a multiqubit state".into()));
    }
    let shape = crate::tensor::Shape::with_limit(vec![3; n], usize::MAX)?;
    let amps = psi.amplitudes();
    let mut data = Vec::with_capacity(shape.total());
    for flat in 0..shape.total() {
        let paulis = shape.multi_index(flat);
        // sigma string acting on |b>: X flips, Y flips with phase, Z signs.
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut target = b;
            let mut phase = Complex64::new(1.0, 0.0);
            for (k, &p) in paulis.iter().enumerate() {
                let bit_pos = n - 1 - k;
                let bit = (b >> bit_pos) & 1;
                match p {
                    0 => target ^= 1 << bit_pos,
                    1 => {
                        target ^= 1 << bit_pos;
                        phase *= if bit == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
                    }
                    _ => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            acc += amps[target].conj() * phase * amp;
        }
        data.push(Complex64::new(acc.re, 0.0));
    }
    ComplexTensor::new(shape, data)
}

/// Entanglement test for symmetric multiqubit states with an even number of
/// qubits: the Bloch form `T(x,..,x)` of a symmetric separable state is a
/// convex combination of `(n . x)^N`, which is non-negative for even `N`.
/// A negative Z-eigenvalue therefore certifies entanglement; `false` is
/// inconclusive. For odd `N` the form is odd and carries no sign
/// information, so the test is refused.
pub fn bloch_z_criterion(psi: &PureState, cfg: &EigenSearchConfig) -> Result<BlochCriterion> {
    let dev = psi.symmetry_deviation()?;
    if dev > geometric::SYMMETRY_TOL {
        return Err(Error::Symmetry(dev));
    }
    if !psi.parties().is_multiple_of(2) {
        return Err(Error::Kind(format!(
            "Bloch-tensor criterion needs an even number of qubits, got {}",
            psi.parties()
        )));
    }
    let t = bloch_tensor(psi)?;
    let pairs = z_eigen_search(&t, cfg)?;
    let min_z = pairs.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
    Ok(BlochCriterion {
        min_z,
        entangled: min_z < -1e-9,
        pairs_found: pairs.len(),
    })
}
