//! Upper bound on `Lambda^2` from the PPT relaxation of the separable set.
//!
//! `max Tr(|psi><psi| rho)` over states whose partial transposes are all
//! positive is solved by projected gradient ascent. The projection onto
//! the intersection of the density-matrix set with every PPT cone is done by
//! Dykstra's alternating projections.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{self, min_eigenvalue, project_density, project_psd, projector, CMatrix};
use crate::tensor::{Bipartition, PureState, Shape};

/// Gather map realizing the partial transpose on the parties in `parties`:
/// `out[k] = rho[map[k]]` over the column-major `total x total` storage.
fn transpose_map(shape: &Shape, parties: &[usize]) -> Vec<usize> {
    let total = shape.total();
    let strides = shape.strides();
    let mut map = Vec::with_capacity(total * total);
    for col in 0..total {
        let ci = shape.multi_index(col);
        for row in 0..total {
            let ri = shape.multi_index(row);
            let (mut r, mut c) = (row, col);
            for &p in parties {
                let (a, b) = (ri[p], ci[p]);
                r = r - a * strides[p] + b * strides[p];
                c = c - b * strides[p] + a * strides[p];
            }
            map.push(c * total + r);
        }
    }
    map
}

fn apply_map(m: &CMatrix, map: &[usize]) -> CMatrix {
    let src = m.as_slice();
    CMatrix::from_iterator(m.nrows(), m.ncols(), map.iter().map(|&k| src[k]))
}

/// Partial transpose of `rho` on the parties in `parties`.
pub fn partial_transpose(rho: &CMatrix, shape: &Shape, parties: &[usize]) -> Result<CMatrix> {
    if rho.nrows() != shape.total() || rho.ncols() != shape.total() {
        return Err(Error::Shape(format!(
            "matrix is {}x{}, shape needs {}",
            rho.nrows(),
            rho.ncols(),
            shape.total()
        )));
    }
    if parties.iter().any(|&p| p >= shape.parties()) {
        return Err(Error::Shape(format!("party set {parties:?} out of range")));
    }
    Ok(apply_map(rho, &transpose_map(shape, parties)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptSolverConfig {
    pub step: f64,
    pub max_iters: usize,
    /// Change of the repaired objective that counts as stalled.
    pub tol: f64,
    /// Largest joint dimension accepted.
    pub max_total: usize,
    pub dykstra_iters: usize,
    pub dykstra_tol: f64,
}

impl Default for PptSolverConfig {
    fn default() -> Self {
        PptSolverConfig {
            step: 0.5,
            max_iters: 5000,
            tol: 1e-7,
            max_total: 64,
            dykstra_iters: 500,
            dykstra_tol: 1e-12,
        }
    }
}

/// Iterations exempt from the stall test.
const BURN_IN: usize = 50;
/// Consecutive stalled iterations needed to stop.
const STALL_WINDOW: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PptBoundResult {
    pub upper_bound: f64,
    /// Objective at the repaired (exactly feasible) point.
    pub repaired_objective: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of `rho^{T_X}` at the repaired point, per
    /// bipartition, `left` parties transposed.
    pub primal_residuals: Vec<(Vec<usize>, f64)>,
    pub min_eigenvalue: f64,
    pub trace_error: f64,
    pub converged: bool,
    /// Repaired objective after every iteration.
    pub objective_trace: Vec<f64>,
    /// Largest constraint violation after every iteration.
    pub infeasibility_trace: Vec<f64>,
}

struct Constraints {
    maps: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Constraints {
    fn new(shape: &Shape) -> Self {
        let maps = Bipartition::all(shape.parties())
            .into_iter()
            .map(|cut| {
                let parties = cut.left().to_vec();
                let map = transpose_map(shape, &parties);
                (parties, map)
            })
            .collect();
        Constraints { maps }
    }

    /// Dykstra projection of `y` onto the density matrices with all partial
    /// transposes PSD. The density set comes last, so the result always
    /// has unit trace and is PSD.
    fn project(&self, y: &CMatrix, cfg: &PptSolverConfig) -> CMatrix {
        let sets = self.maps.len() + 1;
        let mut x = y.clone();
        let mut incr: Vec<CMatrix> = vec![CMatrix::zeros(y.nrows(), y.ncols()); sets];
        for _ in 0..cfg.dykstra_iters {
            let mut moved = 0.0;
            for (i, p) in incr.iter_mut().enumerate() {
                let shifted = &x + &*p;
                let z = if i < self.maps.len() {
                    let map = &self.maps[i].1;
                    // The partial transpose is an isometric involution.
                    apply_map(&project_psd(&apply_map(&shifted, map)), map)
                } else {
                    project_density(&shifted)
                };
                *p = &shifted - &z;
                moved += (&z - &x).norm();
                x = z;
            }
            if moved < cfg.dykstra_tol {
                break;
            }
        }
        x
    }

    fn residuals(&self, rho: &CMatrix) -> Vec<(Vec<usize>, f64)> {
        self.maps
            .iter()
            .map(|(parties, map)| (parties.clone(), min_eigenvalue(&apply_map(rho, map))))
            .collect()
    }
}

/// Mixes in white noise until every constraint holds exactly; returns the
/// repaired point and the violation `eps` that was removed.
fn repair(rho: &CMatrix, residuals: &[(Vec<usize>, f64)]) -> (CMatrix, f64) {
    let total = rho.nrows();
    let worst = residuals
        .iter()
        .map(|r| r.1)
        .chain(std::iter::once(min_eigenvalue(rho)))
        .fold(f64::INFINITY, f64::min);
    let eps = (-worst).max(0.0);
    let tr = hermitian::trace(rho).re;
    let m = (rho + CMatrix::identity(total, total) * Complex64::new(eps, 0.0))
        * Complex64::new(1.0 / (tr + eps * total as f64), 0.0);
    (m, eps)
}

/// Approximate `max Tr(|psi><psi| rho)` over fully PPT states.
pub fn ppt_upper_bound(psi: &PureState, cfg: &PptSolverConfig) -> Result<PptBoundResult> {
    let total = psi.total();
    if total > cfg.max_total {
        return Err(Error::Shape(format!(
            "PPT relaxation limited to total dimension {}, got {total}",
            cfg.max_total
        )));
    }
    if psi.parties() < 2 {
        return Err(Error::Shape("PPT relaxation needs at least two parties".into()));
    }
    let constraints = Constraints::new(psi.shape());
    let pi = projector(psi.amplitudes());
    let objective = |m: &CMatrix| -> f64 { (&pi * m).trace().re };

    let mut rho = constraints.project(&pi, cfg);
    let mut objective_trace = Vec::new();
    let mut infeasibility_trace = Vec::new();
    let mut stalled = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut last = f64::NAN;
    while iterations < cfg.max_iters {
        iterations += 1;
        let ascent = &rho + &pi * Complex64::new(cfg.step, 0.0);
        rho = constraints.project(&ascent, cfg);
        let res = constraints.residuals(&rho);
        let (repaired, eps) = repair(&rho, &res);
        let value = objective(&repaired);
        objective_trace.push(value);
        infeasibility_trace.push(eps);
        if iterations > BURN_IN && (value - last).abs() < cfg.tol {
            stalled += 1;
            if stalled >= STALL_WINDOW {
                converged = true;
                break;
            }
        } else {
            stalled = 0;
        }
        last = value;
    }

    let (repaired, eps) = repair(&rho, &constraints.residuals(&rho));
    let repaired_objective = objective(&repaired);
    // |Tr(Pi (rho - repaired))| <= ||rho - repaired||_1 <= 2 eps total.
    let slack = 2.0 * eps * total as f64;
    Ok(PptBoundResult {
        upper_bound: (repaired_objective + slack).min(1.0),
        repaired_objective,
        iterations,
        min_eigenvalue: min_eigenvalue(&repaired),
        trace_error: (hermitian::trace(&repaired).re - 1.0).abs(),
        primal_residuals: constraints.residuals(&repaired),
        converged,
        objective_trace,
        infeasibility_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{eigh, DensityMatrix};
    use crate::named::NamedState;
    use crate::tensor::ProductState;

    #[test]
    fn partial_transpose_examples() {
        let shape = Shape::new(vec![2, 2]).unwrap();
        let bell = NamedState::Ghz { n: 2, d: 2 }.build().unwrap();
        let rho = projector(bell.amplitudes());
        let pt = partial_transpose(&rho, &shape, &[0]).unwrap();
        // Oracle: rho^{T_A} of |Phi+> is SWAP/2 with spectrum {1/2 x3, -1/2}.
        let (w, _) = eigh(&pt);
        assert!((w[0] + 0.5).abs() < 1e-12);
        for x in &w[1..] {
            assert!((x - 0.5).abs() < 1e-12);
        }
        let back = partial_transpose(&pt, &shape, &[0]).unwrap();
        assert_eq!(back, rho);
        assert!((hermitian::trace(&pt) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let p = ProductState::random(&[2, 3], 2, 0).to_state();
        let s = Shape::new(vec![2, 3]).unwrap();
        let ptp = partial_transpose(&projector(p.amplitudes()), &s, &[0]).unwrap();
        assert!(min_eigenvalue(&ptp) > -1e-12);
        assert!(partial_transpose(&rho, &s, &[0]).is_err());
    }

    #[test]
    fn transpose_on_both_parties_is_full_transpose() {
        let shape = Shape::new(vec![2, 3]).unwrap();
        let psi = PureState::haar_random(shape.clone(), 8);
        let rho = projector(psi.amplitudes());
        let pt = partial_transpose(&rho, &shape, &[0, 1]).unwrap();
        assert!((pt - rho.transpose()).norm() < 1e-15);
    }

    #[test]
    fn product_state_bound_is_one() {
        let p = ProductState::random(&[2, 2, 2], 5, 0).to_state();
        let r = ppt_upper_bound(&p, &PptSolverConfig::default()).unwrap();
        assert!((r.upper_bound - 1.0).abs() < 1e-6, "{}", r.upper_bound);
    }

    #[test]
    fn ghz_bound_is_one_half() {
        let g = NamedState::Ghz { n: 3, d: 2 }.build().unwrap();
        let r = ppt_upper_bound(&g, &PptSolverConfig::default()).unwrap();
        assert!((r.upper_bound - 0.5).abs() < 1e-4, "{r:?}");
        assert!(r.primal_residuals.iter().all(|x| x.1 >= -1e-7));
        assert!(r.min_eigenvalue >= -1e-7 && r.trace_error <= 1e-9);
        let rho = DensityMatrix::new(hermitian::project_density(&projector(g.amplitudes())));
        assert!(rho.is_ok());
    }

    #[test]
    fn dimension_cap() {
        let big = PureState::haar_random(Shape::new(vec![2; 7]).unwrap(), 0);
        assert!(matches!(
            ppt_upper_bound(&big, &PptSolverConfig::default()),
            Err(Error::Shape(_))
        ));
    }
}
