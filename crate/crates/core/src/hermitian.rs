//! Hermitian matrix helpers and density matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::PureState;

pub type CMatrix = DMatrix<Complex64>;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `V diag(f(w)) V^dagger`.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let scaled = DVector::from_iterator(values.len(), values.iter().map(|&w| Complex64::new(f(w), 0.0)));
    let mut left = vectors.clone();
    for (c, s) in scaled.iter().enumerate() {
        left.column_mut(c).scale_mut(s.re);
    }
    left * vectors.adjoint()
}

pub fn min_eigenvalue(h: &CMatrix) -> f64 {
    eigh(h).0.first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(h: &CMatrix) -> f64 {
    eigh(h).0.last().copied().unwrap_or(0.0)
}

/// Frobenius-nearest positive semidefinite matrix (eigenvalues clipped at 0).
pub fn project_psd(h: &CMatrix) -> CMatrix {
    let (w, v) = eigh(h);
    spectral_map(&w, &v, |x| x.max(0.0))
}

/// Euclidean projection of `w` onto the probability simplex.
pub fn project_simplex(w: &[f64]) -> Vec<f64> {
    let mut sorted = w.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    w.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius-nearest density matrix (PSD with unit trace).
pub fn project_density(h: &CMatrix) -> CMatrix {
    let (w, v) = eigh(h);
    let p = project_simplex(&w);
    let mut out = v.clone();
    for (c, s) in p.iter().enumerate() {
        out.column_mut(c).scale_mut(*s);
    }
    out * v.adjoint()
}

/// Principal square root of a PSD matrix (negative eigenvalues clipped).
pub fn psd_sqrt(h: &CMatrix) -> CMatrix {
    let (w, v) = eigh(h);
    spectral_map(&w, &v, |x| x.max(0.0).sqrt())
}

pub fn hermiticity_error(h: &CMatrix) -> f64 {
    (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(h: &CMatrix) -> Complex64 {
    h.diagonal().iter().sum()
}

/// `|psi><psi|`.
pub fn projector(amplitudes: &[Complex64]) -> CMatrix {
    let v = DVector::from_column_slice(amplitudes);
    &v * v.adjoint()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const PSD_TOL: f64 = 1e-9;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::State(format!(
                "matrix is not square: {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::State("non-finite entry".into()));
        }
        let herm = hermiticity_error(&matrix);
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::State(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::State(format!("trace is {tr}, expected 1")));
        }
        let m = min_eigenvalue(&matrix);
        if m < -Self::PSD_TOL {
            return Err(Error::State(format!("not positive semidefinite (min eigenvalue {m:.3e})")));
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn pure(psi: &PureState) -> Self {
        DensityMatrix {
            matrix: projector(psi.amplitudes()),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        }
    }

    /// `sum_i p_i rho_i`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let dim = parts.first().ok_or_else(|| Error::State("empty mixture".into()))?.1.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (p, rho) in parts {
            if rho.dim() != dim || *p < 0.0 {
                return Err(Error::State("incompatible mixture component".into()));
            }
            m += &rho.matrix * Complex64::new(*p, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}
