//! Schmidt decomposition across a bipartition.

use num_complex::Complex64;

use crate::svd::svd;
use crate::tensor::{Bipartition, PureState};

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// `psi = sum_i s_i |a_i>|b_i>` with `s_1 >= s_2 >= ...`.
///
/// Only terms with `s_i > rank_tol` are kept. The first nonzero component
/// of every left vector is real and positive.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    cut: Bipartition,
    coefficients: Vec<f64>,
    left: Vec<Vec<Complex64>>,
    right: Vec<Vec<Complex64>>,
}

impl SchmidtDecomposition {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_vectors(&self) -> &[Vec<Complex64>] {
        &self.left
    }

    pub fn right_vectors(&self) -> &[Vec<Complex64>] {
        &self.right
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn cut(&self) -> &Bipartition {
        &self.cut
    }

    /// Largest coefficient `s_1`.
    pub fn top(&self) -> f64 {
        self.coefficients.first().copied().unwrap_or(0.0)
    }

    /// `sum_i s_i a_i (x) b_i` in the left-then-right party order.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let rows = self.left.first().map_or(0, |v| v.len());
        let cols = self.right.first().map_or(0, |v| v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
        for ((s, a), b) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for (r, ar) in a.iter().enumerate() {
                for (c, bc) in b.iter().enumerate() {
                    out[r * cols + c] += ar * bc * s;
                }
            }
        }
        out
    }
}

/// Amplitudes of `psi` reordered so the parties of `cut.left()` come first,
/// then `cut.right()`, each in ascending order. Returns `(data, rows, cols)`.
pub fn reshape_for_cut(psi: &PureState, cut: &Bipartition) -> (Vec<Complex64>, usize, usize) {
    let perm: Vec<usize> = cut.left().iter().chain(cut.right()).copied().collect();
    let permuted = psi
        .tensor()
        .permute_parties(&perm)
        .expect("bipartition is a permutation");
    let rows: usize = cut.left().iter().map(|&p| psi.dims()[p]).product();
    let cols = psi.total() / rows;
    (permuted.into_data(), rows, cols)
}

pub fn schmidt(psi: &PureState, cut: &Bipartition, rank_tol: f64) -> SchmidtDecomposition {
    let (m, rows, cols) = reshape_for_cut(psi, cut);
    let dec = svd(&m, rows, cols);
    let mut coefficients = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for ((s, u), v) in dec.values.into_iter().zip(dec.left).zip(dec.right) {
        if s <= rank_tol {
            continue;
        }
        // m = sum s u v^dagger = sum s u conj(v)^T
        let lead = u
            .iter()
            .find(|z| z.norm() > 1e-12)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = lead / lead.norm();
        let a: Vec<Complex64> = u.iter().map(|z| z * phase.conj()).collect();
        let b: Vec<Complex64> = v.iter().map(|z| z.conj() * phase).collect();
        coefficients.push(s);
        left.push(a);
        right.push(b);
    }
    SchmidtDecomposition {
        cut: cut.clone(),
        coefficients,
        left,
        right,
    }
}

/// Smallest top Schmidt coefficient over every bipartition; an upper bound
/// on the maximal product overlap.
pub fn bipartite_bound(psi: &PureState) -> f64 {
    Bipartition::all(psi.parties())
        .iter()
        .map(|cut| schmidt(psi, cut, 0.0).top())
        .fold(1.0, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named::NamedState;
    use crate::tensor::{inner, ProductState, Shape};

    #[test]
    fn ghz_cut() {
        let g = NamedState::Ghz { n: 3, d: 2 }.build().unwrap();
        let s = schmidt(&g, &Bipartition::new(&[0], 3).unwrap(), DEFAULT_RANK_TOL);
        assert_eq!(s.rank(), 2);
        for c in s.coefficients() {
            assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn product_has_rank_one() {
        let p = ProductState::random(&[2, 3], 9, 0).to_state();
        let s = schmidt(&p, &Bipartition::new(&[0], 2).unwrap(), DEFAULT_RANK_TOL);
        assert_eq!(s.rank(), 1);
        assert!((s.top() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn w_cut_matches_reduced_state_oracle() {
        // Reduced state of W on qubit A is diag(2/3, 1/3).
        let w = NamedState::W { n: 3 }.build().unwrap();
        for left in [[0], [1], [2]] {
            let s = schmidt(&w, &Bipartition::new(&left, 3).unwrap(), DEFAULT_RANK_TOL);
            assert!((s.coefficients()[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
            assert!((s.coefficients()[1] - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn random_states_reconstruct_with_orthonormal_vectors() {
        for (seed, dims) in [(1, vec![2, 2, 2]), (2, vec![4, 4, 4, 4]), (3, vec![2, 8, 16]), (4, vec![3, 5])] {
            let psi = PureState::haar_random(Shape::new(dims.clone()).unwrap(), seed);
            for cut in Bipartition::all(dims.len()) {
                let s = schmidt(&psi, &cut, DEFAULT_RANK_TOL);
                let total: f64 = s.coefficients().iter().map(|x| x * x).sum();
                assert!((total - 1.0).abs() < 1e-10);
                let (m, _, _) = reshape_for_cut(&psi, &cut);
                let err: f64 = s
                    .reconstruct()
                    .iter()
                    .zip(&m)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(err < 1e-9, "{dims:?} {cut:?}: {err}");
                for vecs in [s.left_vectors(), s.right_vectors()] {
                    for i in 0..vecs.len() {
                        for j in 0..vecs.len() {
                            let g = inner(&vecs[i], &vecs[j]);
                            let want = if i == j { 1.0 } else { 0.0 };
                            assert!((g - Complex64::new(want, 0.0)).norm() < 1e-10);
                        }
                    }
                }
                let lead = s.left_vectors()[0].iter().find(|z| z.norm() > 1e-12).unwrap();
                assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
            }
        }
    }

    #[test]
    fn bipartite_bound_values() {
        let g = NamedState::Ghz { n: 3, d: 2 }.build().unwrap();
        assert!((bipartite_bound(&g) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let w = NamedState::W { n: 3 }.build().unwrap();
        assert!((bipartite_bound(&w) - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let p = ProductState::random(&[2, 2, 3], 0, 0).to_state();
        assert!((bipartite_bound(&p) - 1.0).abs() < 1e-12);
    }
}
