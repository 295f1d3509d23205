//! Dense multipartite coefficient tensors and product states.
//!
//! Layout is row-major with the last party's index varying fastest, so the
//! flat index of `|i_1 i_2 ... i_N>` is `((i_1 d_2 + i_2) d_3 + ...) + i_N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Default cap on the joint dimension.
pub const DEFAULT_MAX_TOTAL: usize = 1 << 16;

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`, conjugating the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn normalize_in_place(v: &mut [Complex64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// Kronecker product of the given local vectors, optionally conjugated.
pub(crate) fn kron(vectors: &[&[Complex64]], conjugate: bool) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for v in vectors {
        let mut next = Vec::with_capacity(out.len() * v.len());
        for a in &out {
            for b in v.iter() {
                let b = if conjugate { b.conj() } else { *b };
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

/// Per-party local dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_limit(dims, DEFAULT_MAX_TOTAL)
    }

    /// Like [`Shape::new`] with a custom cap on the joint dimension.
    pub fn with_limit(dims: Vec<usize>, max_total: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("at least one party is required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Shape(format!("local dimension {d} < 2")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= max_total)
                .ok_or_else(|| {
                    Error::Shape(format!("total dimension exceeds the cap of {max_total}"))
                })?;
        }
        Ok(Shape { dims })
    }

    /// `n` parties of local dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Common local dimension, if all parties agree.
    pub fn uniform_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    /// Flat-index strides (last party has stride 1).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            idx[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

/// Dense complex coefficient array over a [`Shape`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor {
    shape: Shape,
    data: Vec<Complex64>,
}

impl ComplexTensor {
    pub fn new(shape: Shape, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != shape.total() {
            return Err(Error::Shape(format!(
                "expected {} coefficients for dims {:?}, got {}",
                shape.total(),
                shape.dims(),
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("non-finite coefficient".into()));
        }
        Ok(ComplexTensor { shape, data })
    }

    /// Real tensor from real coefficients.
    pub fn from_real(shape: Shape, data: &[f64]) -> Result<Self> {
        Self::new(shape, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.total();
        ComplexTensor {
            shape,
            data: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= tol)
    }

    /// Contracts every party except `k` with the conjugates of `locals`
    /// (`locals[k]` is ignored) and returns the remaining vector on party
    /// `k`. This is the see-saw update direction `<others|psi>`.
    pub fn contract_except(&self, locals: &[Vec<Complex64>], k: usize) -> Vec<Complex64> {
        let dims = self.shape.dims();
        debug_assert_eq!(locals.len(), dims.len());
        let left_vecs: Vec<&[Complex64]> = locals[..k].iter().map(|v| v.as_slice()).collect();
        let right_vecs: Vec<&[Complex64]> =
            locals[k + 1..].iter().map(|v| v.as_slice()).collect();
        let left = kron(&left_vecs, true);
        let right = kron(&right_vecs, true);
        self.contract_with(&left, k, &right)
    }

    /// `out[i] = sum_{l,r} left[l] * data[l, i, r] * right[r]`, where the
    /// tensor is viewed as `(prod dims[..k], dims[k], prod dims[k+1..])`.
    pub(crate) fn contract_with(
        &self,
        left: &[Complex64],
        k: usize,
        right: &[Complex64],
    ) -> Vec<Complex64> {
        let d = self.shape.dims()[k];
        let r_len = right.len();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (l, lw) in left.iter().enumerate() {
            if *lw == Complex64::new(0.0, 0.0) {
                continue;
            }
            let block = &self.data[l * d * r_len..(l + 1) * d * r_len];
            for (i, o) in out.iter_mut().enumerate() {
                let row = &block[i * r_len..(i + 1) * r_len];
                let s: Complex64 = row.iter().zip(right).map(|(a, b)| a * b).sum();
                *o += lw * s;
            }
        }
        out
    }

    /// `<x_1 ... x_N | tau>`.
    pub fn overlap_product(&self, locals: &[Vec<Complex64>]) -> Complex64 {
        let last = locals.len() - 1;
        let v = self.contract_except(locals, last);
        inner(&locals[last], &v)
    }

    /// Reorders parties: party `k` of the output is party `perm[k]` of `self`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let n = self.shape.parties();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Shape(format!("{perm:?} is not a permutation of {n} parties")));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.shape.dims()[p]).collect();
        let new_shape = Shape::with_limit(new_dims, usize::MAX)?;
        let old_strides = self.shape.strides();
        let mut out = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for (flat, slot) in out.iter_mut().enumerate() {
            let idx = new_shape.multi_index(flat);
            let src: usize = idx
                .iter()
                .zip(perm)
                .map(|(&i, &p)| i * old_strides[p])
                .sum();
            *slot = self.data[src];
        }
        Ok(ComplexTensor {
            shape: new_shape,
            data: out,
        })
    }

    /// Swaps parties `a` and `b`.
    pub fn swap_parties(&self, a: usize, b: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..self.shape.parties()).collect();
        if a >= perm.len() || b >= perm.len() {
            return Err(Error::Shape(format!("party index out of range: {a}, {b}")));
        }
        perm.swap(a, b);
        self.permute_parties(&perm)
    }

    /// Largest deviation `||P_(k,k+1) tau - tau||` over adjacent swaps.
    pub fn symmetry_deviation(&self) -> Result<f64> {
        if self.shape.uniform_dim().is_none() {
            return Err(Error::Shape(format!(
                "permutation symmetry needs equal local dimensions, got {:?}",
                self.shape.dims()
            )));
        }
        let mut worst: f64 = 0.0;
        for k in 0..self.shape.parties().saturating_sub(1) {
            let swapped = self.swap_parties(k, k + 1)?;
            let diff = swapped
                .data
                .iter()
                .zip(&self.data)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(diff);
        }
        Ok(worst)
    }
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    tensor: ComplexTensor,
    norm_factor: f64,
}

impl PureState {
    /// Normalizes `coefficients` into a state of the given shape.
    pub fn new(shape: Shape, coefficients: Vec<Complex64>) -> Result<Self> {
        Self::from_tensor(ComplexTensor::new(shape, coefficients)?)
    }

    pub fn from_tensor(mut tensor: ComplexTensor) -> Result<Self> {
        let n = tensor.norm();
        if n <= f64::MIN_POSITIVE || !n.is_finite() {
            return Err(Error::DegenerateInput("zero coefficient vector".into()));
        }
        tensor.data.iter_mut().for_each(|z| *z /= n);
        Ok(PureState {
            tensor,
            norm_factor: 1.0 / n,
        })
    }

    /// Computational basis state `|idx>`.
    pub fn basis(shape: Shape, idx: &[usize]) -> Result<Self> {
        if idx.len() != shape.parties() || idx.iter().zip(shape.dims()).any(|(&i, &d)| i >= d) {
            return Err(Error::Shape(format!("basis index {idx:?} invalid for {:?}", shape.dims())));
        }
        let flat = shape.flat_index(idx);
        let mut t = ComplexTensor::zeros(shape);
        t.data[flat] = Complex64::new(1.0, 0.0);
        Self::from_tensor(t)
    }

    /// Factor that was applied to the raw coefficients.
    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    pub fn tensor(&self) -> &ComplexTensor {
        &self.tensor
    }

    pub fn shape(&self) -> &Shape {
        self.tensor.shape()
    }

    pub fn dims(&self) -> &[usize] {
        self.tensor.dims()
    }

    pub fn parties(&self) -> usize {
        self.tensor.shape().parties()
    }

    pub fn total(&self) -> usize {
        self.tensor.shape().total()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.tensor.data()
    }

    /// `<phi|self>`.
    pub fn overlap(&self, phi: &PureState) -> Result<Complex64> {
        if self.dims() != phi.dims() {
            return Err(Error::Shape(format!(
                "shape mismatch: {:?} vs {:?}",
                self.dims(),
                phi.dims()
            )));
        }
        Ok(inner(phi.amplitudes(), self.amplitudes()))
    }

    /// `<a_1 ... a_N | self>`.
    pub fn overlap_product(&self, product: &ProductState) -> Result<Complex64> {
        product.check_shape(self.shape())?;
        Ok(self.tensor.overlap_product(product.locals()))
    }

    /// Unnormalized `<a_1 .. (skip k) .. a_N | self>` on party `k`.
    pub fn contract_all_but_one(&self, product: &ProductState, k: usize) -> Result<Vec<Complex64>> {
        product.check_shape(self.shape())?;
        if k >= self.parties() {
            return Err(Error::Shape(format!("party {k} out of range")));
        }
        Ok(self.tensor.contract_except(product.locals(), k))
    }

    /// Regroups `self (x) phi` as a state of the same party count with
    /// local dimensions multiplied party by party.
    pub fn tensor_product_regroup(&self, phi: &PureState) -> Result<PureState> {
        let (n, m) = (self.parties(), phi.parties());
        if n != m {
            return Err(Error::Shape(format!("party counts differ: {n} vs {m}")));
        }
        let dims: Vec<usize> = self.dims().iter().zip(phi.dims()).map(|(a, b)| a * b).collect();
        let shape = Shape::new(dims)?;
        let inner_dims = phi.dims();
        let mut data = vec![Complex64::new(0.0, 0.0); shape.total()];
        for (i, a) in self.amplitudes().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let ii = self.shape().multi_index(i);
            for (j, b) in phi.amplitudes().iter().enumerate() {
                let jj = phi.shape().multi_index(j);
                let flat = ii
                    .iter()
                    .zip(&jj)
                    .zip(inner_dims)
                    .zip(shape.dims())
                    .fold(0, |acc, (((&x, &y), &e), &d)| acc * d + x * e + y);
                data[flat] = a * b;
            }
        }
        PureState::new(shape, data)
    }

    /// Whether the state is invariant under every transposition of parties.
    pub fn is_symmetric(&self, tol: f64) -> Result<bool> {
        Ok(self.tensor.symmetry_deviation()? <= tol)
    }

    pub fn symmetry_deviation(&self) -> Result<f64> {
        self.tensor.symmetry_deviation()
    }

    pub fn swap_parties(&self, a: usize, b: usize) -> Result<PureState> {
        Ok(PureState {
            tensor: self.tensor.swap_parties(a, b)?,
            norm_factor: self.norm_factor,
        })
    }

    /// Applies a local operator `u` (row-major `d x d`) on party `k`.
    pub fn apply_local(&self, k: usize, u: &[Complex64]) -> Result<PureState> {
        let dims = self.dims();
        if k >= dims.len() || u.len() != dims[k] * dims[k] {
            return Err(Error::Shape(format!("operator does not fit party {k}")));
        }
        let d = dims[k];
        let right: usize = dims[k + 1..].iter().product();
        let left: usize = dims[..k].iter().product();
        let src = self.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
        for l in 0..left {
            for i in 0..d {
                for j in 0..d {
                    let uij = u[i * d + j];
                    if uij.norm_sqr() == 0.0 {
                        continue;
                    }
                    for r in 0..right {
                        out[(l * d + i) * right + r] += uij * src[(l * d + j) * right + r];
                    }
                }
            }
        }
        PureState::new(self.shape().clone(), out)
    }

    /// Haar-random state; identical for identical `(shape, seed)`.
    pub fn haar_random(shape: Shape, seed: u64) -> PureState {
        Self::haar_random_indexed(shape, seed, 0)
    }

    /// Sample `index` of the Haar stream `seed`.
    pub fn haar_random_indexed(shape: Shape, seed: u64, index: u64) -> PureState {
        let mut rng = rng::stream(seed, index);
        let data = rng::unit_vector(&mut rng, shape.total());
        PureState {
            tensor: ComplexTensor { shape, data },
            norm_factor: 1.0,
        }
    }
}

/// Tensor product of local unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    locals: Vec<Vec<Complex64>>,
}

impl ProductState {
    /// Normalizes every local vector.
    pub fn new(mut locals: Vec<Vec<Complex64>>) -> Result<Self> {
        if locals.is_empty() {
            return Err(Error::Shape("product state needs at least one party".into()));
        }
        for v in &mut locals {
            if normalize_in_place(v) <= f64::MIN_POSITIVE {
                return Err(Error::DegenerateInput("zero local vector".into()));
            }
        }
        Ok(ProductState { locals })
    }

    pub(crate) fn from_normalized(locals: Vec<Vec<Complex64>>) -> Self {
        ProductState { locals }
    }

    /// Product of computational basis vectors.
    pub fn basis(dims: &[usize], idx: &[usize]) -> Result<Self> {
        if dims.len() != idx.len() || idx.iter().zip(dims).any(|(&i, &d)| i >= d) {
            return Err(Error::Shape(format!("basis index {idx:?} invalid for {dims:?}")));
        }
        let locals = dims
            .iter()
            .zip(idx)
            .map(|(&d, &i)| {
                let mut v = vec![Complex64::new(0.0, 0.0); d];
                v[i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Ok(ProductState { locals })
    }

    pub fn random(dims: &[usize], seed: u64, index: u64) -> Self {
        let mut rng = rng::stream(seed, index);
        ProductState {
            locals: dims.iter().map(|&d| rng::unit_vector(&mut rng, d)).collect(),
        }
    }

    pub fn locals(&self) -> &[Vec<Complex64>] {
        &self.locals
    }

    pub fn dims(&self) -> Vec<usize> {
        self.locals.iter().map(|v| v.len()).collect()
    }

    pub fn parties(&self) -> usize {
        self.locals.len()
    }

    pub(crate) fn check_shape(&self, shape: &Shape) -> Result<()> {
        if self.dims() != shape.dims() {
            return Err(Error::Shape(format!(
                "product state dims {:?} do not match {:?}",
                self.dims(),
                shape.dims()
            )));
        }
        Ok(())
    }

    /// Dense amplitudes of the product.
    pub fn to_state(&self) -> PureState {
        let refs: Vec<&[Complex64]> = self.locals.iter().map(|v| v.as_slice()).collect();
        let data = kron(&refs, false);
        let shape = Shape::with_limit(self.dims(), usize::MAX).expect("local dims are valid");
        PureState::new(shape, data).expect("product of unit vectors is nonzero")
    }

    /// Phase-insensitive distance: `max_k sqrt(1 - |<a_k|b_k>|^2)`.
    pub fn distance(&self, other: &ProductState) -> f64 {
        self.locals
            .iter()
            .zip(&other.locals)
            .map(|(a, b)| (1.0 - inner(a, b).norm_sqr()).max(0.0).sqrt())
            .fold(0.0, f64::max)
    }
}

/// A split of the parties into two non-empty groups. `left` is kept in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(left: &[usize], parties: usize) -> Result<Self> {
        let mut l = left.to_vec();
        l.sort_unstable();
        l.dedup();
        if l.len() != left.len() {
            return Err(Error::Shape("duplicate party in bipartition".into()));
        }
        if l.is_empty() || l.len() >= parties || l.iter().any(|&p| p >= parties) {
            return Err(Error::Shape(format!(
                "invalid bipartition {left:?} of {parties} parties"
            )));
        }
        let right = (0..parties).filter(|p| !l.contains(p)).collect();
        Ok(Bipartition { left: l, right })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// Every nontrivial bipartition counted once up to complementation;
    /// `left` always contains party 0.
    pub fn all(parties: usize) -> Vec<Bipartition> {
        if parties < 2 {
            return Vec::new();
        }
        let rest = parties - 1;
        (0..(1usize << rest) - 1)
            .map(|mask| {
                let mut left = vec![0];
                left.extend((0..rest).filter(|b| mask & (1 << b) != 0).map(|b| b + 1));
                Bipartition::new(&left, parties).expect("mask yields a proper subset")
            })
            .collect()
    }
}

/// Dimension of the symmetric subspace of `n` parties of dimension `d`,
/// `binom(n + d - 1, d - 1)`.
pub fn sym_dim(n: usize, d: usize) -> u128 {
    let k = (d - 1) as u128;
    let top = (n + d - 1) as u128;
    (0..k).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn shape_rejects_bad_input() {
        assert!(Shape::new(vec![]).is_err());
        assert!(Shape::new(vec![2, 1]).is_err());
        assert!(Shape::new(vec![2; 17]).is_err());
        assert!(Shape::with_limit(vec![2; 17], 1 << 17).is_ok());
        assert_eq!(Shape::new(vec![2, 3, 4]).unwrap().strides(), vec![12, 4, 1]);
    }

    #[test]
    fn flat_and_multi_index_agree() {
        let s = Shape::new(vec![2, 3, 2]).unwrap();
        for f in 0..s.total() {
            assert_eq!(s.flat_index(&s.multi_index(f)), f);
        }
        assert_eq!(s.flat_index(&[1, 0, 1]), 7);
    }

    #[test]
    fn make_state_normalizes_and_records_factor() {
        let s = PureState::new(Shape::new(vec![2, 2]).unwrap(), vec![c(1.0), c(0.0), c(0.0), c(1.0)])
            .unwrap();
        assert!((s.tensor().norm() - 1.0).abs() < 1e-12);
        assert!((s.norm_factor() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn make_state_errors() {
        let shape = Shape::new(vec![2, 2, 2]).unwrap();
        assert!(matches!(
            PureState::new(shape.clone(), vec![c(0.0); 8]),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(PureState::new(shape, vec![c(1.0); 7]), Err(Error::Shape(_))));
    }

    #[test]
    fn w_from_basis_entries() {
        let mut data = vec![c(0.0); 8];
        for i in [0b001, 0b010, 0b100] {
            data[i] = c(1.0);
        }
        let w = PureState::new(Shape::new(vec![2, 2, 2]).unwrap(), data).unwrap();
        for i in [1, 2, 4] {
            assert!((w.amplitudes()[i].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn contraction_examples() {
        let dims = [2, 2, 2];
        let ghz = crate::named::NamedState::Ghz { n: 3, d: 2 }.build().unwrap();
        let zeros = ProductState::basis(&dims, &[0, 0, 0]).unwrap();
        let v = ghz.contract_all_but_one(&zeros, 0).unwrap();
        assert!((v[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(v[1].norm() < 1e-15);

        let w = crate::named::NamedState::W { n: 3 }.build().unwrap();
        let v = w.contract_all_but_one(&zeros, 0).unwrap();
        assert!(v[0].norm() < 1e-15);
        assert!((v[1].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);

        let p = ProductState::random(&dims, 3, 0);
        let v = p.to_state().contract_all_but_one(&p, 0).unwrap();
        // Identity case: recovers a up to the phases carried by b, c.
        assert!((inner(&p.locals()[0], &v).norm() - 1.0).abs() < 1e-12);
        assert!((norm(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let ghz = crate::named::NamedState::Ghz { n: 3, d: 2 }.build().unwrap();
        let w = crate::named::NamedState::W { n: 3 }.build().unwrap();
        let shape = Shape::new(vec![2, 2, 2]).unwrap();
        let zero = PureState::basis(shape.clone(), &[0, 0, 0]).unwrap();
        let one = PureState::basis(shape, &[1, 1, 1]).unwrap();
        assert!((ghz.overlap(&zero).unwrap().re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((ghz.overlap(&ghz).unwrap().re - 1.0).abs() < 1e-15);
        assert!(w.overlap(&one).unwrap().norm() < 1e-15);
        let bell = crate::named::NamedState::Ghz { n: 2, d: 2 }.build().unwrap();
        assert!(matches!(ghz.overlap(&bell), Err(Error::Shape(_))));
    }

    #[test]
    fn swap_twice_is_identity() {
        let psi = PureState::haar_random(Shape::new(vec![2, 3, 3]).unwrap(), 11);
        let back = psi.swap_parties(1, 2).unwrap().swap_parties(1, 2).unwrap();
        assert_eq!(back.amplitudes(), psi.amplitudes());
    }

    #[test]
    fn regroup_examples() {
        let ghz = crate::named::NamedState::Ghz { n: 3, d: 2 }.build().unwrap();
        let g2 = ghz.tensor_product_regroup(&ghz).unwrap();
        assert_eq!(g2.dims(), &[4, 4, 4]);
        assert!((g2.tensor().norm() - 1.0).abs() < 1e-12);
        let bell = crate::named::NamedState::Ghz { n: 2, d: 2 }.build().unwrap();
        assert!(ghz.tensor_product_regroup(&bell).is_err());

        let p = ProductState::random(&[2, 2, 2], 1, 0);
        let q = ProductState::random(&[2, 3, 2], 1, 1);
        let pq = p.to_state().tensor_product_regroup(&q.to_state()).unwrap();
        let schmidt = crate::schmidt::schmidt(&pq, &Bipartition::new(&[0], 3).unwrap(), 1e-9);
        assert_eq!(schmidt.rank(), 1);
    }

    #[test]
    fn symmetry_examples() {
        use crate::named::NamedState;
        assert!(NamedState::W { n: 3 }.build().unwrap().is_symmetric(1e-12).unwrap());
        assert!(!NamedState::Antisymmetric { n: 3 }.build().unwrap().is_symmetric(1e-12).unwrap());
        assert!(!NamedState::TransInv4.build().unwrap().is_symmetric(1e-12).unwrap());
        let uneven = PureState::haar_random(Shape::new(vec![2, 3]).unwrap(), 0);
        assert!(matches!(uneven.is_symmetric(1e-12), Err(Error::Shape(_))));
    }

    #[test]
    fn haar_is_normalized_and_deterministic() {
        let shape = Shape::new(vec![3, 2, 2]).unwrap();
        let a = PureState::haar_random(shape.clone(), 5);
        let b = PureState::haar_random(shape.clone(), 5);
        let c = PureState::haar_random(shape, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.tensor().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sym_dim_values() {
        assert_eq!(sym_dim(3, 2), 4);
        assert_eq!(sym_dim(1, 5), 5);
        assert_eq!(sym_dim(2, 3), 6);
        assert_eq!(sym_dim(4, 2), 5);
    }

    #[test]
    fn all_bipartitions_count() {
        assert_eq!(Bipartition::all(2).len(), 1);
        assert_eq!(Bipartition::all(3).len(), 3);
        assert_eq!(Bipartition::all(4).len(), 7);
        assert!(Bipartition::new(&[0, 1, 2], 3).is_err());
        assert!(Bipartition::new(&[], 3).is_err());
        assert_eq!(Bipartition::new(&[2, 0], 4).unwrap().right(), &[1, 3]);
    }
}
