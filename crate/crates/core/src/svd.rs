//! One-sided (Hestenes) Jacobi SVD for small dense complex matrices.

use num_complex::Complex64;

/// Thin SVD `m = sum_i s_i u_i v_i^dagger`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub values: Vec<f64>,
    /// Left singular vectors, each of length `rows`.
    pub left: Vec<Vec<Complex64>>,
    /// Right singular vectors, each of length `cols`.
    pub right: Vec<Vec<Complex64>>,
}

const MAX_SWEEPS: usize = 80;

/// Orthogonalizes the columns of `a` (column-major, `cols` columns of
/// length `rows`) by plane rotations accumulated into `v`.
fn jacobi_columns(a: &mut [Vec<Complex64>], v: &mut [Vec<Complex64>]) {
    let n = a.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = a[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = a[i].iter().zip(&a[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(a, i, j, c, s, phase);
                rotate(v, i, j, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
}

/// `x_i <- c x_i - s conj(p) x_j`, `x_j <- s p x_i + c x_j`.
fn rotate(cols: &mut [Vec<Complex64>], i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    let (lo, hi) = cols.split_at_mut(j);
    let (xi, xj) = (&mut lo[i], &mut hi[0]);
    let pc = phase.conj();
    for (a, b) in xi.iter_mut().zip(xj.iter_mut()) {
        let (ai, bj) = (*a, *b);
        *a = ai * c - pc * bj * s;
        *b = phase * ai * s + bj * c;
    }
}

/// SVD of a row-major `rows x cols` matrix, keeping `min(rows, cols)`
/// triplets.
pub fn svd(data: &[Complex64], rows: usize, cols: usize) -> Svd {
    assert_eq!(data.len(), rows * cols);
    if rows < cols {
        // m^T = sum s p q^dagger  =>  m = sum s conj(q) conj(p)^dagger
        let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
        for r in 0..rows {
            for c in 0..cols {
                t[c * rows + r] = data[r * cols + c];
            }
        }
        let sv = svd(&t, cols, rows);
        let conj = |v: Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
            v.into_iter().map(|x| x.into_iter().map(|z| z.conj()).collect()).collect()
        };
        return Svd {
            values: sv.values,
            left: conj(sv.right),
            right: conj(sv.left),
        };
    }
    let mut a: Vec<Vec<Complex64>> = (0..cols)
        .map(|c| (0..rows).map(|r| data[r * cols + c]).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..cols)
        .map(|c| {
            let mut e = vec![Complex64::new(0.0, 0.0); cols];
            e[c] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    jacobi_columns(&mut a, &mut v);

    let mut order: Vec<(f64, usize)> = a
        .iter()
        .enumerate()
        .map(|(i, col)| (col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(), i))
        .collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut values = Vec::with_capacity(cols);
    let mut left = Vec::with_capacity(cols);
    let mut right = Vec::with_capacity(cols);
    for (s, i) in order {
        values.push(s);
        left.push(if s > 0.0 {
            a[i].iter().map(|z| z / s).collect()
        } else {
            vec![Complex64::new(0.0, 0.0); rows]
        });
        right.push(v[i].clone());
    }
    Svd {
        values,
        left,
        right,
    }
}
