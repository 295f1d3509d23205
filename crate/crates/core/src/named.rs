//! Reference states with closed-form coefficients.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{PureState, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    /// `(|0..0> + |1..1> + ... + |d-1..d-1>)/sqrt(d)` on `n` parties.
    Ghz { n: usize, d: usize },
    /// Equal superposition of the `n` single-excitation qubit strings.
    W { n: usize },
    /// `(|011> + w|110> + w^2|101>)/sqrt(3)`, `w = exp(2 pi i/3)`.
    V,
    /// Qubit Dicke state with `k` excitations.
    Dicke { n: usize, k: usize },
    /// Totally antisymmetric state of `n` parties of dimension `n`.
    Antisymmetric { n: usize },
    /// `(|0101> + |1010>)/sqrt(2)`.
    TransInv4,
}

fn basis_superposition(shape: Shape, terms: &[(Vec<usize>, Complex64)]) -> Result<PureState> {
    let mut data = vec![Complex64::new(0.0, 0.0); shape.total()];
    for (idx, amp) in terms {
        data[shape.flat_index(idx)] += amp;
    }
    PureState::new(shape, data)
}

fn bits(n: usize, value: usize) -> Vec<usize> {
    (0..n).map(|k| (value >> (n - 1 - k)) & 1).collect()
}

/// Sign of a permutation given as a slice.
fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl NamedState {
    pub fn build(&self) -> Result<PureState> {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            NamedState::Ghz { n, d } => {
                if n < 1 || d < 2 {
                    return Err(Error::Shape(format!("GHZ needs n >= 1, d >= 2 (got {n}, {d})")));
                }
                let terms: Vec<_> = (0..d).map(|i| (vec![i; n], one)).collect();
                basis_superposition(Shape::uniform(n, d)?, &terms)
            }
            NamedState::W { n } => NamedState::Dicke { n, k: 1 }.build(),
            NamedState::V => {
                let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
                let terms = [
                    (vec![0, 1, 1], one),
                    (vec![1, 1, 0], w),
                    (vec![1, 0, 1], w * w),
                ];
                basis_superposition(Shape::uniform(3, 2)?, &terms)
            }
            NamedState::Dicke { n, k } => {
                if n < 1 || k > n {
                    return Err(Error::Shape(format!("Dicke state needs k <= n (got n={n}, k={k})")));
                }
                let shape = Shape::uniform(n, 2)?;
                let terms: Vec<_> = (0..1usize << n)
                    .filter(|v| v.count_ones() as usize == k)
                    .map(|v| (bits(n, v), one))
                    .collect();
                basis_superposition(shape, &terms)
            }
            NamedState::Antisymmetric { n } => {
                if n < 2 {
                    return Err(Error::Shape(format!("antisymmetric state needs n >= 2 (got {n})")));
                }
                let shape = Shape::uniform(n, n)?;
                let terms: Vec<_> = permutations(n)
                    .into_iter()
                    .map(|p| {
                        let s = permutation_sign(&p);
                        (p, Complex64::new(s, 0.0))
                    })
                    .collect();
                basis_superposition(shape, &terms)
            }
            NamedState::TransInv4 => {
                let terms = [(vec![0, 1, 0, 1], one), (vec![1, 0, 1, 0], one)];
                basis_superposition(Shape::uniform(4, 2)?, &terms)
            }
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Ghz { n, d: 2 } => write!(f, "ghz{n}"),
            NamedState::Ghz { n, d } => write!(f, "ghz{n}-{d}"),
            NamedState::W { n } => write!(f, "w{n}"),
            NamedState::V => write!(f, "v"),
            NamedState::Dicke { n, k } => write!(f, "dicke{n}-{k}"),
            NamedState::Antisymmetric { n } => write!(f, "antisym{n}"),
            NamedState::TransInv4 => write!(f, "transinv4"),
        }
    }
}

impl FromStr for NamedState {
    type Err = Error;

    /// Registry names: `ghzN`, `ghzN-D`, `wN`, `v`, `dickeN-K`, `antisymN`,
    /// `transinv4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown state name '{s}'"));
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let pair = |t: &str| -> Result<(usize, usize)> {
            let (a, b) = t.split_once('-').ok_or_else(bad)?;
            Ok((num(a)?, num(b)?))
        };
        let s_lower = s.to_ascii_lowercase();
        let s = s_lower.as_str();
        if s == "v" {
            Ok(NamedState::V)
        } else if s == "transinv4" {
            Ok(NamedState::TransInv4)
        } else if let Some(rest) = s.strip_prefix("antisym") {
            Ok(NamedState::Antisymmetric { n: num(rest)? })
        } else if let Some(rest) = s.strip_prefix("dicke") {
            let (n, k) = pair(rest)?;
            Ok(NamedState::Dicke { n, k })
        } else if let Some(rest) = s.strip_prefix("ghz") {
            if rest.contains('-') {
                let (n, d) = pair(rest)?;
                Ok(NamedState::Ghz { n, d })
            } else {
                Ok(NamedState::Ghz { n: num(rest)?, d: 2 })
            }
        } else if let Some(rest) = s.strip_prefix('w') {
            Ok(NamedState::W { n: num(rest)? })
        } else {
            Err(bad())
        }
    }
}
