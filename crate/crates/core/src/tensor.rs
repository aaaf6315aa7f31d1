//! Small dense tensors over [`Scalar`] used by the classical oracles.

use crate::scalar::{Scalar, ScalarError};

pub type Matrix = Vec<Vec<Scalar>>;

pub fn zeros(n: usize) -> Matrix {
    vec![vec![Scalar::zero(); n]; n]
}

pub fn is_antisymmetric(m: &Matrix) -> bool {
    let n = m.len();
    (0..n).all(|i| (0..n).all(|j| (&m[i][j] + &m[j][i]).is_zero()))
}

pub fn is_zero_matrix(m: &Matrix) -> bool {
    m.iter().all(|r| r.iter().all(Scalar::is_zero))
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut r = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    r[i][j] = &r[i][j] + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    r
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

/// Gauss-Jordan inverse over the rational function field.
pub fn invert(m: &Matrix) -> Result<Matrix, ScalarError> {
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv = zeros(n);
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(ScalarError::ZeroDivisor)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].inverse()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

/// Totally antisymmetric 3-index array, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeForm {
    n: usize,
    c: Vec<Scalar>,
}

impl ThreeForm {
    pub fn zero(n: usize) -> Self {
        ThreeForm {
            n,
            c: vec![Scalar::zero(); n * n * n],
        }
    }

    /// From independent components `H_{ijk}`, `i < j < k`, 0-based.
    pub fn from_components(n: usize, comps: &[((usize, usize, usize), Scalar)]) -> Self {
        let mut h = ThreeForm::zero(n);
        for ((i, j, k), v) in comps {
            h.set(*i, *j, *k, v.clone());
        }
        h
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Set `H_{ijk}` and all its permutations.
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Scalar) {
        let n = self.n;
        let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
        let neg = -&v;
        for (p, s) in [
            ((i, j, k), &v),
            ((j, k, i), &v),
            ((k, i, j), &v),
            ((j, i, k), &neg),
            ((i, k, j), &neg),
            ((k, j, i), &neg),
        ] {
            self.c[idx(p.0, p.1, p.2)] = s.clone();
        }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.c[(i * self.n + j) * self.n + k]
    }

    pub fn scale(&self, s: &Scalar) -> ThreeForm {
        ThreeForm {
            n: self.n,
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Scalar::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if !(v + self.get(j, i, k)).is_zero() || !(v + self.get(i, k, j)).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `(dH)_{ijkl}` for `i<j<k<l`; returns the first nonzero component.
    pub fn exterior_derivative_witness(&self) -> Option<((usize, usize, usize, usize), Scalar)> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let v = self.get(j, k, l).partial(i) - self.get(i, k, l).partial(j)
                            + self.get(i, j, l).partial(k)
                            - self.get(i, j, k).partial(l);
                        if !v.is_zero() {
                            return Some(((i, j, k, l), v));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_closed(&self) -> bool {
        self.exterior_derivative_witness().is_none()
    }
}

/// `(dω)_{ijk} = ∂_i ω_{jk} + ∂_j ω_{ki} + ∂_k ω_{ij}` for an antisymmetric matrix `ω`.
pub fn d_two_form(w: &Matrix) -> ThreeForm {
    let n = w.len();
    let mut h = ThreeForm::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = w[j][k].partial(i) + w[k][i].partial(j) + w[i][j].partial(k);
                h.set(i, j, k, v);
            }
        }
    }
    h
}
