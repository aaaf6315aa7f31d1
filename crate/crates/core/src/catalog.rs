//! Q-manifolds of the standard examples, with independent classical checks.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::graded::{Chart, Derivation, GradedCoordinate, GradedError, QCheck, Superfunction};
use crate::scalar::Scalar;
use crate::tensor::{self, Matrix, ThreeForm};

/// A chart with its homological vector field and the outcome of the
/// `[Q, Q] = 0` check.
#[derive(Clone, Debug)]
pub struct QManifold {
    pub chart: Arc<Chart>,
    pub q: Derivation,
    pub check: QCheck,
}

impl QManifold {
    pub fn new(q: Derivation) -> Result<Self, GradedError> {
        let check = q.is_q_structure()?;
        Ok(QManifold {
            chart: q.chart().clone(),
            q,
            check,
        })
    }

    pub fn is_valid(&self) -> bool {
        self.check.holds
    }

    pub fn coord(&self, name: &str) -> Superfunction {
        Superfunction::named(&self.chart, name).expect("coordinate of a catalog chart")
    }
}

fn indexed(prefix: &str, n: usize, degree: u32) -> impl Iterator<Item = GradedCoordinate> + '_ {
    (1..=n).map(move |i| GradedCoordinate::new(format!("{}{}", prefix, i), degree))
}

/// `T[1]R^n` with `Q = θ^i ∂/∂x^i`.
pub fn build_t1m(n: usize) -> Result<QManifold, GradedError> {
    let chart = Chart::new(indexed("x", n, 0).chain(indexed("th", n, 1)).collect())?;
    let q = Derivation::new(&chart, 1, (0..n).map(|i| (i, Superfunction::coordinate(&chart, n + i))))?;
    QManifold::new(q)
}

/// Structure constants `C^a_{bc}` and an optional action `ρ_a = ρ_a^i ∂_i`
/// on `R^n`.
#[derive(Clone, Debug)]
pub struct LieData {
    pub dim: usize,
    c: Vec<BigRational>,
    pub action: Option<(usize, Vec<Vec<Scalar>>)>,
}

impl LieData {
    pub fn new(dim: usize) -> Self {
        LieData {
            dim,
            c: vec![BigRational::zero(); dim * dim * dim],
            action: None,
        }
    }

    /// Set `C^a_{bc} = v` and `C^a_{cb} = -v`.
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: BigRational) {
        let d = self.dim;
        if b == c {
            return;
        }
        self.c[(a * d + c) * d + b] = -v.clone();
        self.c[(a * d + b) * d + c] = v;
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &BigRational {
        &self.c[(a * self.dim + b) * self.dim + c]
    }

    pub fn with_action(mut self, n: usize, rho: Vec<Vec<Scalar>>) -> Self {
        self.action = Some((n, rho));
        self
    }

    pub fn is_antisymmetric(&self) -> bool {
        let d = self.dim;
        (0..d).all(|a| (0..d).all(|b| (0..d).all(|c| (self.get(a, b, c) + self.get(a, c, b)).is_zero())))
    }

    /// `C^a_{bc} = s·ε_{abc}`.
    pub fn so3(s: BigRational) -> Self {
        let mut l = LieData::new(3);
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            l.set(a, b, c, s.clone());
        }
        l
    }

    /// Classical Jacobi identity `C^a_{bm} C^m_{cd} + cyclic(bcd) = 0`;
    /// returns a violated index triple.
    pub fn jacobi_witness(&self) -> Option<(usize, usize, usize, usize)> {
        let d = self.dim;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        let mut s = BigRational::zero();
                        for m in 0..d {
                            s += self.get(a, b, m) * self.get(m, c, e)
                                + self.get(a, c, m) * self.get(m, e, b)
                                + self.get(a, e, m) * self.get(m, b, c);
                        }
                        if !s.is_zero() {
                            return Some((a, b, c, e));
                        }
                    }
                }
            }
        }
        None
    }

    /// Classical action property `[ρ_b, ρ_c] = 2 C^a_{bc} ρ_a` (the factor
    /// comes from the unnormalized quadratic term of `Q`).
    pub fn action_witness(&self) -> Option<(usize, usize, usize)> {
        let (n, rho) = self.action.as_ref()?;
        let d = self.dim;
        for b in 0..d {
            for c in 0..d {
                for i in 0..*n {
                    let mut s = Scalar::zero();
                    for j in 0..*n {
                        s = s + &rho[b][j] * &rho[c][i].partial(j) - &rho[c][j] * &rho[b][i].partial(j);
                    }
                    for a in 0..d {
                        let k = self.get(a, b, c) * BigRational::from_integer(2.into());
                        s = s - rho[a][i].scale(&k);
                    }
                    if !s.is_zero() {
                        return Some((b, c, i));
                    }
                }
            }
        }
        None
    }
}

/// `ρ_a = ε_{aij} x^i ∂_j` on `R^3`.
pub fn so3_rotations() -> Vec<Vec<Scalar>> {
    let mut rho = vec![vec![Scalar::zero(); 3]; 3];
    for (a, i, j) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        rho[a][j] = &rho[a][j] + &Scalar::var(i);
        rho[a][i] = &rho[a][i] - &Scalar::var(j);
    }
    rho
}

/// `g[1]` with `Q_CE(ξ^a) = C^a_{bc} ξ^b ξ^c` (no ½).
pub fn build_g1(l: &LieData) -> Result<QManifold, GradedError> {
    let chart = Chart::new(indexed("xi", l.dim, 1).collect())?;
    let xi: Vec<_> = (0..l.dim).map(|a| Superfunction::coordinate(&chart, a)).collect();
    let mut comps = Vec::new();
    for a in 0..l.dim {
        let mut f = Superfunction::zero(&chart);
        for b in 0..l.dim {
            for c in 0..l.dim {
                let k = l.get(a, b, c);
                if !k.is_zero() {
                    f = f + (&xi[b] * &xi[c]).scale_rational(k);
                }
            }
        }
        comps.push((a, f));
    }
    QManifold::new(Derivation::new(&chart, 1, comps)?)
}

/// `E[1] = R^n × g[1]` with `Q = ξ^a ρ_a^i ∂_i − C^a_{bc} ξ^b ξ^c ∂/∂ξ^a`.
pub fn build_action_algebroid(l: &LieData) -> Result<QManifold, GradedError> {
    let (n, rho) = l
        .action
        .clone()
        .unwrap_or_else(|| (0, vec![Vec::new(); l.dim]));
    let chart = Chart::new(indexed("x", n, 0).chain(indexed("xi", l.dim, 1)).collect())?;
    let xi: Vec<_> = (0..l.dim).map(|a| Superfunction::coordinate(&chart, n + a)).collect();
    let mut comps = Vec::new();
    for i in 0..n {
        let mut f = Superfunction::zero(&chart);
        for a in 0..l.dim {
            f = f + xi[a].scale(&rho[a][i]);
        }
        comps.push((i, f));
    }
    for a in 0..l.dim {
        let mut f = Superfunction::zero(&chart);
        for b in 0..l.dim {
            for c in 0..l.dim {
                let k = l.get(a, b, c);
                if !k.is_zero() {
                    f = f - (&xi[b] * &xi[c]).scale_rational(k);
                }
            }
        }
        comps.push((n + a, f));
    }
    QManifold::new(Derivation::new(&chart, 1, comps)?)
}

/// Bivector `π^{ij}` and 3-form `H_{ijk}` on `R^n`.
#[derive(Clone, Debug)]
pub struct PoissonData {
    pub n: usize,
    pub pi: Matrix,
    pub h: ThreeForm,
}

impl PoissonData {
    pub fn new(pi: Matrix, h: ThreeForm) -> Result<Self, GradedError> {
        let n = pi.len();
        if pi.iter().any(|r| r.len() != n) || h.dim() != n {
            return Err(GradedError::DegreeMismatch("tensor dimensions disagree".into()));
        }
        if !tensor::is_antisymmetric(&pi) {
            return Err(GradedError::DegreeMismatch("π is not antisymmetric".into()));
        }
        if !h.is_antisymmetric() {
            return Err(GradedError::DegreeMismatch("H is not totally antisymmetric".into()));
        }
        Ok(PoissonData { n, pi, h })
    }

    pub fn untwisted(pi: Matrix) -> Result<Self, GradedError> {
        let n = pi.len();
        PoissonData::new(pi, ThreeForm::zero(n))
    }

    /// `C_i^{jk} = ∂_i π^{jk} + H_{ij'k'} π^{jj'} π^{kk'}`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> Scalar {
        let mut s = self.pi[j][k].partial(i);
        for a in 0..self.n {
            if self.pi[j][a].is_zero() {
                continue;
            }
            for b in 0..self.n {
                let h = self.h.get(i, a, b);
                if !h.is_zero() && !self.pi[k][b].is_zero() {
                    s = s + h * &self.pi[j][a] * &self.pi[k][b];
                }
            }
        }
        s
    }

    /// Classical twisted Jacobi identity
    /// `π^{il}∂_l π^{jk} + cyclic = H_{lmn} π^{li} π^{mj} π^{nk}`;
    /// returns a violated index triple.
    pub fn twisted_jacobi_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut lhs = Scalar::zero();
                    for l in 0..n {
                        lhs = lhs
                            + &self.pi[i][l] * &self.pi[j][k].partial(l)
                            + &self.pi[j][l] * &self.pi[k][i].partial(l)
                            + &self.pi[k][l] * &self.pi[i][j].partial(l);
                    }
                    let mut rhs = Scalar::zero();
                    for l in 0..n {
                        for m in 0..n {
                            for o in 0..n {
                                let h = self.h.get(l, m, o);
                                if h.is_zero() {
                                    continue;
                                }
                                rhs = rhs + h * &self.pi[l][i] * &self.pi[m][j] * &self.pi[o][k];
                            }
                        }
                    }
                    if !(lhs - rhs).is_zero() {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// `π^{ij} = s·ε_{ijk} x^k` on `R^3`.
    pub fn so3_lie_poisson() -> Self {
        let mut pi = tensor::zeros(3);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            pi[i][j] = Scalar::var(k);
            pi[j][i] = -Scalar::var(k);
        }
        PoissonData::untwisted(pi).expect("antisymmetric")
    }

    /// Constant symplectic structure on `R^2`.
    pub fn symplectic_plane() -> Self {
        let mut pi = tensor::zeros(2);
        pi[0][1] = Scalar::one();
        pi[1][0] = Scalar::from_int(-1);
        PoissonData::untwisted(pi).expect("antisymmetric")
    }

    /// `ω = dx¹∧dx² + (1+x¹) dx³∧dx⁴`, `π = ω⁻¹`, `H = sign·dω` on `x¹ > −1`.
    pub fn wz4(sign: i64) -> Self {
        let w = wz4_omega();
        let pi = tensor::invert(&w).expect("ω is nondegenerate");
        let h = tensor::d_two_form(&w).scale(&Scalar::from_int(sign));
        PoissonData::new(pi, h).expect("antisymmetric")
    }
}

pub fn wz4_omega() -> Matrix {
    let mut w = tensor::zeros(4);
    let f = Scalar::one() + Scalar::var(0);
    w[0][1] = Scalar::one();
    w[1][0] = Scalar::from_int(-1);
    w[2][3] = f.clone();
    w[3][2] = -f;
    w
}

/// `T*[1]R^n` with `Q(x^i) = π^{ji} p_j`, `Q(p_i) = −½ C_i^{jk} p_j p_k`.
pub fn build_twisted_cotangent(p: &PoissonData) -> Result<QManifold, GradedError> {
    let n = p.n;
    let chart = Chart::new(indexed("x", n, 0).chain(indexed("p", n, 1)).collect())?;
    let pv: Vec<_> = (0..n).map(|i| Superfunction::coordinate(&chart, n + i)).collect();
    let mut comps = Vec::new();
    for i in 0..n {
        let mut f = Superfunction::zero(&chart);
        for j in 0..n {
            f = f + pv[j].scale(&p.pi[j][i]);
        }
        comps.push((i, f));
    }
    let half = Scalar::ratio(-1, 2);
    for i in 0..n {
        let mut f = Superfunction::zero(&chart);
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let c = p.c(i, j, k);
                if !c.is_zero() {
                    f = f + (&pv[j] * &pv[k]).scale(&(c * &half));
                }
            }
        }
        comps.push((n + i, f));
    }
    QManifold::new(Derivation::new(&chart, 1, comps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn de_rham_is_homological() {
        for n in 1..=5 {
            assert!(build_t1m(n).unwrap().is_valid());
        }
    }

    #[test]
    fn so3_ce() {
        let l = LieData::so3(rat(1, 1));
        assert!(l.jacobi_witness().is_none());
        assert!(build_g1(&l).unwrap().is_valid());
    }

    #[test]
    fn lie_poisson_so3() {
        let p = PoissonData::so3_lie_poisson();
        assert!(p.twisted_jacobi_witness().is_none());
        assert!(build_twisted_cotangent(&p).unwrap().is_valid());
    }

    #[test]
    fn wz4_sign_is_fixed_by_q_squared() {
        let plus = build_twisted_cotangent(&PoissonData::wz4(1)).unwrap();
        let minus = build_twisted_cotangent(&PoissonData::wz4(-1)).unwrap();
        assert_ne!(plus.is_valid(), minus.is_valid());
        for s in [1, -1] {
            let p = PoissonData::wz4(s);
            let q = build_twisted_cotangent(&p).unwrap();
            assert_eq!(p.twisted_jacobi_witness().is_none(), q.is_valid(), "sign {}", s);
        }
    }

    #[test]
    fn rotations_act() {
        let l = LieData::so3(rat(-1, 2)).with_action(3, so3_rotations());
        assert!(l.action_witness().is_none());
        assert!(build_action_algebroid(&l).unwrap().is_valid());
    }
}
