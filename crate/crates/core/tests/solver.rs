use num_rational::BigRational;
use qgraded::catalog::{build_twisted_cotangent, PoissonData};
use qgraded::equivariance::gt_lift;
use qgraded::graded::Superfunction;
use qgraded::prolongation::{prolong, ProlongedChart};
use qgraded::scalar::{rat, Scalar};
use qgraded::sigma::{coefficient_basis, gt_family, q_basis_three_form, tpsm_ansatz, BlockAnsatz};
use qgraded::solver::{impose_closed, impose_horizontal, solve};
use qgraded::tensor::{Matrix, ThreeForm};

fn wz4() -> (PoissonData, ProlongedChart) {
    let p = PoissonData::wz4(-1);
    let pc = prolong(&build_twisted_cotangent(&p).unwrap()).unwrap();
    (p, pc)
}

fn blocks(b: &BlockAnsatz, c: &[BigRational], n: usize) -> (ThreeForm, Matrix, Matrix) {
    let mut a = ThreeForm::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                a.set(i, j, k, b.read(c, "A", &[i, j, k]));
            }
        }
    }
    let e = (0..n).map(|i| (0..n).map(|k| b.read(c, "E", &[i, k])).collect()).collect();
    let f = (0..n).map(|i| (0..n).map(|k| b.read(c, "F", &[i, k])).collect()).collect();
    (a, e, f)
}

/// `A + E^k_{i,j}Q̃xⁱQ̃xʲp_k + ½F^{jk}_{,i}Q̃xⁱp_jp_k + E^j_iQ̃xⁱQ̃p_j + F^{ij}Q̃p_ip_j`.
fn closed_display(pc: &ProlongedChart, a: &ThreeForm, e: &Matrix, f: &Matrix) -> Superfunction {
    let n = e.len();
    let qx: Vec<_> = (1..=n).map(|i| pc.qq(&format!("x{}", i))).collect();
    let qp: Vec<_> = (1..=n).map(|i| pc.qq(&format!("p{}", i))).collect();
    let p: Vec<_> = (1..=n).map(|i| Superfunction::named(&pc.q_chart, &format!("p{}", i)).unwrap()).collect();
    let mut out = q_basis_three_form(pc, a);
    for i in 0..n {
        for k in 0..n {
            out = out + (&qx[i] * &qp[k]).scale(&e[i][k]) + (&qp[i] * &p[k]).scale(&f[i][k]);
            for j in 0..n {
                out = out + (&qx[i] * &qx[j] * &p[k]).scale(&e[i][k].partial(j));
                out = out + (&qx[i] * &p[j] * &p[k]).scale(&f[j][k].partial(i).scale(&rat(1, 2)));
            }
        }
    }
    out
}

#[test]
fn closed_family_on_the_twisted_cotangent_matches_the_display() {
    let (_, pc) = wz4();
    let b = tpsm_ansatz(&pc, 4, coefficient_basis(4, 1, None), true).unwrap();
    let closed = impose_closed(&b.problem, &pc.qt_in_q_basis()).unwrap();
    let space = solve(&b.problem, &[closed]).unwrap();
    assert!(space.verified);
    assert!(space.dimension().unwrap() > 0);
    for v in &space.basis {
        let (a, e, f) = blocks(&b, v, 4);
        assert!(a.is_closed());
        for i in 0..4 {
            for j in 0..4 {
                assert!((&f[i][j] + &f[j][i]).is_zero());
            }
        }
        assert_eq!(b.problem.assemble(v, false), closed_display(&pc, &a, &e, &f));
    }
}

#[test]
fn alpha_generators_force_e_and_f_proportional() {
    let (p, pc) = wz4();
    let b = tpsm_ansatz(&pc, 4, coefficient_basis(4, 1, None), true).unwrap();
    let gens: Vec<_> = gt_family(4, 0, &[])
        .iter()
        .map(|g| pc.derivation_to_q_basis(&gt_lift(&pc, g).unwrap()).unwrap())
        .collect();
    let closed = impose_closed(&b.problem, &pc.qt_in_q_basis()).unwrap();
    let hor = impose_horizontal(&b.problem, &gens).unwrap();
    let space = solve(&b.problem, &[closed, hor]).unwrap();
    assert!(space.verified);
    assert!(!space.basis.is_empty());
    for v in &space.basis {
        let (_, e, f) = blocks(&b, v, 4);
        let a = e[0][0].clone();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { a.clone() } else { Scalar::zero() };
                assert_eq!(e[i][j], want);
                assert_eq!(f[i][j], &a * &p.pi[i][j]);
            }
        }
    }
}

#[test]
fn empty_generating_family_adds_no_constraints() {
    let (_, pc) = wz4();
    let b = tpsm_ansatz(&pc, 4, vec![Scalar::one()], false).unwrap();
    let hor = impose_horizontal(&b.problem, &[]).unwrap();
    assert!(hor.is_empty());
    let space = solve(&b.problem, &[hor]).unwrap();
    assert_eq!(space.dimension(), Some(b.problem.len()));
}

#[test]
fn pivots_follow_generator_order() {
    let (_, pc) = wz4();
    let b = tpsm_ansatz(&pc, 4, vec![Scalar::one()], false).unwrap();
    let closed = impose_closed(&b.problem, &pc.qt_in_q_basis()).unwrap();
    let space = solve(&b.problem, &[closed]).unwrap();
    assert!(space.pivots.windows(2).all(|w| w[0] < w[1]));
    // each basis vector is 1 on its own free column and 0 on the other free columns
    let free: Vec<usize> = (0..b.problem.len()).filter(|k| !space.pivots.contains(k)).collect();
    assert_eq!(free.len(), space.basis.len());
    for (v, &k) in space.basis.iter().zip(&free) {
        for &l in &free {
            assert_eq!(v[l], if l == k { rat(1, 1) } else { rat(0, 1) });
        }
    }
}
