use qgraded::courant::*;
use qgraded::sampling::Sampler;
use qgraded::scalar::Scalar;
use qgraded::tensor::ThreeForm;

fn std_h() -> ThreeForm {
    ThreeForm::from_components(3, &[((0, 1, 2), Scalar::one())])
}

fn exact_h() -> ThreeForm {
    // d(x¹ x⁴ dx²∧dx³) on ℝ⁴
    ThreeForm::from_components(
        4,
        &[((0, 1, 2), Scalar::var(3)), ((1, 2, 3), Scalar::var(0))],
    )
}

fn section(s: &mut Sampler) -> Section {
    Section::new(s.one_form(), s.one_form())
}

#[test]
fn closed_h_is_exactly_q_squared_zero() {
    for h in [ThreeForm::zero(3), std_h(), exact_h()] {
        assert!(h.is_closed());
        assert!(build_courant_phase(&h).unwrap().q_squared().unwrap().is_zero());
    }
    let bad = ThreeForm::from_components(4, &[((0, 1, 2), Scalar::var(3))]);
    assert!(!bad.is_closed());
    assert!(!build_courant_phase(&bad).unwrap().q_squared().unwrap().is_zero());
}

#[test]
fn dual_path_dorfman_and_pairing() {
    for (k, h) in [ThreeForm::zero(3), std_h(), exact_h()].into_iter().enumerate() {
        let ph = build_courant_phase(&h).unwrap();
        let mut s = Sampler::new(40 + k as u64, h.dim(), 2);
        for _ in 0..20 {
            let a = section(&mut s);
            let b = section(&mut s);
            assert_eq!(ph.dorfman_via_derived(&a, &b).unwrap(), dorfman_classical(&h, &a, &b, 1));
            assert_eq!(ph.pairing_via_bracket(&a, &b).unwrap(), pairing(&a, &b));
        }
    }
}

#[test]
fn axioms_hold_for_closed_h() {
    for h in [std_h(), exact_h()] {
        let br = |a: &Section, b: &Section| dorfman_classical(&h, a, b, 1);
        let mut s = Sampler::new(7, h.dim(), 2);
        for _ in 0..10 {
            let (a, b, c) = (section(&mut s), section(&mut s), section(&mut s));
            assert_eq!(axioms_check(&br, &a, &b, &c), None);
            assert!(polarized_pairing_defect(&br, &a, &b, &c).is_zero());
        }
    }
}

#[test]
fn non_closed_h_breaks_leibniz() {
    let h = ThreeForm::from_components(4, &[((0, 1, 2), Scalar::var(3))]);
    let br = |a: &Section, b: &Section| dorfman_classical(&h, a, b, 1);
    let mut s = Sampler::new(3, 4, 1);
    let failed = (0..10).any(|_| {
        let (a, b, c) = (section(&mut s), section(&mut s), section(&mut s));
        axioms_check(&br, &a, &b, &c) == Some(AxiomFailure::Leibniz)
    });
    assert!(failed);
}

#[test]
fn dropping_the_h_term_is_detected_by_the_dual_path() {
    let h = std_h();
    let ph = build_courant_phase(&h).unwrap();
    let mut s = Sampler::new(11, 3, 1);
    let detected = (0..10).any(|_| {
        let (a, b) = (section(&mut s), section(&mut s));
        ph.dorfman_via_derived(&a, &b).unwrap() != dorfman_classical(&h, &a, &b, 0)
    });
    assert!(detected);
}

#[test]
fn left_derived_bracket_is_the_opposite_dorfman() {
    let h = exact_h();
    let ph = build_courant_phase(&h).unwrap();
    let mut s = Sampler::new(19, 4, 2);
    for _ in 0..5 {
        let (a, b) = (section(&mut s), section(&mut s));
        let raw = ph.derived_section_bracket(&a, &b).unwrap();
        assert_eq!(raw, Section::zero(4).sub(&dorfman_classical(&h, &b, &a, 1)));
    }
}
