use num_bigint::BigInt;
use num_rational::BigRational;

use bgg::geometry::{fiber_rank, local_pd, point, project};
use bgg::scalar::{Field, PrimeField, Rationals};
use bgg::symmetric::{SPolynomial, SPresentation};
use bgg::tate::{cohomology_table, regularity, tate_from_presentation};
use bgg::transforms::{beilinson_shape, hilbert_from_kernel, rigid_complex, walter_shape, HilbertPolynomial, SComplexShape};
use bgg::zoo;
use bgg::BggError;

#[test]
fn rationals_agree_with_the_prime_field() {
    let p = PrimeField::default();
    let q = Rationals;
    for (v, k) in [(2, 1)] {
        let tp = tate_from_presentation(&p, &zoo::twisted_differentials(&p, v, k).unwrap(), None, -3, 3).unwrap();
        let tq = tate_from_presentation(&q, &zoo::twisted_differentials(&q, v, k).unwrap(), None, -3, 3).unwrap();
        assert_eq!(cohomology_table(&tp), cohomology_table(&tq));
        let lam = zoo::Partition::column(v, k);
        for c in cohomology_table(&tq).cells.iter().filter(|c| c.value.is_some()) {
            assert_eq!(BigInt::from(c.value.unwrap()), zoo::schur_cell(v, &lam, c.i, c.n).unwrap());
        }
    }
}

#[test]
fn line_bundle_on_the_plane_matches_bott() {
    let f = PrimeField::default();
    let t = tate_from_presentation(&f, &zoo::line_bundle(2, 0), None, -4, 3).unwrap();
    let tab = cohomology_table(&t);
    assert_eq!(tab.get(0, 2), Some(6));
    assert_eq!(tab.get(2, -3), Some(1));
    assert_eq!(tab.get(2, -5), Some(6));
    assert_eq!(tab.get(1, 0), Some(0));
    let h = hilbert_from_kernel(&f, &t, 0).unwrap();
    assert_eq!(h.integer_coefficients(), Some(vec![1, 0, 0]));
    let reg = regularity(&tab).unwrap();
    assert_eq!((reg.value, reg.sharp), (0, true));
}

#[test]
fn point_module_has_constant_h0() {
    let f = PrimeField::default();
    let t = tate_from_presentation(&f, &zoo::point_module(&f, 2), None, -3, 3).unwrap();
    for c in cohomology_table(&t).cells.iter().filter(|c| c.value.is_some()) {
        assert_eq!(c.value, Some(if c.i == 0 { 1 } else { 0 }));
    }
    assert_eq!(hilbert_from_kernel(&f, &t, 0).unwrap().to_string(), "χ(n) = 1");
    let here = point(&f, vec![f.one(), f.zero(), f.zero()]).unwrap();
    let there = point(&f, vec![f.zero(), f.one(), f.from_i64(5)]).unwrap();
    assert_eq!(fiber_rank(&f, &t, &here, 0).unwrap(), 1);
    assert_eq!(fiber_rank(&f, &t, &there, 0).unwrap(), 0);
    assert_eq!(local_pd(&f, &t, &here, 0).unwrap(), Some(2));
}

#[test]
fn beilinson_shape_of_o_is_a_single_term() {
    let f = PrimeField::default();
    let t = tate_from_presentation(&f, &zoo::line_bundle(2, 0), None, -3, 4).unwrap();
    let s = beilinson_shape(&f, &t, 0).unwrap();
    assert_eq!(s.entries.len(), 1);
    assert_eq!((s.entries[0].position, s.entries[0].twist, s.entries[0].rank), (0, 0, 1));
    let text = serde_json::to_string(&s).unwrap();
    assert_eq!(serde_json::from_str::<SComplexShape>(&text).unwrap(), s);
}

#[test]
fn beilinson_shape_of_omega_one() {
    let f = PrimeField::default();
    let t = tate_from_presentation(&f, &zoo::twisted_differentials(&f, 2, 1).unwrap(), None, -3, 4).unwrap();
    let h = hilbert_from_kernel(&f, &t, 0).unwrap();
    for r in [-1, 0, 1] {
        let s = beilinson_shape(&f, &t, r).unwrap();
        for n in -4..4 {
            assert_eq!(s.euler_characteristic(n), h.eval(n), "r = {r}, n = {n}");
        }
    }
}

#[test]
fn rigid_complex_squares_to_zero_and_has_the_right_euler_characteristic() {
    let f = PrimeField::default();
    let t = tate_from_presentation(&f, &zoo::twisted_cubic(&f), None, -3, 4).unwrap();
    let h = hilbert_from_kernel(&f, &t, 0).unwrap();
    let r = rigid_complex(&f, &t, 0).unwrap();
    assert!(r.check_dd(&f));
    assert_eq!(r.euler_characteristic(), h);
    assert_eq!(h.integer_coefficients(), Some(vec![0, 0, 3, -2]));
}

#[test]
fn walter_shape_of_the_cubic_has_two_syzygy_columns() {
    let f = PrimeField::default();
    let t = tate_from_presentation(&f, &zoo::twisted_cubic(&f), None, -3, 4).unwrap();
    let s = walter_shape(&f, &t, 0, 2, None).unwrap();
    assert_eq!(s.get(0, 0), 1);
    assert_eq!(s.get(-1, 2), 3);
    assert_eq!(s.get(-2, 3), 2);
    assert!(s.betti_layout().contains('3'));
}

#[test]
fn hilbert_polynomial_json_round_trips() {
    let h = HilbertPolynomial::from_values(2, &[1, 3, 6].map(|x| BigRational::from_integer(x.into())));
    let text = serde_json::to_string(&h).unwrap();
    assert_eq!(serde_json::from_str::<HilbertPolynomial>(&text).unwrap(), h);
}

#[test]
fn presentation_json_round_trips() {
    let f = PrimeField::default();
    for pres in [zoo::twisted_cubic(&f), zoo::two_points(&f), zoo::twisted_differentials(&f, 3, 1).unwrap()] {
        let doc = pres.to_json(&f);
        assert_eq!(SPresentation::from_json(&f, &doc).unwrap(), pres);
    }
}

#[test]
fn explicit_small_start_is_rejected() {
    let f = PrimeField::default();
    let x0 = SPolynomial::var(&f, 2, 0);
    let mut rel = x0.clone();
    for _ in 0..4 {
        rel = rel.mul(&f, &x0);
    }
    let pres = SPresentation::new(1, vec![0], vec![5], vec![vec![rel]]).unwrap();
    assert!(matches!(tate_from_presentation(&f, &pres, Some(0), -2, 2), Err(BggError::StartTooSmall(_))));
    let t = tate_from_presentation(&f, &pres, None, -2, 2).unwrap();
    for c in cohomology_table(&t).cells.iter().filter(|c| c.value.is_some()) {
        assert_eq!(c.value, Some(if c.i == 0 { 5 } else { 0 }));
    }
}

#[test]
fn errors_are_classified() {
    let f = PrimeField::default();
    assert!(matches!(zoo::twisted_differentials(&f, 2, 3), Err(BggError::InvalidInput(_))));
    assert!(matches!(tate_from_presentation(&f, &zoo::line_bundle(2, 0), None, 3, 1), Err(BggError::InvalidInput(_))));
    let t = tate_from_presentation(&f, &zoo::line_bundle(2, 0), None, -2, 1).unwrap();
    assert!(matches!(beilinson_shape(&f, &t, 0), Err(BggError::WindowInsufficient(_))));
    let wide = tate_from_presentation(&f, &zoo::line_bundle(2, 0), None, -3, 4).unwrap();
    assert!(matches!(walter_shape(&f, &wide, 1, 1, None), Err(BggError::Precondition(_))));
    let center = point(&f, vec![f.zero(), f.zero(), f.one()]).unwrap();
    let e = project(&f, &wide, &center).unwrap_err();
    assert!(matches!(e, BggError::SupportMeetsCenter(_)));
    assert!(e.is_mathematical());
    assert!(!BggError::InvalidInput(String::new()).is_mathematical());
}
