mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bgg::complexes::{EComplex, ExtMatrix, FreeEModule};
use bgg::exterior::{masks_of_degree, ExtElement};
use bgg::scalar::{Field, PrimeField, Rationals};
use bgg::symmetric::{graded_piece, mult_map};
use bgg::tate::{cohomology_table, dual_tate, tate_from_presentation, TateWindow};

fn random_element(f: &PrimeField, rng: &mut ChaCha8Rng, v: usize, degree: usize) -> ExtElement<u32> {
    let masks = masks_of_degree(v + 1, degree);
    let mut terms = Vec::new();
    for m in masks {
        if rng.gen_bool(0.6) {
            terms.push((m, f.from_i64(rng.gen_range(-4..=4))));
        }
    }
    ExtElement::from_terms(f, degree, terms).unwrap()
}

/// A homogeneous matrix with random twists; scalar entries appear where degrees allow.
fn random_matrix(f: &PrimeField, seed: u64) -> ExtMatrix<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.gen_range(1..=3usize);
    let src: Vec<i64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(-2..=0)).collect();
    let tgt: Vec<i64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(-2..=0)).collect();
    let source = FreeEModule::cofree(v, &src);
    let target = FreeEModule::cofree(v, &tgt);
    let mut m = ExtMatrix::zero(source, target);
    for i in 0..m.target.rank() {
        for j in 0..m.source.rank() {
            let d = m.expected_degree(i, j);
            if (0..=v as i64 + 1).contains(&d) {
                let e = random_element(f, &mut rng, v, d as usize);
                m.set(i, j, e).unwrap();
            }
        }
    }
    m
}

fn window(f: &PrimeField, seed: u64) -> TateWindow<u32> {
    tate_from_presentation(f, &common::random_presentation(f, seed), None, -2, 3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prime_field_axioms(a in any::<i64>(), b in any::<i64>(), c in any::<i64>(), p in prop::sample::select(vec![3u32, 7, 101, 32003])) {
        let f = PrimeField::new(p).unwrap();
        let (a, b, c) = (f.from_i64(a), f.from_i64(b), f.from_i64(c));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
        if !f.is_zero(&a) {
            prop_assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
        } else {
            prop_assert!(f.inv(&a).is_err());
        }
    }

    #[test]
    fn rational_field_axioms(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000) {
        let f = Rationals;
        let x = f.div(&f.from_i64(a), &f.from_i64(b)).unwrap();
        let y = f.from_i64(c);
        prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
        prop_assert_eq!(x.clone(), BigRational::new(BigInt::from(a), BigInt::from(b)));
        prop_assert_eq!(f.from_json(&f.to_json(&x)).unwrap(), x);
    }

    #[test]
    fn wedge_is_associative_and_graded_commutative(seed in any::<u64>()) {
        let f = PrimeField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = rng.gen_range(1..=4usize);
        let el = |rng: &mut ChaCha8Rng| {
            let d = rng.gen_range(0..=v + 1);
            random_element(&f, rng, v, d)
        };
        let (a, b, c) = (el(&mut rng), el(&mut rng), el(&mut rng));
        prop_assert_eq!(a.wedge(&f, &b).wedge(&f, &c), a.wedge(&f, &b.wedge(&f, &c)));
        let sign = f.from_sign(a.degree * b.degree % 2 == 1);
        prop_assert_eq!(a.wedge(&f, &b), b.wedge(&f, &a).scale(&f, &sign));
        prop_assert_eq!(a.wedge(&f, &b).reversed(&f), b.reversed(&f).wedge(&f, &a.reversed(&f)));
    }

    #[test]
    fn multiplication_maps_commute(seed in any::<u64>(), d in 0i64..3) {
        let f = PrimeField::default();
        let pres = common::random_presentation(&f, seed);
        let (p0, p1, p2) = (graded_piece(&f, &pres, d), graded_piece(&f, &pres, d + 1), graded_piece(&f, &pres, d + 2));
        let first = mult_map(&f, &pres, &p0, &p1);
        let second = mult_map(&f, &pres, &p1, &p2);
        for a in 0..pres.nvars() {
            for b in 0..pres.nvars() {
                prop_assert_eq!(second[a].mul(&f, &first[b]), second[b].mul(&f, &first[a]));
            }
        }
    }

    #[test]
    fn prune_preserves_homology(seed in any::<u64>()) {
        let f = PrimeField::default();
        let m = random_matrix(&f, seed);
        let c = EComplex::new(m.v(), 0, vec![m.source.clone(), m.target.clone()], vec![m]).unwrap();
        let p = c.prune(&f);
        prop_assert!(p.is_minimal());
        for n in -6..=4 {
            prop_assert_eq!(c.euler_characteristic(n), p.euler_characteristic(n));
        }
        for pos in 0..=1 {
            prop_assert_eq!(c.homology_at(&f, pos), p.homology_at(&f, pos));
        }
    }

    #[test]
    fn matrix_dual_is_an_involution(seed in any::<u64>()) {
        let f = PrimeField::default();
        let m = random_matrix(&f, seed);
        prop_assert_eq!(m.dual(&f).dual(&f), m.clone());
        let doc = m.to_json(&f);
        prop_assert_eq!(ExtMatrix::from_json(&f, m.v(), &doc).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dual_window_reflects_the_table(seed in any::<u64>()) {
        let f = PrimeField::default();
        let t = window(&f, seed);
        let d = dual_tate(&f, &t);
        prop_assert!(d.verify(&f).is_ok());
        prop_assert_eq!(cohomology_table(&d), cohomology_table(&t).reflect());
        prop_assert_eq!(dual_tate(&f, &d).complex, t.complex);
    }

    #[test]
    fn window_json_round_trips(seed in any::<u64>()) {
        let f = PrimeField::default();
        let t = window(&f, seed);
        prop_assert_eq!(TateWindow::from_json(&f, &t.to_json(&f)).unwrap(), t.clone());
        let tab = cohomology_table(&t);
        let text = serde_json::to_string(&tab).unwrap();
        prop_assert_eq!(serde_json::from_str::<bgg::tate::CohomologyTable>(&text).unwrap(), tab);
    }
}
