use matsuo_core::field::{Field, FieldElement};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIELDS: &[&str] = &["Q", "F7", "F13", "Q(sqrt:3)", "Fp:7(sqrt:3)", "Fp:13(sqrt:2)"];

fn triple(desc: &str, seed: u64) -> (Field, FieldElement, FieldElement, FieldElement) {
    let f = Field::parse(desc).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = f.random(&mut rng);
    let b = f.random(&mut rng);
    let c = f.random(&mut rng);
    (f, a, b, c)
}

proptest! {
    #[test]
    fn ring_axioms(idx in 0..FIELDS.len(), seed in any::<u64>()) {
        let (f, a, b, c) = triple(FIELDS[idx], seed);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &f.zero(), a.clone());
        prop_assert_eq!(&a * &f.one(), a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn inverses(idx in 0..FIELDS.len(), seed in any::<u64>()) {
        let (_, a, b, _) = triple(FIELDS[idx], seed);
        if a.is_zero() {
            prop_assert!(a.inv().is_err());
        } else {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
            prop_assert_eq!(&(&b / &a) * &a, b);
        }
    }

    #[test]
    fn norm_is_multiplicative(idx in 0..FIELDS.len(), seed in any::<u64>()) {
        let (_, a, b, _) = triple(FIELDS[idx], seed);
        prop_assert_eq!((&a * &b).norm(), &a.norm() * &b.norm());
        prop_assert_eq!(a.conjugate().conjugate(), a);
    }

    #[test]
    fn norm_is_product_with_conjugate(idx in 3..FIELDS.len(), seed in any::<u64>()) {
        let (f, a, _, _) = triple(FIELDS[idx], seed);
        let n = f.embed(&a.norm()).unwrap();
        prop_assert_eq!(&a * &a.conjugate(), n);
    }

    #[test]
    fn square_roots_square_back(idx in 0..FIELDS.len(), seed in any::<u64>()) {
        let (f, a, _, _) = triple(FIELDS[idx], seed);
        let sq = &a * &a;
        let r = f.sqrt(&sq).expect("a square has a root");
        prop_assert_eq!(&r * &r, sq);
    }

    #[test]
    fn display_parses_back(idx in 0..FIELDS.len(), seed in any::<u64>()) {
        let (f, a, _, _) = triple(FIELDS[idx], seed);
        prop_assert_eq!(f.parse_element(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn fermat(seed in any::<u64>()) {
        let (_, a, _, _) = triple("F13", seed);
        prop_assert_eq!(a.pow(13), a);
    }
}

#[test]
fn extension_of_square_is_rejected() {
    let err = Field::parse("Fp:13(sqrt:3)").unwrap_err();
    assert!(err.message.contains("square"), "{err}");
}

#[test]
fn half_is_two_inverse() {
    for desc in FIELDS {
        let f = Field::parse(desc).unwrap();
        let half = f.ratio(1, 2).unwrap();
        assert!((&half * &f.from_i64(2)).is_one(), "{desc}");
    }
    assert!(Field::prime(2).is_err());
}

#[test]
fn mixed_fields_are_errors() {
    let q = Field::rationals();
    let f7 = Field::prime(7).unwrap();
    assert!(q.one().checked_add(&f7.one()).is_err());
    assert!(q.one().checked_mul(&f7.one()).is_err());
}

#[test]
fn field_of_thirteen_elements() {
    let f = Field::prime(13).unwrap();
    let all = f.elements().unwrap();
    assert_eq!(all.len(), 13);
    let squares = all.iter().filter(|x| !x.is_zero() && f.sqrt(x).is_some()).count();
    assert_eq!(squares, 6);
    assert!(f.sqrt(&f.from_i64(3)).is_some());
    assert!(f.sqrt(&f.from_i64(-1)).is_some());
}
