use std::sync::OnceLock;

use matsuo_core::algebra::LinearEndo;
use matsuo_core::deriv::{self, DerBasis};
use matsuo_core::field::{Field, FieldElement};
use matsuo_core::matsuo::MatsuoError;
use matsuo_core::{MatsuoAlgebra, TranspoGroup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DESCRIPTORS: &[&str] = &["S4", "S5", "W:A3", "3W:A3", "M3:2"];

struct Instance {
    m: MatsuoAlgebra,
    der: DerBasis,
}

fn instances() -> &'static Vec<Instance> {
    static CELL: OnceLock<Vec<Instance>> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = Field::prime(13).unwrap();
        DESCRIPTORS
            .iter()
            .map(|d| {
                let m = MatsuoAlgebra::half(TranspoGroup::parse(d).unwrap(), &f).unwrap();
                let der = deriv::derivations(m.algebra());
                Instance { m, der }
            })
            .collect()
    })
}

fn random_vec(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    (0..n).map(|_| f.random(rng)).collect()
}

fn add(x: &[FieldElement], y: &[FieldElement]) -> Vec<FieldElement> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn scale(s: &FieldElement, x: &[FieldElement]) -> Vec<FieldElement> {
    x.iter().map(|a| s * a).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative_and_bilinear(idx in 0..DESCRIPTORS.len(), seed in any::<u64>()) {
        let inst = &instances()[idx];
        let alg = inst.m.algebra();
        let f = inst.m.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (
            random_vec(f, alg.dim(), &mut rng),
            random_vec(f, alg.dim(), &mut rng),
            random_vec(f, alg.dim(), &mut rng),
        );
        let s = f.random(&mut rng);
        prop_assert_eq!(alg.mul_coords(&x, &y), alg.mul_coords(&y, &x));
        let lhs = alg.mul_coords(&add(&x, &scale(&s, &y)), &z);
        let rhs = add(&alg.mul_coords(&x, &z), &scale(&s, &alg.mul_coords(&y, &z)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivations_satisfy_leibniz_on_random_elements(idx in 0..DESCRIPTORS.len(), seed in any::<u64>()) {
        let inst = &instances()[idx];
        let alg = inst.m.algebra();
        let f = inst.m.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = inst.der.combine(&random_vec(f, inst.der.dim(), &mut rng));
        let x = random_vec(f, alg.dim(), &mut rng);
        let y = random_vec(f, alg.dim(), &mut rng);
        let lhs = d.apply(&alg.mul_coords(&x, &y));
        let rhs = add(&alg.mul_coords(&d.apply(&x), &y), &alg.mul_coords(&x, &d.apply(&y)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivations_are_closed_under_bracket(idx in 0..DESCRIPTORS.len(), seed in any::<u64>()) {
        let inst = &instances()[idx];
        let f = inst.m.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = inst.der.combine(&random_vec(f, inst.der.dim(), &mut rng));
        let e = inst.der.combine(&random_vec(f, inst.der.dim(), &mut rng));
        let br = deriv::commutator(&d, &e);
        prop_assert!(deriv::leibniz_residual(inst.m.algebra(), &br).unwrap().is_zero());
        prop_assert_eq!(br.add(&deriv::commutator(&e, &d)), LinearEndo::zero(f, inst.m.dim(), inst.m.dim()));
    }

    #[test]
    fn generic_maps_are_not_derivations(idx in 0..DESCRIPTORS.len(), seed in any::<u64>()) {
        let inst = &instances()[idx];
        let f = inst.m.field();
        let n = inst.m.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = random_vec(f, n * n, &mut rng);
        data[0] = &data[0] + &f.one();
        let d = LinearEndo::from_unknowns(f, n, data);
        let by_leibniz = deriv::leibniz_residual(inst.m.algebra(), &d).unwrap().is_zero();
        let r_sys = deriv::build_r_system(&inst.m).unwrap();
        prop_assert!(!by_leibniz);
        prop_assert_eq!(by_leibniz, r_sys.is_satisfied_by(d.to_unknowns()));
    }
}

#[test]
fn symmetric_group_dimensions_follow_orthogonal_formula() {
    let f = Field::rationals();
    for n in 3..=6usize {
        let m = MatsuoAlgebra::half(TranspoGroup::symmetric(n).unwrap(), &f).unwrap();
        let dim = deriv::derivations(m.algebra()).dim();
        assert_eq!(dim, (n - 1) * (n - 2) / 2, "S{n}");
    }
}

#[test]
fn basis_elements_are_axes() {
    let f = Field::rationals();
    let m = MatsuoAlgebra::half(TranspoGroup::parse("3W:A2").unwrap(), &f).unwrap();
    assert!(m.algebra().basis_idempotent());
    for a in 0..m.dim() {
        let e = m.eigendecompose(a).unwrap();
        assert_eq!(e.dims().0, 1);
        assert!(m.check_fusion(a).unwrap().passed());
    }
}

#[test]
fn perturbation_breaks_fusion() {
    let f = Field::rationals();
    let m = MatsuoAlgebra::half(TranspoGroup::parse("S4").unwrap(), &f).unwrap();
    let bad = m.perturbed(0, 1, 2, &f.ratio(1, 7).unwrap());
    let broken = (0..bad.dim()).any(|a| match bad.check_fusion(a) {
        Ok(r) => !r.passed(),
        Err(MatsuoError::NotSemisimple { .. }) => true,
        Err(e) => panic!("{e}"),
    });
    assert!(broken);
}

#[test]
fn eta_zero_and_one_are_rejected() {
    let f = Field::rationals();
    for eta in [f.zero(), f.one()] {
        let r = MatsuoAlgebra::of_group(TranspoGroup::parse("S3").unwrap(), &eta, &f);
        assert!(matches!(r, Err(MatsuoError::BadEta(_))));
    }
}

#[test]
fn other_eta_uses_leibniz_only() {
    let f = Field::rationals();
    let eta = f.ratio(1, 3).unwrap();
    let m = MatsuoAlgebra::of_group(TranspoGroup::parse("S4").unwrap(), &eta, &f).unwrap();
    assert!(deriv::derivations_r(&m).is_err());
    let d = deriv::derivations(m.algebra());
    for map in d.maps() {
        assert!(deriv::leibniz_residual(m.algebra(), map).unwrap().is_zero());
    }
}

#[test]
fn direct_sum_derivations_add() {
    let f = Field::rationals();
    let s3 = MatsuoAlgebra::half(TranspoGroup::parse("S3").unwrap(), &f).unwrap();
    let s4 = MatsuoAlgebra::half(TranspoGroup::parse("S4").unwrap(), &f).unwrap();
    let sum = s3.direct_sum(&s4).unwrap();
    assert!(!sum.is_connected_algebra());
    assert_eq!(deriv::derivations(sum.algebra()).dim(), 1 + 3);
}
