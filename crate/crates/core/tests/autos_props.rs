use std::sync::OnceLock;

use matsuo_core::algebra::{homomorphism_defect, LinearEndo};
use matsuo_core::autos::{self, AutosError, ModelBIso, RootMap, TorusParam};
use matsuo_core::field::Field;
use matsuo_core::{MatsuoAlgebra, RootSystem, TranspoGroup};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CASES: &[(&str, &str)] = &[("F13", "A2"), ("F13", "A3"), ("Q(sqrt:3)", "A2"), ("Q(sqrt:3)", "A3")];

fn isos() -> &'static Vec<ModelBIso> {
    static CELL: OnceLock<Vec<ModelBIso>> = OnceLock::new();
    CELL.get_or_init(|| {
        CASES
            .iter()
            .map(|(f, t)| {
                let field = Field::parse(f).unwrap();
                autos::model_b_iso(&RootSystem::parse(t).unwrap(), &field).unwrap()
            })
            .collect()
    })
}

fn params(iso: &ModelBIso, seed: u64) -> TorusParam {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TorusParam::random(iso.model.field(), iso.model.root_system().rank(), &mut rng)
}

fn vertical_sum(m: &MatsuoAlgebra, r: usize) -> Vec<matsuo_core::FieldElement> {
    let f = m.field();
    let mut v = vec![f.zero(); m.dim()];
    for eps in 0..3 {
        v[m.group().affine_point(eps, r).unwrap()] = f.one();
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pythagorean_points_lie_on_the_circle(num in -50i64..50, den in 1i64..50) {
        let f = Field::rationals();
        let t = f.ratio(num, den).unwrap();
        let (c, s) = autos::pythagorean(&f, &t).unwrap();
        prop_assert!((&(&c * &c) + &(&s * &s)).is_one());
    }

    #[test]
    fn torus_elements_are_automorphisms(idx in 0..CASES.len(), seed in any::<u64>()) {
        let iso = &isos()[idx];
        let g = autos::torus_automorphism(&iso.model, &params(iso, seed)).unwrap();
        prop_assert!(homomorphism_defect(iso.model.algebra(), iso.model.algebra(), &g).is_none());
        let push = iso.push_forward(&g);
        prop_assert!(homomorphism_defect(iso.matsuo.algebra(), iso.matsuo.algebra(), &push).is_none());
    }

    #[test]
    fn torus_is_a_homomorphism(idx in 0..CASES.len(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let iso = &isos()[idx];
        let (t1, t2) = (params(iso, s1), params(iso, s2));
        let b = &iso.model;
        let g1 = autos::torus_automorphism(b, &t1).unwrap();
        let g2 = autos::torus_automorphism(b, &t2).unwrap();
        let g12 = autos::torus_automorphism(b, &t1.compose(&t2)).unwrap();
        prop_assert_eq!(g1.compose(&g2), g12);
        let inverse = TorusParam::new(t1.params.iter().map(|(c, s)| (c.clone(), -s)).collect()).unwrap();
        let id = autos::torus_automorphism(b, &t1.compose(&inverse)).unwrap();
        prop_assert_eq!(id, LinearEndo::identity(b.field(), b.dim()));
    }

    #[test]
    fn torus_commutes_with_theta(idx in 0..CASES.len(), seed in any::<u64>()) {
        let iso = &isos()[idx];
        let g = autos::torus_automorphism(&iso.model, &params(iso, seed)).unwrap();
        let theta = iso.model.theta();
        prop_assert_eq!(g.compose(&theta), theta.compose(&g));
    }

    #[test]
    fn fixed_space_is_spanned_by_block_units(idx in 0..CASES.len(), seed in any::<u64>()) {
        let iso = &isos()[idx];
        let t = params(iso, seed);
        let rs = iso.model.root_system();
        let rot = autos::torus_rotations(rs, &t).unwrap();
        let trivial = rot.iter().filter(|(c, s)| c.is_one() && s.is_zero()).count();
        let g = autos::torus_automorphism(&iso.model, &t).unwrap();
        prop_assert_eq!(autos::fixed_space_dim(&g), rs.num_positive() + 2 * trivial);
    }

    #[test]
    fn push_forward_fixes_vertical_sums(idx in 0..CASES.len(), seed in any::<u64>()) {
        let iso = &isos()[idx];
        let g = autos::torus_automorphism(&iso.model, &params(iso, seed)).unwrap();
        let push = iso.push_forward(&g);
        for r in 0..iso.model.root_system().num_positive() {
            let v = vertical_sum(&iso.matsuo, r);
            prop_assert_eq!(push.apply(&v), v);
        }
    }
}

#[test]
fn model_b_needs_sqrt3() {
    let rs = RootSystem::parse("A2").unwrap();
    assert!(matches!(
        autos::model_b_iso(&rs, &Field::rationals()),
        Err(AutosError::NoSqrt3(_))
    ));
    assert!(autos::model_b_iso(&rs, &Field::prime(7).unwrap()).is_err());
}

#[test]
fn model_b_for_d4() {
    let iso = autos::model_b_iso(&RootSystem::parse("D4").unwrap(), &Field::prime(13).unwrap()).unwrap();
    assert_eq!(iso.model.dim(), 36);
    assert_eq!(iso.map.compose(&iso.inverse), LinearEndo::identity(iso.model.field(), 36));
}

#[test]
fn triality_and_reflections_induce_automorphisms() {
    let rs = RootSystem::parse("D4").unwrap();
    let m = MatsuoAlgebra::half(TranspoGroup::affine_weyl(&rs), &Field::rationals()).unwrap();
    let diagrams = rs.diagram_automorphisms();
    assert_eq!(diagrams.len(), 6);
    for p in diagrams {
        autos::root_automorphism(&m, &RootMap::Diagram(p)).unwrap();
    }
    let s0 = autos::root_automorphism(&m, &RootMap::WeylWord(vec![0])).unwrap();
    let s1 = autos::root_automorphism(&m, &RootMap::WeylWord(vec![1])).unwrap();
    let s01 = autos::root_automorphism(&m, &RootMap::WeylWord(vec![0, 1])).unwrap();
    assert_eq!(s0.compose(&s1), s01);
    assert_eq!(s0.compose(&s0), LinearEndo::identity(m.field(), m.dim()));
}

#[test]
fn non_isometries_are_rejected() {
    let rs = RootSystem::parse("A2").unwrap();
    let m = MatsuoAlgebra::half(TranspoGroup::affine_weyl(&rs), &Field::rationals()).unwrap();
    let stretch = RootMap::Linear(vec![vec![2, 0], vec![0, 1]]);
    assert!(matches!(
        autos::root_automorphism(&m, &stretch),
        Err(AutosError::NotRootAutomorphism(_))
    ));
    let s3 = MatsuoAlgebra::half(TranspoGroup::symmetric(3).unwrap(), &Field::rationals()).unwrap();
    assert!(matches!(
        autos::root_automorphism(&s3, &RootMap::Diagram(vec![0])),
        Err(AutosError::NotAffineType)
    ));
}

#[test]
fn zero_sum_models() {
    for desc in ["Q", "F13"] {
        let f = Field::parse(desc).unwrap();
        for n in 3..=6 {
            let (m, zs, _) = autos::symmetric_model_iso(n, &f).unwrap();
            assert_eq!(zs.basis_rank(), m.dim());
        }
    }
    assert!(autos::ZeroSumJordan::build(3, &Field::prime(3).unwrap()).is_err());
}

#[test]
fn characters_over_f13() {
    let f = Field::prime(13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for ty in ["A2", "A3", "D4"] {
        let rs = RootSystem::parse(ty).unwrap();
        let b = autos::ModelB::build(&rs, &f).unwrap();
        let samples: Vec<_> = (0..5).map(|_| TorusParam::random(&f, rs.rank(), &mut rng)).collect();
        let report = autos::character_additivity_check(&b, &samples).unwrap();
        assert!(report.passed(), "{ty} {report:?}");
    }
    let q3 = Field::parse("Q(sqrt:3)").unwrap();
    let b = autos::ModelB::build(&RootSystem::parse("A2").unwrap(), &q3).unwrap();
    assert!(matches!(
        autos::character_additivity_check(&b, &[]),
        Err(AutosError::NoSqrtMinus1(_))
    ));
}

#[test]
fn wrong_rank_and_off_circle_parameters() {
    let f = Field::prime(13).unwrap();
    let b = autos::ModelB::build(&RootSystem::parse("A2").unwrap(), &f).unwrap();
    let short = TorusParam::identity(&f, 1);
    assert!(matches!(
        autos::torus_automorphism(&b, &short),
        Err(AutosError::TorusRank { expected: 2, got: 1 })
    ));
    assert!(TorusParam::new(vec![(f.one(), f.one())]).is_err());
}
