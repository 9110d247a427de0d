//! Verification suites behind `verify` and `verify-model`.

use matsuo_core::algebra::{homomorphism_defect, LinearEndo};
use matsuo_core::autos::{self, ModelBIso, RootMap, TorusParam};
use matsuo_core::deriv;
use matsuo_core::linalg::rank_of;
use matsuo_core::{Field, MatsuoAlgebra, RootSystem, TranspoGroup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands::parse_group;
use crate::report::Check;
use crate::CliError;

pub const CATALOG: &[&str] = &[
    "S3", "S4", "S5", "W:A3", "W:D4", "3W:A1", "3W:A2", "3W:A3", "3W:D4", "M3:2", "M3:3",
];
pub const MODEL_TYPES: &[&str] = &["A2", "A3"];
pub const TORUS_SAMPLES: usize = 25;
pub const RANDOM_MAPS: usize = 20;

fn half(g: TranspoGroup, field: &Field) -> Result<MatsuoAlgebra, CliError> {
    Ok(MatsuoAlgebra::half(g, field).map_err(matsuo_core::Error::from)?)
}

fn root_system(ty: &str) -> Result<RootSystem, CliError> {
    Ok(RootSystem::parse(ty).map_err(matsuo_core::Error::from)?)
}

pub fn has_sqrt3(field: &Field) -> bool {
    field.sqrt(&field.from_i64(3)).is_some()
}

/// Every axis obeys the Jordan fusion law and its eigenspaces span the algebra.
pub fn fusion(groups: &[String], field: &Field) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for desc in groups {
        let m = half(parse_group(desc)?, field)?;
        let reports: Vec<_> = (0..m.dim())
            .into_par_iter()
            .map(|a| m.check_fusion(a))
            .collect::<Result<_, _>>()
            .map_err(matsuo_core::Error::from)?;
        let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
        let full = reports.iter().all(|r| r.dims.0 + r.dims.1 + r.dims.2 == m.dim());
        let dims = reports.first().map(|r| r.dims).unwrap_or_default();
        out.push(Check::new(
            "fusion",
            "jordan fusion law",
            desc,
            violations == 0,
            format!("{} axes, {violations} violations", m.dim()),
        ));
        out.push(Check::new(
            "fusion",
            "eigenspaces span",
            desc,
            full,
            format!("(1, 0, eta) dims {dims:?} sum to {}", m.dim()),
        ));
    }
    Ok(out)
}

/// Leibniz and R-system nullspaces coincide, and random maps satisfy one
/// system iff they satisfy the other.
pub fn equivalence(groups: &[String], field: &Field, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for desc in groups {
        let m = half(parse_group(desc)?, field)?;
        let leibniz = deriv::derivations(m.algebra());
        let r_sys = deriv::build_r_system(&m).map_err(matsuo_core::Error::from)?;
        let r_basis = deriv::DerBasis::from_system(&r_sys, m.dim());
        let same = leibniz.dim() == r_basis.dim() && leibniz.same_span(&r_basis);
        out.push(Check::new(
            "equivalence",
            "nullspaces agree",
            desc,
            same,
            format!("leibniz {} / r-system {}", leibniz.dim(), r_basis.dim()),
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = m.dim();
        let mut agree = 0;
        let mut derivs = 0;
        for k in 0..RANDOM_MAPS {
            let d = if k % 2 == 0 {
                let coeffs: Vec<_> = (0..leibniz.dim()).map(|_| field.random(&mut rng)).collect();
                leibniz.combine(&coeffs)
            } else {
                let data = (0..n * n).map(|_| field.random(&mut rng)).collect();
                LinearEndo::from_unknowns(field, n, data)
            };
            let by_leibniz = deriv::leibniz_residual(m.algebra(), &d)
                .map_err(matsuo_core::Error::from)?
                .is_zero();
            let by_r = r_sys.is_satisfied_by(d.to_unknowns());
            if by_leibniz == by_r {
                agree += 1;
            }
            if by_leibniz {
                derivs += 1;
            }
        }
        out.push(Check::new(
            "equivalence",
            "random maps",
            desc,
            agree == RANDOM_MAPS,
            format!("{agree}/{RANDOM_MAPS} agree, {derivs} derivations"),
        ));
    }
    Ok(out)
}

fn iso_or_check(ty: &str, field: &Field) -> Result<Result<ModelBIso, String>, CliError> {
    let rs = root_system(ty)?;
    Ok(autos::model_b_iso(&rs, field).map_err(|e| e.to_string()))
}

/// Model-B isomorphisms and the zero-sum Jordan models of `M(S_n)`.
pub fn model(types: &[String], field: &Field) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for ty in types {
        let inst = format!("3W:{ty}");
        let check = match iso_or_check(ty, field)? {
            Ok(iso) => Check::new(
                "model",
                "basis map is an isomorphism",
                &inst,
                true,
                format!("dim {}, bijective and multiplicative", iso.model.dim()),
            ),
            Err(e) => Check::new("model", "basis map is an isomorphism", &inst, false, e),
        };
        out.push(check);
    }
    for n in 3..=5usize {
        let inst = format!("S{n}");
        let ch = field.characteristic();
        if ch != 0 && (2 * n as u64).is_multiple_of(ch) {
            out.push(Check::skip("model", "zero-sum jordan model", &inst, "characteristic divides 2n"));
            continue;
        }
        let c = match autos::symmetric_model_iso(n, field) {
            Ok((m, _, _)) => Check::new("model", "zero-sum jordan model", &inst, true, format!("dim {}", m.dim())),
            Err(e) => Check::new("model", "zero-sum jordan model", &inst, false, e.to_string()),
        };
        out.push(c);
    }
    Ok(out)
}

fn endo_eq(a: &LinearEndo, b: &LinearEndo) -> bool {
    a.to_unknowns() == b.to_unknowns()
}

/// Seeded torus elements: automorphisms of B and of the Matsuo algebra,
/// composition, commutation with theta, fixed spaces, and characters.
pub fn torus(types: &[String], field: &Field, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for ty in types {
        let inst = format!("3W:{ty}");
        let iso = match iso_or_check(ty, field)? {
            Ok(iso) => iso,
            Err(e) => {
                out.push(Check::new("torus", "model", &inst, false, e));
                continue;
            }
        };
        let b = &iso.model;
        let rs = b.root_system();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<TorusParam> = (0..TORUS_SAMPLES)
            .map(|_| TorusParam::random(field, rs.rank(), &mut rng))
            .collect();
        let theta = b.theta();
        let (mut auto_b, mut auto_m, mut comp, mut theta_ok, mut fixed_ok, mut vert_ok) = (0, 0, 0, 0, 0, 0);
        for (k, t) in samples.iter().enumerate() {
            let g = autos::torus_automorphism(b, t).map_err(matsuo_core::Error::from)?;
            if homomorphism_defect(b.algebra(), b.algebra(), &g).is_none() {
                auto_b += 1;
            }
            let push = iso.push_forward(&g);
            if homomorphism_defect(iso.matsuo.algebra(), iso.matsuo.algebra(), &push).is_none() {
                auto_m += 1;
            }
            let next = &samples[(k + 1) % samples.len()];
            let h = autos::torus_automorphism(b, next).map_err(matsuo_core::Error::from)?;
            let gh = autos::torus_automorphism(b, &t.compose(next)).map_err(matsuo_core::Error::from)?;
            if endo_eq(&g.compose(&h), &gh) {
                comp += 1;
            }
            if endo_eq(&g.compose(&theta), &theta.compose(&g)) {
                theta_ok += 1;
            }
            let rot = autos::torus_rotations(rs, t).map_err(matsuo_core::Error::from)?;
            let trivial = rot.iter().filter(|(c, s)| c.is_one() && s.is_zero()).count();
            if autos::fixed_space_dim(&g) == rs.num_positive() + 2 * trivial {
                fixed_ok += 1;
            }
            if vertical_sums_fixed(&iso, &push) {
                vert_ok += 1;
            }
        }
        let s = TORUS_SAMPLES;
        out.push(Check::new("torus", "automorphism of B", &inst, auto_b == s, format!("{auto_b}/{s}")));
        out.push(Check::new("torus", "automorphism of M", &inst, auto_m == s, format!("{auto_m}/{s}")));
        out.push(Check::new("torus", "composition", &inst, comp == s, format!("{comp}/{s}")));
        out.push(Check::new("torus", "commutes with theta", &inst, theta_ok == s, format!("{theta_ok}/{s}")));
        out.push(Check::new("torus", "fixed space", &inst, fixed_ok == s, format!("{fixed_ok}/{s}")));
        out.push(Check::new("torus", "vertical sums fixed", &inst, vert_ok == s, format!("{vert_ok}/{s}")));
        let (rank, all_derivations) = torus_rank(&iso)?;
        out.push(Check::new(
            "torus",
            "rank",
            &inst,
            all_derivations && rank == rs.rank(),
            format!("tangent maps span {rank} dims of derivations"),
        ));
        match autos::character_additivity_check(b, &samples) {
            Ok(rep) => out.push(Check::new(
                "torus",
                "character additivity",
                &inst,
                rep.passed(),
                format!("{} root pairs", rep.checked_pairs),
            )),
            Err(e) => out.push(Check::skip("torus", "character additivity", &inst, e.to_string())),
        }
    }
    Ok(out)
}

/// Rank of the pushed-forward torus tangent maps, and whether they are all
/// derivations of the Matsuo algebra.
pub fn torus_rank(iso: &ModelBIso) -> Result<(usize, bool), CliError> {
    let m = iso.matsuo.algebra();
    let mut vectors = Vec::new();
    let mut all = true;
    for d in autos::torus_generators(&iso.model) {
        let pushed = iso.push_forward(&d);
        all &= deriv::leibniz_residual(m, &pushed)
            .map_err(matsuo_core::Error::from)?
            .is_zero();
        vectors.push(pushed.to_unknowns().to_vec());
    }
    Ok((rank_of(m.field(), &vectors, m.dim() * m.dim()), all))
}

/// The sum of the three points on each vertical line is fixed.
fn vertical_sums_fixed(iso: &ModelBIso, g: &LinearEndo) -> bool {
    let m = &iso.matsuo;
    let grp = m.group();
    let f = m.field();
    let rs = grp.root_system().expect("affine group");
    (0..rs.num_positive()).all(|r| {
        let mut v = vec![f.zero(); m.dim()];
        for eps in 0..3 {
            v[grp.affine_point(eps, r).unwrap()] = f.one();
        }
        g.apply(&v) == v
    })
}

/// Diagram automorphisms and simple reflections induce Matsuo automorphisms.
pub fn section(types: &[String], field: &Field) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for ty in types {
        let rs = root_system(ty)?;
        let inst = format!("3W:{ty}");
        let m = half(TranspoGroup::affine_weyl(&rs), field)?;
        let mut maps: Vec<(String, RootMap)> = rs
            .diagram_automorphisms()
            .into_iter()
            .map(|p| (format!("diagram {p:?}"), RootMap::Diagram(p)))
            .collect();
        maps.extend((0..rs.rank()).map(|i| (format!("reflection s{}", i + 1), RootMap::WeylWord(vec![i]))));
        let total = maps.len();
        let mut failures = Vec::new();
        for (name, rho) in &maps {
            if let Err(e) = autos::root_automorphism(&m, rho) {
                failures.push(format!("{name}: {e}"));
            }
        }
        let detail = if failures.is_empty() {
            format!("{total} root-system symmetries")
        } else {
            failures.join("; ")
        };
        out.push(Check::new("section", "induced automorphisms", &inst, failures.is_empty(), detail));
    }
    Ok(out)
}
