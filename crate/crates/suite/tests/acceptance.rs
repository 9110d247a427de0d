//! Acceptance criteria, one PASS/FAIL line each, with sub-case detail.
//! Runs as a plain binary so every criterion is reported even when one fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use matsuo_core::algebra::{homomorphism_defect, LinearEndo};
use matsuo_core::autos::{self, RootMap, TorusParam};
use matsuo_core::deriv;
use matsuo_core::fischer::{FischerSpace, LineClass};
use matsuo_core::field::{Field, FieldElement};
use matsuo_core::linalg::rank_of;
use matsuo_core::{MatsuoAlgebra, RootSystem, TranspoGroup};
use matsuo_suite::{derivation_dim, positive_roots, Incidence, LARGE_PRIME};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CATALOG: &[&str] = &[
    "S3", "S4", "S5", "W:A3", "W:D4", "3W:A1", "3W:A2", "3W:A3", "3W:D4", "M3:2", "M3:3",
];
const SEED: u64 = 0;
/// Frozen from the first run; the oracle recomputes it independently.
const CHAR3_MOUFANG_DER_DIM: usize = 52;

struct Criterion {
    id: u8,
    title: &'static str,
    cases: Vec<(bool, String)>,
}

impl Criterion {
    fn new(id: u8, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            cases: Vec::new(),
        }
    }

    fn case(&mut self, ok: bool, msg: impl Into<String>) {
        self.cases.push((ok, msg.into()));
    }

    fn passed(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(|(ok, _)| *ok)
    }

    fn print(&self, elapsed: Duration) {
        for (ok, msg) in &self.cases {
            println!("    [{}] {msg}", if *ok { "ok" } else { "FAIL" });
        }
        let failed = self.cases.iter().filter(|(ok, _)| !ok).count();
        println!(
            "criterion {} {}: {} ({} sub-cases, {} failed, {:.2} s)",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.cases.len(),
            failed,
            elapsed.as_secs_f64()
        );
    }
}

fn half(desc: &str, field: &Field) -> MatsuoAlgebra {
    MatsuoAlgebra::half(TranspoGroup::parse(desc).unwrap(), field).unwrap()
}

fn incidence_of(g: &TranspoGroup) -> Incidence {
    Incidence::from_fn(g.len(), |a, b| g.collinear(a, b).then(|| g.conj(a, b)))
}

/// Independent dimension: dense Leibniz system modulo a large prime, on an
/// incidence built from scratch where a closed form exists.
fn oracle_dim(desc: &str) -> Option<usize> {
    let inc = if let Some(m) = desc.strip_prefix('S') {
        Incidence::symmetric(m.parse().ok()?)
    } else if let Some(k) = desc.strip_prefix("M3:") {
        Incidence::affine_space(k.parse().ok()?)
    } else if matches!(desc, "3W:D4") {
        return None;
    } else {
        incidence_of(&TranspoGroup::parse(desc).ok()?)
    };
    Some(derivation_dim(&inc, 1, 2, LARGE_PRIME))
}

fn criterion_1(dims: &mut BTreeMap<&'static str, usize>) -> Criterion {
    let mut c = Criterion::new(1, "derivation dimensions over Q, Leibniz and R-systems agreeing");
    let q = Field::rationals();
    let table: &[(&'static str, usize, u64)] = &[
        ("S3", 1, 5),
        ("S4", 3, 5),
        ("S5", 6, 5),
        ("3W:A1", 1, 60),
        ("3W:A2", 2, 60),
        ("3W:A3", 3, 60),
        ("3W:D4", 4, 60),
        ("W:D4", 0, 30),
        ("M3:3", 0, 30),
    ];
    for &(desc, expected, limit) in table {
        let start = Instant::now();
        let m = half(desc, &q);
        let leibniz = deriv::derivations(m.algebra());
        let r = deriv::derivations_r(&m).unwrap();
        let elapsed = start.elapsed();
        let agree = leibniz.dim() == r.dim() && leibniz.same_span(&r);
        dims.insert(desc, leibniz.dim());
        let mut ok = agree && leibniz.dim() == expected && elapsed.as_secs() < limit;
        let mut extra = String::new();
        if let Some(n) = desc.strip_prefix('S').and_then(|s| s.parse::<usize>().ok()) {
            let formula = (n - 1) * (n - 2) / 2;
            ok &= formula == expected;
            extra.push_str(&format!(", (n-1)(n-2)/2 = {formula}"));
        }
        if let Some(o) = oracle_dim(desc) {
            ok &= o == leibniz.dim();
            extra.push_str(&format!(", mod-p oracle {o}"));
        }
        c.case(
            ok,
            format!(
                "{desc}: expected {expected}, leibniz {}, r-system {}, same span {agree}{extra}, {:.2} s (limit {limit} s)",
                leibniz.dim(),
                r.dim(),
                elapsed.as_secs_f64()
            ),
        );
    }
    c
}

fn random_map(field: &Field, n: usize, rng: &mut ChaCha8Rng) -> LinearEndo {
    LinearEndo::from_unknowns(field, n, (0..n * n).map(|_| field.random(rng)).collect())
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::new(2, "R-system and Leibniz-system equivalence over Q and F7");
    for fd in ["Q", "F7"] {
        let f = Field::parse(fd).unwrap();
        for desc in CATALOG {
            let m = half(desc, &f);
            let leibniz = deriv::derivations(m.algebra());
            let r_sys = deriv::build_r_system(&m).unwrap();
            let r = deriv::DerBasis::from_system(&r_sys, m.dim());
            let spans = leibniz.dim() == r.dim() && leibniz.same_span(&r);
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let mut agree = 0;
            let mut derivations = 0;
            for k in 0..20 {
                let d = if k < 10 {
                    let coeffs: Vec<FieldElement> = (0..leibniz.dim()).map(|_| f.random(&mut rng)).collect();
                    leibniz.combine(&coeffs)
                } else {
                    random_map(&f, m.dim(), &mut rng)
                };
                let by_leibniz = deriv::leibniz_residual(m.algebra(), &d).unwrap().is_zero();
                let by_r = r_sys.is_satisfied_by(d.to_unknowns());
                agree += usize::from(by_leibniz == by_r);
                derivations += usize::from(by_leibniz);
            }
            c.case(
                spans && agree == 20 && derivations == 10,
                format!(
                    "{desc} over {fd}: dims {} / {}, mutual span {spans}, random maps agreeing {agree}/20, derivations among them {derivations}",
                    leibniz.dim(),
                    r.dim()
                ),
            );
        }
    }
    c
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::new(3, "Jordan fusion law on every axis, eigenspaces spanning");
    for fd in ["Q", "F7"] {
        let f = Field::parse(fd).unwrap();
        for desc in CATALOG {
            let m = half(desc, &f);
            let mut violations = 0;
            let mut spans = true;
            let mut checked = 0;
            for a in 0..m.dim() {
                let r = m.check_fusion(a).unwrap();
                violations += r.violations.len();
                checked += r.checked;
                spans &= r.dims.0 + r.dims.1 + r.dims.2 == m.dim();
            }
            c.case(
                violations == 0 && spans && checked > 0,
                format!("{desc} over {fd}: {} axes, {checked} products checked, {violations} violations, spans {spans}", m.dim()),
            );
        }
    }
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::new(4, "near-solid line classification and vanishing pattern");
    let start = Instant::now();
    let space = |d: &str| FischerSpace::from_arc(Arc::new(TranspoGroup::parse(d).unwrap()));

    let fs = space("S5");
    let t = fs.near_solid_table();
    c.case(
        t.iter().all(|v| v.near_solid && !v.vacuous),
        format!("S5: {}/{} lines near-solid", t.iter().filter(|v| v.near_solid).count(), t.len()),
    );
    for d in ["W:D4", "M3:3"] {
        let t = space(d).near_solid_table();
        let n = t.iter().filter(|v| v.near_solid).count();
        c.case(n == 0, format!("{d}: {n} near-solid lines"));
    }
    for d in ["S3", "S4", "W:A3", "M3:2", "3W:A1", "3W:A2"] {
        let t = space(d).near_solid_table();
        let nontrivial = t.iter().filter(|v| v.near_solid && !v.vacuous).count();
        c.case(nontrivial == 0, format!("{d}: {nontrivial} near-solid lines beyond the vacuous ones"));
    }
    for d in ["3W:A3", "3W:D4"] {
        let fs = space(d);
        let t = fs.near_solid_table();
        let near: Vec<_> = fs.lines().iter().zip(&t).filter(|(_, v)| v.near_solid).map(|(l, _)| *l).collect();
        let exact = fs
            .lines()
            .iter()
            .zip(&t)
            .all(|(l, v)| v.near_solid == (fs.line_orbit_class(l) == Ok(LineClass::Vertical)));
        let spread = fs.is_spread(&near);
        c.case(
            exact && spread,
            format!("{d}: {} near-solid lines, exactly the vertical ones {exact}, spread {spread}", near.len()),
        );
    }
    let q = Field::rationals();
    for d in CATALOG {
        let m = half(d, &q);
        let basis = deriv::derivations(m.algebra());
        let rep = deriv::vanishing_report(&m, &basis, &m.space().near_solid_table());
        c.case(
            rep.consistent_with_near_solid(),
            format!("{d}: nonzero d(a)_b on {} lines, all near-solid", rep.nonzero_lines().len()),
        );
    }
    let elapsed = start.elapsed();
    c.case(elapsed.as_secs() < 120, format!("runtime {:.2} s (limit 120 s)", elapsed.as_secs_f64()));
    c
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::new(5, "model-B basis map is a bijective algebra isomorphism");
    for fd in ["Q(sqrt:3)", "F13"] {
        let f = Field::parse(fd).unwrap();
        for ty in ["A2", "A3"] {
            let rs = RootSystem::parse(ty).unwrap();
            match autos::model_b_iso(&rs, &f) {
                Ok(iso) => {
                    let id = LinearEndo::identity(&f, iso.model.dim());
                    let inverse_ok = iso.map.compose(&iso.inverse) == id && iso.inverse.compose(&iso.map) == id;
                    let mult = homomorphism_defect(iso.model.algebra(), iso.matsuo.algebra(), &iso.map).is_none();
                    c.case(
                        inverse_ok && mult,
                        format!("{ty} over {fd}: bijective {inverse_ok}, multiplicative on all basis pairs {mult}"),
                    );
                }
                Err(e) => c.case(false, format!("{ty} over {fd}: {e}")),
            }
        }
    }
    c
}

/// Rank of the pushed-forward torus tangent maps, all checked to be derivations.
fn torus_rank(iso: &autos::ModelBIso) -> Option<usize> {
    let m = iso.matsuo.algebra();
    let mut vectors = Vec::new();
    for d in autos::torus_generators(&iso.model) {
        let pushed = iso.push_forward(&d);
        if !deriv::leibniz_residual(m, &pushed).ok()?.is_zero() {
            return None;
        }
        vectors.push(pushed.to_unknowns().to_vec());
    }
    Some(rank_of(m.field(), &vectors, m.dim() * m.dim()))
}

fn criterion_6(ranks: &mut BTreeMap<String, usize>) -> Criterion {
    let mut c = Criterion::new(6, "torus automorphisms, composition, induced symmetries, characters");
    for fd in ["Q(sqrt:3)", "F13"] {
        let f = Field::parse(fd).unwrap();
        for ty in ["A2", "A3"] {
            let rs = RootSystem::parse(ty).unwrap();
            let iso = autos::model_b_iso(&rs, &f).unwrap();
            let b = &iso.model;
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let samples: Vec<TorusParam> = (0..25).map(|_| TorusParam::random(&f, rs.rank(), &mut rng)).collect();
            let mut autos_b = 0;
            let mut autos_m = 0;
            let mut homs = 0;
            for (k, t) in samples.iter().enumerate() {
                let g = autos::torus_automorphism(b, t).unwrap();
                autos_b += usize::from(homomorphism_defect(b.algebra(), b.algebra(), &g).is_none());
                let push = iso.push_forward(&g);
                autos_m += usize::from(homomorphism_defect(iso.matsuo.algebra(), iso.matsuo.algebra(), &push).is_none());
                let u = &samples[(k + 7) % samples.len()];
                let h = autos::torus_automorphism(b, u).unwrap();
                homs += usize::from(g.compose(&h) == autos::torus_automorphism(b, &t.compose(u)).unwrap());
            }
            c.case(
                autos_b == 25 && autos_m == 25 && homs == 25,
                format!("{ty} over {fd}: automorphisms of B {autos_b}/25, of M {autos_m}/25, composition {homs}/25"),
            );
            if let Some(r) = torus_rank(&iso) {
                ranks.insert(format!("3W:{ty}"), r);
            }
            if fd == "F13" {
                let rep = autos::character_additivity_check(b, &samples).unwrap();
                c.case(
                    rep.passed(),
                    format!("{ty} over F13: characters additive on {} root pairs", rep.checked_pairs),
                );
            }
        }
    }
    let q = Field::rationals();
    for ty in ["A2", "A3", "D4"] {
        let rs = RootSystem::parse(ty).unwrap();
        let m = MatsuoAlgebra::half(TranspoGroup::affine_weyl(&rs), &q).unwrap();
        let mut maps: Vec<(String, RootMap)> = rs
            .diagram_automorphisms()
            .into_iter()
            .map(|p| (format!("diagram {p:?}"), RootMap::Diagram(p)))
            .collect();
        maps.extend((0..rs.rank()).map(|i| (format!("s{}", i + 1), RootMap::WeylWord(vec![i]))));
        let failures: Vec<String> = maps
            .iter()
            .filter_map(|(name, rho)| autos::root_automorphism(&m, rho).err().map(|e| format!("{name}: {e}")))
            .collect();
        let mut msg = format!("3W:{ty}: {} diagram and Weyl symmetries induce automorphisms", maps.len());
        if !failures.is_empty() {
            msg = format!("{msg}; failures: {}", failures.join("; "));
        }
        c.case(failures.is_empty(), msg);
    }
    c
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::new(7, "characteristic 3 contrast for 3^3:2");
    let f3 = Field::prime(3).unwrap();
    let m = half("M3:3", &f3);
    let leibniz = deriv::derivations(m.algebra());
    let r = deriv::derivations_r(&m).unwrap();
    let oracle = derivation_dim(&Incidence::affine_space(3), 1, 2, 3);
    let dim = leibniz.dim();
    c.case(dim > 0, format!("dim Der over F3 is {dim} > 0"));
    c.case(
        dim == r.dim() && leibniz.same_span(&r),
        format!("Leibniz {dim} and R-system {} agree", r.dim()),
    );
    c.case(
        dim == CHAR3_MOUFANG_DER_DIM && oracle == CHAR3_MOUFANG_DER_DIM,
        format!("regression constant {CHAR3_MOUFANG_DER_DIM}, computed {dim}, mod-3 oracle {oracle}"),
    );
    let q_dim = deriv::derivations(half("M3:3", &Field::rationals()).algebra()).dim();
    c.case(q_dim < dim, format!("over Q the dimension is {q_dim}"));
    c
}

fn criterion_8(dims: &BTreeMap<&'static str, usize>, ranks: &mut BTreeMap<String, usize>) -> Criterion {
    let mut c = Criterion::new(8, "derivation dimension equals torus rank on 3^n:W");
    let f13 = Field::prime(13).unwrap();
    for ty in ["A1", "D4"] {
        let rs = RootSystem::parse(ty).unwrap();
        let iso = autos::model_b_iso(&rs, &f13).unwrap();
        if let Some(r) = torus_rank(&iso) {
            ranks.insert(format!("3W:{ty}"), r);
        }
    }
    for (desc, kind, rank) in [("3W:A1", 'A', 1), ("3W:A2", 'A', 2), ("3W:A3", 'A', 3), ("3W:D4", 'D', 4)] {
        let der = dims[desc];
        let torus = ranks.get(desc).copied();
        let shown = torus.map_or_else(|| "unmeasured".to_string(), |t| t.to_string());
        c.case(
            torus == Some(der),
            format!(
                "{desc}: dim Der {der}, torus rank {shown} (rank {rank}, {} vertical lines)",
                positive_roots(kind, rank)
            ),
        );
    }
    c
}

fn main() -> ExitCode {
    let mut dims = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    let mut all_passed = true;
    let mut run = |f: &mut dyn FnMut() -> Criterion| {
        let start = Instant::now();
        let c = f();
        c.print(start.elapsed());
        all_passed &= c.passed();
    };
    run(&mut || criterion_1(&mut dims));
    run(&mut criterion_2);
    run(&mut criterion_3);
    run(&mut criterion_4);
    run(&mut criterion_5);
    run(&mut || criterion_6(&mut ranks));
    run(&mut criterion_7);
    run(&mut || criterion_8(&dims, &mut ranks));
    if all_passed {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria failed");
        ExitCode::FAILURE
    }
}
