//! Automorphisms: model B of `M(3^n:W)` and its torus, maps induced by
//! root-system automorphisms, and the matrix model of `M(S_n)`.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{homomorphism_defect, Algebra, LinearEndo};
use crate::field::{Field, FieldElement, FieldError};
use crate::linalg::{kernel, rank_of};
use crate::matsuo::{MatsuoAlgebra, MatsuoError};
use crate::transpo::{CentralType, Root, RootSystem, TranspoGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutosError {
    #[error("3 is not a square in {0}")]
    NoSqrt3(String),
    #[error("-1 is not a square in {0}")]
    NoSqrtMinus1(String),
    #[error("characteristic {0} is not allowed here")]
    BadCharacteristic(u64),
    #[error("torus parameter {index} violates c^2 + s^2 = 1")]
    CircleRelationViolated { index: usize },
    #[error("expected {expected} torus parameters, got {got}")]
    TorusRank { expected: usize, got: usize },
    #[error("decompositions of root {0} give different rotations")]
    InconsistentTorus(String),
    #[error("not a root system automorphism: {0}")]
    NotRootAutomorphism(String),
    #[error("map is not multiplicative on basis pair ({0}, {1})")]
    NotMultiplicative(String, String),
    #[error("map is not bijective")]
    NotBijective,
    #[error("algebra is not of type 3^n:W")]
    NotAffineType,
    #[error("product of {0} and {1} leaves the zero-sum space")]
    NotClosed(String, String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matsuo(#[from] MatsuoError),
}

/// Slot of a basis vector inside its block `B_alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    One = 0,
    X = 1,
    Y = 2,
}

/// `B = ⊕ B_alpha` with basis `{1_alpha, x_alpha, y_alpha}`; basis index
/// `3 r + slot` for the `r`-th positive root.
#[derive(Debug, Clone)]
pub struct ModelB {
    rs: RootSystem,
    sqrt3: FieldElement,
    algebra: Algebra,
}

#[inline]
pub fn slot(r: usize, s: Slot) -> usize {
    3 * r + s as usize
}

fn root_label(r: &Root) -> String {
    let v: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    format!("[{}]", v.join(","))
}

/// Terms of `theta(x)` / `theta(y)` (or their inverses) in block `r`.
fn theta_terms(r: usize, s: Slot, inverse: bool, half: &FieldElement, h3: &FieldElement) -> Vec<(usize, FieldElement)> {
    let sign = |v: &FieldElement, neg: bool| if neg { -v } else { v.clone() };
    match s {
        // theta(x) = x/2 - (√3/2) y ; theta^-1(x) = x/2 + (√3/2) y
        Slot::X => vec![(slot(r, Slot::X), half.clone()), (slot(r, Slot::Y), sign(h3, !inverse))],
        // theta(y) = (√3/2) x + y/2 ; theta^-1(y) = -(√3/2) x + y/2
        Slot::Y => vec![(slot(r, Slot::X), sign(h3, inverse)), (slot(r, Slot::Y), half.clone())],
        Slot::One => vec![(slot(r, Slot::One), half.clone() + half.clone())],
    }
}

fn scaled(terms: Vec<(usize, FieldElement)>, c: &FieldElement) -> Vec<(usize, FieldElement)> {
    terms.into_iter().map(|(k, v)| (k, &v * c)).collect()
}

impl ModelB {
    pub fn build(rs: &RootSystem, field: &Field) -> Result<Self, AutosError> {
        let ch = field.characteristic();
        if ch == 2 || ch == 3 {
            return Err(AutosError::BadCharacteristic(ch));
        }
        let sqrt3 = field
            .sqrt(&field.from_i64(3))
            .ok_or_else(|| AutosError::NoSqrt3(field.to_string()))?;
        let m = rs.num_positive();
        let mut names = Vec::with_capacity(3 * m);
        for r in rs.positive_roots() {
            let l = root_label(r);
            names.push(format!("1_{l}"));
            names.push(format!("x_{l}"));
            names.push(format!("y_{l}"));
        }
        let mut alg = Algebra::new(field, names);
        let one = field.one();
        let half = field.ratio(1, 2)?;
        let h3 = &sqrt3 * &half;
        let q = field.ratio(3, 4)?;
        let nine_quarters = field.ratio(9, 4)?;

        for r in 0..m {
            let (u, x, y) = (slot(r, Slot::One), slot(r, Slot::X), slot(r, Slot::Y));
            // Jordan algebra of b with b(x,x) = b(y,y) = 9/2: v w = b(v,w)/2 * 1
            alg.set_product(u, u, [(u, one.clone())], false);
            alg.set_product(u, x, [(x, one.clone())], true);
            alg.set_product(u, y, [(y, one.clone())], true);
            alg.set_product(x, x, [(u, nine_quarters.clone())], false);
            alg.set_product(y, y, [(u, nine_quarters.clone())], false);
        }
        let pr = rs.positive_roots();
        for a in 0..m {
            for b in 0..m {
                if a == b || rs.pairing(&pr[a], &pr[b]) == 0 {
                    continue;
                }
                // 1_a v = (λ/2) 1_a + v/2 - (λ/2) 1_{σ_a(b)} for v = λ 1_b + v0
                let (c, _) = rs.signed_index(&rs.reflect(&pr[a], &pr[b])).expect("root");
                let ua = slot(a, Slot::One);
                alg.set_product(
                    ua,
                    slot(b, Slot::One),
                    [(ua, half.clone()), (slot(b, Slot::One), half.clone()), (slot(c, Slot::One), -&half)],
                    true,
                );
                alg.set_product(ua, slot(b, Slot::X), [(slot(b, Slot::X), half.clone())], true);
                alg.set_product(ua, slot(b, Slot::Y), [(slot(b, Slot::Y), half.clone())], true);
            }
        }
        let neg_q = -&q;
        for g in 0..m {
            for (a0, b0) in rs.decompositions(g) {
                for (a, b) in [(a0, b0), (b0, a0)] {
                    let th = |s| theta_terms(g, s, false, &half, &h3);
                    let thi = |s| theta_terms(b, s, true, &half, &h3);
                    let (xa, ya) = (slot(a, Slot::X), slot(a, Slot::Y));
                    let (xb, yb) = (slot(b, Slot::X), slot(b, Slot::Y));
                    let (xg, yg) = (slot(g, Slot::X), slot(g, Slot::Y));
                    alg.set_product(xa, xb, scaled(th(Slot::Y), &neg_q), true);
                    alg.set_product(xa, yb, scaled(th(Slot::X), &q), true);
                    alg.set_product(ya, yb, scaled(th(Slot::Y), &q), true);
                    alg.set_product(xg, xa, scaled(thi(Slot::Y), &q), true);
                    alg.set_product(xg, ya, scaled(thi(Slot::X), &q), true);
                    alg.set_product(xa, yg, scaled(thi(Slot::X), &neg_q), true);
                    alg.set_product(ya, yg, scaled(thi(Slot::Y), &q), true);
                }
            }
        }
        Ok(ModelB {
            rs: rs.clone(),
            sqrt3,
            algebra: alg,
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn sqrt3(&self) -> &FieldElement {
        &self.sqrt3
    }

    pub fn field(&self) -> &Field {
        self.algebra.field()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// `b_alpha(u, v)` for `u, v` in the span of `x_alpha, y_alpha`: twice the
    /// `1_alpha` coefficient of `u v`.
    pub fn bilinear_form(&self, r: usize, u: Slot, v: Slot) -> FieldElement {
        let p = self.algebra.product(slot(r, u), slot(r, v));
        let c = p
            .iter()
            .find(|(k, _)| *k as usize == slot(r, Slot::One))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.field().zero());
        &c + &c
    }

    /// `theta` on all of `B` (identity on each `1_alpha`).
    pub fn theta(&self) -> LinearEndo {
        let f = self.field();
        let half = f.ratio(1, 2).expect("char != 2");
        let h3 = &self.sqrt3 * &half;
        let mut t = LinearEndo::zero(f, self.dim(), self.dim());
        for r in 0..self.rs.num_positive() {
            for s in [Slot::One, Slot::X, Slot::Y] {
                for (k, v) in theta_terms(r, s, false, &half, &h3) {
                    t.set(k, slot(r, s), v);
                }
            }
        }
        t
    }
}

/// The displayed basis map `B -> M(3^n:W)`.
pub fn model_b_map(b: &ModelB) -> LinearEndo {
    let f = b.field();
    let n = b.dim();
    let two_thirds = f.ratio(2, 3).expect("char != 3");
    let s3 = b.sqrt3().clone();
    let mut map = LinearEndo::zero(f, n, n);
    for r in 0..b.root_system().num_positive() {
        // matsuo indices: 3r = (0, σ_α), 3r+1 = (α, σ_α), 3r+2 = (-α, σ_α)
        let (o, p, m) = (3 * r, 3 * r + 1, 3 * r + 2);
        let u = slot(r, Slot::One);
        for k in [o, p, m] {
            map.set(k, u, two_thirds.clone());
        }
        let x = slot(r, Slot::X);
        map.set(o, x, s3.clone());
        map.set(p, x, -&s3);
        let y = slot(r, Slot::Y);
        map.set(o, y, f.from_i64(-1));
        map.set(p, y, f.from_i64(-1));
        map.set(m, y, f.from_i64(2));
    }
    map
}

/// Model B, the Matsuo algebra and the verified isomorphism between them.
#[derive(Debug, Clone)]
pub struct ModelBIso {
    pub model: ModelB,
    pub matsuo: MatsuoAlgebra,
    pub map: LinearEndo,
    pub inverse: LinearEndo,
}

pub fn model_b_iso(rs: &RootSystem, field: &Field) -> Result<ModelBIso, AutosError> {
    let model = ModelB::build(rs, field)?;
    let matsuo = MatsuoAlgebra::half(TranspoGroup::affine_weyl(rs), field)?;
    let map = model_b_map(&model);
    let inverse = map.inverse().ok_or(AutosError::NotBijective)?;
    if let Some((i, j)) = homomorphism_defect(model.algebra(), matsuo.algebra(), &map) {
        return Err(AutosError::NotMultiplicative(
            model.algebra().name(i).to_string(),
            model.algebra().name(j).to_string(),
        ));
    }
    Ok(ModelBIso {
        model,
        matsuo,
        map,
        inverse,
    })
}

impl ModelBIso {
    /// `iso ∘ g ∘ iso^-1` on the Matsuo algebra.
    pub fn push_forward(&self, g: &LinearEndo) -> LinearEndo {
        self.map.compose(g).compose(&self.inverse)
    }
}

/// Rotation parameters `(c_i, s_i)` for the simple roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusParam {
    pub params: Vec<(FieldElement, FieldElement)>,
}

impl TorusParam {
    pub fn new(params: Vec<(FieldElement, FieldElement)>) -> Result<Self, AutosError> {
        for (i, (c, s)) in params.iter().enumerate() {
            if !(&(c * c) + &(s * s)).is_one() {
                return Err(AutosError::CircleRelationViolated { index: i });
            }
        }
        Ok(TorusParam { params })
    }

    pub fn identity(field: &Field, rank: usize) -> Self {
        TorusParam {
            params: vec![(field.one(), field.zero()); rank],
        }
    }

    /// Componentwise rotation product.
    pub fn compose(&self, other: &TorusParam) -> TorusParam {
        TorusParam {
            params: self
                .params
                .iter()
                .zip(&other.params)
                .map(|(a, b)| rotation_product(a, b))
                .collect(),
        }
    }

    /// Random parameters from [`pythagorean`].
    pub fn random<R: Rng + ?Sized>(field: &Field, rank: usize, rng: &mut R) -> Self {
        let params = (0..rank)
            .map(|_| loop {
                if let Some(p) = pythagorean(field, &field.random(rng)) {
                    break p;
                }
            })
            .collect();
        TorusParam { params }
    }
}

/// `((1 - t^2)/(1 + t^2), 2t/(1 + t^2))`, or `None` when `1 + t^2 = 0`.
pub fn pythagorean(field: &Field, t: &FieldElement) -> Option<(FieldElement, FieldElement)> {
    let t2 = t * t;
    let den = &field.one() + &t2;
    let inv = den.inv().ok()?;
    Some((&(&field.one() - &t2) * &inv, &(t + t) * &inv))
}

fn rotation_product(a: &(FieldElement, FieldElement), b: &(FieldElement, FieldElement)) -> (FieldElement, FieldElement) {
    let (c1, s1) = a;
    let (c2, s2) = b;
    (&(c1 * c2) - &(s1 * s2), &(s1 * c2) + &(c1 * s2))
}

/// Rotation for every positive root, built by `rho_{a+b} = rho_a rho_b`,
/// checking that all decompositions agree.
pub fn torus_rotations(rs: &RootSystem, t: &TorusParam) -> Result<Vec<(FieldElement, FieldElement)>, AutosError> {
    if t.params.len() != rs.rank() {
        return Err(AutosError::TorusRank {
            expected: rs.rank(),
            got: t.params.len(),
        });
    }
    TorusParam::new(t.params.clone())?;
    let m = rs.num_positive();
    let mut rot: Vec<Option<(FieldElement, FieldElement)>> = vec![None; m];
    for (i, p) in t.params.iter().enumerate() {
        rot[i] = Some(p.clone());
    }
    // positive roots are sorted by height, so summands come first
    for g in rs.rank()..m {
        let mut value: Option<(FieldElement, FieldElement)> = None;
        for (a, b) in rs.decompositions(g) {
            let ra = rot[a].as_ref().expect("lower height");
            let rb = rot[b].as_ref().expect("lower height");
            let v = rotation_product(ra, rb);
            match &value {
                None => value = Some(v),
                Some(w) if *w == v => {}
                Some(_) => return Err(AutosError::InconsistentTorus(root_label(&rs.positive_roots()[g]))),
            }
        }
        rot[g] = value;
    }
    Ok(rot.into_iter().map(|r| r.expect("every root reached")).collect())
}

/// The automorphism of `B` fixing each `1_alpha` and rotating each
/// `(x_alpha, y_alpha)` plane: `x -> c x + s y`, `y -> -s x + c y`.
pub fn torus_automorphism(b: &ModelB, t: &TorusParam) -> Result<LinearEndo, AutosError> {
    let rot = torus_rotations(b.root_system(), t)?;
    let f = b.field();
    let mut g = LinearEndo::zero(f, b.dim(), b.dim());
    for (r, (c, s)) in rot.iter().enumerate() {
        let (u, x, y) = (slot(r, Slot::One), slot(r, Slot::X), slot(r, Slot::Y));
        g.set(u, u, f.one());
        g.set(x, x, c.clone());
        g.set(y, x, s.clone());
        g.set(x, y, -s);
        g.set(y, y, c.clone());
    }
    Ok(g)
}

/// Tangent maps of the torus, one per simple root `alpha_i`:
/// `x_alpha -> m y_alpha`, `y_alpha -> -m x_alpha`, `1_alpha -> 0`, where
/// `m` is the coefficient of `alpha_i` in `alpha`.
pub fn torus_generators(b: &ModelB) -> Vec<LinearEndo> {
    let rs = b.root_system();
    let f = b.field();
    (0..rs.rank())
        .map(|i| {
            let mut d = LinearEndo::zero(f, b.dim(), b.dim());
            for (r, root) in rs.positive_roots().iter().enumerate() {
                let m = f.from_i64(root[i]);
                if m.is_zero() {
                    continue;
                }
                let (x, y) = (slot(r, Slot::X), slot(r, Slot::Y));
                d.set(y, x, m.clone());
                d.set(x, y, -&m);
            }
            d
        })
        .collect()
}

/// Dimension of the fixed space of a linear map.
pub fn fixed_space_dim(g: &LinearEndo) -> usize {
    let f = g.field();
    let n = g.rows();
    let rows: Vec<Vec<FieldElement>> = (0..n)
        .map(|b| {
            (0..n)
                .map(|a| {
                    let v = g.entry(b, a).clone();
                    if a == b {
                        &v - &f.one()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    kernel(f, &rows, n).len()
}

/// An automorphism of the root system, given on the simple roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootMap {
    /// Permutation `i -> perm[i]` of the simple roots.
    Diagram(Vec<usize>),
    /// Product `σ_{i1} σ_{i2} ...` of simple reflections.
    WeylWord(Vec<usize>),
    /// Images of the simple roots, in simple-root coordinates.
    Linear(Vec<Vec<i64>>),
}

impl RootMap {
    /// Images of the simple roots.
    pub fn simple_images(&self, rs: &RootSystem) -> Result<Vec<Root>, AutosError> {
        let n = rs.rank();
        match self {
            RootMap::Diagram(p) => {
                if p.len() != n || p.iter().any(|&i| i >= n) {
                    return Err(AutosError::NotRootAutomorphism(format!("bad permutation {p:?}")));
                }
                Ok(p.iter().map(|&i| rs.simple_root(i)).collect())
            }
            RootMap::WeylWord(w) => {
                if let Some(&i) = w.iter().find(|&&i| i >= n) {
                    return Err(AutosError::NotRootAutomorphism(format!("no simple root {i}")));
                }
                Ok((0..n)
                    .map(|i| {
                        w.iter()
                            .rev()
                            .fold(rs.simple_root(i), |v, &j| rs.reflect(&rs.simple_root(j), &v))
                    })
                    .collect())
            }
            RootMap::Linear(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(AutosError::NotRootAutomorphism("wrong shape".into()));
                }
                Ok(rows.clone())
            }
        }
    }
}

fn apply_linear(images: &[Root], v: &[i64]) -> Root {
    let n = images.len();
    let mut out = vec![0; n];
    for (i, &c) in v.iter().enumerate() {
        for k in 0..n {
            out[k] += c * images[i][k];
        }
    }
    out
}

/// Basis permutation `(eps α, σ_α) -> (eps ρ(α), σ_ρ(α))` on `M(3^n:W)`,
/// verified multiplicative.
pub fn root_automorphism(m: &MatsuoAlgebra, rho: &RootMap) -> Result<LinearEndo, AutosError> {
    let g = m.group();
    if !matches!(g.label(), CentralType::AffineWeyl(..)) {
        return Err(AutosError::NotAffineType);
    }
    let rs = g.root_system().ok_or(AutosError::NotAffineType)?;
    let images = rho.simple_images(rs)?;
    let n = rs.rank();
    for i in 0..n {
        for j in 0..n {
            let want = rs.cartan()[i][j];
            if rs.pairing(&images[i], &images[j]) != want {
                return Err(AutosError::NotRootAutomorphism(format!(
                    "pairing of images of simple roots {i} and {j} is not {want}"
                )));
            }
        }
    }
    let f = m.field();
    let mut map = LinearEndo::zero(f, m.dim(), m.dim());
    let mut hit = vec![false; m.dim()];
    for (r, root) in rs.positive_roots().iter().enumerate() {
        let img = apply_linear(&images, root);
        let (r2, sign) = rs
            .signed_index(&img)
            .ok_or_else(|| AutosError::NotRootAutomorphism(format!("{} is not sent to a root", root_label(root))))?;
        for eps in 0..3u8 {
            let e2 = if sign > 0 { eps } else { (3 - eps) % 3 };
            let src = g.affine_point(eps, r).unwrap();
            let dst = g.affine_point(e2, r2).unwrap();
            if hit[dst] {
                return Err(AutosError::NotBijective);
            }
            hit[dst] = true;
            map.set(dst, src, f.one());
        }
    }
    if let Some((i, j)) = homomorphism_defect(m.algebra(), m.algebra(), &map) {
        return Err(AutosError::NotMultiplicative(
            m.algebra().name(i).to_string(),
            m.algebra().name(j).to_string(),
        ));
    }
    Ok(map)
}

/// Symmetric `n x n` matrices with zero row sums, under `a∘b = (ab + ba)/2`,
/// with basis `E_ij = (e_ii + e_jj - e_ij - e_ji)/2` for `i < j`.
#[derive(Debug, Clone)]
pub struct ZeroSumJordan {
    n: usize,
    matrices: Vec<Vec<FieldElement>>,
    algebra: Algebra,
}

impl ZeroSumJordan {
    pub fn build(n: usize, field: &Field) -> Result<Self, AutosError> {
        let ch = field.characteristic();
        if ch != 0 && (2 * n as u64).is_multiple_of(ch) {
            return Err(AutosError::BadCharacteristic(ch));
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let half = field.ratio(1, 2)?;
        let matrices: Vec<Vec<FieldElement>> = pairs
            .iter()
            .map(|&(i, j)| {
                let mut m = vec![field.zero(); n * n];
                m[i * n + i] = half.clone();
                m[j * n + j] = half.clone();
                m[i * n + j] = -&half;
                m[j * n + i] = -&half;
                m
            })
            .collect();
        let names = pairs
            .iter()
            .map(|&(i, j)| format!("E{}{}", i + 1, j + 1))
            .collect();
        let mut algebra = Algebra::new(field, names);
        let zs = ZeroSumJordan {
            n,
            matrices,
            algebra: algebra.clone(),
        };
        for p in 0..pairs.len() {
            for q in p..pairs.len() {
                let prod = zs.jordan(&zs.matrices[p], &zs.matrices[q]);
                // coefficient of E_ij is -2 M_ij
                let coeffs: Vec<(usize, FieldElement)> = pairs
                    .iter()
                    .enumerate()
                    .map(|(k, &(i, j))| {
                        let v = &prod[i * n + j];
                        (k, -(v + v))
                    })
                    .collect();
                let recon = zs.combine(&coeffs);
                if recon != prod {
                    return Err(AutosError::NotClosed(
                        algebra.name(p).to_string(),
                        algebra.name(q).to_string(),
                    ));
                }
                algebra.set_product(p, q, coeffs, true);
            }
        }
        Ok(ZeroSumJordan { algebra, ..zs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn matrices(&self) -> &[Vec<FieldElement>] {
        &self.matrices
    }

    fn matmul(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        let n = self.n;
        let f = a[0].field();
        let mut out = vec![f.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = &a[i * n + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = &out[i * n + j] + &(x * &b[k * n + j]);
                }
            }
        }
        out
    }

    /// `(ab + ba)/2`.
    pub fn jordan(&self, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
        let ab = self.matmul(a, b);
        let ba = self.matmul(b, a);
        let half = a[0].field().ratio(1, 2).expect("char != 2");
        ab.iter().zip(&ba).map(|(x, y)| &(x + y) * &half).collect()
    }

    fn combine(&self, coeffs: &[(usize, FieldElement)]) -> Vec<FieldElement> {
        let f = self.algebra.field();
        let mut out = vec![f.zero(); self.n * self.n];
        for (k, c) in coeffs {
            for (o, v) in out.iter_mut().zip(&self.matrices[*k]) {
                *o = &*o + &(c * v);
            }
        }
        out
    }

    /// Rank of the basis matrices as vectors.
    pub fn basis_rank(&self) -> usize {
        rank_of(self.algebra.field(), &self.matrices, self.n * self.n)
    }
}

/// `(ij) -> E_ij` from `M_{1/2}(S_n)` to `ZS_n`, verified bijective and multiplicative.
pub fn symmetric_model_iso(n: usize, field: &Field) -> Result<(MatsuoAlgebra, ZeroSumJordan, LinearEndo), AutosError> {
    let zs = ZeroSumJordan::build(n, field)?;
    let m = MatsuoAlgebra::half(
        TranspoGroup::symmetric(n).map_err(|_| AutosError::NotBijective)?,
        field,
    )?;
    if zs.basis_rank() != m.dim() {
        return Err(AutosError::NotBijective);
    }
    let map = LinearEndo::identity(field, m.dim());
    if let Some((i, j)) = homomorphism_defect(m.algebra(), zs.algebra(), &map) {
        return Err(AutosError::NotMultiplicative(
            m.algebra().name(i).to_string(),
            m.algebra().name(j).to_string(),
        ));
    }
    Ok((m, zs, map))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterReport {
    pub eigenvectors_ok: bool,
    pub inverse_ok: bool,
    pub additivity_ok: bool,
    pub products_ok: bool,
    pub checked_pairs: usize,
}

impl CharacterReport {
    pub fn passed(&self) -> bool {
        self.eigenvectors_ok && self.inverse_ok && self.additivity_ok && self.products_ok
    }
}

/// With `e = x + i y`, `f = x - i y`: `t(e) = λ e`, `t(f) = λ^-1 f`, and
/// `λ_α λ_β = λ_{α+β}`, `e_α e_β ∈ k e_{α+β}` whenever `α + β` is a root.
pub fn character_additivity_check(b: &ModelB, samples: &[TorusParam]) -> Result<CharacterReport, AutosError> {
    let f = b.field();
    let i = f
        .sqrt(&f.from_i64(-1))
        .ok_or_else(|| AutosError::NoSqrtMinus1(f.to_string()))?;
    let rs = b.root_system();
    let m = rs.num_positive();
    let n = b.dim();
    let vec_e = |r: usize, sign: i64| {
        let mut v = vec![f.zero(); n];
        v[slot(r, Slot::X)] = f.one();
        v[slot(r, Slot::Y)] = if sign > 0 { i.clone() } else { -&i };
        v
    };
    let mut report = CharacterReport {
        eigenvectors_ok: true,
        inverse_ok: true,
        additivity_ok: true,
        products_ok: true,
        checked_pairs: 0,
    };
    let eigenvalue = |g: &LinearEndo, v: &[FieldElement], r: usize| -> Option<FieldElement> {
        let w = g.apply(v);
        let lambda = &w[slot(r, Slot::X)] / &v[slot(r, Slot::X)];
        let ok = w.iter().zip(v).all(|(a, b)| *a == &lambda * b);
        ok.then_some(lambda)
    };
    for t in samples {
        let g = torus_automorphism(b, t)?;
        let mut lambdas = Vec::with_capacity(m);
        for r in 0..m {
            let le = eigenvalue(&g, &vec_e(r, 1), r);
            let lf = eigenvalue(&g, &vec_e(r, -1), r);
            match (le, lf) {
                (Some(le), Some(lf)) => {
                    if !(&le * &lf).is_one() {
                        report.inverse_ok = false;
                    }
                    lambdas.push(le);
                }
                _ => {
                    report.eigenvectors_ok = false;
                    return Ok(report);
                }
            }
        }
        for g_root in 0..m {
            for (a, c) in rs.decompositions(g_root) {
                report.checked_pairs += 1;
                if &lambdas[a] * &lambdas[c] != lambdas[g_root] {
                    report.additivity_ok = false;
                }
            }
        }
    }
    for g_root in 0..m {
        for (a, c) in rs.decompositions(g_root) {
            let p = b.algebra().mul_coords(&vec_e(a, 1), &vec_e(c, 1));
            let target = vec_e(g_root, 1);
            let mu = &p[slot(g_root, Slot::X)];
            if mu.is_zero() || p.iter().zip(&target).any(|(x, y)| *x != mu * y) {
                report.products_ok = false;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f13() -> Field {
        Field::prime(13).unwrap()
    }

    #[test]
    fn model_b_basics() {
        let rs = RootSystem::parse("A3").unwrap();
        let f = f13();
        let b = ModelB::build(&rs, &f).unwrap();
        assert_eq!(b.dim(), 18);
        assert_eq!(b.sqrt3(), &f.from_i64(4));
        assert_eq!(b.bilinear_form(0, Slot::X, Slot::X), f.ratio(9, 2).unwrap());
        assert!(b.bilinear_form(0, Slot::X, Slot::Y).is_zero());
        assert!(b.algebra().is_commutative());
    }

    #[test]
    fn theta_order_six() {
        let rs = RootSystem::parse("A2").unwrap();
        let b = ModelB::build(&rs, &f13()).unwrap();
        let t = b.theta();
        let t3 = t.compose(&t).compose(&t);
        let id = LinearEndo::identity(b.field(), b.dim());
        assert_eq!(t3.compose(&t3), id);
        for r in 0..3 {
            assert!(t3.entry(slot(r, Slot::X), slot(r, Slot::X)) == &b.field().from_i64(-1));
            assert!(t3.entry(slot(r, Slot::One), slot(r, Slot::One)).is_one());
        }
    }

    #[test]
    fn model_b_rejects_missing_sqrt3() {
        let rs = RootSystem::parse("A2").unwrap();
        assert!(matches!(ModelB::build(&rs, &Field::rationals()), Err(AutosError::NoSqrt3(_))));
        assert!(matches!(
            ModelB::build(&rs, &Field::prime(3).unwrap()),
            Err(AutosError::BadCharacteristic(3))
        ));
    }

    #[test]
    fn iso_a2_f13() {
        let rs = RootSystem::parse("A2").unwrap();
        let iso = model_b_iso(&rs, &f13()).unwrap();
        let m = iso.matsuo.algebra();
        let img = iso.map.column(slot(0, Slot::One)).to_vec();
        assert_eq!(m.mul_coords(&img, &img), img);
    }

    #[test]
    fn torus_identity_and_circle() {
        let rs = RootSystem::parse("A2").unwrap();
        let f = f13();
        let b = ModelB::build(&rs, &f).unwrap();
        let id = torus_automorphism(&b, &TorusParam::identity(&f, 2)).unwrap();
        assert_eq!(id, LinearEndo::identity(&f, b.dim()));
        let bad = TorusParam {
            params: vec![(f.from_i64(2), f.zero()), (f.one(), f.zero())],
        };
        assert!(matches!(
            torus_automorphism(&b, &bad),
            Err(AutosError::CircleRelationViolated { index: 0 })
        ));
    }

    #[test]
    fn torus_generators_are_independent_derivations() {
        let rs = RootSystem::parse("A3").unwrap();
        let f = f13();
        let b = ModelB::build(&rs, &f).unwrap();
        let gens = torus_generators(&b);
        for d in &gens {
            assert!(crate::deriv::leibniz_residual(b.algebra(), d).unwrap().is_zero());
        }
        let vecs: Vec<_> = gens.iter().map(|d| d.to_unknowns().to_vec()).collect();
        assert_eq!(rank_of(&f, &vecs, b.dim() * b.dim()), 3);
    }

    #[test]
    fn rotation_by_three_fifths() {
        let f = Field::parse("Q(sqrt:3)").unwrap();
        let rs = RootSystem::parse("A2").unwrap();
        let b = ModelB::build(&rs, &f).unwrap();
        let t = TorusParam::new(vec![
            (f.ratio(3, 5).unwrap(), f.ratio(4, 5).unwrap()),
            (f.one(), f.zero()),
        ])
        .unwrap();
        let g = torus_automorphism(&b, &t).unwrap();
        assert_eq!(homomorphism_defect(b.algebra(), b.algebra(), &g), None);
    }

    #[test]
    fn diagram_flip_a3() {
        let f = Field::rationals();
        let m = MatsuoAlgebra::half(TranspoGroup::parse("3W:A3").unwrap(), &f).unwrap();
        let g = root_automorphism(&m, &RootMap::Diagram(vec![2, 1, 0])).unwrap();
        assert_ne!(g, LinearEndo::identity(&f, 18));
        let id = root_automorphism(&m, &RootMap::Diagram(vec![0, 1, 2])).unwrap();
        assert_eq!(id, LinearEndo::identity(&f, 18));
        assert!(matches!(
            root_automorphism(&m, &RootMap::Diagram(vec![1, 0, 2])),
            Err(AutosError::NotRootAutomorphism(_))
        ));
    }

    #[test]
    fn zero_sum_model() {
        let f = Field::rationals();
        let (_, zs, _) = symmetric_model_iso(4, &f).unwrap();
        assert_eq!(zs.algebra().dim(), 6);
        let e = &zs.matrices()[0];
        assert_eq!(&zs.jordan(e, e), e);
        assert!(matches!(
            ZeroSumJordan::build(5, &Field::prime(5).unwrap()),
            Err(AutosError::BadCharacteristic(5))
        ));
    }

    #[test]
    fn pythagorean_points() {
        let f = Field::rationals();
        let (c, s) = pythagorean(&f, &f.ratio(1, 2).unwrap()).unwrap();
        assert_eq!((c.clone(), s.clone()), (f.ratio(3, 5).unwrap(), f.ratio(4, 5).unwrap()));
        let f13 = f13();
        // 1 + 5^2 = 26 = 0 mod 13
        assert!(pythagorean(&f13, &f13.from_i64(5)).is_none());
    }
}
