//! Derivation algebras as nullspaces of linear systems in the unknowns
//! `d(a)_b`, the coefficient of `b` in `d(a)`.
//!
//! Two systems are available: the Leibniz rule written out in coordinates,
//! valid for any algebra, and the relations R1-R7 on Matsuo algebras with
//! `eta = 1/2`. Unknown `d(a)_b` has index `a * n + b`.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, LinearEndo};
use crate::field::{Field, FieldElement};
use crate::fischer::{LineClass, NearSolidVerdict};
use crate::linalg::{rank_of, same_span, SparseSystem};
use crate::matsuo::MatsuoAlgebra;
use crate::transpo::CentralType;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivError {
    #[error("the relation system requires eta = 1/2, got {0}")]
    BadEta(String),
    #[error("dimension mismatch: algebra has dimension {expected}, map has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[inline]
pub fn unknown(n: usize, a: usize, b: usize) -> usize {
    a * n + b
}

/// Which relation families to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationSet {
    pub r7: bool,
}

impl Default for RelationSet {
    fn default() -> Self {
        RelationSet { r7: true }
    }
}

/// Coordinates of `d(e_i e_j) - d(e_i) e_j - e_i d(e_j)`, one row per
/// unordered pair `i <= j` and output coordinate.
pub fn build_leibniz_system(alg: &Algebra) -> SparseSystem {
    let n = alg.dim();
    let field = alg.field();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let blocks: Vec<Vec<Vec<(usize, FieldElement)>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut rows: Vec<Vec<(usize, FieldElement)>> = vec![Vec::new(); n];
            for (m, c) in alg.product(i, j) {
                for (k, row) in rows.iter_mut().enumerate() {
                    row.push((unknown(n, *m as usize, k), c.clone()));
                }
            }
            for m in 0..n {
                for (k, c) in alg.product(m, j) {
                    rows[*k as usize].push((unknown(n, i, m), -c));
                }
                for (k, c) in alg.product(i, m) {
                    rows[*k as usize].push((unknown(n, j, m), -c));
                }
            }
            rows
        })
        .collect();
    let mut sys = SparseSystem::new(field, n * n);
    for rows in blocks {
        for row in rows {
            sys.push(row);
        }
    }
    sys
}

/// Relations R1-R7 for a Matsuo algebra with `eta = 1/2`.
pub fn build_r_system(m: &MatsuoAlgebra) -> Result<SparseSystem, DerivError> {
    build_r_system_with(m, RelationSet::default())
}

pub fn build_r_system_with(m: &MatsuoAlgebra, set: RelationSet) -> Result<SparseSystem, DerivError> {
    let field = m.field();
    let half = field.ratio(1, 2).expect("char != 2");
    if m.eta() != &half {
        return Err(DerivError::BadEta(m.eta().to_string()));
    }
    let g = m.group();
    let n = g.len();
    let u = |a: usize, b: usize| unknown(n, a, b);
    let one = field.one();
    let neg = -&one;
    let two = field.from_i64(2);
    let blocks: Vec<Vec<Vec<(usize, FieldElement)>>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut out: Vec<Vec<(usize, FieldElement)>> = Vec::new();
            // R1
            out.push(vec![(u(a, a), one.clone())]);
            for b in 0..n {
                if g.collinear(a, b) {
                    // R2
                    out.push(vec![(u(a, b), one.clone()), (u(a, g.conj(b, a)), one.clone())]);
                } else if g.orthogonal(a, b) {
                    // R3
                    out.push(vec![(u(a, b), one.clone())]);
                    // R4
                    for c in 0..n {
                        if g.collinear(a, c) && g.collinear(b, c) {
                            let cab = g.conj(g.conj(c, a), b);
                            out.push(vec![
                                (u(a, c), one.clone()),
                                (u(b, c), one.clone()),
                                (u(a, cab), one.clone()),
                                (u(b, cab), one.clone()),
                            ]);
                        }
                    }
                }
                if !g.collinear(a, b) {
                    continue;
                }
                let ab = g.conj(a, b);
                for e in 0..n {
                    if g.collinear(a, e) && g.orthogonal(b, e) {
                        // R5
                        out.push(vec![
                            (u(ab, e), one.clone()),
                            (u(a, e), neg.clone()),
                            (u(b, g.conj(e, a)), neg.clone()),
                        ]);
                    } else if g.collinear(e, a) && g.collinear(e, b) && g.collinear(e, ab) {
                        // R6
                        out.push(vec![
                            (u(ab, e), one.clone()),
                            (u(a, g.conj(e, b)), neg.clone()),
                            (u(b, g.conj(e, a)), neg.clone()),
                        ]);
                    }
                }
                if set.r7 {
                    let mut row = vec![(u(b, a), two.clone()), (u(a, b), one.clone()), (u(ab, a), one.clone())];
                    for e in 0..n {
                        if g.orthogonal(a, e) && g.collinear(b, e) {
                            row.push((u(b, e), neg.clone()));
                        }
                    }
                    out.push(row);
                }
            }
            out
        })
        .collect();
    let mut sys = SparseSystem::new(field, n * n);
    for rows in blocks {
        for row in rows {
            sys.push(row);
        }
    }
    Ok(sys)
}

/// A basis of a space of linear maps (derivations).
#[derive(Debug, Clone)]
pub struct DerBasis {
    field: Field,
    n: usize,
    maps: Vec<LinearEndo>,
}

impl DerBasis {
    pub fn from_system(sys: &SparseSystem, n: usize) -> Self {
        assert_eq!(sys.unknowns(), n * n);
        let maps = sys
            .nullspace()
            .into_iter()
            .map(|v| LinearEndo::from_unknowns(sys.field(), n, v))
            .collect();
        DerBasis {
            field: sys.field().clone(),
            n,
            maps,
        }
    }

    pub fn dim(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[LinearEndo] {
        &self.maps
    }

    pub fn vectors(&self) -> Vec<Vec<FieldElement>> {
        self.maps.iter().map(|d| d.to_unknowns().to_vec()).collect()
    }

    /// Same span as `other`.
    pub fn same_span(&self, other: &DerBasis) -> bool {
        self.n == other.n && same_span(&self.field, &self.vectors(), &other.vectors(), self.n * self.n)
    }

    /// Linear combination with the given coefficients.
    pub fn combine(&self, coeffs: &[FieldElement]) -> LinearEndo {
        let mut acc = LinearEndo::zero(&self.field, self.n, self.n);
        for (d, c) in self.maps.iter().zip(coeffs) {
            acc = acc.add(&d.scale(c));
        }
        acc
    }
}

/// Derivations via the Leibniz system.
pub fn derivations(alg: &Algebra) -> DerBasis {
    DerBasis::from_system(&build_leibniz_system(alg), alg.dim())
}

/// Derivations via R1-R7.
pub fn derivations_r(m: &MatsuoAlgebra) -> Result<DerBasis, DerivError> {
    Ok(DerBasis::from_system(&build_r_system(m)?, m.dim()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    /// Basis pairs `(i, j)`, `i <= j`, with nonzero residual.
    pub nonzero_pairs: usize,
    pub first: Option<(usize, usize)>,
}

impl ResidualReport {
    pub fn is_zero(&self) -> bool {
        self.nonzero_pairs == 0
    }
}

/// `d(e_i e_j) - d(e_i) e_j - e_i d(e_j)` over all basis pairs.
pub fn leibniz_residual(alg: &Algebra, d: &LinearEndo) -> Result<ResidualReport, DerivError> {
    let n = alg.dim();
    if d.rows() != n || d.cols() != n {
        return Err(DerivError::DimensionMismatch {
            expected: n,
            got: d.rows(),
        });
    }
    let field = alg.field();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let bad: Vec<(usize, usize)> = pairs
        .into_par_iter()
        .filter(|&(i, j)| {
            let mut prod = vec![field.zero(); n];
            for (k, c) in alg.product(i, j) {
                prod[*k as usize] = c.clone();
            }
            let lhs = d.apply(&prod);
            let ei = crate::algebra::unit(field, n, i);
            let ej = crate::algebra::unit(field, n, j);
            let r1 = alg.mul_coords(d.column(i), &ej);
            let r2 = alg.mul_coords(&ei, d.column(j));
            lhs.iter()
                .zip(r1.iter().zip(&r2))
                .any(|(l, (x, y))| !(&(l - x) - y).is_zero())
        })
        .collect();
    Ok(ResidualReport {
        nonzero_pairs: bad.len(),
        first: bad.first().copied(),
    })
}

/// `d e - e d`.
pub fn commutator(d: &LinearEndo, e: &LinearEndo) -> LinearEndo {
    d.compose(e).sub(&e.compose(d))
}

/// Ranks of the relation system with and without R7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct R7Measurement {
    pub rank_with: usize,
    pub rank_without: usize,
}

impl R7Measurement {
    pub fn redundant(&self) -> bool {
        self.rank_with == self.rank_without
    }
}

pub fn measure_r7(m: &MatsuoAlgebra) -> Result<R7Measurement, DerivError> {
    let with = build_r_system_with(m, RelationSet { r7: true })?.rank();
    let without = build_r_system_with(m, RelationSet { r7: false })?.rank();
    Ok(R7Measurement {
        rank_with: with,
        rank_without: without,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishEntry {
    pub a: usize,
    pub b: usize,
    pub line: usize,
    /// `d(a)_b = 0` for every derivation.
    pub forced_zero: bool,
    pub near_solid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub entries: Vec<VanishEntry>,
}

impl VanishingReport {
    /// Nonzero coefficients occur only on near-solid lines.
    pub fn consistent_with_near_solid(&self) -> bool {
        self.entries.iter().all(|e| e.forced_zero || e.near_solid)
    }

    pub fn nonzero_lines(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .entries
            .iter()
            .filter(|e| !e.forced_zero)
            .map(|e| e.line)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// For each ordered collinear pair, whether `d(a)_b` vanishes on the whole
/// basis, alongside the near-solid verdict of the line through `a` and `b`.
pub fn vanishing_report(m: &MatsuoAlgebra, basis: &DerBasis, near_solid: &[NearSolidVerdict]) -> VanishingReport {
    let fs = m.space();
    let g = m.group();
    let n = g.len();
    let mut entries = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if !g.collinear(a, b) {
                continue;
            }
            let line = fs.line_through(a, b).expect("collinear");
            entries.push(VanishEntry {
                a,
                b,
                line,
                forced_zero: basis.maps().iter().all(|d| d.entry(b, a).is_zero()),
                near_solid: near_solid[line].near_solid,
            });
        }
    }
    VanishingReport { entries }
}

/// On `3^n:W` algebras: whether `d(a)_{b1} + d(a)_{b2} + d(a)_{b3} = 0` for
/// every vertical line `{b1, b2, b3}` and every `a` off it that is collinear
/// with one of its points.
pub fn vertical_sums_vanish(m: &MatsuoAlgebra, basis: &DerBasis) -> Option<bool> {
    let fs = m.space();
    if !matches!(m.group().label(), CentralType::AffineWeyl(..)) {
        return None;
    }
    let g = m.group();
    let field = m.field();
    let verticals: Vec<_> = fs
        .lines()
        .iter()
        .filter(|l| fs.line_orbit_class(l) == Ok(LineClass::Vertical))
        .collect();
    for l in verticals {
        for a in 0..g.len() {
            if l.contains(&a) || !l.iter().any(|&b| g.collinear(a, b)) {
                continue;
            }
            for d in basis.maps() {
                let s = l.iter().fold(field.zero(), |acc, &b| &acc + d.entry(b, a));
                if !s.is_zero() {
                    return Some(false);
                }
            }
        }
    }
    Some(true)
}

/// On `3^n:W` algebras: rank of `d -> (d((0,alpha))_{(alpha)})_{alpha simple}`
/// restricted to the basis.
pub fn simple_root_evaluation_rank(m: &MatsuoAlgebra, basis: &DerBasis) -> Option<usize> {
    let g = m.group();
    let rs = g.root_system()?;
    if !matches!(g.label(), CentralType::AffineWeyl(..)) {
        return None;
    }
    let rows: Vec<Vec<FieldElement>> = basis
        .maps()
        .iter()
        .map(|d| {
            (0..rs.rank())
                .map(|i| {
                    let zero = g.affine_point(0, i).unwrap();
                    let plus = g.affine_point(1, i).unwrap();
                    d.entry(plus, zero).clone()
                })
                .collect()
        })
        .collect();
    Some(rank_of(m.field(), &rows, rs.rank()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transpo::TranspoGroup;

    fn alg(d: &str, f: &Field) -> MatsuoAlgebra {
        MatsuoAlgebra::half(TranspoGroup::parse(d).unwrap(), f).unwrap()
    }

    #[test]
    fn zero_and_identity_residuals() {
        let f = Field::rationals();
        let m = alg("S3", &f);
        let zero = LinearEndo::zero(&f, 3, 3);
        assert!(leibniz_residual(m.algebra(), &zero).unwrap().is_zero());
        let id = LinearEndo::identity(&f, 3);
        assert!(!leibniz_residual(m.algebra(), &id).unwrap().is_zero());
    }

    #[test]
    fn symmetric_dims() {
        let f = Field::rationals();
        for (d, want) in [("S3", 1), ("S4", 3)] {
            let m = alg(d, &f);
            let lb = derivations(m.algebra());
            let rb = derivations_r(&m).unwrap();
            assert_eq!(lb.dim(), want, "{d}");
            assert!(lb.same_span(&rb));
        }
    }

    #[test]
    fn r_system_needs_half() {
        let f = Field::rationals();
        let g = TranspoGroup::parse("S3").unwrap();
        let m = MatsuoAlgebra::of_group(g, &f.ratio(1, 3).unwrap(), &f).unwrap();
        assert!(matches!(build_r_system(&m), Err(DerivError::BadEta(_))));
        assert_eq!(derivations(m.algebra()).dim(), 0);
    }

    #[test]
    fn commutators_are_derivations() {
        let f = Field::rationals();
        let m = alg("S4", &f);
        let b = derivations(m.algebra());
        for d in b.maps() {
            for e in b.maps() {
                assert!(leibniz_residual(m.algebra(), &commutator(d, e)).unwrap().is_zero());
            }
        }
    }
}
