//! Exact sparse linear algebra: constraint systems and their nullspaces.
//!
//! Elimination is Markowitz style: the sparsest active row is taken next and
//! its pivot is the column touching the fewest active rows. Pivot rows are
//! normalized and kept, and the nullspace is recovered by back-substitution
//! in reverse pivot order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::field::{Field, FieldElement};

pub type SparseRow = Vec<(u32, FieldElement)>;

/// Homogeneous linear constraints over a fixed number of unknowns.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    field: Field,
    unknowns: usize,
    rows: Vec<SparseRow>,
}

impl SparseSystem {
    pub fn new(field: &Field, unknowns: usize) -> Self {
        SparseSystem {
            field: field.clone(),
            unknowns,
            rows: Vec::new(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds a constraint; repeated unknowns are summed and zeros dropped.
    /// Rows that cancel completely are not stored.
    pub fn push(&mut self, terms: impl IntoIterator<Item = (usize, FieldElement)>) {
        let row = normalize_terms(terms, self.unknowns);
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn push_row(&mut self, row: SparseRow) {
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn extend(&mut self, other: SparseSystem) {
        assert_eq!(self.unknowns, other.unknowns, "unknown count mismatch");
        self.rows.extend(other.rows);
    }

    /// Indices of the rows not satisfied by `x`.
    pub fn violated_rows(&self, x: &[FieldElement]) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| !eval_row(row, x, &self.field).is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_satisfied_by(&self, x: &[FieldElement]) -> bool {
        self.rows
            .iter()
            .all(|row| eval_row(row, x, &self.field).is_zero())
    }

    pub fn rank(&self) -> usize {
        Eliminator::run(self).pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.unknowns - self.rank()
    }

    /// Basis of the solution space; vector `k` has a 1 at the `k`-th free
    /// unknown and 0 at the others.
    pub fn nullspace(&self) -> Vec<Vec<FieldElement>> {
        Eliminator::run(self).nullspace(&self.field, self.unknowns)
    }
}

pub(crate) fn normalize_terms(
    terms: impl IntoIterator<Item = (usize, FieldElement)>,
    unknowns: usize,
) -> SparseRow {
    let mut v: Vec<(u32, FieldElement)> = terms
        .into_iter()
        .map(|(i, c)| {
            assert!(i < unknowns, "unknown {i} out of range {unknowns}");
            (i as u32, c)
        })
        .collect();
    v.sort_by_key(|t| t.0);
    let mut out: SparseRow = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = &*acc + &c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

fn eval_row(row: &SparseRow, x: &[FieldElement], field: &Field) -> FieldElement {
    let mut acc = field.zero();
    for (j, c) in row {
        let xj = &x[*j as usize];
        if !xj.is_zero() {
            acc = &acc + &(c * xj);
        }
    }
    acc
}

fn coeff_of(row: &SparseRow, col: u32) -> Option<&FieldElement> {
    row.binary_search_by_key(&col, |t| t.0).ok().map(|i| &row[i].1)
}

/// `r - f * p` for sorted sparse rows.
fn axpy(r: &SparseRow, f: &FieldElement, p: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        if j == p.len() || (i < r.len() && r[i].0 < p[j].0) {
            out.push(r[i].clone());
            i += 1;
        } else if i == r.len() || p[j].0 < r[i].0 {
            out.push((p[j].0, -(f * &p[j].1)));
            j += 1;
        } else {
            let v = &r[i].1 - &(f * &p[j].1);
            if !v.is_zero() {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

struct Eliminator {
    /// `(pivot column, normalized pivot row)` in elimination order.
    pivots: Vec<(u32, SparseRow)>,
}

impl Eliminator {
    fn run(sys: &SparseSystem) -> Self {
        let n = sys.unknowns;
        let mut rows: Vec<SparseRow> = sys.rows.clone();
        let mut active = vec![true; rows.len()];
        let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut col_count = vec![0u32; n];
        let mut heap = BinaryHeap::new();
        for (r, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_rows[*c as usize].push(r as u32);
                col_count[*c as usize] += 1;
            }
            heap.push(Reverse((row.len(), r)));
        }
        let mut pivots = Vec::new();
        while let Some(Reverse((len, r))) = heap.pop() {
            if !active[r] || rows[r].len() != len {
                continue;
            }
            active[r] = false;
            if len == 0 {
                continue;
            }
            let row = std::mem::take(&mut rows[r]);
            for (c, _) in &row {
                col_count[*c as usize] -= 1;
            }
            let (pc, pv) = row
                .iter()
                .min_by_key(|(c, _)| (col_count[*c as usize], *c))
                .map(|(c, v)| (*c, v.clone()))
                .expect("nonempty row");
            let inv = pv.inv().expect("nonzero pivot");
            let prow: SparseRow = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();

            let targets = std::mem::take(&mut col_rows[pc as usize]);
            for t in targets {
                let t = t as usize;
                if !active[t] {
                    continue;
                }
                let Some(f) = coeff_of(&rows[t], pc).cloned() else {
                    continue;
                };
                let old = std::mem::take(&mut rows[t]);
                let new = axpy(&old, &f, &prow);
                // update column bookkeeping by diffing supports
                let (mut i, mut j) = (0, 0);
                while i < old.len() || j < new.len() {
                    if j == new.len() || (i < old.len() && old[i].0 < new[j].0) {
                        col_count[old[i].0 as usize] -= 1;
                        i += 1;
                    } else if i == old.len() || new[j].0 < old[i].0 {
                        let c = new[j].0 as usize;
                        col_count[c] += 1;
                        col_rows[c].push(t as u32);
                        j += 1;
                    } else {
                        i += 1;
                        j += 1;
                    }
                }
                heap.push(Reverse((new.len(), t)));
                rows[t] = new;
            }
            pivots.push((pc, prow));
        }
        Eliminator { pivots }
    }

    fn nullspace(&self, field: &Field, n: usize) -> Vec<Vec<FieldElement>> {
        let mut is_pivot = vec![false; n];
        for (c, _) in &self.pivots {
            is_pivot[*c as usize] = true;
        }
        let zero = field.zero();
        (0..n)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = vec![zero.clone(); n];
                x[f] = field.one();
                for (pc, row) in self.pivots.iter().rev() {
                    let mut s = zero.clone();
                    for (j, v) in row {
                        if *j != *pc && !x[*j as usize].is_zero() {
                            s = &s + &(v * &x[*j as usize]);
                        }
                    }
                    x[*pc as usize] = -s;
                }
                x
            })
            .collect()
    }
}

/// Kernel of a dense matrix given by rows.
pub fn kernel(field: &Field, matrix: &[Vec<FieldElement>], cols: usize) -> Vec<Vec<FieldElement>> {
    let mut sys = SparseSystem::new(field, cols);
    for row in matrix {
        sys.push(row.iter().cloned().enumerate());
    }
    sys.nullspace()
}

/// Rank of a list of vectors.
pub fn rank_of(field: &Field, vectors: &[Vec<FieldElement>], len: usize) -> usize {
    let mut sys = SparseSystem::new(field, len);
    for v in vectors {
        sys.push(v.iter().cloned().enumerate());
    }
    sys.rank()
}

/// Whether two families of vectors span the same subspace.
pub fn same_span(field: &Field, a: &[Vec<FieldElement>], b: &[Vec<FieldElement>], len: usize) -> bool {
    let ra = rank_of(field, a, len);
    let rb = rank_of(field, b, len);
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    ra == rb && rank_of(field, &both, len) == ra
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> FieldElement {
        Field::rationals().from_i64(n)
    }

    #[test]
    fn trivial_systems() {
        let f = Field::rationals();
        let empty = SparseSystem::new(&f, 5);
        assert_eq!(empty.nullspace().len(), 5);
        let mut id = SparseSystem::new(&f, 4);
        for i in 0..4 {
            id.push([(i, q(1))]);
        }
        assert!(id.nullspace().is_empty());
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let f = Field::rationals();
        let mut s = SparseSystem::new(&f, 3);
        s.push([(0, q(1)), (0, q(-1))]);
        assert!(s.is_empty());
    }

    #[test]
    fn small_kernel() {
        let f = Field::rationals();
        // x + y + z = 0, x - z = 0
        let m = vec![vec![q(1), q(1), q(1)], vec![q(1), q(0), q(-1)]];
        let k = kernel(&f, &m, 3);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(&v[0], &v[2]);
        assert_eq!(&v[1], &(-(&v[0] + &v[0])));
    }

    #[test]
    fn finite_field_rank() {
        let f = Field::prime(7).unwrap();
        let m = vec![
            vec![f.from_i64(1), f.from_i64(2)],
            vec![f.from_i64(3), f.from_i64(6)],
        ];
        assert_eq!(rank_of(&f, &m, 2), 1);
        assert!(same_span(&f, &m[..1], &m[1..], 2));
    }
}
