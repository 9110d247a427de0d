//! Finite-dimensional algebras given by structure constants, their elements,
//! and linear self-maps.

use std::ops::{Add, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::field::{Field, FieldElement};
use crate::linalg::{normalize_terms, SparseRow};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis index {0} out of range")]
    OutOfRange(usize),
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// Structure constants `e_i e_j = sum_k c_ij^k e_k`, stored sparsely.
#[derive(Debug, Clone)]
pub struct Algebra {
    id: u64,
    field: Field,
    names: Vec<String>,
    table: Vec<SparseRow>,
}

impl Algebra {
    /// The algebra with all products zero.
    pub fn new(field: &Field, names: Vec<String>) -> Self {
        let n = names.len();
        Algebra {
            id: fresh_id(),
            field: field.clone(),
            names,
            table: vec![Vec::new(); n * n],
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Sets `e_i e_j`; pass `symmetric` to also set `e_j e_i`.
    pub fn set_product(
        &mut self,
        i: usize,
        j: usize,
        terms: impl IntoIterator<Item = (usize, FieldElement)>,
        symmetric: bool,
    ) {
        let n = self.dim();
        let row = normalize_terms(terms, n);
        if symmetric {
            self.table[j * n + i] = row.clone();
        }
        self.table[i * n + j] = row;
        self.id = fresh_id();
    }

    /// Adds `terms` to `e_i e_j` (and `e_j e_i` if `i != j`).
    pub fn add_product(&mut self, i: usize, j: usize, terms: &[(usize, FieldElement)]) {
        let n = self.dim();
        let mut targets = vec![(i, j)];
        if i != j {
            targets.push((j, i));
        }
        for (x, y) in targets {
            let existing = self.table[x * n + y]
                .iter()
                .map(|(k, c)| (*k as usize, c.clone()))
                .chain(terms.iter().cloned());
            self.table[x * n + y] = normalize_terms(existing, n);
        }
        self.id = fresh_id();
    }

    /// `e_i e_j` as sparse `(k, c)` pairs.
    pub fn product(&self, i: usize, j: usize) -> &[(u32, FieldElement)] {
        &self.table[i * self.dim() + j]
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| self.product(i, j) == self.product(j, i)))
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            algebra: self.id,
            coords: vec![self.field.zero(); self.dim()],
        }
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        let mut z = self.zero();
        z.coords[i] = self.field.one();
        z
    }

    pub fn element(&self, coords: Vec<FieldElement>) -> Result<AlgebraElement, AlgebraError> {
        if coords.len() != self.dim() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim(),
                got: coords.len(),
            });
        }
        Ok(AlgebraElement {
            algebra: self.id,
            coords,
        })
    }

    /// Bilinear product of coordinate vectors.
    pub fn mul_coords(&self, x: &[FieldElement], y: &[FieldElement]) -> Vec<FieldElement> {
        let n = self.dim();
        let mut out = vec![self.field.zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let prod = self.product(i, j);
                if prod.is_empty() {
                    continue;
                }
                let s = xi * yj;
                for (k, c) in prod {
                    let k = *k as usize;
                    out[k] = &out[k] + &(&s * c);
                }
            }
        }
        out
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if x.algebra != self.id || y.algebra != self.id {
            return Err(AlgebraError::MixedAlgebras);
        }
        Ok(AlgebraElement {
            algebra: self.id,
            coords: self.mul_coords(&x.coords, &y.coords),
        })
    }

    /// Matrix of left multiplication by `x`, as rows.
    pub fn left_mult_matrix(&self, x: &[FieldElement]) -> Vec<Vec<FieldElement>> {
        let n = self.dim();
        let mut m = vec![vec![self.field.zero(); n]; n];
        for j in 0..n {
            let col = self.mul_coords(x, &unit(&self.field, n, j));
            for (k, v) in col.into_iter().enumerate() {
                m[k][j] = v;
            }
        }
        m
    }

    /// Whether `e_i e_i = e_i` for every basis vector.
    pub fn basis_idempotent(&self) -> bool {
        (0..self.dim()).all(|i| {
            let p = self.product(i, i);
            p.len() == 1 && p[0].0 as usize == i && p[0].1.is_one()
        })
    }
}

pub(crate) fn unit(field: &Field, n: usize, i: usize) -> Vec<FieldElement> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

/// A coordinate vector tagged with the algebra it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    algebra: u64,
    coords: Vec<FieldElement>,
}

impl AlgebraElement {
    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: &FieldElement) -> AlgebraElement {
        AlgebraElement {
            algebra: self.algebra,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn checked_add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        if self.algebra != other.algebra {
            return Err(AlgebraError::MixedAlgebras);
        }
        Ok(AlgebraElement {
            algebra: self.algebra,
            coords: add_vec(&self.coords, &other.coords),
        })
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        self.checked_add(rhs).expect("elements of the same algebra")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "elements of different algebras");
        AlgebraElement {
            algebra: self.algebra,
            coords: sub_vec(&self.coords, &rhs.coords),
        }
    }
}

pub(crate) fn add_vec(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub_vec(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn scale_vec(a: &[FieldElement], s: &FieldElement) -> Vec<FieldElement> {
    a.iter().map(|x| x * s).collect()
}

/// Linear map between coordinate spaces; `entry(b, a)` is the coefficient of
/// the `b`-th output basis vector in the image of the `a`-th input one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearEndo {
    field: Field,
    rows: usize,
    cols: usize,
    /// column-major: `data[a * rows + b]`
    data: Vec<FieldElement>,
}

impl LinearEndo {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> Self {
        LinearEndo {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// From the unknown vector ordered by `(argument, image)`.
    pub fn from_unknowns(field: &Field, n: usize, data: Vec<FieldElement>) -> Self {
        assert_eq!(data.len(), n * n);
        LinearEndo {
            field: field.clone(),
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn to_unknowns(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, b: usize, a: usize) -> &FieldElement {
        &self.data[a * self.rows + b]
    }

    pub fn set(&mut self, b: usize, a: usize, v: FieldElement) {
        self.data[a * self.rows + b] = v;
    }

    /// Image of the `a`-th basis vector.
    pub fn column(&self, a: usize) -> &[FieldElement] {
        &self.data[a * self.rows..(a + 1) * self.rows]
    }

    pub fn apply(&self, x: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = vec![self.field.zero(); self.rows];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, v) in self.column(a).iter().enumerate() {
                if !v.is_zero() {
                    out[b] = &out[b] + &(v * xa);
                }
            }
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearEndo) -> LinearEndo {
        assert_eq!(self.cols, other.rows);
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for a in 0..other.cols {
            data.extend(self.apply(other.column(a)));
        }
        LinearEndo {
            field: self.field.clone(),
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn sub(&self, other: &LinearEndo) -> LinearEndo {
        LinearEndo {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: sub_vec(&self.data, &other.data),
        }
    }

    pub fn add(&self, other: &LinearEndo) -> LinearEndo {
        LinearEndo {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: add_vec(&self.data, &other.data),
        }
    }

    pub fn scale(&self, s: &FieldElement) -> LinearEndo {
        LinearEndo {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: scale_vec(&self.data, s),
        }
    }

    /// Inverse of a square map, if it is invertible.
    pub fn inverse(&self) -> Option<LinearEndo> {
        let n = self.rows;
        if self.cols != n {
            return None;
        }
        let f = &self.field;
        // rows of [M | I]
        let mut m: Vec<Vec<FieldElement>> = (0..n)
            .map(|b| {
                let mut row: Vec<FieldElement> = (0..n).map(|a| self.entry(b, a).clone()).collect();
                row.extend(unit(f, n, b));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !m[r][c].is_zero())?;
            m.swap(c, p);
            let inv = m[c][c].inv().ok()?;
            m[c] = m[c].iter().map(|v| v * &inv).collect();
            let pivot = m[c].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != c && !row[c].is_zero() {
                    let factor = row[c].clone();
                    *row = row.iter().zip(&pivot).map(|(x, y)| x - &(&factor * y)).collect();
                }
            }
        }
        let mut out = LinearEndo::zero(f, n, n);
        for (b, row) in m.iter().enumerate() {
            for a in 0..n {
                out.set(b, a, row[n + a].clone());
            }
        }
        Some(out)
    }

    /// Columns as a list of vectors.
    pub fn columns(&self) -> Vec<Vec<FieldElement>> {
        (0..self.cols).map(|a| self.column(a).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn nonzero_entries(&self) -> Vec<(usize, usize, &FieldElement)> {
        let mut out = Vec::new();
        for a in 0..self.cols {
            for b in 0..self.rows {
                let v = self.entry(b, a);
                if !v.is_zero() {
                    out.push((a, b, v));
                }
            }
        }
        out
    }
}

/// First basis pair `(i, j)` with `g(e_i e_j) != g(e_i) g(e_j)`, if any.
pub fn homomorphism_defect(src: &Algebra, dst: &Algebra, g: &LinearEndo) -> Option<(usize, usize)> {
    let n = src.dim();
    let images = g.columns();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    pairs.into_par_iter().find_first(|&(i, j)| {
        let mut lhs = vec![src.field().zero(); n];
        for (k, c) in src.product(i, j) {
            lhs[*k as usize] = c.clone();
        }
        g.apply(&lhs) != dst.mul_coords(&images[i], &images[j])
    })
}
