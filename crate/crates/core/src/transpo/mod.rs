//! Finite 3-transposition groups, represented only through their class `D`
//! of transpositions and the conjugation action `b^a`.
//!
//! The group itself is never materialized. Four families are available:
//! symmetric groups, simply laced Weyl groups, the affine groups `3^n:W`
//! and the Moufang groups `3^n:2`. Disjoint unions model direct products.

mod roots;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

pub use roots::{Root, RootSystem, RootType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranspoError {
    #[error("unsupported root system type {0}")]
    UnsupportedType(String),
    #[error("symmetric group needs n >= 2, got {0}")]
    TooSmall(usize),
    #[error("invalid group descriptor '{input}' at column {column}: {message}")]
    BadDescriptor {
        input: String,
        column: usize,
        message: String,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Central-type tag of a catalog group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CentralType {
    Symmetric(usize),
    Weyl(RootType, usize),
    AffineWeyl(RootType, usize),
    Moufang(usize),
    Sum(Vec<CentralType>),
}

impl fmt::Display for CentralType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CentralType::Symmetric(n) => write!(f, "S{n}"),
            CentralType::Weyl(k, n) => write!(f, "W:{k}{n}"),
            CentralType::AffineWeyl(k, n) => write!(f, "3W:{k}{n}"),
            CentralType::Moufang(n) => write!(f, "M3:{n}"),
            CentralType::Sum(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// What a point of `D` stands for in its family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Payload {
    /// Transposition `(i j)`, zero-based, `i < j`.
    Pair(usize, usize),
    /// Reflection in a positive root (index into the root system).
    Root(usize),
    /// `(eps * alpha, sigma_alpha)` with `eps` in `{0, 1, 2}`.
    Affine { eps: u8, root: usize },
    /// Element of `F_3^n`.
    Vector(Vec<u8>),
    /// Point of the `k`-th summand of a disjoint union.
    Summand(usize, Box<Payload>),
}

#[derive(Debug, Clone)]
pub struct TranspoGroup {
    label: CentralType,
    points: Vec<Payload>,
    names: Vec<String>,
    /// `conj[a * n + b] = b^a`
    conj: Vec<u32>,
    roots: Option<Arc<RootSystem>>,
}

fn root_name(r: &[i64]) -> String {
    let inner: Vec<String> = r.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(","))
}

impl TranspoGroup {
    fn from_conj_fn(
        label: CentralType,
        points: Vec<Payload>,
        names: Vec<String>,
        roots: Option<Arc<RootSystem>>,
        conj: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let n = points.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = conj(b, a) as u32;
            }
        }
        TranspoGroup {
            label,
            points,
            names,
            conj: table,
            roots,
        }
    }

    /// Transpositions of `S_n`.
    pub fn symmetric(n: usize) -> Result<Self, TranspoError> {
        if n < 2 {
            return Err(TranspoError::TooSmall(n));
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let index = |i: usize, j: usize| {
            let (i, j) = if i < j { (i, j) } else { (j, i) };
            // position of (i, j) in lexicographic order
            i * n - i * (i + 1) / 2 + (j - i - 1)
        };
        let names = pairs
            .iter()
            .map(|&(i, j)| {
                if n <= 9 {
                    format!("({}{})", i + 1, j + 1)
                } else {
                    format!("({},{})", i + 1, j + 1)
                }
            })
            .collect();
        let points = pairs.iter().map(|&(i, j)| Payload::Pair(i, j)).collect();
        Ok(Self::from_conj_fn(
            CentralType::Symmetric(n),
            points,
            names,
            None,
            |b, a| {
                let (i, j) = pairs[a];
                let s = |x: usize| {
                    if x == i {
                        j
                    } else if x == j {
                        i
                    } else {
                        x
                    }
                };
                let (p, q) = pairs[b];
                index(s(p), s(q))
            },
        ))
    }

    /// Reflections of the Weyl group, identified with positive roots.
    pub fn weyl(rs: &RootSystem) -> Self {
        let rs = Arc::new(rs.clone());
        let m = rs.num_positive();
        let points = (0..m).map(Payload::Root).collect();
        let names = rs.positive_roots().iter().map(|r| root_name(r)).collect();
        let roots = rs.clone();
        Self::from_conj_fn(
            CentralType::Weyl(rs.kind(), rs.rank()),
            points,
            names,
            Some(rs.clone()),
            move |b, a| {
                let pr = roots.positive_roots();
                let img = roots.reflect(&pr[a], &pr[b]);
                roots.signed_index(&img).expect("reflection of a root is a root").0
            },
        )
    }

    /// The transpositions `(eps alpha, sigma_alpha)` of `3^n:W = (Z Phi / 3 Z Phi) : W`.
    ///
    /// Group law `(v, g)(w, h) = (v + g w, g h)`, so conjugating by the
    /// involution `(w, sigma_beta)` sends `(v, sigma_alpha)` to
    /// `(sigma_beta(v - w + sigma_alpha(w)), sigma_beta sigma_alpha sigma_beta)`.
    pub fn affine_weyl(rs: &RootSystem) -> Self {
        let rs = Arc::new(rs.clone());
        let m = rs.num_positive();
        let mut points = Vec::with_capacity(3 * m);
        let mut names = Vec::with_capacity(3 * m);
        for (r, root) in rs.positive_roots().iter().enumerate() {
            for eps in 0..3u8 {
                points.push(Payload::Affine { eps, root: r });
                let tag = ["0", "+", "-"][eps as usize];
                names.push(format!("{tag}:{}", root_name(root)));
            }
        }
        let roots = rs.clone();
        Self::from_conj_fn(
            CentralType::AffineWeyl(rs.kind(), rs.rank()),
            points,
            names,
            Some(rs.clone()),
            move |b, a| {
                let pr = roots.positive_roots();
                let (ea, ra) = ((a % 3) as i64, a / 3);
                let (eb, rb) = ((b % 3) as i64, b / 3);
                let alpha = &pr[rb];
                let beta = &pr[ra];
                let v: Root = alpha.iter().map(|x| eb * x).collect();
                let w: Root = beta.iter().map(|x| ea * x).collect();
                let sw = roots.reflect(alpha, &w);
                let t: Root = (0..v.len()).map(|i| v[i] - w[i] + sw[i]).collect();
                let nv = roots.reflect(beta, &t);
                let nr = roots.reflect(beta, alpha);
                let (ri, _) = roots.signed_index(&nr).expect("root");
                let target = &pr[ri];
                let eps = (0..3i64)
                    .find(|e| (0..nv.len()).all(|i| (e * target[i] - nv[i]).rem_euclid(3) == 0))
                    .expect("translation part is a multiple of the reflection root");
                3 * ri + eps as usize
            },
        )
    }

    /// `3^n:2`: points `F_3^n`, with `v^w = -v - w`.
    pub fn moufang(n: usize) -> Self {
        let size = 3usize.pow(n as u32);
        let vecs: Vec<Vec<u8>> = (0..size)
            .map(|mut k| {
                let mut v = vec![0u8; n];
                for slot in v.iter_mut().rev() {
                    *slot = (k % 3) as u8;
                    k /= 3;
                }
                v
            })
            .collect();
        let encode = |v: &[u8]| v.iter().fold(0usize, |acc, &x| acc * 3 + x as usize);
        let names = vecs
            .iter()
            .map(|v| {
                let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("({})", inner.join(","))
            })
            .collect();
        let points = vecs.iter().cloned().map(Payload::Vector).collect();
        Self::from_conj_fn(CentralType::Moufang(n), points, names, None, |b, a| {
            if a == b {
                return b;
            }
            let v: Vec<u8> = vecs[b]
                .iter()
                .zip(&vecs[a])
                .map(|(x, y)| (6 - x - y) % 3)
                .collect();
            encode(&v)
        })
    }

    /// Disjoint union: points of different summands commute.
    pub fn disjoint_union(parts: &[TranspoGroup]) -> Self {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total = 0;
        for p in parts {
            offsets.push(total);
            total += p.len();
        }
        let mut points = Vec::with_capacity(total);
        let mut names = Vec::with_capacity(total);
        let mut owner = Vec::with_capacity(total);
        for (k, p) in parts.iter().enumerate() {
            for (i, pt) in p.points.iter().enumerate() {
                points.push(Payload::Summand(k, Box::new(pt.clone())));
                names.push(format!("{k}.{}", p.names[i]));
                owner.push(k);
            }
        }
        let label = CentralType::Sum(parts.iter().map(|p| p.label.clone()).collect());
        Self::from_conj_fn(label, points, names, None, |b, a| {
            let (ka, kb) = (owner[a], owner[b]);
            if ka != kb {
                return b;
            }
            let off = offsets[ka];
            parts[ka].conj(b - off, a - off) + off
        })
    }

    /// Parses `S<n>`, `W:<type><rank>`, `3W:<type><rank>`, `M3:<n>`, and
    /// `+`-separated sums of these.
    pub fn parse(input: &str) -> Result<Self, TranspoError> {
        let mut parts = Vec::new();
        let mut col = 1;
        for piece in input.split('+') {
            let trimmed = piece.trim();
            let bad = |message: String| TranspoError::BadDescriptor {
                input: input.to_string(),
                column: col,
                message,
            };
            let g = if let Some(rest) = trimmed.strip_prefix("3W:") {
                TranspoGroup::affine_weyl(&RootSystem::parse(rest).map_err(|e| bad(e.to_string()))?)
            } else if let Some(rest) = trimmed.strip_prefix("W:") {
                TranspoGroup::weyl(&RootSystem::parse(rest).map_err(|e| bad(e.to_string()))?)
            } else if let Some(rest) = trimmed.strip_prefix("M3:") {
                let n: usize = rest
                    .parse()
                    .map_err(|_| bad(format!("invalid Moufang rank '{rest}'")))?;
                if n == 0 {
                    return Err(bad("Moufang rank must be at least 1".into()));
                }
                TranspoGroup::moufang(n)
            } else if let Some(rest) = trimmed.strip_prefix('S') {
                let n: usize = rest
                    .parse()
                    .map_err(|_| bad(format!("invalid symmetric degree '{rest}'")))?;
                TranspoGroup::symmetric(n).map_err(|e| bad(e.to_string()))?
            } else {
                return Err(bad(format!(
                    "unknown group '{trimmed}' (expected S<n>, W:<X><n>, 3W:<X><n> or M3:<n>)"
                )));
            };
            parts.push(g);
            col += piece.len() + 1;
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(TranspoGroup::disjoint_union(&parts))
        }
    }

    pub fn label(&self) -> &CentralType {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn payload(&self, i: usize) -> &Payload {
        &self.points[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn root_system(&self) -> Option<&RootSystem> {
        self.roots.as_deref()
    }

    /// `b^a`.
    #[inline]
    pub fn conj(&self, b: usize, a: usize) -> usize {
        self.conj[a * self.len() + b] as usize
    }

    /// Order of `ab`: 1, 2 or 3.
    #[inline]
    pub fn order(&self, a: usize, b: usize) -> u8 {
        if a == b {
            1
        } else if self.conj(b, a) == b {
            2
        } else {
            3
        }
    }

    /// `a` and `b` are distinct and commute (`a ⊥ b`).
    #[inline]
    pub fn orthogonal(&self, a: usize, b: usize) -> bool {
        self.order(a, b) == 2
    }

    /// `o(ab) = 3`.
    #[inline]
    pub fn collinear(&self, a: usize, b: usize) -> bool {
        self.order(a, b) == 3
    }

    /// Index of the affine point `(eps alpha, sigma_alpha)`.
    pub fn affine_point(&self, eps: u8, root: usize) -> Option<usize> {
        match self.label {
            CentralType::AffineWeyl(..) => Some(3 * root + (eps % 3) as usize),
            _ => None,
        }
    }

    /// Checks every structural invariant of a 3-transposition class.
    pub fn check_invariants(&self) -> Result<(), TranspoError> {
        let n = self.len();
        let fail = |m: String| Err(TranspoError::Invariant(m));
        for a in 0..n {
            if self.conj(a, a) != a {
                return fail(format!("{}^{} != {}", self.names[a], self.names[a], self.names[a]));
            }
            for b in 0..n {
                let c = self.conj(b, a);
                if self.conj(c, a) != b {
                    return fail(format!("conjugation by {} is not an involution", self.names[a]));
                }
                if a != b && (c == b) != (self.conj(a, b) == a) {
                    return fail(format!("commutation of {} and {} is asymmetric", self.names[a], self.names[b]));
                }
                if self.collinear(a, b) && self.conj(a, b) != c {
                    return fail(format!("{}^{} != {}^{}", self.names[a], self.names[b], self.names[b], self.names[a]));
                }
            }
        }
        for a in 0..n {
            for x in 0..n {
                let xa = self.conj(x, a);
                for y in 0..n {
                    if self.order(xa, self.conj(y, a)) != self.order(x, y) {
                        return fail(format!(
                            "conjugation by {} changes o({}{})",
                            self.names[a], self.names[x], self.names[y]
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether the group generated by the conjugation maps acts transitively on
    /// ordered noncommuting pairs.
    pub fn noncommuting_pairs_transitive(&self) -> bool {
        let n = self.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.collinear(a, b))
            .collect();
        let Some(&start) = pairs.first() else {
            return true;
        };
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((x, y)) = queue.pop_front() {
            for g in 0..n {
                let img = (self.conj(x, g), self.conj(y, g));
                if seen.insert(img) {
                    queue.push_back(img);
                }
            }
        }
        seen.len() == pairs.len()
    }

    /// No affine plane occurs: the group is of symplectic type.
    pub fn is_symplectic(&self) -> bool {
        !matches!(
            self.label,
            CentralType::AffineWeyl(..) | CentralType::Moufang(_)
        ) || matches!(self.label, CentralType::Moufang(1) | CentralType::AffineWeyl(_, 1))
    }
}
