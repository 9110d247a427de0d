//! Reference computations for the acceptance suite, written without the
//! library: point-line incidences built from scratch and dense elimination
//! modulo a prime.

/// Default modulus for characteristic-zero cross-checks.
pub const LARGE_PRIME: u64 = 2_147_483_647;

/// Points `0..n` with the third point of each line, or `None` for
/// non-collinear pairs.
#[derive(Debug, Clone)]
pub struct Incidence {
    n: usize,
    third: Vec<Option<usize>>,
}

impl Incidence {
    pub fn from_fn(n: usize, third: impl Fn(usize, usize) -> Option<usize>) -> Self {
        let mut t = vec![None; n * n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    t[a * n + b] = third(a, b);
                }
            }
        }
        Incidence { n, third: t }
    }

    /// Transpositions `(i j)` of `S_m`; `(i j)` and `(j k)` span the line
    /// with third point `(i k)`.
    pub fn symmetric(m: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let index = |p: (usize, usize)| pairs.iter().position(|&q| q == p).unwrap();
        Incidence::from_fn(pairs.len(), |a, b| {
            let (p, q) = (pairs[a], pairs[b]);
            let ends = [p.0, p.1, q.0, q.1];
            let shared: Vec<usize> = [p.0, p.1].into_iter().filter(|x| [q.0, q.1].contains(x)).collect();
            if shared.len() != 1 {
                return None;
            }
            let mut rest: Vec<usize> = ends.into_iter().filter(|x| *x != shared[0]).collect();
            rest.sort_unstable();
            Some(index((rest[0], rest[1])))
        })
    }

    /// The affine space `F_3^k`: every two points are collinear and the
    /// third point is `-a - b`.
    pub fn affine_space(k: u32) -> Self {
        let n = 3usize.pow(k);
        let digits = |mut x: usize| {
            let mut d = Vec::with_capacity(k as usize);
            for _ in 0..k {
                d.push(x % 3);
                x /= 3;
            }
            d
        };
        Incidence::from_fn(n, |a, b| {
            let (da, db) = (digits(a), digits(b));
            let mut c = 0;
            for i in (0..k as usize).rev() {
                c = 3 * c + (6 - da[i] - db[i]) % 3;
            }
            Some(c)
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn third(&self, a: usize, b: usize) -> Option<usize> {
        self.third[a * self.n + b]
    }

    pub fn line_count(&self) -> usize {
        self.third.iter().filter(|t| t.is_some()).count() / 6
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Row echelon basis over `F_p`, grown one row at a time.
#[derive(Debug, Clone)]
pub struct Echelon {
    p: u64,
    cols: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(p: u64, cols: usize) -> Self {
        Echelon {
            p,
            cols,
            rows: Vec::new(),
        }
    }

    /// Reduces `row` and keeps it if independent.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        let p = self.p;
        for (pivot, basis) in &self.rows {
            let c = row[*pivot];
            if c == 0 {
                continue;
            }
            let f = p - c;
            for (x, y) in row.iter_mut().zip(basis) {
                if *y != 0 {
                    *x = (*x + f * y) % p;
                }
            }
        }
        match row.iter().position(|&x| x != 0) {
            None => false,
            Some(pivot) => {
                let inv = inv_mod(row[pivot], p);
                for x in row.iter_mut() {
                    *x = *x * inv % p;
                }
                self.rows.push((pivot, row));
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// `e_a e_b` in `M_eta` over `F_p`, as `(index, coefficient)` terms.
fn product(inc: &Incidence, eta_half: u64, p: u64, a: usize, b: usize) -> Vec<(usize, u64)> {
    if a == b {
        return vec![(a, 1)];
    }
    match inc.third(a, b) {
        None => Vec::new(),
        Some(c) => vec![(a, eta_half), (b, eta_half), (c, p - eta_half)],
    }
}

/// `dim Der M_eta` over `F_p` from the dense Leibniz system, with
/// `eta = eta_num / eta_den`.
pub fn derivation_dim(inc: &Incidence, eta_num: u64, eta_den: u64, p: u64) -> usize {
    let n = inc.len();
    let eta = eta_num % p * inv_mod(eta_den % p, p) % p;
    let eta_half = eta * inv_mod(2, p) % p;
    // unknown D[a][k] = coefficient of e_k in d(e_a), index a * n + k
    let mut ech = Echelon::new(p, n * n);
    for a in 0..n {
        for b in a..n {
            let prod = product(inc, eta_half, p, a, b);
            for t in 0..n {
                let mut row = vec![0u64; n * n];
                for k in 0..n {
                    for (idx, c) in product(inc, eta_half, p, k, b) {
                        if idx == t {
                            row[a * n + k] = (row[a * n + k] + c) % p;
                        }
                    }
                    for (idx, c) in product(inc, eta_half, p, a, k) {
                        if idx == t {
                            row[b * n + k] = (row[b * n + k] + c) % p;
                        }
                    }
                }
                for &(j, c) in &prod {
                    row[j * n + t] = (row[j * n + t] + p - c) % p;
                }
                ech.insert(row);
            }
        }
    }
    n * n - ech.rank()
}

/// Number of positive roots of `A_n` or `D_n`.
pub fn positive_roots(kind: char, rank: usize) -> usize {
    match kind {
        'A' => rank * (rank + 1) / 2,
        'D' => rank * (rank - 1),
        _ => panic!("unsupported type {kind}"),
    }
}
