//! Simply laced root systems of types A, D and E, stored as integer vectors
//! in the simple-root basis.

use std::collections::HashMap;
use std::fmt;

use super::TranspoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum RootType {
    A,
    D,
    E,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            RootType::A => 'A',
            RootType::D => 'D',
            RootType::E => 'E',
        };
        write!(f, "{c}")
    }
}

pub type Root = Vec<i64>;

#[derive(Debug, Clone)]
pub struct RootSystem {
    kind: RootType,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    positive: Vec<Root>,
    index: HashMap<Root, usize>,
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.rank == other.rank
    }
}

impl Eq for RootSystem {}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.rank)
    }
}

fn cartan_edges(kind: RootType, rank: usize) -> Vec<(usize, usize)> {
    match kind {
        RootType::A => (1..rank).map(|i| (i - 1, i)).collect(),
        RootType::D => {
            let mut e: Vec<_> = (1..rank - 1).map(|i| (i - 1, i)).collect();
            e.push((rank - 3, rank - 1));
            e
        }
        // Bourbaki labelling 1-3-4-5-..., with node 2 attached to node 4.
        RootType::E => {
            let mut e = vec![(0, 2), (1, 3)];
            e.extend((3..rank).map(|i| (i - 1, i)));
            e
        }
    }
}

impl RootSystem {
    pub fn new(kind: RootType, rank: usize) -> Result<Self, TranspoError> {
        let ok = match kind {
            RootType::A => rank >= 1,
            RootType::D => rank >= 4,
            RootType::E => (6..=8).contains(&rank),
        };
        if !ok {
            return Err(TranspoError::UnsupportedType(format!("{kind}{rank}")));
        }
        let mut cartan = vec![vec![0i64; rank]; rank];
        for (i, row) in cartan.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (i, j) in cartan_edges(kind, rank) {
            cartan[i][j] = -1;
            cartan[j][i] = -1;
        }
        let mut rs = RootSystem {
            kind,
            rank,
            cartan,
            positive: Vec::new(),
            index: HashMap::new(),
        };
        rs.generate_positive();
        Ok(rs)
    }

    /// Parses `A3`, `D4`, `E6`, ...
    pub fn parse(s: &str) -> Result<Self, TranspoError> {
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('A') => RootType::A,
            Some('D') => RootType::D,
            Some('E') => RootType::E,
            _ => return Err(TranspoError::UnsupportedType(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| TranspoError::UnsupportedType(s.to_string()))?;
        Self::new(kind, rank)
    }

    fn generate_positive(&mut self) {
        let simple: Vec<Root> = (0..self.rank).map(|i| self.simple_root(i)).collect();
        let mut roots = simple.clone();
        let mut frontier = simple.clone();
        let mut seen: std::collections::HashSet<Root> = roots.iter().cloned().collect();
        // In a simply laced system, beta + alpha_i is a root iff <beta, alpha_i> = -1.
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for beta in &frontier {
                for alpha in &simple {
                    if beta != alpha && self.pairing(beta, alpha) == -1 {
                        let sum: Root = beta.iter().zip(alpha).map(|(a, b)| a + b).collect();
                        if seen.insert(sum.clone()) {
                            roots.push(sum.clone());
                            next.push(sum);
                        }
                    }
                }
            }
            frontier = next;
        }
        roots.sort_by(|a, b| {
            let ha: i64 = a.iter().sum();
            let hb: i64 = b.iter().sum();
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        self.index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        self.positive = roots;
    }

    pub fn kind(&self) -> RootType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn simple_root(&self, i: usize) -> Root {
        let mut r = vec![0; self.rank];
        r[i] = 1;
        r
    }

    /// Positive roots ordered by height; the first `rank` are the simple roots.
    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    /// `<alpha, beta^vee>`; symmetric since all roots have the same length.
    pub fn pairing(&self, alpha: &[i64], beta: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            if alpha[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                s += alpha[i] * self.cartan[i][j] * beta[j];
            }
        }
        s
    }

    /// `sigma_beta(v) = v - <v, beta^vee> beta`.
    pub fn reflect(&self, beta: &[i64], v: &[i64]) -> Root {
        let p = self.pairing(v, beta);
        v.iter().zip(beta).map(|(x, b)| x - p * b).collect()
    }

    /// Index of a positive root.
    pub fn index_of(&self, r: &[i64]) -> Option<usize> {
        self.index.get(r).copied()
    }

    /// For a root `r = ±alpha`, returns `(index of alpha, sign)`.
    pub fn signed_index(&self, r: &[i64]) -> Option<(usize, i64)> {
        let sign = r.iter().copied().find(|&x| x != 0)?.signum();
        let pos: Root = r.iter().map(|x| x * sign).collect();
        self.index_of(&pos).map(|i| (i, sign))
    }

    pub fn height(&self, i: usize) -> i64 {
        self.positive[i].iter().sum()
    }

    /// Positive-root decompositions `positive[i] = positive[j] + positive[k]`, `j < k`.
    pub fn decompositions(&self, i: usize) -> Vec<(usize, usize)> {
        let target = &self.positive[i];
        let mut out = Vec::new();
        for (j, a) in self.positive.iter().enumerate() {
            let rest: Root = target.iter().zip(a).map(|(t, x)| t - x).collect();
            if let Some(k) = self.index_of(&rest) {
                if j < k {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Index of `positive[i] + positive[j]` if that is a root.
    pub fn sum_index(&self, i: usize, j: usize) -> Option<usize> {
        let s: Root = self.positive[i]
            .iter()
            .zip(&self.positive[j])
            .map(|(a, b)| a + b)
            .collect();
        self.index_of(&s)
    }

    /// Classical number of positive roots for the type.
    pub fn expected_positive_count(kind: RootType, rank: usize) -> usize {
        match (kind, rank) {
            (RootType::A, n) => n * (n + 1) / 2,
            (RootType::D, n) => n * (n - 1),
            (RootType::E, 6) => 36,
            (RootType::E, 7) => 63,
            (RootType::E, 8) => 120,
            _ => 0,
        }
    }

    /// Permutations of the simple roots preserving the Cartan matrix.
    pub fn diagram_automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.rank;
        let mut out = Vec::new();
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        let mut used = vec![false; n];
        self.extend_diagram_perm(&mut perm, &mut used, &mut out);
        out
    }

    fn extend_diagram_perm(&self, perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let k = perm.len();
        if k == self.rank {
            out.push(perm.clone());
            return;
        }
        for cand in 0..self.rank {
            if used[cand] {
                continue;
            }
            if (0..k).all(|j| self.cartan[k][j] == self.cartan[cand][perm[j]]) {
                used[cand] = true;
                perm.push(cand);
                self.extend_diagram_perm(perm, used, out);
                perm.pop();
                used[cand] = false;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_root_counts() {
        for (k, n) in [
            (RootType::A, 1),
            (RootType::A, 2),
            (RootType::A, 3),
            (RootType::A, 5),
            (RootType::D, 4),
            (RootType::D, 5),
            (RootType::E, 6),
            (RootType::E, 7),
            (RootType::E, 8),
        ] {
            let rs = RootSystem::new(k, n).unwrap();
            assert_eq!(rs.num_positive(), RootSystem::expected_positive_count(k, n), "{rs}");
        }
    }

    #[test]
    fn simple_roots_first_and_pairings() {
        let rs = RootSystem::parse("D4").unwrap();
        for i in 0..4 {
            assert_eq!(rs.positive_roots()[i], rs.simple_root(i));
        }
        for a in rs.positive_roots() {
            assert_eq!(rs.pairing(a, a), 2);
            for b in rs.positive_roots() {
                if a != b {
                    assert!((-1..=1).contains(&rs.pairing(a, b)));
                }
                let r = rs.reflect(b, a);
                assert!(rs.signed_index(&r).is_some());
                assert_eq!(&rs.reflect(b, &r), a);
            }
        }
    }

    #[test]
    fn rejects_unsupported() {
        assert!(RootSystem::parse("D3").is_err());
        assert!(RootSystem::parse("E9").is_err());
        assert!(RootSystem::parse("B2").is_err());
        assert!(RootSystem::parse("A0").is_err());
    }

    #[test]
    fn diagram_symmetries() {
        assert_eq!(RootSystem::parse("A3").unwrap().diagram_automorphisms().len(), 2);
        assert_eq!(RootSystem::parse("D4").unwrap().diagram_automorphisms().len(), 6);
        assert_eq!(RootSystem::parse("E6").unwrap().diagram_automorphisms().len(), 2);
        assert_eq!(RootSystem::parse("E8").unwrap().diagram_automorphisms().len(), 1);
    }
}
