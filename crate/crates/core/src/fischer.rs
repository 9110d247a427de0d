//! Fischer spaces: the partial linear space on `D` whose lines are the
//! triples `{a, b, b^a}` with `o(ab) = 3`.
//!
//! Closures, plane types, 4-generated fingerprints, vertical lines and the
//! near-solid test live here.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::transpo::{CentralType, Payload, TranspoGroup};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FischerError {
    #[error("Fischer axiom violated: {points} points span a connected closure of size {size}")]
    FischerAxiomViolation { points: String, size: usize },
    #[error("plane type needs three distinct points")]
    NotDistinct,
    #[error("{0} is not a line of the space")]
    NotALine(String),
    #[error("line orbits are only defined for 3^n:W spaces, not {0}")]
    NotAffine(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PlaneType {
    Line,
    DualAffine2,
    Affine3,
    Degenerate,
}

impl fmt::Display for PlaneType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PlaneType::Line => "line",
            PlaneType::DualAffine2 => "dual affine plane of order 2",
            PlaneType::Affine3 => "affine plane of order 3",
            PlaneType::Degenerate => "degenerate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FourGenType {
    S5,
    WD4,
    AffA3,
    Mou3,
    ThreeGen(PlaneType),
    Point,
    Unknown(usize),
}

impl FourGenType {
    /// Fingerprint of a connected subspace by its size.
    pub fn from_size(size: usize) -> Self {
        match size {
            1 => FourGenType::Point,
            3 => FourGenType::ThreeGen(PlaneType::Line),
            6 => FourGenType::ThreeGen(PlaneType::DualAffine2),
            9 => FourGenType::ThreeGen(PlaneType::Affine3),
            10 => FourGenType::S5,
            12 => FourGenType::WD4,
            18 => FourGenType::AffA3,
            27 => FourGenType::Mou3,
            n => FourGenType::Unknown(n),
        }
    }

    pub fn is_three_generated(&self) -> bool {
        matches!(self, FourGenType::ThreeGen(_) | FourGenType::Point)
    }
}

impl fmt::Display for FourGenType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FourGenType::S5 => write!(f, "S5"),
            FourGenType::WD4 => write!(f, "W(D4)"),
            FourGenType::AffA3 => write!(f, "3^3:S4"),
            FourGenType::Mou3 => write!(f, "3^3:2"),
            FourGenType::ThreeGen(p) => write!(f, "3-generated ({p})"),
            FourGenType::Point => write!(f, "point"),
            FourGenType::Unknown(n) => write!(f, "unknown ({n} points)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LineClass {
    Vertical,
    Horizontal,
}

/// Outcome of the near-solid test for one line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearSolidVerdict {
    pub near_solid: bool,
    /// True when no 4-generated overspace other than 3-generated ones exists.
    pub vacuous: bool,
    /// Offending component (point indices, sorted) and its type.
    pub witness: Option<(Vec<usize>, FourGenType)>,
    /// Types of the accepted overspaces.
    pub accepted: Vec<FourGenType>,
}

pub type Line = [usize; 3];

const NO_LINE: u32 = u32::MAX;

#[derive(Debug)]
pub struct FischerSpace {
    group: Arc<TranspoGroup>,
    lines: Vec<Line>,
    /// `line_of[a * n + b]`
    line_of: Vec<u32>,
    /// Subspaces already classified, per near-solid run.
    cache: Mutex<HashMap<FixedBitSet, FourGenType>>,
}

impl Clone for FischerSpace {
    fn clone(&self) -> Self {
        FischerSpace {
            group: self.group.clone(),
            lines: self.lines.clone(),
            line_of: self.line_of.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl FischerSpace {
    pub fn new(group: TranspoGroup) -> Self {
        Self::from_arc(Arc::new(group))
    }

    pub fn from_arc(group: Arc<TranspoGroup>) -> Self {
        let n = group.len();
        let mut lines = Vec::new();
        let mut line_of = vec![NO_LINE; n * n];
        for a in 0..n {
            for b in a + 1..n {
                if !group.collinear(a, b) || line_of[a * n + b] != NO_LINE {
                    continue;
                }
                let c = group.conj(b, a);
                let mut l = [a, b, c];
                l.sort_unstable();
                let id = lines.len() as u32;
                for &x in &l {
                    for &y in &l {
                        if x != y {
                            line_of[x * n + y] = id;
                        }
                    }
                }
                lines.push(l);
            }
        }
        FischerSpace {
            group,
            lines,
            line_of,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn group(&self) -> &TranspoGroup {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<TranspoGroup> {
        self.group.clone()
    }

    pub fn num_points(&self) -> usize {
        self.group.len()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line_through(&self, a: usize, b: usize) -> Option<usize> {
        let id = self.line_of[a * self.num_points() + b];
        (id != NO_LINE).then_some(id as usize)
    }

    /// Third point of the line through `a` and `b`.
    #[inline]
    pub fn third(&self, a: usize, b: usize) -> Option<usize> {
        self.group.collinear(a, b).then(|| self.group.conj(b, a))
    }

    pub fn line_name(&self, l: &Line) -> String {
        let names: Vec<&str> = l.iter().map(|&p| self.group.name(p)).collect();
        format!("{{{}}}", names.join(", "))
    }

    fn check_line(&self, l: &Line) -> Result<(), FischerError> {
        match self.line_through(l[0], l[1]) {
            Some(id) => {
                let mut s = *l;
                s.sort_unstable();
                if self.lines[id] == s {
                    Ok(())
                } else {
                    Err(FischerError::NotALine(format!("{l:?}")))
                }
            }
            None => Err(FischerError::NotALine(format!("{l:?}"))),
        }
    }

    fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.num_points())
    }

    /// Smallest subspace containing `seed`.
    pub fn closure(&self, seed: &[usize]) -> FixedBitSet {
        let mut set = self.empty_set();
        self.extend_closure(&mut set, seed);
        set
    }

    /// Grows the subspace `set` (assumed closed) to contain `extra`.
    pub fn extend_closure(&self, set: &mut FixedBitSet, extra: &[usize]) {
        let mut members: Vec<usize> = set.ones().collect();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &p in extra {
            if !set.put(p) {
                queue.push_back(p);
            }
        }
        while let Some(p) = queue.pop_front() {
            for &q in &members {
                if let Some(r) = self.third(p, q) {
                    if !set.put(r) {
                        queue.push_back(r);
                    }
                }
            }
            members.push(p);
        }
    }

    /// Connected components of the collinearity graph restricted to `set`.
    pub fn components_of(&self, set: &FixedBitSet) -> Vec<Vec<usize>> {
        let mut seen = self.empty_set();
        let mut out = Vec::new();
        for start in set.ones() {
            if seen.put(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut i = 0;
            while i < comp.len() {
                let p = comp[i];
                for q in set.ones() {
                    if !seen.contains(q) && self.group.collinear(p, q) {
                        seen.insert(q);
                        comp.push(q);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn component_containing(&self, set: &FixedBitSet, p: usize) -> FixedBitSet {
        let mut comp = self.empty_set();
        comp.insert(p);
        let mut stack = vec![p];
        while let Some(x) = stack.pop() {
            for q in set.ones() {
                if !comp.contains(q) && self.group.collinear(x, q) {
                    comp.insert(q);
                    stack.push(q);
                }
            }
        }
        comp
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut all = self.empty_set();
        all.insert_range(..);
        self.components_of(&all)
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Type of the plane spanned by three distinct points.
    pub fn plane_type(&self, a: usize, b: usize, c: usize) -> Result<PlaneType, FischerError> {
        if a == b || b == c || a == c {
            return Err(FischerError::NotDistinct);
        }
        let cl = self.closure(&[a, b, c]);
        if self.components_of(&cl).len() > 1 {
            return Ok(PlaneType::Degenerate);
        }
        match cl.count_ones(..) {
            3 => Ok(PlaneType::Line),
            6 => Ok(PlaneType::DualAffine2),
            9 => Ok(PlaneType::Affine3),
            size => Err(FischerError::FischerAxiomViolation {
                points: format!(
                    "{}, {}, {}",
                    self.group.name(a),
                    self.group.name(b),
                    self.group.name(c)
                ),
                size,
            }),
        }
    }

    /// Fingerprint of the component of `points[0]` in the subspace they generate.
    pub fn four_gen_type(&self, points: &[usize]) -> FourGenType {
        let Some(&first) = points.first() else {
            return FourGenType::Unknown(0);
        };
        let cl = self.closure(points);
        let comp = self.component_containing(&cl, first);
        FourGenType::from_size(comp.count_ones(..))
    }

    /// Planes through `l`: closures of `l` with a point collinear to some point of `l`.
    pub fn planes_through(&self, l: &Line) -> Vec<(FixedBitSet, PlaneType)> {
        let base = self.closure(l);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for c in 0..self.num_points() {
            if base.contains(c) || !l.iter().any(|&p| self.group.collinear(p, c)) {
                continue;
            }
            let mut cl = base.clone();
            self.extend_closure(&mut cl, &[c]);
            if seen.insert(cl.clone()) {
                let t = match cl.count_ones(..) {
                    6 => PlaneType::DualAffine2,
                    9 => PlaneType::Affine3,
                    _ => PlaneType::Degenerate,
                };
                out.push((cl, t));
            }
        }
        out
    }

    /// Vertical iff the three points share one reflection.
    pub fn line_orbit_class(&self, l: &Line) -> Result<LineClass, FischerError> {
        self.check_line(l)?;
        if !matches!(self.group.label(), CentralType::AffineWeyl(..)) {
            return Err(FischerError::NotAffine(self.group.label().to_string()));
        }
        let root = |p: usize| match self.group.payload(p) {
            Payload::Affine { root, .. } => *root,
            _ => unreachable!(),
        };
        if root(l[0]) == root(l[1]) && root(l[1]) == root(l[2]) {
            Ok(LineClass::Vertical)
        } else {
            Ok(LineClass::Horizontal)
        }
    }

    /// Verticality by payload when available, otherwise by the plane criterion:
    /// at least one plane through `l` and all of them affine.
    pub fn is_vertical(&self, l: &Line) -> bool {
        if let Ok(c) = self.line_orbit_class(l) {
            return c == LineClass::Vertical;
        }
        let planes = self.planes_through(l);
        !planes.is_empty() && planes.iter().all(|(_, t)| *t == PlaneType::Affine3)
    }

    fn classify_cached(&self, comp: &FixedBitSet) -> FourGenType {
        if let Some(t) = self.cache.lock().unwrap().get(comp) {
            return *t;
        }
        let t = FourGenType::from_size(comp.count_ones(..));
        self.cache.lock().unwrap().insert(comp.clone(), t);
        t
    }

    /// Near-solid test: every non-3-generated component of `<l, c, d>`
    /// containing `l` must be of type S5, or of type 3^3:S4 with `l` vertical.
    pub fn is_near_solid(&self, l: &Line) -> Result<NearSolidVerdict, FischerError> {
        self.check_line(l)?;
        let n = self.num_points();
        let base = self.closure(l);
        let vertical = self.is_vertical(l);
        let mut visited: HashSet<FixedBitSet> = HashSet::new();
        let mut accepted: Vec<FourGenType> = Vec::new();
        let mut vacuous = true;
        for c in 0..n {
            if base.contains(c) {
                continue;
            }
            let mut with_c = base.clone();
            self.extend_closure(&mut with_c, &[c]);
            for d in c + 1..n {
                if with_c.contains(d) {
                    continue;
                }
                let mut cl = with_c.clone();
                self.extend_closure(&mut cl, &[d]);
                let comp = self.component_containing(&cl, l[0]);
                if !visited.insert(comp.clone()) {
                    continue;
                }
                let t = self.classify_cached(&comp);
                if t.is_three_generated() {
                    continue;
                }
                vacuous = false;
                let ok = match t {
                    FourGenType::S5 => true,
                    FourGenType::AffA3 => vertical,
                    _ => false,
                };
                if !ok {
                    return Ok(NearSolidVerdict {
                        near_solid: false,
                        vacuous: false,
                        witness: Some((comp.ones().collect(), t)),
                        accepted,
                    });
                }
                if !accepted.contains(&t) {
                    accepted.push(t);
                }
            }
        }
        Ok(NearSolidVerdict {
            near_solid: true,
            vacuous,
            witness: None,
            accepted,
        })
    }

    /// Near-solid verdict for every line, in line order.
    pub fn near_solid_table(&self) -> Vec<NearSolidVerdict> {
        self.lines
            .par_iter()
            .map(|l| self.is_near_solid(l).expect("lines of the space"))
            .collect()
    }

    /// Partial linear space: any two distinct points on at most one line.
    pub fn check_partial_linear(&self) -> bool {
        let n = self.num_points();
        let mut count = vec![0u8; n * n];
        for l in &self.lines {
            for &x in l {
                for &y in l {
                    if x != y {
                        count[x * n + y] += 1;
                    }
                }
            }
        }
        count.iter().all(|&c| c <= 1)
            && self.lines.iter().all(|l| {
                self.third(l[0], l[1]) == Some(l[2])
                    && self.third(l[0], l[2]) == Some(l[1])
                    && self.third(l[1], l[2]) == Some(l[0])
            })
    }

    /// Orbits of lines under the group generated by the conjugation maps.
    pub fn line_orbits(&self) -> Vec<Vec<usize>> {
        let n = self.num_points();
        let mut orbit_of = vec![usize::MAX; self.lines.len()];
        let mut out = Vec::new();
        for start in 0..self.lines.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let k = out.len();
            orbit_of[start] = k;
            let mut orbit = vec![start];
            let mut i = 0;
            while i < orbit.len() {
                let l = self.lines[orbit[i]];
                for g in 0..n {
                    let a = self.group.conj(l[0], g);
                    let b = self.group.conj(l[1], g);
                    let id = self.line_through(a, b).expect("conjugation preserves lines");
                    if orbit_of[id] == usize::MAX {
                        orbit_of[id] = k;
                        orbit.push(id);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// Whether `lines` are pairwise disjoint and cover every point.
    pub fn is_spread(&self, lines: &[Line]) -> bool {
        let mut seen = self.empty_set();
        for l in lines {
            for &p in l {
                if seen.put(p) {
                    return false;
                }
            }
        }
        seen.count_ones(..) == self.num_points()
    }

    /// Counts of plane types over all intersecting line pairs.
    pub fn plane_census(&self) -> HashMap<PlaneType, usize> {
        let mut seen = HashSet::new();
        let mut census = HashMap::new();
        for l in &self.lines {
            for (plane, t) in self.planes_through(l) {
                if seen.insert(plane) {
                    *census.entry(t).or_insert(0) += 1;
                }
            }
        }
        census
    }
}
