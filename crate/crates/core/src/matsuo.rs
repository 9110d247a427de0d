//! Matsuo algebras `M_eta(k, (G, D))`, their axes and the Jordan fusion law.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::algebra::{sub_vec, unit, Algebra, AlgebraElement, AlgebraError};
use crate::field::{Field, FieldElement, FieldError};
use crate::fischer::FischerSpace;
use crate::linalg::kernel;
use crate::transpo::TranspoGroup;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatsuoError {
    #[error("eta must differ from 0 and 1, got {0}")]
    BadEta(String),
    #[error("characteristic {0} is not allowed")]
    BadCharacteristic(u64),
    #[error("operands belong to different algebras")]
    MixedAlgebras,
    #[error("cannot form direct sum: {0}")]
    MismatchedParameters(String),
    #[error("L_a for axis {axis} is not semisimple: eigenspace dimensions {dims:?} do not add up to {dim}")]
    NotSemisimple {
        axis: String,
        dims: (usize, usize, usize),
        dim: usize,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<AlgebraError> for MatsuoError {
    fn from(_: AlgebraError) -> Self {
        MatsuoError::MixedAlgebras
    }
}

/// Eigenspaces of `L_a` for the eigenvalues `1`, `0` and `eta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eigendecomp {
    pub axis: usize,
    pub one: Vec<Vec<FieldElement>>,
    pub zero: Vec<Vec<FieldElement>>,
    pub eta: Vec<Vec<FieldElement>>,
}

impl Eigendecomp {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.one.len(), self.zero.len(), self.eta.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionViolation {
    pub rule: &'static str,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionReport {
    pub axis: usize,
    pub dims: (usize, usize, usize),
    pub checked: usize,
    pub violations: Vec<FusionViolation>,
}

impl FusionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug)]
pub struct MatsuoAlgebra {
    space: Arc<FischerSpace>,
    eta: FieldElement,
    algebra: Algebra,
    eigen_cache: Mutex<HashMap<usize, Eigendecomp>>,
}

impl Clone for MatsuoAlgebra {
    fn clone(&self) -> Self {
        MatsuoAlgebra {
            space: self.space.clone(),
            eta: self.eta.clone(),
            algebra: self.algebra.clone(),
            eigen_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl MatsuoAlgebra {
    /// `a a = a`; `a b = 0` if `o(ab) = 2`; `a b = eta/2 (a + b - a^b)` if `o(ab) = 3`.
    pub fn build(space: Arc<FischerSpace>, eta: &FieldElement, field: &Field) -> Result<Self, MatsuoError> {
        if field.characteristic() == 2 {
            return Err(MatsuoError::BadCharacteristic(2));
        }
        let eta = field.embed(eta)?;
        if eta.is_zero() || eta.is_one() {
            return Err(MatsuoError::BadEta(eta.to_string()));
        }
        let g = space.group();
        let n = g.len();
        let half_eta = eta.checked_div(&field.from_i64(2))?;
        let mut alg = Algebra::new(field, g.names().to_vec());
        for a in 0..n {
            alg.set_product(a, a, [(a, field.one())], false);
            for b in a + 1..n {
                if g.collinear(a, b) {
                    let c = g.conj(b, a);
                    alg.set_product(
                        a,
                        b,
                        [(a, half_eta.clone()), (b, half_eta.clone()), (c, -&half_eta)],
                        true,
                    );
                }
            }
        }
        Ok(MatsuoAlgebra {
            space,
            eta,
            algebra: alg,
            eigen_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Builds the algebra of a catalog group.
    pub fn of_group(group: TranspoGroup, eta: &FieldElement, field: &Field) -> Result<Self, MatsuoError> {
        Self::build(Arc::new(FischerSpace::new(group)), eta, field)
    }

    /// `M_{1/2}` of a catalog group.
    pub fn half(group: TranspoGroup, field: &Field) -> Result<Self, MatsuoError> {
        let eta = field.ratio(1, 2)?;
        Self::of_group(group, &eta, field)
    }

    pub fn space(&self) -> &FischerSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<FischerSpace> {
        self.space.clone()
    }

    pub fn group(&self) -> &TranspoGroup {
        self.space.group()
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn field(&self) -> &Field {
        self.algebra.field()
    }

    pub fn eta(&self) -> &FieldElement {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        self.algebra.basis(i)
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement, MatsuoError> {
        Ok(self.algebra.multiply(x, y)?)
    }

    /// Copy with `delta e_k` added to the product `e_i e_j`, for negative controls.
    pub fn perturbed(&self, i: usize, j: usize, k: usize, delta: &FieldElement) -> MatsuoAlgebra {
        let mut alg = self.algebra.clone();
        alg.add_product(i, j, &[(k, delta.clone())]);
        MatsuoAlgebra {
            space: self.space.clone(),
            eta: self.eta.clone(),
            algebra: alg,
            eigen_cache: Mutex::new(HashMap::new()),
        }
    }

    /// Algebra on the disjoint union of the two point sets.
    pub fn direct_sum(&self, other: &MatsuoAlgebra) -> Result<MatsuoAlgebra, MatsuoError> {
        if self.field() != other.field() {
            return Err(MatsuoError::MismatchedParameters(format!(
                "fields {} and {}",
                self.field(),
                other.field()
            )));
        }
        if self.eta != other.eta {
            return Err(MatsuoError::MismatchedParameters(format!(
                "eta {} and {}",
                self.eta, other.eta
            )));
        }
        let g = TranspoGroup::disjoint_union(&[self.group().clone(), other.group().clone()]);
        Self::of_group(g, &self.eta, self.field())
    }

    fn mul_by_axis(&self, a: usize, v: &[FieldElement]) -> Vec<FieldElement> {
        self.algebra.mul_coords(&unit(self.field(), self.dim(), a), v)
    }

    /// `A_1(a) = <a>`, `A_0(a) = ker L_a`, `A_eta(a) = ker(L_a - eta)`.
    pub fn eigendecompose(&self, a: usize) -> Result<Eigendecomp, MatsuoError> {
        if let Some(e) = self.eigen_cache.lock().unwrap().get(&a) {
            return Ok(e.clone());
        }
        let n = self.dim();
        let f = self.field();
        let la = self.algebra.left_mult_matrix(&unit(f, n, a));
        let shifted = |s: &FieldElement| -> Vec<Vec<FieldElement>> {
            la.iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut r = row.clone();
                    r[i] = &r[i] - s;
                    r
                })
                .collect()
        };
        let one = kernel(f, &shifted(&f.one()), n);
        let zero = kernel(f, &la, n);
        let eta = kernel(f, &shifted(&self.eta), n);
        let dims = (one.len(), zero.len(), eta.len());
        if one.len() != 1 || dims.0 + dims.1 + dims.2 != n {
            return Err(MatsuoError::NotSemisimple {
                axis: self.algebra.name(a).to_string(),
                dims,
                dim: n,
            });
        }
        let e = Eigendecomp {
            axis: a,
            one: vec![unit(f, n, a)],
            zero,
            eta,
        };
        self.eigen_cache.lock().unwrap().insert(a, e.clone());
        Ok(e)
    }

    /// Checks `J(eta)` on products of spanning vectors of the eigenspaces of `a`.
    pub fn check_fusion(&self, a: usize) -> Result<FusionReport, MatsuoError> {
        let e = self.eigendecompose(a)?;
        let f = self.field();
        let eta = &self.eta;
        let la = |v: &[FieldElement]| self.mul_by_axis(a, v);
        let is_zero = |v: &[FieldElement]| v.iter().all(|x| x.is_zero());
        let in_eig = |v: &[FieldElement], lambda: &FieldElement| {
            let lv = la(v);
            lv.iter().zip(v).all(|(x, y)| x == &(y * lambda))
        };
        // A_1 + A_0: L_a (L_a - 1) w = 0
        let in_one_zero = |v: &[FieldElement]| {
            let lv = la(v);
            let shifted = sub_vec(&lv, v);
            is_zero(&la(&shifted))
        };
        type Test<'t> = Box<dyn Fn(&[FieldElement]) -> bool + Sync + 't>;
        type Rule<'r> = (&'static str, &'r Vec<Vec<FieldElement>>, &'r Vec<Vec<FieldElement>>, Test<'r>);
        let rules: Vec<Rule> = vec![
            ("1*1 in A1", &e.one, &e.one, Box::new(|w: &[FieldElement]| in_eig(w, &f.one()))),
            ("1*0 = 0", &e.one, &e.zero, Box::new(|w: &[FieldElement]| is_zero(w))),
            ("1*eta in Aeta", &e.one, &e.eta, Box::new(|w: &[FieldElement]| in_eig(w, eta))),
            ("0*0 in A0", &e.zero, &e.zero, Box::new(|w: &[FieldElement]| in_eig(w, &f.zero()))),
            ("0*eta in Aeta", &e.zero, &e.eta, Box::new(|w: &[FieldElement]| in_eig(w, eta))),
            ("eta*eta in A1+A0", &e.eta, &e.eta, Box::new(|w: &[FieldElement]| in_one_zero(w))),
        ];
        let mut violations = Vec::new();
        let mut checked = 0;
        for (rule, left, right, test) in &rules {
            let symmetric = std::ptr::eq(*left, *right);
            let pairs: Vec<(usize, usize)> = (0..left.len())
                .flat_map(|i| (0..right.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| !symmetric || i <= j)
                .collect();
            checked += pairs.len();
            let bad: Vec<FusionViolation> = pairs
                .par_iter()
                .filter(|&&(i, j)| !test(&self.algebra.mul_coords(&left[i], &right[j])))
                .map(|&(i, j)| FusionViolation { rule, left: i, right: j })
                .collect();
            violations.extend(bad);
        }
        Ok(FusionReport {
            axis: a,
            dims: e.dims(),
            checked,
            violations,
        })
    }

    /// `phi_a(b)`: the `a`-coordinate of the projection of `b` onto `A_1(a)`,
    /// computed as `L_a (L_a - eta) b / (1 - eta)`.
    pub fn phi(&self, a: usize, b: usize) -> FieldElement {
        let f = self.field();
        let v = unit(f, self.dim(), b);
        let lv = self.mul_by_axis(a, &v);
        let shifted: Vec<FieldElement> = lv.iter().zip(&v).map(|(x, y)| x - &(y * &self.eta)).collect();
        let p = self.mul_by_axis(a, &shifted);
        let denom = &f.one() - &self.eta;
        &p[a] / &denom
    }

    /// Edge `a -> b` iff `phi_a(b) != 0`.
    pub fn projection_graph(&self) -> DiGraph<usize, ()> {
        let n = self.dim();
        let mut g = DiGraph::with_capacity(n, 0);
        let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
        for a in 0..n {
            for b in 0..n {
                if a != b && !self.phi(a, b).is_zero() {
                    g.add_edge(nodes[a], nodes[b], ());
                }
            }
        }
        g
    }

    /// Strong connectivity of the projection graph.
    pub fn is_connected_algebra(&self) -> bool {
        self.dim() <= 1 || kosaraju_scc(&self.projection_graph()).len() == 1
    }

    /// `{field, eta, basis, products}` with exact scalars as strings.
    pub fn to_json(&self) -> Value {
        let n = self.dim();
        let mut products = Vec::new();
        for i in 0..n {
            for j in i..n {
                let p = self.algebra.product(i, j);
                if p.is_empty() {
                    continue;
                }
                let terms: Vec<Value> = p.iter().map(|(k, c)| json!([k, c.to_string()])).collect();
                products.push(json!([i, j, terms]));
            }
        }
        json!({
            "field": self.field().to_string(),
            "eta": self.eta.to_string(),
            "basis": self.algebra.names(),
            "products": products,
        })
    }
}
