//! Smoothability as a homogeneous linear feasibility problem.
//!
//! Variables are the root position `x ∈ ℚ^k` followed by one length per
//! edge; every vertex position is a linear form in them. All constraints
//! are homogeneous, so the solution set is a cone and each strict
//! inequality may be replaced by `≥ 1`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::fm::fourier_motzkin;
use super::simplex::phase_one;
use super::system::{Constraint, LinearSystem};
use super::{Realization, SmoothingError};
use crate::combtype::{CombinatorialType, EdgeId, VertexId};
use crate::complex::Cone;
use crate::linalg::{Frame, Rat, RationalVector};

/// Linear form per ambient coordinate.
type Form = Vec<Vec<Rat>>;

#[derive(Clone, Debug)]
pub struct SmoothabilitySystem {
    pub system: LinearSystem,
    pub root: VertexId,
    pub ambient_dim: usize,
    /// Edge order of the length variables.
    pub edges: Vec<EdgeId>,
    forms: BTreeMap<VertexId, Form>,
}

impl SmoothabilitySystem {
    pub fn length_var(&self, e: EdgeId) -> usize {
        self.ambient_dim + self.edges.iter().position(|&x| x == e).expect("edge of the type")
    }

    pub fn realization(&self, z: &[Rat]) -> Realization {
        let position = |form: &Form| {
            RationalVector::new(form.iter().map(|row| row.iter().zip(z).map(|(a, x)| a * x).sum()).collect())
        };
        Realization {
            root_vertex: self.root,
            edge_lengths: self.edges.iter().map(|&e| (e, z[self.length_var(e)].clone())).collect(),
            vertex_positions: self.forms.iter().map(|(v, f)| (*v, position(f))).collect(),
        }
    }
}

fn combine(row: &RationalVector, form: &Form) -> Vec<Rat> {
    let n = form.first().map_or(0, Vec::len);
    let mut out = vec![Rat::zero(); n];
    for (r, f) in row.coords().iter().zip(form) {
        if r.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(f) {
            *o += r * x;
        }
    }
    out
}

fn add_forms(a: &Form, b: &Form) -> Form {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

/// `p ∈ span σ` and every coefficient of `p` over σ is `≥ bound`.
fn in_cone(sys: &mut LinearSystem, frame: &Frame, form: &Form, bound: &Rat) {
    for i in 0..frame.annihilator.rows() {
        sys.push(Constraint::eq(combine(&frame.annihilator.row(i), form), Rat::zero()));
    }
    for i in 0..frame.coords.rows() {
        sys.push(Constraint::ge(combine(&frame.coords.row(i), form), bound.clone()));
    }
}

fn contradiction(sys: &mut LinearSystem) {
    sys.push(Constraint::ge(vec![Rat::zero(); sys.vars], Rat::one()));
}

pub fn smoothability_system(t: &CombinatorialType) -> Result<SmoothabilitySystem, SmoothingError> {
    let c = &t.target;
    let k = c.ambient_dim();
    let g = &t.graph;
    if !g.edges().is_empty() && t.edge_slopes.is_none() {
        return Err(SmoothingError::UnsolvedSlopes);
    }
    let edges: Vec<EdgeId> = g.edges().iter().map(|e| e.id).collect();
    let n = k + edges.len();
    let root = g.vertices().iter().map(|v| v.id).min().expect("a type has a vertex");
    let var_of = |e: EdgeId| k + edges.iter().position(|&x| x == e).expect("edge of the type");

    let mut forms: BTreeMap<VertexId, Form> = BTreeMap::new();
    for (v, parent) in g.bfs(root) {
        let form = match parent {
            None => (0..k)
                .map(|i| {
                    let mut row = vec![Rat::zero(); n];
                    row[i] = Rat::one();
                    row
                })
                .collect(),
            Some((e, p)) => {
                let m = t.slope(e, p).ok_or(SmoothingError::UnsolvedSlopes)?;
                let mut f = forms[&p].clone();
                for (row, mi) in f.iter_mut().zip(m.coords()) {
                    row[var_of(e)] += Rat::from_integer(mi.clone());
                }
                f
            }
        };
        forms.insert(v, form);
    }

    let mut sys = LinearSystem::new(n);
    let frame = |cone: &Cone| c.frame_for(cone);
    let one = Rat::one();
    let zero = Rat::zero();

    for v in g.vertices() {
        in_cone(&mut sys, &frame(t.vertex_cone(v.id)), &forms[&v.id], &one);
    }
    for e in g.edges() {
        let f = frame(t.edge_cone(e.id));
        let [a, b] = e.ends;
        in_cone(&mut sys, &f, &forms[&a], &zero);
        in_cone(&mut sys, &f, &forms[&b], &zero);
        let sum = add_forms(&forms[&a], &forms[&b]);
        for i in 0..f.coords.rows() {
            sys.push(Constraint::ge(combine(&f.coords.row(i), &sum), one.clone()));
        }
        let mut len = vec![Rat::zero(); n];
        len[var_of(e.id)] = one.clone();
        sys.push(Constraint::ge(len, one.clone()));
    }
    for l in g.legs() {
        let f = frame(t.leg_cone(l.marking));
        let form = &forms[&l.vertex];
        let m = l.slope.to_rational();
        for i in 0..f.annihilator.rows() {
            sys.push(Constraint::eq(combine(&f.annihilator.row(i), form), Rat::zero()));
        }
        match f.coefficients(&m) {
            None => contradiction(&mut sys),
            Some(cm) => {
                for (i, cmi) in cm.iter().enumerate() {
                    let row = combine(&f.coords.row(i), form);
                    if cmi.is_negative() {
                        contradiction(&mut sys);
                    } else if cmi.is_positive() {
                        sys.push(Constraint::ge(row, zero.clone()));
                    } else {
                        sys.push(Constraint::ge(row, one.clone()));
                    }
                }
            }
        }
    }
    Ok(SmoothabilitySystem { system: sys, root, ambient_dim: k, edges, forms })
}

/// Decides smoothability by Fourier–Motzkin elimination and returns a
/// witness when one exists.
pub fn smoothable_lp(t: &CombinatorialType) -> Result<Option<Realization>, SmoothingError> {
    let s = smoothability_system(t)?;
    Ok(fourier_motzkin(&s.system).map(|z| s.realization(&z)))
}

/// The same decision by exact phase-one simplex.
pub fn smoothable_simplex(t: &CombinatorialType) -> Result<Option<Realization>, SmoothingError> {
    let s = smoothability_system(t)?;
    Ok(phase_one(&s.system).map(|z| s.realization(&z)))
}
