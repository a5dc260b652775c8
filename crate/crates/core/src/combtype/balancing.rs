//! The balancing equations on a tree, solved by leaf-to-root propagation.
//!
//! For a vertex `v` and ray `i` of the target:
//! `Σ_{legs at v} p_i(α) + Σ_{edges e at v} (m_{v→e})_i = d_{v,i}`,
//! where `(m)_i` is the coefficient of the slope along ray `i`.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{CombinatorialType, DecoratedGraph, EdgeId, EdgeSlopes, TypeError, VertexId};
use crate::complex::ConeComplex;
use crate::linalg::{rat_from_int, Rat, RationalVector};

/// Per-ray slope coefficients for both orientations of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancingSolution {
    pub coefficients: BTreeMap<(EdgeId, VertexId), Vec<Rat>>,
}

impl BalancingSolution {
    /// Rays along which the slope of `e` has a nonzero coefficient.
    pub fn support(&self, e: EdgeId, from: VertexId) -> Vec<usize> {
        self.coefficients[&(e, from)].iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect()
    }

    /// Ambient slope `Σ_i c_i u_i`.
    pub fn ambient(&self, target: &ConeComplex, e: EdgeId, from: VertexId) -> RationalVector {
        self.coefficients[&(e, from)]
            .iter()
            .enumerate()
            .fold(RationalVector::zero(target.ambient_dim()), |acc, (i, c)| {
                acc.add_scaled(c, &target.ray(i).to_rational())
            })
    }
}

pub fn solve_balancing(t: &CombinatorialType) -> Result<BalancingSolution, TypeError> {
    solve_balancing_from(t, t.graph.vertices()[0].id)
}

pub fn solve_balancing_from(t: &CombinatorialType, root: VertexId) -> Result<BalancingSolution, TypeError> {
    solve_on_graph(&t.graph, &t.target, root)
}

/// Solves the balancing equations using only the graph, degrees and leg
/// slopes; no cone assignment is needed.
pub(crate) fn solve_on_graph(
    g: &DecoratedGraph,
    target: &ConeComplex,
    root: VertexId,
) -> Result<BalancingSolution, TypeError> {
    let n = target.num_rays();
    // right-hand side d_v - Σ legs, per vertex
    let mut rhs: BTreeMap<VertexId, Vec<Rat>> =
        g.vertices().iter().map(|v| (v.id, v.degree.iter().map(rat_from_int).collect())).collect();
    let mut leg_totals = vec![Rat::zero(); n];
    for l in g.legs() {
        let e = target.expansion(&l.slope.to_rational()).ok_or(TypeError::LegOutsideSupport(l.marking))?;
        let r = rhs.get_mut(&l.vertex).expect("leg vertex exists");
        for i in 0..n {
            r[i] -= &e[i];
            leg_totals[i] += &e[i];
        }
    }
    for (i, legs) in leg_totals.into_iter().enumerate() {
        let degrees: Rat = g.vertices().iter().map(|v| rat_from_int(&v.degree[i])).sum();
        if legs != degrees {
            return Err(TypeError::GlobalBalancing { direction: i, legs: Box::new(legs), degrees: Box::new(degrees) });
        }
    }

    let order = g.bfs(root);
    let mut coefficients = BTreeMap::new();
    // leaves first: the slope from v towards its parent is whatever is left
    // of the vertex equation after the edges to its children are counted
    for (v, parent) in order.iter().rev() {
        let Some((e, p)) = parent else { continue };
        let r = rhs[v].clone();
        coefficients.insert((*e, *v), r.clone());
        coefficients.insert((*e, *p), r.iter().map(|x| -x).collect::<Vec<_>>());
        let pr = rhs.get_mut(p).expect("parent exists");
        for i in 0..n {
            // the parent sees the edge oriented away from it, i.e. -r
            pr[i] += &r[i];
        }
    }
    assert!(rhs[&root].iter().all(Zero::is_zero), "root equation must close once global balancing holds");
    Ok(BalancingSolution { coefficients })
}

/// Solves the balancing equations and stores the ambient slopes, checking
/// that each is a lattice vector supported on its edge cone.
pub fn balance(t: &CombinatorialType) -> Result<CombinatorialType, TypeError> {
    let sol = solve_balancing(t)?;
    let mut slopes = EdgeSlopes::new();
    for (&(e, from), coefs) in &sol.coefficients {
        let cone = t.edge_cone(e);
        if let Some(ray) = (0..coefs.len()).find(|&i| !coefs[i].is_zero() && !cone.contains_ray(i)) {
            return Err(TypeError::OffSupport { edge: e, ray });
        }
        let m = sol.ambient(&t.target, e, from).to_lattice().ok_or(TypeError::NonIntegralSlope { edge: e })?;
        slopes.insert((e, from), m);
    }
    Ok(t.clone().with_slopes(slopes))
}

/// Replaces every vertex degree by the one the stored slopes and legs
/// balance against, so the result satisfies the balancing equations by
/// construction.
pub fn with_induced_degrees(t: &CombinatorialType) -> Result<CombinatorialType, TypeError> {
    let c = &t.target;
    let legs = t.leg_contributions()?;
    let mut out = t.clone();
    for v in out.graph.vertices_mut() {
        let mut d = vec![Rat::zero(); c.num_rays()];
        for l in t.graph.legs_at(v.id) {
            for (x, y) in d.iter_mut().zip(&legs[&l.marking]) {
                *x += y;
            }
        }
        for (e, _) in t.graph.neighbours(v.id) {
            let m = t.slope(e, v.id).ok_or(TypeError::UnsolvedSlopes)?;
            let cone = t.edge_cone(e);
            let local = c.coefficients_in(cone, &m.to_rational()).ok_or(TypeError::SlopeOutsideCone(e))?;
            for (&i, x) in cone.ids().iter().zip(local) {
                d[i] += x;
            }
        }
        v.degree = d
            .into_iter()
            .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(TypeError::NonIntegralDegree(v.id)) })
            .collect::<Result<_, _>>()?;
    }
    Ok(out)
}
