//! The constructive lift: place one vertex, then walk the tree fixing each
//! edge length from the position already reached.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::report::check_sensitivity_consequences;
use super::verify::verify_realization;
use super::{Realization, SmoothingError};
use crate::combtype::{CombinatorialType, EdgeId, VertexId};
use crate::complex::{Cone, ConeComplex};
use crate::linalg::{rat, LatticeVector, Rat, RationalVector};

struct Step<'a> {
    c: &'a ConeComplex,
    sigma_e: &'a Cone,
    m: RationalVector,
}

impl Step<'_> {
    fn coefficients(&self, p: &RationalVector) -> Result<Vec<Rat>, String> {
        self.c.coefficients_in(self.sigma_e, p).ok_or_else(|| format!("{p} is not in the span of {}", self.sigma_e))
    }

    /// Moves into the interior of `σ_e` by half the largest admissible
    /// length (1 when nothing bounds it).
    fn grow(&self, p: &RationalVector) -> Result<(Rat, RationalVector), String> {
        let mu = self.coefficients(p)?;
        let a = self.coefficients(&self.m)?;
        let mut bound: Option<Rat> = None;
        for (mi, ai) in mu.iter().zip(&a) {
            if mi.is_negative() || (mi.is_zero() && !ai.is_positive()) {
                return Err(format!("cannot enter the interior of {} from {p}", self.sigma_e));
            }
            if ai.is_negative() {
                let b = mi / -ai;
                bound = Some(bound.map_or(b.clone(), |x| x.min(b)));
            }
        }
        let l = bound.map_or_else(Rat::one, |b| b * rat(1, 2));
        let q = p.add_scaled(&l, &self.m);
        Ok((l, q))
    }

    /// Leaves the interior of `σ_e` for its facet `tau`: the length is
    /// `μ₀/a₀` where `a₀` is the coefficient of the slope pointing back
    /// along the generator `u₀` missing from `tau`.
    fn drop_to(&self, p: &RationalVector, tau: &Cone) -> Result<(Rat, RationalVector), String> {
        let mu = self.coefficients(p)?;
        let a = self.coefficients(&self.m)?;
        let i0 = self.sigma_e.ids().iter().position(|&i| !tau.contains_ray(i)).expect("tau is a proper face");
        let a0 = -&a[i0];
        if !a0.is_positive() {
            return Err(format!("slope does not point towards {tau}"));
        }
        let l = &mu[i0] / &a0;
        if !l.is_positive() {
            return Err(format!("{p} already lies on {tau}"));
        }
        let q = p.add_scaled(&l, &self.m);
        if !self.c.in_relative_interior(tau, &q) {
            return Err(format!("landing point {q} is not interior to {tau}"));
        }
        Ok((l, q))
    }
}

fn is_facet(tau: &Cone, sigma: &Cone) -> bool {
    tau.is_face_of(sigma) && tau.dim() + 1 == sigma.dim()
}

/// Builds a realization of a type that passes
/// [`check_sensitivity_consequences`]. The smallest vertex sits at the sum
/// of its cone's generators. Along each edge `v₁ → v₂`:
/// if `σ_{v₂} = σ_e`, any short enough length works and half the maximal
/// one is used; if `σ_{v₁} = σ_e` and `σ_{v₂}` is a facet, the length is
/// forced; otherwise the edge is split at a temporary point of `Int σ_e`
/// and both rules are applied in turn.
pub fn smooth_construct(t: &CombinatorialType) -> Result<Realization, SmoothingError> {
    let g = &t.graph;
    if !g.edges().is_empty() && t.edge_slopes.is_none() {
        return Err(SmoothingError::UnsolvedSlopes);
    }
    let report = check_sensitivity_consequences(t)?;
    if !report.passed() {
        return Err(SmoothingError::Insensitive(report));
    }
    let c = t.target.as_ref();
    let root = g.vertices().iter().map(|v| v.id).min().expect("a type has a vertex");
    let mut positions: BTreeMap<VertexId, RationalVector> = BTreeMap::new();
    let mut lengths: BTreeMap<EdgeId, Rat> = BTreeMap::new();
    for (v, parent) in g.bfs(root) {
        let Some((e, p)) = parent else {
            positions.insert(v, c.barycenter(t.vertex_cone(v)));
            continue;
        };
        let m: &LatticeVector = t.slope(e, p).ok_or(SmoothingError::UnsolvedSlopes)?;
        let step = Step { c, sigma_e: t.edge_cone(e), m: m.to_rational() };
        let (from, to) = (t.vertex_cone(p), t.vertex_cone(v));
        let start = &positions[&p];
        let result = if to == step.sigma_e {
            step.grow(start)
        } else if from == step.sigma_e && is_facet(to, step.sigma_e) {
            step.drop_to(start, to)
        } else if is_facet(to, step.sigma_e) {
            step.grow(start).and_then(|(l1, mid)| step.drop_to(&mid, to).map(|(l2, q)| (l1 + l2, q)))
        } else {
            Err(format!("{to} is neither {} nor one of its facets", step.sigma_e))
        };
        let (l, q) = result.map_err(|reason| SmoothingError::Construction { edge: e, reason })?;
        lengths.insert(e, l);
        positions.insert(v, q);
    }
    let r = Realization { root_vertex: root, edge_lengths: lengths, vertex_positions: positions };
    let check = verify_realization(t, &r);
    if !check.is_valid() {
        return Err(SmoothingError::Unverified(check.to_string()));
    }
    Ok(r)
}
