use num_traits::{Signed, Zero};

use super::Realization;
use crate::combtype::{CombinatorialType, ValidationReport};
use crate::linalg::{rat, Rat, RationalVector};

pub const EDGE_LENGTHS: &str = "edge lengths";
pub const EDGE_EQUATIONS: &str = "edge equations";
pub const VERTEX_INTERIOR: &str = "vertex interiority";
pub const EDGE_INTERIOR: &str = "edge interiority";
pub const LEG_INTERIOR: &str = "leg interiority";

/// Exact check of a realization. An open edge segment lies in the interior
/// of its cone iff both ends lie in the closed cone and the midpoint in the
/// interior. A leg ray `p + t·m` stays interior for all `t > 0` iff on every
/// generator both coefficients are nonnegative and not both zero.
pub fn verify_realization(t: &CombinatorialType, r: &Realization) -> ValidationReport {
    let c = &t.target;
    let g = &t.graph;
    let mut report = ValidationReport::default();

    let mut lengths = Vec::new();
    for e in g.edges() {
        match r.edge_lengths.get(&e.id) {
            Some(l) if l.is_positive() => {}
            Some(l) => lengths.push(format!("{} has length {l}", e.id)),
            None => lengths.push(format!("{} has no length", e.id)),
        }
    }
    for e in r.edge_lengths.keys() {
        if g.edge(*e).is_none() {
            lengths.push(format!("length given for unknown {e}"));
        }
    }
    report.push(EDGE_LENGTHS, lengths);

    let pos = |v| r.vertex_positions.get(&v).filter(|p: &&RationalVector| p.dim() == c.ambient_dim());

    let mut equations = Vec::new();
    for e in g.edges() {
        let [a, b] = e.ends;
        let (Some(pa), Some(pb), Some(l)) = (pos(a), pos(b), r.edge_lengths.get(&e.id)) else {
            equations.push(format!("{} is missing a position or length", e.id));
            continue;
        };
        match t.slope(e.id, a) {
            None => equations.push(format!("{} has no slope", e.id)),
            Some(m) => {
                if pa.add_scaled(l, &m.to_rational()) != *pb {
                    equations.push(format!("{b} is not {a} + {l}·{m}"));
                }
            }
        }
    }
    report.push(EDGE_EQUATIONS, equations);

    let mut vertices = Vec::new();
    for v in g.vertices() {
        match pos(v.id) {
            Some(p) if c.in_relative_interior(t.vertex_cone(v.id), p) => {}
            Some(p) => vertices.push(format!("{} at {p} is not interior to {}", v.id, t.vertex_cone(v.id))),
            None => vertices.push(format!("{} has no position", v.id)),
        }
    }
    report.push(VERTEX_INTERIOR, vertices);

    let closed =
        |cone, p: &RationalVector| c.coefficients_in(cone, p).is_some_and(|cs| cs.iter().all(|x| !x.is_negative()));
    let mut segments = Vec::new();
    for e in g.edges() {
        let (Some(pa), Some(pb)) = (pos(e.ends[0]), pos(e.ends[1])) else { continue };
        let cone = t.edge_cone(e.id);
        let mid = (pa + pb).scale(&rat(1, 2));
        if !closed(cone, pa) || !closed(cone, pb) || !c.in_relative_interior(cone, &mid) {
            segments.push(format!("{} leaves the interior of {cone}", e.id));
        }
    }
    report.push(EDGE_INTERIOR, segments);

    let mut legs = Vec::new();
    for l in g.legs() {
        let Some(p) = pos(l.vertex) else { continue };
        let cone = t.leg_cone(l.marking);
        let ok = match (c.coefficients_in(cone, p), c.coefficients_in(cone, &l.slope.to_rational())) {
            (Some(cp), Some(cm)) => cp
                .iter()
                .zip(&cm)
                .all(|(x, y): (&Rat, &Rat)| !x.is_negative() && !y.is_negative() && !(x.is_zero() && y.is_zero())),
            _ => false,
        };
        if !ok {
            legs.push(format!("leg {} leaves the interior of {cone}", l.marking));
        }
    }
    report.push(LEG_INTERIOR, legs);
    report
}
