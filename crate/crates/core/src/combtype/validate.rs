//! Invariant checks on combinatorial types and Gathmann's condition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};

use super::{CombinatorialType, EdgeId, TypeError, VertexId};
use crate::linalg::{rat_from_int, Rat};

/// Outcome of one invariant, with the offending objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub failures: Vec<String>,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(InvariantCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().flat_map(|c| c.failures.iter().map(move |f| format!("{}: {f}", c.name))).collect()
    }

    pub(crate) fn push(&mut self, name: &'static str, failures: Vec<String>) {
        self.checks.push(InvariantCheck { name, failures });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            if c.passed() {
                writeln!(f, "{}: ok", c.name)?;
            } else {
                writeln!(f, "{}: FAILED", c.name)?;
                for x in &c.failures {
                    writeln!(f, "  {x}")?;
                }
            }
        }
        Ok(())
    }
}

pub const FACE_CONDITION: &str = "face condition";
pub const SUPPORT: &str = "slope support";
pub const POSITIVITY: &str = "positivity";
pub const LEG_MEMBERSHIP: &str = "leg slope membership";
pub const ANTISYMMETRY: &str = "antisymmetry";
pub const BALANCING: &str = "balancing";

/// Checks the face condition, slope support, positivity, leg membership,
/// antisymmetry and balancing. Slope checks report a single failure when the
/// edge slopes are missing.
pub fn validate_type(t: &CombinatorialType) -> ValidationReport {
    let mut report = ValidationReport::default();
    let c = &t.target;
    let g = &t.graph;

    let mut face = Vec::new();
    for e in g.edges() {
        for v in e.ends {
            if !t.vertex_cone(v).is_face_of(t.edge_cone(e.id)) {
                face.push(format!("cone of {v} is not a face of the cone of {}", e.id));
            }
        }
    }
    for l in g.legs() {
        if !t.vertex_cone(l.vertex).is_face_of(t.leg_cone(l.marking)) {
            face.push(format!("cone of {} is not a face of the cone of leg {}", l.vertex, l.marking));
        }
    }
    report.push(FACE_CONDITION, face);

    let mut legs = Vec::new();
    for l in g.legs() {
        match c.coefficients_in(t.leg_cone(l.marking), &l.slope.to_rational()) {
            Some(cs) if cs.iter().all(|x| !x.is_negative()) => {}
            _ => legs.push(format!("leg {} slope {} is not in its cone", l.marking, l.slope)),
        }
    }
    report.push(LEG_MEMBERSHIP, legs);

    let Some(slopes) = &t.edge_slopes else {
        let missing = if g.edges().is_empty() { Vec::new() } else { vec!["edge slopes not solved".to_string()] };
        for name in [SUPPORT, POSITIVITY, ANTISYMMETRY, BALANCING] {
            report.push(name, missing.clone());
        }
        return report;
    };

    let mut support = Vec::new();
    let mut positivity = Vec::new();
    let mut antisym = Vec::new();
    // per-ray coefficients of each oriented slope, when in span of σ_e
    let mut coefs: BTreeMap<(EdgeId, VertexId), Vec<Rat>> = BTreeMap::new();
    for e in g.edges() {
        let cone = t.edge_cone(e.id);
        for v in e.ends {
            let Some(m) = slopes.get(&(e.id, v)) else {
                antisym.push(format!("{} has no slope oriented away from {v}", e.id));
                continue;
            };
            let Some(local) = c.coefficients_in(cone, &m.to_rational()) else {
                support.push(format!("slope {m} of {} is not supported on its cone", e.id));
                continue;
            };
            let mut dense = vec![Rat::zero(); c.num_rays()];
            for (&i, x) in cone.ids().iter().zip(&local) {
                dense[i] = x.clone();
            }
            for &i in cone.ids() {
                if !t.vertex_cone(v).contains_ray(i) && !dense[i].is_positive() {
                    positivity.push(format!("slope of {} away from {v} is not positive along ray {i}", e.id));
                }
            }
            coefs.insert((e.id, v), dense);
        }
        if let (Some(a), Some(b)) = (slopes.get(&(e.id, e.ends[0])), slopes.get(&(e.id, e.ends[1]))) {
            if a != &-b {
                antisym.push(format!("slopes {a} and {b} on {} are not opposite", e.id));
            }
        }
    }
    report.push(SUPPORT, support);
    report.push(POSITIVITY, positivity);
    report.push(ANTISYMMETRY, antisym);

    let mut balancing = Vec::new();
    match t.leg_contributions() {
        Err(err) => balancing.push(err.to_string()),
        Ok(leg_coefs) => {
            for v in g.vertices() {
                for i in 0..c.num_rays() {
                    let mut lhs: Rat = g.legs_at(v.id).iter().map(|l| leg_coefs[&l.marking][i].clone()).sum();
                    let mut known = true;
                    for (e, _) in g.neighbours(v.id) {
                        match coefs.get(&(e, v.id)) {
                            Some(x) => lhs += &x[i],
                            None => known = false,
                        }
                    }
                    if known && lhs != rat_from_int(&v.degree[i]) {
                        balancing.push(format!("{} in direction {i}: {lhs} != {}", v.id, v.degree[i]));
                    }
                }
            }
        }
    }
    report.push(BALANCING, balancing);
    report
}

/// Gathmann's condition. For each ray `i` and each connected component `C`
/// of the vertices whose cone contains ray `i`, the legs on `C` plus the
/// slopes of edges leaving `C` must account for the degree of `C` along
/// `i`. Objects at vertices away from ray `i` must meet it only through
/// legs: edges between two such vertices avoid ray `i`, and a leg there
/// touches ray `i` exactly when its tangency along `i` is positive.
#[allow(clippy::needless_range_loop)] // i is a ray id, not a position in leg_coefs
pub fn gathmann_failures(t: &CombinatorialType) -> Result<Vec<String>, TypeError> {
    let slopes = t.edge_slopes.as_ref().ok_or(TypeError::UnsolvedSlopes)?;
    let c = &t.target;
    let g = &t.graph;
    let leg_coefs = t.leg_contributions()?;
    let mut failures = Vec::new();
    for i in 0..c.num_rays() {
        let inside: BTreeSet<VertexId> =
            g.vertices().iter().map(|v| v.id).filter(|v| t.vertex_cone(*v).contains_ray(i)).collect();
        let mut unvisited = inside.clone();
        while let Some(&start) = unvisited.iter().next() {
            let mut component = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for (_, w) in g.neighbours(v) {
                    if inside.contains(&w) && component.insert(w) {
                        stack.push(w);
                    }
                }
            }
            for v in &component {
                unvisited.remove(v);
            }
            let mut lhs = Rat::zero();
            let mut degree = Rat::zero();
            for &v in &component {
                degree += rat_from_int(&g.vertex(v).expect("vertex").degree[i]);
                for l in g.legs_at(v) {
                    lhs += &leg_coefs[&l.marking][i];
                }
                for (e, w) in g.neighbours(v) {
                    if component.contains(&w) {
                        continue;
                    }
                    let m = slopes.get(&(e, v)).ok_or(TypeError::UnsolvedSlopes)?;
                    match c.coefficients_in(t.edge_cone(e), &m.to_rational()) {
                        Some(local) => {
                            if let Some(pos) = t.edge_cone(e).ids().iter().position(|&r| r == i) {
                                lhs += &local[pos];
                            }
                        }
                        None => failures.push(format!("slope of {e} is not supported on its cone")),
                    }
                }
            }
            if lhs != degree {
                let ids: Vec<String> = component.iter().map(ToString::to_string).collect();
                failures.push(format!("ray {i}, component {{{}}}: {lhs} != {degree}", ids.join(",")));
            }
        }

        for e in g.edges() {
            let [a, b] = e.ends;
            if !inside.contains(&a) && !inside.contains(&b) && t.edge_cone(e.id).contains_ray(i) {
                failures.push(format!("{} meets ray {i} away from the markings", e.id));
            }
        }
        for l in g.legs() {
            if inside.contains(&l.vertex) {
                continue;
            }
            let touches = t.leg_cone(l.marking).contains_ray(i);
            let positive = leg_coefs[&l.marking][i].is_positive();
            if touches != positive {
                failures.push(format!("leg {} along ray {i}: cone and tangency disagree", l.marking));
            }
        }
    }
    Ok(failures)
}

pub fn check_gathmann(t: &CombinatorialType) -> Result<bool, TypeError> {
    Ok(gathmann_failures(t)?.is_empty())
}
