//! Combinatorial types of genus-zero tropical stable maps.

mod balancing;
mod builder;
mod lift;
mod pushforward;
mod slopes;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{Cone, ConeComplex};
use crate::linalg::{Int, LatticeVector, Rat};
use crate::subdivision::SubdivisionError;

pub(crate) use balancing::solve_on_graph;
pub use balancing::{balance, solve_balancing, solve_balancing_from, with_induced_degrees, BalancingSolution};
pub use builder::TypeBuilder;
pub use lift::{lift_numerical_data, NumericalData};
pub use pushforward::pushforward_type;
pub use slopes::{collect_sensitive_slopes, SensitiveSlopes};
pub use validate::{check_gathmann, gathmann_failures, validate_type, InvariantCheck, ValidationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("{0} refers to unknown vertex {1}")]
    UnknownVertex(String, VertexId),
    #[error("marking labels must be exactly 1..=n: {0}")]
    BadMarkings(String),
    #[error("{what} has length {found}, expected {expected}")]
    BadLength { what: String, expected: usize, found: usize },
    #[error("no cone assigned to {0}")]
    MissingCone(String),
    #[error("cone {cone} assigned to {what} is not a cone of the target")]
    UnknownCone { what: String, cone: Cone },
    #[error("leg {0} has a slope outside the target support")]
    LegOutsideSupport(usize),
    #[error("global balancing fails in direction {direction}: legs give {legs}, degrees give {degrees}")]
    GlobalBalancing { direction: usize, legs: Box<Rat>, degrees: Box<Rat> },
    #[error("solved slope on {edge} is not a lattice vector")]
    NonIntegralSlope { edge: EdgeId },
    #[error("solved slope on {edge} has a component along ray {ray}, which is not a generator of its cone")]
    OffSupport { edge: EdgeId, ray: usize },
    #[error("slope of {0} is not in the span of its cone")]
    SlopeOutsideCone(EdgeId),
    #[error("degree of {0} induced by the slopes is not integral")]
    NonIntegralDegree(VertexId),
    #[error("edge slopes have not been solved")]
    UnsolvedSlopes,
    #[error("non-stabilizable pushforward: {0}")]
    NonStabilizable(String),
    #[error("not a single stellar subdivision: {0}")]
    NotSingleStellar(String),
    #[error("tangency {0} lies outside the support")]
    AlphaOutsideSupport(LatticeVector),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    /// Degree against each ray of the target.
    pub degree: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub ends: [VertexId; 2],
}

impl Edge {
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leg {
    /// Marking label, 1-based.
    pub marking: usize,
    pub vertex: VertexId,
    pub slope: LatticeVector,
}

/// A genus-zero decorated tree. Vertices sorted by id, edges by id, legs by
/// marking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
}

impl DecoratedGraph {
    pub fn new(mut vertices: Vec<Vertex>, mut edges: Vec<Edge>, mut legs: Vec<Leg>) -> Result<Self, TypeError> {
        vertices.sort_by_key(|v| v.id);
        edges.sort_by_key(|e| e.id);
        legs.sort_by_key(|l| l.marking);
        if let Some(w) = vertices.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(TypeError::DuplicateId(w[0].id.to_string()));
        }
        if let Some(w) = edges.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(TypeError::DuplicateId(w[0].id.to_string()));
        }
        if vertices.is_empty() {
            return Err(TypeError::NotATree("no vertices".into()));
        }
        let ids: BTreeSet<VertexId> = vertices.iter().map(|v| v.id).collect();
        for e in &edges {
            for v in e.ends {
                if !ids.contains(&v) {
                    return Err(TypeError::UnknownVertex(e.id.to_string(), v));
                }
            }
            if e.ends[0] == e.ends[1] {
                return Err(TypeError::NotATree(format!("{} is a loop", e.id)));
            }
        }
        for l in &legs {
            if !ids.contains(&l.vertex) {
                return Err(TypeError::UnknownVertex(format!("leg {}", l.marking), l.vertex));
            }
        }
        for (i, l) in legs.iter().enumerate() {
            if l.marking != i + 1 {
                return Err(TypeError::BadMarkings(format!("found label {} at position {}", l.marking, i + 1)));
            }
        }
        if edges.len() + 1 != vertices.len() {
            return Err(TypeError::NotATree(format!("{} vertices but {} edges", vertices.len(), edges.len())));
        }
        let g = DecoratedGraph { vertices, edges, legs };
        if g.bfs(g.vertices[0].id).len() != g.vertices.len() {
            return Err(TypeError::NotATree("disconnected".into()));
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.binary_search_by_key(&id, |v| v.id).ok().map(|i| &self.vertices[i])
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok().map(|i| &self.edges[i])
    }

    /// Incident edges with the neighbour across each, sorted by edge id.
    pub fn neighbours(&self, v: VertexId) -> Vec<(EdgeId, VertexId)> {
        self.edges.iter().filter(|e| e.ends.contains(&v)).map(|e| (e.id, e.other(v))).collect()
    }

    pub fn legs_at(&self, v: VertexId) -> Vec<&Leg> {
        self.legs.iter().filter(|l| l.vertex == v).collect()
    }

    /// Vertices in breadth-first order from `root`, with the edge to the
    /// parent (None for the root).
    pub fn bfs(&self, root: VertexId) -> Vec<(VertexId, Option<(EdgeId, VertexId)>)> {
        let mut seen = BTreeSet::from([root]);
        let mut order = vec![(root, None)];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for (e, w) in self.neighbours(v) {
                if seen.insert(w) {
                    order.push((w, Some((e, v))));
                    queue.push_back(w);
                }
            }
        }
        order
    }

    pub(crate) fn vertices_mut(&mut self) -> &mut Vec<Vertex> {
        &mut self.vertices
    }

    pub(crate) fn edges_mut(&mut self) -> &mut Vec<Edge> {
        &mut self.edges
    }
}

/// Slopes keyed by (edge, vertex the edge is oriented away from).
pub type EdgeSlopes = BTreeMap<(EdgeId, VertexId), LatticeVector>;

/// A decorated tree with cones on every vertex, edge and leg, degree
/// vectors, leg slopes and optionally solved edge slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialType {
    pub graph: DecoratedGraph,
    pub target: Arc<ConeComplex>,
    pub vertex_cones: BTreeMap<VertexId, Cone>,
    pub edge_cones: BTreeMap<EdgeId, Cone>,
    /// Keyed by marking label.
    pub leg_cones: BTreeMap<usize, Cone>,
    pub edge_slopes: Option<EdgeSlopes>,
}

impl CombinatorialType {
    /// Structural checks only: every object has a cone of the target, and
    /// vector lengths match the target. Geometric invariants are the job of
    /// [`validate_type`].
    pub fn new(
        graph: DecoratedGraph,
        target: Arc<ConeComplex>,
        vertex_cones: BTreeMap<VertexId, Cone>,
        edge_cones: BTreeMap<EdgeId, Cone>,
        leg_cones: BTreeMap<usize, Cone>,
        edge_slopes: Option<EdgeSlopes>,
    ) -> Result<Self, TypeError> {
        let t = CombinatorialType { graph, target, vertex_cones, edge_cones, leg_cones, edge_slopes };
        t.check_structure()?;
        Ok(t)
    }

    fn check_structure(&self) -> Result<(), TypeError> {
        let c = &self.target;
        let check_cone = |what: String, cone: Option<&Cone>| -> Result<(), TypeError> {
            match cone {
                None => Err(TypeError::MissingCone(what)),
                Some(cone) if !c.contains_cone(cone) => Err(TypeError::UnknownCone { what, cone: cone.clone() }),
                Some(_) => Ok(()),
            }
        };
        for v in self.graph.vertices() {
            check_cone(v.id.to_string(), self.vertex_cones.get(&v.id))?;
            if v.degree.len() != c.num_rays() {
                return Err(TypeError::BadLength {
                    what: format!("degree of {}", v.id),
                    expected: c.num_rays(),
                    found: v.degree.len(),
                });
            }
        }
        for e in self.graph.edges() {
            check_cone(e.id.to_string(), self.edge_cones.get(&e.id))?;
        }
        for l in self.graph.legs() {
            check_cone(format!("leg {}", l.marking), self.leg_cones.get(&l.marking))?;
            if l.slope.dim() != c.ambient_dim() {
                return Err(TypeError::BadLength {
                    what: format!("slope of leg {}", l.marking),
                    expected: c.ambient_dim(),
                    found: l.slope.dim(),
                });
            }
        }
        if let Some(slopes) = &self.edge_slopes {
            for ((e, v), m) in slopes {
                let edge =
                    self.graph.edge(*e).ok_or_else(|| TypeError::DuplicateId(format!("slope for unknown {e}")))?;
                if !edge.ends.contains(v) {
                    return Err(TypeError::UnknownVertex(format!("slope of {e}"), *v));
                }
                if m.dim() != c.ambient_dim() {
                    return Err(TypeError::BadLength {
                        what: format!("slope of {e}"),
                        expected: c.ambient_dim(),
                        found: m.dim(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn vertex_cone(&self, v: VertexId) -> &Cone {
        &self.vertex_cones[&v]
    }

    pub fn edge_cone(&self, e: EdgeId) -> &Cone {
        &self.edge_cones[&e]
    }

    pub fn leg_cone(&self, marking: usize) -> &Cone {
        &self.leg_cones[&marking]
    }

    /// Slope of `e` oriented away from `from`.
    pub fn slope(&self, e: EdgeId, from: VertexId) -> Option<&LatticeVector> {
        self.edge_slopes.as_ref()?.get(&(e, from))
    }

    pub fn with_slopes(mut self, slopes: EdgeSlopes) -> Self {
        self.edge_slopes = Some(slopes);
        self
    }

    /// Per-ray contributions `p_i(α)` of every leg, by marking.
    pub fn leg_contributions(&self) -> Result<BTreeMap<usize, Vec<Rat>>, TypeError> {
        self.graph
            .legs()
            .iter()
            .map(|l| {
                self.target
                    .expansion(&l.slope.to_rational())
                    .map(|e| (l.marking, e))
                    .ok_or(TypeError::LegOutsideSupport(l.marking))
            })
            .collect()
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn graph_structure_checks() {
        let v = |i| Vertex { id: VertexId(i), degree: ints(&[0]) };
        let e = |i, a, b| Edge { id: EdgeId(i), ends: [VertexId(a), VertexId(b)] };
        assert!(DecoratedGraph::new(vec![v(0)], vec![], vec![]).is_ok());
        assert!(matches!(DecoratedGraph::new(vec![v(0), v(1)], vec![], vec![]), Err(TypeError::NotATree(_))));
        assert!(matches!(
            DecoratedGraph::new(vec![v(0), v(1), v(2)], vec![e(0, 0, 1), e(1, 1, 0)], vec![]),
            Err(TypeError::NotATree(_))
        ));
        let leg = |m| Leg { marking: m, vertex: VertexId(0), slope: lv(&[0]) };
        assert!(matches!(DecoratedGraph::new(vec![v(0)], vec![], vec![leg(2)]), Err(TypeError::BadMarkings(_))));
        assert!(DecoratedGraph::new(vec![v(0)], vec![], vec![leg(2), leg(1)]).is_ok());
    }

    #[test]
    fn paper_fixture_builds() {
        let t = paper_type();
        assert_eq!(t.graph.neighbours(VertexId(3)), vec![(EdgeId(1), VertexId(1)), (EdgeId(2), VertexId(2))]);
        let order: Vec<VertexId> = t.graph.bfs(VertexId(1)).iter().map(|x| x.0).collect();
        assert_eq!(order, vec![VertexId(1), VertexId(3), VertexId(2)]);
    }
}
