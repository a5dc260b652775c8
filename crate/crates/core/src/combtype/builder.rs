use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    with_induced_degrees, CombinatorialType, DecoratedGraph, Edge, EdgeId, EdgeSlopes, Leg, TypeError, Vertex, VertexId,
};
use crate::complex::{Cone, ConeComplex};
use crate::linalg::{Int, LatticeVector};

/// Incremental construction of a type from plain ids.
#[derive(Clone, Debug)]
pub struct TypeBuilder {
    target: Arc<ConeComplex>,
    vertices: Vec<(VertexId, Cone, Vec<Int>)>,
    edges: Vec<(Edge, Cone, Option<LatticeVector>)>,
    legs: Vec<(Leg, Cone)>,
}

impl TypeBuilder {
    pub fn new(target: Arc<ConeComplex>) -> Self {
        TypeBuilder { target, vertices: Vec::new(), edges: Vec::new(), legs: Vec::new() }
    }

    /// A vertex of degree zero.
    pub fn vertex(self, id: usize, cone: &[usize]) -> Self {
        let d = vec![Int::from(0); self.target.num_rays()];
        self.vertex_with_degree(id, cone, d)
    }

    pub fn vertex_with_degree(mut self, id: usize, cone: &[usize], degree: Vec<Int>) -> Self {
        self.vertices.push((VertexId(id), Cone::new(cone.to_vec()), degree));
        self
    }

    pub fn edge(mut self, id: usize, a: usize, b: usize, cone: &[usize]) -> Self {
        self.edges.push((Edge { id: EdgeId(id), ends: [VertexId(a), VertexId(b)] }, Cone::new(cone.to_vec()), None));
        self
    }

    /// An edge with its slope oriented from `a` to `b`.
    pub fn edge_with_slope(mut self, id: usize, a: usize, b: usize, cone: &[usize], slope: LatticeVector) -> Self {
        self.edges.push((
            Edge { id: EdgeId(id), ends: [VertexId(a), VertexId(b)] },
            Cone::new(cone.to_vec()),
            Some(slope),
        ));
        self
    }

    pub fn leg(mut self, marking: usize, vertex: usize, slope: LatticeVector, cone: &[usize]) -> Self {
        self.legs.push((Leg { marking, vertex: VertexId(vertex), slope }, Cone::new(cone.to_vec())));
        self
    }

    /// Keeps the given degrees. Slopes are stored only if every edge has one.
    pub fn build(self) -> Result<CombinatorialType, TypeError> {
        let all_slopes = self.edges.iter().all(|(_, _, s)| s.is_some());
        let mut slopes = EdgeSlopes::new();
        for (e, _, s) in &self.edges {
            if let Some(m) = s {
                slopes.insert((e.id, e.ends[0]), m.clone());
                slopes.insert((e.id, e.ends[1]), -m);
            }
        }
        let vertex_cones = self.vertices.iter().map(|(v, c, _)| (*v, c.clone())).collect();
        let edge_cones = self.edges.iter().map(|(e, c, _)| (e.id, c.clone())).collect();
        let leg_cones: BTreeMap<usize, Cone> = self.legs.iter().map(|(l, c)| (l.marking, c.clone())).collect();
        let g = DecoratedGraph::new(
            self.vertices.into_iter().map(|(id, _, degree)| Vertex { id, degree }).collect(),
            self.edges.into_iter().map(|(e, _, _)| e).collect(),
            self.legs.into_iter().map(|(l, _)| l).collect(),
        )?;
        CombinatorialType::new(g, self.target, vertex_cones, edge_cones, leg_cones, all_slopes.then_some(slopes))
    }

    /// Builds with every slope given and degrees induced by them.
    pub fn build_induced(self) -> Result<CombinatorialType, TypeError> {
        with_induced_degrees(&self.build()?)
    }
}
