//! Enumeration of combinatorial types for given numerical data, up to
//! isomorphism of decorated trees.
//!
//! Which degree vectors a vertex may carry is a geometric question; here it
//! is an explicit input ([`DegreeCatalogue`]), so any sensitivity derived
//! from the output is relative to that catalogue.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Signed;
use rayon::prelude::*;
use thiserror::Error;

use crate::combtype::{
    balance, check_gathmann, collect_sensitive_slopes, solve_on_graph, validate_type, CombinatorialType,
    DecoratedGraph, Edge, EdgeId, EdgeSlopes, Leg, NumericalData, TypeError, Vertex, VertexId,
};
use crate::complex::{minimal_containing_cone, Cone, ConeComplex};
use crate::linalg::{rat_from_int, Int, LatticeVector};
use crate::subdivision::{sensitize, single_ray_weights, Subdivision, SubdivisionError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error("degree atom {0:?} has the wrong length")]
    BadAtom(Vec<Int>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCatalogue {
    /// Allowed per-vertex degree vectors, one entry per target ray.
    pub atoms: Vec<Vec<Int>>,
    pub max_vertices: usize,
}

/// All labelled trees on `n` vertices, as edge lists, via Prüfer codes.
pub fn labelled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    match n {
        0 => return Vec::new(),
        1 => return vec![Vec::new()],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let mut out = Vec::new();
    let len = n - 2;
    let total = n.pow(len as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % n);
            c /= n;
        }
        out.push(prufer_decode(&seq, n));
    }
    out
}

fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// One or two centres, found by peeling leaves.
fn centres(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// AHU code of the tree rooted at `v`, with vertex labels.
fn rooted_code(adj: &[Vec<usize>], labels: &[String], v: usize, parent: Option<usize>) -> String {
    let mut children: Vec<String> =
        adj[v].iter().filter(|&&w| Some(w) != parent).map(|&w| rooted_code(adj, labels, w, Some(v))).collect();
    children.sort();
    format!("({}{})", labels[v], children.concat())
}

/// Canonical code of an unlabelled shape.
pub fn shape_code(n: usize, edges: &[(usize, usize)]) -> String {
    let adj = adjacency(n, edges);
    let labels = vec![String::new(); n];
    centres(&adj).into_iter().map(|c| rooted_code(&adj, &labels, c, None)).min().unwrap_or_default()
}

fn vertex_label(t: &CombinatorialType, v: VertexId) -> String {
    let deg: Vec<String> = t.graph.vertex(v).expect("vertex").degree.iter().map(Int::to_string).collect();
    let cone: Vec<String> = t.vertex_cone(v).ids().iter().map(usize::to_string).collect();
    let legs: Vec<String> = t.graph.legs_at(v).iter().map(|l| l.marking.to_string()).collect();
    format!("{}|{}|{}", deg.join(","), cone.join("."), legs.join(","))
}

/// Canonical code of a type and the isomorphic type with vertices numbered
/// from 1 in canonical preorder; the edge to a vertex's parent gets that
/// vertex's number minus one. Markings are kept.
pub fn canonical_form(t: &CombinatorialType) -> (String, CombinatorialType) {
    let ids: Vec<VertexId> = t.graph.vertices().iter().map(|v| v.id).collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let edges: Vec<(usize, usize)> = t.graph.edges().iter().map(|e| (index[&e.ends[0]], index[&e.ends[1]])).collect();
    let adj = adjacency(ids.len(), &edges);
    let labels: Vec<String> = ids.iter().map(|&v| vertex_label(t, v)).collect();
    let (code, root) =
        centres(&adj).into_iter().map(|c| (rooted_code(&adj, &labels, c, None), c)).min().expect("a type has a vertex");

    // preorder with children in code order
    let mut order: Vec<(usize, Option<usize>)> = Vec::new();
    let mut stack = vec![(root, None)];
    while let Some((v, parent)) = stack.pop() {
        order.push((v, parent));
        let mut children: Vec<(String, usize)> = adj[v]
            .iter()
            .filter(|&&w| Some(w) != parent)
            .map(|&w| (rooted_code(&adj, &labels, w, Some(v)), w))
            .collect();
        children.sort();
        for (_, w) in children.into_iter().rev() {
            stack.push((w, Some(v)));
        }
    }
    let new_id: BTreeMap<usize, VertexId> = order.iter().enumerate().map(|(i, (v, _))| (*v, VertexId(i + 1))).collect();
    let edge_between = |a: usize, b: usize| -> &Edge {
        t.graph
            .edges()
            .iter()
            .find(|e| {
                let (x, y) = (index[&e.ends[0]], index[&e.ends[1]]);
                (x == a && y == b) || (x == b && y == a)
            })
            .expect("tree edge")
    };

    let mut vertices = Vec::new();
    let mut new_edges = Vec::new();
    let mut vertex_cones = BTreeMap::new();
    let mut edge_cones = BTreeMap::new();
    let mut slopes = EdgeSlopes::new();
    for (i, (v, parent)) in order.iter().enumerate() {
        let old = ids[*v];
        let nv = new_id[v];
        vertices.push(Vertex { id: nv, degree: t.graph.vertex(old).expect("vertex").degree.clone() });
        vertex_cones.insert(nv, t.vertex_cone(old).clone());
        if let Some(p) = parent {
            let e = edge_between(*p, *v);
            let ne = EdgeId(i);
            let np = new_id[p];
            new_edges.push(Edge { id: ne, ends: [np, nv] });
            edge_cones.insert(ne, t.edge_cone(e.id).clone());
            if let (Some(a), Some(b)) = (t.slope(e.id, ids[*p]), t.slope(e.id, old)) {
                slopes.insert((ne, np), a.clone());
                slopes.insert((ne, nv), b.clone());
            }
        }
    }
    let legs: Vec<Leg> = t
        .graph
        .legs()
        .iter()
        .map(|l| Leg { marking: l.marking, vertex: new_id[&index[&l.vertex]], slope: l.slope.clone() })
        .collect();
    let graph = DecoratedGraph::new(vertices, new_edges, legs).expect("relabelling preserves the tree");
    let slopes = t.edge_slopes.as_ref().map(|_| slopes);
    let out = CombinatorialType::new(graph, t.target.clone(), vertex_cones, edge_cones, t.leg_cones.clone(), slopes)
        .expect("relabelling preserves the structure");
    (code, out)
}

fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for x in c {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Shared precomputation for one enumeration.
struct Context<'a> {
    target: &'a Arc<ConeComplex>,
    lam: &'a NumericalData,
    cat: &'a DegreeCatalogue,
    leg_cones: Vec<Cone>,
}

impl Context<'_> {
    fn degree_choices(&self, n: usize) -> Vec<Vec<Vec<Int>>> {
        let rays = self.target.num_rays();
        let mut out = Vec::new();
        // depth-first over atoms with the running sum
        fn go(
            atoms: &[Vec<Int>],
            n: usize,
            acc: &mut Vec<Vec<Int>>,
            sum: &mut Vec<Int>,
            goal: &[Int],
            out: &mut Vec<Vec<Vec<Int>>>,
        ) {
            if acc.len() == n {
                if sum.as_slice() == goal {
                    out.push(acc.clone());
                }
                return;
            }
            for a in atoms {
                for (s, x) in sum.iter_mut().zip(a) {
                    *s += x;
                }
                acc.push(a.clone());
                go(atoms, n, acc, sum, goal, out);
                acc.pop();
                for (s, x) in sum.iter_mut().zip(a) {
                    *s -= x;
                }
            }
        }
        let mut sum = vec![Int::from(0); rays];
        go(&self.cat.atoms, n, &mut Vec::new(), &mut sum, &self.lam.total_degree, &mut out);
        out
    }

    fn graph(&self, n: usize, edges: &[(usize, usize)], degrees: &[Vec<Int>], leg_at: &[usize]) -> DecoratedGraph {
        DecoratedGraph::new(
            (0..n).map(|i| Vertex { id: VertexId(i), degree: degrees[i].clone() }).collect(),
            edges
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| Edge { id: EdgeId(i), ends: [VertexId(a), VertexId(b)] })
                .collect(),
            leg_at
                .iter()
                .enumerate()
                .map(|(j, &v)| Leg { marking: j + 1, vertex: VertexId(v), slope: self.lam.alphas[j].clone() })
                .collect(),
        )
        .expect("labelled tree with markings 1..=n")
    }

    fn cone_type(
        &self,
        g: &DecoratedGraph,
        vertex_cones: BTreeMap<VertexId, Cone>,
        edge_cones: BTreeMap<EdgeId, Cone>,
    ) -> Option<CombinatorialType> {
        let leg_cones = self.leg_cones.iter().enumerate().map(|(j, c)| (j + 1, c.clone())).collect();
        let t =
            CombinatorialType::new(g.clone(), self.target.clone(), vertex_cones, edge_cones, leg_cones, None).ok()?;
        let t = balance(&t).ok()?;
        (validate_type(&t).is_valid() && check_gathmann(&t).ok()?).then_some(t)
    }

    /// Every valid type on one labelled shape, keyed by canonical code.
    fn on_shape(&self, n: usize, edges: &[(usize, usize)]) -> BTreeMap<String, CombinatorialType> {
        let faces = self.target.faces();
        let mut found = BTreeMap::new();
        let legs = self.lam.alphas.len();
        let leg_choices: Vec<Vec<usize>> = product(&vec![(0..n).collect::<Vec<_>>(); legs]);
        for degrees in self.degree_choices(n) {
            for leg_at in &leg_choices {
                let g = self.graph(n, edges, &degrees, leg_at);
                let Ok(sol) = solve_on_graph(&g, self.target, VertexId(0)) else {
                    continue;
                };
                let supports: Vec<Cone> =
                    (0..edges.len()).map(|i| Cone::new(sol.support(EdgeId(i), VertexId(edges[i].0)))).collect();
                // vertex cones must be faces of the cones of their legs
                let allowed: Vec<Vec<Cone>> = (0..n)
                    .map(|v| {
                        faces
                            .iter()
                            .filter(|f| {
                                leg_at.iter().enumerate().all(|(j, &w)| w != v || f.is_face_of(&self.leg_cones[j]))
                            })
                            .cloned()
                            .collect()
                    })
                    .collect();
                for vc in product(&allowed) {
                    // the edge cone is forced: any generator beyond the ends
                    // and the slope support would get a zero slope coefficient
                    let mut edge_cones = BTreeMap::new();
                    let ok = edges.iter().enumerate().all(|(i, &(a, b))| {
                        let u = vc[a].union(&vc[b]).union(&supports[i]);
                        let fits = self.target.contains_cone(&u);
                        edge_cones.insert(EdgeId(i), u);
                        fits
                    });
                    if !ok {
                        continue;
                    }
                    let vertex_cones = vc.iter().enumerate().map(|(i, c)| (VertexId(i), c.clone())).collect();
                    if let Some(t) = self.cone_type(&g, vertex_cones, edge_cones) {
                        let (code, canon) = canonical_form(&t);
                        found.entry(code).or_insert(canon);
                    }
                }
            }
        }
        found
    }
}

fn context<'a>(
    target: &'a Arc<ConeComplex>,
    lam: &'a NumericalData,
    cat: &'a DegreeCatalogue,
) -> Result<Option<Context<'a>>, EnumerationError> {
    if let Some(a) = cat.atoms.iter().find(|a| a.len() != target.num_rays()) {
        return Err(EnumerationError::BadAtom(a.clone()));
    }
    // a tangency outside the support leaves no cone for its leg
    let mut leg_cones = Vec::new();
    for a in &lam.alphas {
        match minimal_containing_cone(target, &a.to_rational()) {
            Some(c) => leg_cones.push(c),
            None => return Ok(None),
        }
    }
    lam.check_balancing(target)?;
    Ok(Some(Context { target, lam, cat, leg_cones }))
}

/// All valid types satisfying Gathmann's condition with at most
/// `max_vertices` vertices, degrees drawn from the catalogue, and leg cones
/// the minimal cones of the tangencies. Sorted by canonical code.
pub fn enumerate_types(
    target: &ConeComplex,
    lam: &NumericalData,
    cat: &DegreeCatalogue,
) -> Result<Vec<CombinatorialType>, EnumerationError> {
    let target = Arc::new(target.clone());
    let Some(ctx) = context(&target, lam, cat)? else { return Ok(Vec::new()) };
    let mut shapes: BTreeMap<String, (usize, Vec<(usize, usize)>)> = BTreeMap::new();
    for n in 1..=cat.max_vertices {
        for edges in labelled_trees(n) {
            shapes.entry(shape_code(n, &edges)).or_insert((n, edges));
        }
    }
    let found: Vec<BTreeMap<String, CombinatorialType>> =
        shapes.values().collect::<Vec<_>>().par_iter().map(|(n, edges)| ctx.on_shape(*n, edges)).collect();
    let mut all = BTreeMap::new();
    for m in found {
        all.extend(m);
    }
    Ok(all.into_values().collect())
}

/// Enumerates types, collects their positive slopes and sensitizes.
pub fn sensitize_for_data(
    target: &ConeComplex,
    lam: &NumericalData,
    cat: &DegreeCatalogue,
) -> Result<Subdivision, EnumerationError> {
    let types = enumerate_types(target, lam, cat)?;
    let slopes: Vec<LatticeVector> = collect_sensitive_slopes(&types).primitive.into_iter().collect();
    let s = sensitize(target, &slopes)?;
    for m in &slopes {
        assert!(s.refined.ray_index(m).is_some(), "sensitized complex is missing slope {m}");
    }
    Ok(s)
}

/// Carries a catalogue across a subdivision adding one ray `E = Σ w_i u_i`,
/// in the same way as the numerical data: an atom `a` may take any share
/// `t ∈ 0..=d_E` of the exceptional degree and becomes `(a_i − w_i·t, t)`.
/// Atoms that would become fractional are dropped.
pub fn lift_catalogue(
    s: &Subdivision,
    lam: &NumericalData,
    cat: &DegreeCatalogue,
) -> Result<DegreeCatalogue, EnumerationError> {
    let (e, weights) = single_ray_weights(s)
        .ok_or_else(|| TypeError::NotSingleStellar(format!("{} rays added", s.new_rays().len())))?;
    let d_e = lam.tangency_totals(&s.refined)?[e].clone();
    if !d_e.is_integer() || d_e.is_negative() {
        return Err(TypeError::NotSingleStellar(format!("exceptional degree {d_e} is not a natural number")).into());
    }
    let mut atoms = BTreeSet::new();
    let mut t = Int::from(0);
    while t <= d_e.to_integer() {
        for a in &cat.atoms {
            let mut lifted = Vec::with_capacity(s.refined.num_rays());
            let mut integral = true;
            for r in 0..s.refined.num_rays() {
                if r == e {
                    lifted.push(t.clone());
                    continue;
                }
                let i = s.base.ray_index(s.refined.ray(r)).expect("every other refined ray is a base ray");
                let x = rat_from_int(&a[i]) - &weights[i] * rat_from_int(&t);
                integral &= x.is_integer();
                lifted.push(x.to_integer());
            }
            if integral {
                atoms.insert(lifted);
            }
        }
        t += 1;
    }
    Ok(DegreeCatalogue { atoms: atoms.into_iter().collect(), max_vertices: cat.max_vertices })
}

/// Distinct canonical codes of a list of types.
pub fn canonical_codes(types: &[CombinatorialType]) -> BTreeSet<String> {
    types.iter().map(|t| canonical_form(t).0).collect()
}
