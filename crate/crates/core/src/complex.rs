//! Simplicial rational cone complexes embedded in `R^k`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{check_independent, lattice_index, Frame, Int, LatticeVector, LinalgError, Rat, RationalVector};
use crate::polycone::{subsets, HCone};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("ray {index} {ray} is not a primitive nonzero vector of dimension {dim}")]
    BadRay { index: usize, ray: LatticeVector, dim: usize },
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("cone {0:?} refers to a missing ray")]
    RayOutOfRange(Vec<usize>),
    #[error("cone {0:?} is not simplicial")]
    NotSimplicial(Vec<usize>),
    #[error("cones {0:?} and {1:?} do not meet in a common face")]
    BadIntersection(Vec<usize>, Vec<usize>),
    #[error("strata not downward-closed: {subset:?} is missing its face {missing:?}")]
    NotDownwardClosed { subset: Vec<usize>, missing: Vec<usize> },
    #[error("stratum {0:?} uses an index outside 1..=k")]
    StratumOutOfRange(Vec<usize>),
    #[error("coordinate subset {0:?} is empty or out of range")]
    BadCoordinates(Vec<usize>),
    #[error("projection image is not a simplicial complex: {0}")]
    BadProjection(String),
    #[error("point {0} lies outside the support")]
    OutsideSupport(RationalVector),
    #[error("cone {0:?} is not a cone of the complex")]
    UnknownCone(Vec<usize>),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A cone of a complex, named by its sorted set of ray indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Cone(ids)
    }

    pub fn origin() -> Self {
        Cone(Vec::new())
    }

    pub fn ray(i: usize) -> Self {
        Cone(vec![i])
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|i| other.contains_ray(*i))
    }

    pub fn union(&self, other: &Cone) -> Cone {
        Cone::new(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Cone) -> Cone {
        Cone(self.0.iter().copied().filter(|i| other.contains_ray(*i)).collect())
    }

    /// Canonical ordering key: by dimension, then ids.
    fn key(&self) -> (usize, &[usize]) {
        (self.0.len(), &self.0)
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, id) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, ">")
    }
}

pub fn canonical_order(a: &Cone, b: &Cone) -> std::cmp::Ordering {
    a.key().cmp(&b.key())
}

/// A simplicial fan in `R^k`: a ray table plus its maximal cones. Cones are
/// identified with subsets of maximal cones. `faces()` lists every cone in
/// canonical order (dimension, then ids); that order defines cone indices.
#[derive(Clone, Debug)]
pub struct ConeComplex {
    ambient_dim: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Cone>,
    faces: Vec<Cone>,
    face_index: HashMap<Cone, usize>,
    frames: Vec<Frame>,
}

impl PartialEq for ConeComplex {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for ConeComplex {}

impl ConeComplex {
    /// Validates and normalizes: cones are sorted, non-maximal cones and
    /// duplicates dropped, uncovered rays added as 1-dimensional cones, and
    /// every pair of maximal cones is checked to meet in a common face.
    pub fn new(ambient_dim: usize, rays: Vec<LatticeVector>, max_cones: Vec<Vec<usize>>) -> Result<Self, ComplexError> {
        let c = Self::new_unchecked(ambient_dim, rays, max_cones)?;
        c.check_intersections()?;
        Ok(c)
    }

    /// Like [`ConeComplex::new`] but skips the pairwise intersection check.
    /// For internal constructions that are fans by design.
    pub(crate) fn new_unchecked(
        ambient_dim: usize,
        rays: Vec<LatticeVector>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, ComplexError> {
        for (index, r) in rays.iter().enumerate() {
            if r.dim() != ambient_dim || r.is_zero() || !r.is_primitive() {
                return Err(ComplexError::BadRay { index, ray: r.clone(), dim: ambient_dim });
            }
        }
        let mut seen = HashMap::new();
        for (i, r) in rays.iter().enumerate() {
            if let Some(j) = seen.insert(r.clone(), i) {
                return Err(ComplexError::DuplicateRay(j, i));
            }
        }
        let mut cones: BTreeSet<Cone> = BTreeSet::new();
        for ids in max_cones {
            let cone = Cone::new(ids);
            if cone.ids().iter().any(|&i| i >= rays.len()) {
                return Err(ComplexError::RayOutOfRange(cone.0));
            }
            let gens: Vec<LatticeVector> = cone.ids().iter().map(|&i| rays[i].clone()).collect();
            if check_independent(&gens).is_err() {
                return Err(ComplexError::NotSimplicial(cone.0));
            }
            cones.insert(cone);
        }
        for i in 0..rays.len() {
            if !cones.iter().any(|c| c.contains_ray(i)) {
                cones.insert(Cone::ray(i));
            }
        }
        let all: Vec<Cone> = cones.iter().cloned().collect();
        let mut max: Vec<Cone> =
            all.iter().filter(|c| !all.iter().any(|d| d != *c && c.is_face_of(d))).cloned().collect();
        if max.is_empty() {
            max.push(Cone::origin());
        }
        max.sort_by(canonical_order);

        let mut face_set = BTreeSet::new();
        for m in &max {
            for k in 0..=m.dim() {
                for s in subsets(m.dim(), k) {
                    face_set.insert(Cone(s.iter().map(|&i| m.0[i]).collect()));
                }
            }
        }
        let mut faces: Vec<Cone> = face_set.into_iter().collect();
        faces.sort_by(canonical_order);
        let face_index = faces.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let frames = max
            .iter()
            .map(|m| {
                let gens: Vec<LatticeVector> = m.ids().iter().map(|&i| rays[i].clone()).collect();
                Frame::new(&gens, ambient_dim)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConeComplex { ambient_dim, rays, max_cones: max, faces, face_index, frames })
    }

    fn check_intersections(&self) -> Result<(), ComplexError> {
        for a in 0..self.max_cones.len() {
            for b in a + 1..self.max_cones.len() {
                if !self.meet_in_common_face(a, b) {
                    return Err(ComplexError::BadIntersection(
                        self.max_cones[a].0.clone(),
                        self.max_cones[b].0.clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Exact check that max cones `a` and `b` intersect exactly in the cone
    /// spanned by their shared rays: every extreme ray of the intersection,
    /// computed in the coefficient space of `a`, is supported on shared rays.
    fn meet_in_common_face(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.max_cones[a], &self.max_cones[b]);
        let common = ca.intersection(cb);
        let hc = self.pullback_constraints(a, b);
        hc.extreme_rays()
            .iter()
            .all(|r| r.coords().iter().enumerate().all(|(pos, c)| c.is_zero() || common.contains_ray(ca.0[pos])))
    }

    fn pullback_constraints(&self, a: usize, b: usize) -> HCone {
        intersection_constraints(self, a, self, b)
    }

    pub(crate) fn max_frame(&self, i: usize) -> &Frame {
        &self.frames[i]
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    /// Every cone in canonical order; position is the cone index.
    pub fn faces(&self) -> &[Cone] {
        &self.faces
    }

    pub fn cone_index(&self, c: &Cone) -> Option<usize> {
        self.face_index.get(c).copied()
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.face_index.contains_key(c)
    }

    /// Largest cone dimension.
    pub fn dim(&self) -> usize {
        self.max_cones.iter().map(Cone::dim).max().unwrap_or(0)
    }

    pub fn ray_index(&self, v: &LatticeVector) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    pub fn generators(&self, c: &Cone) -> Vec<LatticeVector> {
        c.ids().iter().map(|&i| self.rays[i].clone()).collect()
    }

    /// The smallest cone containing both, if any.
    pub fn join(&self, a: &Cone, b: &Cone) -> Option<Cone> {
        let u = a.union(b);
        self.contains_cone(&u).then_some(u)
    }

    /// Index of the generator sublattice in its saturation.
    pub fn multiplicity(&self, c: &Cone) -> Int {
        if c.dim() == 0 {
            return Int::one();
        }
        lattice_index(&self.generators(c)).expect("cones are simplicial")
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| self.multiplicity(c).is_one())
    }

    /// Coefficients of `p` in the rays of the cone whose relative interior
    /// contains it, as a dense per-ray vector. `None` outside the support.
    pub fn expansion(&self, p: &RationalVector) -> Option<Vec<Rat>> {
        if p.dim() != self.ambient_dim {
            return None;
        }
        for (m, frame) in self.max_cones.iter().zip(&self.frames) {
            if let Some(coefs) = frame.coefficients(p) {
                if coefs.iter().all(|c| !c.is_negative()) {
                    let mut dense = vec![Rat::zero(); self.rays.len()];
                    for (&id, c) in m.ids().iter().zip(coefs) {
                        dense[id] = c;
                    }
                    return Some(dense);
                }
            }
        }
        None
    }

    /// Coefficients of `p` in the generators of `c` (same order as ids),
    /// or `None` if `p` is not in the span of `c`.
    pub fn coefficients_in(&self, c: &Cone, p: &RationalVector) -> Option<Vec<Rat>> {
        if c.dim() == 0 {
            return p.is_zero().then(Vec::new);
        }
        let frame = self.frame_for(c);
        frame.coefficients(p)
    }

    pub fn frame_for(&self, c: &Cone) -> Frame {
        if let Some(pos) = self.max_cones.iter().position(|m| m == c) {
            return self.frames[pos].clone();
        }
        Frame::new(&self.generators(c), self.ambient_dim).expect("cones are simplicial")
    }

    /// True iff `p` lies in the relative interior of `c`.
    pub fn in_relative_interior(&self, c: &Cone, p: &RationalVector) -> bool {
        self.coefficients_in(c, p).is_some_and(|cs| cs.iter().all(Signed::is_positive))
    }

    pub fn in_support(&self, p: &RationalVector) -> bool {
        self.expansion(p).is_some()
    }

    /// Sum of the primitive generators: a canonical relative-interior point.
    pub fn barycenter(&self, c: &Cone) -> RationalVector {
        c.ids().iter().fold(RationalVector::zero(self.ambient_dim), |acc, &i| &acc + &self.rays[i].to_rational())
    }
}

/// Constraints in the coefficient space of max cone `a` of `c1` cutting out
/// its intersection with max cone `b` of `c2`.
pub(crate) fn intersection_constraints(c1: &ConeComplex, a: usize, c2: &ConeComplex, b: usize) -> HCone {
    let ca = &c1.max_cones()[a];
    let gens: Vec<RationalVector> = ca.ids().iter().map(|&i| c1.ray(i).to_rational()).collect();
    let fb = c2.max_frame(b);
    let mut hc = HCone::orthant(ca.dim());
    for i in 0..fb.annihilator.rows() {
        let row = fb.annihilator.row(i);
        hc.eqs.push(RationalVector::new(gens.iter().map(|g| row.dot(g)).collect()));
    }
    for i in 0..fb.coords.rows() {
        let row = fb.coords.row(i);
        hc.ineqs.push(RationalVector::new(gens.iter().map(|g| row.dot(g)).collect()));
    }
    hc
}

pub fn minimal_containing_cone(c: &ConeComplex, p: &RationalVector) -> Option<Cone> {
    let e = c.expansion(p)?;
    Some(Cone((0..e.len()).filter(|&i| e[i].is_positive()).collect()))
}

/// The tropicalization of a simple normal crossings pair with `k` components
/// whose nonempty intersections are the given strata (1-based index sets).
pub fn build_snc_tropicalization(k: usize, strata: &[Vec<usize>]) -> Result<ConeComplex, ComplexError> {
    let set: BTreeSet<Vec<usize>> = strata
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .filter(|s| !s.is_empty())
        .collect();
    for s in &set {
        if s.iter().any(|&i| i == 0 || i > k) {
            return Err(ComplexError::StratumOutOfRange(s.clone()));
        }
    }
    for i in 1..=k {
        if !set.contains(&vec![i]) {
            let subset = set.iter().find(|s| s.contains(&i)).cloned().unwrap_or_else(|| vec![i]);
            return Err(ComplexError::NotDownwardClosed { subset, missing: vec![i] });
        }
    }
    for s in &set {
        for drop in 0..s.len() {
            let mut face = s.clone();
            face.remove(drop);
            if !face.is_empty() && !set.contains(&face) {
                return Err(ComplexError::NotDownwardClosed { subset: s.clone(), missing: face });
            }
        }
    }
    let rays = (0..k).map(|i| LatticeVector::unit(k, i)).collect();
    let cones = set.into_iter().map(|s| s.into_iter().map(|i| i - 1).collect()).collect();
    ConeComplex::new(k, rays, cones)
}

/// The full fan of the nonnegative orthant of `R^k`.
pub fn orthant(k: usize) -> ConeComplex {
    let rays = (0..k).map(|i| LatticeVector::unit(k, i)).collect();
    ConeComplex::new_unchecked(k, rays, vec![(0..k).collect()]).expect("orthant is valid")
}

/// A piecewise linear function determined by its values on the rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    pub ray_values: Vec<Rat>,
}

impl PLFunction {
    pub fn new(ray_values: Vec<Rat>) -> Self {
        PLFunction { ray_values }
    }

    /// The function that is 1 on ray `i` and 0 on every other ray.
    pub fn indicator(c: &ConeComplex, i: usize) -> Self {
        let mut v = vec![Rat::zero(); c.num_rays()];
        v[i] = Rat::one();
        PLFunction { ray_values: v }
    }
}

pub fn evaluate_pl(c: &ConeComplex, f: &PLFunction, p: &RationalVector) -> Result<Rat, ComplexError> {
    if f.ray_values.len() != c.num_rays() {
        return Err(ComplexError::DimensionMismatch { expected: c.num_rays(), found: f.ray_values.len() });
    }
    let e = c.expansion(p).ok_or_else(|| ComplexError::OutsideSupport(p.clone()))?;
    Ok(e.iter().zip(&f.ray_values).map(|(a, b)| a * b).sum())
}

/// Coordinate projection `R^k -> R^I` restricted to a complex.
#[derive(Clone, Debug)]
pub struct Projection {
    /// Retained coordinates, 0-based and sorted.
    pub coords: Vec<usize>,
    pub image: ConeComplex,
    /// Image ray of each source ray, `None` when it maps to the origin.
    pub ray_images: Vec<Option<usize>>,
    /// Image cone index for each source cone index.
    pub cone_images: Vec<usize>,
}

/// Projection onto the coordinates `coords` (0-based).
pub fn coordinate_projection(c: &ConeComplex, coords: &[usize]) -> Result<Projection, ComplexError> {
    let mut idx: Vec<usize> = coords.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.is_empty() || idx.iter().any(|&i| i >= c.ambient_dim()) {
        return Err(ComplexError::BadCoordinates(coords.to_vec()));
    }
    let mut image_rays: Vec<LatticeVector> = Vec::new();
    let mut lookup: BTreeMap<LatticeVector, usize> = BTreeMap::new();
    let mut ray_images = Vec::with_capacity(c.num_rays());
    for r in c.rays() {
        let proj = LatticeVector::new(idx.iter().map(|&i| r.coords()[i].clone()).collect());
        if proj.is_zero() {
            ray_images.push(None);
            continue;
        }
        let prim = crate::linalg::primitive(&proj)?;
        let id = *lookup.entry(prim.clone()).or_insert_with(|| {
            image_rays.push(prim);
            image_rays.len() - 1
        });
        ray_images.push(Some(id));
    }
    let image_cone = |cone: &Cone| Cone::new(cone.ids().iter().filter_map(|&i| ray_images[i]).collect());
    let max: Vec<Vec<usize>> = c.max_cones().iter().map(|m| image_cone(m).0).collect();
    let image = ConeComplex::new(idx.len(), image_rays, max).map_err(|e| ComplexError::BadProjection(e.to_string()))?;
    let cone_images = c
        .faces()
        .iter()
        .map(|f| {
            image
                .cone_index(&image_cone(f))
                .ok_or_else(|| ComplexError::BadProjection(format!("image of {f} is not a cone")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Projection { coords: idx, image, ray_images, cone_images })
}
