//! Subdivisions of cone complexes: stellar subdivisions, common refinements,
//! toric resolution and slope-sensitive refinement.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{intersection_constraints, minimal_containing_cone, ComplexError, Cone, ConeComplex};
use crate::linalg::{primitive, smith_normal_form, Int, IntMatrix, LatticeVector, Rat, RationalVector};
use crate::polycone::{clear_denominators, pulling_triangulation, rank_of, HCone};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("cone {0} is not a cone of the complex")]
    UnknownCone(Cone),
    #[error("stellar subdivision needs a cone of dimension at least 1")]
    OriginCenter,
    #[error("vector {0} is zero or lies outside the support")]
    OutsideSupport(LatticeVector),
    #[error("unequal supports: {0}")]
    UnequalSupports(String),
    #[error("cannot compose: refined complex of the first subdivision is not the base of the second")]
    ComposeMismatch,
    #[error("slope {0} is missing from the refined ray table")]
    MissingSlopeRay(LatticeVector),
    #[error("refinement is not an iterated stellar subdivision: {0}")]
    NotStellarSequence(String),
}

/// A refinement `refined -> base` with equal supports. `cone_image[i]` is
/// the index (in `base.faces()`) of the minimal base cone containing the
/// refined cone with index `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub base: ConeComplex,
    pub refined: ConeComplex,
    pub cone_image: Vec<usize>,
    /// Points inserted by successive `stellar_at_point` calls, when the
    /// subdivision was built that way.
    pub steps: Option<Vec<LatticeVector>>,
    pub warnings: Vec<String>,
}

impl Subdivision {
    pub fn identity(c: &ConeComplex) -> Self {
        Subdivision {
            base: c.clone(),
            refined: c.clone(),
            cone_image: (0..c.faces().len()).collect(),
            steps: Some(Vec::new()),
            warnings: Vec::new(),
        }
    }

    /// Checks that `refined` refines `base` with the same support and
    /// derives the cone map geometrically.
    pub fn from_complexes(base: ConeComplex, refined: ConeComplex) -> Result<Self, SubdivisionError> {
        check_equal_support(&base, &refined)?;
        let cone_image = compute_cone_image(&base, &refined)?;
        Ok(Subdivision { base, refined, cone_image, steps: None, warnings: Vec::new() })
    }

    pub fn is_identity(&self) -> bool {
        self.base == self.refined
    }

    /// Image in the base of a refined cone.
    pub fn image_of(&self, c: &Cone) -> Option<&Cone> {
        self.refined.cone_index(c).map(|i| &self.base.faces()[self.cone_image[i]])
    }

    /// Rays of the refined complex that are not rays of the base.
    pub fn new_rays(&self) -> Vec<usize> {
        (0..self.refined.num_rays()).filter(|&i| self.base.ray_index(self.refined.ray(i)).is_none()).collect()
    }
}

fn compute_cone_image(base: &ConeComplex, refined: &ConeComplex) -> Result<Vec<usize>, SubdivisionError> {
    refined
        .faces()
        .iter()
        .map(|f| {
            let p = refined.barycenter(f);
            let image = minimal_containing_cone(base, &p).ok_or_else(|| {
                SubdivisionError::UnequalSupports(format!("refined cone {f} leaves the base support"))
            })?;
            Ok(base.cone_index(&image).expect("minimal cone is a face"))
        })
        .collect()
}

/// Equal-support test for a candidate refinement. Every refined maximal
/// cone must sit inside a base maximal cone of the same dimension, and the
/// refined cones inside each base cone must form a pseudomanifold whose
/// interior walls are shared by exactly two pieces; for a convex base cone
/// that forces the pieces to cover it.
pub fn check_equal_support(base: &ConeComplex, refined: &ConeComplex) -> Result<(), SubdivisionError> {
    let bad = |m: String| Err(SubdivisionError::UnequalSupports(m));
    if base.ambient_dim() != refined.ambient_dim() {
        return bad("ambient dimensions differ".into());
    }
    let mut groups: BTreeMap<Cone, Vec<Cone>> = BTreeMap::new();
    for rho in refined.max_cones() {
        let Some(tau) = minimal_containing_cone(base, &refined.barycenter(rho)) else {
            return bad(format!("refined cone {rho} leaves the base support"));
        };
        if !base.max_cones().contains(&tau) || tau.dim() != rho.dim() {
            return bad(format!("refined cone {rho} is not full-dimensional in a maximal base cone"));
        }
        for g in refined.generators(rho) {
            let inside =
                base.coefficients_in(&tau, &g.to_rational()).is_some_and(|cs| cs.iter().all(|c| !c.is_negative()));
            if !inside {
                return bad(format!("refined cone {rho} is not contained in base cone {tau}"));
            }
        }
        groups.entry(tau).or_default().push(rho.clone());
    }
    for sigma in base.max_cones() {
        let Some(pieces) = groups.get(sigma) else {
            return bad(format!("base cone {sigma} is not covered"));
        };
        let mut walls: BTreeMap<Cone, usize> = BTreeMap::new();
        for p in pieces {
            for drop in p.ids() {
                let wall = Cone::new(p.ids().iter().copied().filter(|i| i != drop).collect());
                *walls.entry(wall).or_default() += 1;
            }
        }
        for (wall, count) in walls {
            let inner = minimal_containing_cone(base, &refined.barycenter(&wall)).as_ref() == Some(sigma);
            let expected = if inner { 2 } else { 1 };
            if count != expected {
                return bad(format!("base cone {sigma} is not covered near wall {wall}"));
            }
        }
    }
    Ok(())
}

/// Stellar subdivision at a cone: inserts the ray through the sum of its
/// generators.
pub fn stellar(c: &ConeComplex, sigma: &Cone) -> Result<Subdivision, SubdivisionError> {
    if !c.contains_cone(sigma) {
        return Err(SubdivisionError::UnknownCone(sigma.clone()));
    }
    if sigma.dim() == 0 {
        return Err(SubdivisionError::OriginCenter);
    }
    let v = clear_denominators(&c.barycenter(sigma));
    stellar_at_point(c, &v)
}

/// Inserts `primitive(v)` as a ray and star-subdivides every cone whose
/// relative interior meets it. A point on an existing ray yields the
/// identity, flagged with a warning.
pub fn stellar_at_point(c: &ConeComplex, v: &LatticeVector) -> Result<Subdivision, SubdivisionError> {
    let outside = || SubdivisionError::OutsideSupport(v.clone());
    if v.dim() != c.ambient_dim() || v.is_zero() {
        return Err(outside());
    }
    let w = primitive(v).expect("nonzero");
    let tau = minimal_containing_cone(c, &w.to_rational()).ok_or_else(outside)?;
    if tau.dim() == 1 {
        let mut s = Subdivision::identity(c);
        s.warnings.push(format!("point {v} lies on existing ray {}", c.ray(tau.ids()[0])));
        return Ok(s);
    }
    let new_id = c.num_rays();
    let mut rays = c.rays().to_vec();
    rays.push(w.clone());
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for sigma in c.max_cones() {
        if tau.is_face_of(sigma) {
            for &u in tau.ids() {
                let mut ids: Vec<usize> = sigma.ids().iter().copied().filter(|&i| i != u).collect();
                ids.push(new_id);
                cones.push(ids);
            }
        } else {
            cones.push(sigma.ids().to_vec());
        }
    }
    let refined = ConeComplex::new_unchecked(c.ambient_dim(), rays, cones)?;
    let cone_image = compute_cone_image(c, &refined)?;
    Ok(Subdivision { base: c.clone(), refined, cone_image, steps: Some(vec![w]), warnings: Vec::new() })
}

/// Composite `s2.refined -> s2.base = s1.refined -> s1.base`.
pub fn compose(s1: &Subdivision, s2: &Subdivision) -> Result<Subdivision, SubdivisionError> {
    if s2.base != s1.refined {
        return Err(SubdivisionError::ComposeMismatch);
    }
    let cone_image = s2.cone_image.iter().map(|&i| s1.cone_image[i]).collect();
    let steps = match (&s1.steps, &s2.steps) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
        _ => None,
    };
    Ok(Subdivision {
        base: s1.base.clone(),
        refined: s2.refined.clone(),
        cone_image,
        steps,
        warnings: s1.warnings.iter().chain(&s2.warnings).cloned().collect(),
    })
}

/// Builds a complex from polyhedral pieces given by their extreme rays.
/// Ray table: `keep` first, then new rays in lexicographic order. Each piece
/// is triangulated by lexicographic pulling.
fn assemble(
    ambient_dim: usize,
    keep: &[LatticeVector],
    pieces: &[Vec<LatticeVector>],
) -> Result<ConeComplex, SubdivisionError> {
    let mut rays = keep.to_vec();
    let known: BTreeSet<&LatticeVector> = keep.iter().collect();
    let extra: BTreeSet<LatticeVector> = pieces.iter().flatten().filter(|r| !known.contains(r)).cloned().collect();
    rays.extend(extra);
    let index: BTreeMap<&LatticeVector, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut cones = Vec::new();
    for piece in pieces {
        let mut piece = piece.clone();
        piece.sort();
        for simplex in pulling_triangulation(&piece) {
            cones.push(simplex.iter().map(|&i| index[&piece[i]]).collect());
        }
    }
    let used: BTreeSet<usize> = cones.iter().flatten().copied().collect();
    if used.len() != rays.len() {
        // drop rays of `keep` that no longer appear; they cannot be rays of
        // a refinement with equal support, so surface the inconsistency
        return Err(SubdivisionError::UnequalSupports(
            "a ray of the first complex is not a ray of the refinement".into(),
        ));
    }
    Ok(ConeComplex::new(ambient_dim, rays, cones)?)
}

/// Ambient extreme rays of a piece given in the coefficient space of `cone`.
fn lift_piece(c: &ConeComplex, cone: &Cone, local: &[LatticeVector]) -> Vec<LatticeVector> {
    local
        .iter()
        .map(|r| {
            let x = cone
                .ids()
                .iter()
                .zip(r.coords())
                .fold(LatticeVector::zero(c.ambient_dim()), |acc, (&i, l)| &acc + &c.ray(i).scale(l));
            primitive(&x).expect("extreme rays of a pointed cone are nonzero")
        })
        .collect()
}

/// Common refinement of two complexes with equal support: the cones
/// `σ₁ ∩ σ₂`, triangulated by lexicographic pulling.
pub fn common_refinement(s1: &ConeComplex, s2: &ConeComplex) -> Result<ConeComplex, SubdivisionError> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(SubdivisionError::UnequalSupports("ambient dimensions differ".into()));
    }
    if s1 == s2 {
        return Ok(s1.clone());
    }
    let mut pieces = Vec::new();
    for (a, ca) in s1.max_cones().iter().enumerate() {
        for b in 0..s2.max_cones().len() {
            let hc = intersection_constraints(s1, a, s2, b);
            // a nonzero equation confines the piece to a proper subspace
            if hc.eqs.iter().any(|e| !e.is_zero()) {
                continue;
            }
            let local = hc.extreme_rays();
            if rank_of(&local) != ca.dim() {
                continue;
            }
            pieces.push(lift_piece(s1, ca, &local));
        }
    }
    let refined = assemble(s1.ambient_dim(), s1.rays(), &pieces)?;
    check_equal_support(s1, &refined)?;
    check_equal_support(s2, &refined)?;
    Ok(refined)
}

/// Hirzebruch–Jung continued fraction `m/k = b₁ − 1/(b₂ − 1/(…))`.
pub fn hj_continued_fraction(m: &Int, k: &Int) -> Vec<Int> {
    let (mut a, mut b) = (m.clone(), k.clone());
    let mut out = Vec::new();
    while !b.is_zero() {
        let q = a.div_ceil(&b);
        let r = &q * &b - &a;
        out.push(q);
        a = b;
        b = r;
    }
    out
}

/// Rays resolving the two-dimensional cone `⟨u1, u2⟩` of multiplicity `m`,
/// in order from `u1` to `u2` (exclusive).
fn hj_chain(u1: &LatticeVector, u2: &LatticeVector, m: &Int) -> Vec<LatticeVector> {
    let mut k = Int::one();
    loop {
        let w = &u2.clone() + &u1.scale(&k);
        if w.coords().iter().all(|c| c.is_multiple_of(m)) {
            let v1 = LatticeVector::new(w.coords().iter().map(|c| c / m).collect());
            let bs = hj_continued_fraction(m, &k);
            let mut chain = vec![v1];
            let mut prev = u1.clone();
            for b in &bs[..bs.len() - 1] {
                let cur = chain.last().expect("nonempty").clone();
                let next = &cur.scale(b) - &prev;
                prev = cur;
                chain.push(next);
            }
            return chain;
        }
        k += 1;
        assert!(&k < m, "a cone of multiplicity m > 1 has a parallelepiped point");
    }
}

/// Nonzero lattice point `Σ λᵢ uᵢ` of the half-open fundamental
/// parallelepiped with minimal `Σ λᵢ`, ties broken lexicographically in λ.
pub fn parallelepiped_witness(gens: &[LatticeVector]) -> Option<LatticeVector> {
    let d = gens.len();
    let k = gens.first()?.dim();
    let a = IntMatrix::from_columns(gens, k);
    let snf = smith_normal_form(&a);
    let v = snf.right.to_rational();
    let divisors = snf.divisors.clone();
    let mut best: Option<(Rat, Vec<Rat>)> = None;
    let mut counter = vec![Int::zero(); d];
    loop {
        // advance mixed-radix counter over Z/d₁ × … × Z/d_d
        let mut pos = 0;
        loop {
            if pos == d {
                return best.map(|(_, lambda)| combine(gens, &lambda));
            }
            counter[pos] += 1;
            if counter[pos] < divisors[pos] {
                break;
            }
            counter[pos] = Int::zero();
            pos += 1;
        }
        let mu = RationalVector::new((0..d).map(|i| Rat::new(counter[i].clone(), divisors[i].clone())).collect());
        let lambda: Vec<Rat> = v.mul_vec(&mu).expect("square").coords().iter().map(|x| x - x.floor()).collect();
        if lambda.iter().all(Zero::is_zero) {
            continue;
        }
        let total: Rat = lambda.iter().sum();
        let better = match &best {
            None => true,
            Some((t, l)) => total < *t || (total == *t && lambda < *l),
        };
        if better {
            best = Some((total, lambda));
        }
    }
}

fn combine(gens: &[LatticeVector], lambda: &[Rat]) -> LatticeVector {
    let x = gens
        .iter()
        .zip(lambda)
        .fold(RationalVector::zero(gens[0].dim()), |acc, (g, l)| acc.add_scaled(l, &g.to_rational()));
    x.to_lattice().expect("parallelepiped point is integral")
}

/// Toric resolution by iterated `stellar_at_point`. Each round treats the
/// first maximal cone of largest multiplicity: two-dimensional cones get
/// their whole Hirzebruch–Jung chain, higher ones the parallelepiped witness.
/// Every insertion replaces each affected cone by cones of strictly smaller
/// multiplicity, so the multiset of multiplicities decreases.
pub fn resolve_smooth(c: &ConeComplex) -> Result<Subdivision, SubdivisionError> {
    let mut acc = Subdivision::identity(c);
    loop {
        let cur = &acc.refined;
        let mut worst: Option<(Int, Cone)> = None;
        for m in cur.max_cones() {
            let mult = cur.multiplicity(m);
            if mult > Int::one() && worst.as_ref().is_none_or(|(w, _)| mult > *w) {
                worst = Some((mult, m.clone()));
            }
        }
        let Some((mult, cone)) = worst else {
            return Ok(acc);
        };
        let gens = cur.generators(&cone);
        let points = if cone.dim() == 2 {
            hj_chain(&gens[0], &gens[1], &mult)
        } else {
            vec![parallelepiped_witness(&gens).expect("multiplicity above one")]
        };
        for p in points {
            let step = stellar_at_point(&acc.refined, &p)?;
            acc = compose(&acc, &step)?;
        }
    }
}

/// PL coordinate pair `(p_a, p_b)` of `x`.
fn pair_image(c: &ConeComplex, a: usize, b: usize, x: &RationalVector) -> Option<RationalVector> {
    let e = c.expansion(x)?;
    Some(RationalVector::new(vec![e[a].clone(), e[b].clone()]))
}

/// Pulls the subdivision `image` of the quadrant back along `(p_a, p_b)`:
/// every maximal cone containing rays `a` and `b` is cut, in its
/// coefficient space, by the preimages of the cones of `image`.
fn pull_back_pair(c: &ConeComplex, a: usize, b: usize, image: &ConeComplex) -> Result<ConeComplex, SubdivisionError> {
    let mut pieces = Vec::new();
    for m in c.max_cones() {
        let (Some(pa), Some(pb)) = (m.ids().iter().position(|&i| i == a), m.ids().iter().position(|&i| i == b)) else {
            pieces.push(c.generators(m));
            continue;
        };
        for (ti, t) in image.max_cones().iter().enumerate() {
            if t.dim() != 2 {
                continue;
            }
            let frame = image.max_frame(ti);
            let mut hc = HCone::orthant(m.dim());
            for r in 0..frame.coords.rows() {
                let row = frame.coords.row(r);
                let mut ineq = vec![Rat::zero(); m.dim()];
                ineq[pa] = row.coords()[0].clone();
                ineq[pb] = row.coords()[1].clone();
                hc.ineqs.push(RationalVector::new(ineq));
            }
            let local = hc.extreme_rays();
            if rank_of(&local) == m.dim() {
                pieces.push(lift_piece(c, m, &local));
            }
        }
    }
    assemble(c.ambient_dim(), c.rays(), &pieces)
}

/// Smooth refinement containing every slope as a ray.
///
/// Rank at most two: insert each slope by `stellar_at_point` and resolve.
/// Higher rank: for every pair of rays `a < b` spanning a cone, sensitize
/// the quadrant for the images of the slopes under the PL coordinates
/// `(p_a, p_b)`, pull that back, refine over all pairs in order and resolve.
/// On coordinate fans `(p_a, p_b)` is the coordinate projection.
pub fn sensitize(target: &ConeComplex, slopes: &[LatticeVector]) -> Result<Subdivision, SubdivisionError> {
    let mut prims: BTreeSet<LatticeVector> = BTreeSet::new();
    for m in slopes {
        if m.dim() != target.ambient_dim() || m.is_zero() || !target.in_support(&m.to_rational()) {
            return Err(SubdivisionError::OutsideSupport(m.clone()));
        }
        prims.insert(primitive(m).expect("nonzero"));
    }
    let result = if target.dim() <= 2 {
        let mut acc = Subdivision::identity(target);
        for m in &prims {
            let step = stellar_at_point(&acc.refined, m)?;
            acc = compose(&acc, &step)?;
        }
        let res = resolve_smooth(&acc.refined)?;
        compose(&acc, &res)?
    } else {
        let quadrant = crate::complex::orthant(2);
        let pairs: Vec<(usize, usize)> =
            target.faces().iter().filter(|f| f.dim() == 2).map(|f| (f.ids()[0], f.ids()[1])).collect();
        let pulled: Vec<ConeComplex> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let images: Vec<LatticeVector> = prims
                    .iter()
                    .filter_map(|m| pair_image(target, a, b, &m.to_rational()))
                    .filter(|y| !y.is_zero())
                    .map(|y| y.primitive_direction().expect("nonzero"))
                    .collect();
                let image = sensitize(&quadrant, &images)?;
                if image.is_identity() {
                    return Ok(target.clone());
                }
                pull_back_pair(target, a, b, &image.refined)
            })
            .collect::<Result<_, SubdivisionError>>()?;
        let mut refined = target.clone();
        for p in &pulled {
            refined = common_refinement(&refined, p)?;
        }
        let first = Subdivision::from_complexes(target.clone(), refined)?;
        let res = resolve_smooth(&first.refined)?;
        compose(&first, &res)?
    };
    for m in &prims {
        if result.refined.ray_index(m).is_none() {
            return Err(SubdivisionError::MissingSlopeRay(m.clone()));
        }
    }
    Ok(result)
}

/// Rewrites a refinement as a sequence of genuine stellar subdivisions
/// (each inserting the sum of a cone's generators), when one exists. Cones
/// are tried in canonical order, so the sequence is deterministic.
pub fn as_stellar_sequence(base: &ConeComplex, refined: &ConeComplex) -> Result<Vec<Subdivision>, SubdivisionError> {
    let target: BTreeSet<&LatticeVector> = refined.rays().iter().collect();
    let mut steps: Vec<Subdivision> = Vec::new();
    let mut cur = base.clone();
    loop {
        let missing = refined.rays().iter().filter(|r| cur.ray_index(r).is_none()).count();
        if missing == 0 {
            break;
        }
        let next = cur.faces().iter().filter(|f| f.dim() >= 2).find(|f| {
            let v = primitive(&clear_denominators(&cur.barycenter(f))).expect("nonzero");
            target.contains(&v) && cur.ray_index(&v).is_none()
        });
        let Some(center) = next.cloned() else {
            return Err(SubdivisionError::NotStellarSequence(format!("{missing} rays cannot be reached")));
        };
        let s = stellar(&cur, &center)?;
        cur = s.refined.clone();
        steps.push(s);
    }
    let same_fan = |a: &ConeComplex, b: &ConeComplex| {
        let cones = |c: &ConeComplex| -> BTreeSet<BTreeSet<LatticeVector>> {
            c.max_cones().iter().map(|m| c.generators(m).into_iter().collect()).collect()
        };
        cones(a) == cones(b)
    };
    if !same_fan(&cur, refined) {
        return Err(SubdivisionError::NotStellarSequence("the stellar sequence produces a different fan".into()));
    }
    Ok(steps)
}

/// Weights `w` with `E = Σ w_i u_i` for the single ray `E` a subdivision
/// adds, expressed over the base rays of its minimal base cone.
pub fn single_ray_weights(s: &Subdivision) -> Option<(usize, Vec<Rat>)> {
    let added = s.new_rays();
    if added.len() != 1 || s.refined.num_rays() != s.base.num_rays() + 1 {
        return None;
    }
    let e = added[0];
    let ray = s.refined.ray(e).to_rational();
    let exp = s.base.expansion(&ray)?;
    Some((e, exp))
}

/// Sum of the multiplicities of the maximal cones.
pub fn total_multiplicity(c: &ConeComplex) -> Int {
    c.max_cones().iter().map(|m| c.multiplicity(m)).sum()
}
