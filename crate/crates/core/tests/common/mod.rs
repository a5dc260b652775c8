//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tropi_core::combtype::{CombinatorialType, TypeBuilder};
use tropi_core::complex::{orthant, Cone, ConeComplex};
use tropi_core::linalg::{rat, Int, LatticeVector, Rat, RationalVector};
use tropi_core::subdivision::{compose, stellar, Subdivision};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn lv(c: &[i64]) -> LatticeVector {
    LatticeVector::from_i64(c)
}

pub fn p2_fan() -> ConeComplex {
    ConeComplex::new(2, vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[-1, -1])], vec![vec![0, 1], vec![1, 2], vec![0, 2]])
        .unwrap()
}

/// A smooth fan of the given dimension together with the chain of stellar
/// subdivisions producing it from an orthant (or, in the plane, sometimes
/// the complete fan of the projective plane).
pub fn smooth_subdivision(rng: &mut Rng64, dim: usize) -> Subdivision {
    let base = if dim == 2 && rng.gen_bool(0.3) { p2_fan() } else { orthant(dim) };
    let mut acc = Subdivision::identity(&base);
    for _ in 0..rng.gen_range(0..=3) {
        let faces: Vec<Cone> = acc.refined.faces().iter().filter(|f| f.dim() >= 2).cloned().collect();
        let f = faces.choose(rng).expect("orthants have a 2-face");
        let step = stellar(&acc.refined, f).unwrap();
        acc = compose(&acc, &step).unwrap();
    }
    acc
}

pub fn smooth_target(rng: &mut Rng64, dim: usize) -> ConeComplex {
    smooth_subdivision(rng, dim).refined
}

/// Sum `Σ c_i u_i` over the rays of `c`.
pub fn combination(c: &ConeComplex, coefs: &[(usize, i64)]) -> LatticeVector {
    let mut v = vec![Int::zero(); c.ambient_dim()];
    for &(i, k) in coefs {
        for (x, u) in v.iter_mut().zip(c.ray(i).coords()) {
            *x += u * Int::from(k);
        }
    }
    LatticeVector::new(v)
}

fn random_length(rng: &mut Rng64) -> Rat {
    [rat(1, 2), rat(1, 1), rat(2, 1), rat(3, 2)].choose(rng).unwrap().clone()
}

fn cone_of(pos: &[Rat]) -> Cone {
    Cone::new((0..pos.len()).filter(|&i| pos[i].is_positive()).collect())
}

fn up_cones(c: &ConeComplex, s: &Cone) -> Vec<(Cone, usize)> {
    c.faces()
        .iter()
        .filter(|f| f.dim() == s.dim() + 1 && s.is_face_of(f))
        .map(|f| (f.clone(), *f.ids().iter().find(|i| !s.contains_ray(**i)).unwrap()))
        .collect()
}

/// A valid type whose edges only ever stay in a cone, step up into a cone
/// of one more dimension, drop to a facet, or step sideways through a cone
/// of one more dimension into another facet. Such types satisfy the
/// consequences of slope sensitivity. Degrees are induced by the slopes.
pub fn sensitive_type(rng: &mut Rng64, target: &Arc<ConeComplex>, max_vertices: usize) -> CombinatorialType {
    let c = target.as_ref();
    let k = c.num_rays();
    let n = rng.gen_range(1..=max_vertices);
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut edge_labels: Vec<usize> = (1..n).collect();
    edge_labels.shuffle(rng);

    let faces: Vec<Cone> = c.faces().to_vec();
    let root = faces.choose(rng).unwrap().clone();
    let mut root_pos = vec![Rat::zero(); k];
    for &i in root.ids() {
        root_pos[i] = Rat::from_integer(Int::from(rng.gen_range(1..=4)));
    }
    let mut pos: Vec<Vec<Rat>> = vec![root_pos];
    let mut b = TypeBuilder::new(target.clone()).vertex(labels[0], root.ids());

    for child in 1..n {
        let parent = rng.gen_range(0..child);
        let p = pos[parent].clone();
        let s = cone_of(&p);
        let ups = up_cones(c, &s);
        let mut moves = vec![0];
        if !ups.is_empty() {
            moves.push(1);
        }
        if s.dim() > 0 {
            moves.push(2);
            if !ups.is_empty() {
                moves.push(3);
            }
        }
        let mut slope: Vec<(usize, i64)> = Vec::new();
        let (edge_cone, length) = match *moves.choose(rng).unwrap() {
            0 => {
                if s.dim() == 0 || rng.gen_bool(0.1) {
                    (s.clone(), random_length(rng))
                } else {
                    let i = *s.ids().choose(rng).unwrap();
                    let j = *s.ids().choose(rng).unwrap();
                    let a = rng.gen_range(0..=3);
                    let bb = if i == j && a > 0 { 0 } else { rng.gen_range(0..=3) };
                    slope.push((i, a));
                    slope.push((j, -bb));
                    let len = if bb > 0 {
                        &p[j] / Rat::from_integer(Int::from(bb * rng.gen_range(2..=4)))
                    } else {
                        random_length(rng)
                    };
                    (s.clone(), len)
                }
            }
            1 => {
                let (f, r) = ups.choose(rng).unwrap().clone();
                slope.push((r, rng.gen_range(1..=3)));
                let mut len = random_length(rng);
                if s.dim() > 0 && rng.gen_bool(0.6) {
                    let j = *s.ids().choose(rng).unwrap();
                    let bb = rng.gen_range(1..=3);
                    slope.push((j, -bb));
                    len = &p[j] / Rat::from_integer(Int::from(bb * rng.gen_range(2..=4)));
                }
                (f, len)
            }
            2 => {
                let r = *s.ids().choose(rng).unwrap();
                let cc = rng.gen_range(1..=3);
                slope.push((r, -cc));
                let rest: Vec<usize> = s.ids().iter().copied().filter(|&i| i != r).collect();
                if let Some(&j) = rest.choose(rng) {
                    slope.push((j, rng.gen_range(0..=3)));
                }
                (s.clone(), &p[r] / Rat::from_integer(Int::from(cc)))
            }
            _ => {
                let (f, r) = ups.choose(rng).unwrap().clone();
                let j = *s.ids().choose(rng).unwrap();
                let bb = rng.gen_range(1..=3);
                slope.push((r, rng.gen_range(1..=3)));
                slope.push((j, -bb));
                (f, &p[j] / Rat::from_integer(Int::from(bb)))
            }
        };
        let mut q = p.clone();
        for &(i, a) in &slope {
            q[i] += &length * Rat::from_integer(Int::from(a));
        }
        assert!(q.iter().all(|x| !x.is_negative()), "generator left the cone");
        let child_cone = cone_of(&q);
        assert!(child_cone.is_face_of(&edge_cone));
        pos.push(q);
        let m = combination(c, &slope);
        b = b.vertex(labels[child], child_cone.ids());
        let e = edge_labels[child - 1];
        b = if rng.gen_bool(0.5) {
            b.edge_with_slope(e, labels[parent], labels[child], edge_cone.ids(), m)
        } else {
            b.edge_with_slope(e, labels[child], labels[parent], edge_cone.ids(), -&m)
        };
    }

    let mut marking = 1;
    for (v, p) in pos.iter().enumerate() {
        let s = cone_of(p);
        let ups = up_cones(c, &s);
        for _ in 0..rng.gen_range(0..=2) {
            let mut coefs: Vec<(usize, i64)> = s.ids().iter().map(|&i| (i, rng.gen_range(0..=2))).collect();
            let cone = match ups.choose(rng) {
                Some((f, r)) if rng.gen_bool(0.6) => {
                    coefs.push((*r, rng.gen_range(1..=3)));
                    f.clone()
                }
                _ => s.clone(),
            };
            b = b.leg(marking, labels[v], combination(c, &coefs), cone.ids());
            marking += 1;
        }
    }
    b.build_induced().expect("generated types are well formed")
}

/// A tree on a full-dimensional smooth fan with arbitrary integer slopes,
/// each edge assigned a random maximal cone, and degrees induced by the
/// slopes. The slopes are returned separately and stripped from the type.
pub fn balancing_tree(rng: &mut Rng64) -> (CombinatorialType, CombinatorialType) {
    let dim = rng.gen_range(2..=3);
    let target = Arc::new(smooth_target(rng, dim));
    let n = rng.gen_range(1..=9);
    let maxes: Vec<Cone> = target.max_cones().to_vec();
    let mut b = TypeBuilder::new(target.clone());
    for v in 0..n {
        b = b.vertex(v, &[]);
    }
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        let cone = maxes.choose(rng).unwrap();
        let coefs: Vec<(usize, i64)> = cone.ids().iter().map(|&i| (i, rng.gen_range(-4..=4))).collect();
        b = b.edge_with_slope(v, parent, v, cone.ids(), combination(&target, &coefs));
    }
    let mut marking = 1;
    for v in 0..n {
        for _ in 0..rng.gen_range(0..=2) {
            let cone = maxes.choose(rng).unwrap();
            let coefs: Vec<(usize, i64)> = cone.ids().iter().map(|&i| (i, rng.gen_range(0..=3))).collect();
            b = b.leg(marking, v, combination(&target, &coefs), cone.ids());
            marking += 1;
        }
    }
    let solved = b.build_induced().unwrap();
    let mut bare = solved.clone();
    bare.edge_slopes = None;
    (solved, bare)
}

pub fn random_primitive(rng: &mut Rng64, dim: usize, max: i64) -> LatticeVector {
    loop {
        let v = LatticeVector::new((0..dim).map(|_| Int::from(rng.gen_range(0..=max))).collect());
        if !v.is_zero() && v.is_primitive() {
            return v;
        }
    }
}

/// A planar fan in the first quadrant with rays sorted by angle, or a
/// single simplicial cone in three dimensions; usually singular.
pub fn singular_fan(rng: &mut Rng64) -> ConeComplex {
    if rng.gen_bool(0.6) {
        let mut rays: BTreeSet<LatticeVector> = BTreeSet::new();
        let count = rng.gen_range(2..=4);
        while rays.len() < count {
            rays.insert(random_primitive(rng, 2, 7));
        }
        let mut rays: Vec<LatticeVector> = rays.into_iter().collect();
        // by angle: (a, b) before (c, d) iff a d - b c > 0
        rays.sort_by(|x, y| {
            let cross = &x.coords()[0] * &y.coords()[1] - &x.coords()[1] * &y.coords()[0];
            Int::zero().cmp(&cross)
        });
        let cones = (0..rays.len() - 1).map(|i| vec![i, i + 1]).collect();
        ConeComplex::new(2, rays, cones).unwrap()
    } else {
        loop {
            let gens: Vec<LatticeVector> = (0..3).map(|_| random_primitive(rng, 3, 3)).collect();
            let Ok(c) = ConeComplex::new(3, gens, vec![vec![0, 1, 2]]) else { continue };
            let m = c.multiplicity(&c.max_cones()[0]);
            if m > Int::zero() && m <= Int::from(6) {
                return c;
            }
        }
    }
}

/// A random point of the closed cone, with rational coefficients.
pub fn point_in(rng: &mut Rng64, c: &ConeComplex, cone: &Cone) -> RationalVector {
    let mut p = RationalVector::zero(c.ambient_dim());
    for &i in cone.ids() {
        let x = rat(rng.gen_range(0..=6), rng.gen_range(1..=5));
        p = p.add_scaled(&x, &c.ray(i).to_rational());
    }
    p
}

pub fn big_int(rng: &mut Rng64) -> Int {
    let small = Int::from(rng.gen_range(-50i64..=50));
    match rng.gen_range(0..4) {
        0 => Int::from(rng.gen::<i64>()) * Int::from(rng.gen::<i64>()) + small,
        _ => small,
    }
}

pub fn big_rat(rng: &mut Rng64) -> Rat {
    let mut d = big_int(rng);
    if d.is_zero() {
        d = Int::from(1);
    }
    Rat::new(big_int(rng), d)
}
