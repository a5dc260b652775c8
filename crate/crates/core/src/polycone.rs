//! Small exact polyhedral-cone toolkit: extreme rays of H-cones, facets of
//! V-cones and the deterministic pulling triangulation. Everything is brute
//! force over constraint subsets, which is fine for the dimensions in play
//! (at most five or six).

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::{primitive, Frame, Int, LatticeVector, Rat, RationalMatrix, RationalVector};

/// `{x : eqs·x = 0, ineqs·x ≥ 0}` in `Q^dim`. Assumed pointed.
#[derive(Clone, Debug)]
pub struct HCone {
    pub dim: usize,
    pub eqs: Vec<RationalVector>,
    pub ineqs: Vec<RationalVector>,
}

impl HCone {
    /// The nonnegative orthant of `Q^dim`.
    pub fn orthant(dim: usize) -> Self {
        let ineqs = (0..dim).map(|i| LatticeVector::unit(dim, i).to_rational()).collect();
        HCone { dim, eqs: Vec::new(), ineqs }
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.eqs.iter().all(|e| e.dot(x).is_zero()) && self.ineqs.iter().all(|a| !a.dot(x).is_negative())
    }

    /// Extreme rays as primitive integer vectors, sorted.
    pub fn extreme_rays(&self) -> Vec<LatticeVector> {
        let n = self.dim;
        if n == 0 {
            return Vec::new();
        }
        let eq_rank = rows_rank(&self.eqs, n);
        if eq_rank >= n {
            return Vec::new();
        }
        let need = n - 1 - eq_rank;
        let mut found = BTreeSet::new();
        for subset in subsets(self.ineqs.len(), need) {
            let mut rows = self.eqs.clone();
            rows.extend(subset.iter().map(|&i| self.ineqs[i].clone()));
            let m = matrix_from_rows(&rows, n);
            let null = m.null_space();
            if null.len() != 1 {
                continue;
            }
            let r = &null[0];
            for cand in [r.clone(), r.scale(&-Rat::one())] {
                if self.contains(&cand) {
                    found.insert(cand.primitive_direction().expect("null vector is nonzero"));
                }
            }
        }
        found.into_iter().collect()
    }
}

fn matrix_from_rows(rows: &[RationalVector], n: usize) -> RationalMatrix {
    if rows.is_empty() {
        return RationalMatrix::zeros(0, n);
    }
    RationalMatrix::from_rows(rows.iter().map(|r| r.coords().to_vec()).collect()).expect("uniform row length")
}

fn rows_rank(rows: &[RationalVector], n: usize) -> usize {
    if rows.is_empty() {
        0
    } else {
        matrix_from_rows(rows, n).rank()
    }
}

pub fn rank_of(vs: &[LatticeVector]) -> usize {
    match vs.first() {
        None => 0,
        Some(v) => {
            let cols: Vec<RationalVector> = vs.iter().map(LatticeVector::to_rational).collect();
            RationalMatrix::from_columns(&cols, v.dim()).rank()
        }
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Indices of a maximal linearly independent subset, greedily from the front.
fn independent_subset(vs: &[LatticeVector]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..vs.len() {
        let mut trial: Vec<LatticeVector> = chosen.iter().map(|&j| vs[j].clone()).collect();
        trial.push(vs[i].clone());
        if rank_of(&trial) == trial.len() {
            chosen.push(i);
        }
    }
    chosen
}

/// Facets of the pointed cone generated by `rays` (each an extreme ray),
/// as sorted index sets into `rays`.
pub fn facets(rays: &[LatticeVector]) -> Vec<Vec<usize>> {
    let basis_idx = independent_subset(rays);
    let d = basis_idx.len();
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![Vec::new()];
    }
    let dim = rays[0].dim();
    let basis: Vec<LatticeVector> = basis_idx.iter().map(|&i| rays[i].clone()).collect();
    let frame = Frame::new(&basis, dim).expect("independent basis");
    let local: Vec<RationalVector> =
        rays.iter().map(|r| RationalVector::new(frame.coefficients(&r.to_rational()).expect("ray in span"))).collect();
    let mut out = BTreeSet::new();
    for subset in subsets(rays.len(), d - 1) {
        let rows: Vec<RationalVector> = subset.iter().map(|&i| local[i].clone()).collect();
        let null = matrix_from_rows(&rows, d).null_space();
        if null.len() != 1 {
            continue;
        }
        let h = &null[0];
        let vals: Vec<Rat> = local.iter().map(|x| h.dot(x)).collect();
        let nonneg = vals.iter().all(|v| !v.is_negative());
        let nonpos = vals.iter().all(|v| !v.is_positive());
        if nonneg || nonpos {
            let facet: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_zero()).collect();
            out.insert(facet);
        }
    }
    out.into_iter().collect()
}

/// Pulling triangulation of the pointed cone whose extreme rays are `rays`,
/// pulling rays in lexicographic order of their coordinate vectors. Because
/// the order is global, triangulations of neighbouring cones agree on shared
/// faces. Returns simplices as sorted index sets into `rays`.
pub fn pulling_triangulation(rays: &[LatticeVector]) -> Vec<Vec<usize>> {
    fn rec(rays: &[LatticeVector], set: Vec<usize>) -> Vec<Vec<usize>> {
        let sub: Vec<LatticeVector> = set.iter().map(|&i| rays[i].clone()).collect();
        if rank_of(&sub) == set.len() {
            return vec![set];
        }
        let apex_local = (0..set.len()).min_by(|&a, &b| sub[a].cmp(&sub[b])).expect("nonempty");
        let apex = set[apex_local];
        let mut out = Vec::new();
        for facet in facets(&sub) {
            if facet.contains(&apex_local) {
                continue;
            }
            let global: Vec<usize> = facet.iter().map(|&i| set[i]).collect();
            for mut simplex in rec(rays, global) {
                simplex.push(apex);
                simplex.sort_unstable();
                out.push(simplex);
            }
        }
        out
    }
    if rays.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = rec(rays, (0..rays.len()).collect());
    out.sort();
    out
}

/// Primitive integer vector of `x` scaled by the lcm of denominators.
pub fn clear_denominators(x: &RationalVector) -> LatticeVector {
    let l = x.coords().iter().fold(Int::one(), |l, c| l.lcm(c.denom()));
    LatticeVector::new(x.coords().iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect())
}

/// `primitive` on nonzero vectors, identity on zero.
pub fn primitive_or_zero(v: &LatticeVector) -> LatticeVector {
    primitive(v).unwrap_or_else(|_| v.clone())
}
