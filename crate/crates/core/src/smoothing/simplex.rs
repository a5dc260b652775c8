//! Exact phase-one simplex with Bland's rule, used as an independent
//! feasibility oracle.

use num_traits::{One, Signed, Zero};

use super::system::{LinearSystem, Relation};
use crate::linalg::Rat;

/// Returns a point satisfying `sys`, or `None` if it is infeasible.
/// Free variables are split as `z = z⁺ − z⁻`, inequalities get surplus
/// columns, and one artificial per row is driven to zero.
pub fn phase_one(sys: &LinearSystem) -> Option<Vec<Rat>> {
    let n = sys.vars;
    let m = sys.constraints.len();
    let surplus: Vec<Option<usize>> = {
        let mut next = 2 * n;
        sys.constraints
            .iter()
            .map(|c| {
                (c.relation == Relation::Ge).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let structural = 2 * n + surplus.iter().flatten().count();
    let cols = structural + m;

    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rat> = Vec::with_capacity(m);
    for (i, c) in sys.constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); cols];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = a.clone();
            row[n + j] = -a;
        }
        if let Some(s) = surplus[i] {
            row[s] = -Rat::one();
        }
        let mut b = c.rhs.clone();
        if b.is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
            b = -b;
        }
        row[structural + i] = Rat::one();
        t.push(row);
        rhs.push(b);
    }
    // reduced costs of the phase-one objective (sum of artificials)
    let mut d: Vec<Rat> = (0..cols)
        .map(|j| if j >= structural { Rat::zero() } else { -t.iter().map(|row| &row[j]).sum::<Rat>() })
        .collect();
    let mut basis: Vec<usize> = (structural..cols).collect();
    // an artificial that has left the basis is fixed at zero from then on
    let mut retired = vec![false; cols];

    while let Some(j) = (0..cols).find(|&j| !retired[j] && d[j].is_negative()) {
        let leave = (0..m)
            .filter(|&i| t[i][j].is_positive())
            .min_by(|&a, &b| {
                let ra = &rhs[a] / &t[a][j];
                let rb = &rhs[b] / &t[b][j];
                ra.cmp(&rb).then(basis[a].cmp(&basis[b]))
            })
            .expect("phase-one objective is bounded below");
        let p = t[leave][j].clone();
        t[leave].iter_mut().for_each(|x| *x /= &p);
        rhs[leave] /= &p;
        let pivot_row = t[leave].clone();
        let pivot_rhs = rhs[leave].clone();
        for i in 0..m {
            if i == leave || t[i][j].is_zero() {
                continue;
            }
            let f = t[i][j].clone();
            for (x, y) in t[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            rhs[i] -= &f * &pivot_rhs;
        }
        let f = d[j].clone();
        for (x, y) in d.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
        if basis[leave] >= structural {
            retired[basis[leave]] = true;
        }
        basis[leave] = j;
    }

    let objective: Rat = basis.iter().zip(&rhs).filter(|(&b, _)| b >= structural).map(|(_, v)| v.clone()).sum();
    if !objective.is_zero() {
        return None;
    }
    let mut value = vec![Rat::zero(); structural];
    for (&b, v) in basis.iter().zip(&rhs) {
        if b < structural {
            value[b] = v.clone();
        }
    }
    let z: Vec<Rat> = (0..n).map(|j| &value[j] - &value[n + j]).collect();
    assert!(sys.is_satisfied_by(&z), "phase one produced a point outside the system");
    Some(z)
}
