//! Exact Fourier–Motzkin elimination with a feasible-point witness.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::system::{Constraint, LinearSystem, Relation};
use crate::linalg::Rat;

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<Rat>,
    rhs: Rat,
    /// Indices of the original inequalities combined into this row.
    history: Vec<usize>,
}

/// Scales so the first nonzero coefficient is ±1.
fn normalize(mut r: Row) -> Row {
    if let Some(a) = r.coeffs.iter().find(|a| !a.is_zero()).map(Signed::abs) {
        for c in r.coeffs.iter_mut() {
            *c /= &a;
        }
        r.rhs /= &a;
    }
    r
}

fn merge_history(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Drops a row when a parallel row is at least as tight and was built from
/// a subset of its inputs; anything derived from the former is then
/// dominated by a row derived from the latter with no larger history, so
/// Chernikov's bound stays valid. Returns `None` on a contradictory row
/// without variables.
fn tidy(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut groups: BTreeMap<Vec<Rat>, Vec<Row>> = BTreeMap::new();
    for r in rows {
        let r = normalize(r);
        if r.coeffs.iter().all(Zero::is_zero) {
            if r.rhs.is_positive() {
                return None;
            }
            continue;
        }
        groups.entry(r.coeffs.clone()).or_default().push(r);
    }
    let mut out = Vec::new();
    for (_, mut group) in groups {
        group.sort_by(|a, b| b.rhs.cmp(&a.rhs).then(a.history.len().cmp(&b.history.len())));
        let mut kept: Vec<Row> = Vec::new();
        for r in group {
            if !kept.iter().any(|k| k.rhs >= r.rhs && is_subset(&k.history, &r.history)) {
                kept.push(r);
            }
        }
        out.extend(kept);
    }
    Some(out)
}

/// Expresses `z_j` through an equality and substitutes it into `c`.
fn substitute(c: &mut Constraint, eq: &Constraint, j: usize) {
    if c.coeffs[j].is_zero() {
        return;
    }
    let f = &c.coeffs[j] / &eq.coeffs[j];
    for (x, a) in c.coeffs.iter_mut().zip(&eq.coeffs) {
        *x -= &f * a;
    }
    c.rhs -= &f * &eq.rhs;
    c.coeffs[j] = Rat::zero();
}

/// Returns a point satisfying `sys`, or `None` if it is infeasible.
/// Equalities are substituted away first; inequalities are then eliminated
/// one variable at a time, choosing the variable that creates the fewest
/// new rows and discarding combinations that break Chernikov's bound.
pub fn fourier_motzkin(sys: &LinearSystem) -> Option<Vec<Rat>> {
    let n = sys.vars;
    let mut cons: Vec<Constraint> = sys.constraints.clone();
    let mut eq_stages: Vec<(usize, Constraint)> = Vec::new();

    while let Some(pos) = cons.iter().position(|c| c.relation == Relation::Eq) {
        let eq = cons.swap_remove(pos);
        let Some(j) = eq.coeffs.iter().position(|a| !a.is_zero()) else {
            if eq.is_contradiction() {
                return None;
            }
            continue;
        };
        for c in cons.iter_mut() {
            substitute(c, &eq, j);
        }
        eq_stages.push((j, eq));
    }

    let rows: Vec<Row> =
        cons.into_iter().enumerate().map(|(i, c)| Row { coeffs: c.coeffs, rhs: c.rhs, history: vec![i] }).collect();
    let mut rows = tidy(rows)?;
    let mut ineq_stages: Vec<(usize, Vec<Row>)> = Vec::new();

    loop {
        let live: Vec<usize> = (0..n).filter(|&j| rows.iter().any(|r| !r.coeffs[j].is_zero())).collect();
        let Some(&j) = live.iter().min_by_key(|&&j| {
            let p = rows.iter().filter(|r| r.coeffs[j].is_positive()).count();
            let q = rows.iter().filter(|r| r.coeffs[j].is_negative()).count();
            (p * q) as isize - (p + q) as isize
        }) else {
            break;
        };
        let (with_j, rest): (Vec<Row>, Vec<Row>) = rows.into_iter().partition(|r| !r.coeffs[j].is_zero());
        let bound = ineq_stages.len() + 2;
        let mut next = rest;
        for p in with_j.iter().filter(|r| r.coeffs[j].is_positive()) {
            for q in with_j.iter().filter(|r| r.coeffs[j].is_negative()) {
                let history = merge_history(&p.history, &q.history);
                if history.len() > bound {
                    continue;
                }
                let (sp, sq) = (q.coeffs[j].abs(), p.coeffs[j].clone());
                let coeffs = p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| a * &sp + b * &sq).collect();
                next.push(Row { coeffs, rhs: &p.rhs * &sp + &q.rhs * &sq, history });
            }
        }
        ineq_stages.push((j, with_j));
        rows = tidy(next)?;
    }

    let mut z = vec![Rat::zero(); n];
    for (j, stage) in ineq_stages.iter().rev() {
        let mut lower: Option<Rat> = None;
        let mut upper: Option<Rat> = None;
        for r in stage {
            let others: Rat =
                r.coeffs.iter().zip(&z).enumerate().filter(|(i, _)| i != j).map(|(_, (a, x))| a * x).sum();
            let b = (&r.rhs - others) / &r.coeffs[*j];
            if r.coeffs[*j].is_positive() {
                lower = Some(lower.map_or(b.clone(), |l| l.max(b)));
            } else {
                upper = Some(upper.map_or(b.clone(), |u| u.min(b)));
            }
        }
        z[*j] = lower.or(upper).unwrap_or_else(Rat::zero);
    }
    for (j, eq) in eq_stages.iter().rev() {
        let others: Rat = eq.coeffs.iter().zip(&z).enumerate().filter(|(i, _)| i != j).map(|(_, (a, x))| a * x).sum();
        z[*j] = (&eq.rhs - others) / &eq.coeffs[*j];
    }
    assert!(sys.is_satisfied_by(&z), "elimination produced a point outside the system");
    Some(z)
}
