use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::combtype::fixtures::{lv, paper_type};
use crate::combtype::{balance, CombinatorialType, TypeBuilder};
use crate::complex::{orthant, ConeComplex};
use crate::linalg::{rat, LatticeVector};
use crate::subdivision::sensitize;

fn quadrant() -> Arc<ConeComplex> {
    Arc::new(orthant(2))
}

fn sensitized_fan() -> Arc<ConeComplex> {
    Arc::new(sensitize(&orthant(2), &[lv(&[1, 2]), lv(&[2, 1])]).unwrap().refined)
}

/// The three-vertex example moved onto the sensitized fan: each edge of
/// the original type is split at a vertex on the ray of its slope and the
/// middle vertex sits on the diagonal ray.
pub(crate) fn transplanted_type() -> CombinatorialType {
    let c = sensitized_fan();
    let r = |v: &[i64]| c.ray_index(&lv(v)).unwrap();
    let (e1, e2, d, p12, p21) = (r(&[1, 0]), r(&[0, 1]), r(&[1, 1]), r(&[1, 2]), r(&[2, 1]));
    TypeBuilder::new(c.clone())
        .vertex(1, &[])
        .vertex(2, &[])
        .vertex(3, &[d])
        .vertex(4, &[p12])
        .vertex(5, &[p21])
        .edge_with_slope(1, 1, 4, &[p12], lv(&[1, 2]))
        .edge_with_slope(2, 2, 5, &[p21], lv(&[2, 1]))
        .edge_with_slope(3, 4, 3, &[d, p12], lv(&[0, -1]))
        .edge_with_slope(4, 5, 3, &[d, p21], lv(&[-1, 0]))
        .leg(1, 1, lv(&[1, 0]), &[e1])
        .leg(2, 2, lv(&[0, 1]), &[e2])
        .leg(3, 3, lv(&[3, 3]), &[d])
        .build_induced()
        .unwrap()
}

fn both_ways(t: &CombinatorialType) -> (Option<Realization>, Option<Realization>) {
    (smoothable_lp(t).unwrap(), smoothable_simplex(t).unwrap())
}

#[test]
fn paper_type_is_not_smoothable() {
    let t = balance(&paper_type()).unwrap();
    let (fm, sx) = both_ways(&t);
    assert!(fm.is_none() && sx.is_none());
    let report = check_sensitivity_consequences(&t).unwrap();
    let e1 = report.edge(crate::combtype::EdgeId(1)).unwrap();
    assert!(!e1.mixed_sign && !e1.small_jumping);
    assert!(!report.passed());
    assert!(matches!(smooth_construct(&t), Err(SmoothingError::Insensitive(_))));
}

#[test]
fn paper_type_length_equations() {
    // positions: v1 = x, v3 = x + l1 (1,2), v2 = v3 - l2 (2,1); v1, v2 at
    // the origin forces x = 0 and l1 (1,2) = l2 (2,1)
    let t = balance(&paper_type()).unwrap();
    let s = smoothability_system(&t).unwrap();
    let (l1, l2) = (s.length_var(crate::combtype::EdgeId(1)), s.length_var(crate::combtype::EdgeId(2)));
    let mut eqs = s.system.clone();
    eqs.constraints.retain(|c| c.relation == system::Relation::Eq);
    // every solution of the equalities has l1 = l2 = 0
    let mut probe = eqs.clone();
    let mut row = vec![rat(0, 1); s.system.vars];
    row[l1] = rat(1, 1);
    row[l2] = rat(1, 1);
    probe.push(system::Constraint::ge(row, rat(1, 1)));
    assert!(fm::fourier_motzkin(&probe).is_none());
    assert!(fm::fourier_motzkin(&eqs).is_some());
}

#[test]
fn single_vertex() {
    let t = TypeBuilder::new(quadrant()).vertex(0, &[]).build().unwrap();
    let r = smoothable_lp(&t).unwrap().unwrap();
    assert_eq!(r.vertex_positions[&crate::combtype::VertexId(0)], crate::linalg::RationalVector::zero(2));
    assert!(r.edge_lengths.is_empty());
    let c = smooth_construct(&t).unwrap();
    assert_eq!(c, r);
    assert!(check_sensitivity_consequences(&t).unwrap().passed());
}

#[test]
fn two_vertices_on_a_ray() {
    let t = TypeBuilder::new(quadrant())
        .vertex(1, &[])
        .vertex(2, &[0])
        .edge_with_slope(1, 1, 2, &[0], lv(&[1, 0]))
        .build_induced()
        .unwrap();
    let hand = Realization {
        root_vertex: crate::combtype::VertexId(1),
        edge_lengths: [(crate::combtype::EdgeId(1), rat(1, 1))].into(),
        vertex_positions: [
            (crate::combtype::VertexId(1), crate::linalg::RationalVector::zero(2)),
            (crate::combtype::VertexId(2), crate::linalg::RationalVector::from_i64(&[1, 0])),
        ]
        .into(),
    };
    assert!(verify_realization(&t, &hand).is_valid());
    let (fm, sx) = both_ways(&t);
    assert!(verify_realization(&t, &fm.unwrap()).is_valid());
    assert!(verify_realization(&t, &sx.unwrap()).is_valid());
    assert_eq!(smooth_construct(&t).unwrap(), hand);
}

#[test]
fn forced_length_when_dropping_to_a_facet() {
    // slope from v2 to v1 is (1,-1) = u0 - u1 with u0 = e1 the generator
    // missing from the facet ray e2
    let t = TypeBuilder::new(quadrant())
        .vertex(1, &[0, 1])
        .vertex(2, &[1])
        .edge_with_slope(1, 2, 1, &[0, 1], lv(&[1, -1]))
        .build_induced()
        .unwrap();
    let r = smooth_construct(&t).unwrap();
    assert_eq!(r.vertex_positions[&crate::combtype::VertexId(1)], crate::linalg::RationalVector::from_i64(&[1, 1]));
    assert_eq!(r.edge_lengths[&crate::combtype::EdgeId(1)], rat(1, 1));
    assert_eq!(r.vertex_positions[&crate::combtype::VertexId(2)], crate::linalg::RationalVector::from_i64(&[0, 2]));
    assert!(smoothable_lp(&t).unwrap().is_some());
}

#[test]
fn transplanted_type_is_smoothable() {
    let t = transplanted_type();
    assert!(crate::combtype::validate_type(&t).is_valid(), "{}", crate::combtype::validate_type(&t));
    let report = check_sensitivity_consequences(&t).unwrap();
    assert!(report.passed(), "{report}");
    let r = smooth_construct(&t).unwrap();
    assert!(verify_realization(&t, &r).is_valid());
    assert_eq!(r.vertex_positions[&crate::combtype::VertexId(3)], crate::linalg::RationalVector::from_i64(&[1, 1]));
    assert_eq!(r.vertex_positions[&crate::combtype::VertexId(2)], crate::linalg::RationalVector::zero(2));
    let (fm, sx) = both_ways(&t);
    assert!(verify_realization(&t, &fm.unwrap()).is_valid());
    assert!(verify_realization(&t, &sx.unwrap()).is_valid());
}

#[test]
fn tampering_is_detected() {
    let t = transplanted_type();
    let r = smooth_construct(&t).unwrap();
    let mut bad = r.clone();
    *bad.edge_lengths.get_mut(&crate::combtype::EdgeId(2)).unwrap() += rat(1, 3);
    let rep = verify_realization(&t, &bad);
    assert!(!rep.check(EDGE_EQUATIONS).unwrap().passed());

    let mut boundary = r.clone();
    boundary.vertex_positions.insert(crate::combtype::VertexId(3), crate::linalg::RationalVector::zero(2));
    assert!(!verify_realization(&t, &boundary).check(VERTEX_INTERIOR).unwrap().passed());

    let mut zero = r;
    zero.edge_lengths.insert(crate::combtype::EdgeId(1), rat(0, 1));
    assert!(!verify_realization(&t, &zero).check(EDGE_LENGTHS).unwrap().passed());
}

#[test]
fn unsolved_slopes_are_an_error() {
    let t = paper_type();
    assert_eq!(smoothable_lp(&t).unwrap_err(), SmoothingError::UnsolvedSlopes);
    assert_eq!(check_sensitivity_consequences(&t).unwrap_err(), SmoothingError::UnsolvedSlopes);
}

#[test]
fn leg_needing_positive_slope() {
    // vertex at the origin with a zero leg slope in a ray cone cannot be
    // realized; with a positive slope it can
    let base = |slope: LatticeVector| {
        TypeBuilder::new(quadrant()).vertex(0, &[]).leg(1, 0, slope, &[0]).build_induced().unwrap()
    };
    assert!(smoothable_lp(&base(lv(&[0, 0]))).unwrap().is_none());
    assert!(smoothable_simplex(&base(lv(&[0, 0]))).unwrap().is_none());
    assert!(smoothable_lp(&base(lv(&[2, 0]))).unwrap().is_some());
}

proptest! {
    #[test]
    fn realizations_scale(num in 1i64..20, den in 1i64..20) {
        let t = transplanted_type();
        let r = smoothable_lp(&t).unwrap().unwrap();
        prop_assert!(verify_realization(&t, &r.scaled(&rat(num, den))).is_valid());
    }
}
