//! Acceptance criteria 1-9. Runs without the test harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

use common::*;
use tropi_core::combtype::{
    check_gathmann, lift_numerical_data, pushforward_type, solve_balancing, solve_balancing_from, validate_type,
    CombinatorialType, EdgeId, NumericalData, SensitiveSlopes, TypeBuilder, VertexId,
};
use tropi_core::complex::{orthant, Cone, ConeComplex};
use tropi_core::enumeration::{lift_catalogue, sensitize_for_data, DegreeCatalogue};
use tropi_core::io::JsonSchema;
use tropi_core::linalg::{
    is_unimodular, rat_from_int, solve_rational_system, Int, LatticeVector, Rat, RationalMatrix, RationalVector,
};
use tropi_core::smoothing::{
    check_sensitivity_consequences, smooth_construct, smoothable_lp, smoothable_simplex, verify_realization,
    Realization,
};
use tropi_core::subdivision::{
    as_stellar_sequence, compose, resolve_smooth, sensitize, stellar, total_multiplicity, Subdivision,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ints(c: &[i64]) -> Vec<Int> {
    c.iter().map(|&x| Int::from(x)).collect()
}

/// The type on the quadrant with v1, v2 at the origin carrying the legs
/// (1,0) and (0,1), v3 in the open quadrant carrying (3,3), and edges
/// e1 = v1v3, e2 = v2v3.
fn example_type() -> CombinatorialType {
    TypeBuilder::new(Arc::new(orthant(2)))
        .vertex_with_degree(1, &[], ints(&[2, 2]))
        .vertex_with_degree(2, &[], ints(&[2, 2]))
        .vertex_with_degree(3, &[0, 1], ints(&[0, 0]))
        .edge(1, 1, 3, &[0, 1])
        .edge(2, 2, 3, &[0, 1])
        .leg(1, 1, lv(&[1, 0]), &[0])
        .leg(2, 2, lv(&[0, 1]), &[1])
        .leg(3, 3, lv(&[3, 3]), &[0, 1])
        .build()
        .unwrap()
}

fn paper_lambda() -> NumericalData {
    NumericalData::new(vec![lv(&[1, 0]), lv(&[0, 1]), lv(&[3, 3])], ints(&[4, 4]))
}

fn paper_catalogue() -> DegreeCatalogue {
    DegreeCatalogue { atoms: vec![ints(&[0, 0]), ints(&[2, 2]), ints(&[4, 4])], max_vertices: 3 }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{out}; took {took:?}, limit {limit:?}"));
    }
    Ok(out)
}

fn criterion_1() -> Outcome {
    let t = example_type();
    timed(Duration::from_millis(10), || {
        let sol = solve_balancing(&t).map_err(|e| e.to_string())?;
        let m1 = sol.ambient(&t.target, EdgeId(1), VertexId(1));
        let m2 = sol.ambient(&t.target, EdgeId(2), VertexId(2));
        ensure(m1 == RationalVector::from_i64(&[1, 2]), || format!("m_e1 = {m1}"))?;
        ensure(m2 == RationalVector::from_i64(&[2, 1]), || format!("m_e2 = {m2}"))?;
        Ok(format!("m_e1 = {m1}, m_e2 = {m2}"))
    })
}

fn criterion_2() -> Outcome {
    let t = tropi_core::combtype::balance(&example_type()).map_err(|e| e.to_string())?;
    timed(Duration::from_millis(100), || {
        ensure(validate_type(&t).is_valid(), || "type is not valid".into())?;
        let lp = smoothable_lp(&t).map_err(|e| e.to_string())?;
        ensure(lp.is_none(), || "linear program reports feasible".into())?;
        let report = check_sensitivity_consequences(&t).map_err(|e| e.to_string())?;
        let e1 = report.edge(EdgeId(1)).ok_or("no verdict for e1")?;
        ensure(!e1.mixed_sign && !e1.small_jumping, || format!("e1 verdict: {report}"))?;
        Ok("infeasible; e1 flagged for mixed sign and small jumping".into())
    })
}

fn criterion_3() -> Outcome {
    let q = orthant(2);
    timed(Duration::from_millis(100), || {
        let s = sensitize(&q, &[lv(&[1, 2]), lv(&[2, 1])]).map_err(|e| e.to_string())?;
        let c = &s.refined;
        let rays: BTreeSet<LatticeVector> = c.rays().iter().cloned().collect();
        let expected: BTreeSet<LatticeVector> =
            [lv(&[1, 0]), lv(&[2, 1]), lv(&[1, 1]), lv(&[1, 2]), lv(&[0, 1])].into_iter().collect();
        ensure(rays == expected, || format!("rays {rays:?}"))?;
        let twos: Vec<&Cone> = c.max_cones().iter().filter(|m| m.dim() == 2).collect();
        ensure(twos.len() == 4 && c.max_cones().len() == 4, || format!("{} maximal cones", c.max_cones().len()))?;
        ensure(c.is_smooth(), || "not smooth".into())?;
        for m in twos {
            let g = c.generators(m);
            let det = &g[0].coords()[0] * &g[1].coords()[1] - &g[0].coords()[1] * &g[1].coords()[0];
            ensure(det.abs().is_one(), || format!("determinant {det} on {m}"))?;
            ensure(is_unimodular(&g).map_err(|e| e.to_string())?, || format!("{m} not unimodular"))?;
        }
        Ok("five rays, four unimodular cones".into())
    })
}

/// Suite 4: the generated types, their targets and the subdivisions that
/// produced the targets.
struct Suite4 {
    types: Vec<CombinatorialType>,
    subdivisions: Vec<Subdivision>,
}

fn suite_4() -> Suite4 {
    let mut rng = rng(0x5eed_0004);
    let mut types = Vec::new();
    let mut subdivisions: Vec<Subdivision> = Vec::new();
    for i in 0..240 {
        let dim = if i % 2 == 0 { 2 } else { 3 };
        let s = smooth_subdivision(&mut rng, dim);
        let target = Arc::new(s.refined.clone());
        types.push(sensitive_type(&mut rng, &target, 8));
        if !subdivisions.contains(&s) {
            subdivisions.push(s);
        }
    }
    Suite4 { types, subdivisions }
}

fn criterion_4(suite: &Suite4) -> Outcome {
    timed(Duration::from_secs(60), || {
        let mut tested = 0;
        let mut by_dim = [0usize; 4];
        for t in &suite.types {
            if !validate_type(t).is_valid() {
                continue;
            }
            let report = check_sensitivity_consequences(t).map_err(|e| e.to_string())?;
            if !report.passed() {
                continue;
            }
            tested += 1;
            by_dim[t.target.ambient_dim()] += 1;
            let r = smooth_construct(t).map_err(|e| format!("construction failed: {e}\n{}", t.to_json_string()))?;
            let v = verify_realization(t, &r);
            ensure(v.is_valid(), || format!("realization does not verify: {v}"))?;
            let lp = smoothable_lp(t).map_err(|e| e.to_string())?;
            ensure(lp.is_some(), || format!("linear program infeasible on\n{}", t.to_json_string()))?;
        }
        ensure(tested >= 200, || format!("only {tested} types pass the sensitivity checks"))?;
        Ok(format!("{tested} types ({} in dim 2, {} in dim 3), zero disagreements", by_dim[2], by_dim[3]))
    })
}

/// Stacks every vertex equation into one linear system over the per-ray
/// slope coefficients of each edge oriented from its first end.
fn balancing_oracle(t: &CombinatorialType) -> Option<Vec<Vec<Rat>>> {
    let g = &t.graph;
    let n = t.target.num_rays();
    let edges = g.edges();
    let legs = t.leg_contributions().ok()?;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for v in g.vertices() {
        for i in 0..n {
            let mut row = vec![Rat::zero(); edges.len() * n];
            for (k, e) in edges.iter().enumerate() {
                if e.ends[0] == v.id {
                    row[k * n + i] = Rat::one();
                } else if e.ends[1] == v.id {
                    row[k * n + i] = -Rat::one();
                }
            }
            let leg_total: Rat = g.legs_at(v.id).iter().map(|l| legs[&l.marking][i].clone()).sum();
            rows.push(row);
            rhs.push(rat_from_int(&v.degree[i]) - leg_total);
        }
    }
    if edges.is_empty() {
        return Some(Vec::new());
    }
    let a = RationalMatrix::from_rows(rows).ok()?;
    let x = solve_rational_system(&a, &RationalVector::new(rhs)).ok()?.unique()?;
    Some((0..edges.len()).map(|k| x.coords()[k * n..(k + 1) * n].to_vec()).collect())
}

fn criterion_5() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut rng = rng(0x5eed_0005);
        let mut roots_checked = 0;
        for case in 0..200 {
            let (solved, bare) = balancing_tree(&mut rng);
            let sol = solve_balancing(&bare).map_err(|e| format!("case {case}: {e}"))?;
            let oracle =
                balancing_oracle(&bare).ok_or_else(|| format!("case {case}: oracle has no unique solution"))?;
            for (k, e) in bare.graph.edges().iter().enumerate() {
                let got = &sol.coefficients[&(e.id, e.ends[0])];
                ensure(*got == oracle[k], || format!("case {case}, {}: {got:?} vs {:?}", e.id, oracle[k]))?;
                let back = &sol.coefficients[&(e.id, e.ends[1])];
                ensure(back.iter().zip(got).all(|(a, b)| *a == -b), || format!("case {case}: not antisymmetric"))?;
                let m = sol.ambient(&bare.target, e.id, e.ends[0]);
                ensure(Some(m.clone()) == solved.slope(e.id, e.ends[0]).map(LatticeVector::to_rational), || {
                    format!("case {case}: slope {m} differs from the generating slope")
                })?;
            }
            for v in bare.graph.vertices() {
                let other = solve_balancing_from(&bare, v.id).map_err(|e| e.to_string())?;
                ensure(other == sol, || format!("case {case}: root {} changes the solution", v.id))?;
                roots_checked += 1;
            }
        }
        Ok(format!("200 trees agree with the stacked system; {roots_checked} root choices"))
    })
}

fn criterion_6(suite: &Suite4) -> Outcome {
    let mut instances = vec![tropi_core::combtype::balance(&example_type()).map_err(|e| e.to_string())?];
    instances.extend(suite.types.iter().cloned());
    let (mut feasible, mut infeasible) = (0, 0);
    for (k, t) in instances.iter().enumerate() {
        let fm = smoothable_lp(t).map_err(|e| e.to_string())?;
        let sx = smoothable_simplex(t).map_err(|e| e.to_string())?;
        ensure(fm.is_some() == sx.is_some(), || {
            format!("instance {k}: elimination {} vs simplex {}", fm.is_some(), sx.is_some())
        })?;
        for r in [&fm, &sx].into_iter().flatten() {
            ensure(verify_realization(t, r).is_valid(), || format!("instance {k}: certificate does not verify"))?;
        }
        if fm.is_some() {
            feasible += 1;
        } else {
            infeasible += 1;
        }
    }
    Ok(format!("{} instances agree ({feasible} feasible, {infeasible} infeasible)", instances.len()))
}

fn support_preserved(rng: &mut Rng64, s: &Subdivision, samples: usize) -> Result<(), String> {
    for (from, to, forward) in [(&s.base, &s.refined, true), (&s.refined, &s.base, false)] {
        for _ in 0..samples {
            let m = from.max_cones().choose(rng).unwrap();
            let p = point_in(rng, from, m);
            ensure(to.in_support(&p), || format!("{p} lost by the subdivision"))?;
            if forward {
                let cone = tropi_core::complex::minimal_containing_cone(to, &p).unwrap();
                let image = s.image_of(&cone).ok_or("cone without image")?;
                let cs = s.base.coefficients_in(image, &p).ok_or("point outside the span of its image cone")?;
                ensure(cs.iter().all(|c| !c.is_negative()), || format!("{p} is not in the image cone {image}"))?;
            }
        }
    }
    Ok(())
}

fn criterion_7(suite: &Suite4) -> Outcome {
    let mut rng = rng(0x5eed_0007);
    let q = orthant(2);
    let mut subdivisions = vec![sensitize(&q, &[lv(&[1, 2]), lv(&[2, 1])]).map_err(|e| e.to_string())?];
    subdivisions.extend(suite.subdivisions.iter().cloned());
    for s in &subdivisions {
        support_preserved(&mut rng, s, 1000)?;
    }

    let mut resolved = 0;
    for _ in 0..40 {
        let c = singular_fan(&mut rng);
        let s = resolve_smooth(&c).map_err(|e| e.to_string())?;
        ensure(s.refined.is_smooth(), || format!("resolution of {:?} is not smooth", c.rays()))?;
        let top = s.refined.max_cones().iter().map(|m| s.refined.multiplicity(m)).max().unwrap();
        ensure(top.is_one(), || format!("multiplicity {top} left"))?;
        ensure(total_multiplicity(&s.refined) == Int::from(s.refined.max_cones().len()), || "multiplicity sum".into())?;
        support_preserved(&mut rng, &s, 100)?;
        resolved += 1;
    }

    let mut triples = 0;
    let mut attempts = 0;
    while triples < 100 {
        attempts += 1;
        ensure(attempts < 2000, || format!("only {triples} usable triples"))?;
        let dim = rng.gen_range(2..=3);
        let base = if dim == 2 && rng.gen_bool(0.3) { p2_fan() } else { orthant(dim) };
        let pick = |c: &ConeComplex, rng: &mut Rng64| {
            c.faces().iter().filter(|f| f.dim() >= 2).cloned().collect::<Vec<_>>().choose(rng).unwrap().clone()
        };
        let f1 = pick(&base, &mut rng);
        let s1 = stellar(&base, &f1).map_err(|e| e.to_string())?;
        let f2 = pick(&s1.refined, &mut rng);
        let s2 = stellar(&s1.refined, &f2).map_err(|e| e.to_string())?;
        let s12 = compose(&s1, &s2).map_err(|e| e.to_string())?;
        let t = sensitive_type(&mut rng, &Arc::new(s2.refined.clone()), 6);
        let direct = pushforward_type(&s12, &t);
        let stepwise = pushforward_type(&s2, &t).and_then(|u| pushforward_type(&s1, &u));
        match (direct, stepwise) {
            (Ok(a), Ok(b)) => {
                ensure(a == b, || format!("pushforwards differ on\n{}", t.to_json_string()))?;
                triples += 1;
            }
            (Err(_), Err(_)) => {}
            (a, b) => return Err(format!("one route fails: direct {:?}, stepwise {:?}", a.err(), b.err())),
        }
    }
    Ok(format!(
        "{} subdivisions x 1000 points; {resolved} resolutions smooth; {triples} pushforward triples",
        subdivisions.len()
    ))
}

fn criterion_8() -> Outcome {
    let q = orthant(2);
    let lam = paper_lambda();
    let cat = paper_catalogue();
    let s = sensitize_for_data(&q, &lam, &cat).map_err(|e| e.to_string())?;
    let steps = as_stellar_sequence(&q, &s.refined).map_err(|e| e.to_string())?;
    let (mut l, mut c) = (lam, cat);
    for st in &steps {
        c = lift_catalogue(st, &l, &c).map_err(|e| e.to_string())?;
        l = lift_numerical_data(st, &l).map_err(|e| e.to_string())?;
    }
    let target = steps.last().map_or(q.clone(), |st| st.refined.clone());
    let again = sensitize_for_data(&target, &l, &c).map_err(|e| e.to_string())?;
    let added: Vec<String> = again.new_rays().iter().map(|&r| again.refined.ray(r).to_string()).collect();
    ensure(added.is_empty(), || format!("rerun adds {}", added.join(" ")))?;
    let degree: Vec<String> = l.total_degree.iter().map(ToString::to_string).collect();
    Ok(format!(
        "{} stellar steps, lifted degree ({}), {} atoms; rerun adds no rays",
        steps.len(),
        degree.join(","),
        c.atoms.len()
    ))
}

fn has_float(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.is_f64(),
        Value::Array(xs) => xs.iter().any(has_float),
        Value::Object(m) => m.values().any(has_float),
        _ => false,
    }
}

fn round_trip<T: JsonSchema + PartialEq + std::fmt::Debug>(name: &str, xs: &[T]) -> Result<(), String> {
    for x in xs {
        let s = x.to_json_string();
        ensure(!has_float(&serde_json::from_str(&s).unwrap()), || format!("{name}: float in {s}"))?;
        let back = T::from_json_str(&s).map_err(|e| format!("{name}: {e} in {s}"))?;
        ensure(back == *x, || format!("{name}: round trip changed {s}"))?;
        ensure(back.to_json_string() == s, || format!("{name}: not stable"))?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    const N: usize = 1000;
    let mut rng = rng(0x5eed_0009);
    let big_vec = |rng: &mut Rng64, d: usize| LatticeVector::new((0..d).map(|_| big_int(rng)).collect());

    let complexes: Vec<ConeComplex> = (0..N)
        .map(|i| match i % 3 {
            0 => smooth_target(&mut rng, 2 + i % 2),
            1 => singular_fan(&mut rng),
            _ => loop {
                let v = big_vec(&mut rng, 2);
                if !v.is_zero() {
                    break ConeComplex::new(2, vec![tropi_core::linalg::primitive(&v).unwrap()], vec![vec![0]])
                        .unwrap();
                }
            },
        })
        .collect();
    round_trip("complex", &complexes)?;

    let subdivisions: Vec<Subdivision> = (0..N).map(|i| smooth_subdivision(&mut rng, 2 + i % 2)).collect();
    round_trip("subdivision", &subdivisions)?;

    let types: Vec<CombinatorialType> = (0..N)
        .map(|i| {
            let target = Arc::new(smooth_target(&mut rng, 2 + i % 2));
            let mut t = sensitive_type(&mut rng, &target, 6);
            if i % 5 == 0 {
                t.edge_slopes = None;
            }
            t
        })
        .collect();
    round_trip("type", &types)?;

    let lambdas: Vec<NumericalData> = (0..N)
        .map(|_| {
            let d = rng.gen_range(1..=4);
            let alphas = (0..rng.gen_range(0..=4)).map(|_| big_vec(&mut rng, d)).collect();
            NumericalData::new(alphas, (0..rng.gen_range(1..=5)).map(|_| big_int(&mut rng)).collect())
        })
        .collect();
    round_trip("lambda", &lambdas)?;

    let realizations: Vec<Realization> = (0..N)
        .map(|_| {
            let d = rng.gen_range(1..=3);
            let nv = rng.gen_range(1..=6);
            Realization {
                root_vertex: VertexId(rng.gen_range(0..nv)),
                edge_lengths: (0..nv - 1).map(|e| (EdgeId(e + 1), big_rat(&mut rng).abs() + Rat::one())).collect(),
                vertex_positions: (0..nv)
                    .map(|v| (VertexId(v), RationalVector::new((0..d).map(|_| big_rat(&mut rng)).collect())))
                    .collect(),
            }
        })
        .collect();
    round_trip("realization", &realizations)?;

    let slopes: Vec<SensitiveSlopes> = (0..N)
        .map(|_| {
            let d = rng.gen_range(1..=3);
            let original: BTreeSet<LatticeVector> =
                (0..rng.gen_range(0..=5)).map(|_| big_vec(&mut rng, d)).filter(|v| !v.is_zero()).collect();
            let primitive = original.iter().map(|v| tropi_core::linalg::primitive(v).unwrap()).collect();
            SensitiveSlopes { primitive, original }
        })
        .collect();
    round_trip("slopes", &slopes)?;

    let catalogues: Vec<DegreeCatalogue> = (0..N)
        .map(|_| {
            let d = rng.gen_range(1..=4);
            DegreeCatalogue {
                atoms: (0..rng.gen_range(0..=6)).map(|_| (0..d).map(|_| big_int(&mut rng)).collect()).collect(),
                max_vertices: rng.gen_range(1..=8),
            }
        })
        .collect();
    round_trip("catalogue", &catalogues)?;

    Ok(format!("{N} instances of each of 7 schemas"))
}

fn run(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    match out {
        Ok(detail) => {
            println!("PASS criterion {n} ({name}): {detail} [{:.2?}]", start.elapsed());
            true
        }
        Err(detail) => {
            println!("FAIL criterion {n} ({name}): {detail} [{:.2?}]", start.elapsed());
            false
        }
    }
}

fn main() {
    // the example type must also satisfy Gathmann's condition for the
    // golden tests to be meaningful
    let example = tropi_core::combtype::balance(&example_type()).expect("example balances");
    assert!(check_gathmann(&example).unwrap());

    let start = Instant::now();
    let suite = suite_4();
    println!("generated suite 4 in {:.2?}", start.elapsed());
    let results = [
        run(1, "balancing golden test", criterion_1),
        run(2, "non-smoothability golden test", criterion_2),
        run(3, "sensitization golden test", criterion_3),
        run(4, "lifting at desk scale", || criterion_4(&suite)),
        run(5, "balancing solver cross-validation", criterion_5),
        run(6, "elimination and simplex agree", || criterion_6(&suite)),
        run(7, "subdivision properties", || criterion_7(&suite)),
        run(8, "pipeline idempotence", criterion_8),
        run(9, "serialization round trip", criterion_9),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
