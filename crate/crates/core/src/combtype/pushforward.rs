//! Pushforward of a type along a subdivision, with stabilization.

use std::sync::Arc;

use num_traits::Zero;

use super::{CombinatorialType, Edge, TypeError, VertexId};
use crate::complex::Cone;
use crate::linalg::{Int, Rat};
use crate::subdivision::Subdivision;

/// Maps cones through `cone_image`, keeps ambient slopes, pushes degrees
/// onto base rays and then deletes legless vertices of valence at most two
/// whose pushed degree vanishes, lowest id first. A bivalent deletion merges
/// its two edges into the one with the smaller id; the two slopes must agree.
pub fn pushforward_type(s: &Subdivision, t: &CombinatorialType) -> Result<CombinatorialType, TypeError> {
    if *t.target != s.refined {
        return Err(TypeError::NonStabilizable("type does not live on the refined complex".into()));
    }
    let base = &s.base;
    let image = |c: &Cone| s.image_of(c).cloned().expect("cones of the type are cones of the target");

    // p_i^base(u_r) for every refined ray r
    let weights: Vec<Vec<Rat>> = s
        .refined
        .rays()
        .iter()
        .map(|u| base.expansion(&u.to_rational()).expect("refined rays lie in the base support"))
        .collect();

    let mut out = t.clone();
    out.target = Arc::new(base.clone());
    for v in out.graph.vertices_mut() {
        let mut d = vec![Rat::zero(); base.num_rays()];
        for (r, deg) in v.degree.iter().enumerate() {
            for (i, w) in weights[r].iter().enumerate() {
                d[i] += w * Rat::from_integer(deg.clone());
            }
        }
        v.degree = d
            .into_iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(x.to_integer())
                } else {
                    Err(TypeError::NonStabilizable(format!("pushed degree {x} is not integral")))
                }
            })
            .collect::<Result<Vec<Int>, _>>()?;
    }
    out.vertex_cones = t.vertex_cones.iter().map(|(k, c)| (*k, image(c))).collect();
    out.edge_cones = t.edge_cones.iter().map(|(k, c)| (*k, image(c))).collect();
    out.leg_cones = t.leg_cones.iter().map(|(k, c)| (*k, image(c))).collect();
    stabilize(&mut out)?;
    Ok(out)
}

fn deletable(t: &CombinatorialType, v: VertexId) -> bool {
    let g = &t.graph;
    g.vertices().len() > 1
        && g.legs_at(v).is_empty()
        && g.neighbours(v).len() <= 2
        && g.vertex(v).is_some_and(|x| x.degree.iter().all(Zero::is_zero))
}

fn stabilize(t: &mut CombinatorialType) -> Result<(), TypeError> {
    while let Some(v) = t.graph.vertices().iter().map(|x| x.id).find(|&v| deletable(t, v)) {
        let nbrs = t.graph.neighbours(v);
        match nbrs.as_slice() {
            [(e, _)] => {
                let e = *e;
                t.graph.edges_mut().retain(|x| x.id != e);
                t.edge_cones.remove(&e);
                if let Some(sl) = t.edge_slopes.as_mut() {
                    sl.retain(|(x, _), _| *x != e);
                }
            }
            [(e1, a), (e2, b)] => {
                let (e1, a, e2, b) = (*e1, *a, *e2, *b);
                let cone = t.target.join(t.edge_cone(e1), t.edge_cone(e2)).ok_or_else(|| {
                    TypeError::NonStabilizable(format!("cones of {e1} and {e2} do not span a common cone"))
                })?;
                let keep = e1.min(e2);
                let merged_slopes = match t.edge_slopes.as_mut() {
                    None => None,
                    Some(sl) => {
                        let into_v = sl.get(&(e1, a)).cloned();
                        let out_of_v = sl.get(&(e2, v)).cloned();
                        if into_v != out_of_v {
                            return Err(TypeError::NonStabilizable(format!("slopes on {e1} and {e2} disagree at {v}")));
                        }
                        let back = sl.get(&(e2, b)).cloned();
                        sl.retain(|(x, _), _| *x != e1 && *x != e2);
                        Some((into_v, back))
                    }
                };
                t.graph.edges_mut().retain(|x| x.id != e1 && x.id != e2);
                t.graph.edges_mut().push(Edge { id: keep, ends: [a, b] });
                t.graph.edges_mut().sort_by_key(|x| x.id);
                t.edge_cones.remove(&e1);
                t.edge_cones.remove(&e2);
                t.edge_cones.insert(keep, cone);
                if let (Some(sl), Some((fwd, back))) = (t.edge_slopes.as_mut(), merged_slopes) {
                    if let (Some(f), Some(bk)) = (fwd, back) {
                        sl.insert((keep, a), f);
                        sl.insert((keep, b), bk);
                    }
                }
            }
            _ => unreachable!("deletable vertices have valence at most two"),
        }
        t.graph.vertices_mut().retain(|x| x.id != v);
        t.vertex_cones.remove(&v);
    }
    Ok(())
}
