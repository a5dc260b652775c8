//! DOT rendering of types and SVG drawings of two-dimensional fans with an
//! optional realization on top. SVG coordinates are exact integers: every
//! position is multiplied by the common denominator.

use std::fmt::Write;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::combtype::CombinatorialType;
use crate::complex::ConeComplex;
use crate::linalg::{format_rational, Int, Rat};
use crate::smoothing::Realization;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("SVG drawing needs a two-dimensional target, this one has dimension {0}; use --format dot")]
    NotPlanar(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Dot,
    Svg,
}

/// Labels carry `\n` line breaks for graphviz, so backslashes pass through.
fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\\\""))
}

/// Graphviz source: one node per vertex (cone and degree in the label), one
/// edge per tree edge labelled by its slope from the first end, and a
/// dashed stub per leg. A realization adds lengths and positions.
pub fn render_dot(t: &CombinatorialType, r: Option<&Realization>) -> String {
    let g = &t.graph;
    let mut out = String::from("graph type {\n  node [shape=circle];\n");
    for v in g.vertices() {
        let deg: Vec<String> = v.degree.iter().map(Int::to_string).collect();
        let mut label = format!("{}\\n{}\\nd=({})", v.id, t.vertex_cone(v.id), deg.join(","));
        if let Some(p) = r.and_then(|r| r.vertex_positions.get(&v.id)) {
            let _ = write!(label, "\\nf={p}");
        }
        let _ = writeln!(out, "  {} [label={}];", v.id, quote(&label));
    }
    for e in g.edges() {
        let mut label = t.slope(e.id, e.ends[0]).map_or_else(|| "?".to_string(), |m| m.to_string());
        if let Some(l) = r.and_then(|r| r.edge_lengths.get(&e.id)) {
            let _ = write!(label, " l={}", format_rational(l));
        }
        let _ = writeln!(out, "  {} -- {} [label={}];", e.ends[0], e.ends[1], quote(&label));
    }
    for l in g.legs() {
        let _ = writeln!(out, "  leg{} [shape=plaintext, label={}];", l.marking, quote(&l.marking.to_string()));
        let _ =
            writeln!(out, "  {} -- leg{} [style=dashed, label={}];", l.vertex, l.marking, quote(&l.slope.to_string()));
    }
    out.push_str("}\n");
    out
}

fn denominator_lcm<'a>(xs: impl Iterator<Item = &'a Rat>) -> Int {
    xs.fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

/// The fan of a planar complex, and the realization when given. The y axis
/// points up.
pub fn render_svg(
    c: &ConeComplex,
    t: Option<&CombinatorialType>,
    r: Option<&Realization>,
) -> Result<String, RenderError> {
    if c.ambient_dim() != 2 {
        return Err(RenderError::NotPlanar(c.ambient_dim()));
    }
    let scale =
        r.map_or_else(Int::one, |r| denominator_lcm(r.vertex_positions.values().flat_map(|p| p.coords().iter())));
    let pt = |x: &Rat, y: &Rat| -> (Int, Int) {
        ((x * Rat::from_integer(scale.clone())).to_integer(), (-y * Rat::from_integer(scale.clone())).to_integer())
    };
    let mut extent = Int::from(4) * &scale;
    if let Some(r) = r {
        for p in r.vertex_positions.values() {
            for x in p.coords() {
                let v = (x * Rat::from_integer(scale.clone())).to_integer().abs() * Int::from(2);
                if v > extent {
                    extent = v;
                }
            }
        }
    }
    let stroke = (&extent / Int::from(150)).max(Int::one());
    let font = (&extent / Int::from(18)).max(Int::one());
    let radius = (&extent / Int::from(60)).max(Int::one());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        -&extent,
        -&extent,
        &extent * Int::from(2),
        &extent * Int::from(2)
    );
    let _ = writeln!(out, "<g stroke-width=\"{stroke}\" font-size=\"{font}\" font-family=\"monospace\">");
    for (i, u) in c.rays().iter().enumerate() {
        // long enough to leave the viewBox
        let len = &extent * Int::from(2);
        let (x, y) = (&u.coords()[0] * &len, -(&u.coords()[1] * &len));
        let _ = writeln!(
            out,
            "<line class=\"ray\" data-ray=\"{i}\" x1=\"0\" y1=\"0\" x2=\"{x}\" y2=\"{y}\" stroke=\"gray\"/>"
        );
        let norm = u.coords().iter().map(|a| a.abs()).max().unwrap_or_else(Int::one).max(Int::one());
        let lx = &u.coords()[0] * &extent * Int::from(3) / (Int::from(4) * &norm);
        let ly = -(&u.coords()[1] * &extent * Int::from(3) / (Int::from(4) * &norm));
        let _ = writeln!(out, "<text class=\"ray-label\" x=\"{lx}\" y=\"{ly}\" fill=\"gray\">{u}</text>");
    }
    if let (Some(t), Some(r)) = (t, r) {
        for e in t.graph.edges() {
            let (Some(a), Some(b)) = (r.vertex_positions.get(&e.ends[0]), r.vertex_positions.get(&e.ends[1])) else {
                continue;
            };
            let (x1, y1) = pt(&a.coords()[0], &a.coords()[1]);
            let (x2, y2) = pt(&b.coords()[0], &b.coords()[1]);
            let _ = writeln!(
                out,
                "<line class=\"edge\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"black\"/>"
            );
        }
        for l in t.graph.legs() {
            let Some(p) = r.vertex_positions.get(&l.vertex) else { continue };
            let (x1, y1) = pt(&p.coords()[0], &p.coords()[1]);
            let s = &l.slope;
            let (x2, y2) = if s.is_zero() {
                (x1.clone(), y1.clone())
            } else {
                (&x1 + &s.coords()[0] * &extent * Int::from(2), &y1 - &s.coords()[1] * &extent * Int::from(2))
            };
            let _ = writeln!(out, "<line class=\"leg\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"blue\" stroke-dasharray=\"{radius}\"/>");
        }
        for (v, p) in &r.vertex_positions {
            let (x, y) = pt(&p.coords()[0], &p.coords()[1]);
            let _ = writeln!(out, "<circle class=\"vertex\" cx=\"{x}\" cy=\"{y}\" r=\"{radius}\" fill=\"red\"/>");
            let _ =
                writeln!(out, "<text class=\"vertex-label\" x=\"{}\" y=\"{}\">{v}</text>", &x + &radius, &y - &radius);
        }
    }
    out.push_str("</g>\n</svg>\n");
    if r.is_some_and(|r| {
        r.vertex_positions.values().any(|p| p.coords().iter().any(|x| !x.is_zero() && x.denom().is_zero()))
    }) {
        unreachable!("denominators are never zero");
    }
    Ok(out)
}

/// Renders a type in the requested format.
pub fn render(t: &CombinatorialType, r: Option<&Realization>, format: Format) -> Result<String, RenderError> {
    match format {
        Format::Dot => Ok(render_dot(t, r)),
        Format::Svg => render_svg(&t.target, Some(t), r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combtype::fixtures::paper_type;
    use crate::combtype::{balance, TypeBuilder};
    use crate::complex::orthant;
    use crate::smoothing::smooth_construct;
    use std::sync::Arc;

    #[test]
    fn paper_type_dot() {
        let dot = render_dot(&balance(&paper_type()).unwrap(), None);
        assert!(dot.starts_with("graph type {"));
        assert!(dot.contains("v1 -- v3 [label=\"(1,2)\"]"));
        assert!(dot.contains("v2 -- v3 [label=\"(2,1)\"]"));
        assert_eq!(dot.matches(" -- ").count(), 5);
        assert!(dot.trim_end().ends_with('}'));
    }

    #[test]
    fn single_vertex_dot() {
        let t = TypeBuilder::new(Arc::new(orthant(2))).vertex(0, &[]).build().unwrap();
        let dot = render_dot(&t, None);
        assert_eq!(dot.matches("[label=").count(), 1);
        assert!(!dot.contains(" -- "));
    }

    #[test]
    fn realization_on_the_sensitized_fan() {
        let t = crate::smoothing::tests::transplanted_type();
        let r = smooth_construct(&t).unwrap();
        let svg = render(&t, Some(&r), Format::Svg).unwrap();
        assert_eq!(svg.matches("class=\"ray\"").count(), 5);
        assert_eq!(svg.matches("class=\"vertex\"").count(), 5);
        assert_eq!(svg.matches("class=\"edge\"").count(), 4);
        assert!(!svg.contains('.') || svg.matches('.').count() == svg.matches("http://www.w3.org").count() * 2);
        assert_eq!(render(&t, Some(&r), Format::Svg).unwrap(), svg);
    }

    #[test]
    fn svg_needs_a_plane() {
        let t = TypeBuilder::new(Arc::new(orthant(3))).vertex(0, &[]).build().unwrap();
        let err = render(&t, None, Format::Svg).unwrap_err();
        assert!(err.to_string().contains("dot"));
        assert!(render(&t, None, Format::Dot).is_ok());
    }
}
