//! JSON schemas for every persisted object. Integers are JSON numbers when
//! they fit in an `i64` and decimal strings otherwise; rationals are
//! canonical `"p/q"` strings. No floats are ever written.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::combtype::{
    CombinatorialType, DecoratedGraph, Edge, EdgeId, EdgeSlopes, Leg, NumericalData, SensitiveSlopes, ValidationReport,
    Vertex, VertexId,
};
use crate::complex::{ComplexError, Cone, ConeComplex};
use crate::enumeration::DegreeCatalogue;
use crate::linalg::{format_rational, parse_rational, Int, LatticeVector, Rat, RationalVector};
use crate::smoothing::{Realization, SensitivityReport};
use crate::subdivision::{Subdivision, SubdivisionError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid rational {0:?}")]
    Rational(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error(transparent)]
    Type(#[from] crate::combtype::TypeError),
}

/// An exact integer on the wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub Int);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(x) => s.serialize_i64(x),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) if n.is_i64() || n.is_u64() => {
                n.to_string().parse().map(JsonInt).map_err(de::Error::custom)
            }
            Value::String(s) => s.trim().parse().map(JsonInt).map_err(de::Error::custom),
            other => Err(de::Error::custom(format!("expected an integer, found {other}"))),
        }
    }
}

/// An exact rational on the wire, always `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonRat(pub Rat);

impl Serialize for JsonRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for JsonRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => parse_rational(&s).map(JsonRat).map_err(de::Error::custom),
            Value::Number(n) if n.is_i64() || n.is_u64() => {
                parse_rational(&n.to_string()).map(JsonRat).map_err(de::Error::custom)
            }
            other => Err(de::Error::custom(format!("expected a rational string, found {other}"))),
        }
    }
}

fn ints(v: &[Int]) -> Vec<JsonInt> {
    v.iter().cloned().map(JsonInt).collect()
}

fn unints(v: Vec<JsonInt>) -> Vec<Int> {
    v.into_iter().map(|x| x.0).collect()
}

fn lattice(v: &LatticeVector) -> Vec<JsonInt> {
    ints(v.coords())
}

fn unlattice(v: Vec<JsonInt>) -> LatticeVector {
    LatticeVector::new(unints(v))
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    ambient_dim: usize,
    rays: Vec<Vec<JsonInt>>,
    max_cones: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct SubdivisionJson {
    base: ComplexJson,
    refined: ComplexJson,
    /// Informational; recomputed on reading.
    #[serde(default)]
    cone_image: Vec<usize>,
    #[serde(default)]
    steps: Option<Vec<Vec<JsonInt>>>,
    #[serde(default)]
    warnings: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: usize,
    degree: Vec<JsonInt>,
    cone: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: usize,
    ends: [usize; 2],
    cone: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct LegJson {
    marking: usize,
    vertex: usize,
    slope: Vec<JsonInt>,
    cone: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SlopeJson {
    edge: usize,
    from: usize,
    slope: Vec<JsonInt>,
}

#[derive(Serialize, Deserialize)]
struct TypeJson {
    target: ComplexJson,
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
    legs: Vec<LegJson>,
    #[serde(default)]
    edge_slopes: Option<Vec<SlopeJson>>,
}

#[derive(Serialize, Deserialize)]
struct LambdaJson {
    alphas: Vec<Vec<JsonInt>>,
    total_degree: Vec<JsonInt>,
}

#[derive(Serialize, Deserialize)]
struct LengthJson {
    edge: usize,
    length: JsonRat,
}

#[derive(Serialize, Deserialize)]
struct PositionJson {
    vertex: usize,
    position: Vec<JsonRat>,
}

#[derive(Serialize, Deserialize)]
struct RealizationJson {
    root_vertex: usize,
    edge_lengths: Vec<LengthJson>,
    vertex_positions: Vec<PositionJson>,
}

#[derive(Serialize, Deserialize)]
struct SlopesJson {
    primitive: Vec<Vec<JsonInt>>,
    original: Vec<Vec<JsonInt>>,
}

#[derive(Serialize, Deserialize)]
struct CatalogueJson {
    atoms: Vec<Vec<JsonInt>>,
    max_vertices: usize,
}

/// Conversion between a domain object and its JSON schema.
pub trait JsonSchema: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, IoError>;

    fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("values always serialize");
        s.push('\n');
        s
    }

    fn from_json_str(s: &str) -> Result<Self, IoError> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("schema structs always serialize")
}

fn complex_json(c: &ConeComplex) -> ComplexJson {
    ComplexJson {
        ambient_dim: c.ambient_dim(),
        rays: c.rays().iter().map(lattice).collect(),
        max_cones: c.max_cones().iter().map(|m| m.ids().to_vec()).collect(),
    }
}

fn complex_from(j: ComplexJson) -> Result<ConeComplex, IoError> {
    Ok(ConeComplex::new(j.ambient_dim, j.rays.into_iter().map(unlattice).collect(), j.max_cones)?)
}

impl JsonSchema for ConeComplex {
    fn to_json(&self) -> Value {
        value(&complex_json(self))
    }

    fn from_json(v: &Value) -> Result<Self, IoError> {
        complex_from(ComplexJson::deserialize(v)?)
    }
}

impl JsonSchema for Subdivision {
    fn to_json(&self) -> Value {
        value(&SubdivisionJson {
            base: complex_json(&self.base),
            refined: complex_json(&self.refined),
            cone_image: self.cone_image.clone(),
            steps: self.steps.as_ref().map(|s| s.iter().map(lattice).collect()),
            warnings: self.warnings.clone(),
        })
    }

    fn from_json(v: &Value) -> Result<Self, IoError> {
        let j = SubdivisionJson::deserialize(v)?;
        let mut s = Subdivision::from_complexes(complex_from(j.base)?, complex_from(j.refined)?)?;
        s.steps = j.steps.map(|s| s.into_iter().map(unlattice).collect());
        s.warnings = j.warnings;
        Ok(s)
    }
}

impl JsonSchema for CombinatorialType {
    fn to_json(&self) -> Value {
        let g = &self.graph;
        value(&TypeJson {
            target: complex_json(&self.target),
            vertices: g
                .vertices()
                .iter()
                .map(|v| VertexJson {
                    id: v.id.0,
                    degree: ints(&v.degree),
                    cone: self.vertex_cone(v.id).ids().to_vec(),
                })
                .collect(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    id: e.id.0,
                    ends: [e.ends[0].0, e.ends[1].0],
                    cone: self.edge_cone(e.id).ids().to_vec(),
                })
                .collect(),
            legs: g
                .legs()
                .iter()
                .map(|l| LegJson {
                    marking: l.marking,
                    vertex: l.vertex.0,
                    slope: lattice(&l.slope),
                    cone: self.leg_cone(l.marking).ids().to_vec(),
                })
                .collect(),
            edge_slopes: self
                .edge_slopes
                .as_ref()
                .map(|s| s.iter().map(|((e, v), m)| SlopeJson { edge: e.0, from: v.0, slope: lattice(m) }).collect()),
        })
    }

    fn from_json(v: &Value) -> Result<Self, IoError> {
        let j = TypeJson::deserialize(v)?;
        let target = Arc::new(complex_from(j.target)?);
        let mut vertex_cones = BTreeMap::new();
        let mut vertices = Vec::new();
        for v in j.vertices {
            vertex_cones.insert(VertexId(v.id), Cone::new(v.cone));
            vertices.push(Vertex { id: VertexId(v.id), degree: unints(v.degree) });
        }
        let mut edge_cones = BTreeMap::new();
        let mut edges = Vec::new();
        for e in j.edges {
            edge_cones.insert(EdgeId(e.id), Cone::new(e.cone));
            edges.push(Edge { id: EdgeId(e.id), ends: [VertexId(e.ends[0]), VertexId(e.ends[1])] });
        }
        let mut leg_cones = BTreeMap::new();
        let mut legs = Vec::new();
        for l in j.legs {
            leg_cones.insert(l.marking, Cone::new(l.cone));
            legs.push(Leg { marking: l.marking, vertex: VertexId(l.vertex), slope: unlattice(l.slope) });
        }
        let slopes: Option<EdgeSlopes> = j
            .edge_slopes
            .map(|s| s.into_iter().map(|x| ((EdgeId(x.edge), VertexId(x.from)), unlattice(x.slope))).collect());
        let graph = DecoratedGraph::new(vertices, edges, legs)?;
        Ok(CombinatorialType::new(graph, target, vertex_cones, edge_cones, leg_cones, slopes)?)
    }
}

impl JsonSchema for NumericalData {
    fn to_json(&self) -> Value {
        value(&LambdaJson { alphas: self.alphas.iter().map(lattice).collect(), total_degree: ints(&self.total_degree) })
    }

    fn from_json(v: &Value) -> Result<Self, IoError> {
        let j = LambdaJson::deserialize(v)?;
        Ok(NumericalData::new(j.alphas.into_iter().map(unlattice).collect(), unints(j.total_degree)))
    }
}

impl JsonSchema for Realization {
    fn to_json(&self) -> Value {
        value(&RealizationJson {
            root_vertex: self.root_vertex.0,
            edge_lengths: self
                .edge_lengths
                .iter()
                .map(|(e, l)| LengthJson { edge: e.0, length: JsonRat(l.clone()) })
                .collect(),
            vertex_positions: self
                .vertex_positions
                .iter()
                .map(|(v, p)| PositionJson { vertex: v.0, position: p.coords().iter().cloned().map(JsonRat).collect() })
                .collect(),
        })
    }

    fn from_json(v: &Value) -> Result<Self, IoError> {
        let j = RealizationJson::deserialize(v)?;
        Ok(Realization {
            root_vertex: VertexId(j.root_vertex),
            edge_lengths: j.edge_lengths.into_iter().map(|x| (EdgeId(x.edge), x.length.0)).collect(),
            vertex_positions: j
                .vertex_positions
                .into_iter()
                .map(|x| (VertexId(x.vertex), RationalVector::new(x.position.into_iter().map(|r| r.0).collect())))
                .collect(),
        })
    }
}

impl JsonSchema for SensitiveSlopes {
    fn to_json(&self) -> Value {
        value(&SlopesJson {
            primitive: self.primitive.iter().map(lattice).collect(),
            original: self.original.iter().map(lattice).collect(),
        })
    }

    fn from_json(v: &Value) -> Result<Self, IoError> {
        let j = SlopesJson::deserialize(v)?;
        Ok(SensitiveSlopes {
            primitive: j.primitive.into_iter().map(unlattice).collect(),
            original: j.original.into_iter().map(unlattice).collect(),
        })
    }
}

impl JsonSchema for DegreeCatalogue {
    fn to_json(&self) -> Value {
        value(&CatalogueJson { atoms: self.atoms.iter().map(|a| ints(a)).collect(), max_vertices: self.max_vertices })
    }

    fn from_json(v: &Value) -> Result<Self, IoError> {
        let j = CatalogueJson::deserialize(v)?;
        Ok(DegreeCatalogue { atoms: j.atoms.into_iter().map(unints).collect(), max_vertices: j.max_vertices })
    }
}

/// Report output only; reports are never read back.
pub fn validation_report_json(r: &ValidationReport) -> Value {
    serde_json::json!({
        "valid": r.is_valid(),
        "checks": r.checks.iter().map(|c| serde_json::json!({
            "name": c.name,
            "passed": c.passed(),
            "failures": c.failures,
        })).collect::<Vec<_>>(),
    })
}

pub fn sensitivity_report_json(r: &SensitivityReport) -> Value {
    serde_json::json!({
        "passed": r.passed(),
        "edges": r.edges.iter().map(|e| serde_json::json!({
            "edge": e.edge.0,
            "coefficients": e.coefficients.as_ref().map(|cs| cs.iter().map(format_rational).collect::<Vec<_>>()),
            "mixed_sign": e.mixed_sign,
            "small_jumping": e.small_jumping,
            "slope_negativity": e.slope_negativity,
            "failures": e.failures,
        })).collect::<Vec<_>>(),
    })
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename, so readers never see a partial file.
pub fn write_atomic(path: &std::path::Path, contents: &str) -> std::io::Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => std::path::Path::new("."),
    };
    let mut f = tempfile::NamedTempFile::new_in(dir)?;
    f.write_all(contents.as_bytes())?;
    f.as_file().sync_all()?;
    f.persist(path).map_err(|e| e.error)?;
    Ok(())
}
