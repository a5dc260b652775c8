//! Smoothability of combinatorial types: exact linear feasibility, the
//! constructive edge-by-edge lift, and realization checking.

mod construct;
pub mod fm;
mod lp;
mod report;
pub mod simplex;
pub mod system;
mod verify;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::combtype::{EdgeId, VertexId};
use crate::linalg::{Rat, RationalVector};

pub use construct::smooth_construct;
pub use lp::{smoothability_system, smoothable_lp, smoothable_simplex, SmoothabilitySystem};
pub use report::{check_sensitivity_consequences, EdgeVerdict, SensitivityReport};
pub use verify::{verify_realization, EDGE_EQUATIONS, EDGE_INTERIOR, EDGE_LENGTHS, LEG_INTERIOR, VERTEX_INTERIOR};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmoothingError {
    #[error("edge slopes have not been solved")]
    UnsolvedSlopes,
    #[error("type fails the consequences of slope sensitivity:\n{0}")]
    Insensitive(SensitivityReport),
    #[error("construction failed on {edge}: {reason}")]
    Construction { edge: EdgeId, reason: String },
    #[error("constructed realization does not verify:\n{0}")]
    Unverified(String),
}

/// Exact edge lengths and vertex positions of a tropical map with the given
/// type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub root_vertex: VertexId,
    pub edge_lengths: BTreeMap<EdgeId, Rat>,
    pub vertex_positions: BTreeMap<VertexId, RationalVector>,
}

impl Realization {
    /// The same map with every length and position multiplied by `s`.
    pub fn scaled(&self, s: &Rat) -> Realization {
        Realization {
            root_vertex: self.root_vertex,
            edge_lengths: self.edge_lengths.iter().map(|(e, l)| (*e, l * s)).collect(),
            vertex_positions: self.vertex_positions.iter().map(|(v, p)| (*v, p.scale(s))).collect(),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests;
