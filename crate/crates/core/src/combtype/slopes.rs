use std::collections::BTreeSet;

use num_traits::Signed;

use super::CombinatorialType;
use crate::linalg::{primitive, LatticeVector};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SensitiveSlopes {
    pub primitive: BTreeSet<LatticeVector>,
    pub original: BTreeSet<LatticeVector>,
}

/// Edge slopes, in either orientation, lying in the closed edge cone: every
/// coefficient over the cone's generators is nonnegative and one is
/// positive. Types without solved slopes contribute nothing.
pub fn collect_sensitive_slopes(types: &[CombinatorialType]) -> SensitiveSlopes {
    let mut out = SensitiveSlopes::default();
    for t in types {
        let Some(slopes) = &t.edge_slopes else { continue };
        for ((e, _), m) in slopes {
            let Some(cs) = t.target.coefficients_in(t.edge_cone(*e), &m.to_rational()) else { continue };
            if cs.iter().all(|c| !c.is_negative()) && cs.iter().any(Signed::is_positive) {
                out.primitive.insert(primitive(m).expect("positive slope is nonzero"));
                out.original.insert(m.clone());
            }
        }
    }
    out
}
