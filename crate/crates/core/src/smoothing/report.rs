use std::fmt;

use num_traits::Signed;

use super::SmoothingError;
use crate::combtype::{CombinatorialType, EdgeId};
use crate::linalg::Rat;

/// Verdicts for one edge. `coefficients` expresses the slope oriented away
/// from the first end in the generators of the edge cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeVerdict {
    pub edge: EdgeId,
    pub coefficients: Option<Vec<Rat>>,
    /// No two coefficients are both positive or both negative.
    pub mixed_sign: bool,
    /// Each end's cone has codimension 0 or 1 in the edge cone.
    pub small_jumping: bool,
    /// At a codimension-one end, the slope away from it is positive on the
    /// new generator and nonpositive on the others.
    pub slope_negativity: bool,
    pub failures: Vec<String>,
}

impl EdgeVerdict {
    pub fn passed(&self) -> bool {
        self.mixed_sign && self.small_jumping && self.slope_negativity
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SensitivityReport {
    pub edges: Vec<EdgeVerdict>,
}

impl SensitivityReport {
    pub fn passed(&self) -> bool {
        self.edges.iter().all(EdgeVerdict::passed)
    }

    pub fn edge(&self, e: EdgeId) -> Option<&EdgeVerdict> {
        self.edges.iter().find(|v| v.edge == e)
    }
}

impl fmt::Display for SensitivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.edges {
            let mark = |b: bool| if b { "ok" } else { "FAILED" };
            writeln!(
                f,
                "{}: mixed sign {}, small jumping {}, slope negativity {}",
                v.edge,
                mark(v.mixed_sign),
                mark(v.small_jumping),
                mark(v.slope_negativity)
            )?;
            for x in &v.failures {
                writeln!(f, "  {x}")?;
            }
        }
        Ok(())
    }
}

/// Tests the necessary conditions a type over a slope-sensitive target
/// satisfies.
pub fn check_sensitivity_consequences(t: &CombinatorialType) -> Result<SensitivityReport, SmoothingError> {
    let c = &t.target;
    let mut report = SensitivityReport::default();
    for e in t.graph.edges() {
        let sigma_e = t.edge_cone(e.id);
        let slope = t.slope(e.id, e.ends[0]).ok_or(SmoothingError::UnsolvedSlopes)?;
        let coefficients = c.coefficients_in(sigma_e, &slope.to_rational());
        let mut v = EdgeVerdict {
            edge: e.id,
            coefficients: coefficients.clone(),
            mixed_sign: true,
            small_jumping: true,
            slope_negativity: true,
            failures: Vec::new(),
        };
        match &coefficients {
            None => {
                v.mixed_sign = false;
                v.slope_negativity = false;
                v.failures.push(format!("slope {slope} is not in the span of {sigma_e}"));
            }
            Some(a) => {
                let pos = a.iter().filter(|x| x.is_positive()).count();
                let neg = a.iter().filter(|x| x.is_negative()).count();
                if pos > 1 || neg > 1 {
                    v.mixed_sign = false;
                    v.failures.push(format!("slope {slope} has two coefficients of the same sign over {sigma_e}"));
                }
            }
        }
        for end in e.ends {
            let sigma_v = t.vertex_cone(end);
            let gap = sigma_e.dim() as isize - sigma_v.dim() as isize;
            if !(0..=1).contains(&gap) || !sigma_v.is_face_of(sigma_e) {
                v.small_jumping = false;
                v.failures.push(format!("{end} jumps from {sigma_v} to {sigma_e}"));
                continue;
            }
            if gap == 1 {
                let away = t.slope(e.id, end).ok_or(SmoothingError::UnsolvedSlopes)?;
                let Some(a) = c.coefficients_in(sigma_e, &away.to_rational()) else { continue };
                let ok = sigma_e.ids().iter().zip(&a).all(|(&i, x)| {
                    if sigma_v.contains_ray(i) {
                        !x.is_positive()
                    } else {
                        x.is_positive()
                    }
                });
                if !ok {
                    v.slope_negativity = false;
                    v.failures.push(format!("slope {away} away from {end} has the wrong signs"));
                }
            }
        }
        report.edges.push(v);
    }
    Ok(report)
}
