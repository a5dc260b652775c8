//! Numerical data and its lift along a single-ray subdivision.

use num_traits::Zero;

use super::TypeError;
use crate::complex::ConeComplex;
use crate::linalg::{rat_from_int, Int, LatticeVector, Rat};
use crate::subdivision::{single_ray_weights, Subdivision};

/// Tangency points `α_j` of the markings and the total degree vector
/// (one entry per ray of the target).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericalData {
    pub n: usize,
    pub alphas: Vec<LatticeVector>,
    pub total_degree: Vec<Int>,
}

impl NumericalData {
    pub fn new(alphas: Vec<LatticeVector>, total_degree: Vec<Int>) -> Self {
        NumericalData { n: alphas.len(), alphas, total_degree }
    }

    /// `Σ_j p_i(α_j)` for every ray `i`.
    pub fn tangency_totals(&self, target: &ConeComplex) -> Result<Vec<Rat>, TypeError> {
        let mut totals = vec![Rat::zero(); target.num_rays()];
        for a in &self.alphas {
            let e = target.expansion(&a.to_rational()).ok_or_else(|| TypeError::AlphaOutsideSupport(a.clone()))?;
            for (t, x) in totals.iter_mut().zip(e) {
                *t += x;
            }
        }
        Ok(totals)
    }

    /// Global balancing: tangencies along each ray add up to the degree.
    pub fn check_balancing(&self, target: &ConeComplex) -> Result<(), TypeError> {
        if self.total_degree.len() != target.num_rays() || self.n != self.alphas.len() {
            return Err(TypeError::BadLength {
                what: "total degree".into(),
                expected: target.num_rays(),
                found: self.total_degree.len(),
            });
        }
        for (i, (legs, d)) in self.tangency_totals(target)?.into_iter().zip(&self.total_degree).enumerate() {
            if legs != rat_from_int(d) {
                return Err(TypeError::GlobalBalancing {
                    direction: i,
                    legs: Box::new(legs),
                    degrees: Box::new(rat_from_int(d)),
                });
            }
        }
        Ok(())
    }
}

/// Lifts `lam` along a subdivision adding a single ray `E = Σ w_i u_i`:
/// `d_E = Σ_j p_E(α_j)`, the degree along `E` becomes `d_E` and each old
/// ray loses `w_i·d_E`. For a stellar subdivision the weights are 1 on the
/// centre's generators and 0 elsewhere.
pub fn lift_numerical_data(s: &Subdivision, lam: &NumericalData) -> Result<NumericalData, TypeError> {
    let (e, weights) = single_ray_weights(s)
        .ok_or_else(|| TypeError::NotSingleStellar(format!("{} rays added", s.new_rays().len())))?;
    let d_e: Rat = lam.tangency_totals(&s.refined)?[e].clone();
    if !d_e.is_integer() {
        return Err(TypeError::NotSingleStellar(format!("exceptional degree {d_e} is not integral")));
    }
    let mut degree = Vec::with_capacity(s.refined.num_rays());
    for r in 0..s.refined.num_rays() {
        if r == e {
            degree.push(d_e.to_integer());
            continue;
        }
        let i = s.base.ray_index(s.refined.ray(r)).expect("every other refined ray is a base ray");
        let lifted = rat_from_int(&lam.total_degree[i]) - &weights[i] * &d_e;
        if !lifted.is_integer() {
            return Err(TypeError::NotSingleStellar(format!("lifted degree {lifted} is not integral")));
        }
        degree.push(lifted.to_integer());
    }
    Ok(NumericalData { n: lam.n, alphas: lam.alphas.clone(), total_degree: degree })
}
