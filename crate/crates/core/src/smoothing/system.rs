//! Affine constraint systems over the rationals.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::linalg::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Eq,
    Ge,
}

/// `coeffs · z  (= | ≥)  rhs`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub relation: Relation,
    pub rhs: Rat,
}

impl Constraint {
    pub fn eq(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, relation: Relation::Eq, rhs }
    }

    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Constraint { coeffs, relation: Relation::Ge, rhs }
    }

    pub fn lhs(&self, z: &[Rat]) -> Rat {
        self.coeffs.iter().zip(z).map(|(a, x)| a * x).sum()
    }

    pub fn holds(&self, z: &[Rat]) -> bool {
        let l = self.lhs(z);
        match self.relation {
            Relation::Eq => l == self.rhs,
            Relation::Ge => l >= self.rhs,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// A constraint with no variables that can never hold.
    pub fn is_contradiction(&self) -> bool {
        self.is_trivial()
            && match self.relation {
                Relation::Eq => !self.rhs.is_zero(),
                Relation::Ge => self.rhs.is_positive(),
            }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub vars: usize,
    pub constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        LinearSystem { vars, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: Constraint) {
        debug_assert_eq!(c.coeffs.len(), self.vars);
        self.constraints.push(c);
    }

    pub fn is_satisfied_by(&self, z: &[Rat]) -> bool {
        z.len() == self.vars && self.constraints.iter().all(|c| c.holds(z))
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            let terms: Vec<String> =
                c.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(j, a)| format!("{a}*z{j}")).collect();
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            let rel = if c.relation == Relation::Eq { "=" } else { ">=" };
            writeln!(f, "{lhs} {rel} {}", c.rhs)?;
        }
        Ok(())
    }
}
