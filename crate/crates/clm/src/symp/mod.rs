//! Matrix ground truth: symplectic similitude groups over Z/l^rho, their
//! enumeration and exact-uniform sampling, cokernel censuses, orbit
//! counts, and the verification checks tying them to the analytic side.

pub mod census;
pub mod checks;
pub mod enumerate;
pub mod lifted;
pub mod matrix;
pub mod orbits;
pub mod sample;

use crate::error::{ClmError, Result};

/// Which subgroup of the similitude group a computation ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// GSp with multiplier congruent to 1 mod l^xi; xi = 0 is the full
    /// similitude group, xi = rho the symplectic group.
    Bracket(u32),
    /// A single multiplier fiber GSp^(x).
    Fiber(u64),
}

/// A choice of symplectic similitude group over Z/l^rho.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimilitudeGroupSpec {
    pub g: usize,
    pub ell: u64,
    pub rho: u32,
    pub constraint: Constraint,
}

impl SimilitudeGroupSpec {
    pub fn new(g: usize, ell: u64, rho: u32, constraint: Constraint) -> Result<Self> {
        if g == 0 || rho == 0 {
            return Err(ClmError::Config("g and rho must be positive".into()));
        }
        let spec = SimilitudeGroupSpec { g, ell, rho, constraint };
        match constraint {
            Constraint::Bracket(xi) => {
                if xi > rho {
                    return Err(ClmError::Config(format!(
                        "bracket xi = {xi} must lie in 0..={rho}"
                    )));
                }
            }
            Constraint::Fiber(x) => {
                if x % ell == 0 || x >= spec.modulus() {
                    return Err(ClmError::Config(format!(
                        "fiber {x} is not a unit mod {}",
                        spec.modulus()
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn modulus(&self) -> u64 {
        self.ell.pow(self.rho)
    }

    /// Every multiplier value the constraint allows, ascending.
    pub fn multipliers(&self) -> Vec<u64> {
        match self.constraint {
            Constraint::Fiber(x) => vec![x],
            Constraint::Bracket(xi) => {
                let m = self.modulus();
                let step = self.ell.pow(xi);
                (0..m)
                    .filter(|x| x % step == 1 % step && x % self.ell != 0)
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_classes() {
        let s = |c| SimilitudeGroupSpec::new(1, 3, 2, c).unwrap();
        assert_eq!(s(Constraint::Bracket(2)).multipliers(), vec![1]);
        assert_eq!(s(Constraint::Bracket(1)).multipliers(), vec![1, 4, 7]);
        assert_eq!(
            s(Constraint::Bracket(0)).multipliers(),
            vec![1, 2, 4, 5, 7, 8]
        );
        assert_eq!(s(Constraint::Fiber(4)).multipliers(), vec![4]);
    }

    #[test]
    fn spec_validation() {
        assert!(SimilitudeGroupSpec::new(1, 3, 2, Constraint::Bracket(3)).is_err());
        assert!(SimilitudeGroupSpec::new(1, 3, 2, Constraint::Fiber(3)).is_err());
        assert!(SimilitudeGroupSpec::new(1, 3, 2, Constraint::Fiber(9)).is_err());
        assert!(SimilitudeGroupSpec::new(0, 3, 1, Constraint::Bracket(0)).is_err());
        assert!(SimilitudeGroupSpec::new(1, 3, 1, Constraint::Bracket(1)).is_ok());
    }
}
