use crate::math;
use crate::{Error, Result};

/// Dilation and separation constants of a bitile model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleConstants {
    pub c2: f64,
    pub c3: f64,
    pub c21: f64,
    pub c22: f64,
    pub c1: f64,
    /// Separation constant of (S3).
    pub k0: f64,
    /// Decay exponent `D` of the density.
    pub d: f64,
}

impl Default for AdmissibleConstants {
    /// Classical setting with `C3 = 0.75`, `K0 = 16`, `D = 13` (Lebesgue `gamma + 12`).
    fn default() -> Self {
        Self { c2: 1.0, c3: 0.75, c21: 1.0, c22: 1.0, c1: 1.0, k0: 16.0, d: 13.0 }
    }
}

impl AdmissibleConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [self.c2, self.c3, self.c21, self.c22, self.c1, self.k0, self.d];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Constants("constants must be finite"));
        }
        if self.c2 < 1.0 {
            return Err(Error::Constants("C2 must be at least 1"));
        }
        if !(self.c3 > 0.0 && self.c3 < self.c2) {
            return Err(Error::Constants("C3 must lie in (0, C2)"));
        }
        if self.c21 < self.c2 || self.c22 < self.c2 || self.c1 < self.c2 {
            return Err(Error::Constants("C21, C22 and C1 must be at least C2"));
        }
        if self.k0 <= 2.0 / (self.c2 - self.c3) {
            return Err(Error::Constants("K0 must exceed 2 / (C2 - C3)"));
        }
        Ok(())
    }

    /// `D > gamma + 10`.
    pub fn check_decay(&self, gamma: f64) -> Result<()> {
        if self.d > gamma + 10.0 {
            Ok(())
        } else {
            Err(Error::Constants("D must exceed gamma + 10"))
        }
    }

    /// Same constants with `D = gamma + 12`.
    pub fn with_decay_for(mut self, gamma: f64) -> Self {
        self.d = gamma + 12.0;
        self
    }

    pub fn is_classical(&self) -> bool {
        self.c2 == 1.0 && self.c21 == 1.0 && self.c22 == 1.0 && self.c1 == 1.0
    }

    /// `ceil(log2 K0)`, the smallest accepted scale gap.
    pub fn min_scale_gap(&self) -> u32 {
        math::ceil(math::log2(self.k0)).max(0.0) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_admissible() {
        let c = AdmissibleConstants::default();
        c.validate().unwrap();
        assert!(c.is_classical());
        assert_eq!(c.min_scale_gap(), 4);
        c.check_decay(1.0).unwrap();
        assert!(c.check_decay(3.5).is_err());
        assert_eq!(c.with_decay_for(2.5).d, 14.5);
    }

    #[test]
    fn rejects_each_violation() {
        let base = AdmissibleConstants::default();
        let bad = [
            AdmissibleConstants { c2: 0.9, c3: 0.5, ..base },
            AdmissibleConstants { c3: 1.0, ..base },
            AdmissibleConstants { c21: 0.5, ..base },
            AdmissibleConstants { c1: 0.99, ..base },
            AdmissibleConstants { c3: 0.9, ..base },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
