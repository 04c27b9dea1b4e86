//! Module parameters: the data (λ, μ, k, p, l, lacunary) naming one
//! subquotient, with the derived quantities used everywhere else.

use crate::field::FieldValue;
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Names one subquotient module of symbols from weight λ to weight μ, with
/// anchor order k (order2 = 2k), parity anchor p, length l.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub lambda: Rational,
    pub mu: Rational,
    pub k: Rational,
    pub p: u8,
    pub l: u32,
    #[serde(default)]
    pub lacunary: bool,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SpecError {
    #[error("parity must be 0 or 1, got {0}")]
    BadParity(u8),
    #[error("length must be positive")]
    BadLength,
    #[error("lacunary submodule needs n ∉ {{0, 1/2}}, got n = {0}")]
    BadLacunaryAnchor(Rational),
    #[error("lacunary subquotients are formed for length ≥ 3, got {0}")]
    BadLacunaryLength(u32),
}

impl ModuleSpec {
    pub fn new(
        lambda: Rational,
        mu: Rational,
        k: Rational,
        p: u8,
        l: u32,
        lacunary: bool,
    ) -> Result<Self, SpecError> {
        let s = ModuleSpec {
            lambda,
            mu,
            k,
            p,
            l,
            lacunary,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.p > 1 {
            return Err(SpecError::BadParity(self.p));
        }
        if self.l == 0 {
            return Err(SpecError::BadLength);
        }
        if self.lacunary {
            if self.l < 3 {
                return Err(SpecError::BadLacunaryLength(self.l));
            }
            let n = self.n();
            if n.is_zero() || n == Rational::new(1, 2) {
                return Err(SpecError::BadLacunaryAnchor(n));
            }
        }
        Ok(())
    }

    /// δ = μ − λ.
    pub fn delta(&self) -> Rational {
        &self.mu - &self.lambda
    }

    /// n = δ − k, the composition-series anchor.
    pub fn n(&self) -> Rational {
        &self.delta() - &self.k
    }

    /// γ = 3(λ + μ − 1/2)².
    pub fn gamma(&self) -> Rational {
        let t = self.gamma_half_coeff();
        Rational::from(3) * &t * &t
    }

    /// The rational t with γ^{1/2} = t·√3, namely λ + μ − 1/2.
    pub fn gamma_half_coeff(&self) -> Rational {
        &self.lambda + &self.mu - &Rational::new(1, 2)
    }

    /// γ^{1/2} = √3(λ + μ − 1/2) as a field value.
    pub fn gamma_half(&self) -> FieldValue {
        FieldValue::sqrt3_times(&self.gamma_half_coeff())
    }

    /// N_l = n + l/4 − 1/2.
    pub fn n_l(&self) -> Rational {
        &self.n() + &(Rational::new(self.l as i64, 4) - Rational::new(1, 2))
    }

    /// The conjugate spec at (−μ + 1/2, −λ + 1/2); fixes (γ, δ) and flips
    /// the sign of γ^{1/2}.
    pub fn conjugate(&self) -> ModuleSpec {
        let half = Rational::new(1, 2);
        ModuleSpec {
            lambda: &half - &self.mu,
            mu: &half - &self.lambda,
            k: self.k.clone(),
            p: self.p,
            l: self.l,
            lacunary: self.lacunary,
        }
    }

    /// Composition-series level offsets, doubled (i2 = 2i). Dense modules use
    /// 0..l; lacunary ones skip offsets 1/2 and 1 and append (l+3)/2.
    pub fn level_offsets2(&self) -> Vec<u32> {
        if !self.lacunary {
            (0..self.l).collect()
        } else {
            let mut v = vec![0u32];
            v.extend(3..=self.l);
            v.push(self.l + 3);
            v
        }
    }

    pub fn is_resonant(&self) -> bool {
        is_resonant(&self.n(), self.l)
    }
}

/// Resonance of the anchor n with respect to length l: 2n integral with
/// 2 − l ≤ 2n ≤ 0 (the l − 1 values 0, −1/2, …, 1 − l/2).
pub fn is_resonant(n: &Rational, l: u32) -> bool {
    match n.twice_to_i64() {
        Some(n2) => 2 - (l as i64) <= n2 && n2 <= 0,
        None => false,
    }
}

impl fmt::Debug for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SQ(λ={}, μ={}, k={}, p={}, l={}{})",
            self.lambda,
            self.mu,
            self.k,
            self.p,
            self.l,
            if self.lacunary { ", lac" } else { "" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn resonance_examples() {
        assert!(is_resonant(&rat!(0), 2));
        // l = 6: exactly {0, −1/2, −1, −3/2, −2}
        let resonant6: Vec<Rational> = [0, -1, -2, -3, -4]
            .iter()
            .map(|&n2| rat!(n2, 2))
            .collect();
        for n2 in -10..10 {
            let n = rat!(n2, 2);
            assert_eq!(is_resonant(&n, 6), resonant6.contains(&n), "n = {n}");
        }
        assert!(!is_resonant(&rat!(1, 4), 100));
        assert!(!is_resonant(&rat!(-5, 2), 6));
    }

    #[test]
    fn derived_quantities() {
        let s = ModuleSpec::new(rat!(1), rat!(4), rat!(2), 0, 6, false).unwrap();
        assert_eq!(s.delta(), rat!(3));
        assert_eq!(s.n(), rat!(1));
        assert_eq!(s.gamma(), rat!(243, 4)); // 3·(9/2)²
        assert_eq!(s.n_l(), rat!(2));
        let c = s.conjugate();
        assert_eq!((c.lambda.clone(), c.mu.clone()), (rat!(-7, 2), rat!(-1, 2)));
        assert_eq!(c.delta(), s.delta());
        assert_eq!(c.gamma(), s.gamma());
        assert_eq!(c.gamma_half_coeff(), -s.gamma_half_coeff());
    }

    #[test]
    fn lacunary_levels() {
        let s = ModuleSpec::new(rat!(0), rat!(4), rat!(3), 0, 4, true).unwrap();
        assert_eq!(s.level_offsets2(), vec![0, 3, 4, 7]);
        let s3 = ModuleSpec::new(rat!(0), rat!(4), rat!(3), 0, 3, true).unwrap();
        assert_eq!(s3.level_offsets2(), vec![0, 3, 6]);
        assert!(ModuleSpec::new(rat!(0), rat!(4), rat!(4), 0, 4, true).is_err());
        assert!(ModuleSpec::new(rat!(0), rat!(4), rat!(7, 2), 0, 4, true).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = ModuleSpec::new(rat!(1, 3), rat!(8, 3), rat!(2), 1, 7, false).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let back: ModuleSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
