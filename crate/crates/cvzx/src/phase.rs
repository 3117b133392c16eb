//! Real polynomial phase functions carried by spiders.
//!
//! A [`PhasePoly`] is stored densely by degree with trailing zero
//! coefficients stripped. Constant terms are retained (they are global
//! phases that only an identity-rule application may drop).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhaseError {
    #[error("scale factor must be nonzero")]
    ZeroScale,
}

/// Polynomial `f(x)`, coefficient of `x^i` at index `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoly {
    coeffs: Vec<Scalar>,
}

impl PhasePoly {
    pub fn zero() -> Self {
        PhasePoly { coeffs: vec![] }
    }

    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        let mut p = PhasePoly { coeffs };
        p.canonicalize();
        p
    }

    /// Monomial `c * x^deg`.
    pub fn monomial(c: Scalar, deg: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); deg + 1];
        coeffs[deg] = c;
        PhasePoly::from_coeffs(coeffs)
    }

    pub fn constant(c: Scalar) -> Self {
        PhasePoly::monomial(c, 0)
    }

    /// `a * x` (linear phase).
    pub fn linear(a: Scalar) -> Self {
        PhasePoly::monomial(a, 1)
    }

    /// `c * x^2` (quadratic shear phase).
    pub fn quadratic(c: Scalar) -> Self {
        PhasePoly::monomial(c, 2)
    }

    fn canonicalize(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.iter().any(|c| !c.is_exact()) {
            for c in &mut self.coeffs {
                *c = c.promote();
            }
        }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_float(&self) -> bool {
        self.coeffs.iter().any(|c| !c.is_exact())
    }

    pub fn add(&self, other: &PhasePoly) -> PhasePoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        PhasePoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> PhasePoly {
        PhasePoly::from_coeffs(self.coeffs.iter().map(Scalar::neg).collect())
    }

    /// Binomial re-expansion of `f(x + a)`.
    pub fn shift(&self, a: &Scalar) -> PhasePoly {
        if a.is_zero() || self.is_zero() {
            return self.clone();
        }
        let n = self.coeffs.len();
        let mut out = vec![Scalar::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // c * (x + a)^i = sum_j C(i,j) a^(i-j) c x^j
            let mut apow = Scalar::one();
            for j in (0..=i).rev() {
                let term = c.mul(&binomial(i, j)).mul(&apow);
                out[j] = out[j].add(&term);
                apow = apow.mul(a);
            }
        }
        PhasePoly::from_coeffs(out)
    }

    /// `f(tau * x)`: coefficient `c_i` maps to `c_i * tau^i`.
    pub fn scale(&self, tau: &Scalar) -> Result<PhasePoly, PhaseError> {
        if tau.is_zero() {
            return Err(PhaseError::ZeroScale);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul(&tau.pow(i as i32).expect("nonzero base")))
            .collect();
        Ok(PhasePoly::from_coeffs(coeffs))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> PhasePoly {
        if self.coeffs.len() <= 1 {
            return PhasePoly::zero();
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul(&Scalar::int(i as i64 + 1)))
            .collect();
        PhasePoly::from_coeffs(coeffs)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64();
        }
        acc
    }

    /// Drops the constant term (an identity-rule global phase move).
    pub fn without_constant(&self) -> PhasePoly {
        let mut coeffs = self.coeffs.clone();
        if !coeffs.is_empty() {
            coeffs[0] = Scalar::zero();
        }
        PhasePoly::from_coeffs(coeffs)
    }
}

fn binomial(n: usize, k: usize) -> Scalar {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Scalar::Exact(BigRational::new(num, den))
}

impl fmt::Display for PhasePoly {
    /// DSL syntax, highest degree first, e.g. `3/2*x^2 - x`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let neg = c.to_f64() < 0.0;
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_mag = mag.is_one() && mag.is_exact();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit_mag => write!(f, "x")?,
                1 => write!(f, "{mag}*x")?,
                _ if unit_mag => write!(f, "x^{i}")?,
                _ => write!(f, "{mag}*x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_cubic(g: i64) -> PhasePoly {
        PhasePoly::monomial(Scalar::int(g), 3)
    }

    #[test]
    fn add_examples() {
        let x2 = PhasePoly::quadratic(Scalar::one());
        assert_eq!(x2.add(&x2), PhasePoly::quadratic(Scalar::int(2)));
        assert_eq!(x2.add(&PhasePoly::zero()), x2);
        let g = gamma_cubic(5);
        assert!(g.add(&g.neg()).is_zero());
    }

    #[test]
    fn shift_cubic_matches_binomial_expansion() {
        // gamma (x+m)^3 = gamma x^3 + 3 gamma m x^2 + 3 gamma m^2 x + gamma m^3
        let g = Scalar::int(2);
        let m = Scalar::int(3);
        let shifted = gamma_cubic(2).shift(&m);
        let expect = PhasePoly::from_coeffs(vec![
            g.mul(&m.pow(3).unwrap()),
            Scalar::int(3).mul(&g).mul(&m.pow(2).unwrap()),
            Scalar::int(3).mul(&g).mul(&m),
            g.clone(),
        ]);
        assert_eq!(shifted, expect);
        assert_eq!(gamma_cubic(2).shift(&Scalar::zero()), gamma_cubic(2));
        let x2 = PhasePoly::quadratic(Scalar::one());
        assert_eq!(
            x2.shift(&Scalar::one()),
            PhasePoly::from_coeffs(vec![Scalar::one(), Scalar::int(2), Scalar::one()])
        );
    }

    #[test]
    fn scale_examples() {
        let x2 = PhasePoly::quadratic(Scalar::one());
        assert_eq!(
            x2.scale(&Scalar::int(2)).unwrap(),
            PhasePoly::quadratic(Scalar::int(4))
        );
        let f = PhasePoly::from_coeffs(vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)]);
        assert_eq!(f.scale(&Scalar::one()).unwrap(), f);
        // x^3 scaled by 1/tau
        let x3 = PhasePoly::monomial(Scalar::one(), 3);
        assert_eq!(
            x3.scale(&Scalar::ratio(1, 2)).unwrap(),
            PhasePoly::monomial(Scalar::ratio(1, 8), 3)
        );
        assert_eq!(x3.scale(&Scalar::zero()), Err(PhaseError::ZeroScale));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            gamma_cubic(4).derivative(),
            PhasePoly::quadratic(Scalar::int(12))
        );
        assert_eq!(
            PhasePoly::linear(Scalar::int(7)).derivative(),
            PhasePoly::constant(Scalar::int(7))
        );
        assert!(PhasePoly::constant(Scalar::int(9)).derivative().is_zero());
    }

    #[test]
    fn shift_composes() {
        let f = PhasePoly::from_coeffs(vec![Scalar::int(1), Scalar::int(-2), Scalar::int(5)]);
        let a = Scalar::ratio(2, 3);
        let b = Scalar::ratio(-1, 7);
        assert_eq!(f.shift(&a).shift(&b), f.shift(&a.add(&b)));
        assert_eq!(
            f.shift(&a).derivative(),
            f.derivative().shift(&a),
            "derivative commutes with shift"
        );
    }

    #[test]
    fn scale_composes() {
        let f = PhasePoly::from_coeffs(vec![Scalar::int(1), Scalar::int(-2), Scalar::int(5)]);
        let t = Scalar::ratio(3, 2);
        let k = Scalar::int(-4);
        assert_eq!(
            f.scale(&t).unwrap().scale(&k).unwrap(),
            f.scale(&t.mul(&k)).unwrap()
        );
    }

    #[test]
    fn display_syntax() {
        let f = PhasePoly::from_coeffs(vec![Scalar::zero(), Scalar::int(-1), Scalar::ratio(3, 2)]);
        assert_eq!(f.to_string(), "3/2*x^2 - x");
        assert_eq!(PhasePoly::zero().to_string(), "0");
        assert_eq!(
            PhasePoly::monomial(Scalar::float(0.25), 3).to_string(),
            "0.25*x^3"
        );
    }
}
