//! Rational functions as uncancelled numerator/denominator polynomial pairs.
//!
//! No pole-zero cancellation is ever performed, and no `simplify` exists:
//! hidden cancellations are precisely what break RHP bookkeeping downstream.

use num_complex::Complex64;

use crate::poly::{Polynomial, PolyError};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum RationalError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("division by a rational function with zero numerator")]
    DivisorZero,
    #[error("negative delay {0} s")]
    NegativeDelay(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A ratio of real polynomials with a free-text label.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    pub label: String,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial, label: impl Into<String>) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Self { num, den, label: label.into() })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64], label: &str) -> Result<Self, RationalError> {
        Ok(Self::new(
            Polynomial::new(num.to_vec())?,
            Polynomial::new(den.to_vec())?,
            label,
        )?)
    }

    pub fn constant(k: f64) -> Self {
        Self::new(Polynomial::constant(k), Polynomial::one(), format!("{k}"))
            .expect("unit denominator")
    }

    pub fn from_poly(p: Polynomial, label: &str) -> Self {
        Self::new(p, Polynomial::one(), label).expect("unit denominator")
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// deg(den) - deg(num); positive for strictly proper functions.
    pub fn relative_degree(&self) -> i32 {
        self.den.degree() as i32 - self.num.degree() as i32
    }

    /// Order of the pole at s = 0 (negative for a zero at the origin).
    pub fn origin_pole_order(&self) -> i32 {
        self.den.origin_multiplicity() as i32 - self.num.origin_multiplicity() as i32
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        // evaluate with shared origin factors removed so s near 0 stays 0/0-free
        let shift = self
            .num
            .origin_multiplicity()
            .min(self.den.origin_multiplicity());
        self.num.eval_shifted(s, shift) / self.den.eval_shifted(s, shift)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            num: self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
            label: format!("({} + {})", self.label, other.label),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            num: self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            den: self.den.mul(&other.den),
            label: format!("({} - {})", self.label, other.label),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            num: self.num.mul(&other.num),
            den: self.den.mul(&other.den),
            label: format!("({} * {})", self.label, other.label),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, RationalError> {
        if other.num.is_zero() {
            return Err(RationalError::DivisorZero);
        }
        Ok(Self {
            num: self.num.mul(&other.den),
            den: self.den.mul(&other.num),
            label: format!("({} / {})", self.label, other.label),
        })
    }

    pub fn reciprocal(&self) -> Result<Self, RationalError> {
        if self.num.is_zero() {
            return Err(RationalError::DivisorZero);
        }
        Ok(Self {
            num: self.den.clone(),
            den: self.num.clone(),
            label: format!("(1 / {})", self.label),
        })
    }
}

/// Third-order all-pass delay approximant with coefficients 1/2, 1/8, 1/48 of
/// `x = T*s` (the truncated e^{-x/2}/e^{x/2} scheme; on the imaginary axis the
/// denominator is the numerator's conjugate, so |G(jw)| = 1 exactly).
pub fn pade_delay(t_delay: f64) -> Result<RationalFunction, RationalError> {
    if t_delay < 0.0 || !t_delay.is_finite() {
        return Err(RationalError::NegativeDelay(t_delay));
    }
    let t = t_delay;
    let num = Polynomial::new(vec![1.0, -t / 2.0, t * t / 8.0, -t * t * t / 48.0])?;
    let den = Polynomial::new(vec![1.0, t / 2.0, t * t / 8.0, t * t * t / 48.0])?;
    RationalFunction::new(num, den, format!("delay({t:.3e}s)"))
}
