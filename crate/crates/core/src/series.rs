//! Truncated power series in one variable with exact rational coefficients.
//!
//! A [`TruncatedSeries`] is known modulo `y^precision`. Binary operations on
//! series of different precision truncate to the smaller one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Assign, Rational};

use crate::error::SeriesError;

/// Result of [`TruncatedSeries::vanishing_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingOrder {
    /// Index of the first nonzero coefficient.
    Order(usize),
    /// Every stored coefficient is zero; the true order is at least the precision.
    ZeroToPrecision,
}

impl VanishingOrder {
    pub fn order(self) -> Option<usize> {
        match self {
            VanishingOrder::Order(k) => Some(k),
            VanishingOrder::ZeroToPrecision => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// The zero series known to `precision` terms.
    pub fn zero(precision: usize) -> Self {
        assert!(precision > 0, "series precision must be positive");
        TruncatedSeries {
            coeffs: vec![Rational::new(); precision],
        }
    }

    pub fn one(precision: usize) -> Self {
        Self::constant(Rational::from(1), precision)
    }

    pub fn constant(c: Rational, precision: usize) -> Self {
        let mut s = Self::zero(precision);
        s.coeffs[0] = c;
        s
    }

    /// `c * y^k`, truncated.
    pub fn monomial(c: Rational, k: usize, precision: usize) -> Self {
        let mut s = Self::zero(precision);
        if k < precision {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from its leading coefficients, padding with zeros or
    /// truncating to `precision`.
    pub fn from_coeffs(mut coeffs: Vec<Rational>, precision: usize) -> Self {
        assert!(precision > 0, "series precision must be positive");
        coeffs.resize(precision, Rational::new());
        TruncatedSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], precision: usize) -> Self {
        Self::from_coeffs(
            coeffs.iter().map(|&c| Rational::from(c)).collect(),
            precision,
        )
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    /// Drops terms of degree `>= precision`. Never raises precision.
    pub fn truncate(&self, precision: usize) -> Self {
        let p = precision.min(self.precision());
        TruncatedSeries {
            coeffs: self.coeffs[..p].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| Rational::from(a * c)).collect(),
        }
    }

    /// Multiplication by `y^k`.
    pub fn shift(&self, k: usize) -> Self {
        let p = self.precision();
        let mut out = Self::zero(p);
        for (i, c) in self.coeffs.iter().enumerate().take(p.saturating_sub(k)) {
            out.coeffs[i + k] = c.clone();
        }
        out
    }

    /// Cauchy product truncated to the smaller precision. Zero coefficients
    /// are skipped, which matters for the sparse series of cyclic covers.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let p = self.precision().min(other.precision());
        let lhs: Vec<(usize, &Rational)> = nonzero_terms(&self.coeffs[..p]);
        let rhs: Vec<(usize, &Rational)> = nonzero_terms(&other.coeffs[..p]);
        let mut out = vec![Rational::new(); p];
        let mut prod = Rational::new();
        for &(i, a) in &lhs {
            for &(j, b) in &rhs {
                if i + j >= p {
                    break;
                }
                prod.assign(a * b);
                out[i + j] += &prod;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiplicative inverse of a unit series.
    pub fn inverse(&self) -> Result<TruncatedSeries, SeriesError> {
        let p = self.precision();
        if self.coeffs[0] == 0 {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let c0_inv = Rational::from(self.coeffs[0].recip_ref());
        let terms = nonzero_terms(&self.coeffs);
        let mut out: Vec<Rational> = Vec::with_capacity(p);
        out.push(c0_inv.clone());
        let mut acc = Rational::new();
        let mut prod = Rational::new();
        for k in 1..p {
            acc.assign(0);
            for &(i, a) in terms.iter().skip(1) {
                if i > k {
                    break;
                }
                if out[k - i] != 0 {
                    prod.assign(a * &out[k - i]);
                    acc += &prod;
                }
            }
            if acc == 0 {
                out.push(Rational::new());
            } else {
                acc *= &c0_inv;
                out.push(Rational::from(-&acc));
            }
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    pub fn pow(&self, e: u32) -> TruncatedSeries {
        let mut result = TruncatedSeries::one(self.precision());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Termwise derivative; the precision drops by one (never below one).
    pub fn derivative(&self) -> TruncatedSeries {
        let p = self.precision();
        if p == 1 {
            return TruncatedSeries::zero(1);
        }
        let coeffs = (1..p)
            .map(|k| &self.coeffs[k] * Rational::from(k as u64))
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn vanishing_order(&self) -> VanishingOrder {
        match self.coeffs.iter().position(|c| *c != 0) {
            Some(k) => VanishingOrder::Order(k),
            None => VanishingOrder::ZeroToPrecision,
        }
    }

    /// Evaluates a polynomial (coefficients lowest degree first) at this
    /// series by Horner's rule.
    pub fn compose_poly(&self, poly: &[Rational]) -> TruncatedSeries {
        let p = self.precision();
        let mut acc = TruncatedSeries::zero(p);
        for c in poly.iter().rev() {
            acc = acc.mul(self);
            acc.coeffs[0] += c;
        }
        acc
    }
}

fn nonzero_terms(coeffs: &[Rational]) -> Vec<(usize, &Rational)> {
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .collect()
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let p = self.precision().min(rhs.precision());
        TruncatedSeries {
            coeffs: (0..p)
                .map(|k| Rational::from(&self.coeffs[k] + &rhs.coeffs[k]))
                .collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let p = self.precision().min(rhs.precision());
        TruncatedSeries {
            coeffs: (0..p)
                .map(|k| Rational::from(&self.coeffs[k] - &rhs.coeffs[k]))
                .collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*y")?,
                _ => write!(f, "({c})*y^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(y^{})", self.precision())
    }
}
