//! Dense integer-coefficient polynomials.
//!
//! Coefficients are arbitrary-precision, stored constant term first with no
//! trailing zeros; the zero polynomial is the empty list. This is the
//! substrate for all cyclotomic identities, so only exact operations are
//! provided (division is remainder-exact division by a monic-or-unit-leading
//! divisor).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial {
            coeffs: vec![BigInt::one()],
        }
    }

    /// `c · x^e`.
    pub fn monomial(c: BigInt, e: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[e] = c;
        IntPolynomial { coeffs }
    }

    /// Builds from dense coefficients (constant first), trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Sum of `x^e` over the given exponents; duplicate exponents accumulate.
    pub fn from_exponents(exponents: &[usize]) -> Self {
        let mut coeffs = vec![BigInt::zero(); exponents.iter().max().map_or(0, |m| m + 1)];
        for &e in exponents {
            coeffs[e] += 1;
        }
        Self::from_coeffs(coeffs)
    }

    /// `x^n − 1`.
    pub fn x_power_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[n] = BigInt::one();
        IntPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Nonzero terms as `(exponent, coefficient)` pairs, ascending exponent.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
    }

    pub fn eval_bigint(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `p(e^{2πi·theta})` in double precision.
    pub fn eval_unit_circle(&self, theta: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Complex64::new(c.to_f64().unwrap_or(0.0), 0.0);
        }
        acc
    }

    /// `p(x^m)`.
    pub fn substitute_power(&self, m: usize) -> Self {
        assert!(m >= 1, "substitution power must be positive");
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * m + 1];
        for (e, c) in self.terms() {
            coeffs[e * m] = c.clone();
        }
        IntPolynomial { coeffs }
    }

    /// Quotient and remainder; the divisor must have a unit leading
    /// coefficient (±1) so the division stays in integer coefficients.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let d_deg = divisor
            .degree()
            .ok_or_else(|| Error::InternalInvariantViolated("division by zero polynomial".into()))?;
        let lead = divisor.leading().unwrap();
        if !lead.is_one() && !(-lead).is_one() {
            return Err(Error::Unsupported(
                "polynomial division requires a unit leading coefficient".into(),
            ));
        }
        if self.degree().map_or(true, |n| n < d_deg) {
            return Ok((Self::zero(), self.clone()));
        }
        let n_deg = self.degree().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); n_deg - d_deg + 1];
        let neg_lead = (-lead).is_one();
        for i in (d_deg..=n_deg).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = if neg_lead { -rem[i].clone() } else { rem[i].clone() };
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let prod = &q * dc;
                rem[i - d_deg + j] -= prod;
            }
            quot[i - d_deg] = q;
        }
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Exact division; errors if the remainder is nonzero.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::InternalInvariantViolated(format!(
                "expected exact polynomial division, remainder {r}"
            )));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Self) -> bool {
        match other.div_rem(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Remainder modulo `x^n − 1`: exponents fold mod `n`.
    pub fn fold_mod_x_n_minus_one(&self, n: usize) -> Self {
        assert!(n >= 1);
        let mut coeffs = vec![BigInt::zero(); n];
        for (e, c) in self.terms() {
            coeffs[e % n] += c;
        }
        Self::from_coeffs(coeffs)
    }

    /// Nonzero terms as `(exponent, coefficient-string)` pairs, for JSON
    /// emission without float loss.
    pub fn to_term_pairs(&self) -> Vec<(usize, String)> {
        self.terms().map(|(e, c)| (e, c.to_string())).collect()
    }

    /// Sparse text form, e.g. `1 + x^8 - 2*x^9`.
    pub fn to_sparse_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in self.terms() {
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            match (e, mag.is_one()) {
                (0, _) => out.push_str(&mag.to_string()),
                (1, true) => out.push('x'),
                (1, false) => out.push_str(&format!("{mag}*x")),
                (_, true) => out.push_str(&format!("x^{e}")),
                (_, false) => out.push_str(&format!("{mag}*x^{e}")),
            }
        }
        out
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({})", self.to_sparse_string())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sparse_string())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len().max(rhs.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len().max(rhs.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            coeffs[i] -= c;
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}
