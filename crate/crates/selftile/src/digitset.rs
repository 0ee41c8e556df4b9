//! Digit sets: finite sets of non-negative integers with the canonical form
//! `0 ∈ D`, `gcd(D) = 1`, and their mask polynomials `P_D(x) = Σ_{d∈D} x^d`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// A finite set of distinct non-negative integers, kept sorted.
///
/// Tile/spectral status is invariant under the affine normalization
/// `d ↦ (d − min) / gcd`; sets are stored as given (possibly non-canonical)
/// and [`DigitSet::normalize`] reports the applied shift and scale.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitSet {
    elements: Vec<BigInt>,
}

/// Result of canonical normalization: `set = (raw − shift) / scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub set: DigitSet,
    pub shift: BigInt,
    pub scale: BigInt,
}

impl DigitSet {
    /// Builds a digit set from arbitrary values; duplicates collapse
    /// (set semantics), negative entries are rejected.
    pub fn new<I>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = BigInt>,
    {
        let mut elements: Vec<BigInt> = values.into_iter().collect();
        if elements.is_empty() {
            return Err(Error::InvalidDigitSet("empty".into()));
        }
        if let Some(neg) = elements.iter().find(|x| x.is_negative()) {
            return Err(Error::InvalidDigitSet(format!("negative element {neg}")));
        }
        elements.sort();
        elements.dedup();
        Ok(DigitSet { elements })
    }

    pub fn from_u64s(values: &[u64]) -> Self {
        Self::new(values.iter().map(|&v| BigInt::from(v))).expect("non-empty u64 digit set")
    }

    /// `{0, 1, ..., n−1}`.
    pub fn range(n: u64) -> Self {
        assert!(n >= 1);
        Self::from_u64s(&(0..n).collect::<Vec<_>>())
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty sets
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn min_element(&self) -> &BigInt {
        &self.elements[0]
    }

    pub fn max_element(&self) -> &BigInt {
        self.elements.last().unwrap()
    }

    pub fn gcd(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in &self.elements {
            g = g.gcd(x);
        }
        g
    }

    /// Canonical means `0 ∈ D` and `gcd(D) = 1`.
    pub fn is_canonical(&self) -> bool {
        self.elements[0].is_zero() && (self.len() == 1 || self.gcd().is_one())
    }

    /// Subtracts the minimum and divides by the gcd, reporting both.
    pub fn normalize(raw: &[BigInt]) -> Result<Normalized> {
        let set = Self::new(raw.iter().cloned())?;
        let shift = set.min_element().clone();
        let shifted: Vec<BigInt> = set.elements.iter().map(|x| x - &shift).collect();
        let mut scale = BigInt::zero();
        for x in &shifted {
            scale = scale.gcd(x);
        }
        if scale.is_zero() {
            scale = BigInt::one(); // singleton {0}
        }
        let elements = shifted.iter().map(|x| x / &scale).collect();
        Ok(Normalized {
            set: DigitSet { elements },
            shift,
            scale,
        })
    }

    /// Affine image `scale·D + shift` (scale > 0, result non-negative).
    pub fn affine(&self, scale: &BigInt, shift: &BigInt) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::InvalidDigitSet("scale must be positive".into()));
        }
        Self::new(self.elements.iter().map(|x| x * scale + shift))
    }

    /// `A + B` with an exactness check: errors with a witnessing collision
    /// when two pairs produce the same sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let mut seen: std::collections::HashMap<BigInt, (BigInt, BigInt)> =
            std::collections::HashMap::with_capacity(self.len() * other.len());
        for a in &self.elements {
            for b in &other.elements {
                let s = a + b;
                if let Some((a0, b0)) = seen.get(&s) {
                    return Err(Error::NotDirectSum {
                        value: s,
                        a1: a0.clone(),
                        b1: b0.clone(),
                        a2: a.clone(),
                        b2: b.clone(),
                    });
                }
                seen.insert(s, (a.clone(), b.clone()));
            }
        }
        Self::new(seen.into_keys())
    }

    /// Direct sum of several sets, left to right.
    pub fn direct_sum_all<'a, I>(sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a DigitSet>,
    {
        let mut iter = sets.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidDigitSet("empty direct sum".into()))?;
        let mut acc = first.clone();
        for s in iter {
            acc = acc.direct_sum(s)?;
        }
        Ok(acc)
    }

    /// Scales every element by `m ≥ 0`.
    pub fn scale(&self, m: &BigInt) -> Result<Self> {
        if m.is_negative() {
            return Err(Error::InvalidDigitSet("negative scale".into()));
        }
        Self::new(self.elements.iter().map(|x| x * m))
    }

    /// The lift `{x_i + n·t_i}` for per-element offsets `t_i` (aligned with
    /// the sorted elements). The result must again be a set of distinct
    /// non-negative integers.
    pub fn reduce_mod(&self, n: &BigInt, offsets: &[BigInt]) -> Result<Self> {
        if offsets.len() != self.len() {
            return Err(Error::InvalidModuloLift(format!(
                "{} offsets for {} elements",
                offsets.len(),
                self.len()
            )));
        }
        if !n.is_positive() {
            return Err(Error::InvalidModuloLift("modulus must be positive".into()));
        }
        let mut lifted = Vec::with_capacity(self.len());
        for (x, t) in self.elements.iter().zip(offsets) {
            let y = x + n * t;
            if y.is_negative() {
                return Err(Error::InvalidModuloLift(format!(
                    "lift {x} + {n}·{t} = {y} is negative"
                )));
            }
            lifted.push(y);
        }
        let count = lifted.len();
        let set = Self::new(lifted)?;
        if set.len() != count {
            return Err(Error::InvalidModuloLift("lift collides".into()));
        }
        Ok(set)
    }

    /// True iff `#D = b` and the residues of `D` mod `b` are exactly
    /// `{0, ..., b−1}`.
    pub fn is_complete_residue_set(&self, b: u64) -> bool {
        if self.len() as u64 != b {
            return false;
        }
        let modulus = BigInt::from(b);
        let mut seen = vec![false; b as usize];
        for x in &self.elements {
            let r = x.mod_floor(&modulus).to_usize().unwrap();
            if seen[r] {
                return false;
            }
            seen[r] = true;
        }
        true
    }

    /// The mask polynomial `P_D(x) = Σ_{d∈D} x^d`.
    ///
    /// Fails only when an element exceeds the dense-representation budget.
    pub fn mask_polynomial(&self) -> Result<MaskPolynomial> {
        MaskPolynomial::of(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for tok in text.split(&[',', '\n', ' '][..]) {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let v = BigInt::from_str(tok)
                .map_err(|e| Error::InvalidDigitSet(format!("bad integer {tok:?}: {e}")))?;
            values.push(v);
        }
        Self::new(values)
    }

    /// Elements as u64, for desk-scale search routines.
    pub fn to_u64s(&self) -> Result<Vec<u64>> {
        self.elements
            .iter()
            .map(|x| {
                x.to_u64()
                    .ok_or_else(|| Error::BudgetExceeded(format!("element {x} exceeds u64")))
            })
            .collect()
    }
}

impl fmt::Display for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Maximum digit value admitted into a dense mask polynomial.
pub const MASK_DEGREE_BUDGET: u64 = 4_000_000;

/// A `{0,1}`-coefficient polynomial whose exponent set is a digit set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskPolynomial {
    poly: IntPolynomial,
}

impl MaskPolynomial {
    pub fn of(digits: &DigitSet) -> Result<Self> {
        let max = digits.max_element();
        if max > &BigInt::from(MASK_DEGREE_BUDGET) {
            return Err(Error::BudgetExceeded(format!(
                "digit {max} too large for a dense mask polynomial"
            )));
        }
        let exps: Vec<usize> = digits
            .elements()
            .iter()
            .map(|x| x.to_usize().unwrap())
            .collect();
        Ok(MaskPolynomial {
            poly: IntPolynomial::from_exponents(&exps),
        })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn into_poly(self) -> IntPolynomial {
        self.poly
    }

    /// Recovers the digit set from the exponents of the nonzero terms.
    pub fn digit_set(&self) -> DigitSet {
        DigitSet::new(self.poly.terms().map(|(e, _)| BigInt::from(e)))
            .expect("mask polynomial has at least one term")
    }
}
