//! Complete tile/spectral classification of four-element digit sets over
//! base 4.
//!
//! For canonical `D = {0, a, b, c}` the mask polynomial has unit-circle
//! zeros iff exactly two of `a, b, c` are odd. Relabelling so that `b` is
//! even and `a < c` are odd, write `b = 2^t ℓ` and `c − a = 2^{t'} ℓ'` with
//! `ℓ, ℓ'` odd; the root set is carried by the odd-numerator families
//! `R_1 = (1/2p_1)O`, `R_2 = (1/2p_2)O` and, exactly when `t = t'`,
//! `R_3 = (1/2^{t+1}p_3)O`, where `p_1 = gcd(a, c−b)`, `p_2 = gcd(c, b−a)`,
//! `p_3 = gcd(ℓ, ℓ')`. `D` is a tile digit set iff it is spectral iff
//! `t = t'` is odd, in which case the spectrum is
//! `Z ⊕ Σ_{j=1}^{k} 4^{−j}{0,1}` with `k = (t−1)/2`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cyclotomic::divisors;
use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::productform::{
    recognize_four_digit_modulo_form, tile_measure, two_adic_valuation,
};
use crate::zeroset::{certify_spectrum, SelfSimilarMeasure, SpectrumCertificate};

pub const BASE: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RootSetLabel {
    R1,
    R2,
    R3,
}

/// Parameters of the zero structure when the two-odd-one-even pattern holds.
#[derive(Clone, Debug)]
pub struct ZeroStructure {
    /// Smaller odd digit.
    pub a: BigInt,
    /// The (single) even nonzero digit, `2^t·ℓ`.
    pub b_even: BigInt,
    /// Larger odd digit, `c = a + 2^{t'}·ℓ'`.
    pub c: BigInt,
    pub t: u32,
    pub ell: BigInt,
    pub t_prime: u32,
    pub ell_prime: BigInt,
    /// `gcd(a, c − b)`.
    pub p1: BigInt,
    /// `gcd(c, b − a)`.
    pub p2: BigInt,
    /// `gcd(ℓ, ℓ')`.
    pub p3: BigInt,
    /// `{R1, R2}`, plus `R3` exactly when `t = t'`.
    pub root_sets: Vec<RootSetLabel>,
}

#[derive(Clone, Debug)]
pub struct FourDigitAnalysis {
    pub digits: DigitSet,
    /// `None` when the parity pattern rules out unit-circle zeros.
    pub zero_structure: Option<ZeroStructure>,
}

impl FourDigitAnalysis {
    pub fn has_zero(&self) -> bool {
        self.zero_structure.is_some()
    }
}

/// Computes the relabelled parameters and root sets of a canonical
/// four-element digit set.
pub fn analyze(d: &DigitSet) -> Result<FourDigitAnalysis> {
    if d.len() != 4 {
        return Err(Error::WrongCardinality(d.len(), 4));
    }
    if !d.is_canonical() {
        return Err(Error::NotCanonical(format!("{d}")));
    }
    let nonzero: Vec<&BigInt> = d.elements().iter().skip(1).collect();
    let odds: Vec<&BigInt> = nonzero.iter().copied().filter(|x| x.is_odd()).collect();
    let evens: Vec<&BigInt> = nonzero.iter().copied().filter(|x| x.is_even()).collect();
    if odds.len() != 2 {
        return Ok(FourDigitAnalysis {
            digits: d.clone(),
            zero_structure: None,
        });
    }
    let a = odds[0].min(odds[1]).clone();
    let c = odds[0].max(odds[1]).clone();
    let b_even = evens[0].clone();
    let t = two_adic_valuation(&b_even);
    let ell = &b_even >> t;
    let diff = &c - &a;
    let t_prime = two_adic_valuation(&diff);
    let ell_prime = diff >> t_prime;
    let p1 = a.gcd(&(&c - &b_even));
    let p2 = c.gcd(&(&b_even - &a));
    let p3 = ell.gcd(&ell_prime);
    debug_assert!(p1.is_odd() && p2.is_odd() && p3.is_odd());
    debug_assert!(p1.gcd(&p2).is_one() && p1.gcd(&p3).is_one() && p2.gcd(&p3).is_one());
    let mut root_sets = vec![RootSetLabel::R1, RootSetLabel::R2];
    if t == t_prime {
        root_sets.push(RootSetLabel::R3);
    }
    Ok(FourDigitAnalysis {
        digits: d.clone(),
        zero_structure: Some(ZeroStructure {
            a,
            b_even,
            c,
            t,
            ell,
            t_prime,
            ell_prime,
            p1,
            p2,
            p3,
            root_sets,
        }),
    })
}

#[derive(Clone, Debug)]
pub struct FourDigitVerdict {
    pub is_tile: bool,
    /// Always equal to `is_tile` in this regime.
    pub is_spectral: bool,
    /// `(t−1)/2` for tiles.
    pub k: Option<u32>,
    /// `Γ = Σ_{j=1}^k 4^{−j}{0,1}` for tiles (`{0}` when `t = 1`).
    pub spectrum: Option<Vec<BigRational>>,
    /// Which condition failed, for non-tiles.
    pub reason: Option<String>,
}

/// The explicit spectrum generator `Γ = ⊕_{j=1}^{k} 4^{−j}{0, 1}`.
pub fn spectrum_gamma(k: u32) -> Vec<BigRational> {
    let mut gamma = vec![BigRational::zero()];
    for j in 1..=k {
        let step = BigRational::new(BigInt::one(), BigInt::from(4).pow(j));
        let mut next = Vec::with_capacity(gamma.len() * 2);
        for g in &gamma {
            next.push(g.clone());
            next.push(g + &step);
        }
        gamma = next;
    }
    gamma.sort();
    gamma
}

/// Tile/spectral verdict by direct parameter arithmetic: tile iff the
/// two-odd-one-even pattern holds with `t = t'` odd.
pub fn classify(d: &DigitSet) -> Result<FourDigitVerdict> {
    let analysis = analyze(d)?;
    let Some(z) = &analysis.zero_structure else {
        return Ok(FourDigitVerdict {
            is_tile: false,
            is_spectral: false,
            k: None,
            spectrum: None,
            reason: Some("parity pattern is not two-odd-one-even".into()),
        });
    };
    if z.t != z.t_prime {
        return Ok(FourDigitVerdict {
            is_tile: false,
            is_spectral: false,
            k: None,
            spectrum: None,
            reason: Some(format!("t = {} differs from t' = {}", z.t, z.t_prime)),
        });
    }
    if z.t % 2 == 0 {
        return Ok(FourDigitVerdict {
            is_tile: false,
            is_spectral: false,
            k: None,
            spectrum: None,
            reason: Some(format!("t = {} is even", z.t)),
        });
    }
    let k = (z.t - 1) / 2;
    Ok(FourDigitVerdict {
        is_tile: true,
        is_spectral: true,
        k: Some(k),
        spectrum: Some(spectrum_gamma(k)),
        reason: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ZSetLabel {
    Z1,
    Z2,
    Z3,
    Z0,
    Z3Prime,
}

/// True iff `ξ·d0 = 4^k·(odd)` for some `k ≥ 1`, i.e. `ξ` lies in
/// `∪_{k≥1} 4^k·(1/d0)·O`.
fn in_scaled_odd_family(xi: &BigRational, d0: &BigInt) -> bool {
    let scaled = xi * BigRational::from(d0.clone());
    if !scaled.denom().is_one() {
        return false;
    }
    let n = scaled.numer();
    if n.is_zero() {
        return false;
    }
    let v = two_adic_valuation(n);
    v >= 2 && v % 2 == 0
}

/// Exact membership of `ξ` in the dilation families
/// `Z_i = ∪_{k≥1} 4^k R_i`, `Z_0 = ∪ (4^k/2)O`, `Z_3' = ∪ (4^k/2^{t+1})O`.
pub fn z_set_membership(z: &ZeroStructure, xi: &BigRational) -> BTreeSet<ZSetLabel> {
    let mut out = BTreeSet::new();
    let two = BigInt::from(2);
    if in_scaled_odd_family(xi, &(&two * &z.p1)) {
        out.insert(ZSetLabel::Z1);
    }
    if in_scaled_odd_family(xi, &(&two * &z.p2)) {
        out.insert(ZSetLabel::Z2);
    }
    let pow = BigInt::from(2).pow(z.t + 1);
    if in_scaled_odd_family(xi, &(&pow * &z.p3)) {
        out.insert(ZSetLabel::Z3);
    }
    if in_scaled_odd_family(xi, &two) {
        out.insert(ZSetLabel::Z0);
    }
    if in_scaled_odd_family(xi, &pow) {
        out.insert(ZSetLabel::Z3Prime);
    }
    out
}

/// The complete cyclotomic index set of the mask polynomial, read off the
/// root structure: denominators `2d` for `d | p_1` or `d | p_2`, plus
/// `2^{t+1}d` for `d | p_3` when `t = t'`.
pub fn structural_zero_indices(analysis: &FourDigitAnalysis) -> Result<BTreeSet<u64>> {
    let mut out = BTreeSet::new();
    let Some(z) = &analysis.zero_structure else {
        return Ok(out);
    };
    let as_u64 = |p: &BigInt| -> Result<u64> {
        p.to_u64()
            .filter(|&v| v <= 1_000_000_000_000)
            .ok_or_else(|| Error::BudgetExceeded(format!("root parameter {p} too large")))
    };
    for d in divisors(as_u64(&z.p1)?) {
        out.insert(2 * d);
    }
    for d in divisors(as_u64(&z.p2)?) {
        out.insert(2 * d);
    }
    if z.t == z.t_prime {
        let pow = 2u64
            .checked_pow(z.t + 1)
            .ok_or_else(|| Error::BudgetExceeded("2^{t+1} overflows".into()))?;
        for d in divisors(as_u64(&z.p3)?) {
            out.insert(pow * d);
        }
    }
    Ok(out)
}

/// Builds and certifies the explicit spectrum of a four-digit tile:
/// `Γ = ⊕_{j=1}^k 4^{−j}{0,1}` with `|K| = 2^k` cross-checked against the
/// reconstructed modulo form's tile measure, then certified exactly.
pub fn spectrum_for_tile(d: &DigitSet) -> Result<SpectrumCertificate> {
    let verdict = classify(d)?;
    if !verdict.is_tile {
        return Err(Error::Unsupported(format!(
            "{d} is not a tile digit set: {}",
            verdict.reason.unwrap_or_default()
        )));
    }
    let k = verdict.k.unwrap();
    let gamma = verdict.spectrum.unwrap();

    let recognition = recognize_four_digit_modulo_form(d)?.ok_or_else(|| {
        Error::InternalInvariantViolated(format!(
            "classifier accepted {d} but the form recognizer rejected it"
        ))
    })?;
    let measure_value = tile_measure(&recognition.form)?;
    if measure_value != BigInt::from(2).pow(k) {
        return Err(Error::InternalInvariantViolated(format!(
            "tile measure {measure_value} differs from 2^{k}"
        )));
    }

    let analysis = analyze(d)?;
    let indices = structural_zero_indices(&analysis)?;
    let m = SelfSimilarMeasure::with_zero_indices(BASE, d.clone(), indices);
    let cert = certify_spectrum(&m, &gamma, &measure_value, "four-digit-classifier")?;
    if !cert.is_spectrum() {
        return Err(Error::InternalInvariantViolated(format!(
            "explicit spectrum failed certification for {d}"
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeroset::is_zero_of_mu_hat;

    fn ds(values: &[u64]) -> DigitSet {
        DigitSet::from_u64s(values)
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn analyze_examples() {
        let a = analyze(&ds(&[0, 1, 8, 9])).unwrap();
        let z = a.zero_structure.as_ref().unwrap();
        assert_eq!((z.a.clone(), z.b_even.clone(), z.c.clone()),
                   (BigInt::one(), BigInt::from(8), BigInt::from(9)));
        assert_eq!((z.t, z.t_prime), (3, 3));
        assert!(z.ell.is_one() && z.ell_prime.is_one());
        assert!(z.p1.is_one() && z.p2.is_one() && z.p3.is_one());
        assert_eq!(z.root_sets, vec![RootSetLabel::R1, RootSetLabel::R2, RootSetLabel::R3]);

        let a = analyze(&ds(&[0, 1, 3, 5])).unwrap();
        assert!(!a.has_zero());

        let a = analyze(&ds(&[0, 1, 4, 5])).unwrap();
        let z = a.zero_structure.as_ref().unwrap();
        assert_eq!((z.t, z.t_prime), (2, 2));
        assert_eq!(z.root_sets.len(), 3);
    }

    #[test]
    fn analyze_rejects_bad_input() {
        assert!(matches!(
            analyze(&ds(&[0, 1, 2])),
            Err(Error::WrongCardinality(3, 4))
        ));
        assert!(matches!(
            analyze(&ds(&[0, 2, 4, 6])),
            Err(Error::NotCanonical(_))
        ));
        assert!(matches!(
            analyze(&ds(&[1, 2, 3, 4])),
            Err(Error::NotCanonical(_))
        ));
    }

    #[test]
    fn classify_examples() {
        let v = classify(&ds(&[0, 1, 8, 9])).unwrap();
        assert!(v.is_tile && v.is_spectral);
        assert_eq!(v.k, Some(1));
        assert_eq!(v.spectrum.unwrap(), vec![rat(0, 1), rat(1, 4)]);

        let v = classify(&ds(&[0, 1, 2, 3])).unwrap();
        assert!(v.is_tile);
        assert_eq!(v.k, Some(0));
        assert_eq!(v.spectrum.unwrap(), vec![rat(0, 1)]);

        let v = classify(&ds(&[0, 1, 4, 5])).unwrap();
        assert!(!v.is_tile && !v.is_spectral);
        assert!(v.reason.unwrap().contains("even"));

        let v = classify(&ds(&[0, 1, 4, 17])).unwrap();
        assert!(!v.is_tile);
        assert!(v.reason.unwrap().contains("differs"));
    }

    #[test]
    fn classifier_matches_analysis_consistency() {
        // is_tile ⇔ two-odd-one-even ∧ t = t' ∧ t odd, over a small sweep
        for b in 1u64..20 {
            for c in (b + 1)..21 {
                let Ok(set) = DigitSet::new([0u64, 1, b, c].map(BigInt::from)) else {
                    continue;
                };
                if set.len() != 4 || !set.is_canonical() {
                    continue;
                }
                let analysis = analyze(&set).unwrap();
                let verdict = classify(&set).unwrap();
                let expected = analysis
                    .zero_structure
                    .as_ref()
                    .map(|z| z.t == z.t_prime && z.t % 2 == 1)
                    .unwrap_or(false);
                assert_eq!(verdict.is_tile, expected, "set {set}");
            }
        }
    }

    #[test]
    fn z_set_examples() {
        let a = analyze(&ds(&[0, 1, 8, 9])).unwrap();
        let z = a.zero_structure.as_ref().unwrap();
        assert_eq!(
            z_set_membership(z, &rat(2, 1)),
            BTreeSet::from([ZSetLabel::Z1, ZSetLabel::Z2, ZSetLabel::Z0])
        );
        assert_eq!(
            z_set_membership(z, &rat(1, 4)),
            BTreeSet::from([ZSetLabel::Z3, ZSetLabel::Z3Prime])
        );
        assert!(z_set_membership(z, &rat(1, 2)).is_empty());
    }

    #[test]
    fn structural_indices_match_factored_indices() {
        // the root-structure index set agrees with a full factorization
        for set in [
            ds(&[0, 1, 8, 9]),
            ds(&[0, 1, 4, 5]),
            ds(&[0, 1, 2, 3]),
            ds(&[0, 2, 3, 5]),
            ds(&[0, 1, 24, 25]),
            ds(&[0, 3, 10, 25]),
            ds(&[0, 1, 4, 17]),
            ds(&[0, 5, 6, 9]),
        ] {
            let structural = structural_zero_indices(&analyze(&set).unwrap()).unwrap();
            let factored = SelfSimilarMeasure::new(4, set.clone()).unwrap();
            assert_eq!(&structural, factored.zero_indices(), "set {set}");
        }
    }

    #[test]
    fn root_sets_hit_actual_zeros() {
        let set = ds(&[0, 3, 10, 25]);
        let analysis = analyze(&set).unwrap();
        let z = analysis.zero_structure.as_ref().unwrap();
        let m = SelfSimilarMeasure::new(4, set).unwrap();
        // elements of 4·R_1 are zeros of μ̂
        let xi = rat(4, 1) * rat(1, 1) / BigRational::from(&z.p1 * BigInt::from(2));
        assert!(is_zero_of_mu_hat(&m, &xi));
    }

    #[test]
    fn spectra_for_tiles() {
        let cert = spectrum_for_tile(&ds(&[0, 1, 2, 3])).unwrap();
        assert_eq!(cert.gamma, vec![rat(0, 1)]);
        assert!(cert.is_spectrum());

        let cert = spectrum_for_tile(&ds(&[0, 1, 8, 9])).unwrap();
        assert_eq!(cert.gamma, vec![rat(0, 1), rat(1, 4)]);
        assert_eq!(cert.measure_value, BigInt::from(2));

        // t = 5: Γ = {0, 1/16, 1/4, 5/16}, |K| = 4
        let cert = spectrum_for_tile(&ds(&[0, 1, 32, 33])).unwrap();
        assert_eq!(
            cert.gamma,
            vec![rat(0, 1), rat(1, 16), rat(1, 4), rat(5, 16)]
        );
        assert_eq!(cert.measure_value, BigInt::from(4));

        assert!(spectrum_for_tile(&ds(&[0, 1, 4, 5])).is_err());
    }

    #[test]
    fn affine_invariance_of_verdicts() {
        let base_sets = [ds(&[0, 1, 8, 9]), ds(&[0, 1, 4, 5]), ds(&[0, 2, 3, 5])];
        for set in &base_sets {
            let expected = classify(set).unwrap().is_tile;
            for (scale, shift) in [(3u64, 2u64), (5, 0), (1, 7), (7, 3)] {
                let moved = set
                    .affine(&BigInt::from(scale), &BigInt::from(shift))
                    .unwrap();
                let norm = DigitSet::normalize(moved.elements()).unwrap();
                assert_eq!(norm.set, *set);
                assert_eq!(classify(&norm.set).unwrap().is_tile, expected);
            }
        }
    }
}
