//! Cyclotomic polynomials `Φ_d` and the mask-polynomial apparatus built on
//! them: exact divisibility tests, extraction of the full cyclotomic part of
//! an integer polynomial, and the kernel chain
//! `K^{(i)}(x) = Ψ_0(x) Ψ_1(x^{b^{ℓ_1}}) ⋯ Ψ_i(x^{b^{ℓ_i}})` with its moduli
//! `n_i = lcm{ s : Φ_s | K^{(i)} }` that drive the modulo product-form
//! construction.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// Hard cap on cyclotomic indices examined by the factorization search.
pub const DEFAULT_INDEX_CAP: u64 = 1_000_000;

/// `p^e` pairs of `n`, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime factors of `n` with multiplicity, ascending, e.g. `72 → [2,2,2,3,3]`.
pub fn prime_multiset(n: u64) -> Vec<u64> {
    factorize(n)
        .into_iter()
        .flat_map(|(p, e)| std::iter::repeat(p).take(e as usize))
        .collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

static CYCLOTOMIC_CACHE: Mutex<Option<HashMap<u64, IntPolynomial>>> = Mutex::new(None);

/// The `d`-th cyclotomic polynomial, computed inductively from
/// `x^s − 1 = ∏_{e|s} Φ_e(x)` on the squarefree radical of `d` and then
/// inflated by `x ↦ x^{d/rad(d)}`. Memoized per process.
pub fn cyclotomic(d: u64) -> IntPolynomial {
    assert!(d >= 1);
    {
        let cache = CYCLOTOMIC_CACHE.lock().unwrap();
        if let Some(map) = cache.as_ref() {
            if let Some(p) = map.get(&d) {
                return p.clone();
            }
        }
    }
    let factors = factorize(d);
    let rad: u64 = factors.iter().map(|(p, _)| p).product();
    // Φ_1 = x − 1, then Φ_{mp}(x) = Φ_m(x^p) / Φ_m(x) for prime p ∤ m.
    let mut poly = IntPolynomial::from_i64_coeffs(&[-1, 1]);
    for (p, _) in &factors {
        let subst = poly.substitute_power(*p as usize);
        poly = subst.exact_div(&poly).expect("cyclotomic induction divides exactly");
    }
    let inflate = (d / rad) as usize;
    if inflate > 1 {
        poly = poly.substitute_power(inflate);
    }
    let mut cache = CYCLOTOMIC_CACHE.lock().unwrap();
    cache
        .get_or_insert_with(HashMap::new)
        .insert(d, poly.clone());
    poly
}

/// Exact test `Φ_d(x) | p(x)`.
pub fn divides_cyclotomic(d: u64, p: &IntPolynomial) -> bool {
    if p.is_zero() {
        return true;
    }
    if p.degree().map_or(true, |deg| (deg as u64) < euler_phi(d)) {
        return false;
    }
    cyclotomic(d).divides(p)
}

/// The cyclotomic part of a polynomial: every `Φ_d` with `d ≤ bound` divided
/// out with multiplicity, plus the cyclotomic-free residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicFactorization {
    /// `d ↦ multiplicity` for each cyclotomic divisor found.
    pub factors: BTreeMap<u64, u32>,
    /// What remains after dividing all of them out.
    pub residual: IntPolynomial,
    /// Largest index examined.
    pub bound: u64,
}

impl CyclotomicFactorization {
    /// Re-multiplies `residual · ∏ Φ_d^{m_d}`.
    pub fn reconstruct(&self) -> IntPolynomial {
        let mut acc = self.residual.clone();
        for (&d, &m) in &self.factors {
            let phi = cyclotomic(d);
            for _ in 0..m {
                acc = &acc * &phi;
            }
        }
        acc
    }

    /// Set of indices present (multiplicity ≥ 1).
    pub fn indices(&self) -> Vec<u64> {
        self.factors.keys().copied().collect()
    }

    /// `lcm` of the indices present, `1` when there is none.
    pub fn lcm_of_indices(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &d in self.factors.keys() {
            acc = acc.lcm(&BigInt::from(d));
        }
        acc
    }
}

/// Bound that makes the factorization complete: only `d` with
/// `φ(d) ≤ deg p` can divide, and `φ(d) ≥ √(d/2)` forces `d ≤ 2·deg²`.
/// Capped at [`DEFAULT_INDEX_CAP`].
pub fn complete_factor_bound(deg: usize) -> u64 {
    let deg = deg as u64;
    (2 * deg * deg).max(1).min(DEFAULT_INDEX_CAP)
}

/// Divides out every `Φ_d`, `d ≤ bound`, with multiplicity. The returned
/// factorization satisfies `reconstruct() == p` exactly (checked).
pub fn factor_cyclotomic_part(p: &IntPolynomial, bound: u64) -> Result<CyclotomicFactorization> {
    if p.is_zero() {
        return Err(Error::InternalInvariantViolated(
            "cannot factor the zero polynomial".into(),
        ));
    }
    if bound > DEFAULT_INDEX_CAP {
        return Err(Error::BudgetExceeded(format!(
            "cyclotomic index bound {bound} exceeds cap {DEFAULT_INDEX_CAP}"
        )));
    }
    let mut factors = BTreeMap::new();
    let mut residual = p.clone();
    for d in 1..=bound {
        let deg = residual.degree().unwrap() as u64;
        if deg == 0 {
            break;
        }
        if euler_phi(d) > deg {
            continue;
        }
        let phi = cyclotomic(d);
        loop {
            let (q, r) = residual.div_rem(&phi)?;
            if !r.is_zero() {
                break;
            }
            *factors.entry(d).or_insert(0) += 1;
            residual = q;
            if residual.degree() == Some(0) {
                break;
            }
        }
    }
    let fact = CyclotomicFactorization {
        factors,
        residual,
        bound,
    };
    if fact.reconstruct() != *p {
        return Err(Error::InternalInvariantViolated(
            "cyclotomic factorization failed to reconstruct its input".into(),
        ));
    }
    Ok(fact)
}

/// Cyclotomic indices of `Φ_d(x^m)`: the `e | d·m` whose primitive roots `z`
/// satisfy `ord(z^m) = d`, i.e. `e / gcd(e, m) = d`.
pub fn power_substitution_indices(d: u64, m: u64) -> Vec<u64> {
    assert!(d >= 1 && m >= 1);
    let mut out: Vec<u64> = divisors(d * m)
        .into_iter()
        .filter(|&e| e / e.gcd(&m) == d)
        .collect();
    out.sort_unstable();
    debug_assert_eq!(
        out.iter().map(|&e| euler_phi(e)).sum::<u64>(),
        m * euler_phi(d),
        "Φ_{d}(x^{m}) index degrees must add up"
    );
    out
}

/// The kernel chain of a factorization `E_0 ⊕ ⋯ ⊕ E_k ≡ Z_b (mod b)` with
/// exponents `0 = ℓ_0 ≤ ℓ_1 ≤ ⋯ ≤ ℓ_k`.
#[derive(Clone, Debug)]
pub struct ModuloProductFormData {
    /// `Ψ_i = ∏_{d ∈ S_i} Φ_d`, where `S_i = {d>1 : d|b, Φ_d | P_{E_i}}`.
    pub psi: Vec<IntPolynomial>,
    /// `S_i` index sets.
    pub s_sets: Vec<Vec<u64>>,
    /// `K^{(i)}(x) = Ψ_0(x) Ψ_1(x^{b^{ℓ_1}}) ⋯ Ψ_i(x^{b^{ℓ_i}})`, expanded.
    pub kernel_chain: Vec<IntPolynomial>,
    /// Cyclotomic indices of each `K^{(i)}` (multiplicities included).
    pub kernel_indices: Vec<BTreeMap<u64, u32>>,
    /// `n_i = lcm{ s : Φ_s | K^{(i)} }`.
    pub moduli: Vec<BigInt>,
}

/// Computes `S_i`, `Ψ_i`, the kernel chain and the moduli `n_i`.
///
/// The indices of `K^{(i)}` are obtained structurally through
/// [`power_substitution_indices`] rather than by re-factoring the expanded
/// product; the polynomial identity `K^{(i)} = ∏ Φ_e` is re-verified by
/// multiplication.
pub fn kernel_chain(factors: &[DigitSet], base: u64, ells: &[u32]) -> Result<ModuloProductFormData> {
    if base < 2 {
        return Err(Error::Unsupported("base must be at least 2".into()));
    }
    if factors.is_empty() || ells.len() != factors.len() - 1 {
        return Err(Error::Unsupported(format!(
            "{} exponents for {} factors; expected one per factor after the first",
            ells.len(),
            factors.len()
        )));
    }
    if ells.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Unsupported("exponents must be non-decreasing".into()));
    }
    let product = DigitSet::direct_sum_all(factors)
        .map_err(|_| Error::NotCompleteResidue(BigInt::from(base)))?;
    if !product.is_complete_residue_set(base) {
        return Err(Error::NotCompleteResidue(BigInt::from(base)));
    }

    let mut ells_full = vec![0u32];
    ells_full.extend_from_slice(ells);

    let mut psi = Vec::new();
    let mut s_sets = Vec::new();
    let mut kernels = Vec::new();
    let mut kernel_indices: Vec<BTreeMap<u64, u32>> = Vec::new();
    let mut moduli = Vec::new();

    let mut kernel_acc = IntPolynomial::one();
    let mut index_acc: BTreeMap<u64, u32> = BTreeMap::new();

    for (i, e_i) in factors.iter().enumerate() {
        let mask = e_i.mask_polynomial()?.into_poly();
        let s_i: Vec<u64> = divisors(base)
            .into_iter()
            .filter(|&d| d > 1 && divides_cyclotomic(d, &mask))
            .collect();
        let mut psi_i = IntPolynomial::one();
        for &d in &s_i {
            psi_i = &psi_i * &cyclotomic(d);
        }
        let power = (base as u128).checked_pow(ells_full[i]).and_then(|p| {
            if p <= u64::MAX as u128 {
                Some(p as u64)
            } else {
                None
            }
        });
        let power =
            power.ok_or_else(|| Error::BudgetExceeded(format!("b^{} overflows", ells_full[i])))?;
        kernel_acc = &kernel_acc * &psi_i.substitute_power(power as usize);
        for &d in &s_i {
            for e in power_substitution_indices(d, power) {
                *index_acc.entry(e).or_insert(0) += 1;
            }
        }
        // n_i from the structural indices; identity re-verified below.
        let mut n_i = BigInt::one();
        for &e in index_acc.keys() {
            n_i = n_i.lcm(&BigInt::from(e));
        }
        psi.push(psi_i);
        s_sets.push(s_i);
        kernels.push(kernel_acc.clone());
        kernel_indices.push(index_acc.clone());
        moduli.push(n_i);
    }

    // Verify the expanded kernel equals the product of its claimed factors.
    let last = kernels.last().unwrap();
    let mut check = IntPolynomial::one();
    for (&e, &mult) in kernel_indices.last().unwrap() {
        let phi = cyclotomic(e);
        for _ in 0..mult {
            check = &check * &phi;
        }
    }
    if &check != last {
        return Err(Error::InternalInvariantViolated(
            "kernel chain does not match its cyclotomic index expansion".into(),
        ));
    }

    Ok(ModuloProductFormData {
        psi,
        s_sets,
        kernel_chain: kernels,
        kernel_indices,
        moduli,
    })
}
