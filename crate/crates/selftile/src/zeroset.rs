//! The zero set of `μ̂` for the self-similar measure `μ_{b,D}` and exact
//! spectrum certification for sets of the form `Λ = Γ ⊕ Z`.
//!
//! `μ̂(ξ) = ∏_{n≥1} b^{−1} P_D(e^{−2πiξ/b^n})` vanishes at a rational `ξ`
//! iff some factor does, i.e. iff `ξ/b^n` has lowest-terms denominator `q`
//! with `Φ_q | P_D`. Writing `Q_D` for the full set of cyclotomic indices of
//! `P_D`, membership of `ξ = p/q` therefore depends only on the valuations
//! of `p` at the primes of `b`. Orthogonality of `Γ ⊕ Z` demands membership
//! for *every* integer translate of each difference; per difference class
//! `p/q` the valuation vectors realized by `p + kq` range over exactly
//! `{0}` at primes dividing `q` and, jointly by CRT, all of `Z_{≥0}`
//! elsewhere, so the infinite check reduces to a finite coverage decision
//! over those vectors.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclotomic::{complete_factor_bound, factor_cyclotomic_part, factorize};
use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::inttile::FiniteSpectrum;
use crate::productform::{associated_a_set, tile_measure, ModuloProductForm};

/// The measure `μ_{b,D}` with the cyclotomic index set of its mask
/// polynomial precomputed.
#[derive(Clone, Debug)]
pub struct SelfSimilarMeasure {
    pub base: u64,
    pub digits: DigitSet,
    /// `Q_D = { q > 1 : Φ_q | P_D }`, complete.
    zero_indices: BTreeSet<u64>,
}

impl SelfSimilarMeasure {
    /// Factors the mask polynomial completely (`φ(q) ≤ deg` forces
    /// `q ≤ 2·deg²`). Errors when the degree pushes that bound past the
    /// index cap.
    pub fn new(base: u64, digits: DigitSet) -> Result<Self> {
        if base < 2 {
            return Err(Error::Unsupported("base must be at least 2".into()));
        }
        let mask = digits.mask_polynomial()?.into_poly();
        let deg = mask.degree().unwrap();
        let bound = 2 * (deg as u64) * (deg as u64);
        if bound > crate::cyclotomic::DEFAULT_INDEX_CAP {
            return Err(Error::BudgetExceeded(format!(
                "mask degree {deg} needs a cyclotomic search up to {bound}"
            )));
        }
        let fact = factor_cyclotomic_part(&mask, complete_factor_bound(deg))?;
        let zero_indices = fact.factors.keys().copied().filter(|&d| d > 1).collect();
        Ok(SelfSimilarMeasure {
            base,
            digits,
            zero_indices,
        })
    }

    /// Constructs with an externally supplied (trusted) index set, for
    /// callers that know `Q_D` structurally.
    pub fn with_zero_indices(base: u64, digits: DigitSet, zero_indices: BTreeSet<u64>) -> Self {
        SelfSimilarMeasure {
            base,
            digits,
            zero_indices,
        }
    }

    pub fn zero_indices(&self) -> &BTreeSet<u64> {
        &self.zero_indices
    }
}

fn valuation(x: &BigInt, r: u64) -> u32 {
    assert!(!x.is_zero());
    let r = BigInt::from(r);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, rem) = y.div_rem(&r);
        if !rem.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

/// Exact rational zero test for `μ̂`: true iff `ξ/b^n` lands on a root of
/// the mask polynomial for some `n ≥ 1`, decided through the valuations of
/// the numerator at the primes of `b`.
pub fn is_zero_of_mu_hat(m: &SelfSimilarMeasure, xi: &BigRational) -> bool {
    if xi.is_zero() {
        return false; // μ̂(0) = 1
    }
    let p = xi.numer().abs();
    let q = xi.denom().clone();
    let primes = factorize(m.base);
    let v: Vec<u64> = primes
        .iter()
        .map(|&(r, _)| valuation(&p, r) as u64)
        .collect();
    for &u in &m.zero_indices {
        let Some(w_exps) = smooth_quotient_exponents(u, &q, &primes) else {
            continue;
        };
        if valuation_conditions_satisfiable(&primes, &w_exps, &v) {
            return true;
        }
    }
    false
}

/// For `u = q·w` with `w` composed only of the primes of `b`, the exponent
/// vector of `w`; `None` when `q ∤ u` or `w` has an outside prime.
fn smooth_quotient_exponents(u: u64, q: &BigInt, primes: &[(u64, u32)]) -> Option<Vec<u32>> {
    let (w, rem) = BigInt::from(u).div_rem(q);
    if !rem.is_zero() {
        return None;
    }
    let mut w = w.to_u64()?;
    let mut w_exps = vec![0u32; primes.len()];
    for (idx, &(r, _)) in primes.iter().enumerate() {
        while w % r == 0 {
            w /= r;
            w_exps[idx] += 1;
        }
    }
    (w == 1).then_some(w_exps)
}

/// Is there `n ≥ 1` with, at every prime `r_i^{e_i} ‖ b`:
/// `v_i = n·e_i − w_i` when `w_i > 0`, and `v_i ≥ n·e_i` when `w_i = 0`?
fn valuation_conditions_satisfiable(primes: &[(u64, u32)], w: &[u32], v: &[u64]) -> bool {
    let mut pinned: Option<u64> = None;
    for i in 0..primes.len() {
        if w[i] > 0 {
            let total = v[i] + w[i] as u64;
            let e = primes[i].1 as u64;
            if total % e != 0 {
                return false;
            }
            let n = total / e;
            if n < 1 {
                return false;
            }
            match pinned {
                None => pinned = Some(n),
                Some(m) if m == n => {}
                Some(_) => return false,
            }
        }
    }
    let n = pinned.unwrap_or(1); // all-`≥` conditions are loosest at n = 1
    (0..primes.len()).all(|i| w[i] > 0 || v[i] >= n * primes[i].1 as u64)
}

// === All-translates decision ============================================

#[derive(Clone, Debug, PartialEq)]
enum Req {
    Exact(u64),
    AtLeast(u64),
}

#[derive(Clone, Debug)]
enum ClassCond {
    /// `n` was pinned by the primes dividing `q`; one requirement per free
    /// prime.
    Pinned(Vec<Req>),
    /// `n` ranges freely over `n ≥ n_min`; per free prime `j` the
    /// requirement at `n` is `Exact(n·e_j − w_j)` if `w_j > 0`, else
    /// `AtLeast(n·e_j)`.
    FreeN { w: Vec<u32>, n_min: u64 },
}

impl ClassCond {
    fn covers(&self, e: &[u64], v: &[u64]) -> bool {
        match self {
            ClassCond::Pinned(reqs) => reqs.iter().zip(v).all(|(r, &x)| match r {
                Req::Exact(c) => x == *c,
                Req::AtLeast(c) => x >= *c,
            }),
            ClassCond::FreeN { w, n_min } => {
                let mut pinned: Option<u64> = None;
                for j in 0..e.len() {
                    if w[j] > 0 {
                        let total = v[j] + w[j] as u64;
                        if total % e[j] != 0 {
                            return false;
                        }
                        let n = total / e[j];
                        match pinned {
                            None => pinned = Some(n),
                            Some(m) if m == n => {}
                            Some(_) => return false,
                        }
                    }
                }
                match pinned {
                    Some(n) => n >= *n_min && (0..e.len()).all(|j| w[j] > 0 || v[j] >= n * e[j]),
                    None => (0..e.len()).all(|j| v[j] >= *n_min * e[j]),
                }
            }
        }
    }
}

/// Normalizes the admissible `u = q·w ∈ Q_D` into coverage conditions over
/// the valuation vectors at the free primes (those of `b` not dividing `q`).
fn class_conditions(m: &SelfSimilarMeasure, q: &BigInt) -> (Vec<u64>, Vec<ClassCond>) {
    let primes = factorize(m.base);
    let in_q: Vec<bool> = primes
        .iter()
        .map(|&(r, _)| (q % BigInt::from(r)).is_zero())
        .collect();
    let free: Vec<usize> = (0..primes.len()).filter(|&i| !in_q[i]).collect();
    let free_e: Vec<u64> = free.iter().map(|&i| primes[i].1 as u64).collect();

    let mut conds = Vec::new();
    'indices: for &u in &m.zero_indices {
        let Some(w_exps) = smooth_quotient_exponents(u, q, &primes) else {
            continue;
        };
        // primes dividing q force v = 0, pinning n through w_i = n·e_i
        let mut pinned: Option<u64> = None;
        for i in 0..primes.len() {
            if !in_q[i] {
                continue;
            }
            let (wi, e) = (w_exps[i] as u64, primes[i].1 as u64);
            if wi == 0 || wi % e != 0 {
                continue 'indices;
            }
            let n = wi / e;
            match pinned {
                None => pinned = Some(n),
                Some(m) if m == n => {}
                Some(_) => continue 'indices,
            }
        }
        match pinned {
            Some(n) => {
                let mut reqs = Vec::with_capacity(free.len());
                for (slot, &j) in free.iter().enumerate() {
                    let e = free_e[slot];
                    let wj = w_exps[j] as u64;
                    if wj > 0 {
                        match (n * e).checked_sub(wj) {
                            Some(c) => reqs.push(Req::Exact(c)),
                            None => continue 'indices,
                        }
                    } else {
                        reqs.push(Req::AtLeast(n * e));
                    }
                }
                conds.push(ClassCond::Pinned(reqs));
            }
            None => {
                let w: Vec<u32> = free.iter().map(|&j| w_exps[j]).collect();
                let n_min = (0..free.len())
                    .map(|j| (w[j] as u64).div_ceil(free_e[j]))
                    .max()
                    .unwrap_or(1)
                    .max(1);
                conds.push(ClassCond::FreeN { w, n_min });
            }
        }
    }
    (free_e, conds)
}

/// Decides whether `δ + k ∈ Z(μ̂)` holds for *all* integers `k`, for every
/// `δ` with reduced denominator `q` (the answer depends on `q` alone).
fn class_always_zero(m: &SelfSimilarMeasure, q: &BigInt) -> Result<bool> {
    // Complete residue sets cover the integer class outright: every
    // valuation vector matches the condition of some divisor d | b.
    if q.is_one() && m.digits.is_complete_residue_set(m.base) {
        return Ok(true);
    }
    let (free_e, conds) = class_conditions(m, q);
    match free_e.len() {
        0 => Ok(!conds.is_empty()),
        1 => Ok(cover_one_dim(free_e[0], &conds)),
        2 => Ok(cover_two_dim(&free_e, &conds)),
        n => Err(Error::Unsupported(format!(
            "orthogonality over {n} free base primes is not implemented"
        ))),
    }
}

/// One free prime: conditions are points, rays and arithmetic progressions
/// of valuations; coverage is decided per residue class mod `e` with
/// explicit thresholds.
fn cover_one_dim(e: u64, conds: &[ClassCond]) -> bool {
    // per residue class mod e: smallest start of an unbounded condition
    let mut class_start: Vec<Option<u64>> = vec![None; e as usize];
    let mut update = |start: u64, every_class: bool| {
        for rho in 0..e as usize {
            if every_class || rho as u64 == start % e {
                let slot = &mut class_start[rho];
                if slot.map_or(true, |s| start < s) {
                    *slot = Some(start);
                }
            }
        }
    };
    for c in conds {
        match c {
            ClassCond::Pinned(reqs) => {
                if let Req::AtLeast(c0) = reqs[0] {
                    update(c0, true); // a single Exact point is never unbounded
                }
            }
            ClassCond::FreeN { w, n_min } => {
                if w[0] > 0 {
                    update(n_min * e - w[0] as u64, false);
                } else {
                    update(n_min * e, true);
                }
            }
        }
    }
    if class_start.iter().any(|s| s.is_none()) {
        return false;
    }
    let horizon = class_start.iter().map(|s| s.unwrap()).max().unwrap();
    (0..horizon).all(|v| conds.iter().any(|c| c.covers(&[e], &[v])))
}

/// Two free primes: per-column and per-row ray analysis, plus an exact
/// treatment of the doubly-unbounded regime along the invariant
/// `λ = e_2·v_1 − e_1·v_2` (which a free-`n` condition fixes or half-bounds
/// independently of `n`).
fn cover_two_dim(e: &[u64], conds: &[ClassCond]) -> bool {
    let (e1, e2) = (e[0], e[1]);
    let mut horizon = e1 * e2 + 2;
    for c in conds {
        match c {
            ClassCond::Pinned(reqs) => {
                for r in reqs {
                    let (Req::Exact(c0) | Req::AtLeast(c0)) = r;
                    horizon = horizon.max(c0 + e1 * e2 + 1);
                }
            }
            ClassCond::FreeN { w, n_min } => {
                let wmax = *w.iter().max().unwrap_or(&0) as u64;
                horizon = horizon.max((n_min + 2) * e1.max(e2) + wmax);
            }
        }
    }

    // The smallest start of a ray in the `other` axis at a fixed value of
    // `fixed_axis`, or None when no condition yields such a ray.
    let ray_start = |fixed_axis: usize, fixed_v: u64| -> Option<u64> {
        let other = 1 - fixed_axis;
        let mut best: Option<u64> = None;
        let mut push = |s: u64| {
            if best.map_or(true, |b| s < b) {
                best = Some(s);
            }
        };
        for c in conds {
            match c {
                ClassCond::Pinned(reqs) => {
                    let ok_fixed = match reqs[fixed_axis] {
                        Req::Exact(c0) => fixed_v == c0,
                        Req::AtLeast(c0) => fixed_v >= c0,
                    };
                    if ok_fixed {
                        if let Req::AtLeast(c1) = reqs[other] {
                            push(c1);
                        }
                    }
                }
                ClassCond::FreeN { w, n_min } => {
                    if w[other] != 0 {
                        continue; // other axis pinned per n: no ray
                    }
                    let (wf, ef, eo) = (w[fixed_axis] as u64, e[fixed_axis], e[other]);
                    if wf > 0 {
                        let total = fixed_v + wf;
                        if total % ef == 0 && total / ef >= *n_min {
                            push((total / ef) * eo);
                        }
                    } else if fixed_v >= n_min * ef {
                        push(n_min * eo);
                    }
                }
            }
        }
        best
    };

    // stripes: fixed coordinate ≤ horizon, unbounded in the other
    for axis in [0usize, 1] {
        for v_fixed in 0..=horizon {
            let Some(start) = ray_start(axis, v_fixed) else {
                return false;
            };
            for v_other in 0..start {
                let v = if axis == 0 {
                    [v_fixed, v_other]
                } else {
                    [v_other, v_fixed]
                };
                if !conds.iter().any(|c| c.covers(e, &v)) {
                    return false;
                }
            }
        }
    }

    // doubly-unbounded regime: a quadrant condition covers everything
    let quadrant = conds.iter().any(|c| match c {
        ClassCond::Pinned(reqs) => reqs.iter().all(|r| matches!(r, Req::AtLeast(_))),
        ClassCond::FreeN { w, .. } => w.iter().all(|&x| x == 0),
    });
    if quadrant {
        return true;
    }
    // otherwise λ-analysis per residue pair: exact-on-axis-1 conditions
    // cover λ ≤ −e2·w1, exact-on-axis-2 cover λ ≥ e1·w2, doubly exact pin
    // a single λ; λ runs over one progression mod e1·e2 per residue pair
    for rho1 in 0..e1 {
        for rho2 in 0..e2 {
            let step = (e1 * e2) as i64;
            let lam_residue =
                (e2 as i64 * rho1 as i64 - e1 as i64 * rho2 as i64).rem_euclid(step);
            let mut low: Option<i64> = None; // some condition covers λ ≤ low
            let mut high: Option<i64> = None; // some condition covers λ ≥ high
            let mut points: Vec<i64> = Vec::new();
            for c in conds {
                if let ClassCond::FreeN { w, .. } = c {
                    let match1 = (w[0] as u64 + rho1) % e1 == 0;
                    let match2 = (w[1] as u64 + rho2) % e2 == 0;
                    match (w[0] > 0, w[1] > 0) {
                        (true, false) if match1 => {
                            let bound = -(e2 as i64) * w[0] as i64;
                            if low.map_or(true, |l| bound > l) {
                                low = Some(bound);
                            }
                        }
                        (false, true) if match2 => {
                            let bound = e1 as i64 * w[1] as i64;
                            if high.map_or(true, |h| bound < h) {
                                high = Some(bound);
                            }
                        }
                        (true, true) if match1 && match2 => {
                            points.push(e1 as i64 * w[1] as i64 - e2 as i64 * w[0] as i64);
                        }
                        _ => {}
                    }
                }
            }
            let (Some(low), Some(high)) = (low, high) else {
                return false;
            };
            let mut lam = low + 1 + (lam_residue - low - 1).rem_euclid(step);
            while lam < high {
                if !points.contains(&lam) {
                    return false;
                }
                lam += step;
            }
        }
    }
    true
}

/// Exact orthogonality of `Λ = Γ ⊕ Z` in `L²(μ)`: every nonzero difference
/// `γ − γ' + k` must lie in `Z(μ̂)`.
///
/// Requires `0 ∈ Γ`, distinct entries, and `(Γ − Γ) ∩ Z = {0}`.
pub fn verify_orthogonal_set(m: &SelfSimilarMeasure, gamma: &[BigRational]) -> Result<bool> {
    if !gamma.iter().any(|g| g.is_zero()) {
        return Err(Error::InvalidGamma("0 must belong to Γ".into()));
    }
    let mut denominators: BTreeSet<BigInt> = BTreeSet::new();
    denominators.insert(BigInt::one()); // the pure-integer translates
    for i in 0..gamma.len() {
        for j in (i + 1)..gamma.len() {
            let delta = &gamma[i] - &gamma[j];
            if delta.is_zero() {
                return Err(Error::InvalidGamma(format!("duplicate entry {}", gamma[i])));
            }
            if delta.denom().is_one() {
                return Err(Error::InvalidGamma(format!(
                    "difference {} − {} is a nonzero integer",
                    gamma[i], gamma[j]
                )));
            }
            denominators.insert(delta.denom().clone());
        }
    }
    for q in &denominators {
        if !class_always_zero(m, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A certification record for a candidate spectrum `Γ ⊕ Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumCertificate {
    pub gamma: Vec<BigRational>,
    /// `|K|`, the tile measure the completeness test compares against.
    pub measure_value: BigInt,
    pub orthogonal: bool,
    pub complete: bool,
    /// Which construction produced Γ.
    pub provenance: String,
}

impl SpectrumCertificate {
    pub fn is_spectrum(&self) -> bool {
        self.orthogonal && self.complete
    }
}

/// Certifies `Γ ⊕ Z` against `μ_{b,D}`: orthogonality by the exact zero-set
/// decision, completeness by `#Γ = |K|`.
pub fn certify_spectrum(
    m: &SelfSimilarMeasure,
    gamma: &[BigRational],
    measure_value: &BigInt,
    provenance: &str,
) -> Result<SpectrumCertificate> {
    let orthogonal = verify_orthogonal_set(m, gamma)?;
    let complete = BigInt::from(gamma.len()) == *measure_value;
    Ok(SpectrumCertificate {
        gamma: gamma.to_vec(),
        measure_value: measure_value.clone(),
        orthogonal,
        complete,
        provenance: provenance.to_string(),
    })
}

/// Transfers a finite spectrum of the associated integer tile `A` to the
/// self-similar tile: `Γ ⊕ Z` is certified against `μ_{b,D}` for the final
/// digit set of the (possibly lifted) form.
pub fn lift_product_form_spectrum(
    form: &ModuloProductForm,
    finite_spec: &FiniteSpectrum,
) -> Result<SpectrumCertificate> {
    let a = associated_a_set(&form.structure)?;
    if finite_spec.target != a {
        return Err(Error::InvalidGamma(format!(
            "finite spectrum certifies {} but the associated tile is {a}",
            finite_spec.target
        )));
    }
    let measure = tile_measure(form)?;
    let m = SelfSimilarMeasure::new(form.structure.base, form.digits().clone())?;
    let provenance = if form.is_plain() {
        "product-form-lift"
    } else {
        "modulo-product-form-lift"
    };
    certify_spectrum(&m, &finite_spec.gamma, &measure, provenance)
}

/// Truncated evaluation `∏_{n=1}^{depth} b^{−1} P_D(e^{−2πiξ/b^n})`.
///
/// Every omitted factor differs from 1 by at most `2π·max(D)·|ξ|/b^n`, so
/// the relative truncation error is bounded by
/// `exp(Σ_{n>depth} 2π·max(D)·|ξ|/b^n) − 1`.
pub fn eval_mu_hat(m: &SelfSimilarMeasure, xi: f64, depth: u32) -> Complex64 {
    assert!(depth >= 1);
    let digits: Vec<f64> = m
        .digits
        .elements()
        .iter()
        .map(|d| d.to_f64().unwrap_or(f64::MAX))
        .collect();
    let b = m.base as f64;
    let size = digits.len() as f64;
    let mut acc = Complex64::new(1.0, 0.0);
    let mut scale = 1.0 / b;
    for _ in 0..depth {
        let theta = -2.0 * std::f64::consts::PI * xi * scale;
        let mut factor = Complex64::new(0.0, 0.0);
        for &d in &digits {
            factor += Complex64::from_polar(1.0, theta * d);
        }
        acc *= factor / size;
        scale /= b;
    }
    acc
}

/// Partial sums `Q(ξ) = Σ_{λ ∈ Λ, |λ| ≤ radius} |μ̂(ξ+λ)|²` over
/// `Λ = Γ ⊕ Z`, one value per grid point. Monotone nondecreasing in the
/// radius; bounded by 1 for orthogonal `Λ` up to truncation effects.
pub fn jp_quality(
    m: &SelfSimilarMeasure,
    gamma: &[BigRational],
    xi_grid: &[f64],
    lambda_radius: f64,
    depth: u32,
) -> Vec<f64> {
    let gammas: Vec<f64> = gamma.iter().map(|g| g.to_f64().unwrap_or(0.0)).collect();
    xi_grid
        .iter()
        .map(|&xi| {
            let mut q = 0.0;
            for &g in &gammas {
                let j_lo = (-lambda_radius - g).ceil() as i64;
                let j_hi = (lambda_radius - g).floor() as i64;
                for j in j_lo..=j_hi {
                    let lambda = g + j as f64;
                    q += eval_mu_hat(m, xi + lambda, depth).norm_sqr();
                }
            }
            q
        })
        .collect()
}
