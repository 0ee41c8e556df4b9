//! Integer tiles `A ⊕ B ≡ Z_n (mod n)`: complement search, de Bruijn
//! decompositions of `Z_n` into irreducible components, and spectra of
//! finite sets certified exactly through vanishing sums of roots of unity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cyclotomic::{divides_cyclotomic, prime_multiset};
use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// A certified pair `A ⊕ B ≡ Z_n (mod n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingComplement {
    pub tile: DigitSet,
    pub complement: DigitSet,
    pub modulus: u64,
}

/// True iff every residue class mod `n` is hit exactly once by `A + B`.
pub fn verify_integer_tile(a: &DigitSet, b_set: &DigitSet, n: u64) -> bool {
    assert!(n >= 1);
    if a.len() as u64 * b_set.len() as u64 != n {
        return false;
    }
    let modulus = BigInt::from(n);
    let mut seen = vec![false; n as usize];
    for x in a.elements() {
        for y in b_set.elements() {
            let r = (x + y).mod_floor(&modulus).to_usize().unwrap();
            if seen[r] {
                return false;
            }
            seen[r] = true;
        }
    }
    true
}

/// Default search bound for [`find_complement`]: `(max(A)+1)·#A·4`.
pub fn default_complement_bound(a: &DigitSet) -> Result<u64> {
    let max = a
        .max_element()
        .to_u64()
        .ok_or_else(|| Error::BudgetExceeded("digit set too large for complement search".into()))?;
    (max + 1)
        .checked_mul(a.len() as u64)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::BudgetExceeded("complement bound overflows".into()))
}

fn complement_dfs(
    a_res: &[u64],
    n: u64,
    covered: &mut [bool],
    covered_count: &mut u64,
    b: &mut Vec<u64>,
    strict: bool,
    a_max: u64,
) -> bool {
    if *covered_count == n {
        return true;
    }
    let r = covered.iter().position(|&c| !c).unwrap() as u64;
    let mut candidates: Vec<u64> = a_res
        .iter()
        .filter_map(|&x| {
            if strict {
                // integer placement: the whole translate must fit in [0, n)
                if x <= r && r - x + a_max < n {
                    Some(r - x)
                } else {
                    None
                }
            } else {
                Some((r + n - x % n) % n)
            }
        })
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    'outer: for cand in candidates {
        let mut placed = Vec::with_capacity(a_res.len());
        let mut ok = true;
        for &x in a_res {
            let s = if strict { x + cand } else { (x + cand) % n };
            if covered[s as usize] {
                ok = false;
                break;
            }
            covered[s as usize] = true;
            placed.push(s);
        }
        if !ok {
            for &p in &placed {
                covered[p as usize] = false;
            }
            continue 'outer;
        }
        *covered_count += placed.len() as u64;
        b.push(cand);
        if complement_dfs(a_res, n, covered, covered_count, b, strict, a_max) {
            return true;
        }
        b.pop();
        for &p in &placed {
            covered[p as usize] = false;
        }
        *covered_count -= placed.len() as u64;
    }
    false
}

/// Searches for `B ⊆ Z_n` with `A ⊕ B ≡ Z_n (mod n)` for this specific `n`;
/// `strict` additionally demands `A ⊕ B = {0, ..., n−1}` as integers.
///
/// Greedy residue filling with backtracking: the smallest uncovered residue
/// pins the next element of `B` up to the choice of which `a ∈ A` covers it.
pub fn complement_for_modulus(a: &DigitSet, n: u64, strict: bool) -> Option<DigitSet> {
    if n == 0 || n % a.len() as u64 != 0 {
        return None;
    }
    let modulus = BigInt::from(n);
    let mut a_res: Vec<u64> = if strict {
        let vals = a.to_u64s().ok()?;
        if vals.iter().any(|&x| x >= n) {
            return None;
        }
        vals
    } else {
        a.elements()
            .iter()
            .map(|x| x.mod_floor(&modulus).to_u64().unwrap())
            .collect()
    };
    a_res.sort_unstable();
    let len_before = a_res.len();
    a_res.dedup();
    if a_res.len() != len_before {
        return None; // repeated residue can never tile
    }
    let a_max = *a_res.last().unwrap();
    let mut covered = vec![false; n as usize];
    let mut covered_count = 0;
    let mut b = Vec::new();
    if complement_dfs(
        &a_res,
        n,
        &mut covered,
        &mut covered_count,
        &mut b,
        strict,
        a_max,
    ) {
        b.sort_unstable();
        Some(DigitSet::from_u64s(&b))
    } else {
        None
    }
}

/// Smallest `n ≤ max_n` (a multiple of `#A`) admitting a complement
/// `A ⊕ B ≡ Z_n (mod n)`, or `None` past the bound.
pub fn find_complement(a: &DigitSet, max_n: u64) -> Option<TilingComplement> {
    let size = a.len() as u64;
    let mut n = size;
    while n <= max_n {
        if let Some(complement) = complement_for_modulus(a, n, false) {
            debug_assert!(verify_integer_tile(a, &complement, n));
            return Some(TilingComplement {
                tile: a.clone(),
                complement,
                modulus: n,
            });
        }
        n += size;
    }
    None
}

/// The decomposition `Z_b = C_0 ⊕ C_1 ⊕ ⋯ ⊕ C_m` for a prime ordering
/// `b = p_0 p_1 ⋯ p_m`, where `C_0 = Z_{p_0}` and `C_i = (p_0⋯p_{i−1})·Z_{p_i}`,
/// together with the assignment of components to the given parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeBruijnDecomposition {
    pub prime_order: Vec<u64>,
    pub components: Vec<DigitSet>,
    /// `assignment[i] = j` when component `C_i` is a summand of part `E_j`.
    pub assignment: Vec<usize>,
}

impl DeBruijnDecomposition {
    /// Component indices assigned to part `j`, ascending.
    pub fn components_of(&self, j: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &p)| (p == j).then_some(i))
            .collect()
    }
}

fn components_for_order(order: &[u64]) -> Vec<DigitSet> {
    let mut components = Vec::with_capacity(order.len());
    let mut stride = 1u64;
    for &p in order {
        components.push(DigitSet::new((0..p).map(|t| BigInt::from(t * stride))).unwrap());
        stride *= p;
    }
    components
}

fn multiset_permutations(sorted: &[u64]) -> Vec<Vec<u64>> {
    if sorted.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut last = None;
    for i in 0..sorted.len() {
        if last == Some(sorted[i]) {
            continue;
        }
        last = Some(sorted[i]);
        let mut rest = sorted.to_vec();
        rest.remove(i);
        for mut tail in multiset_permutations(&rest) {
            tail.insert(0, sorted[i]);
            out.push(tail);
        }
    }
    out
}

fn subsets_dfs(
    free: &[usize],
    start: usize,
    prod: u64,
    want: u64,
    components: &[DigitSet],
    parts: &[DigitSet],
    part_idx: usize,
    subset: &mut Vec<usize>,
    used: &mut [bool],
    assignment: &mut [usize],
) -> bool {
    if prod == want {
        let target = &parts[part_idx];
        if let Ok(sum) = DigitSet::direct_sum_all(subset.iter().map(|&i| &components[i])) {
            if &sum == target {
                for &i in subset.iter() {
                    used[i] = true;
                    assignment[i] = part_idx;
                }
                if assign_components(parts, components, part_idx + 1, used, assignment) {
                    return true;
                }
                for &i in subset.iter() {
                    used[i] = false;
                }
            }
        }
        return false;
    }
    for pos in start..free.len() {
        let i = free[pos];
        let next = prod * components[i].len() as u64;
        if next > want || want % next != 0 {
            continue;
        }
        subset.push(i);
        if subsets_dfs(
            free, pos + 1, next, want, components, parts, part_idx, subset, used, assignment,
        ) {
            return true;
        }
        subset.pop();
    }
    false
}

fn assign_components(
    parts: &[DigitSet],
    components: &[DigitSet],
    part_idx: usize,
    used: &mut [bool],
    assignment: &mut [usize],
) -> bool {
    if part_idx == parts.len() {
        return used.iter().all(|&u| u);
    }
    let free: Vec<usize> = (0..components.len()).filter(|&i| !used[i]).collect();
    let want = parts[part_idx].len() as u64;
    let mut subset = Vec::new();
    subsets_dfs(
        &free, 0, 1, want, components, parts, part_idx, &mut subset, used, assignment,
    )
}

/// Finds the first prime ordering of `b` (lexicographic over permutations of
/// the prime multiset) whose components partition exactly into the given
/// parts. Errors with `NotZb` if the parts do not sum directly to
/// `{0,…,b−1}`; an admissible decomposition failing for every ordering is
/// reported as unsupported (the parts are then not component sums).
pub fn debruijn_decompose(b: u64, parts: &[DigitSet]) -> Result<DeBruijnDecomposition> {
    let sum = DigitSet::direct_sum_all(parts).map_err(|_| Error::NotZb(BigInt::from(b)))?;
    if sum != DigitSet::range(b) {
        return Err(Error::NotZb(BigInt::from(b)));
    }
    let primes = prime_multiset(b);
    for order in multiset_permutations(&primes) {
        let components = components_for_order(&order);
        let mut used = vec![false; components.len()];
        let mut assignment = vec![usize::MAX; components.len()];
        if assign_components(parts, &components, 0, &mut used, &mut assignment) {
            return Ok(DeBruijnDecomposition {
                prime_order: order,
                components,
                assignment,
            });
        }
    }
    Err(Error::Unsupported(
        "parts are not a union of de Bruijn components for any prime ordering".into(),
    ))
}

/// A finite set `Γ ⊂ [0,1) ∩ Q` with `0 ∈ Γ` making `[e^{2πiγa}]` an
/// orthogonal matrix over the target set, certified exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpectrum {
    pub gamma: Vec<BigRational>,
    pub target: DigitSet,
}

impl FiniteSpectrum {
    pub fn new(gamma: Vec<BigRational>, target: DigitSet) -> Result<Self> {
        if gamma.first().map_or(true, |g| !g.is_zero()) {
            return Err(Error::InvalidGamma("spectrum must start with 0".into()));
        }
        if !verify_finite_spectrum(&gamma, &target) {
            return Err(Error::InternalInvariantViolated(
                "candidate spectrum fails exact orthogonality".into(),
            ));
        }
        Ok(FiniteSpectrum { gamma, target })
    }
}

/// Exact orthogonality of `{e^{2πiγa} : γ ∈ Γ}` over `A`: for every pair
/// `γ ≠ γ'` with `γ − γ' = p/q` in lowest terms, the exponential sum
/// vanishes iff `Φ_q` divides the `q`-folded mask polynomial of `A`.
///
/// Returns `false` (rather than erroring) on any structural failure — size
/// mismatch, duplicate entries, or a fold denominator beyond budget — since
/// none of those can certify orthogonality.
pub fn verify_finite_spectrum(gamma: &[BigRational], a: &DigitSet) -> bool {
    if gamma.len() != a.len() {
        return false;
    }
    for i in 0..gamma.len() {
        for j in (i + 1)..gamma.len() {
            if gamma[i] == gamma[j] {
                return false;
            }
            if !exponential_sum_vanishes(&(&gamma[i] - &gamma[j]), a) {
                return false;
            }
        }
    }
    true
}

/// Exact test `Σ_{a∈A} e^{2πiδa} = 0` for rational `δ`.
pub fn exponential_sum_vanishes(delta: &BigRational, a: &DigitSet) -> bool {
    let q = delta.denom();
    if q.is_one() {
        return false; // integer δ: the sum is #A ≠ 0
    }
    let q = match q.to_usize() {
        Some(q) if q as u64 <= crate::digitset::MASK_DEGREE_BUDGET => q,
        _ => return false,
    };
    let folded = fold_mask(a, q);
    if folded.is_zero() {
        return true;
    }
    divides_cyclotomic(q as u64, &folded)
}

/// The `q`-folded mask polynomial `Σ_{a∈A} x^{a mod q}`.
pub fn fold_mask(a: &DigitSet, q: usize) -> IntPolynomial {
    let modulus = BigInt::from(q);
    let mut coeffs = vec![BigInt::zero(); q];
    for x in a.elements() {
        let r = x.mod_floor(&modulus).to_usize().unwrap();
        coeffs[r] += 1;
    }
    IntPolynomial::from_coeffs(coeffs)
}

/// Limits for the exhaustive fallback spectrum search.
pub const EXHAUSTIVE_SPECTRUM_MAX_SIZE: usize = 8;
pub const EXHAUSTIVE_SPECTRUM_MAX_MODULUS: u64 = 256;

/// Constructs a spectrum for an integer tile `A` against the modulus `n`.
///
/// Compositional path: find `B` with `A ⊕ B = {0,…,n−1}` as integers,
/// decompose into de Bruijn components; each component `g·Z_m` assigned to
/// `A` contributes the progression `{0, 1/(gm), …, (m−1)/(gm)}` and `Γ` is
/// the direct sum of the contributions. Falls back to exhaustive search over
/// `Γ ⊂ (1/n)Z_n` when the structure is absent, and reports
/// `SpectrumNotFound` past the exhaustive limits.
pub fn spectrum_of_integer_tile(a: &DigitSet, n: u64) -> Result<FiniteSpectrum> {
    if let Some(spec) = compositional_spectrum(a, n) {
        return Ok(spec);
    }
    exhaustive_spectrum(a, n)
}

fn compositional_spectrum(a: &DigitSet, n: u64) -> Option<FiniteSpectrum> {
    let b_set = complement_for_modulus(a, n, true)?;
    let dec = debruijn_decompose(n, &[a.clone(), b_set]).ok()?;
    let mut gamma = vec![BigRational::zero()];
    let mut stride = 1u64;
    for (i, &p) in dec.prime_order.iter().enumerate() {
        stride *= p;
        if dec.assignment[i] == 0 {
            let mut next = Vec::with_capacity(gamma.len() * p as usize);
            for j in 0..p {
                let step = BigRational::new(BigInt::from(j), BigInt::from(stride));
                for g in &gamma {
                    next.push(g + &step);
                }
            }
            gamma = next;
        }
    }
    gamma.sort();
    FiniteSpectrum::new(gamma, a.clone()).ok()
}

fn exhaustive_spectrum(a: &DigitSet, n: u64) -> Result<FiniteSpectrum> {
    if a.len() > EXHAUSTIVE_SPECTRUM_MAX_SIZE || n > EXHAUSTIVE_SPECTRUM_MAX_MODULUS {
        return Err(Error::SpectrumNotFound(format!(
            "no compositional spectrum; exhaustive limits (size {EXHAUSTIVE_SPECTRUM_MAX_SIZE}, modulus {EXHAUSTIVE_SPECTRUM_MAX_MODULUS}) exceeded"
        )));
    }
    fn dfs(a: &DigitSet, n: u64, next: u64, chosen: &mut Vec<BigRational>, want: usize) -> bool {
        if chosen.len() == want {
            return true;
        }
        for j in next..n {
            let cand = BigRational::new(BigInt::from(j), BigInt::from(n));
            if chosen
                .iter()
                .all(|g| exponential_sum_vanishes(&(&cand - g), a))
            {
                chosen.push(cand);
                if dfs(a, n, j + 1, chosen, want) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let want = a.len();
    let mut chosen: Vec<BigRational> = vec![BigRational::zero()];
    if dfs(a, n, 1, &mut chosen, want) {
        FiniteSpectrum::new(chosen, a.clone())
    } else {
        Err(Error::SpectrumNotFound(format!(
            "no spectrum inside (1/{n})·Z_{n}"
        )))
    }
}
