//! Product-form digit sets `D = E_0 ⊕ b^{ℓ_1}E_1 ⊕ ⋯ ⊕ b^{ℓ_k}E_k` with
//! `E_0 ⊕ ⋯ ⊕ E_k ≡ Z_b (mod b)`, their modulo variants obtained by lifting
//! each stage by multiples of the kernel modulus `n_i`, the associated
//! integer tiles `A` and `B`, self-replicating tiling sets `J = bJ ⊕ D`,
//! and the exact tile measure.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::{kernel_chain, prime_multiset, ModuloProductFormData};
use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::inttile::debruijn_decompose;

/// The decomposition data `(b; E_0..E_k; ℓ_1..ℓ_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductFormStructure {
    pub base: u64,
    pub factors: Vec<DigitSet>,
    /// `ℓ_1 ≤ ⋯ ≤ ℓ_k` (`ℓ_0 = 0` is implicit).
    pub exponents: Vec<u32>,
    /// Whether `E_0 ⊕ ⋯ ⊕ E_k = Z_b` as sets, not merely mod `b`.
    pub strict: bool,
}

impl ProductFormStructure {
    pub fn new(base: u64, factors: Vec<DigitSet>, exponents: Vec<u32>) -> Result<Self> {
        if base < 2 {
            return Err(Error::Unsupported("base must be at least 2".into()));
        }
        if factors.is_empty() || exponents.len() != factors.len() - 1 {
            return Err(Error::Unsupported(format!(
                "{} exponents for {} factors",
                exponents.len(),
                factors.len()
            )));
        }
        if exponents.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Unsupported("exponents must be non-decreasing".into()));
        }
        for e in &factors {
            if !e.contains(&BigInt::zero()) {
                return Err(Error::InvalidDigitSet(format!("factor {e} must contain 0")));
            }
        }
        let product = DigitSet::direct_sum_all(&factors)
            .map_err(|_| Error::NotCompleteResidue(BigInt::from(base)))?;
        if !product.is_complete_residue_set(base) {
            return Err(Error::NotCompleteResidue(BigInt::from(base)));
        }
        let strict = product == DigitSet::range(base);
        Ok(ProductFormStructure {
            base,
            factors,
            exponents,
            strict,
        })
    }

    pub fn k(&self) -> usize {
        self.factors.len() - 1
    }

    /// `[ℓ_0 = 0, ℓ_1, ..., ℓ_k]`.
    pub fn ells(&self) -> Vec<u32> {
        let mut v = vec![0u32];
        v.extend_from_slice(&self.exponents);
        v
    }

    pub fn base_pow(&self, e: u32) -> BigInt {
        BigInt::from(self.base).pow(e)
    }

    pub fn kernel(&self) -> Result<ModuloProductFormData> {
        kernel_chain(&self.factors, self.base, &self.exponents)
    }
}

/// `D = E_0 ⊕ b^{ℓ_1}E_1 ⊕ ⋯ ⊕ b^{ℓ_k}E_k`, with directness verified.
pub fn expand_product_form(s: &ProductFormStructure) -> Result<DigitSet> {
    let ells = s.ells();
    let mut acc = s.factors[0].clone();
    for i in 1..s.factors.len() {
        let scaled = s.factors[i].scale(&s.base_pow(ells[i]))?;
        acc = acc.direct_sum(&scaled)?;
    }
    debug_assert_eq!(acc.len() as u64, s.base);
    Ok(acc)
}

/// `A = ⊕_{i=1}^{k} ⊕_{j=0}^{ℓ_i−1} b^j E_i`; the single point `{0}` when
/// every exponent is zero.
pub fn associated_a_set(s: &ProductFormStructure) -> Result<DigitSet> {
    let ells = s.ells();
    let mut acc = DigitSet::from_u64s(&[0]);
    for i in 1..s.factors.len() {
        for j in 0..ells[i] {
            let scaled = s.factors[i].scale(&s.base_pow(j))?;
            acc = acc.direct_sum(&scaled)?;
        }
    }
    Ok(acc)
}

/// `B = ⊕_{i=0}^{k−1} ⊕_{j=ℓ_i}^{ℓ_k−1} b^j E_i`, the complement with
/// `A ⊕ B ≡ Z_{b^{ℓ_k}} (mod b^{ℓ_k})`.
pub fn associated_b_set(s: &ProductFormStructure) -> Result<DigitSet> {
    let ells = s.ells();
    let top = *ells.last().unwrap();
    let mut acc = DigitSet::from_u64s(&[0]);
    for i in 0..s.factors.len() - 1 {
        for j in ells[i]..top {
            let scaled = s.factors[i].scale(&s.base_pow(j))?;
            acc = acc.direct_sum(&scaled)?;
        }
    }
    Ok(acc)
}

/// A modulo product-form: stage sets `D^{(0)}, …, D^{(k)}` with
/// `D^{(0)} ≡ E_0 (mod n_0)` and `D^{(i)} ≡ D^{(i−1)} ⊕ b^{ℓ_i}E_i (mod n_i)`,
/// together with the offsets that produced each lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuloProductForm {
    pub structure: ProductFormStructure,
    /// `n_0, …, n_k` from the kernel chain.
    pub moduli: Vec<BigInt>,
    /// `D^{(0)}, …, D^{(k)}`.
    pub stages: Vec<DigitSet>,
    /// Per stage, one lift multiplier per element of the plain stage sum,
    /// aligned with its sorted elements.
    pub offsets: Vec<Vec<BigInt>>,
}

impl ModuloProductForm {
    /// The final digit set `D = D^{(k)}`.
    pub fn digits(&self) -> &DigitSet {
        self.stages.last().unwrap()
    }

    pub fn is_plain(&self) -> bool {
        self.offsets.iter().flatten().all(|t| t.is_zero())
    }

    /// The zero-lift form over the same structure.
    pub fn plain(&self) -> Result<ModuloProductForm> {
        build_modulo_product_form_zero(&self.structure)
    }
}

/// Builds the stage chain for caller-supplied lift multipliers; stage sums
/// are checked direct, and every lift must stay a set of distinct
/// non-negative integers.
pub fn build_modulo_product_form(
    s: &ProductFormStructure,
    offsets: &[Vec<BigInt>],
) -> Result<ModuloProductForm> {
    if offsets.len() != s.factors.len() {
        return Err(Error::InvalidModuloLift(format!(
            "{} offset vectors for {} stages",
            offsets.len(),
            s.factors.len()
        )));
    }
    let kernel = s.kernel()?;
    let ells = s.ells();
    let mut stages: Vec<DigitSet> = Vec::with_capacity(s.factors.len());
    for i in 0..s.factors.len() {
        let plain = if i == 0 {
            s.factors[0].clone()
        } else {
            let scaled = s.factors[i].scale(&s.base_pow(ells[i]))?;
            stages[i - 1].direct_sum(&scaled)?
        };
        let lifted = plain
            .reduce_mod(&kernel.moduli[i], &offsets[i])
            .map_err(|e| match e {
                Error::InvalidModuloLift(msg) => {
                    Error::InvalidModuloLift(format!("stage {i}: {msg}"))
                }
                other => other,
            })?;
        stages.push(lifted);
    }
    debug_assert_eq!(stages.last().unwrap().len() as u64, s.base);
    Ok(ModuloProductForm {
        structure: s.clone(),
        moduli: kernel.moduli,
        stages,
        offsets: offsets.to_vec(),
    })
}

/// The product-form itself, seen as a modulo form with all lifts zero.
pub fn build_modulo_product_form_zero(s: &ProductFormStructure) -> Result<ModuloProductForm> {
    let mut offsets = Vec::with_capacity(s.factors.len());
    let mut size = 1usize;
    for e in &s.factors {
        size *= e.len();
        offsets.push(vec![BigInt::zero(); size]);
    }
    build_modulo_product_form(s, &offsets)
}

/// Converts explicit stage targets into lift multipliers: each target must
/// be congruent to exactly one plain element mod `n`, and the lift must be
/// an exact multiple of `n`.
pub fn offsets_from_targets(
    plain: &DigitSet,
    n: &BigInt,
    targets: &DigitSet,
) -> Result<Vec<BigInt>> {
    if plain.len() != targets.len() {
        return Err(Error::InvalidModuloLift(format!(
            "{} targets for {} elements",
            targets.len(),
            plain.len()
        )));
    }
    let mut by_res: HashMap<BigInt, &BigInt> = HashMap::new();
    for t in targets.elements() {
        if by_res.insert(t.mod_floor(n), t).is_some() {
            return Err(Error::InvalidModuloLift(format!(
                "two targets share a residue mod {n}"
            )));
        }
    }
    let mut offsets = Vec::with_capacity(plain.len());
    for x in plain.elements() {
        let t = by_res.get(&x.mod_floor(n)).ok_or_else(|| {
            Error::InvalidModuloLift(format!("no target congruent to {x} mod {n}"))
        })?;
        let diff = *t - x;
        let (q, r) = diff.div_rem(n);
        if !r.is_zero() {
            return Err(Error::InvalidModuloLift(format!(
                "target {t} differs from {x} by {diff}, not a multiple of {n}"
            )));
        }
        offsets.push(q);
    }
    Ok(offsets)
}

/// Recognition result for the four-element two-stage family over base 4.
#[derive(Clone, Debug)]
pub struct FourDigitRecognition {
    pub form: ModuloProductForm,
    /// The recognized set is `{0, a, 2^t ℓ, a + 2^t ℓ'}` with `t = 2·t1 + 1`.
    pub t1: u32,
}

/// Reconstructs the two-stage modulo form
/// `({0,1} (mod 2) ⊕ 4^{t1}{0,2}) (mod 4^{t1+1})` matching a canonical
/// four-element digit set `{0, a, 2^t ℓ, a + 2^t ℓ'}` with `a, t, ℓ, ℓ'` all
/// odd; `None` when the set is not of that shape.
pub fn recognize_four_digit_modulo_form(d: &DigitSet) -> Result<Option<FourDigitRecognition>> {
    if d.len() != 4 {
        return Err(Error::WrongCardinality(d.len(), 4));
    }
    if !d.is_canonical() {
        return Err(Error::NotCanonical(format!("{d}")));
    }
    let nonzero: Vec<&BigInt> = d.elements().iter().skip(1).collect();
    let odds: Vec<&BigInt> = nonzero.iter().copied().filter(|x| x.is_odd()).collect();
    let evens: Vec<&BigInt> = nonzero.iter().copied().filter(|x| x.is_even()).collect();
    if odds.len() != 2 || evens.len() != 1 {
        return Ok(None);
    }
    let a = odds[0].min(odds[1]).clone();
    let c = odds[0].max(odds[1]).clone();
    let t = two_adic_valuation(evens[0]);
    let t_prime = two_adic_valuation(&(&c - &a));
    if t != t_prime || t % 2 == 0 {
        return Ok(None);
    }
    let t1 = (t - 1) / 2;

    let e0 = DigitSet::from_u64s(&[0, 1]);
    let e1 = DigitSet::from_u64s(&[0, 2]);
    let structure = ProductFormStructure::new(4, vec![e0, e1], vec![t1])?;
    let kernel = structure.kernel()?;

    // stage 0: {0, 1} lifts to {0, a} mod 2
    let offset0 = vec![BigInt::zero(), (&a - BigInt::one()) / BigInt::from(2)];
    let d0 = structure.factors[0].reduce_mod(&kernel.moduli[0], &offset0)?;
    // stage 1: {0, a} ⊕ 4^{t1}·{0, 2} lifts onto d mod 4^{t1+1}
    let plain1 = d0.direct_sum(&structure.factors[1].scale(&structure.base_pow(t1))?)?;
    let offset1 = offsets_from_targets(&plain1, &kernel.moduli[1], d)?;
    let form = build_modulo_product_form(&structure, &[offset0, offset1])?;
    if form.digits() != d {
        return Err(Error::InternalInvariantViolated(format!(
            "recognized form rebuilds {} instead of {d}",
            form.digits()
        )));
    }
    Ok(Some(FourDigitRecognition { form, t1 }))
}

pub(crate) fn two_adic_valuation(x: &BigInt) -> u32 {
    assert!(!x.is_zero());
    let mut v = 0;
    let mut y = x.abs();
    while y.is_even() {
        y /= 2;
        v += 1;
    }
    v
}

/// A periodic set `J = B ⊕ period·Z`, the finite part kept as one period's
/// worth of representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingSet {
    pub finite_part: DigitSet,
    pub period: BigInt,
}

/// Exact check of `bJ ⊕ D = J`: over one period `b·P` of `bJ ⊕ D`, every
/// element of `J` must arise exactly once as `b·j + d`.
pub fn verify_self_replicating(j: &TilingSet, base: u64, digits: &DigitSet) -> Result<()> {
    let p = &j.period;
    let bp = p * BigInt::from(base);
    let residues: Vec<BigInt> = j
        .finite_part
        .elements()
        .iter()
        .map(|x| x.mod_floor(p))
        .collect();
    {
        let mut dedup: Vec<&BigInt> = residues.iter().collect();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != residues.len() {
            return Err(Error::InternalInvariantViolated(
                "tiling-set finite part collides modulo the period".into(),
            ));
        }
    }
    let mut window: HashSet<BigInt> = HashSet::new();
    for r in &residues {
        let mut t = r.clone();
        while t < bp {
            window.insert(t.clone());
            t += p;
        }
    }
    let mut hit: HashSet<BigInt> = HashSet::with_capacity(window.len());
    for r in &residues {
        for d in digits.elements() {
            let s = (r * BigInt::from(base) + d).mod_floor(&bp);
            if !window.contains(&s) || !hit.insert(s.clone()) {
                return Err(Error::SelfReplicationFailed {
                    uncovered: s,
                    period: p.clone(),
                });
            }
        }
    }
    if hit.len() != window.len() {
        let missed = window.iter().find(|x| !hit.contains(*x)).unwrap();
        return Err(Error::SelfReplicationFailed {
            uncovered: missed.clone(),
            period: p.clone(),
        });
    }
    Ok(())
}

/// Builds the self-replicating tiling set of a strict modulo product-form
/// and verifies `bJ ⊕ D = J` exactly modulo the period before returning.
///
/// With `t_i = ℓ_k − ℓ_{k−i}`, the finite part over period `b^{ℓ_k}` is
/// `⊕_{i=0}^{k−1} ⊕_{j=t_i}^{t_{i+1}−1} b^j D^{(k−i−1)}` when
/// `n_k = b^{ℓ_k+1}`. Otherwise the factors `E_i` owning a de Bruijn
/// component past the last component of `E_k` are gathered into `G`, the
/// range ends shift down to `t'_s = t_s − [E_{k−s} ⊆ G]`, and `b^{ℓ_k−1}G`
/// joins the sum.
pub fn self_replicating_tiling_set(m: &ModuloProductForm) -> Result<TilingSet> {
    let s = &m.structure;
    if !s.strict {
        return Err(Error::NotStrict);
    }
    let base = s.base;
    let ells = s.ells();
    let k = s.k();
    let ell_k = *ells.last().unwrap();
    let digits = m.digits();

    // Every exponent zero: D must be a complete residue set and Z tiles.
    if ell_k == 0 {
        let j = TilingSet {
            finite_part: DigitSet::from_u64s(&[0]),
            period: BigInt::one(),
        };
        verify_self_replicating(&j, base, digits)?;
        return Ok(j);
    }

    let t: Vec<u32> = (0..=k).map(|i| ell_k - ells[k - i]).collect();
    let n_k = m.moduli.last().unwrap();
    let lemma_43 = *n_k == s.base_pow(ell_k + 1);

    let mut finite = DigitSet::from_u64s(&[0]);
    let starts: Vec<u32> = if lemma_43 {
        t.clone()
    } else {
        let dec = debruijn_decompose(base, &s.factors)?;
        let last_of_k = *dec
            .components_of(k)
            .last()
            .ok_or_else(|| Error::InternalInvariantViolated("factor owns no component".into()))?;
        let g_parts: Vec<usize> = (0..k)
            .filter(|&i| dec.components_of(i).iter().any(|&c| c > last_of_k))
            .collect();
        let mut g = DigitSet::from_u64s(&[0]);
        for &i in &g_parts {
            g = g.direct_sum(&s.factors[i])?;
        }
        finite = finite.direct_sum(&g.scale(&s.base_pow(ell_k - 1))?)?;
        (0..=k)
            .map(|idx| {
                if idx == 0 {
                    0
                } else {
                    t[idx] - u32::from(g_parts.contains(&(k - idx)))
                }
            })
            .collect()
    };

    for i in 0..k {
        for j in starts[i]..starts[i + 1] {
            let scaled = m.stages[k - i - 1].scale(&s.base_pow(j))?;
            finite = finite.direct_sum(&scaled)?;
        }
    }

    let j = TilingSet {
        finite_part: finite,
        period: s.base_pow(ell_k),
    };
    verify_self_replicating(&j, base, digits)?;
    Ok(j)
}

/// `|K(b, D)| = b^{ℓ_k} / #B` for the finite part `B` of the constructed
/// tiling set; exact divisibility is an invariant.
pub fn tile_measure(m: &ModuloProductForm) -> Result<BigInt> {
    let j = self_replicating_tiling_set(m)?;
    let count = BigInt::from(j.finite_part.len());
    let (q, r) = j.period.div_rem(&count);
    if !r.is_zero() {
        return Err(Error::InternalInvariantViolated(format!(
            "period {} not divisible by tiling-set count {count}",
            j.period
        )));
    }
    Ok(q)
}

/// Deterministic enumeration of product-form structures over `b`: every
/// prime ordering of `b`, every ordered partition of the de Bruijn
/// components into factors, and every strictly increasing exponent vector
/// bounded by `max_ell`.
pub fn enumerate_structures(base: u64, max_ell: u32) -> Vec<ProductFormStructure> {
    let range = DigitSet::range(base);
    let mut out: Vec<ProductFormStructure> = Vec::new();
    for components in all_component_sets(base) {
        let m = components.len();
        for groups in 1..=m {
            for f in group_assignments(m, groups) {
                let mut parts: Vec<Vec<usize>> = vec![Vec::new(); groups];
                for (c, &g) in f.iter().enumerate() {
                    parts[g].push(c);
                }
                if parts.iter().any(|p| p.is_empty()) {
                    continue;
                }
                let factors: Result<Vec<DigitSet>> = parts
                    .iter()
                    .map(|idxs| DigitSet::direct_sum_all(idxs.iter().map(|&c| &components[c])))
                    .collect();
                let factors = match factors {
                    Ok(f) => f,
                    Err(_) => continue,
                };
                if DigitSet::direct_sum_all(&factors).ok().as_ref() != Some(&range) {
                    continue;
                }
                for ells in increasing_exponents(groups - 1, max_ell) {
                    if let Ok(s) = ProductFormStructure::new(base, factors.clone(), ells) {
                        if !out.contains(&s) {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out
}

fn all_component_sets(base: u64) -> Vec<Vec<DigitSet>> {
    let primes = prime_multiset(base);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for order in multiset_permutations_u64(&primes) {
        let mut comps = Vec::new();
        let mut stride = 1u64;
        for &p in &order {
            comps.push(DigitSet::new((0..p).map(|x| BigInt::from(x * stride))).unwrap());
            stride *= p;
        }
        let key: Vec<String> = comps.iter().map(|c| c.to_string()).collect();
        if seen.insert(key) {
            out.push(comps);
        }
    }
    out
}

fn multiset_permutations_u64(sorted: &[u64]) -> Vec<Vec<u64>> {
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
        for mut tail in multiset_permutations_u64(&rest) {
            tail.insert(0, sorted[i]);
            out.push(tail);
        }
    }
    out
}

fn group_assignments(m: usize, groups: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut f = vec![0usize; m];
    loop {
        out.push(f.clone());
        let mut i = 0;
        loop {
            if i == m {
                return out;
            }
            f[i] += 1;
            if f[i] < groups {
                break;
            }
            f[i] = 0;
            i += 1;
        }
    }
}

fn increasing_exponents(k: usize, max_ell: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, from: u32, max_ell: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for e in from..=max_ell {
            current.push(e);
            rec(k, e + 1, max_ell, current, out);
            current.pop();
        }
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    rec(k, 0, max_ell, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Exhaustive enumerator over lift multipliers in `[−window, window]` for
/// every non-zero element of every stage (element 0 keeps lift 0, so
/// `0 ∈ D` is preserved). Stages recurse depth-first because each stage's
/// plain sum depends on the previous lifted stage; lifts that go negative
/// or collide are pruned.
struct LiftEnumerator<'a> {
    structure: &'a ProductFormStructure,
    kernel: ModuloProductFormData,
    ells: Vec<u32>,
    window: i64,
    budget: usize,
    out: Vec<ModuloProductForm>,
}

impl<'a> LiftEnumerator<'a> {
    fn run(mut self) -> Result<Vec<ModuloProductForm>> {
        let mut offsets = Vec::new();
        let mut stages = Vec::new();
        self.stage(0, &mut stages, &mut offsets)?;
        Ok(self.out)
    }

    fn stage(
        &mut self,
        i: usize,
        stages: &mut Vec<DigitSet>,
        offsets: &mut Vec<Vec<BigInt>>,
    ) -> Result<()> {
        let s = self.structure;
        if i == s.factors.len() {
            if self.out.len() >= self.budget {
                return Err(Error::BudgetExceeded(format!(
                    "more than {} lifted forms in the window",
                    self.budget
                )));
            }
            self.out.push(ModuloProductForm {
                structure: s.clone(),
                moduli: self.kernel.moduli.clone(),
                stages: stages.clone(),
                offsets: offsets.clone(),
            });
            return Ok(());
        }
        let plain = if i == 0 {
            s.factors[0].clone()
        } else {
            stages[i - 1].direct_sum(&s.factors[i].scale(&s.base_pow(self.ells[i]))?)?
        };
        let mut mults = vec![BigInt::zero(); plain.len()];
        self.element(i, &plain, 1, &mut mults, stages, offsets)
    }

    fn element(
        &mut self,
        i: usize,
        plain: &DigitSet,
        idx: usize,
        mults: &mut Vec<BigInt>,
        stages: &mut Vec<DigitSet>,
        offsets: &mut Vec<Vec<BigInt>>,
    ) -> Result<()> {
        if idx == plain.len() {
            if let Ok(lifted) = plain.reduce_mod(&self.kernel.moduli[i], mults) {
                stages.push(lifted);
                offsets.push(mults.clone());
                let r = self.stage(i + 1, stages, offsets);
                stages.pop();
                offsets.pop();
                return r;
            }
            return Ok(());
        }
        for w in -self.window..=self.window {
            mults[idx] = BigInt::from(w);
            self.element(i, plain, idx + 1, mults, stages, offsets)?;
        }
        mults[idx] = BigInt::zero();
        Ok(())
    }
}

/// All modulo product-forms over `s` with lift multipliers in
/// `[−window, window]` (element 0 of each stage fixed at lift 0), the plain
/// zero-lift form included. Errors when more than `budget` forms exist.
pub fn enumerate_lifts_exhaustive(
    s: &ProductFormStructure,
    window: i64,
    budget: usize,
) -> Result<Vec<ModuloProductForm>> {
    let kernel = s.kernel()?;
    LiftEnumerator {
        structure: s,
        kernel,
        ells: s.ells(),
        window,
        budget,
        out: Vec::new(),
    }
    .run()
}

/// A deterministic sample of lifted forms over `s`: single-element lifts
/// with multipliers `1, 2, …` up to the window, last stages and largest
/// elements first. Returns at most `count` valid non-plain forms.
pub fn sample_lifted_forms(
    s: &ProductFormStructure,
    window: i64,
    count: usize,
) -> Result<Vec<ModuloProductForm>> {
    let plain = build_modulo_product_form_zero(s)?;
    let mut out = Vec::new();
    'outer: for w in 1..=window {
        for stage in (0..s.factors.len()).rev() {
            let n_elems = plain.offsets[stage].len();
            for elem in (1..n_elems).rev() {
                let mut offsets = plain.offsets.clone();
                offsets[stage][elem] = BigInt::from(w);
                if let Ok(form) = build_modulo_product_form(s, &offsets) {
                    if !form.is_plain() {
                        out.push(form);
                        if out.len() >= count {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Bounded membership test: enumerates all modulo product-forms over `base`
/// with exponents up to `max_ell` and lifts within `window`, and compares
/// digit sets. `None` only means no form exists within these bounds.
pub fn find_modulo_form(
    d: &DigitSet,
    base: u64,
    max_ell: u32,
    window: i64,
    budget: usize,
) -> Result<Option<ModuloProductForm>> {
    for s in enumerate_structures(base, max_ell) {
        let forms = match enumerate_lifts_exhaustive(&s, window, budget) {
            Ok(f) => f,
            Err(Error::BudgetExceeded(_)) => continue,
            Err(e) => return Err(e),
        };
        for form in forms {
            if form.digits() == d {
                return Ok(Some(form));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(values: &[u64]) -> DigitSet {
        DigitSet::from_u64s(values)
    }

    fn structure(base: u64, factors: &[&[u64]], ells: &[u32]) -> ProductFormStructure {
        ProductFormStructure::new(base, factors.iter().map(|f| ds(f)).collect(), ells.to_vec())
            .unwrap()
    }

    #[test]
    fn expansion_examples() {
        let s = structure(4, &[&[0, 1], &[0, 2]], &[1]);
        assert_eq!(expand_product_form(&s).unwrap(), ds(&[0, 1, 8, 9]));
        assert!(s.strict);

        let s = structure(8, &[&[0, 2], &[0, 1, 4, 5]], &[1]);
        assert_eq!(
            expand_product_form(&s).unwrap(),
            ds(&[0, 2, 8, 10, 32, 34, 40, 42])
        );

        let s = structure(4, &[&[0, 1, 2, 3]], &[]);
        assert_eq!(expand_product_form(&s).unwrap(), ds(&[0, 1, 2, 3]));
    }

    #[test]
    fn associated_sets() {
        let s = structure(4, &[&[0, 1], &[0, 2]], &[1]);
        assert_eq!(associated_a_set(&s).unwrap(), ds(&[0, 2]));
        assert_eq!(associated_b_set(&s).unwrap(), ds(&[0, 1]));

        let s = structure(4, &[&[0, 1], &[0, 2]], &[2]);
        assert_eq!(associated_a_set(&s).unwrap(), ds(&[0, 2, 8, 10]));
        assert_eq!(associated_b_set(&s).unwrap(), ds(&[0, 1, 4, 5]));

        let s = structure(8, &[&[0, 2], &[0, 1, 4, 5]], &[1]);
        assert_eq!(associated_a_set(&s).unwrap(), ds(&[0, 1, 4, 5]));
        assert_eq!(associated_b_set(&s).unwrap(), ds(&[0, 2]));
    }

    #[test]
    fn a_and_b_tile_the_box() {
        for s in [
            structure(4, &[&[0, 1], &[0, 2]], &[2]),
            structure(8, &[&[0, 2], &[0, 1, 4, 5]], &[1]),
            structure(8, &[&[0, 4], &[0, 1], &[0, 2]], &[1, 2]),
        ] {
            let a = associated_a_set(&s).unwrap();
            let b = associated_b_set(&s).unwrap();
            let top = s.base_pow(*s.ells().last().unwrap());
            let sum = a.direct_sum(&b).unwrap();
            assert_eq!(BigInt::from(sum.len()), top);
            // strict structures tile the box exactly
            assert_eq!(sum.max_element() + 1, top);
        }
    }

    #[test]
    fn modulo_form_congruence_checks() {
        let s = structure(4, &[&[0, 1], &[0, 2]], &[2]);
        // D' = {0,1,32,33}; lifting 32 onto 8 is not a multiple of n_1 = 64
        let plain = expand_product_form(&s).unwrap();
        assert_eq!(plain, ds(&[0, 1, 32, 33]));
        let kernel = s.kernel().unwrap();
        assert_eq!(kernel.moduli[1], BigInt::from(64));
        let err = offsets_from_targets(&plain, &kernel.moduli[1], &ds(&[0, 1, 8, 9])).unwrap_err();
        assert!(matches!(err, Error::InvalidModuloLift(_)));

        // zero lifts reproduce the plain product-form
        let form = build_modulo_product_form_zero(&s).unwrap();
        assert_eq!(form.digits(), &plain);
        assert!(form.is_plain());

        // a legal lift: 8 ↦ 8 + 16·1 = 24 with ℓ_1 = 1, n_1 = 16
        let s = structure(4, &[&[0, 1], &[0, 2]], &[1]);
        let offsets = vec![
            vec![BigInt::zero(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::zero(), BigInt::one(), BigInt::one()],
        ];
        let form = build_modulo_product_form(&s, &offsets).unwrap();
        assert_eq!(form.digits(), &ds(&[0, 1, 24, 25]));
    }

    #[test]
    fn recognize_four_digit_examples() {
        let r = recognize_four_digit_modulo_form(&ds(&[0, 1, 8, 9]))
            .unwrap()
            .unwrap();
        assert_eq!(r.t1, 1);
        assert!(r.form.is_plain());

        assert!(recognize_four_digit_modulo_form(&ds(&[0, 1, 4, 5]))
            .unwrap()
            .is_none());

        let r = recognize_four_digit_modulo_form(&ds(&[0, 2, 3, 5]))
            .unwrap()
            .unwrap();
        assert_eq!(r.t1, 0);
        assert!(r.form.digits().is_complete_residue_set(4));

        let r = recognize_four_digit_modulo_form(&ds(&[0, 1, 24, 25]))
            .unwrap()
            .unwrap();
        assert_eq!(r.t1, 1);
        assert!(!r.form.is_plain());

        assert!(matches!(
            recognize_four_digit_modulo_form(&ds(&[0, 1, 2])),
            Err(Error::WrongCardinality(3, 4))
        ));
        assert!(matches!(
            recognize_four_digit_modulo_form(&ds(&[0, 2, 4, 6])),
            Err(Error::NotCanonical(_))
        ));
    }

    #[test]
    fn tiling_set_examples() {
        // strict product-form over base 8
        let s = structure(8, &[&[0, 2], &[0, 1, 4, 5]], &[1]);
        let form = build_modulo_product_form_zero(&s).unwrap();
        let j = self_replicating_tiling_set(&form).unwrap();
        assert_eq!(j.finite_part, ds(&[0, 2]));
        assert_eq!(j.period, BigInt::from(8));
        assert_eq!(tile_measure(&form).unwrap(), BigInt::from(4));

        // base 4, D = {0,1,8,9}
        let s = structure(4, &[&[0, 1], &[0, 2]], &[1]);
        let form = build_modulo_product_form_zero(&s).unwrap();
        let j = self_replicating_tiling_set(&form).unwrap();
        assert_eq!(j.finite_part, ds(&[0, 1]));
        assert_eq!(j.period, BigInt::from(4));
        assert_eq!(tile_measure(&form).unwrap(), BigInt::from(2));

        // complete residue set: J = Z
        let s = structure(4, &[&[0, 1, 2, 3]], &[]);
        let form = build_modulo_product_form_zero(&s).unwrap();
        let j = self_replicating_tiling_set(&form).unwrap();
        assert_eq!(j.period, BigInt::one());
        assert_eq!(tile_measure(&form).unwrap(), BigInt::one());
    }

    #[test]
    fn tiling_set_lifted_forms() {
        // {0,1,24,25}: the lifted stage keeps the same tiling set
        let s = structure(4, &[&[0, 1], &[0, 2]], &[1]);
        let offsets = vec![
            vec![BigInt::zero(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::zero(), BigInt::one(), BigInt::one()],
        ];
        let form = build_modulo_product_form(&s, &offsets).unwrap();
        let j = self_replicating_tiling_set(&form).unwrap();
        assert_eq!(j.finite_part, ds(&[0, 1]));
        assert_eq!(tile_measure(&form).unwrap(), BigInt::from(2));
    }

    #[test]
    fn tiling_set_second_branch() {
        // E_k misses the last component: G enters the tiling set
        let s = structure(4, &[&[0, 2], &[0, 1]], &[1]);
        let form = build_modulo_product_form_zero(&s).unwrap();
        assert_eq!(form.digits(), &ds(&[0, 2, 4, 6]));
        let j = self_replicating_tiling_set(&form).unwrap();
        assert_eq!(j.finite_part, ds(&[0, 2]));
        assert_eq!(j.period, BigInt::from(4));
        assert_eq!(tile_measure(&form).unwrap(), BigInt::from(2));

        // three stages over base 8 with G = {0,4}
        let s = structure(8, &[&[0, 4], &[0, 1], &[0, 2]], &[1, 2]);
        let form = build_modulo_product_form_zero(&s).unwrap();
        let j = self_replicating_tiling_set(&form).unwrap();
        assert_eq!(j.finite_part, ds(&[0, 4, 8, 12, 32, 36, 40, 44]));
        assert_eq!(j.period, BigInt::from(64));
        assert_eq!(tile_measure(&form).unwrap(), BigInt::from(8));
        let a = associated_a_set(&s).unwrap();
        assert_eq!(BigInt::from(a.len()), tile_measure(&form).unwrap());
    }

    #[test]
    fn non_strict_rejected_for_tiling() {
        let s = structure(4, &[&[0, 1], &[0, 6]], &[1]);
        assert!(!s.strict);
        let form = build_modulo_product_form_zero(&s).unwrap();
        assert!(matches!(
            self_replicating_tiling_set(&form),
            Err(Error::NotStrict)
        ));
    }

    #[test]
    fn lift_enumeration_is_exhaustive_and_bounded() {
        let s = structure(4, &[&[0, 1], &[0, 2]], &[0]);
        let forms = enumerate_lifts_exhaustive(&s, 1, 100_000).unwrap();
        assert!(forms.iter().any(|f| f.is_plain()));
        assert!(forms.len() > 10);
        for f in &forms {
            assert_eq!(f.digits().len(), 4);
        }
        assert!(matches!(
            enumerate_lifts_exhaustive(&s, 1, 3),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn structure_enumeration_covers_bases() {
        for (b, min_count) in [(4u64, 3), (6, 6), (8, 10), (9, 3)] {
            let structures = enumerate_structures(b, 2);
            assert!(
                structures.len() >= min_count,
                "base {b}: got {}",
                structures.len()
            );
            for s in &structures {
                assert!(s.strict);
                assert_eq!(expand_product_form(s).unwrap().len() as u64, b);
            }
        }
    }

    #[test]
    fn membership_search_finds_lifted_form() {
        let found = find_modulo_form(&ds(&[0, 1, 24, 25]), 4, 2, 2, 1_000_000)
            .unwrap()
            .unwrap();
        assert_eq!(found.digits(), &ds(&[0, 1, 24, 25]));
        assert!(find_modulo_form(&ds(&[0, 1, 4, 5]), 4, 2, 2, 1_000_000)
            .unwrap()
            .is_none());
    }
}
