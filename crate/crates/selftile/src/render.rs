//! Geometric output: depth-`N` radix approximations of `K(b, D)`, exact
//! interval decompositions of strict product-form tiles, and the covering
//! measure estimate used as the numeric oracle for tile verdicts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::digitset::DigitSet;
use crate::error::{Error, Result};
use crate::productform::{associated_a_set, ProductFormStructure};

pub const DEFAULT_POINT_BUDGET: u64 = 1 << 22;
pub const DEFAULT_INTERVAL_BUDGET: usize = 1 << 20;

/// Sorted disjoint closed intervals with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalUnion {
    intervals: Vec<(BigRational, BigRational)>,
}

impl IntervalUnion {
    /// Sorts, merges overlapping or touching intervals.
    pub fn from_intervals(mut raw: Vec<(BigRational, BigRational)>) -> Self {
        raw.retain(|(lo, hi)| lo <= hi);
        raw.sort();
        let mut intervals: Vec<(BigRational, BigRational)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match intervals.last_mut() {
                Some((_, chi)) if lo <= *chi => {
                    if hi > *chi {
                        *chi = hi;
                    }
                }
                _ => intervals.push((lo, hi)),
            }
        }
        IntervalUnion { intervals }
    }

    pub fn intervals(&self) -> &[(BigRational, BigRational)] {
        &self.intervals
    }

    pub fn total_length(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for (lo, hi) in &self.intervals {
            acc += hi - lo;
        }
        acc
    }
}

/// All truncated radix values `Σ_{j=1}^{depth} b^{−j} d_j`, deduplicated
/// and sorted. Errors when `#D^depth` exceeds the budget.
pub fn radix_points(
    b: u64,
    d: &DigitSet,
    depth: u32,
    budget: u64,
) -> Result<Vec<BigRational>> {
    if b < 2 || depth < 1 {
        return Err(Error::Unsupported("need b ≥ 2 and depth ≥ 1".into()));
    }
    let count = (d.len() as u64)
        .checked_pow(depth)
        .filter(|&c| c <= budget)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!("{}^{depth} radix points exceed {budget}", d.len()))
        })?;
    let _ = count;
    let base = BigRational::from(BigInt::from(b));
    let mut points: Vec<BigRational> = vec![BigRational::zero()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(points.len() * d.len());
        for digit in d.elements() {
            let dd = BigRational::from(digit.clone());
            for p in &points {
                next.push((p + &dd) / &base);
            }
        }
        next.sort();
        next.dedup();
        points = next;
    }
    Ok(points)
}

/// The exact decomposition `K(b, D) = ⋃_{a ∈ A}[a, a+1]` of a strict
/// product-form tile, adjacent intervals merged.
pub fn strict_tile_intervals(s: &ProductFormStructure) -> Result<IntervalUnion> {
    if !s.strict {
        return Err(Error::NotStrict);
    }
    let a = associated_a_set(s)?;
    let raw = a
        .elements()
        .iter()
        .map(|x| {
            let lo = BigRational::from(x.clone());
            let hi = &lo + BigRational::one();
            (lo, hi)
        })
        .collect();
    Ok(IntervalUnion::from_intervals(raw))
}

struct CoverState {
    digits: Vec<i128>,
    base: i128,
    intervals: Vec<(i128, i128)>,
    /// `b^j` for the current level `j`.
    unit: i128,
}

impl CoverState {
    fn new(b: u64, d: &DigitSet, depth: u32) -> Result<CoverState> {
        let max = d
            .max_element()
            .to_i128()
            .ok_or_else(|| Error::BudgetExceeded("digit too large for the cover oracle".into()))?;
        let digits: Vec<i128> = d.elements().iter().map(|x| x.to_i128().unwrap()).collect();
        let b_i = b as i128;
        // scale guard: the largest coordinate is max(D)·(b−1)·b^depth
        let mut top: i128 = max.max(1) * (b_i - 1);
        for _ in 0..depth {
            top = top
                .checked_mul(b_i)
                .ok_or_else(|| Error::BudgetExceeded("cover coordinates overflow".into()))?;
        }
        Ok(CoverState {
            digits,
            base: b_i,
            intervals: vec![(0, max)], // [0, max(D)/(b−1)] in units 1/(b−1)
            unit: 1,
        })
    }

    /// One refinement `C_{j} = ⋃_d (d·(b−1)·b^{j−1} + C_{j−1})` in scaled
    /// integer coordinates (endpoints are multiples of `1/((b−1)·b^j)`).
    fn step(&mut self, budget: usize) -> Result<()> {
        let shift_unit = (self.base - 1) * self.unit;
        // one sorted run per digit, k-way merged smallest-first
        let mut cursors: Vec<(usize, i128)> = self
            .digits
            .iter()
            .map(|&dg| (0usize, dg * shift_unit))
            .collect();
        let mut merged: Vec<(i128, i128)> = Vec::with_capacity(self.intervals.len() * 2);
        loop {
            let mut best: Option<(usize, i128)> = None;
            for (run, &(pos, offset)) in cursors.iter().enumerate() {
                if pos < self.intervals.len() {
                    let lo = self.intervals[pos].0 + offset;
                    if best.map_or(true, |(_, blo)| lo < blo) {
                        best = Some((run, lo));
                    }
                }
            }
            let Some((run, lo)) = best else { break };
            let (pos, offset) = cursors[run];
            let hi = self.intervals[pos].1 + offset;
            cursors[run].0 += 1;
            match merged.last_mut() {
                Some((_, chi)) if lo <= *chi => {
                    if hi > *chi {
                        *chi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() > budget {
            return Err(Error::BudgetExceeded(format!(
                "{} cover intervals exceed {budget}",
                merged.len()
            )));
        }
        self.intervals = merged;
        self.unit *= self.base;
        Ok(())
    }

    fn length(&self) -> BigRational {
        let total: i128 = self.intervals.iter().map(|(lo, hi)| hi - lo).sum();
        BigRational::new(BigInt::from(total), BigInt::from((self.base - 1) * self.unit))
    }
}

/// Covering measure estimate: the total length of
/// `⋃_x [x, x + max(D)/((b−1)·b^depth)]` over the depth-truncated radix
/// points `x`. An upper bound for the measure of `K(b, D)`, non-increasing
/// in the depth.
pub fn measure_estimate(b: u64, d: &DigitSet, depth: u32, budget: usize) -> Result<BigRational> {
    if b < 2 || depth < 1 {
        return Err(Error::Unsupported("need b ≥ 2 and depth ≥ 1".into()));
    }
    let mut state = CoverState::new(b, d, depth)?;
    for _ in 0..depth {
        state.step(budget)?;
    }
    Ok(state.length())
}

/// Decides `measure_estimate(b, d, depth, ·) ≤ threshold` without always
/// refining to full depth: the estimate is non-increasing in depth and a
/// single refinement shrinks it by at most a factor `b` (the digit-0
/// translate alone keeps `1/b` of the length), so shallow values bound the
/// deep one from both sides.
pub fn cover_estimate_at_most(
    b: u64,
    d: &DigitSet,
    depth: u32,
    budget: usize,
    threshold: &BigRational,
) -> Result<bool> {
    if b < 2 || depth < 1 {
        return Err(Error::Unsupported("need b ≥ 2 and depth ≥ 1".into()));
    }
    let mut state = CoverState::new(b, d, depth)?;
    let mut remaining = depth;
    let big_b = BigRational::from(BigInt::from(b));
    while remaining > 0 {
        state.step(budget)?;
        remaining -= 1;
        let len = state.length();
        if len <= *threshold {
            return Ok(true);
        }
        // lower bound: final length ≥ len / b^remaining
        let mut floor = len;
        for _ in 0..remaining {
            floor /= &big_b;
        }
        if floor > *threshold {
            return Ok(false);
        }
    }
    Ok(state.length() <= *threshold)
}

/// A one-line SVG strip of an interval union (bars) scaled to the data.
pub fn svg_intervals(union: &IntervalUnion) -> String {
    let (min, max) = match (union.intervals().first(), union.intervals().last()) {
        (Some((lo, _)), Some((_, hi))) => (
            lo.to_f64().unwrap_or(0.0),
            hi.to_f64().unwrap_or(1.0),
        ),
        _ => (0.0, 1.0),
    };
    let span = (max - min).max(1e-9);
    let width = 800.0;
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"820\" height=\"60\" viewBox=\"0 0 820 60\">\n",
    );
    out.push_str("  <rect x=\"0\" y=\"0\" width=\"820\" height=\"60\" fill=\"white\"/>\n");
    for (lo, hi) in union.intervals() {
        let x = 10.0 + (lo.to_f64().unwrap_or(0.0) - min) / span * width;
        let w = ((hi - lo).to_f64().unwrap_or(0.0) / span * width).max(0.5);
        out.push_str(&format!(
            "  <rect x=\"{x:.3}\" y=\"20\" width=\"{w:.3}\" height=\"20\" fill=\"#336699\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// A one-line SVG strip of radix points (ticks).
pub fn svg_points(points: &[BigRational]) -> String {
    let (min, max) = match (points.first(), points.last()) {
        (Some(a), Some(b)) => (a.to_f64().unwrap_or(0.0), b.to_f64().unwrap_or(1.0)),
        _ => (0.0, 1.0),
    };
    let span = (max - min).max(1e-9);
    let width = 800.0;
    let mut out = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"820\" height=\"40\" viewBox=\"0 0 820 40\">\n",
    );
    out.push_str("  <rect x=\"0\" y=\"0\" width=\"820\" height=\"40\" fill=\"white\"/>\n");
    for p in points {
        let x = 10.0 + (p.to_f64().unwrap_or(0.0) - min) / span * width;
        out.push_str(&format!(
            "  <line x1=\"{x:.3}\" y1=\"10\" x2=\"{x:.3}\" y2=\"30\" stroke=\"#993333\" stroke-width=\"0.7\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// CSV rows `rational,decimal` for a point list.
pub fn points_csv(points: &[BigRational]) -> String {
    let mut out = String::from("point,decimal\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p, p.to_f64().unwrap_or(f64::NAN)));
    }
    out
}
