//! Exact loss distributions and discrete positions.
//!
//! A [`Position`] is a finite discrete P&L random variable `X`: a list of
//! payoffs with their probabilities. A [`LossDistribution`] describes the
//! loss `L = -X` as point masses plus piecewise-linear density segments,
//! which covers every tail shape used elsewhere in the crate. All
//! integrals over segments are taken in closed form; tolerances only
//! absorb floating-point rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};

/// Accepted drift of an input's total mass away from one.
pub const INPUT_MASS_TOLERANCE: f64 = 1e-9;
/// Drift below which no renormalization is applied.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Slack used when comparing accumulated probabilities with `1 - alpha`.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
/// Default upper bound on the number of outcomes of a convolution.
pub const DEFAULT_OUTCOME_CAP: usize = 1_000_000;

/// Which of the two canonical α-quantiles to use at an atom.
///
/// With `q⁻ = inf{x : P(X ≤ x) ≥ 1-α}` (smallest) and
/// `q = inf{x : P(X ≤ x) > 1-α}` (largest), every α-quantile lies in
/// `[q⁻, q]`. They differ exactly when the cdf has a flat stretch at height
/// `1-α`, e.g. an atom whose lower tail mass is exactly `1-α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantileConvention {
    #[default]
    Smallest,
    Largest,
}

impl QuantileConvention {
    pub fn name(self) -> &'static str {
        match self {
            QuantileConvention::Smallest => "smallest",
            QuantileConvention::Largest => "largest",
        }
    }
}

pub(crate) fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(RiskError::Level(alpha))
    }
}

/// Turns `-0.0` into `0.0` so reported values print cleanly.
#[inline]
pub(crate) fn unsigned_zero(x: f64) -> f64 {
    x + 0.0
}

fn check_total(total: f64) -> Result<Option<f64>> {
    let drift = (total - 1.0).abs();
    if !total.is_finite() || drift > INPUT_MASS_TOLERANCE {
        Err(RiskError::Mass { total })
    } else if drift > MASS_TOLERANCE {
        Ok(Some(total))
    } else {
        Ok(None)
    }
}

/// Sorts by location, merges equal locations and drops nothing.
fn merge_sorted(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for (x, p) in points {
        match merged.last_mut() {
            Some(last) if last.0 == x => last.1 += p,
            _ => merged.push((x, p)),
        }
    }
    merged
}

/// A finite discrete P&L random variable in canonical form.
///
/// Outcomes are sorted ascending by payoff, payoffs are pairwise distinct
/// and every probability is strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Position {
    outcomes: Vec<(f64, f64)>,
}

impl Position {
    /// Builds a canonical position from `(payoff, probability)` pairs.
    ///
    /// Duplicate payoffs are merged. The total must be within `1e-9` of one;
    /// a drift larger than `1e-12` is removed by renormalizing.
    pub fn new(outcomes: Vec<(f64, f64)>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(RiskError::InvalidDistribution(
                "a position needs at least one outcome".into(),
            ));
        }
        for &(x, p) in &outcomes {
            if !x.is_finite() {
                return Err(RiskError::InvalidDistribution(format!(
                    "payoff {x} is not finite"
                )));
            }
            if !(p > 0.0) || !p.is_finite() {
                return Err(RiskError::InvalidDistribution(format!(
                    "probability {p} of payoff {x} is not positive"
                )));
            }
        }
        let total: f64 = outcomes.iter().map(|o| o.1).sum();
        let rescale = check_total(total)?;
        let mut merged = merge_sorted(outcomes);
        if let Some(total) = rescale {
            for o in &mut merged {
                o.1 /= total;
            }
        }
        Ok(Position { outcomes: merged })
    }

    /// The sure payoff `x`.
    pub fn sure(x: f64) -> Self {
        Position {
            outcomes: vec![(x, 1.0)],
        }
    }

    /// Canonical `(payoff, probability)` pairs, ascending by payoff.
    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn min_payoff(&self) -> f64 {
        self.outcomes[0].0
    }

    pub fn max_payoff(&self) -> f64 {
        self.outcomes[self.outcomes.len() - 1].0
    }

    /// True when every outcome pays at least zero.
    pub fn is_nonnegative(&self) -> bool {
        self.min_payoff() >= 0.0
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|(x, p)| x * p).sum()
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.outcomes
            .iter()
            .take_while(|o| o.0 <= x)
            .map(|o| o.1)
            .sum()
    }

    /// The loss distribution `L = -X`: one atom per outcome, no segments.
    pub fn to_loss(&self) -> LossDistribution {
        let atoms = self.outcomes.iter().rev().map(|&(x, p)| (-x, p)).collect();
        LossDistribution {
            atoms,
            segments: Vec::new(),
        }
    }

    /// The α-quantile of the payoff under the given convention.
    pub fn quantile(&self, alpha: f64, convention: QuantileConvention) -> Result<f64> {
        check_level(alpha)?;
        let target = 1.0 - alpha;
        let mut cumulative = 0.0;
        for &(x, p) in &self.outcomes {
            cumulative += p;
            let reached = match convention {
                QuantileConvention::Smallest => cumulative >= target - PROBABILITY_TOLERANCE,
                QuantileConvention::Largest => cumulative > target + PROBABILITY_TOLERANCE,
            };
            if reached {
                return Ok(x);
            }
        }
        Err(RiskError::DegenerateSupport(alpha))
    }

    /// Distribution of `X + Y` for independent `X` and `Y`.
    pub fn independent_sum(&self, other: &Position) -> Result<Position> {
        self.independent_sum_capped(other, DEFAULT_OUTCOME_CAP)
    }

    /// Like [`Position::independent_sum`] with an explicit outcome cap.
    pub fn independent_sum_capped(&self, other: &Position, cap: usize) -> Result<Position> {
        let outcomes = self.len().saturating_mul(other.len());
        if outcomes > cap {
            return Err(RiskError::Size { outcomes, cap });
        }
        let mut pairs = Vec::with_capacity(outcomes);
        for &(x, p) in &self.outcomes {
            for &(y, q) in &other.outcomes {
                pairs.push((x + y, p * q));
            }
        }
        Ok(Position {
            outcomes: merge_sorted(pairs),
        })
    }

    /// Multiplies every payoff by `lambda ≥ 0`.
    pub fn scale(&self, lambda: f64) -> Result<Position> {
        if lambda < 0.0 || lambda.is_nan() {
            return Err(RiskError::NegativeScale(lambda));
        }
        if lambda == 0.0 {
            return Ok(Position::sure(0.0));
        }
        let scaled = self
            .outcomes
            .iter()
            .map(|&(x, p)| (x * lambda, p))
            .collect();
        Ok(Position {
            outcomes: merge_sorted(scaled),
        })
    }

    /// Adds the sure amount `a` to every payoff.
    pub fn shift(&self, a: f64) -> Position {
        let shifted = self.outcomes.iter().map(|&(x, p)| (x + a, p)).collect();
        Position {
            outcomes: merge_sorted(shifted),
        }
    }
}

/// One piece of a piecewise-linear density: `f` runs linearly from `f_a`
/// at `a` to `f_b` at `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub f_a: f64,
    pub f_b: f64,
}

impl Segment {
    pub fn new(a: f64, b: f64, f_a: f64, f_b: f64) -> Self {
        Segment { a, b, f_a, f_b }
    }

    /// Constant density on `[a, b]` carrying `mass`.
    pub fn uniform(a: f64, b: f64, mass: f64) -> Self {
        let h = mass / (b - a);
        Segment::new(a, b, h, h)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn mass(&self) -> f64 {
        0.5 * self.width() * (self.f_a + self.f_b)
    }

    /// Density at `x`, extended linearly; callers clip to `[a, b]`.
    pub fn density_at(&self, x: f64) -> f64 {
        if x == self.a {
            return self.f_a;
        }
        if x == self.b {
            return self.f_b;
        }
        let t = (x - self.a) / self.width();
        self.f_a + (self.f_b - self.f_a) * t
    }

    /// Mass and first moment of the segment restricted to `[lo, hi]`.
    pub fn partial(&self, lo: f64, hi: f64) -> (f64, f64) {
        let u = lo.max(self.a);
        let v = hi.min(self.b);
        if !(u < v) {
            return (0.0, 0.0);
        }
        let gu = self.density_at(u);
        let gv = self.density_at(v);
        let w = v - u;
        let mass = 0.5 * w * (gu + gv);
        let moment = w / 6.0 * (gu * (2.0 * u + v) + gv * (u + 2.0 * v));
        (mass, moment)
    }
}

/// Exact mixed distribution of losses: atoms plus linear density segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossDistribution {
    atoms: Vec<(f64, f64)>,
    segments: Vec<Segment>,
}

impl LossDistribution {
    /// Validates and builds a loss distribution.
    ///
    /// Atoms at equal locations are merged and zero-mass atoms dropped.
    /// Segments must have `a < b`, nonnegative finite endpoint densities,
    /// and pairwise disjoint interiors. Total mass follows the same rule as
    /// [`Position::new`].
    pub fn new(atoms: Vec<(f64, f64)>, mut segments: Vec<Segment>) -> Result<Self> {
        for &(x, p) in &atoms {
            if !x.is_finite() || !p.is_finite() || p < 0.0 {
                return Err(RiskError::InvalidDistribution(format!(
                    "atom ({x}, {p}) needs a finite location and nonnegative mass"
                )));
            }
        }
        for s in &segments {
            let finite = [s.a, s.b, s.f_a, s.f_b].iter().all(|v| v.is_finite());
            if !finite || !(s.a < s.b) || s.f_a < 0.0 || s.f_b < 0.0 {
                return Err(RiskError::InvalidDistribution(format!(
                    "segment [{}, {}] with densities ({}, {}) needs a < b and nonnegative densities",
                    s.a, s.b, s.f_a, s.f_b
                )));
            }
        }
        segments.sort_by(|x, y| x.a.total_cmp(&y.a));
        for pair in segments.windows(2) {
            if pair[1].a < pair[0].b {
                return Err(RiskError::InvalidDistribution(format!(
                    "segments [{}, {}] and [{}, {}] overlap",
                    pair[0].a, pair[0].b, pair[1].a, pair[1].b
                )));
            }
        }
        let mut atoms: Vec<(f64, f64)> = merge_sorted(atoms)
            .into_iter()
            .filter(|a| a.1 > 0.0)
            .collect();
        let total = atoms.iter().map(|a| a.1).sum::<f64>()
            + segments.iter().map(Segment::mass).sum::<f64>();
        if let Some(total) = check_total(total)? {
            for a in &mut atoms {
                a.1 /= total;
            }
            for s in &mut segments {
                s.f_a /= total;
                s.f_b /= total;
            }
        }
        Ok(LossDistribution { atoms, segments })
    }

    /// A single point mass at loss `x`.
    pub fn point(x: f64) -> Self {
        LossDistribution {
            atoms: vec![(x, 1.0)],
            segments: Vec::new(),
        }
    }

    /// Atoms ascending by loss.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Segments ascending by left endpoint.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>()
            + self.segments.iter().map(Segment::mass).sum::<f64>()
    }

    /// `P(L ≤ x)`; atoms at `x` count fully.
    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .take_while(|a| a.0 <= x)
            .map(|a| a.1)
            .sum();
        let dens: f64 = self
            .segments
            .iter()
            .map(|s| s.partial(f64::NEG_INFINITY, x).0)
            .sum();
        (atoms + dens).min(1.0)
    }

    /// `P(L ≥ t)`; atoms at `t` count fully.
    pub fn upper_tail(&self, t: f64) -> f64 {
        self.partial_expectation(t, f64::INFINITY).0
    }

    /// Mass and first moment of the loss over `[lo, hi]`, both ends
    /// inclusive for atoms. Infinite bounds are allowed.
    pub fn partial_expectation(&self, lo: f64, hi: f64) -> (f64, f64) {
        if !(lo <= hi) {
            return (0.0, 0.0);
        }
        let mut mass = 0.0;
        let mut moment = 0.0;
        for &(x, p) in &self.atoms {
            if lo <= x && x <= hi {
                mass += p;
                moment += x * p;
            }
        }
        for s in &self.segments {
            let (m, fm) = s.partial(lo, hi);
            mass += m;
            moment += fm;
        }
        (mass, moment)
    }

    pub fn mean(&self) -> f64 {
        self.partial_expectation(f64::NEG_INFINITY, f64::INFINITY).1
    }

    /// Essential supremum of the loss: the largest loss carrying mass in
    /// every neighbourhood below it.
    pub fn max_loss(&self) -> f64 {
        let atom_max = self.atoms.last().map(|a| a.0);
        let seg_max = self
            .segments
            .iter()
            .rev()
            .find(|s| s.mass() > 0.0)
            .map(|s| s.b);
        match (atom_max, seg_max) {
            (Some(x), Some(y)) => x.max(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => f64::NAN,
        }
    }

    /// Essential infimum of the loss.
    pub fn min_loss(&self) -> f64 {
        let atom_min = self.atoms.first().map(|a| a.0);
        let seg_min = self.segments.iter().find(|s| s.mass() > 0.0).map(|s| s.a);
        match (atom_min, seg_min) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => f64::NAN,
        }
    }

    /// Right-limit of the density at `x` (left-limit at the last endpoint).
    pub fn density_at(&self, x: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.a <= x && x < s.b)
            .or_else(|| self.segments.iter().rev().find(|s| s.b == x))
            .map_or(0.0, |s| s.density_at(x))
    }

    /// Density limits `(f(x0+), f(x1-))` on an interval that contains no
    /// segment endpoint in its interior.
    fn density_on(&self, x0: f64, x1: f64) -> (f64, f64) {
        self.segments
            .iter()
            .find(|s| s.a <= x0 && x1 <= s.b)
            .map_or((0.0, 0.0), |s| (s.density_at(x0), s.density_at(x1)))
    }

    /// L1 distance between the continuous parts of two distributions,
    /// `∫ |f - g|`, computed exactly. Atoms are not included.
    pub fn density_l1_distance(&self, other: &LossDistribution) -> f64 {
        let mut knots: Vec<f64> = self
            .segments
            .iter()
            .chain(other.segments.iter())
            .flat_map(|s| [s.a, s.b])
            .collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let mut total = 0.0;
        for w in knots.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let (f0, f1) = self.density_on(x0, x1);
            let (g0, g1) = other.density_on(x0, x1);
            let (d0, d1) = (f0 - g0, f1 - g1);
            let width = x1 - x0;
            total += if d0 * d1 >= 0.0 {
                0.5 * width * (d0.abs() + d1.abs())
            } else {
                0.5 * width * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs())
            };
        }
        total
    }

    /// The α-quantile of the P&L `X = -L` under the given convention.
    pub fn quantile(&self, alpha: f64, convention: QuantileConvention) -> Result<f64> {
        Ok(unsigned_zero(-self.var_threshold(alpha, convention)?))
    }

    /// The loss level `-q_α(X)`, found by walking the upper tail
    /// `S(t) = P(L ≥ t)` down from the top of the support.
    ///
    /// Smallest convention: `sup{t : S(t) ≥ 1-α}`.
    /// Largest convention: `sup{t : S(t) > 1-α}`.
    pub(crate) fn var_threshold(&self, alpha: f64, convention: QuantileConvention) -> Result<f64> {
        check_level(alpha)?;
        let target = 1.0 - alpha;
        let reached = |s: f64| match convention {
            QuantileConvention::Smallest => s >= target - PROBABILITY_TOLERANCE,
            QuantileConvention::Largest => s > target + PROBABILITY_TOLERANCE,
        };

        let mut knots: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| a.0)
            .chain(self.segments.iter().flat_map(|s| [s.a, s.b]))
            .collect();
        knots.sort_by(|x, y| y.total_cmp(x));
        knots.dedup();

        // Mass strictly above the current knot.
        let mut above = 0.0;
        let mut prev: Option<f64> = None;
        let mut atoms = self.atoms.iter().rev().peekable();
        for z in knots {
            if let Some(top) = prev {
                let (lo_density, hi_density) = self.density_on(z, top);
                let band = 0.5 * (top - z) * (lo_density + hi_density);
                if band > 0.0 && reached(above + band) {
                    if convention == QuantileConvention::Smallest
                        && (above + band - target).abs() <= PROBABILITY_TOLERANCE
                    {
                        return Ok(z);
                    }
                    let need = (target - above).max(0.0);
                    return Ok(solve_upper_mass(z, top, lo_density, hi_density, need));
                }
                above += band;
            }
            while let Some(&&(x, p)) = atoms.peek() {
                if x < z {
                    break;
                }
                above += p;
                atoms.next();
            }
            if reached(above) {
                return Ok(z);
            }
            prev = Some(z);
        }
        Err(RiskError::DegenerateSupport(alpha))
    }
}

/// The point `t` in `[lo, hi]` with `∫_t^hi f = need`, where `f` is linear
/// from `f_lo` to `f_hi`.
fn solve_upper_mass(lo: f64, hi: f64, f_lo: f64, f_hi: f64, need: f64) -> f64 {
    if need <= 0.0 {
        return hi;
    }
    // With w = hi - t: f_hi·w - slope·w²/2 = need.
    let slope = (f_hi - f_lo) / (hi - lo);
    let disc = (f_hi * f_hi - 2.0 * slope * need).max(0.0);
    let denom = f_hi + disc.sqrt();
    let w = if denom > 0.0 { 2.0 * need / denom } else { 0.0 };
    (hi - w).clamp(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn asset_one() -> Position {
        Position::new(vec![(2e6, 0.95), (-1e6, 0.05)]).unwrap()
    }

    fn uniform_tail_0_5() -> LossDistribution {
        LossDistribution::new(vec![(-1.0, 0.95)], vec![Segment::uniform(0.0, 5.0, 0.05)]).unwrap()
    }

    /// Midpoint-rule integral of `x^k f(x)` over `[lo, hi]`, used as an
    /// independent check on the closed forms.
    fn numeric_moment(l: &LossDistribution, lo: f64, hi: f64, k: i32) -> f64 {
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        (0..n)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * h;
                x.powi(k) * l.density_at(x) * h
            })
            .sum()
    }

    #[test]
    fn canonicalize_merges_duplicates() {
        let p = Position::new(vec![(0.0, 0.5), (0.0, 0.5)]).unwrap();
        assert_eq!(p.outcomes(), &[(0.0, 1.0)]);
    }

    #[test]
    fn canonicalize_sorts_ascending() {
        assert_eq!(asset_one().outcomes(), &[(-1e6, 0.05), (2e6, 0.95)]);
    }

    #[test]
    fn canonicalize_rejects_bad_mass() {
        let err = Position::new(vec![(1.0, 0.3), (2.0, 0.8)]).unwrap_err();
        assert!(matches!(err, RiskError::Mass { .. }));
        assert!(Position::new(vec![]).is_err());
        assert!(Position::new(vec![(1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn canonicalize_renormalizes_small_drift() {
        let p = Position::new(vec![(1.0, 0.5 + 5e-11), (2.0, 0.5)]).unwrap();
        let total: f64 = p.outcomes().iter().map(|o| o.1).sum();
        assert!((total - 1.0).abs() <= MASS_TOLERANCE);
    }

    #[test]
    fn to_loss_negates() {
        let l = asset_one().to_loss();
        assert_eq!(l.atoms(), &[(-2e6, 0.95), (1e6, 0.05)]);
        assert!(l.segments().is_empty());
        assert_eq!(Position::sure(0.0).to_loss().atoms(), &[(-0.0, 1.0)]);
    }

    #[test]
    fn cdf_of_uniform_tail() {
        let l = uniform_tail_0_5();
        assert!((l.cdf(2.5) - 0.975).abs() < 1e-12);
        assert_eq!(l.cdf(-1.5), 0.0);
        assert!((l.cdf(5.0) - 1.0).abs() < 1e-12);
        assert!((l.cdf(-1.0) - 0.95).abs() < 1e-12);
        // numeric oracle for the density part
        let numeric = 0.95 + numeric_moment(&l, 0.0, 2.5, 0);
        assert!((l.cdf(2.5) - numeric).abs() < 1e-9);
    }

    #[test]
    fn quantile_conventions_diverge_on_exact_tail_atom() {
        let p = asset_one();
        assert_eq!(
            p.quantile(0.95, QuantileConvention::Smallest).unwrap(),
            -1e6
        );
        assert_eq!(p.quantile(0.95, QuantileConvention::Largest).unwrap(), 2e6);
        let l = p.to_loss();
        assert_eq!(
            l.quantile(0.95, QuantileConvention::Smallest).unwrap(),
            -1e6
        );
        assert_eq!(l.quantile(0.95, QuantileConvention::Largest).unwrap(), 2e6);
    }

    #[test]
    fn quantile_of_single_loan_is_zero() {
        let loan = Position::new(vec![(0.0, 0.96), (-2e6, 0.04)]).unwrap();
        for conv in [QuantileConvention::Smallest, QuantileConvention::Largest] {
            assert_eq!(loan.quantile(0.95, conv).unwrap(), 0.0);
            assert_eq!(loan.to_loss().quantile(0.95, conv).unwrap(), 0.0);
        }
    }

    #[test]
    fn quantile_rejects_bad_levels() {
        assert!(matches!(
            asset_one().quantile(1.0, QuantileConvention::Smallest),
            Err(RiskError::Level(_))
        ));
        assert!(uniform_tail_0_5()
            .quantile(0.0, QuantileConvention::Largest)
            .is_err());
    }

    #[test]
    fn quantile_inside_segment() {
        let l = uniform_tail_0_5();
        assert_eq!(l.quantile(0.95, QuantileConvention::Smallest).unwrap(), 0.0);
        assert!((l.quantile(0.99, QuantileConvention::Smallest).unwrap() + 4.0).abs() < 1e-12);
        // the body atom sits at loss -1, so the largest quantile jumps there
        assert_eq!(l.quantile(0.95, QuantileConvention::Largest).unwrap(), 1.0);
        // decreasing triangle on [0, 10]: S(t) = 0.05 (1 - t/10)^2
        let tri =
            LossDistribution::new(vec![(-1.0, 0.95)], vec![Segment::new(0.0, 10.0, 0.01, 0.0)])
                .unwrap();
        let t = -tri.quantile(0.99, QuantileConvention::Smallest).unwrap();
        let expected = 10.0 * (1.0 - (0.2f64).sqrt());
        assert!((t - expected).abs() < 1e-9, "{t} vs {expected}");
    }

    #[test]
    fn independent_sum_of_two_loans() {
        let loan = Position::new(vec![(0.0, 0.96), (-1e6, 0.04)]).unwrap();
        let both = loan.independent_sum(&loan).unwrap();
        assert_eq!(
            both.outcomes(),
            &[(-2e6, 0.0016), (-1e6, 0.0768), (0.0, 0.9216)]
        );
        assert_eq!(loan.independent_sum(&Position::sure(0.0)).unwrap(), loan);
        let coin = Position::new(vec![(1.0, 0.5), (-1.0, 0.5)]).unwrap();
        assert_eq!(
            coin.independent_sum(&coin).unwrap().outcomes(),
            &[(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]
        );
    }

    #[test]
    fn independent_sum_respects_cap() {
        let coin = Position::new(vec![(1.0, 0.5), (-1.0, 0.5)]).unwrap();
        let err = coin.independent_sum_capped(&coin, 3).unwrap_err();
        assert_eq!(
            err,
            RiskError::Size {
                outcomes: 4,
                cap: 3
            }
        );
    }

    #[test]
    fn scale_and_shift() {
        assert_eq!(asset_one().scale(0.0).unwrap(), Position::sure(0.0));
        assert_eq!(
            asset_one().scale(2.0).unwrap().outcomes(),
            &[(-2e6, 0.05), (4e6, 0.95)]
        );
        assert!(matches!(
            asset_one().scale(-1.0),
            Err(RiskError::NegativeScale(_))
        ));
        assert_eq!(
            asset_one().shift(1e6).outcomes(),
            &[(0.0, 0.05), (3e6, 0.95)]
        );
    }

    #[test]
    fn partial_expectation_closed_forms() {
        let l = uniform_tail_0_5();
        let (m, fm) = l.partial_expectation(0.0, 5.0);
        assert!((m - 0.05).abs() < 1e-15);
        assert!((fm - 0.125).abs() < 1e-15);
        assert!((fm - numeric_moment(&l, 0.0, 5.0, 1)).abs() < 1e-9);
        assert_eq!(l.partial_expectation(3.0, 2.0), (0.0, 0.0));
        assert_eq!(l.partial_expectation(6.0, 9.0), (0.0, 0.0));

        let tri =
            LossDistribution::new(vec![(-1.0, 0.95)], vec![Segment::new(0.0, 10.0, 0.01, 0.0)])
                .unwrap();
        let (m, fm) = tri.partial_expectation(0.0, 10.0);
        assert!((fm / m - 10.0 / 3.0).abs() < 1e-12);
        assert!((fm - numeric_moment(&tri, 0.0, 10.0, 1)).abs() < 1e-9);
    }

    #[test]
    fn atoms_at_segment_endpoints_count_in_cdf() {
        let l =
            LossDistribution::new(vec![(0.0, 0.5)], vec![Segment::uniform(0.0, 1.0, 0.5)]).unwrap();
        assert!((l.cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((l.upper_tail(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn loss_distribution_validation() {
        assert!(LossDistribution::new(vec![(0.0, 0.5)], vec![]).is_err());
        assert!(LossDistribution::new(vec![], vec![Segment::new(1.0, 1.0, 1.0, 1.0)]).is_err());
        assert!(LossDistribution::new(
            vec![],
            vec![
                Segment::uniform(0.0, 2.0, 0.5),
                Segment::uniform(1.0, 3.0, 0.5)
            ]
        )
        .is_err());
        assert!(LossDistribution::new(vec![], vec![Segment::new(0.0, 1.0, -1.0, 3.0)]).is_err());
    }

    #[test]
    fn max_loss_is_essential_supremum() {
        let l = LossDistribution::new(
            vec![(-1.0, 0.95)],
            vec![
                Segment::uniform(0.0, 5.0, 0.05),
                Segment::new(5.0, 7.0, 0.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(l.max_loss(), 5.0);
        assert_eq!(l.min_loss(), -1.0);
        assert_eq!(Position::sure(3.0).to_loss().max_loss(), -3.0);
    }

    #[test]
    fn l1_distance_exact() {
        let a = uniform_tail_0_5();
        let b = LossDistribution::new(vec![(-1.0, 0.95)], vec![Segment::new(0.0, 5.0, 0.02, 0.0)])
            .unwrap();
        // |0.01 - (0.02 - 0.004 x)| crosses zero at x = 2.5: two triangles of
        // base 2.5 and height 0.01.
        assert!((a.density_l1_distance(&b) - 0.025).abs() < 1e-15);
        assert_eq!(a.density_l1_distance(&a), 0.0);
    }

    fn arb_position() -> impl Strategy<Value = Position> {
        prop::collection::vec((-50i32..50, 1u32..20), 1..8).prop_map(|raw| {
            let total: u32 = raw.iter().map(|r| r.1).sum();
            Position::new(
                raw.into_iter()
                    .map(|(x, w)| (x as f64 * 0.5, w as f64 / total as f64))
                    .collect(),
            )
            .unwrap()
        })
    }

    fn arb_level() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.5), Just(0.9), Just(0.95), Just(0.99), 0.01f64..0.99]
    }

    proptest! {
        #[test]
        fn smallest_never_exceeds_largest(p in arb_position(), alpha in arb_level()) {
            let lo = p.quantile(alpha, QuantileConvention::Smallest).unwrap();
            let hi = p.quantile(alpha, QuantileConvention::Largest).unwrap();
            prop_assert!(lo <= hi);
        }

        #[test]
        fn quantile_brackets_every_alpha_quantile(p in arb_position(), alpha in arb_level()) {
            let lo = p.quantile(alpha, QuantileConvention::Smallest).unwrap();
            let hi = p.quantile(alpha, QuantileConvention::Largest).unwrap();
            let target = 1.0 - alpha;
            for &(q, _) in p.outcomes() {
                let below: f64 = p.outcomes().iter().filter(|o| o.0 < q).map(|o| o.1).sum();
                let at_or_below = p.cdf(q);
                let is_quantile = below <= target + PROBABILITY_TOLERANCE
                    && target - PROBABILITY_TOLERANCE <= at_or_below;
                prop_assert_eq!(is_quantile, lo <= q && q <= hi, "q={}", q);
            }
        }

        #[test]
        fn loss_route_matches_position_route(p in arb_position(), alpha in arb_level()) {
            for conv in [QuantileConvention::Smallest, QuantileConvention::Largest] {
                prop_assert_eq!(
                    p.quantile(alpha, conv).unwrap(),
                    p.to_loss().quantile(alpha, conv).unwrap()
                );
            }
        }

        #[test]
        fn quantile_equivariance(p in arb_position(), alpha in arb_level(),
                                 lambda in 0.1f64..10.0, a in -100.0f64..100.0) {
            for conv in [QuantileConvention::Smallest, QuantileConvention::Largest] {
                let q = p.quantile(alpha, conv).unwrap();
                prop_assert_eq!(p.scale(lambda).unwrap().quantile(alpha, conv).unwrap(), q * lambda);
                prop_assert_eq!(p.shift(a).quantile(alpha, conv).unwrap(), q + a);
            }
        }

        #[test]
        fn convolution_commutes_and_keeps_mass(p in arb_position(), q in arb_position(), r in arb_position()) {
            let pq = p.independent_sum(&q).unwrap();
            let qp = q.independent_sum(&p).unwrap();
            prop_assert_eq!(pq.len(), qp.len());
            for (x, y) in pq.outcomes().iter().zip(qp.outcomes()) {
                prop_assert_eq!(x.0, y.0);
                prop_assert!((x.1 - y.1).abs() < 1e-15);
            }
            let left = pq.independent_sum(&r).unwrap();
            let right = p.independent_sum(&q.independent_sum(&r).unwrap()).unwrap();
            prop_assert_eq!(left.len(), right.len());
            for (x, y) in left.outcomes().iter().zip(right.outcomes()) {
                prop_assert_eq!(x.0, y.0);
                prop_assert!((x.1 - y.1).abs() < 1e-14);
            }
            let total: f64 = left.outcomes().iter().map(|o| o.1).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn cdf_is_monotone(p in arb_position(), xs in prop::collection::vec(-30.0f64..30.0, 2..10)) {
            let l = p.to_loss();
            let mut xs = xs;
            xs.sort_by(f64::total_cmp);
            for w in xs.windows(2) {
                prop_assert!(l.cdf(w[0]) <= l.cdf(w[1]));
            }
            prop_assert_eq!(l.cdf(l.min_loss() - 1.0), 0.0);
            prop_assert!((l.cdf(l.max_loss()) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn full_partial_expectation_is_mass_and_mean(p in arb_position()) {
            let l = p.to_loss();
            let (m, fm) = l.partial_expectation(f64::NEG_INFINITY, f64::INFINITY);
            prop_assert!((m - 1.0).abs() < 1e-12);
            prop_assert!((fm - l.mean()).abs() < 1e-12);
            prop_assert!((l.mean() + p.mean()).abs() < 1e-9);
        }
    }
}
