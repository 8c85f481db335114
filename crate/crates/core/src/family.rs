//! Tail shapes on `[c, d]` and families of distinct loss distributions that
//! share an entire measure vector.
//!
//! Every distribution built here puts its body mass (`level`) on a single
//! atom below `c` and spreads the tail mass `1 - level` over `[c, d]` with a
//! piecewise-linear density. Only the tail matters for VaR, TCE and ML at
//! levels `≥ level`, so the atom's position is irrelevant as long as it
//! stays below `c`.

use serde::{Deserialize, Serialize};

use crate::distributions::{check_level, LossDistribution, Segment};
use crate::error::{Result, RiskError};
use crate::measures::{measure_vector, percent};

/// A nested tail: from `start` on, the remaining mass is `1 - level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerStart {
    pub level: f64,
    pub start: f64,
}

/// The tail region `[c, d]` carrying mass `1 - level`, optionally split by
/// nested starting points for higher levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    pub c: f64,
    pub d: f64,
    pub level: f64,
    #[serde(default)]
    pub inner: Vec<InnerStart>,
    /// Distance of the body atom below `c`.
    #[serde(default = "default_body_offset")]
    pub body_offset: f64,
}

fn default_body_offset() -> f64 {
    1.0
}

impl TailSpec {
    pub fn new(c: f64, d: f64, level: f64) -> Result<Self> {
        let spec = TailSpec {
            c,
            d,
            level,
            inner: Vec::new(),
            body_offset: default_body_offset(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Adds a nested tail starting at `start` for `level`.
    pub fn with_inner(mut self, level: f64, start: f64) -> Result<Self> {
        self.inner.push(InnerStart { level, start });
        self.inner.sort_by(|a, b| a.level.total_cmp(&b.level));
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let spec_err = |msg: String| Err(RiskError::Spec(msg));
        if !(self.c.is_finite() && self.d.is_finite() && self.c < self.d) {
            return spec_err(format!("need c < d, got c = {}, d = {}", self.c, self.d));
        }
        if check_level(self.level).is_err() {
            return spec_err(format!("level {} outside (0, 1)", self.level));
        }
        if !(self.body_offset > 0.0 && self.body_offset.is_finite()) {
            return spec_err(format!("body offset {} must be positive", self.body_offset));
        }
        let (mut prev_level, mut prev_start) = (self.level, self.c);
        for inner in &self.inner {
            if !(inner.level > prev_level && inner.level < 1.0) {
                return spec_err(format!(
                    "inner level {} must exceed {} and stay below 1",
                    inner.level, prev_level
                ));
            }
            if !(inner.start > prev_start && inner.start < self.d) {
                return spec_err(format!(
                    "inner start {} must lie strictly between {} and d = {}",
                    inner.start, prev_start, self.d
                ));
            }
            prev_level = inner.level;
            prev_start = inner.start;
        }
        Ok(())
    }

    /// All levels of the spec, outermost first.
    pub fn levels(&self) -> Vec<f64> {
        std::iter::once(self.level)
            .chain(self.inner.iter().map(|i| i.level))
            .collect()
    }

    /// The bands between consecutive starting points and the mass each
    /// one carries.
    pub fn bands(&self) -> Vec<Band> {
        let starts: Vec<(f64, f64)> = std::iter::once((self.level, self.c))
            .chain(self.inner.iter().map(|i| (i.level, i.start)))
            .collect();
        starts
            .iter()
            .enumerate()
            .map(|(k, &(level, lo))| {
                let (next_level, hi) = starts.get(k + 1).copied().unwrap_or((1.0, self.d));
                Band {
                    lo,
                    hi,
                    mass: next_level - level,
                }
            })
            .collect()
    }

    fn body_atom(&self) -> (f64, f64) {
        (self.c - self.body_offset, self.level)
    }
}

/// A stretch `[lo, hi]` of the tail with constant base density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

impl Band {
    pub fn density(&self) -> f64 {
        self.mass / (self.hi - self.lo)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Piecewise-constant tail: each band of `spec` gets its mass spread
/// uniformly. Without inner starts this is the plain uniform tail on
/// `[c, d]`, with `VaR = c`, `TCE = (c + d) / 2` and `ML = d`.
pub fn uniform_tail(spec: &TailSpec) -> Result<LossDistribution> {
    spec.validate()?;
    let segments = spec
        .bands()
        .iter()
        .map(|b| Segment::uniform(b.lo, b.hi, b.mass))
        .collect();
    LossDistribution::new(vec![spec.body_atom()], segments)
}

/// Triangular tail on `[c, d]` with its peak at `apex`; the density is zero
/// at whichever endpoints differ from the apex. The tail centroid, and so
/// the TCE at the spec level, is `(c + d + apex) / 3`.
pub fn triangular_tail(spec: &TailSpec, apex: f64) -> Result<LossDistribution> {
    spec.validate()?;
    if !spec.inner.is_empty() {
        return Err(RiskError::Spec(
            "triangular tails take a single level; drop the inner starts".into(),
        ));
    }
    if !(spec.c <= apex && apex <= spec.d) {
        return Err(RiskError::Spec(format!(
            "apex {apex} outside [{}, {}]",
            spec.c, spec.d
        )));
    }
    let peak = 2.0 * (1.0 - spec.level) / (spec.d - spec.c);
    let mut segments = Vec::with_capacity(2);
    if apex > spec.c {
        segments.push(Segment::new(spec.c, apex, 0.0, peak));
    }
    if apex < spec.d {
        segments.push(Segment::new(apex, spec.d, peak, 0.0));
    }
    LossDistribution::new(vec![spec.body_atom()], segments)
}

/// Knobs of [`indistinguishable_family_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyOptions {
    /// Highest zigzag order tried per band.
    pub max_order: usize,
    /// Perturbation amplitude as a fraction of the band's base density.
    /// Must stay in `(0, 1)` to keep densities positive.
    pub amplitude: f64,
    /// Smallest pairwise L1 density distance accepted between members.
    pub min_separation: f64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            max_order: 16,
            amplitude: 0.5,
            min_separation: 1e-3,
        }
    }
}

/// A zero-mass bump pattern laid over one band.
///
/// On each half of the band (measured from the midpoint) there are
/// `2 * order` equal tents of alternating sign, mirrored onto the other half.
/// Mirror symmetry about the midpoint plus zero mass gives zero first
/// moment, so the band's mass and centroid are untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Perturbation {
    pub band: usize,
    pub order: usize,
    pub positive: bool,
}

impl Perturbation {
    /// Segments replacing the uniform band `band` of density `base`.
    fn segments(&self, band: &Band, base: f64, amplitude: f64) -> Vec<Segment> {
        let quarter_steps = 4 * self.order;
        let half = 0.5 * (band.hi - band.lo);
        let mid = band.midpoint();
        let sign = if self.positive { 1.0 } else { -1.0 };
        // Shape value at y = k / quarter_steps along one half.
        let shape = |k: usize| -> f64 {
            if k % 2 == 0 {
                0.0
            } else if (k / 2) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(2 * quarter_steps + 1);
        for k in (1..=quarter_steps).rev() {
            let x = if k == quarter_steps {
                band.lo
            } else {
                mid - half * k as f64 / quarter_steps as f64
            };
            knots.push((x, shape(k)));
        }
        knots.push((mid, 0.0));
        for k in 1..=quarter_steps {
            let x = if k == quarter_steps {
                band.hi
            } else {
                mid + half * k as f64 / quarter_steps as f64
            };
            knots.push((x, shape(k)));
        }
        let density = |s: f64| base * (1.0 + sign * amplitude * s);
        knots
            .windows(2)
            .map(|w| Segment::new(w[0].0, w[1].0, density(w[0].1), density(w[1].1)))
            .collect()
    }
}

/// Applies `perturbation` to the banded uniform tail of `spec`.
pub fn perturbed_tail(
    spec: &TailSpec,
    perturbation: Perturbation,
    amplitude: f64,
) -> Result<LossDistribution> {
    spec.validate()?;
    if !(amplitude > 0.0 && amplitude < 1.0) {
        return Err(RiskError::Spec(format!(
            "perturbation amplitude {amplitude} must lie in (0, 1)"
        )));
    }
    let bands = spec.bands();
    if perturbation.band >= bands.len() || perturbation.order == 0 {
        return Err(RiskError::Spec(format!(
            "no band {} with order {} in this spec",
            perturbation.band, perturbation.order
        )));
    }
    let mut segments = Vec::new();
    for (k, band) in bands.iter().enumerate() {
        if k == perturbation.band {
            segments.extend(perturbation.segments(band, band.density(), amplitude));
        } else {
            segments.push(Segment::uniform(band.lo, band.hi, band.mass));
        }
    }
    LossDistribution::new(vec![spec.body_atom()], segments)
}

/// `n` distinct distributions sharing VaR and TCE at every level of `spec`
/// and the maximum loss, using [`FamilyOptions::default`].
pub fn indistinguishable_family(spec: &TailSpec, n: usize) -> Result<Vec<LossDistribution>> {
    indistinguishable_family_with(spec, n, &FamilyOptions::default())
}

/// The first member is [`uniform_tail`]; each further member perturbs one
/// band with a [`Perturbation`], cycling through bands, signs and orders.
pub fn indistinguishable_family_with(
    spec: &TailSpec,
    n: usize,
    options: &FamilyOptions,
) -> Result<Vec<LossDistribution>> {
    spec.validate()?;
    if n == 0 {
        return Err(RiskError::Spec("a family needs at least one member".into()));
    }
    let bands = spec.bands().len();
    let available = 1 + options.max_order * bands * 2;
    if n > available {
        return Err(RiskError::Capacity {
            requested: n,
            available,
        });
    }
    let candidates = (1..=options.max_order).flat_map(|order| {
        (0..bands).flat_map(move |band| {
            [true, false].map(|positive| Perturbation {
                band,
                order,
                positive,
            })
        })
    });
    let mut members = vec![uniform_tail(spec)?];
    for perturbation in candidates.take(n - 1) {
        let member = perturbed_tail(spec, perturbation, options.amplitude)?;
        let too_close = members
            .iter()
            .any(|m| m.density_l1_distance(&member) < options.min_separation);
        if too_close {
            return Err(RiskError::Capacity {
                requested: n,
                available: members.len(),
            });
        }
        members.push(member);
    }
    Ok(members)
}

/// Smallest L1 density distance over all pairs of `members`.
pub fn min_pairwise_l1(members: &[LossDistribution]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            best = best.min(a.density_l1_distance(b));
        }
    }
    best
}

pub const DEFAULT_EQUALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationRow {
    pub measure: String,
    pub first: f64,
    pub second: f64,
    pub equal: bool,
}

/// Measure-by-measure comparison of two distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationReport {
    pub tolerance: f64,
    pub rows: Vec<DiscriminationRow>,
}

impl DiscriminationReport {
    pub fn all_equal(&self) -> bool {
        self.rows.iter().all(|r| r.equal)
    }

    /// Names of the measures that tell the two distributions apart.
    pub fn distinguishing(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| !r.equal)
            .map(|r| r.measure.as_str())
            .collect()
    }

    pub fn row(&self, measure: &str) -> Option<&DiscriminationRow> {
        self.rows.iter().find(|r| r.measure == measure)
    }
}

pub fn discriminate(
    first: &LossDistribution,
    second: &LossDistribution,
    levels: &[f64],
) -> Result<DiscriminationReport> {
    discriminate_with(first, second, levels, DEFAULT_EQUALITY_TOLERANCE)
}

pub fn discriminate_with(
    first: &LossDistribution,
    second: &LossDistribution,
    levels: &[f64],
    tolerance: f64,
) -> Result<DiscriminationReport> {
    let a = measure_vector(first, levels)?;
    let b = measure_vector(second, levels)?;
    let rows = a
        .named_values()
        .into_iter()
        .zip(b.named_values())
        .map(|((measure, x), (_, y))| DiscriminationRow {
            measure,
            first: x,
            second: y,
            equal: (x - y).abs() <= tolerance,
        })
        .collect();
    Ok(DiscriminationReport { tolerance, rows })
}

/// Column label used by reports for a level, e.g. `"95%"`.
pub fn level_label(level: f64) -> String {
    percent(level)
}
