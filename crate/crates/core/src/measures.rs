//! Value at Risk, tail conditional expectation, maximum loss, measure
//! vectors and scenario-based measures.
//!
//! Sign conventions: `VaR_α(X) = -q_α(X)` where `q_α` is the α-quantile of
//! the P&L `X`, and `TCE_α(X) = -E[X | X ≤ -VaR_α(X)]`. The conditioning
//! event keeps the full mass of a boundary atom, so on atomic
//! distributions it may carry more than `1 - α` of probability.

use serde::{Deserialize, Serialize};

use crate::distributions::{
    check_level, unsigned_zero, LossDistribution, Position, QuantileConvention,
    INPUT_MASS_TOLERANCE, MASS_TOLERANCE,
};
use crate::error::{Result, RiskError};

/// Relative slack for comparing measure values.
pub const VALUE_TOLERANCE: f64 = 1e-9;

/// `a ≤ b` up to [`VALUE_TOLERANCE`] scaled by the operands' magnitude.
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + VALUE_TOLERANCE * 1f64.max(a.abs()).max(b.abs())
}

pub fn approx_eq(a: f64, b: f64, tolerance: f64) -> bool {
    (a - b).abs() <= tolerance * 1f64.max(a.abs()).max(b.abs())
}

/// Anything the three distribution-based measures can be evaluated on.
pub trait TailModel {
    /// `VaR_α` under the given quantile convention.
    fn value_at_risk(&self, alpha: f64, convention: QuantileConvention) -> Result<f64>;
    /// Mass and first loss moment of the event `{L ≥ threshold}`.
    fn upper_tail_moments(&self, threshold: f64) -> (f64, f64);
    /// Essential supremum of the loss.
    fn maximum_loss(&self) -> f64;
}

impl TailModel for Position {
    fn value_at_risk(&self, alpha: f64, convention: QuantileConvention) -> Result<f64> {
        Ok(unsigned_zero(-self.quantile(alpha, convention)?))
    }

    fn upper_tail_moments(&self, threshold: f64) -> (f64, f64) {
        self.outcomes()
            .iter()
            .take_while(|o| -o.0 >= threshold)
            .fold((0.0, 0.0), |(m, fm), &(x, p)| (m + p, fm - x * p))
    }

    fn maximum_loss(&self) -> f64 {
        unsigned_zero(-self.min_payoff())
    }
}

impl TailModel for LossDistribution {
    fn value_at_risk(&self, alpha: f64, convention: QuantileConvention) -> Result<f64> {
        Ok(unsigned_zero(self.var_threshold(alpha, convention)?))
    }

    fn upper_tail_moments(&self, threshold: f64) -> (f64, f64) {
        self.partial_expectation(threshold, f64::INFINITY)
    }

    fn maximum_loss(&self) -> f64 {
        self.max_loss()
    }
}

/// `VaR_α` under the smallest-quantile convention.
pub fn var<T: TailModel + ?Sized>(x: &T, alpha: f64) -> Result<f64> {
    x.value_at_risk(alpha, QuantileConvention::Smallest)
}

pub fn var_with<T: TailModel + ?Sized>(
    x: &T,
    alpha: f64,
    convention: QuantileConvention,
) -> Result<f64> {
    x.value_at_risk(alpha, convention)
}

/// A position is α-VaR acceptable when its VaR is at most zero.
pub fn is_var_acceptable<T: TailModel + ?Sized>(x: &T, alpha: f64) -> Result<bool> {
    Ok(var(x, alpha)? <= 0.0)
}

/// `TCE_α` under the smallest-quantile convention.
pub fn tce<T: TailModel + ?Sized>(x: &T, alpha: f64) -> Result<f64> {
    tce_with(x, alpha, QuantileConvention::Smallest)
}

pub fn tce_with<T: TailModel + ?Sized>(
    x: &T,
    alpha: f64,
    convention: QuantileConvention,
) -> Result<f64> {
    let threshold = x.value_at_risk(alpha, convention)?;
    let (mass, moment) = x.upper_tail_moments(threshold);
    if !(mass > 0.0) {
        return Err(RiskError::EmptyTail(alpha));
    }
    Ok(unsigned_zero(moment / mass))
}

pub fn max_loss<T: TailModel + ?Sized>(x: &T) -> f64 {
    x.maximum_loss()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub level: f64,
    pub var: f64,
    pub tce: f64,
}

/// VaR and TCE at several confidence levels plus the maximum loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureVector {
    entries: Vec<MeasureEntry>,
    max_loss: f64,
}

impl MeasureVector {
    /// Checks that levels increase strictly inside `(0, 1)` and that
    /// `var ≤ tce ≤ max_loss` holds for every entry.
    pub fn new(entries: Vec<MeasureEntry>, max_loss: f64) -> Result<Self> {
        for e in &entries {
            check_level(e.level)?;
            if !approx_le(e.var, e.tce) || !approx_le(e.tce, max_loss) {
                return Err(RiskError::MeasureVector(format!(
                    "at level {} expected var {} <= tce {} <= max loss {}",
                    e.level, e.var, e.tce, max_loss
                )));
            }
        }
        if entries.windows(2).any(|w| !(w[0].level < w[1].level)) {
            return Err(RiskError::MeasureVector(
                "levels must be strictly increasing".into(),
            ));
        }
        Ok(MeasureVector { entries, max_loss })
    }

    pub fn entries(&self) -> &[MeasureEntry] {
        &self.entries
    }

    pub fn max_loss(&self) -> f64 {
        self.max_loss
    }

    pub fn entry(&self, level: f64) -> Option<&MeasureEntry> {
        self.entries.iter().find(|e| e.level == level)
    }

    /// Flattened `(name, value)` pairs: VaR and TCE per level, then ML.
    pub fn named_values(&self) -> Vec<(String, f64)> {
        let mut out = Vec::with_capacity(2 * self.entries.len() + 1);
        for e in &self.entries {
            out.push((format!("VaR {}", percent(e.level)), e.var));
        }
        for e in &self.entries {
            out.push((format!("TCE {}", percent(e.level)), e.tce));
        }
        out.push(("ML".to_string(), self.max_loss));
        out
    }
}

pub(crate) fn percent(level: f64) -> String {
    let p = level * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}%", p.round())
    } else {
        format!("{}%", p)
    }
}

/// Measure vector at `levels` using the smallest-quantile convention.
pub fn measure_vector<T: TailModel + ?Sized>(x: &T, levels: &[f64]) -> Result<MeasureVector> {
    measure_vector_with(x, levels, QuantileConvention::Smallest)
}

pub fn measure_vector_with<T: TailModel + ?Sized>(
    x: &T,
    levels: &[f64],
    convention: QuantileConvention,
) -> Result<MeasureVector> {
    let entries = levels
        .iter()
        .map(|&level| {
            Ok(MeasureEntry {
                level,
                var: var_with(x, level, convention)?,
                tce: tce_with(x, level, convention)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MeasureVector::new(entries, max_loss(x))
}

/// A risk measure evaluated on positions of type `P`.
///
/// Implementations must be free of side effects; the coherence checks call
/// them repeatedly and compare results.
pub trait RiskMeasure<P: ?Sized> {
    fn evaluate(&self, position: &P) -> Result<f64>;

    fn name(&self) -> String {
        "custom".to_string()
    }
}

impl<P: ?Sized, F> RiskMeasure<P> for F
where
    F: Fn(&P) -> f64,
{
    fn evaluate(&self, position: &P) -> Result<f64> {
        Ok(self(position))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueAtRisk {
    pub level: f64,
    pub convention: QuantileConvention,
}

impl ValueAtRisk {
    pub fn new(level: f64) -> Self {
        ValueAtRisk {
            level,
            convention: QuantileConvention::Smallest,
        }
    }
}

impl<T: TailModel> RiskMeasure<T> for ValueAtRisk {
    fn evaluate(&self, position: &T) -> Result<f64> {
        var_with(position, self.level, self.convention)
    }

    fn name(&self) -> String {
        format!("VaR {}", percent(self.level))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConditionalExpectation {
    pub level: f64,
    pub convention: QuantileConvention,
}

impl TailConditionalExpectation {
    pub fn new(level: f64) -> Self {
        TailConditionalExpectation {
            level,
            convention: QuantileConvention::Smallest,
        }
    }
}

impl<T: TailModel> RiskMeasure<T> for TailConditionalExpectation {
    fn evaluate(&self, position: &T) -> Result<f64> {
        tce_with(position, self.level, self.convention)
    }

    fn name(&self) -> String {
        format!("TCE {}", percent(self.level))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MaxLoss;

impl<T: TailModel> RiskMeasure<T> for MaxLoss {
    fn evaluate(&self, position: &T) -> Result<f64> {
        Ok(max_loss(position))
    }

    fn name(&self) -> String {
        "ML".to_string()
    }
}

/// `-E[X]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExpectedLoss;

impl RiskMeasure<Position> for ExpectedLoss {
    fn evaluate(&self, position: &Position) -> Result<f64> {
        Ok(unsigned_zero(-position.mean()))
    }

    fn name(&self) -> String {
        "expected loss".to_string()
    }
}

/// Payoffs of a position on a finite state space, one entry per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePayoffs(pub Vec<f64>);

impl StatePayoffs {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Statewise sum. Panics if the state spaces differ in size.
    pub fn add(&self, other: &StatePayoffs) -> StatePayoffs {
        assert_eq!(self.len(), other.len(), "state spaces differ");
        StatePayoffs(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Worst-case expected loss over a finite set of probability vectors
/// ("generalized scenarios") on a shared state space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioMeasure {
    scenarios: Vec<Vec<f64>>,
}

impl ScenarioMeasure {
    pub fn new(scenarios: Vec<Vec<f64>>) -> Result<Self> {
        let dim = match scenarios.first() {
            Some(s) if !s.is_empty() => s.len(),
            _ => {
                return Err(RiskError::InvalidDistribution(
                    "a scenario measure needs at least one non-empty scenario".into(),
                ))
            }
        };
        let mut scenarios = scenarios;
        for s in &mut scenarios {
            if s.len() != dim {
                return Err(RiskError::DimensionMismatch {
                    expected: dim,
                    got: s.len(),
                });
            }
            if s.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(RiskError::InvalidDistribution(
                    "scenario probabilities must be nonnegative".into(),
                ));
            }
            let total: f64 = s.iter().sum();
            if (total - 1.0).abs() > INPUT_MASS_TOLERANCE {
                return Err(RiskError::Mass { total });
            }
            if (total - 1.0).abs() > MASS_TOLERANCE {
                s.iter_mut().for_each(|p| *p /= total);
            }
        }
        Ok(ScenarioMeasure { scenarios })
    }

    /// One scenario per state, each putting all mass on that state. The
    /// resulting measure is the maximum loss over states.
    pub fn unit_vectors(states: usize) -> Result<Self> {
        ScenarioMeasure::new(
            (0..states)
                .map(|i| {
                    (0..states)
                        .map(|j| if i == j { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn scenarios(&self) -> &[Vec<f64>] {
        &self.scenarios
    }

    pub fn dimension(&self) -> usize {
        self.scenarios[0].len()
    }

    /// `max over scenarios of Σ prob_i · (-payoff_i)`.
    pub fn evaluate_payoffs(&self, payoffs: &[f64]) -> Result<f64> {
        if payoffs.len() != self.dimension() {
            return Err(RiskError::DimensionMismatch {
                expected: self.dimension(),
                got: payoffs.len(),
            });
        }
        let worst = self
            .scenarios
            .iter()
            .map(|s| -s.iter().zip(payoffs).map(|(p, x)| p * x).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(unsigned_zero(worst))
    }
}

impl RiskMeasure<StatePayoffs> for ScenarioMeasure {
    fn evaluate(&self, position: &StatePayoffs) -> Result<f64> {
        self.evaluate_payoffs(&position.0)
    }

    fn name(&self) -> String {
        format!("scenario ({} scenarios)", self.scenarios.len())
    }
}
