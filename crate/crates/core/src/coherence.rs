//! Checks a risk measure against monotonicity, positive homogeneity,
//! translation invariance and subadditivity on finite families.
//!
//! A check can only exhibit violations. A clean report means the measure
//! is coherent *on the family supplied*, nothing more.

use std::fmt;

use serde::Serialize;

use crate::distributions::Position;
use crate::error::{Result, RiskError};
use crate::measures::{approx_eq, approx_le, RiskMeasure, StatePayoffs, VALUE_TOLERANCE};

/// Operations the axiom checks need from a position type.
pub trait Portfolio: Clone + fmt::Debug {
    /// `λX` for `λ ≥ 0`.
    fn scaled(&self, lambda: f64) -> Result<Self>;
    /// `X + a` for a sure amount `a`.
    fn shifted(&self, a: f64) -> Self;
    /// `X ≥ 0` in every outcome.
    fn is_nonnegative(&self) -> bool;
    /// The default way of adding two positions.
    fn combined(&self, other: &Self) -> Result<Self>;
}

impl Portfolio for Position {
    fn scaled(&self, lambda: f64) -> Result<Self> {
        self.scale(lambda)
    }

    fn shifted(&self, a: f64) -> Self {
        self.shift(a)
    }

    fn is_nonnegative(&self) -> bool {
        Position::is_nonnegative(self)
    }

    /// Positions carry no joint law, so they are added as independent.
    fn combined(&self, other: &Self) -> Result<Self> {
        self.independent_sum(other)
    }
}

impl Portfolio for StatePayoffs {
    fn scaled(&self, lambda: f64) -> Result<Self> {
        if lambda < 0.0 || lambda.is_nan() {
            return Err(RiskError::NegativeScale(lambda));
        }
        Ok(StatePayoffs(self.0.iter().map(|x| x * lambda).collect()))
    }

    fn shifted(&self, a: f64) -> Self {
        StatePayoffs(self.0.iter().map(|x| x + a).collect())
    }

    fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0.0)
    }

    fn combined(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(RiskError::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self.add(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Monotonicity,
    PositiveHomogeneity,
    TranslationInvariance,
    Subadditivity,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [
        Axiom::Monotonicity,
        Axiom::PositiveHomogeneity,
        Axiom::TranslationInvariance,
        Axiom::Subadditivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Monotonicity => "monotonicity",
            Axiom::PositiveHomogeneity => "positive homogeneity",
            Axiom::TranslationInvariance => "translation invariance",
            Axiom::Subadditivity => "subadditivity",
        }
    }
}

/// One violated instance of an axiom.
///
/// `inputs` holds what is needed to replay it: the position for
/// monotonicity, the position for homogeneity and translation (with the
/// scalar or shift in `parameter`), and `[X1, X2, X1 + X2]` for
/// subadditivity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample<P> {
    pub inputs: Vec<P>,
    pub parameter: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

impl<P: Portfolio> Counterexample<P> {
    /// Re-evaluates `rho` on the recorded inputs and returns `(lhs, rhs)`.
    pub fn replay<M: RiskMeasure<P> + ?Sized>(&self, axiom: Axiom, rho: &M) -> Result<(f64, f64)> {
        let p = &self.inputs[0];
        match axiom {
            Axiom::Monotonicity => Ok((rho.evaluate(p)?, 0.0)),
            Axiom::PositiveHomogeneity => {
                let lambda = self.parameter.unwrap_or(1.0);
                Ok((rho.evaluate(&p.scaled(lambda)?)?, lambda * rho.evaluate(p)?))
            }
            Axiom::TranslationInvariance => {
                let a = self.parameter.unwrap_or(0.0);
                Ok((rho.evaluate(&p.shifted(a))?, rho.evaluate(p)? - a))
            }
            Axiom::Subadditivity => Ok((
                rho.evaluate(&self.inputs[2])?,
                rho.evaluate(&self.inputs[0])? + rho.evaluate(&self.inputs[1])?,
            )),
        }
    }
}

/// Outcome of checking one axiom on a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport<P> {
    pub axiom: Axiom,
    pub passed: bool,
    /// Number of instances actually compared.
    pub checked: usize,
    pub counterexamples: Vec<Counterexample<P>>,
    /// Instances skipped because the measure could not be evaluated.
    pub errors: Vec<String>,
}

impl<P> AxiomReport<P> {
    fn new(axiom: Axiom) -> Self {
        AxiomReport {
            axiom,
            passed: true,
            checked: 0,
            counterexamples: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn record(&mut self, outcome: Result<Option<Counterexample<P>>>) {
        match outcome {
            Ok(None) => self.checked += 1,
            Ok(Some(c)) => {
                self.checked += 1;
                self.passed = false;
                self.counterexamples.push(c);
            }
            Err(e) => self.errors.push(e.to_string()),
        }
    }
}

impl<P> fmt::Display for AxiomReport<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        write!(
            f,
            "{:<24} {} ({} checked",
            self.axiom.name(),
            verdict,
            self.checked
        )?;
        if !self.errors.is_empty() {
            write!(f, ", {} not evaluable", self.errors.len())?;
        }
        write!(f, ")")?;
        if let Some(c) = self.counterexamples.first() {
            write!(f, "; e.g. lhs {} vs rhs {}", c.lhs, c.rhs)?;
            if let Some(param) = c.parameter {
                write!(f, " at parameter {param}")?;
            }
        }
        Ok(())
    }
}

/// `X ≥ 0 ⇒ ρ(X) ≤ 0` for every nonnegative member of `family`.
pub fn check_monotonicity<P, M>(rho: &M, family: &[P]) -> AxiomReport<P>
where
    P: Portfolio,
    M: RiskMeasure<P> + ?Sized,
{
    let mut report = AxiomReport::new(Axiom::Monotonicity);
    for p in family.iter().filter(|p| p.is_nonnegative()) {
        report.record(rho.evaluate(p).map(|lhs| {
            (!approx_le(lhs, 0.0)).then(|| Counterexample {
                inputs: vec![p.clone()],
                parameter: None,
                lhs,
                rhs: 0.0,
            })
        }));
    }
    report
}

/// `ρ(λX) = λρ(X)` for every member and every `λ` in `scalars`.
pub fn check_homogeneity<P, M>(rho: &M, family: &[P], scalars: &[f64]) -> AxiomReport<P>
where
    P: Portfolio,
    M: RiskMeasure<P> + ?Sized,
{
    let mut report = AxiomReport::new(Axiom::PositiveHomogeneity);
    for p in family {
        for &lambda in scalars {
            report.record((|| {
                let lhs = rho.evaluate(&p.scaled(lambda)?)?;
                let rhs = lambda * rho.evaluate(p)?;
                Ok(
                    (!approx_eq(lhs, rhs, VALUE_TOLERANCE)).then(|| Counterexample {
                        inputs: vec![p.clone()],
                        parameter: Some(lambda),
                        lhs,
                        rhs,
                    }),
                )
            })());
        }
    }
    report
}

/// `ρ(X + a) = ρ(X) - a` for every member and every `a` in `shifts`.
pub fn check_translation<P, M>(rho: &M, family: &[P], shifts: &[f64]) -> AxiomReport<P>
where
    P: Portfolio,
    M: RiskMeasure<P> + ?Sized,
{
    let mut report = AxiomReport::new(Axiom::TranslationInvariance);
    for p in family {
        for &a in shifts {
            report.record((|| {
                let lhs = rho.evaluate(&p.shifted(a))?;
                let rhs = rho.evaluate(p)? - a;
                Ok(
                    (!approx_eq(lhs, rhs, VALUE_TOLERANCE)).then(|| Counterexample {
                        inputs: vec![p.clone()],
                        parameter: Some(a),
                        lhs,
                        rhs,
                    }),
                )
            })());
        }
    }
    report
}

/// `ρ(X1 + X2) ≤ ρ(X1) + ρ(X2)` for each pair, where the sum is formed
/// by `combine`.
pub fn check_subadditivity<P, M, C>(rho: &M, pairs: &[(P, P)], combine: C) -> AxiomReport<P>
where
    P: Portfolio,
    M: RiskMeasure<P> + ?Sized,
    C: Fn(&P, &P) -> Result<P>,
{
    let mut report = AxiomReport::new(Axiom::Subadditivity);
    for (p1, p2) in pairs {
        report.record((|| {
            let sum = combine(p1, p2)?;
            let lhs = rho.evaluate(&sum)?;
            let rhs = rho.evaluate(p1)? + rho.evaluate(p2)?;
            Ok((!approx_le(lhs, rhs)).then(|| Counterexample {
                inputs: vec![p1.clone(), p2.clone(), sum],
                parameter: None,
                lhs,
                rhs,
            }))
        })());
    }
    report
}

pub const DEFAULT_SCALARS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.75];
pub const DEFAULT_SHIFTS: [f64; 5] = [-10.0, -1.5, 0.0, 0.25, 7.0];

/// All four axiom reports for one measure on one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport<P> {
    pub measure: String,
    pub reports: Vec<AxiomReport<P>>,
}

impl<P> CoherenceReport<P> {
    /// True when no axiom produced a counterexample on this family.
    pub fn coherent_on_family(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn report(&self, axiom: Axiom) -> Option<&AxiomReport<P>> {
        self.reports.iter().find(|r| r.axiom == axiom)
    }
}

impl<P> fmt::Display for CoherenceReport<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "measure: {}", self.measure)?;
        for r in &self.reports {
            writeln!(f, "  {r}")?;
        }
        let verdict = if self.coherent_on_family() {
            "coherent on family"
        } else {
            "not coherent on family"
        };
        write!(f, "  => {verdict}")
    }
}

/// Runs all four checks with [`DEFAULT_SCALARS`], [`DEFAULT_SHIFTS`] and
/// the cyclic neighbour pairs `(X_i, X_{i+1})` combined with
/// [`Portfolio::combined`].
pub fn coherence_report<P, M>(rho: &M, family: &[P]) -> CoherenceReport<P>
where
    P: Portfolio,
    M: RiskMeasure<P> + ?Sized,
{
    let n = family.len();
    let pairs: Vec<(P, P)> = (0..n)
        .map(|i| (family[i].clone(), family[(i + 1) % n].clone()))
        .collect();
    coherence_report_with(rho, family, &DEFAULT_SCALARS, &DEFAULT_SHIFTS, &pairs)
}

pub fn coherence_report_with<P, M>(
    rho: &M,
    family: &[P],
    scalars: &[f64],
    shifts: &[f64],
    pairs: &[(P, P)],
) -> CoherenceReport<P>
where
    P: Portfolio,
    M: RiskMeasure<P> + ?Sized,
{
    CoherenceReport {
        measure: rho.name(),
        reports: vec![
            check_monotonicity(rho, family),
            check_homogeneity(rho, family, scalars),
            check_translation(rho, family, shifts),
            check_subadditivity(rho, pairs, P::combined),
        ],
    }
}
