//! The `riskvec` command-line tool.
//!
//! Exit codes: 0 on success, 2 when an input fails to parse or validate,
//! 3 when a computation fails.

mod document;
mod plot;

pub use document::{
    CapitalDocument, DocumentError, Metadata, Num, Payload, SpecDocument, TailShape,
};
pub use plot::{emit_plot_data, plot_rows, PlotRow, DEFAULT_RESOLUTION};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::basel::{
    capital_ratio, market_risk_charge, risk_weighted_assets_under, Accord, MARKET_RISK_LEVEL,
};
use crate::coherence::{
    coherence_report_with, CoherenceReport, Portfolio, DEFAULT_SCALARS, DEFAULT_SHIFTS,
};
use crate::distributions::{LossDistribution, Position, QuantileConvention, DEFAULT_OUTCOME_CAP};
use crate::error::RiskError;
use crate::family::{discriminate, indistinguishable_family, level_label, min_pairwise_l1};
use crate::measures::{
    approx_eq, measure_vector_with, MaxLoss, MeasureVector, RiskMeasure, ScenarioMeasure,
    StatePayoffs, TailConditionalExpectation, ValueAtRisk, VALUE_TOLERANCE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "riskvec",
    version,
    about = "Risk-measure vectors, coherence checks and Basel capital ratios"
)]
pub struct Cli {
    /// Print structured JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// VaR, TCE and ML of one distribution.
    Measures {
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.95, 0.99])]
        levels: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ConventionArg::Smallest)]
        convention: ConventionArg,
    },
    /// Measure-by-measure comparison of two distributions.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.95, 0.99])]
        levels: Vec<f64>,
    },
    /// Distinct distributions sharing the measure vector of a tail spec.
    Family {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Defaults to the levels named in the spec.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// Checks a measure against the coherence axioms on a family of positions.
    Coherence {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = MeasureArg::Var)]
        measure: MeasureArg,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Capital ratio under a Basel accord.
    Basel {
        capital: PathBuf,
        #[arg(long)]
        exposures: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = AccordArg::Basel1)]
        accord: AccordArg,
    },
    /// `x,density,atom_mass` CSV of a distribution.
    Plot {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = parse_resolution)]
        resolution: usize,
    },
}

fn parse_resolution(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        _ => Err(format!("{s} is not an integer of at least 2")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Smallest,
    Largest,
}

impl From<ConventionArg> for QuantileConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Smallest => QuantileConvention::Smallest,
            ConventionArg::Largest => QuantileConvention::Largest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Var,
    Tce,
    Ml,
    Scenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AccordArg {
    Basel1,
    Amendment1996,
    Basel2,
}

impl From<AccordArg> for Accord {
    fn from(a: AccordArg) -> Self {
        match a {
            AccordArg::Basel1 => Accord::Basel1,
            AccordArg::Amendment1996 => Accord::Amendment1996,
            AccordArg::Basel2 => Accord::Basel2,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Computation(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Computation(_) => EXIT_COMPUTATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Computation(m) => m,
        }
    }
}

impl From<RiskError> for Failure {
    fn from(e: RiskError) -> Self {
        match e {
            RiskError::Mass { .. }
            | RiskError::InvalidDistribution(_)
            | RiskError::Level(_)
            | RiskError::NegativeScale(_)
            | RiskError::DimensionMismatch { .. }
            | RiskError::Spec(_)
            | RiskError::DiscretionMissing(_)
            | RiskError::Exposure(_)
            | RiskError::AccordMismatch { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Computation(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<SpecDocument, Failure> {
    SpecDocument::from_path(path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn load_loss(path: &Path) -> Result<(SpecDocument, LossDistribution), Failure> {
    let doc = load(path)?;
    let loss = doc.payload.loss_distribution().ok_or_else(|| {
        Failure::Validation(format!(
            "{}: a {} document does not describe a distribution",
            path.display(),
            doc.payload.kind()
        ))
    })?;
    Ok((doc, loss))
}

fn check_levels(levels: &[f64]) -> Result<(), Failure> {
    if levels.is_empty() {
        return Err(Failure::Validation("at least one level is required".into()));
    }
    for &l in levels {
        if !(l > 0.0 && l < 1.0) {
            return Err(RiskError::Level(l).into());
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let text = match &cli.command {
        Command::Measures {
            spec,
            levels,
            convention,
        } => measures(spec, levels, (*convention).into(), cli.json)?,
        Command::Compare {
            first,
            second,
            levels,
        } => compare(first, second, levels, cli.json)?,
        Command::Family { spec, n, levels } => family(spec, *n, levels.as_deref(), cli.json)?,
        Command::Coherence {
            specs,
            measure,
            level,
        } => coherence(specs, *measure, *level, cli.json)?,
        Command::Basel {
            capital,
            exposures,
            accord,
        } => basel(capital, exposures.as_deref(), (*accord).into(), cli.json)?,
        Command::Plot { spec, resolution } => {
            let (_, loss) = load_loss(spec)?;
            let mut buf = Vec::new();
            emit_plot_data(&loss, *resolution, &mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Computation(format!("writing output: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn measure_table(mv: &MeasureVector) -> String {
    let mut s = format!("{:<8} {:>24} {:>24}\n", "level", "VaR", "TCE");
    for e in mv.entries() {
        s += &format!("{:<8} {:>24} {:>24}\n", level_label(e.level), e.var, e.tce);
    }
    s += &format!("{:<8} {:>24}\n", "ML", mv.max_loss());
    s
}

fn measures(
    path: &Path,
    levels: &[f64],
    convention: QuantileConvention,
    json: bool,
) -> Result<String, Failure> {
    check_levels(levels)?;
    let (doc, loss) = load_loss(path)?;
    let smallest = measure_vector_with(&loss, levels, QuantileConvention::Smallest)?;
    let largest = measure_vector_with(&loss, levels, QuantileConvention::Largest)?;
    let (chosen, other) = match convention {
        QuantileConvention::Smallest => (&smallest, &largest),
        QuantileConvention::Largest => (&largest, &smallest),
    };
    let diverging: Vec<f64> = smallest
        .entries()
        .iter()
        .zip(largest.entries())
        .filter(|(a, b)| {
            !approx_eq(a.var, b.var, VALUE_TOLERANCE) || !approx_eq(a.tce, b.tce, VALUE_TOLERANCE)
        })
        .map(|(a, _)| a.level)
        .collect();
    if json {
        return Ok(to_json(&json!({
            "name": doc.name(),
            "convention": convention,
            "measures": chosen,
            "other_convention": other,
            "diverging_levels": diverging,
        })));
    }
    let mut s = format!("{} ({} quantile)\n", doc.name(), convention.name());
    s += &measure_table(chosen);
    for e in other
        .entries()
        .iter()
        .filter(|e| diverging.contains(&e.level))
    {
        s += &format!(
            "note: the {} quantile gives VaR {} and TCE {} at {}\n",
            match convention {
                QuantileConvention::Smallest => QuantileConvention::Largest.name(),
                QuantileConvention::Largest => QuantileConvention::Smallest.name(),
            },
            e.var,
            e.tce,
            level_label(e.level)
        );
    }
    Ok(s)
}

fn compare(first: &Path, second: &Path, levels: &[f64], json: bool) -> Result<String, Failure> {
    check_levels(levels)?;
    let (d1, l1) = load_loss(first)?;
    let (d2, l2) = load_loss(second)?;
    let report = discriminate(&l1, &l2, levels)?;
    let l1_distance = l1.density_l1_distance(&l2);
    if json {
        return Ok(to_json(&json!({
            "first": d1.name(),
            "second": d2.name(),
            "report": report,
            "all_equal": report.all_equal(),
            "density_l1_distance": l1_distance,
        })));
    }
    let mut s = format!(
        "{:<10} {:>24} {:>24}  {}\n",
        "measure",
        d1.name(),
        d2.name(),
        "verdict"
    );
    for r in &report.rows {
        s += &format!(
            "{:<10} {:>24} {:>24}  {}\n",
            r.measure,
            r.first,
            r.second,
            if r.equal { "equal" } else { "DIFFERENT" }
        );
    }
    s += &format!("density L1 distance: {l1_distance}\n");
    if report.all_equal() {
        s += "no measure distinguishes the two distributions\n";
    } else {
        s += &format!("distinguished by: {}\n", report.distinguishing().join(", "));
    }
    Ok(s)
}

fn family(path: &Path, n: usize, levels: Option<&[f64]>, json: bool) -> Result<String, Failure> {
    let doc = load(path)?;
    let Payload::TailSpec { spec, .. } = &doc.payload else {
        return Err(Failure::Validation(format!(
            "{}: family needs a tail_spec document, got {}",
            path.display(),
            doc.payload.kind()
        )));
    };
    let levels = levels.map_or_else(|| spec.levels(), <[f64]>::to_vec);
    check_levels(&levels)?;
    let members = indistinguishable_family(spec, n)?;
    let vectors = members
        .iter()
        .map(|m| measure_vector_with(m, &levels, QuantileConvention::Smallest))
        .collect::<Result<Vec<_>, _>>()?;
    let mut all_equal = true;
    for v in &vectors[1..] {
        let report_rows = vectors[0].named_values().into_iter().zip(v.named_values());
        for ((_, a), (_, b)) in report_rows {
            all_equal &= (a - b).abs() <= crate::family::DEFAULT_EQUALITY_TOLERANCE;
        }
    }
    let separation = min_pairwise_l1(&members);
    if json {
        let list: Vec<_> = members
            .iter()
            .zip(&vectors)
            .map(|(m, v)| json!({"distribution": m, "measures": v}))
            .collect();
        return Ok(to_json(&json!({
            "name": doc.name(),
            "levels": levels,
            "members": list,
            "all_measures_equal": all_equal,
            "min_pairwise_l1": separation,
        })));
    }
    let names: Vec<String> = vectors[0]
        .named_values()
        .into_iter()
        .map(|(n, _)| n)
        .collect();
    let mut s = format!("{:<8}", "member");
    for name in &names {
        s += &format!(" {:>22}", name);
    }
    s.push('\n');
    for (i, v) in vectors.iter().enumerate() {
        s += &format!("{:<8}", i);
        for (_, value) in v.named_values() {
            s += &format!(" {:>22}", value);
        }
        s.push('\n');
    }
    s += &format!(
        "all measures equal: {}\nminimum pairwise density L1 distance: {}\n",
        if all_equal { "yes" } else { "no" },
        separation
    );
    Ok(s)
}

fn all_pairs<P: Clone>(family: &[P]) -> Vec<(P, P)> {
    let mut pairs = Vec::new();
    for i in 0..family.len() {
        for j in i..family.len() {
            pairs.push((family[i].clone(), family[j].clone()));
        }
    }
    pairs
}

fn audit<P, M>(rho: &M, family: &[P]) -> CoherenceReport<P>
where
    P: Portfolio,
    M: RiskMeasure<P> + ?Sized,
{
    coherence_report_with(
        rho,
        family,
        &DEFAULT_SCALARS,
        &DEFAULT_SHIFTS,
        &all_pairs(family),
    )
}

/// Embeds independent positions on their joint state space. The scenarios
/// are the product law and, for each position, the product law conditioned
/// on that position's worst outcome.
pub fn product_space_embedding(
    positions: &[Position],
) -> crate::Result<(Vec<StatePayoffs>, ScenarioMeasure)> {
    let mut states: usize = 1;
    for p in positions {
        states = states
            .checked_mul(p.len())
            .filter(|&s| s <= DEFAULT_OUTCOME_CAP)
            .ok_or(RiskError::Size {
                outcomes: usize::MAX,
                cap: DEFAULT_OUTCOME_CAP,
            })?;
    }
    let mut payoffs = vec![Vec::with_capacity(states); positions.len()];
    let mut law = Vec::with_capacity(states);
    let mut index = vec![0usize; positions.len()];
    for _ in 0..states {
        let mut prob = 1.0;
        for (k, p) in positions.iter().enumerate() {
            let (x, q) = p.outcomes()[index[k]];
            payoffs[k].push(x);
            prob *= q;
        }
        law.push(prob);
        for k in (0..positions.len()).rev() {
            index[k] += 1;
            if index[k] < positions[k].len() {
                break;
            }
            index[k] = 0;
        }
    }
    let mut scenarios = vec![law.clone()];
    for (k, p) in positions.iter().enumerate() {
        let (worst, q) = p.outcomes()[0];
        scenarios.push(
            law.iter()
                .zip(&payoffs[k])
                .map(|(&pr, &x)| if x == worst { pr / q } else { 0.0 })
                .collect(),
        );
    }
    Ok((
        payoffs.into_iter().map(StatePayoffs).collect(),
        ScenarioMeasure::new(scenarios)?,
    ))
}

fn coherence(
    paths: &[PathBuf],
    measure: MeasureArg,
    level: f64,
    json: bool,
) -> Result<String, Failure> {
    check_levels(&[level])?;
    let mut positions = Vec::new();
    for path in paths {
        let doc = load(path)?;
        match doc.payload {
            Payload::Position(p) => positions.push(p),
            other => {
                return Err(Failure::Validation(format!(
                    "{}: coherence needs position documents, got {}",
                    path.display(),
                    other.kind()
                )))
            }
        }
    }
    let (text, value, coherent) = match measure {
        MeasureArg::Var => render(&audit(&ValueAtRisk::new(level), &positions)),
        MeasureArg::Tce => render(&audit(&TailConditionalExpectation::new(level), &positions)),
        MeasureArg::Ml => render(&audit(&MaxLoss, &positions)),
        MeasureArg::Scenario => {
            let (family, rho) = product_space_embedding(&positions)?;
            render(&audit(&rho, &family))
        }
    };
    if json {
        return Ok(to_json(&json!({
            "coherent_on_family": coherent,
            "report": value,
        })));
    }
    Ok(text + "\n")
}

fn render<P: Serialize>(report: &CoherenceReport<P>) -> (String, serde_json::Value, bool) {
    (
        report.to_string(),
        serde_json::to_value(report).expect("reports always serialize"),
        report.coherent_on_family(),
    )
}

fn basel(
    capital_path: &Path,
    exposures_path: Option<&Path>,
    accord: Accord,
    json: bool,
) -> Result<String, Failure> {
    let doc = load(capital_path)?;
    let Payload::Capital(capital) = &doc.payload else {
        return Err(Failure::Validation(format!(
            "{}: basel needs a capital document, got {}",
            capital_path.display(),
            doc.payload.kind()
        )));
    };
    let credit = match exposures_path {
        Some(path) => {
            let exposures = load(path)?;
            let Payload::Exposures(list) = &exposures.payload else {
                return Err(Failure::Validation(format!(
                    "{}: expected an exposures document, got {}",
                    path.display(),
                    exposures.payload.kind()
                )));
            };
            risk_weighted_assets_under(list, accord)?
        }
        None => capital.credit_risk.ok_or_else(|| {
            Failure::Validation("credit_risk is required when no exposures are given".into())
        })?,
    };
    let market = match (&capital.trading_book, capital.market_risk) {
        (Some(book), _) => market_risk_charge(book, MARKET_RISK_LEVEL)?,
        (None, Some(m)) => m,
        (None, None) => 0.0,
    };
    let assessment = capital_ratio(
        &capital.capital,
        credit,
        market,
        capital.operational_risk,
        accord,
    )?;
    if json {
        return Ok(to_json(&assessment));
    }
    Ok(format!("{assessment}\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::Axiom;

    #[test]
    fn embedding_matches_marginals() {
        let a = Position::new(vec![(-1.0, 0.25), (2.0, 0.75)]).unwrap();
        let b = Position::new(vec![(0.0, 0.5), (3.0, 0.5)]).unwrap();
        let (family, rho) = product_space_embedding(&[a, b]).unwrap();
        assert_eq!(family[0].0, vec![-1.0, -1.0, 2.0, 2.0]);
        assert_eq!(family[1].0, vec![0.0, 3.0, 0.0, 3.0]);
        assert_eq!(rho.scenarios()[0], vec![0.125, 0.125, 0.375, 0.375]);
        assert_eq!(rho.scenarios()[1], vec![0.5, 0.5, 0.0, 0.0]);
        assert_eq!(rho.evaluate(&family[0]).unwrap(), 1.0);
        let report = audit(&rho, &family);
        assert!(report.coherent_on_family());
        assert!(report.report(Axiom::Subadditivity).unwrap().passed);
    }

    #[test]
    fn unknown_flag_is_a_validation_failure() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(["riskvec", "measures", "--bogus"], &mut out, &mut err);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(!err.is_empty());
    }
}
