//! Basel I / 1996 amendment / Basel II capital adequacy.
//!
//! Credit risk is the sum of risk-weighted exposures. The accords differ in
//! the denominator of the capital ratio:
//!
//! | accord          | denominator                          | tier 3 |
//! |-----------------|--------------------------------------|--------|
//! | Basel I         | credit                               | no     |
//! | 1996 amendment  | credit + market                      | yes    |
//! | Basel II        | credit + market + operational        | yes    |
//!
//! Tier 2 capital counts up to the amount of tier 1 capital, which is the
//! same as saying at most half of the counted capital is tier 2. Tier 3 only
//! covers market risk, so it counts up to the market-risk charge.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::Position;
use crate::error::{Result, RiskError};
use crate::measures::var;

/// Minimum ratio of eligible capital to total risk charge.
pub const MINIMUM_CAPITAL_RATIO: f64 = 0.08;
/// Confidence level of the VaR behind the market-risk charge.
pub const MARKET_RISK_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssetCategory {
    // 0%
    Cash,
    /// Central governments and central banks, in national currency and
    /// funded in that currency.
    DomesticSovereign,
    OecdSovereign,
    /// Collateralized by cash or OECD central-government securities, or
    /// guaranteed by OECD central governments.
    OecdCollateralized,
    // 0, 10, 20 or 50% at national discretion
    DomesticPublicSector,
    // 20%
    MultilateralDevelopmentBank,
    OecdBank,
    /// Non-OECD banks, residual maturity up to one year.
    NonOecdBankShortTerm,
    ForeignOecdPublicSector,
    CashInCollection,
    // 50%
    ResidentialMortgage,
    // 100%
    PrivateSector,
    /// Non-OECD banks, residual maturity over one year.
    NonOecdBankLongTerm,
    /// Non-OECD central governments, unless in national currency.
    NonOecdSovereign,
    PublicSectorCommercial,
    FixedAssets,
    RealEstateInvestments,
    OtherBankCapital,
    Other,
}

/// How a category's weight is determined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    Fixed(f64),
    NationalDiscretion,
}

impl AssetCategory {
    pub const ALL: [AssetCategory; 19] = [
        AssetCategory::Cash,
        AssetCategory::DomesticSovereign,
        AssetCategory::OecdSovereign,
        AssetCategory::OecdCollateralized,
        AssetCategory::DomesticPublicSector,
        AssetCategory::MultilateralDevelopmentBank,
        AssetCategory::OecdBank,
        AssetCategory::NonOecdBankShortTerm,
        AssetCategory::ForeignOecdPublicSector,
        AssetCategory::CashInCollection,
        AssetCategory::ResidentialMortgage,
        AssetCategory::PrivateSector,
        AssetCategory::NonOecdBankLongTerm,
        AssetCategory::NonOecdSovereign,
        AssetCategory::PublicSectorCommercial,
        AssetCategory::FixedAssets,
        AssetCategory::RealEstateInvestments,
        AssetCategory::OtherBankCapital,
        AssetCategory::Other,
    ];

    /// The 1988 weight schedule.
    pub fn rule(self) -> WeightRule {
        use AssetCategory::*;
        match self {
            Cash | DomesticSovereign | OecdSovereign | OecdCollateralized => WeightRule::Fixed(0.0),
            DomesticPublicSector => WeightRule::NationalDiscretion,
            MultilateralDevelopmentBank
            | OecdBank
            | NonOecdBankShortTerm
            | ForeignOecdPublicSector
            | CashInCollection => WeightRule::Fixed(0.2),
            ResidentialMortgage => WeightRule::Fixed(0.5),
            PrivateSector
            | NonOecdBankLongTerm
            | NonOecdSovereign
            | PublicSectorCommercial
            | FixedAssets
            | RealEstateInvestments
            | OtherBankCapital
            | Other => WeightRule::Fixed(1.0),
        }
    }

    /// Claims on central governments, reweighted by rating under Basel II.
    pub fn is_sovereign(self) -> bool {
        matches!(
            self,
            AssetCategory::DomesticSovereign
                | AssetCategory::OecdSovereign
                | AssetCategory::NonOecdSovereign
        )
    }

    pub fn code(self) -> &'static str {
        use AssetCategory::*;
        match self {
            Cash => "cash",
            DomesticSovereign => "domestic_sovereign",
            OecdSovereign => "oecd_sovereign",
            OecdCollateralized => "oecd_collateralized",
            DomesticPublicSector => "domestic_public_sector",
            MultilateralDevelopmentBank => "multilateral_development_bank",
            OecdBank => "oecd_bank",
            NonOecdBankShortTerm => "non_oecd_bank_short_term",
            ForeignOecdPublicSector => "foreign_oecd_public_sector",
            CashInCollection => "cash_in_collection",
            ResidentialMortgage => "residential_mortgage",
            PrivateSector => "private_sector",
            NonOecdBankLongTerm => "non_oecd_bank_long_term",
            NonOecdSovereign => "non_oecd_sovereign",
            PublicSectorCommercial => "public_sector_commercial",
            FixedAssets => "fixed_assets",
            RealEstateInvestments => "real_estate_investments",
            OtherBankCapital => "other_bank_capital",
            Other => "other",
        }
    }
}

impl FromStr for AssetCategory {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        AssetCategory::ALL
            .into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| RiskError::Exposure(format!("unknown asset category {s:?}")))
    }
}

impl fmt::Display for AssetCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Weights a national supervisor may pick for domestic public-sector claims.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiscretionWeight {
    Zero,
    Ten,
    Twenty,
    Fifty,
}

impl DiscretionWeight {
    pub fn value(self) -> f64 {
        match self {
            DiscretionWeight::Zero => 0.0,
            DiscretionWeight::Ten => 0.1,
            DiscretionWeight::Twenty => 0.2,
            DiscretionWeight::Fifty => 0.5,
        }
    }

    pub fn from_value(w: f64) -> Result<Self> {
        [
            DiscretionWeight::Zero,
            DiscretionWeight::Ten,
            DiscretionWeight::Twenty,
            DiscretionWeight::Fifty,
        ]
        .into_iter()
        .find(|d| (d.value() - w).abs() < 1e-12)
        .ok_or_else(|| {
            RiskError::Exposure(format!(
                "discretion weight {w} is not one of 0, 0.1, 0.2, 0.5"
            ))
        })
    }
}

/// Rating bands used for sovereign weights, best first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SovereignRating {
    AaaToAaMinus,
    APlusToAMinus,
    BbbPlusToBbbMinus,
    BbPlusToBMinus,
    BelowBMinus,
    Unrated,
}

impl SovereignRating {
    pub const ALL: [SovereignRating; 6] = [
        SovereignRating::AaaToAaMinus,
        SovereignRating::APlusToAMinus,
        SovereignRating::BbbPlusToBbbMinus,
        SovereignRating::BbPlusToBMinus,
        SovereignRating::BelowBMinus,
        SovereignRating::Unrated,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SovereignRating::AaaToAaMinus => "AAA to AA-",
            SovereignRating::APlusToAMinus => "A+ to A-",
            SovereignRating::BbbPlusToBbbMinus => "BBB+ to BBB-",
            SovereignRating::BbPlusToBMinus => "BB+ to B-",
            SovereignRating::BelowBMinus => "below B-",
            SovereignRating::Unrated => "unrated",
        }
    }
}

impl FromStr for SovereignRating {
    type Err = RiskError;

    /// Accepts agency notches such as `"AA-"`, `"BBB"`, `"CCC+"`, band
    /// labels such as `"A+ to A-"`, and `"unrated"`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(r) = SovereignRating::ALL
            .into_iter()
            .find(|r| r.label().eq_ignore_ascii_case(s.trim()))
        {
            return Ok(r);
        }
        let notch = s.trim().to_ascii_uppercase();
        let band = match notch.as_str() {
            "AAA" | "AA+" | "AA" | "AA-" => SovereignRating::AaaToAaMinus,
            "A+" | "A" | "A-" => SovereignRating::APlusToAMinus,
            "BBB+" | "BBB" | "BBB-" => SovereignRating::BbbPlusToBbbMinus,
            "BB+" | "BB" | "BB-" | "B+" | "B" | "B-" => SovereignRating::BbPlusToBMinus,
            "UNRATED" | "NR" => SovereignRating::Unrated,
            "BELOW B-" | "CCC+" | "CCC" | "CCC-" | "CC" | "C" | "D" | "SD" => {
                SovereignRating::BelowBMinus
            }
            _ => {
                return Err(RiskError::Exposure(format!(
                    "unrecognized sovereign rating {s:?}"
                )))
            }
        };
        Ok(band)
    }
}

/// Sovereign risk weight by rating band.
pub fn sovereign_weight(rating: SovereignRating) -> f64 {
    match rating {
        SovereignRating::AaaToAaMinus => 0.0,
        SovereignRating::APlusToAMinus => 0.2,
        SovereignRating::BbbPlusToBbbMinus => 0.5,
        SovereignRating::BbPlusToBMinus | SovereignRating::Unrated => 1.0,
        SovereignRating::BelowBMinus => 1.5,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exposure {
    pub category: AssetCategory,
    pub amount: f64,
    pub discretion_weight: Option<DiscretionWeight>,
    /// Only read for sovereign claims under Basel II; missing means unrated.
    pub rating: Option<SovereignRating>,
    /// Informational only. No weight depends on it.
    pub default_probability: Option<f64>,
}

impl Exposure {
    pub fn new(category: AssetCategory, amount: f64) -> Self {
        Exposure {
            category,
            amount,
            discretion_weight: None,
            rating: None,
            default_probability: None,
        }
    }

    pub fn with_discretion(mut self, weight: DiscretionWeight) -> Self {
        self.discretion_weight = Some(weight);
        self
    }

    pub fn with_rating(mut self, rating: SovereignRating) -> Self {
        self.rating = Some(rating);
        self
    }

    pub fn with_default_probability(mut self, pd: f64) -> Self {
        self.default_probability = Some(pd);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amount.is_finite() && self.amount >= 0.0) {
            return Err(RiskError::Exposure(format!(
                "amount {} must be a nonnegative number",
                self.amount
            )));
        }
        let discretionary = self.category.rule() == WeightRule::NationalDiscretion;
        match (discretionary, self.discretion_weight) {
            (true, None) => return Err(RiskError::DiscretionMissing(self.category.to_string())),
            (false, Some(_)) => {
                return Err(RiskError::Exposure(format!(
                    "category {} takes no discretion weight",
                    self.category
                )))
            }
            _ => {}
        }
        if self.rating.is_some() && !self.category.is_sovereign() {
            return Err(RiskError::Exposure(format!(
                "category {} is not a sovereign claim and takes no rating",
                self.category
            )));
        }
        if let Some(pd) = self.default_probability {
            if !(0.0..=1.0).contains(&pd) {
                return Err(RiskError::Exposure(format!(
                    "default probability {pd} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Accord {
    Basel1,
    Amendment1996,
    Basel2,
}

impl Accord {
    pub fn name(self) -> &'static str {
        match self {
            Accord::Basel1 => "basel1",
            Accord::Amendment1996 => "amendment1996",
            Accord::Basel2 => "basel2",
        }
    }

    fn admits_market_risk(self) -> bool {
        self != Accord::Basel1
    }

    fn admits_operational_risk(self) -> bool {
        self == Accord::Basel2
    }
}

impl FromStr for Accord {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basel1" => Ok(Accord::Basel1),
            "amendment1996" => Ok(Accord::Amendment1996),
            "basel2" => Ok(Accord::Basel2),
            _ => Err(RiskError::Exposure(format!("unknown accord {s:?}"))),
        }
    }
}

/// Risk weight of an exposure under the 1988 schedule.
pub fn risk_weight(exposure: &Exposure) -> Result<f64> {
    exposure.validate()?;
    Ok(match exposure.category.rule() {
        WeightRule::Fixed(w) => w,
        WeightRule::NationalDiscretion => {
            exposure
                .discretion_weight
                .map(DiscretionWeight::value)
                .ok_or_else(|| RiskError::DiscretionMissing(exposure.category.to_string()))?
        }
    })
}

/// Risk weight under `accord`: Basel II reweights sovereign claims by
/// rating, everything else keeps the 1988 schedule.
pub fn risk_weight_under(exposure: &Exposure, accord: Accord) -> Result<f64> {
    if accord == Accord::Basel2 && exposure.category.is_sovereign() {
        exposure.validate()?;
        return Ok(sovereign_weight(
            exposure.rating.unwrap_or(SovereignRating::Unrated),
        ));
    }
    risk_weight(exposure)
}

pub fn risk_weighted_assets(exposures: &[Exposure]) -> Result<f64> {
    risk_weighted_assets_under(exposures, Accord::Basel1)
}

pub fn risk_weighted_assets_under(exposures: &[Exposure], accord: Accord) -> Result<f64> {
    exposures
        .iter()
        .map(|e| Ok(e.amount * risk_weight_under(e, accord)?))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapitalStructure {
    pub tier1: f64,
    pub tier2: f64,
    pub tier3: f64,
}

impl CapitalStructure {
    pub fn new(tier1: f64, tier2: f64, tier3: f64) -> Result<Self> {
        for (name, v) in [("tier1", tier1), ("tier2", tier2), ("tier3", tier3)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(RiskError::Exposure(format!(
                    "{name} capital {v} must be a nonnegative number"
                )));
            }
        }
        Ok(CapitalStructure {
            tier1,
            tier2,
            tier3,
        })
    }
}

/// Tier 1 plus tier 2 capped at tier 1, plus all of tier 3 when asked.
/// [`capital_ratio`] further caps tier 3 at the market-risk charge.
pub fn eligible_capital(capital: &CapitalStructure, include_tier3: bool) -> f64 {
    let base = capital.tier1 + capital.tier2.min(capital.tier1);
    if include_tier3 {
        base + capital.tier3
    } else {
        base
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapitalAssessment {
    pub credit_risk: f64,
    pub market_risk: f64,
    pub operational_risk: f64,
    pub eligible_capital: f64,
    pub ratio: f64,
    pub accord: Accord,
    pub pass: bool,
}

impl fmt::Display for CapitalAssessment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "accord:            {}", self.accord.name())?;
        writeln!(f, "credit risk:       {}", self.credit_risk)?;
        writeln!(f, "market risk:       {}", self.market_risk)?;
        writeln!(f, "operational risk:  {}", self.operational_risk)?;
        writeln!(f, "eligible capital:  {}", self.eligible_capital)?;
        write!(
            f,
            "capital ratio:     {:.6} ({})",
            self.ratio,
            if self.pass {
                "pass, >= 8%"
            } else {
                "FAIL, < 8%"
            }
        )
    }
}

pub fn capital_ratio(
    capital: &CapitalStructure,
    credit: f64,
    market: f64,
    operational: f64,
    accord: Accord,
) -> Result<CapitalAssessment> {
    for (term, v) in [
        ("credit", credit),
        ("market", market),
        ("operational", operational),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(RiskError::Exposure(format!(
                "{term} risk {v} must be a nonnegative number"
            )));
        }
    }
    if market > 0.0 && !accord.admits_market_risk() {
        return Err(RiskError::AccordMismatch {
            accord: accord.name(),
            term: "market risk",
        });
    }
    if operational > 0.0 && !accord.admits_operational_risk() {
        return Err(RiskError::AccordMismatch {
            accord: accord.name(),
            term: "operational risk",
        });
    }
    let denominator = credit + market + operational;
    if !(denominator > 0.0) {
        return Err(RiskError::ZeroRiskCharge);
    }
    let tier3 = if accord.admits_market_risk() {
        capital.tier3.min(market)
    } else {
        0.0
    };
    let eligible = eligible_capital(capital, false) + tier3;
    let ratio = eligible / denominator;
    Ok(CapitalAssessment {
        credit_risk: credit,
        market_risk: market,
        operational_risk: operational,
        eligible_capital: eligible,
        ratio,
        accord,
        pass: ratio >= MINIMUM_CAPITAL_RATIO,
    })
}

/// Capital charge for a trading book: its VaR at `alpha`, floored at zero.
pub fn market_risk_charge(trading_book: &Position, alpha: f64) -> Result<f64> {
    Ok(var(trading_book, alpha)?.max(0.0))
}
