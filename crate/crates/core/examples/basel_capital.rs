//! Capital ratio of one bank under the three accords.

use riskvec::basel::{
    capital_ratio, market_risk_charge, risk_weighted_assets_under, Accord, AssetCategory,
    CapitalStructure, DiscretionWeight, Exposure, SovereignRating, MARKET_RISK_LEVEL,
};
use riskvec::{Position, Result};

fn main() -> Result<()> {
    let book = vec![
        Exposure::new(AssetCategory::Cash, 50.0),
        Exposure::new(AssetCategory::OecdBank, 200.0),
        Exposure::new(AssetCategory::ResidentialMortgage, 300.0),
        Exposure::new(AssetCategory::PrivateSector, 400.0),
        Exposure::new(AssetCategory::DomesticPublicSector, 100.0)
            .with_discretion(DiscretionWeight::Twenty),
        Exposure::new(AssetCategory::NonOecdSovereign, 80.0)
            .with_rating(SovereignRating::BelowBMinus),
    ];
    let trading = Position::new(vec![(40.0, 0.9), (-10.0, 0.07), (-60.0, 0.03)])?;
    let capital = CapitalStructure::new(40.0, 30.0, 8.0)?;

    let market = market_risk_charge(&trading, MARKET_RISK_LEVEL)?;
    for accord in [Accord::Basel1, Accord::Amendment1996, Accord::Basel2] {
        let credit = risk_weighted_assets_under(&book, accord)?;
        let (market, operational) = match accord {
            Accord::Basel1 => (0.0, 0.0),
            Accord::Amendment1996 => (market, 0.0),
            Accord::Basel2 => (market, 25.0),
        };
        println!(
            "{}\n",
            capital_ratio(&capital, credit, market, operational, accord)?
        );
    }
    Ok(())
}
