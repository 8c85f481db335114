//! Audits VaR, TCE, maximum loss and a scenario measure against the four axioms.

use riskvec::cli::product_space_embedding;
use riskvec::coherence::coherence_report;
use riskvec::measures::{MaxLoss, TailConditionalExpectation, ValueAtRisk};
use riskvec::{Position, Result};

fn main() -> Result<()> {
    let family = vec![
        Position::new(vec![(0.0, 0.96), (-1e6, 0.04)])?,
        Position::new(vec![(0.0, 0.96), (-2e6, 0.04)])?,
        Position::new(vec![(2e6, 0.95), (-1e6, 0.05)])?,
        Position::new(vec![(1.0, 0.5), (3.0, 0.5)])?,
    ];

    println!("{}\n", coherence_report(&ValueAtRisk::new(0.95), &family));
    println!(
        "{}\n",
        coherence_report(&TailConditionalExpectation::new(0.95), &family)
    );
    println!("{}\n", coherence_report(&MaxLoss, &family));

    let (states, rho) = product_space_embedding(&family)?;
    println!("{} joint states", states[0].len());
    println!("{}", coherence_report(&rho, &states));
    Ok(())
}
