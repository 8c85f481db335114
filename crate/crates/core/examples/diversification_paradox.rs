//! Splitting a 2M loan into two independent 1M loans raises the 95% VaR.

use riskvec::coherence::{check_subadditivity, Axiom};
use riskvec::measures::ValueAtRisk;
use riskvec::{var, Position, Result};

fn loan(amount: f64) -> Result<Position> {
    Position::new(vec![(0.0, 0.96), (-amount, 0.04)])
}

fn main() -> Result<()> {
    let single = loan(2e6)?;
    let half = loan(1e6)?;
    let pair = half.independent_sum(&half)?;

    println!("two 1M loans:");
    for (x, p) in pair.outcomes() {
        println!("  {x:>10} with probability {p}");
    }
    println!("VaR 95% of one 2M loan:  {}", var(&single, 0.95)?);
    println!("VaR 95% of two 1M loans: {}", var(&pair, 0.95)?);

    let rho = ValueAtRisk::new(0.95);
    let report = check_subadditivity(&rho, &[(half.clone(), half)], Position::independent_sum);
    println!("{report}");
    let c = &report.counterexamples[0];
    let (lhs, rhs) = c.replay(Axiom::Subadditivity, &rho)?;
    println!("replayed: rho(X+Y) = {lhs} > rho(X) + rho(Y) = {rhs}");
    Ok(())
}
