//! Two assets with the same 95% VaR and very different tails.

use riskvec::{measure_vector, var_with, Position, QuantileConvention, Result};

fn main() -> Result<()> {
    let asset1 = Position::new(vec![(2e6, 0.95), (-1e6, 0.05)])?;
    let asset2 = Position::new(vec![(2e6, 0.95), (-1e6, 0.01), (-1e9, 0.04)])?;

    for (name, p) in [("asset 1", &asset1), ("asset 2", &asset2)] {
        let mv = measure_vector(p, &[0.95, 0.99])?;
        println!("{name}");
        for (measure, value) in mv.named_values() {
            println!("  {measure:<8} {value}");
        }
        let largest = var_with(p, 0.95, QuantileConvention::Largest)?;
        println!("  VaR 95% under the largest quantile: {largest}");
    }
    Ok(())
}
