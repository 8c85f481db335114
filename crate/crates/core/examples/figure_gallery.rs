//! Pairs of tails that one measure cannot tell apart and another can.

use riskvec::family::{discriminate, triangular_tail, uniform_tail, TailSpec};
use riskvec::Result;

fn main() -> Result<()> {
    // (uniform [a,b], triangle [c,d] with apex)
    let pairs = [
        ((0.0, 5.0), (0.0, 10.0, 0.0)),
        ((2.0 / 3.0, 8.0 / 3.0), (0.0, 5.0, 0.0)),
        ((0.0, 5.0), (3.0, 5.0, 3.4)),
        ((0.0, 10.0 / 3.0), (0.0, 5.0, 0.0)),
        ((0.0, 5.0), (0.0, 5.0, 5.0)),
        ((-5.0 / 3.0, 5.0), (0.0, 5.0, 0.0)),
    ];
    for (k, ((a, b), (c, d, apex))) in pairs.into_iter().enumerate() {
        let u = uniform_tail(&TailSpec::new(a, b, 0.95)?)?;
        let t = triangular_tail(&TailSpec::new(c, d, 0.95)?, apex)?;
        let report = discriminate(&u, &t, &[0.95])?;
        println!(
            "pair {}: uniform [{a:.4}, {b:.4}] vs triangle [{c}, {d}] apex {apex}",
            k + 1
        );
        for row in &report.rows {
            let verdict = if row.equal { "same" } else { "differs" };
            println!(
                "  {:<8} {:>20.12} {:>20.12}  {verdict}",
                row.measure, row.first, row.second
            );
        }
    }
    Ok(())
}
