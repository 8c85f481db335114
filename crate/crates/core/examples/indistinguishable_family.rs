//! Four distinct tails sharing VaR and TCE at 95% and 99% plus ML.

use riskvec::family::{indistinguishable_family, min_pairwise_l1, TailSpec};
use riskvec::{measure_vector, Result};

fn main() -> Result<()> {
    let spec = TailSpec::new(0.0, 5.0, 0.95)?.with_inner(0.99, 4.0)?;
    let members = indistinguishable_family(&spec, 4)?;
    for (i, m) in members.iter().enumerate() {
        let mv = measure_vector(m, &spec.levels())?;
        let values: Vec<String> = mv
            .named_values()
            .into_iter()
            .map(|(n, v)| format!("{n} = {v}"))
            .collect();
        println!(
            "member {i}: {} segments; {}",
            m.segments().len(),
            values.join(", ")
        );
    }
    println!(
        "smallest pairwise L1 distance: {}",
        min_pairwise_l1(&members)
    );
    for (i, a) in members.iter().enumerate() {
        for (j, b) in members.iter().enumerate().skip(i + 1) {
            println!("  L1({i},{j}) = {:.6}", a.density_l1_distance(b));
        }
    }
    Ok(())
}
