//! CSV plot data for a spec file, e.g.
//! `cargo run --example plot_data -- examples/specs/triangle_tail.json 20`.

use std::path::PathBuf;

use riskvec::cli::{emit_plot_data, SpecDocument, DEFAULT_RESOLUTION};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/specs/piecewise.json")
    });
    let resolution = match args.next() {
        Some(r) => r.parse()?,
        None => DEFAULT_RESOLUTION,
    };
    let doc = SpecDocument::from_path(&path)?;
    let loss = doc
        .payload
        .loss_distribution()
        .ok_or("the document does not describe a distribution")?;
    emit_plot_data(&loss, resolution, &mut std::io::stdout().lock())?;
    Ok(())
}
