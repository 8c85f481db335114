//! Parses every sample spec and prints it back in canonical form.

use riskvec::cli::SpecDocument;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/specs");
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.sort();
    for path in paths {
        let doc = SpecDocument::from_path(&path)?;
        let again = SpecDocument::from_json_str(&doc.to_json())?;
        assert_eq!(doc, again);
        println!(
            "{} ({}): {}",
            doc.name(),
            doc.payload.kind(),
            path.display()
        );
    }
    Ok(())
}
