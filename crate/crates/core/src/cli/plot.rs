use std::io::{self, Write};

use crate::distributions::LossDistribution;

pub const DEFAULT_RESOLUTION: usize = 50;

/// One CSV row: a density sample (`atom_mass` empty) or an atom (`density` empty).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlotRow {
    Density { x: f64, density: f64 },
    Atom { x: f64, mass: f64 },
}

impl PlotRow {
    pub fn x(&self) -> f64 {
        match *self {
            PlotRow::Density { x, .. } | PlotRow::Atom { x, .. } => x,
        }
    }
}

/// Samples every segment at `resolution` evenly spaced points, endpoints
/// included, and lists each atom once. Rows are sorted by `x`.
pub fn plot_rows(loss: &LossDistribution, resolution: usize) -> Vec<PlotRow> {
    let resolution = resolution.max(2);
    let mut rows = Vec::new();
    for s in loss.segments() {
        for i in 0..resolution {
            let x = if i == 0 {
                s.a
            } else if i == resolution - 1 {
                s.b
            } else {
                s.a + s.width() * i as f64 / (resolution - 1) as f64
            };
            let t = (x - s.a) / s.width();
            rows.push(PlotRow::Density {
                x,
                density: s.f_a + (s.f_b - s.f_a) * t,
            });
        }
    }
    for &(x, mass) in loss.atoms() {
        rows.push(PlotRow::Atom { x, mass });
    }
    rows.sort_by(|a, b| a.x().total_cmp(&b.x()));
    rows
}

/// Writes `x,density,atom_mass` CSV for plotting a loss distribution.
pub fn emit_plot_data<W: Write>(
    loss: &LossDistribution,
    resolution: usize,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "x,density,atom_mass")?;
    for row in plot_rows(loss, resolution) {
        match row {
            PlotRow::Density { x, density } => writeln!(out, "{x},{density},")?,
            PlotRow::Atom { x, mass } => writeln!(out, "{x},,{mass}")?,
        }
    }
    Ok(())
}
