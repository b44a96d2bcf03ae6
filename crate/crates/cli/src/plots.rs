//! Static SVG figures (presentation only).

use std::path::Path;

use plotters::prelude::*;

use nslab::solver::EnergyLedger;
use nslab::{Error, Result};

fn plot_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

fn log_range(vals: impl Iterator<Item = f64>) -> std::ops::Range<f64> {
    let (lo, hi) = vals
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo.is_finite() {
        lo * 0.8..hi * 1.25
    } else {
        1e-3..1.0
    }
}

const COLORS: [RGBColor; 6] = [BLUE, RED, GREEN, MAGENTA, CYAN, BLACK];

/// Log-log `S₂(|r|)` curves.
pub fn structure_functions(path: &Path, curves: &[(String, Vec<(f64, f64)>)]) -> Result<()> {
    let xr = log_range(curves.iter().flat_map(|c| c.1.iter().map(|p| p.0)));
    let yr = log_range(curves.iter().flat_map(|c| c.1.iter().map(|p| p.1)));
    let root = SVGBackend::new(path, (720, 540)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .margin(20)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(xr.log_scale(), yr.log_scale())
        .map_err(|e| plot_err(path, e))?;
    chart
        .configure_mesh()
        .x_desc("|r|")
        .y_desc("S2")
        .draw()
        .map_err(|e| plot_err(path, e))?;
    for (k, (label, pts)) in curves.iter().enumerate() {
        let c = COLORS[k % COLORS.len()];
        let pts: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
        chart
            .draw_series(LineSeries::new(pts.clone(), c))
            .map_err(|e| plot_err(path, e))?
            .label(label.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], c));
        chart
            .draw_series(pts.into_iter().map(|p| Circle::new(p, 3, c.filled())))
            .map_err(|e| plot_err(path, e))?;
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .draw()
        .map_err(|e| plot_err(path, e))?;
    root.present().map_err(|e| plot_err(path, e))
}

/// `max_j |V_j|` against `ν`, log-log.
pub fn residual_trend(path: &Path, pts: &[(f64, f64)]) -> Result<()> {
    structure_functions(path, &[("max |V_j| vs nu".to_string(), pts.to_vec())])
}

/// Kinetic energy and cumulative dissipation against time.
pub fn energy(path: &Path, ledger: &EnergyLedger) -> Result<()> {
    let t_max = ledger.times.last().copied().unwrap_or(1.0).max(1e-12);
    let y_max = ledger
        .kinetic
        .iter()
        .chain(&ledger.dissipation_bulk)
        .fold(0.0_f64, |m, v| m.max(*v))
        .max(1e-12)
        * 1.05;
    let root = SVGBackend::new(path, (720, 540)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .margin(20)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..t_max, 0.0..y_max)
        .map_err(|e| plot_err(path, e))?;
    chart.configure_mesh().x_desc("t").draw().map_err(|e| plot_err(path, e))?;
    let series = [("E", &ledger.kinetic, BLUE), ("D_bulk", &ledger.dissipation_bulk, RED)];
    for (label, ys, c) in series {
        chart
            .draw_series(LineSeries::new(ledger.times.iter().copied().zip(ys.iter().copied()), c))
            .map_err(|e| plot_err(path, e))?
            .label(label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], c));
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .draw()
        .map_err(|e| plot_err(path, e))?;
    root.present().map_err(|e| plot_err(path, e))
}
