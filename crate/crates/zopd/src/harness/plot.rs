//! Static SVG comparison plots from an aggregated results bundle: median
//! curves with interquartile bands, log-scale y, one curve per solver.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::aggregate::{read_aggregate_csv, AggregateRow};
use crate::error::{Error, Result};

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

struct SeriesData {
    solver: String,
    points: Vec<(f64, f64, f64, f64)>, // (r, median, q25, q75)
}

fn collect_series(
    rows: &[AggregateRow],
    pick: impl Fn(&AggregateRow) -> (f64, f64, f64),
) -> Vec<SeriesData> {
    let mut order: Vec<String> = Vec::new();
    for row in rows {
        if !order.contains(&row.solver) {
            order.push(row.solver.clone());
        }
    }
    order
        .into_iter()
        .map(|solver| {
            let mut points: Vec<(f64, f64, f64, f64)> = rows
                .iter()
                .filter(|r| r.solver == solver)
                .map(|r| {
                    let (m, lo, hi) = pick(r);
                    (r.iteration as f64, m, lo, hi)
                })
                .collect();
            points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            SeriesData { solver, points }
        })
        .collect()
}

fn draw_log_chart(path: &Path, title: &str, y_label: &str, series: &[SeriesData]) -> Result<()> {
    // A log axis needs strictly positive values; clamp to a floor derived
    // from the data.
    let mut min_pos = f64::INFINITY;
    let mut max_val = f64::NEG_INFINITY;
    let mut max_r = 1.0f64;
    for s in series {
        for &(r, m, lo, hi) in &s.points {
            for v in [m, lo, hi] {
                if v > 0.0 && v < min_pos {
                    min_pos = v;
                }
                if v > max_val {
                    max_val = v;
                }
            }
            if r > max_r {
                max_r = r;
            }
        }
    }
    if !min_pos.is_finite() {
        min_pos = 1e-16;
    }
    if !(max_val > 0.0) {
        max_val = 1.0;
    }
    let floor = (min_pos * 0.5).max(1e-300);
    let ceil = max_val * 2.0;
    let clamp = move |v: f64| if v > floor { v } else { floor };

    let root = SVGBackend::new(path, (920, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| Error::Plot(e.to_string()))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 26))
        .margin(12)
        .x_label_area_size(44)
        .y_label_area_size(70)
        .build_cartesian_2d(0.0..max_r * 1.02, (floor..ceil).log_scale())
        .map_err(|e| Error::Plot(e.to_string()))?;
    chart
        .configure_mesh()
        .x_desc("iteration")
        .y_desc(y_label)
        .draw()
        .map_err(|e| Error::Plot(e.to_string()))?;

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut band: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|&(r, _, _, hi)| (r, clamp(hi)))
            .collect();
        band.extend(s.points.iter().rev().map(|&(r, _, lo, _)| (r, clamp(lo))));
        chart
            .draw_series(std::iter::once(Polygon::new(band, color.mix(0.18))))
            .map_err(|e| Error::Plot(e.to_string()))?;
        chart
            .draw_series(LineSeries::new(
                s.points.iter().map(|&(r, m, _, _)| (r, clamp(m))),
                color.stroke_width(2),
            ))
            .map_err(|e| Error::Plot(e.to_string()))?
            .label(s.solver.clone())
            .legend(move |(x, y)| PathElement::new([(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.85))
        .draw()
        .map_err(|e| Error::Plot(e.to_string()))?;
    root.present().map_err(|e| Error::Plot(e.to_string()))?;
    Ok(())
}

/// Renders `optimality_residual.svg` and `constraint_violation.svg` next to
/// the bundle's `aggregate.csv`. Returns the written paths (empty, with a
/// warning, when the aggregate holds no solvers).
pub fn plot_results(results_dir: &Path) -> Result<Vec<PathBuf>> {
    let aggregate = results_dir.join("aggregate.csv");
    let rows = read_aggregate_csv(&aggregate)?;
    if rows.is_empty() {
        log::warn!(
            "aggregate at {} holds no solver data; nothing to plot",
            aggregate.display()
        );
        return Ok(Vec::new());
    }

    let psi_series = collect_series(&rows, |r| (r.psi_median, r.psi_q25, r.psi_q75));
    let cv_series = collect_series(&rows, |r| (r.cv_median, r.cv_q25, r.cv_q75));

    let psi_path = results_dir.join("optimality_residual.svg");
    draw_log_chart(
        &psi_path,
        "Optimality residual vs iteration (median, IQR band)",
        "optimality residual",
        &psi_series,
    )?;
    let cv_path = results_dir.join("constraint_violation.svg");
    draw_log_chart(
        &cv_path,
        "Constraint violation vs iteration (median, IQR band)",
        "constraint violation",
        &cv_series,
    )?;
    Ok(vec![psi_path, cv_path])
}
