//! Hand-rolled SVG output: trajectory renders and fitness-curve plots.

use crate::population::GenerationRecord;
use crate::sim::{ArenaSpec, TrajectoryRow};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Draw the arena, interior wall and one polyline per agent with a filled
/// marker at the terminal position.
pub fn render_trajectory(arena: &ArenaSpec, rows: &[TrajectoryRow]) -> String {
    const SIZE: f64 = 640.0;
    const MARGIN: f64 = 24.0;
    let w = arena.x_max - arena.x_min;
    let h = arena.y_max - arena.y_min;
    let scale = ((SIZE - 2.0 * MARGIN) / w).min((SIZE - 2.0 * MARGIN) / h);
    let px = |x: f64| MARGIN + (x - arena.x_min) * scale;
    // SVG y grows downward.
    let py = |y: f64| MARGIN + (arena.y_max - y) * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        MARGIN * 2.0 + w * scale,
        MARGIN * 2.0 + h * scale,
        MARGIN * 2.0 + w * scale,
        MARGIN * 2.0 + h * scale
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="white" stroke="black" stroke-width="2"/>"#,
        px(arena.x_min),
        py(arena.y_max),
        w * scale,
        h * scale
    );
    if let Some(wall) = &arena.wall {
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="dimgray"/>"#,
            px(wall.x - wall.thickness / 2.0),
            py(arena.y_max),
            (wall.thickness * scale).max(2.0),
            h * scale
        );
    }

    let mut per_agent: BTreeMap<usize, Vec<&TrajectoryRow>> = BTreeMap::new();
    for r in rows {
        per_agent.entry(r.agent).or_default().push(r);
    }
    let n = per_agent.len().max(1);
    for (agent, samples) in &per_agent {
        let hue = (*agent * 360) / n;
        let color = format!("hsl({hue}, 70%, 45%)");
        let points: String = samples
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r.x), py(r.y)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.2" opacity="0.8"/>"#
        );
        if let Some(last) = samples.last() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                px(last.x),
                py(last.y)
            );
        }
        if let Some(first) = samples.first() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="{color}"/>"#,
                px(first.x),
                py(first.y)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Plot best and mean fitness against generation with a ±1 stdev band
/// around the mean.
pub fn plot_evolution(records: &[GenerationRecord]) -> String {
    const W: f64 = 720.0;
    const H: f64 = 440.0;
    const ML: f64 = 64.0;
    const MR: f64 = 16.0;
    const MT: f64 = 16.0;
    const MB: f64 = 48.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0}" height="{H:.0}" viewBox="0 0 {W:.0} {H:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if records.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }

    let g_max = records.iter().map(|r| r.generation).max().unwrap().max(1) as f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in records {
        lo = lo.min(r.mean_fitness - r.fitness_stdev).min(r.best_fitness);
        hi = hi.max(r.mean_fitness + r.fitness_stdev).max(r.best_fitness);
    }
    if (hi - lo).abs() < 1e-9 {
        hi = lo + 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let px = |g: f64| ML + g / g_max * (W - ML - MR);
    let py = |f: f64| MT + (hi - f) / (hi - lo) * (H - MT - MB);

    // Axes with a few ticks.
    let _ = writeln!(
        svg,
        r#"<line x1="{ML}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        H - MB,
        W - MR,
        H - MB
    );
    let _ = writeln!(svg, r#"<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{}" stroke="black"/>"#, H - MB);
    for i in 0..=4 {
        let f = lo + (hi - lo) * i as f64 / 4.0;
        let y = py(f);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{:.2}</text>"#,
            ML - 6.0,
            y + 4.0,
            f
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{ML}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="lightgray" stroke-dasharray="3,3"/>"#,
            W - MR
        );
        let g = g_max * i as f64 / 4.0;
        let x = px(g);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{g:.0}</text>"#,
            x,
            H - MB + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            H - MB,
            H - MB + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">generation</text>"#,
        (ML + W - MR) / 2.0,
        H - 12.0
    );

    // Stdev band around the mean.
    let mut band = String::new();
    for r in records {
        let _ = write!(
            band,
            "{:.1},{:.1} ",
            px(r.generation as f64),
            py(r.mean_fitness + r.fitness_stdev)
        );
    }
    for r in records.iter().rev() {
        let _ = write!(
            band,
            "{:.1},{:.1} ",
            px(r.generation as f64),
            py(r.mean_fitness - r.fitness_stdev)
        );
    }
    let _ = writeln!(
        svg,
        r#"<polygon points="{}" fill="steelblue" opacity="0.15"/>"#,
        band.trim_end()
    );

    let line = |field: fn(&GenerationRecord) -> f64, color: &str, dash: &str| -> String {
        let pts: String = records
            .iter()
            .map(|r| format!("{:.1},{:.1}", px(r.generation as f64), py(field(r))))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            r#"<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"{dash}/>"#
        )
    };
    let _ = writeln!(svg, "{}", line(|r| r.mean_fitness, "steelblue", r#" stroke-dasharray="5,3""#));
    let _ = writeln!(svg, "{}", line(|r| r.best_fitness, "firebrick", ""));
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{MT}" font-size="12" fill="firebrick">best</text>"#,
        W - MR - 80.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" fill="steelblue">mean ± stdev</text>"#,
        W - MR - 80.0,
        MT + 16.0
    );
    svg.push_str("</svg>\n");
    svg
}
