//! Pure views of a [`RunReport`]: CSV tables and self-contained SVG charts.
//! Nothing here touches the numbers, and nothing depends on timing, so the
//! same report always renders to the same bytes.

use std::fmt::Write as _;

use super::report::{RunReport, SimilarityHistogram};
use crate::{Error, Result};

fn csv_bytes<F>(header: &[&str], fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Report(format!("csv rendering failed: {e}"));
    w.write_record(header).map_err(io)?;
    fill(&mut w).map_err(io)?;
    w.into_inner()
        .map_err(|e| Error::Report(format!("csv rendering failed: {e}")))
}

pub fn curves_csv(r: &RunReport) -> Result<Vec<u8>> {
    csv_bytes(&["label", "provenance", "k", "score", "stderr", "trials"], |w| {
        for c in &r.curves {
            for i in 0..c.len() {
                w.write_record([
                    c.label.clone(),
                    c.provenance.as_str().to_string(),
                    c.k_values[i].to_string(),
                    c.scores[i].to_string(),
                    c.stderr[i].to_string(),
                    c.trials.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn breakdown_csv(r: &RunReport) -> Result<Vec<u8>> {
    csv_bytes(&["k", "i", "p_plus", "p_exact", "error_estimate"], |w| {
        for b in &r.breakdowns {
            for i in 0..b.p_plus.len() {
                w.write_record([
                    b.k.to_string(),
                    (i + 1).to_string(),
                    b.p_plus[i].to_string(),
                    b.p_exact[i].to_string(),
                    b.error_estimates[i].to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn deltas_csv(r: &RunReport) -> Result<Vec<u8>> {
    csv_bytes(&["reference", "label", "k", "delta"], |w| {
        for d in &r.deltas {
            for (k, v) in d.k_values.iter().zip(&d.deltas) {
                w.write_record([d.reference.clone(), d.label.clone(), k.to_string(), v.to_string()])?;
            }
        }
        Ok(())
    })
}

pub fn histograms_csv(r: &RunReport) -> Result<Vec<u8>> {
    csv_bytes(
        &["distribution", "d", "bin_lo", "bin_hi", "count", "overlay_count", "overlay_mean", "overlay_variance"],
        |w| {
            for h in &r.histograms {
                for (i, c) in h.counts.iter().enumerate() {
                    let (lo, hi) = (h.bin_edges[i], h.bin_edges[i + 1]);
                    w.write_record([
                        h.distribution.clone(),
                        h.dim.to_string(),
                        lo.to_string(),
                        hi.to_string(),
                        c.to_string(),
                        h.overlay_count(0.5 * (lo + hi)).to_string(),
                        h.overlay.mean().to_string(),
                        h.overlay.variance().to_string(),
                    ])?;
                }
            }
            Ok(())
        },
    )
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Roughly `target` round tick values covering [lo, hi].
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Consistency against k for every curve in the report.
pub fn curves_svg(r: &RunReport) -> String {
    let (w, h) = (760.0, 460.0);
    let (ml, mr, mt, mb) = (64.0, 24.0, 36.0, 52.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let ks = r.curves.iter().flat_map(|c| c.k_values.iter().copied());
    let kmin = ks.clone().min().unwrap_or(0) as f64;
    let kmax = ks.max().unwrap_or(1) as f64;
    let kspan = if kmax > kmin { kmax - kmin } else { 1.0 };
    let x = |k: f64| ml + (k - kmin) / kspan * pw;
    let y = |s: f64| mt + (1.0 - s.clamp(0.0, 1.0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">Consistency ({})</text>"#,
        w / 2.0,
        escape(&r.command)
    );
    for t in ticks(0.0, 1.0, 10) {
        let _ = writeln!(
            s,
            r##"<line x1="{ml:.1}" x2="{:.1}" y1="{yy:.1}" y2="{yy:.1}" stroke="#e0e0e0"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            ml + pw,
            ml - 6.0,
            y(t) + 4.0,
            tick_label(t),
            yy = y(t)
        );
    }
    for t in ticks(kmin, kmax, 10) {
        let _ = writeln!(
            s,
            r##"<line x1="{xx:.1}" x2="{xx:.1}" y1="{mt:.1}" y2="{:.1}" stroke="#f0f0f0"/><text x="{xx:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            mt + ph,
            mt + ph + 16.0,
            tick_label(t),
            xx = x(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">k</text>"#,
        ml + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">Consistency_k</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0
    );
    for (ci, c) in r.curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let pts: Vec<String> = c
            .k_values
            .iter()
            .zip(&c.scores)
            .map(|(&k, &v)| format!("{:.2},{:.2}", x(k as f64), y(v)))
            .collect();
        let dash = if c.provenance == crate::evaluator::Provenance::Analytic {
            ""
        } else {
            r#" stroke-dasharray="6 3""#
        };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        for ((&k, &v), &e) in c.k_values.iter().zip(&c.scores).zip(&c.stderr) {
            let xx = x(k as f64);
            if e > 0.0 {
                let _ = writeln!(
                    s,
                    r#"<line x1="{xx:.2}" x2="{xx:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    y(v - 2.0 * e),
                    y(v + 2.0 * e)
                );
            }
            let _ = writeln!(
                s,
                r#"<circle cx="{xx:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                y(v)
            );
        }
        let ly = mt + 16.0 + 16.0 * ci as f64;
        let lx = ml + pw - 300.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.1}" y="{ly:.1}">{}</text>"#,
            lx + 24.0,
            ly - 4.0,
            ly - 4.0,
            lx + 30.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Small multiples: one row per distribution, one column per dimension.
pub fn histograms_svg(r: &RunReport) -> String {
    let mut dists: Vec<&str> = Vec::new();
    let mut dims: Vec<usize> = Vec::new();
    for h in &r.histograms {
        if !dists.contains(&h.distribution.as_str()) {
            dists.push(&h.distribution);
        }
        if !dims.contains(&h.dim) {
            dims.push(h.dim);
        }
    }
    let (cw, chh) = (230.0, 170.0);
    let (w, h) = (cw * dims.len().max(1) as f64 + 20.0, chh * dists.len().max(1) as f64 + 20.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for hist in &r.histograms {
        let row = dists.iter().position(|d| *d == hist.distribution).unwrap_or(0);
        let col = dims.iter().position(|d| *d == hist.dim).unwrap_or(0);
        panel(&mut s, hist, 10.0 + col as f64 * cw, 10.0 + row as f64 * chh, cw - 10.0, chh - 10.0);
    }
    s.push_str("</svg>\n");
    s
}

fn panel(s: &mut String, hist: &SimilarityHistogram, ox: f64, oy: f64, w: f64, h: f64) {
    let (mt, mb) = (18.0, 18.0);
    let ph = h - mt - mb;
    let lo = hist.bin_edges[0];
    let hi = *hist.bin_edges.last().unwrap_or(&lo);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let x = |v: f64| ox + (v - lo) / span * w;
    let samples: Vec<f64> = (0..=120).map(|i| lo + span * i as f64 / 120.0).collect();
    let ymax = hist
        .counts
        .iter()
        .map(|&c| c as f64)
        .chain(samples.iter().map(|&v| hist.overlay_count(v)))
        .fold(1.0, f64::max);
    let y = |c: f64| oy + mt + ph * (1.0 - c / ymax);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{} d={}</text>"#,
        ox + w / 2.0,
        oy + 12.0,
        escape(&hist.distribution),
        hist.dim
    );
    for (i, &c) in hist.counts.iter().enumerate() {
        let (a, b) = (x(hist.bin_edges[i]), x(hist.bin_edges[i + 1]));
        let _ = writeln!(
            s,
            r##"<rect x="{a:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#6baed6" stroke-width="0.3"/>"##,
            y(c as f64),
            (b - a).max(0.0),
            oy + mt + ph - y(c as f64)
        );
    }
    let pts: Vec<String> = samples
        .iter()
        .map(|&v| format!("{:.2},{:.2}", x(v), y(hist.overlay_count(v))))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#d62728" stroke-width="1.2" points="{}"/>"##,
        pts.join(" ")
    );
    let _ = writeln!(
        s,
        r#"<line x1="{ox:.1}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="black"/>"#,
        ox + w,
        oy + mt + ph,
        oy + mt + ph
    );
    for t in ticks(lo, hi, 4) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x(t),
            oy + mt + ph + 12.0,
            tick_label(t)
        );
    }
}
