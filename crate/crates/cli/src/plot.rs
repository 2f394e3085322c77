//! Hand-written SVG figures in the angle chart `(φ, θ) ∈ [0, 2π) × [0, π]`.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use manifold_regress::sphere::{exp_coords, from_angles, log_map, to_angles};
use manifold_regress::{AnglePair, Dataset, SpherePoint};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 20.0;
const PLOT_W: f64 = 820.0;
const PLOT_H: f64 = 410.0;
const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct PlotInput<'a> {
    pub data: Option<&'a Dataset>,
    pub truth: Option<&'a [(f64, SpherePoint)]>,
    pub preds: Vec<(String, Vec<(f64, SpherePoint)>)>,
    pub gridlines: bool,
}

fn px(a: &AnglePair) -> (f64, f64) {
    (LEFT + a.phi / TAU * PLOT_W, TOP + a.theta / PI * PLOT_H)
}

fn angles(p: &SpherePoint) -> AnglePair {
    to_angles(p).expect("points on S^2")
}

/// Colour of covariate value `t ∈ [0, 1]` on a red-to-violet scale.
pub fn rainbow(t: f64) -> String {
    format!("hsl({:.1},85%,45%)", 270.0 * t.clamp(0.0, 1.0))
}

/// Splits a path into pieces wherever `φ` jumps across the `0 / 2π` seam.
pub fn split_at_wrap(points: &[AnglePair]) -> Vec<Vec<AnglePair>> {
    let mut pieces: Vec<Vec<AnglePair>> = Vec::new();
    let mut current: Vec<AnglePair> = Vec::new();
    for p in points {
        if let Some(last) = current.last() {
            if (p.phi - last.phi).abs() > PI {
                pieces.push(std::mem::take(&mut current));
            }
        }
        current.push(*p);
    }
    if !current.is_empty() {
        pieces.push(current);
    }
    pieces
}

fn polyline(out: &mut String, piece: &[AnglePair], stroke: &str, width: f64) {
    if piece.len() < 2 {
        return;
    }
    let pts: Vec<String> = piece
        .iter()
        .map(|a| {
            let (x, y) = px(a);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}" stroke-linejoin="round"/>"#,
        pts.join(" ")
    )
    .unwrap();
}

/// Draws a curve as an outer border stroke with a thinner inner stroke.
fn bordered_curve(out: &mut String, class: &str, trace: &[(f64, SpherePoint)], border: &str, inner: &str) {
    let pts: Vec<AnglePair> = trace.iter().map(|(_, p)| angles(p)).collect();
    let pieces = split_at_wrap(&pts);
    writeln!(out, r#"<g class="{class}">"#).unwrap();
    for piece in &pieces {
        polyline(out, piece, border, 4.0);
    }
    for piece in &pieces {
        polyline(out, piece, inner, 1.5);
    }
    out.push_str("</g>\n");
}

/// Point of a sampled curve at `t` by geodesic interpolation between samples.
pub fn interpolate(trace: &[(f64, SpherePoint)], t: f64) -> SpherePoint {
    let j = trace.partition_point(|(s, _)| *s < t);
    if j == 0 {
        return trace[0].1.clone();
    }
    if j == trace.len() {
        return trace[j - 1].1.clone();
    }
    let (t0, a) = &trace[j - 1];
    let (t1, b) = &trace[j];
    let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
    match log_map(a, b) {
        Ok(v) => {
            let step: Vec<f64> = v.iter().map(|c| c * s).collect();
            SpherePoint::new(exp_coords(a.coords(), &step)).expect("unit vector")
        }
        Err(_) => a.clone(),
    }
}

/// Great circle with unit normal `normal`, sampled at 361 points.
fn great_circle(normal: &SpherePoint) -> Vec<AnglePair> {
    let basis = manifold_regress::sphere::tangent_basis(normal);
    (0..=360)
        .map(|i| {
            let s = i as f64 / 360.0 * TAU;
            let (sn, cs) = s.sin_cos();
            let p: Vec<f64> = (0..3).map(|j| cs * basis[0][j] + sn * basis[1][j]).collect();
            angles(&SpherePoint::new(p).expect("unit vector"))
        })
        .collect()
}

fn axes(out: &mut String) {
    writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="#fafafa" stroke="#333" stroke-width="1"/>"##
    )
    .unwrap();
    let phi_ticks = [(0.0, "0"), (PI / 2.0, "π/2"), (PI, "π"), (1.5 * PI, "3π/2"), (TAU, "2π")];
    for (v, label) in phi_ticks {
        let x = LEFT + v / TAU * PLOT_W;
        let y = TOP + PLOT_H;
        writeln!(out, r##"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/>"##, y + 5.0).unwrap();
        writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="13">{label}</text>"#, y + 20.0).unwrap();
    }
    let theta_ticks = [(0.0, "0"), (PI / 4.0, "π/4"), (PI / 2.0, "π/2"), (0.75 * PI, "3π/4"), (PI, "π")];
    for (v, label) in theta_ticks {
        let y = TOP + v / PI * PLOT_H;
        writeln!(out, r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#333"/>"##, LEFT - 5.0).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="13">{label}</text>"#, LEFT - 8.0, y + 4.0)
            .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">φ</text>"#,
        LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 40.0
    )
    .unwrap();
    writeln!(out, r#"<text x="15" y="{:.2}" text-anchor="middle" font-size="14">θ</text>"#, TOP + PLOT_H / 2.0).unwrap();
}

pub fn render(input: &PlotInput) -> String {
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    axes(&mut out);

    if input.gridlines {
        out.push_str("<g class=\"gridlines\">\n");
        let normals = (0..6)
            .map(|j| AnglePair::new(PI / 2.0, j as f64 * PI / 6.0))
            .chain((0..6).map(|j| AnglePair::new(PI / 4.0, j as f64 * PI / 3.0)));
        for n in normals {
            for piece in split_at_wrap(&great_circle(&from_angles(n))) {
                polyline(&mut out, &piece, "#c8c8c8", 0.6);
            }
        }
        out.push_str("</g>\n");
    }

    if let (Some(data), Some(truth)) = (input.data, input.truth) {
        out.push_str("<g class=\"residuals\">\n");
        for (x, y) in data.xs.iter().zip(&data.ys) {
            let (x0, y0) = px(&angles(y.as_sphere().expect("sphere data")));
            let m = interpolate(truth, *x);
            let (x1, y1) = px(&angles(&m));
            // Skip segments that would cross the seam.
            if (x1 - x0).abs() < PLOT_W / 2.0 {
                writeln!(
                    out,
                    r##"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="#888" stroke-width="0.5"/>"##
                )
                .unwrap();
            }
        }
        out.push_str("</g>\n");
    }

    if let Some(truth) = input.truth {
        bordered_curve(&mut out, "truth", truth, "black", "white");
    }
    for (i, (_, trace)) in input.preds.iter().enumerate() {
        bordered_curve(&mut out, "estimate", trace, PALETTE[i % PALETTE.len()], "white");
    }

    if let Some(data) = input.data {
        let (lo, hi) = data.domain;
        out.push_str("<g class=\"observations\">\n");
        for (x, y) in data.xs.iter().zip(&data.ys) {
            let (cx, cy) = px(&angles(y.as_sphere().expect("sphere data")));
            writeln!(
                out,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="{}" stroke="black" stroke-width="0.4"/>"#,
                rainbow((x - lo) / (hi - lo))
            )
            .unwrap();
        }
        out.push_str("</g>\n");
    }

    if !input.preds.is_empty() {
        out.push_str("<g class=\"legend\">\n");
        for (i, (label, _)) in input.preds.iter().enumerate() {
            let y = TOP + 15.0 + 18.0 * i as f64;
            let x = LEFT + PLOT_W - 150.0;
            writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="4"/>"#,
                x + 25.0,
                PALETTE[i % PALETTE.len()]
            )
            .unwrap();
            writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, x + 32.0, y + 4.0, escape(label)).unwrap();
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_split() {
        let pts: Vec<AnglePair> = [6.0, 6.2, 0.1, 0.3].iter().map(|&phi| AnglePair::new(1.0, phi)).collect();
        let pieces = split_at_wrap(&pts);
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].len(), 2);
        let flat: Vec<AnglePair> = [1.0, 2.0, 3.0].iter().map(|&phi| AnglePair::new(1.0, phi)).collect();
        assert_eq!(split_at_wrap(&flat).len(), 1);
    }

    #[test]
    fn interpolation_hits_samples_and_midpoints() {
        let a = SpherePoint::basis(3, 0);
        let b = SpherePoint::basis(3, 1);
        let trace = vec![(0.0, a.clone()), (1.0, b.clone())];
        assert_eq!(interpolate(&trace, 0.0), a);
        assert_eq!(interpolate(&trace, 2.0), b);
        let mid = interpolate(&trace, 0.5);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((mid.coords()[0] - r).abs() < 1e-12 && (mid.coords()[1] - r).abs() < 1e-12);
    }

    #[test]
    fn rainbow_endpoints() {
        assert_eq!(rainbow(0.0), "hsl(0.0,85%,45%)");
        assert_eq!(rainbow(1.0), "hsl(270.0,85%,45%)");
    }
}
