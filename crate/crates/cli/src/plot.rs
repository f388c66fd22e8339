//! Minimal SVG renderings of maps and traces. Presentation only.

use std::fmt::Write as _;

use cqedlab_core::synth::{MapAxis, SpectroMap};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 90.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 60.0;
const MAX_CELLS: usize = 200;

/// Viridis control points.
const PALETTE: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (PALETTE.len() - 1) as f64;
    let i = (t.floor() as usize).min(PALETTE.len() - 2);
    let u = t - i as f64;
    let (a, b) = (PALETTE[i], PALETTE[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * u).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Decimals needed to tell `n` evenly spaced ticks over `span` apart.
fn decimals(span: f64, n: usize) -> usize {
    let step = (span / n as f64).abs();
    if step.is_nan() || step <= 0.0 {
        return 2;
    }
    (1.0 - step.log10().floor()).clamp(0.0, 6.0) as usize
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x.0) / (self.x.1 - self.x.0).max(f64::MIN_POSITIVE) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y.0) / (self.y.1 - self.y.0).max(f64::MIN_POSITIVE) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str, x_scale: f64, y_scale: f64) {
        let (x0, x1) = (self.px(self.x.0), self.px(self.x.1));
        let (y0, y1) = (self.py(self.y.0), self.py(self.y.1));
        writeln!(out, r#"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1).unwrap();
        let dx = decimals((self.x.1 - self.x.0) / x_scale, 4);
        for t in ticks(self.x.0, self.x.1, 4) {
            let px = self.px(t);
            writeln!(
                out,
                r#"<text x="{px:.1}" y="{:.1}" font-size="11" text-anchor="middle">{:.dx$}</text>"#,
                y0 + 16.0,
                t / x_scale
            )
            .unwrap();
        }
        let dy = decimals((self.y.1 - self.y.0) / y_scale, 4);
        for t in ticks(self.y.0, self.y.1, 4) {
            let py = self.py(t);
            writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{:.dy$}</text>"#,
                x0 - 6.0,
                py + 4.0,
                t / y_scale
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{x_label}</text>"#,
            0.5 * (x0 + x1),
            HEIGHT - 15.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{y_label}</text>"#,
            0.5 * (y0 + y1),
            0.5 * (y0 + y1)
        )
        .unwrap();
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" shape-rendering=\"crispEdges\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Block-averages `n` samples into at most `MAX_CELLS` bins, returning index ranges.
fn bins(n: usize) -> Vec<(usize, usize)> {
    let k = n.min(MAX_CELLS);
    (0..k).map(|i| (i * n / k, ((i + 1) * n / k).max(i * n / k + 1))).collect()
}

/// Heatmap of |S21| in dB; frequency on the vertical axis in GHz.
pub fn heatmap_svg(map: &SpectroMap, y_label: &str) -> String {
    let (nx, ny) = map.shape();
    let xb = bins(nx);
    let yb = bins(ny);
    let cells: Vec<Vec<f64>> = xb
        .iter()
        .map(|&(a, b)| {
            yb.iter()
                .map(|&(c, d)| {
                    let sum: f64 = map.values[a..b].iter().flat_map(|col| &col[c..d]).sum();
                    sum / ((b - a) * (d - c)) as f64
                })
                .collect()
        })
        .collect();
    let lo = cells.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = cells.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);

    let frame = Frame {
        x: (map.x_axis[0], map.x_axis[nx - 1]),
        y: (map.y_axis[0], map.y_axis[ny - 1]),
    };
    let edge = |axis: &[f64], i: usize| -> f64 {
        if axis.len() == 1 {
            return axis[0];
        }
        match i {
            0 => axis[0],
            i if i >= axis.len() => axis[axis.len() - 1],
            i => 0.5 * (axis[i - 1] + axis[i]),
        }
    };
    let mut out = header();
    for (ix, &(a, b)) in xb.iter().enumerate() {
        let (x0, x1) = (frame.px(edge(&map.x_axis, a)), frame.px(edge(&map.x_axis, b)));
        for (iy, &(c, d)) in yb.iter().enumerate() {
            let (y0, y1) = (frame.py(edge(&map.y_axis, c)), frame.py(edge(&map.y_axis, d)));
            writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x0.min(x1),
                y0.min(y1),
                (x1 - x0).abs().max(0.5),
                (y1 - y0).abs().max(0.5),
                color((cells[ix][iy] - lo) / span)
            )
            .unwrap();
        }
    }
    let x_label = match map.x_kind {
        MapAxis::Flux => "flux (Φ0)",
        MapAxis::Power => "readout power (dBm)",
    };
    frame.axes(&mut out, x_label, y_label, 1.0, 1e9);

    let bar_x = WIDTH - MARGIN_R + 20.0;
    let steps = 50;
    let top = MARGIN_T;
    let h = HEIGHT - MARGIN_T - MARGIN_B;
    for i in 0..steps {
        let t = 1.0 - i as f64 / steps as f64;
        writeln!(
            out,
            r#"<rect x="{bar_x:.1}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            top + h * i as f64 / steps as f64,
            h / steps as f64 + 0.5,
            color(t)
        )
        .unwrap();
    }
    writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="11">{hi:.1} dB</text>"#, bar_x + 18.0, top + 10.0).unwrap();
    writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="11">{lo:.1} dB</text>"#, bar_x + 18.0, top + h).unwrap();
    out.push_str("</svg>\n");
    out
}

/// Line plot of `y(x)`, downsampled to at most 1000 vertices.
pub fn line_svg(x: &[f64], y: &[f64], x_label: &str, y_label: &str, x_scale: f64, y_scale: f64) -> String {
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (hi - lo).max(1e-12);
    let frame = Frame {
        x: (x[0], x[x.len() - 1]),
        y: (lo - pad, hi + pad),
    };
    let stride = x.len().div_ceil(1000).max(1);
    let mut out = header();
    let mut path = String::new();
    for (i, (&a, &b)) in x.iter().zip(y).enumerate().step_by(stride) {
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(path, "{cmd}{:.2},{:.2} ", frame.px(a), frame.py(b)).unwrap();
    }
    writeln!(out, r##"<path d="{}" fill="none" stroke="#3b528b" stroke-width="1.5"/>"##, path.trim_end()).unwrap();
    frame.axes(&mut out, x_label, y_label, x_scale, y_scale);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_endpoints() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(2.0), "#fde725");
    }

    #[test]
    fn tick_precision_follows_span() {
        assert_eq!(decimals(100.0, 4), 0);
        assert_eq!(decimals(1.0, 4), 2);
        assert_eq!(decimals(0.025, 4), 4);
    }

    #[test]
    fn bins_cover_everything() {
        for n in [1, 7, 200, 201, 1000] {
            let b = bins(n);
            assert!(b.len() <= MAX_CELLS);
            assert_eq!(b[0].0, 0);
            assert_eq!(b.last().unwrap().1, n);
            assert!(b.windows(2).all(|w| w[0].1 == w[1].0));
        }
    }

    #[test]
    fn heatmap_is_downsampled_svg() {
        let x: Vec<f64> = (0..300).map(|i| i as f64 / 299.0 - 0.5).collect();
        let y: Vec<f64> = (0..400).map(|i| 6e9 + i as f64 * 1e5).collect();
        let values = vec![vec![-1.0; 400]; 300];
        let map = SpectroMap::new(MapAxis::Flux, x, y, values).unwrap();
        let svg = heatmap_svg(&map, "frequency (GHz)");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.matches("<rect").count() <= MAX_CELLS * MAX_CELLS + 60);
        assert!(svg.contains("flux (Φ0)"));
    }
}
