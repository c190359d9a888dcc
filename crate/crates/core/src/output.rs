//! CSV and SVG writers. Output depends only on the data, never on time or
//! environment, so repeated runs are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::grid::GridFunction;

/// Residuals at or below zero are drawn at this value.
pub const PLOT_FLOOR: f64 = 1e-18;

/// `iteration,residual`, one row per step, 17 significant digits.
pub fn residual_csv(residuals: &[f64]) -> String {
    let mut out = String::from("iteration,residual\n");
    for (n, r) in residuals.iter().enumerate() {
        writeln!(out, "{n},{r:.16e}").expect("writing to a String");
    }
    out
}

/// `t,value` per node.
pub fn grid_csv(f: &GridFunction) -> String {
    let mut out = String::from("t,value\n");
    for (t, v) in f.nodes() {
        writeln!(out, "{t:.16e},{v:.16e}").expect("writing to a String");
    }
    out
}

/// Writes `contents`, refusing to replace an existing file unless `force`.
/// Missing parent directories are created.
pub fn write_output(path: &Path, contents: &str, force: bool) -> io::Result<()> {
    if path.exists() && !force {
        return Err(io::Error::new(
            io::ErrorKind::AlreadyExists,
            format!("{} exists (pass --force to overwrite)", path.display()),
        ));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)
}

#[derive(Debug, Clone)]
pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Self-contained semilog-y SVG of one or more series against their index.
pub fn semilog_svg(title: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let floored = |v: f64| {
        if v > 0.0 {
            v.max(PLOT_FLOOR)
        } else {
            PLOT_FLOOR
        }
    };
    let any_floored = series
        .iter()
        .flat_map(|s| s.values)
        .any(|&v| !(v > PLOT_FLOOR));
    let all: Vec<f64> = series
        .iter()
        .flat_map(|s| s.values.iter().map(|&v| floored(v)))
        .collect();
    let max_len = series.iter().map(|s| s.values.len()).max().unwrap_or(0);

    let (mut lo, mut hi) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v.log10()), hi.max(v.log10()))
        });
    if !lo.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    lo = lo.floor();
    hi = hi.ceil();
    if hi <= lo {
        hi = lo + 1.0;
    }
    let x_max = (max_len.saturating_sub(1)).max(1) as f64;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |i: usize| LEFT + plot_w * i as f64 / x_max;
    let py = |v: f64| TOP + plot_h * (hi - floored(v).log10()) / (hi - lo);

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    )
    .unwrap();

    let decades = (hi - lo) as i64;
    let stride = (decades / 10).max(1);
    for k in (0..=decades).step_by(stride as usize) {
        let e = lo as i64 + k;
        let y = TOP + plot_h * (hi - e as f64) / (hi - lo);
        writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.1}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        )
        .unwrap();
    }
    let x_stride = ((x_max as usize) / 10).max(1);
    for i in (0..=x_max as usize).step_by(x_stride) {
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{i}</text>"#,
            px(i),
            TOP + plot_h + 18.0
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">iteration n</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    )
    .unwrap();

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        if s.values.len() > 1 {
            let points: Vec<String> = s
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| format!("{:.2},{:.2}", px(i), py(v)))
                .collect();
            writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            )
            .unwrap();
        }
        for (i, &v) in s.values.iter().enumerate() {
            writeln!(
                w,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                px(i),
                py(v)
            )
            .unwrap();
        }
        writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}" text-anchor="end">{}</text>"#,
            LEFT + plot_w - 8.0,
            TOP + 16.0 + 16.0 * k as f64,
            escape(s.label)
        )
        .unwrap();
    }
    if any_floored {
        writeln!(
            w,
            r#"<text x="{:.1}" y="{:.1}" font-style="italic">values at or below 1e-18 drawn at 1e-18</text>"#,
            LEFT + 8.0,
            TOP + plot_h - 8.0
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_csv_format() {
        let csv = residual_csv(&[0.75, 0.1875]);
        assert_eq!(
            csv,
            "iteration,residual\n0,7.5000000000000000e-1\n1,1.8750000000000000e-1\n"
        );
    }

    #[test]
    fn grid_csv_rows() {
        let f = GridFunction::from_fn(2, |t| t).unwrap();
        assert_eq!(grid_csv(&f).lines().count(), 4);
    }

    #[test]
    fn svg_single_point_has_no_polyline() {
        let svg = semilog_svg(
            "t",
            "r",
            &[Series {
                label: "x",
                values: &[0.5],
            }],
        );
        assert!(!svg.contains("<polyline"));
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn svg_floors_zero_and_notes_it() {
        let svg = semilog_svg(
            "t",
            "r",
            &[Series {
                label: "x",
                values: &[1.0, 0.0],
            }],
        );
        assert!(svg.contains("drawn at 1e-18"));
        assert!(svg.contains("<polyline"));
        let clean = semilog_svg(
            "t",
            "r",
            &[Series {
                label: "x",
                values: &[1.0, 0.5],
            }],
        );
        assert!(!clean.contains("drawn at 1e-18"));
    }

    #[test]
    fn geometric_series_is_a_straight_line() {
        let values: Vec<f64> = (0..20).map(|k| 4f64.powi(-k)).collect();
        let svg = semilog_svg(
            "t",
            "r",
            &[Series {
                label: "x",
                values: &values,
            }],
        );
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts: Vec<(f64, f64)> = line
            .split("points=\"")
            .nth(1)
            .unwrap()
            .trim_end_matches("\"/>")
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        let slope = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (b.0 - a.0);
        let s0 = slope(pts[0], pts[1]);
        for w in pts.windows(2) {
            assert!((slope(w[0], w[1]) - s0).abs() < 0.05);
        }
    }

    #[test]
    fn refuses_overwrite_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.csv");
        write_output(&path, "a", false).unwrap();
        assert!(write_output(&path, "b", false).is_err());
        write_output(&path, "b", true).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "b");
    }
}
