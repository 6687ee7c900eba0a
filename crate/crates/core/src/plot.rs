//! Static SVG line charts of sweep results with bound overlays.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::bounds::delavega_tournament_bound;
use crate::experiment::ExperimentRecord;
use crate::random::pair_count;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("records do not share a single sweep variable")]
    MixedSweep,
    #[error("nothing to plot")]
    Empty,
    #[error("unknown overlay `{0}` (expected thm31, heuristic, half-m, delavega)")]
    UnknownOverlay(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overlays {
    pub thm31: bool,
    pub heuristic: bool,
    pub half_m: bool,
    pub delavega: bool,
}

impl Overlays {
    pub fn all() -> Self {
        Overlays { thm31: true, heuristic: true, half_m: true, delavega: true }
    }

    pub fn none() -> Self {
        Overlays::default()
    }
}

impl FromStr for Overlays {
    type Err = PlotError;

    /// Comma-separated names; `all` and `none` are accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut o = Overlays::none();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "all" => o = Overlays::all(),
                "none" => {}
                "thm31" => o.thm31 = true,
                "heuristic" => o.heuristic = true,
                "half-m" | "half_m" => o.half_m = true,
                "delavega" => o.delavega = true,
                other => return Err(PlotError::UnknownOverlay(other.to_string())),
            }
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    P,
}

/// Which column varies across `records`.
pub fn sweep_axis(records: &[ExperimentRecord]) -> Result<Axis, PlotError> {
    let first = records.first().ok_or(PlotError::Empty)?;
    if records.iter().any(|r| r.model != first.model) {
        return Err(PlotError::MixedSweep);
    }
    let n_varies = records.iter().any(|r| r.n != first.n);
    let p_varies = records.iter().any(|r| r.p != first.p);
    match (n_varies, p_varies) {
        (true, true) => {
            // An n-sweep at fixed density still has identical p on every row.
            Err(PlotError::MixedSweep)
        }
        (false, true) => Ok(Axis::P),
        _ => Ok(Axis::N),
    }
}

struct Series {
    label: &'static str,
    color: &'static str,
    dash: Option<&'static str>,
    points: Vec<(f64, f64)>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1.0 || v == 0.0 {
        format!("{}", (v * 1e6).round() / 1e6)
    } else {
        format!("{:.2}", v)
    }
}

pub fn render_svg(records: &[ExperimentRecord], overlays: Overlays) -> Result<String, PlotError> {
    let axis = sweep_axis(records)?;
    let x_of = |r: &ExperimentRecord| match axis {
        Axis::N => r.n as f64,
        Axis::P => r.p.unwrap_or(f64::NAN),
    };

    let mut series = vec![Series {
        label: "mean Y* (solver)",
        color: "#000000",
        dash: None,
        points: records.iter().map(|r| (x_of(r), r.ystar_mean)).collect(),
    }];
    if overlays.thm31 {
        series.push(Series {
            label: "lower bound",
            color: "#ff8c00",
            dash: None,
            points: records.iter().filter_map(|r| r.bound_thm31.map(|b| (x_of(r), b))).collect(),
        });
    }
    if overlays.heuristic {
        series.push(Series {
            label: "heuristic estimate",
            color: "#d62728",
            dash: None,
            points: records.iter().filter_map(|r| r.heuristic_est.map(|h| (x_of(r), h))).collect(),
        });
    }
    if overlays.half_m {
        series.push(Series {
            label: "M/2",
            color: "#7f7f7f",
            dash: Some("6,4"),
            points: records.iter().map(|r| (x_of(r), r.half_m)).collect(),
        });
    }
    if overlays.delavega {
        series.push(Series {
            label: "tournament bound",
            color: "#1f77b4",
            dash: Some("2,3"),
            points: records
                .iter()
                .filter(|r| r.m_expected == pair_count(r.n) as f64)
                .map(|r| (x_of(r), delavega_tournament_bound(r.n as u64)))
                .collect(),
        });
    }

    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    if all.is_empty() {
        return Err(PlotError::Empty);
    }
    let (mut x0, mut x1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (mut y0, mut y1) = all.iter().fold((0.0f64, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if x1 - x0 <= 0.0 {
        let pad = if axis == Axis::P { 0.05 } else { 1.0 };
        x0 -= pad;
        x1 += pad;
    }
    if y1 - y0 <= 0.0 {
        y1 = y0 + 1.0;
    }
    let ystep = nice_step(y1 - y0);
    y0 = (y0 / ystep).floor() * ystep;
    y1 = (y1 / ystep).ceil() * ystep;

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{} sweep, model {}</text>"#,
        LEFT + pw / 2.0,
        if axis == Axis::N { "n" } else { "p" },
        records[0].model
    );

    // axes and ticks
    let _ = writeln!(
        svg,
        r#"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="black"/>"#,
        l = LEFT,
        t = TOP,
        b = TOP + ph,
        r = LEFT + pw
    );
    let mut y = y0;
    while y <= y1 + ystep * 1e-9 {
        let py = sy(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#dddddd"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0,
            fmt_tick(y)
        );
        y += ystep;
    }
    let xstep = nice_step(x1 - x0);
    let mut x = (x0 / xstep).ceil() * xstep;
    while x <= x1 + xstep * 1e-9 {
        let px = sx(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 20.0,
            fmt_tick(x)
        );
        x += xstep;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        if axis == Axis::N { "n (vertices)" } else { "p (edge probability)" }
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">arcs</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        let dash = s.dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        if pts.len() > 1 {
            let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"{dash}/>"#,
                coords.join(" "),
                s.color
            );
        }
        for &(x, y) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#, sx(x), sy(y), s.color);
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 25.0,
            s.color,
            lx + 32.0,
            ly + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(records: &[ExperimentRecord], path: &Path, overlays: Overlays) -> Result<(), PlotError> {
    let svg = render_svg(records, overlays)?;
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize, p: Option<f64>) -> ExperimentRecord {
        ExperimentRecord {
            model: "gnp".into(),
            n,
            p,
            m_expected: 10.0,
            m_realized_mean: 10.0,
            trials: 1,
            ystar_mean: 3.0,
            ystar_std: 0.0,
            ystar_min: 3.0,
            ystar_max: 3.0,
            exact_fraction: 1.0,
            bound_thm31: Some(1.0),
            heuristic_est: Some(2.5),
            half_m: 5.0,
            seed: 0,
        }
    }

    #[test]
    fn overlay_parsing() {
        assert_eq!("all".parse::<Overlays>().unwrap(), Overlays::all());
        assert_eq!("".parse::<Overlays>().unwrap(), Overlays::none());
        let o: Overlays = "thm31,half-m".parse().unwrap();
        assert!(o.thm31 && o.half_m && !o.heuristic);
        assert!("bogus".parse::<Overlays>().is_err());
    }

    #[test]
    fn axis_detection() {
        assert_eq!(sweep_axis(&[rec(10, Some(0.5)), rec(20, Some(0.5))]).unwrap(), Axis::N);
        assert_eq!(sweep_axis(&[rec(50, Some(0.1)), rec(50, Some(0.2))]).unwrap(), Axis::P);
        assert!(matches!(
            sweep_axis(&[rec(10, Some(0.1)), rec(20, Some(0.2))]),
            Err(PlotError::MixedSweep)
        ));
        let mut other = rec(20, Some(0.5));
        other.model = "gnm".into();
        assert!(matches!(sweep_axis(&[rec(10, Some(0.5)), other]), Err(PlotError::MixedSweep)));
        assert!(matches!(sweep_axis(&[]), Err(PlotError::Empty)));
    }

    #[test]
    fn single_point_draws_markers_only() {
        let svg = render_svg(&[rec(10, Some(0.5))], Overlays::all()).unwrap();
        assert!(!svg.contains("<polyline"));
        // mean, thm31, heuristic, half-m (no tournament point)
        assert_eq!(svg.matches("<circle").count(), 4);
    }

    #[test]
    fn empty_overlay_set_draws_one_curve() {
        let svg = render_svg(&[rec(10, Some(0.5)), rec(20, Some(0.5))], Overlays::none()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(r#"width="800""#) && svg.contains(r#"height="600""#));
    }
}
