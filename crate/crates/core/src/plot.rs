//! Static trace plots from a campaign database: one SVG per target plus a CSV
//! holding exactly the plotted numbers.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::benchmark::{bands, traces, TraceBands};
use crate::campaign::Campaign;
use crate::database::Database;
use crate::error::{Error, Result};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];
const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub planner: String,
    pub repeats: usize,
    pub bands: TraceBands,
}

/// Everything plotted for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPlot {
    pub target: String,
    pub series: Vec<Series>,
}

impl TargetPlot {
    pub fn len(&self) -> usize {
        self.series.iter().map(|s| s.bands.mean.len()).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Groups complete campaigns by target, then planner, both in first-appearance order.
pub fn collect(db: &Database) -> Result<Vec<TargetPlot>> {
    let mut plots = Vec::new();
    for target in db.targets() {
        let in_target: Vec<&Campaign> = db.campaigns_for(&target).collect();
        let mut seen = HashSet::new();
        let mut series = Vec::new();
        for planner in in_target.iter().map(|c| c.planner.as_str()).filter(|p| seen.insert(*p)) {
            let t = traces(in_target.iter().copied().filter(|c| c.planner == planner))?;
            if t.is_empty() {
                continue;
            }
            series.push(Series {
                planner: planner.to_string(),
                repeats: t.len(),
                bands: bands(&t),
            });
        }
        if !series.is_empty() {
            plots.push(TargetPlot { target, series });
        }
    }
    Ok(plots)
}

/// Columns `evaluation` then `<planner>:mean|min|max` per series; one row per evaluation.
pub fn to_csv(plot: &TargetPlot) -> String {
    let mut out = String::from("evaluation");
    for s in &plot.series {
        for stat in ["mean", "min", "max"] {
            write!(out, ",{}", csv_field(&format!("{}:{stat}", s.planner))).unwrap();
        }
    }
    out.push('\n');
    for i in 0..plot.len() {
        write!(out, "{}", i + 1).unwrap();
        for s in &plot.series {
            for column in [&s.bands.mean, &s.bands.min, &s.bands.max] {
                match column.get(i) {
                    Some(v) => write!(out, ",{v}").unwrap(),
                    None => out.push(','),
                }
            }
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick values covering `[lo, hi]` at a 1, 2 or 5 × 10^k spacing.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Mean best-so-far per planner with a min to max band over repeats.
pub fn to_svg(plot: &TargetPlot) -> String {
    let n = plot.len().max(1);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &plot.series {
        lo = s.bands.min.iter().copied().fold(lo, f64::min);
        hi = s.bands.max.iter().copied().fold(hi, f64::max);
    }
    if !(hi > lo) {
        let pad = if lo.is_finite() && lo != 0.0 { lo.abs() * 0.1 } else { 1.0 };
        lo = if lo.is_finite() { lo - pad } else { -1.0 };
        hi = lo + 2.0 * pad;
    }
    let (pw, ph) = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT, HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);
    let x = |i: usize| MARGIN_LEFT + if n == 1 { 0.0 } else { (i as f64 - 1.0) / (n as f64 - 1.0) * pw };
    let y = |v: f64| MARGIN_TOP + (hi - v) / (hi - lo) * ph;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        escape(&plot.target)
    )
    .unwrap();

    for t in ticks(lo, hi, 6) {
        let ty = y(t);
        writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#e0e0e0"/><text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"##,
            MARGIN_LEFT + pw,
            MARGIN_LEFT - 6.0,
            ty + 4.0,
            label(t)
        )
        .unwrap();
    }
    for t in ticks(1.0, n as f64, 8).into_iter().filter(|t| t.fract() == 0.0 && *t >= 1.0) {
        let tx = x(t as usize);
        writeln!(
            svg,
            r#"<text x="{tx:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + ph + 18.0,
            t as usize
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">evaluation</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 18.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text transform="translate(20 {:.1}) rotate(-90)" text-anchor="middle">best so far</text>"#,
        MARGIN_TOP + ph / 2.0
    )
    .unwrap();

    for (k, s) in plot.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let upper = s.bands.max.iter().enumerate().map(|(i, v)| format!("{:.2},{:.2}", x(i + 1), y(*v)));
        let lower = s.bands.min.iter().enumerate().rev().map(|(i, v)| format!("{:.2},{:.2}", x(i + 1), y(*v)));
        let band: Vec<String> = upper.chain(lower).collect();
        writeln!(svg, r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#, band.join(" ")).unwrap();
        let line: Vec<String> = s.bands.mean.iter().enumerate().map(|(i, v)| format!("{:.2},{:.2}", x(i + 1), y(*v))).collect();
        writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" ")).unwrap();
        let ly = MARGIN_TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - MARGIN_RIGHT + 14.0;
        writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{} (n={})</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.planner),
            s.repeats
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

/// File stem for a target id: anything outside `[A-Za-z0-9._-]` becomes `_`.
pub fn file_stem(target: &str) -> String {
    target
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

/// Writes `<stem>.svg` and `<stem>.csv` per target into `out`; returns the SVG paths.
pub fn plot_from_db(db: &Database, out: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let out = out.as_ref();
    let plots = collect(db)?;
    if plots.is_empty() {
        return Err(Error::NotFound(format!("no complete campaigns in {}", db.path().display())));
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut used = HashSet::new();
    let mut written = Vec::new();
    for plot in &plots {
        let base = file_stem(&plot.target);
        let stem = (1..)
            .map(|k| if k == 1 { base.clone() } else { format!("{base}-{k}") })
            .find(|s| used.insert(s.clone()))
            .expect("unbounded suffix search");
        let svg = out.join(format!("{stem}.svg"));
        fs::write(&svg, to_svg(plot)).map_err(|e| Error::io(&svg, e))?;
        let csv = out.join(format!("{stem}.csv"));
        fs::write(&csv, to_csv(plot)).map_err(|e| Error::io(&csv, e))?;
        written.push(svg);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{run_benchmark, BenchmarkPlan, Target};
    use crate::planners::PlannerConfig;
    use crate::space::Goal;
    use crate::surfaces::{SurfaceKind, SurfaceSpec};

    fn db_with_runs(dir: &Path) -> Database {
        let mut db = Database::open(dir.join("db.jsonl")).unwrap();
        let plan = BenchmarkPlan {
            planners: vec![
                PlannerConfig::new("random", Goal::Minimize, 0),
                PlannerConfig::new("simplex", Goal::Minimize, 0),
            ],
            targets: vec![Target::Surface(SurfaceSpec::new(SurfaceKind::Branin, 2))],
            num_iter: 25,
            repeats: 5,
            base_seed: 3,
        };
        run_benchmark(&plan, &mut db, None).unwrap();
        db
    }

    #[test]
    fn structure_of_plot_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let db = db_with_runs(dir.path());
        let paths = plot_from_db(&db, dir.path().join("plots")).unwrap();
        assert_eq!(paths.len(), 1);
        let svg = fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 2);
        let csv = fs::read_to_string(paths[0].with_extension("csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 25);
        assert_eq!(lines[0], "evaluation,RandomSearch:mean,RandomSearch:min,RandomSearch:max,Simplex:mean,Simplex:min,Simplex:max");
    }

    #[test]
    fn output_is_byte_identical_for_the_same_database() {
        let dir = tempfile::tempdir().unwrap();
        let db = db_with_runs(dir.path());
        let a = plot_from_db(&db, dir.path().join("a")).unwrap();
        let b = plot_from_db(&Database::load(db.path()).unwrap(), dir.path().join("b")).unwrap();
        for (pa, pb) in a.iter().zip(&b) {
            assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap());
            assert_eq!(fs::read(pa.with_extension("csv")).unwrap(), fs::read(pb.with_extension("csv")).unwrap());
        }
    }

    #[test]
    fn empty_database_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let db = Database::open(dir.path().join("none.jsonl")).unwrap();
        assert!(matches!(plot_from_db(&db, dir.path()), Err(Error::NotFound(_))));
    }

    #[test]
    fn ticks_and_stems() {
        let t: Vec<String> = ticks(0.0, 1.0, 5).into_iter().map(label).collect();
        assert_eq!(t, ["0", "0.2", "0.4", "0.6", "0.8", "1"]);
        assert_eq!(file_stem("dejong:d=2+gaussian:0.5"), "dejong_d_2_gaussian_0.5");
        assert_eq!(label(0.30000000000000004), "0.3");
    }
}
