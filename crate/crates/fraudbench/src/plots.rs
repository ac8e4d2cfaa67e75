//! SVG bar charts of a benchmark report: class counts, supervised AUROC and unsupervised
//! AUROC. Output depends only on the report, so re-emitting gives identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fraudbench_core::Track;

use crate::error::{Error, Result};
use crate::report::BenchmarkReport;

pub const CLASS_COUNTS_FILE: &str = "class_counts.svg";
pub const SUPERVISED_FILE: &str = "auroc_supervised.svg";
pub const UNSUPERVISED_FILE: &str = "auroc_unsupervised.svg";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotOutput {
    pub paths: Vec<PathBuf>,
    /// Charts skipped or drawn with missing entries.
    pub notices: Vec<String>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Vertical bar chart with a linear axis from 0 to `y_max`.
pub fn bar_chart(title: &str, y_label: &str, bars: &[(String, f64)], y_max: f64, label: impl Fn(f64) -> String) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y = |v: f64| TOP + plot_h * (1.0 - (v / y_max).clamp(0.0, 1.0));
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for i in 0..=5 {
        let v = y_max * i as f64 / 5.0;
        let yy = y(v);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#dddddd"/>"##,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            yy + 4.0,
            escape(&tick(v, y_max))
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );
    let slot = plot_w / bars.len().max(1) as f64;
    for (i, (name, v)) in bars.iter().enumerate() {
        let bw = slot * 0.6;
        let x = LEFT + slot * i as f64 + (slot - bw) / 2.0;
        let top = y(*v);
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{top:.2}" width="{bw:.2}" height="{:.2}" fill="#4a7ab0"/>"##,
            TOP + plot_h - top
        );
        let cx = x + bw / 2.0;
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            top - 5.0,
            escape(&label(*v))
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            escape(name)
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        TOP + plot_h,
        WIDTH - RIGHT,
        TOP + plot_h
    );
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64, y_max: f64) -> String {
    if y_max <= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{}", v.round() as u64)
    }
}

/// Bar height for counts: the largest count rounded up to a round number.
fn count_axis(max: usize) -> f64 {
    let max = max.max(1) as f64;
    let step = 10f64.powf(max.log10().floor());
    (max / step).ceil() * step
}

pub fn class_counts_svg(report: &BenchmarkReport) -> String {
    let s = &report.dataset_summary;
    let bars = vec![
        ("normal (0)".to_string(), s.n_normal as f64),
        ("fraud (1)".to_string(), s.n_fraud as f64),
    ];
    bar_chart(
        "Number of transactions per class",
        "rows",
        &bars,
        count_axis(s.n_normal.max(s.n_fraud)),
        |v| format!("{}", v as u64),
    )
}

/// Pooled AUROC bars of the successful models on `track`, plus the names of configured
/// models on that track that have no value.
pub fn track_bars(report: &BenchmarkReport, track: Track) -> (Vec<(String, f64)>, Vec<String>) {
    let mut bars = Vec::new();
    let mut missing = Vec::new();
    for entry in report.config.models.iter().filter(|m| m.kind.track() == track) {
        let name = entry.kind.name();
        match report.result(name).filter(|r| r.succeeded()).and_then(|r| r.pooled_auroc) {
            Some(a) => bars.push((name.to_uppercase(), a)),
            None => missing.push(name.to_string()),
        }
    }
    (bars, missing)
}

pub fn auroc_svg(track: Track, bars: &[(String, f64)]) -> String {
    let title = match track {
        Track::Supervised => "AUROC of supervised models",
        Track::Unsupervised => "AUROC of unsupervised models",
    };
    bar_chart(title, "pooled AUROC", bars, 1.0, |v| format!("{v:.3}"))
}

/// Writes the three charts into `dir`. A track chart with no values is skipped with a
/// notice; one with some missing values is drawn and the gap noted.
pub fn emit_plots(report: &BenchmarkReport, dir: &Path) -> Result<PlotOutput> {
    let mut out = PlotOutput::default();
    let write = |name: &str, svg: String, out: &mut PlotOutput| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, svg).map_err(Error::io(&path))?;
        out.paths.push(path);
        Ok(())
    };
    write(CLASS_COUNTS_FILE, class_counts_svg(report), &mut out)?;
    for (track, file) in [(Track::Supervised, SUPERVISED_FILE), (Track::Unsupervised, UNSUPERVISED_FILE)] {
        let (bars, missing) = track_bars(report, track);
        if bars.is_empty() {
            out.notices.push(format!("notice: no {track} results in the report; {file} not written"));
            continue;
        }
        if !missing.is_empty() {
            out.notices
                .push(format!("notice: {file} omits {track} models without a result: {}", missing.join(", ")));
        }
        write(file, auroc_svg(track, &bars), &mut out)?;
    }
    Ok(out)
}
