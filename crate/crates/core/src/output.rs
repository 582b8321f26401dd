//! Result serialization: CSV series, run manifests, and plot scripts.

use std::fmt::Write as _;
use std::io::Write;

use crate::config::emit_config;
use crate::engine::{ObservableSeries, SimulationConfig};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,na_mean,na_stderr,nb_mean,nb_stderr,nanb_mean,nanb_stderr,\
                              pbb,coh_ab_re,coh_ab_im,live_trajectories";

/// Writes the series as CSV.
///
/// Floats print in Rust's shortest round-trip form, so re-parsing reproduces
/// every value bit-exactly; an empty-field probability shows up as NaN.
pub fn emit_csv(series: &ObservableSeries, sink: &mut impl Write) -> Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for r in &series.records {
        writeln!(
            sink,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.n_a,
            r.n_a_stderr,
            r.n_b,
            r.n_b_stderr,
            r.n_a_n_b,
            r.n_a_n_b_stderr,
            r.p_bb,
            r.coh_ab.re,
            r.coh_ab.im,
            r.live_count
        )?;
    }
    Ok(())
}

/// One parsed CSV row; field order mirrors the emitted columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    pub na_mean: f64,
    pub na_stderr: f64,
    pub nb_mean: f64,
    pub nb_stderr: f64,
    pub nanb_mean: f64,
    pub nanb_stderr: f64,
    pub pbb: f64,
    pub coh_ab_re: f64,
    pub coh_ab_im: f64,
    pub live_trajectories: u64,
}

/// Parses text produced by emit_csv.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Csv(format!("bad header: {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Csv(format!(
                "row {}: expected 11 fields, got {}",
                i + 2,
                fields.len()
            )));
        }
        let f = |j: usize| -> Result<f64> {
            fields[j]
                .parse()
                .map_err(|_| Error::Csv(format!("row {}: bad number \"{}\"", i + 2, fields[j])))
        };
        rows.push(CsvRow {
            t: f(0)?,
            na_mean: f(1)?,
            na_stderr: f(2)?,
            nb_mean: f(3)?,
            nb_stderr: f(4)?,
            nanb_mean: f(5)?,
            nanb_stderr: f(6)?,
            pbb: f(7)?,
            coh_ab_re: f(8)?,
            coh_ab_im: f(9)?,
            live_trajectories: fields[10]
                .parse()
                .map_err(|_| Error::Csv(format!("row {}: bad count", i + 2)))?,
        });
    }
    Ok(rows)
}

/// Line styles mirroring the figure conventions: stochastic results solid,
/// mean-field dotted, bare exponential dash-dotted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dotted,
    DashDotted,
}

impl LineStyle {
    fn dashtype(&self) -> &'static str {
        match self {
            LineStyle::Solid => "1",
            LineStyle::Dotted => "'.'",
            LineStyle::DashDotted => "'-.'",
        }
    }
}

/// A deterministic reference curve to overlay on stochastic series.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurve {
    pub label: String,
    pub style: LineStyle,
    pub points: Vec<(f64, f64)>,
}

/// A labelled stochastic series for plotting.
#[derive(Debug, Clone)]
pub struct PlotSeries<'a> {
    pub label: String,
    pub series: &'a ObservableSeries,
}

/// Emits a gnuplot script overlaying excited-population curves.
///
/// Stochastic series plot as solid error-bar lines from inline data blocks;
/// references use their declared dash styles. All curves must share one time
/// grid.
pub fn emit_plot_script(
    series: &[PlotSeries<'_>],
    references: &[ReferenceCurve],
    sink: &mut impl Write,
) -> Result<()> {
    let mut grids = series
        .iter()
        .map(|s| s.series.records.iter().map(|r| r.t).collect::<Vec<_>>())
        .chain(
            references
                .iter()
                .map(|r| r.points.iter().map(|(t, _)| *t).collect()),
        );
    let base = match grids.next() {
        Some(g) => g,
        None => return Err(Error::MismatchedPlotGrids),
    };
    if grids.any(|g| g != base) {
        return Err(Error::MismatchedPlotGrids);
    }

    let mut script = String::new();
    let _ = writeln!(script, "set xlabel \"t\"");
    let _ = writeln!(script, "set ylabel \"N_b\"");
    let _ = writeln!(script, "set key top right");
    let _ = writeln!(script, "set datafile missing \"NaN\"");
    for (i, s) in series.iter().enumerate() {
        let _ = writeln!(script, "$series_{i} << EOD");
        for r in &s.series.records {
            let _ = writeln!(script, "{} {} {}", r.t, r.n_b, r.n_b_stderr);
        }
        let _ = writeln!(script, "EOD");
    }
    for (i, r) in references.iter().enumerate() {
        let _ = writeln!(script, "$ref_{i} << EOD");
        for (t, v) in &r.points {
            let _ = writeln!(script, "{t} {v}");
        }
        let _ = writeln!(script, "EOD");
    }
    let mut clauses = Vec::new();
    for (i, s) in series.iter().enumerate() {
        clauses.push(format!(
            "$series_{i} using 1:2:3 with errorlines dashtype 1 title \"{}\"",
            s.label
        ));
    }
    for (i, r) in references.iter().enumerate() {
        clauses.push(format!(
            "$ref_{i} using 1:2 with lines dashtype {} title \"{}\"",
            r.style.dashtype(),
            r.label
        ));
    }
    let _ = writeln!(script, "plot {}", clauses.join(", \\\n     "));
    sink.write_all(script.as_bytes())?;
    Ok(())
}

/// Everything needed to reproduce a finished run bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SimulationConfig,
    pub tool_version: String,
    pub wall_seconds: f64,
    /// Divergent-trajectory count at each sample time (cumulative).
    pub divergent_by_sample: Vec<u64>,
}

impl RunManifest {
    pub fn from_series(
        config: &SimulationConfig,
        series: &ObservableSeries,
        wall_seconds: f64,
    ) -> Self {
        RunManifest {
            config: config.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_seconds,
            divergent_by_sample: series
                .records
                .iter()
                .map(|r| series.trajectories - r.live_count)
                .collect(),
        }
    }

    /// Plain-text rendering; the embedded config block is parseable as-is.
    pub fn render(&self) -> String {
        let divergent: Vec<String> = self
            .divergent_by_sample
            .iter()
            .map(|d| d.to_string())
            .collect();
        format!(
            "# run manifest\n# tool_version = {}\n# wall_seconds = {}\n# divergent_by_sample = {}\n\n{}",
            self.tool_version,
            self.wall_seconds,
            divergent.join(","),
            emit_config(&self.config)
        )
    }
}
