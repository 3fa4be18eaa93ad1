//! Configuration-driven sweeps over frequency and time, death and revival
//! detection on the resulting measure series, parallelism statistics, and
//! the CSV and JSON table formats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{measure_all, DiscordOptimizerConfig, MeasureSet};
use crate::noise::{epsilon_at, NoiseKernel, QuadratureConfig};
use crate::state::{rho_normalized, EvalPoint};

pub const CSV_HEADER: &str =
    "omega,t,epsilon,concurrence,eof,negativity,log_negativity,discord,geometric_discord,error";

pub const TRANSITIONS_CSV_HEADER: &str = "measure,kind,omega,t,epsilon,left_index,right_index";

/// Default threshold below which a measure counts as dead.
pub const TRANSITION_TOL: f64 = 1e-9;

/// Named reservoir regimes. Kernel parameters scale with the row frequency:
/// the partially colored regime keeps an inverse correlation time of
/// `0.875 omega`, the colored one `0.25 omega` (long memory against a fast
/// oscillator), and the white regime is the delta-correlated limit. The
/// colored noise power is tuned so the injected energy oscillates across the
/// entanglement death threshold within the plotted horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    White,
    Partial,
    Colored,
}

impl Preset {
    pub fn kernel_for(self, omega: f64) -> Result<NoiseKernel> {
        match self {
            Preset::White => NoiseKernel::white(0.1 * omega),
            Preset::Partial => NoiseKernel::exponential(0.1 * omega, 0.875 * omega),
            Preset::Colored => NoiseKernel::exponential(0.8775 * omega, 0.25 * omega),
        }
    }

    /// Plotted time horizon of the matching figure, in units of `1/omega`.
    pub fn horizon(self) -> f64 {
        match self {
            Preset::White => 10.0,
            Preset::Partial => 3.5,
            Preset::Colored => 7.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::White => "white",
            Preset::Partial => "partial",
            Preset::Colored => "colored",
        }
    }

    /// The shipped sweep for this regime: five frequencies, 101 times.
    pub fn sweep_config(self) -> SweepConfig {
        SweepConfig {
            kernel: KernelSpec::Preset(self),
            omega_grid: GridSpec::Points(vec![0.5, 0.75, 1.0, 1.25, 1.5]),
            t_grid: GridSpec::Linspace {
                start: 0.0,
                stop: self.horizon(),
                points: 101,
            },
            quadrature: QuadratureConfig::default(),
            discord: DiscordOptimizerConfig::default(),
            output_path: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Kernel selection in a config: a named preset (parameters follow the row
/// frequency) or explicit fixed parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Preset(Preset),
    Explicit(NoiseKernel),
}

impl KernelSpec {
    pub fn resolve(&self, omega: f64) -> Result<NoiseKernel> {
        match *self {
            KernelSpec::Preset(p) => p.kernel_for(omega),
            // reconstruct through the constructors so deserialized
            // parameters get validated
            KernelSpec::Explicit(NoiseKernel::White { gamma }) => NoiseKernel::white(gamma),
            KernelSpec::Explicit(NoiseKernel::Exponential { gamma, lambda }) => {
                NoiseKernel::exponential(gamma, lambda)
            }
        }
    }
}

/// A coordinate grid: explicit points or a uniform spacing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Points(Vec<f64>),
    Linspace {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let vals = match self {
            GridSpec::Points(v) => v.clone(),
            GridSpec::Linspace {
                start,
                stop,
                points,
            } => {
                if *points == 0 {
                    return Err(Error::Config("linspace needs at least one point".into()));
                }
                if *points == 1 {
                    vec![*start]
                } else {
                    let step = (stop - start) / (*points as f64 - 1.0);
                    (0..*points).map(|i| start + step * i as f64).collect()
                }
            }
        };
        if vals.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("grid contains non-finite values".into()));
        }
        if vals.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("grid must be strictly increasing".into()));
        }
        Ok(vals)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Full sweep description: noise model, grids, numerics, output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kernel: KernelSpec,
    pub omega_grid: GridSpec,
    pub t_grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub discord: DiscordOptimizerConfig,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub config: String,
    pub panels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// One grid point. `measures` is absent when the row failed; the error
/// column then says why, and the sweep keeps going.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub t: f64,
    pub epsilon: f64,
    #[serde(flatten)]
    pub measures: Option<MeasureSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub metadata: Metadata,
    pub rows: Vec<SweepRow>,
}

/// Runs the sweep row by row in lexicographic `(omega, t)` order. Rows are
/// independent, so the table is identical no matter how they are scheduled;
/// a failed measure evaluation marks its row and does not abort the run.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    let omegas = cfg.omega_grid.values()?;
    if omegas.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Config("frequencies must be positive".into()));
    }
    let times = cfg.t_grid.values()?;
    if times[0] < 0.0 {
        return Err(Error::Config("times must be nonnegative".into()));
    }
    if cfg.quadrature.panels == 0 {
        return Err(Error::Config("quadrature needs at least one panel".into()));
    }

    let config_echo =
        serde_json::to_string(cfg).map_err(|e| Error::Config(format!("config echo: {e}")))?;
    let mut rows = Vec::with_capacity(omegas.len() * times.len());
    for &omega in &omegas {
        let kernel = cfg.kernel.resolve(omega)?;
        for &t in &times {
            let epsilon = epsilon_at(&kernel, omega, t, &cfg.quadrature)?;
            let (measures, error) =
                match rho_normalized(epsilon).and_then(|s| measure_all(&s, &cfg.discord)) {
                    Ok(ms) => (Some(ms), None),
                    Err(e) => (None, Some(sanitize_error(&e.to_string()))),
                };
            rows.push(SweepRow {
                omega,
                t,
                epsilon,
                measures,
                error,
            });
        }
    }
    Ok(SweepTable {
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config_echo,
            panels: cfg.quadrature.panels,
            timestamp: None,
        },
        rows,
    })
}

fn sanitize_error(msg: &str) -> String {
    msg.replace(',', ";").replace('\n', " ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    Death,
    Revival,
}

/// A measure crossing the death threshold, located by linear interpolation
/// between the bracketing rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionEvent {
    pub measure: String,
    pub kind: TransitionKind,
    pub omega: f64,
    pub t: f64,
    pub epsilon: f64,
    pub left_index: usize,
    pub right_index: usize,
}

/// Scans every measure series (per frequency, ordered in time) for deaths
/// and revivals. A death is a crossing from above `tol` to at or below it;
/// a revival is a later crossing back above `tol`.
pub fn detect_transitions(table: &SweepTable, tol: f64) -> Vec<TransitionEvent> {
    let mut events = Vec::new();
    let mut start = 0;
    while start < table.rows.len() {
        let omega = table.rows[start].omega;
        let mut end = start;
        while end < table.rows.len() && table.rows[end].omega == omega {
            end += 1;
        }
        for (mi, name) in MeasureSet::NAMES.iter().enumerate() {
            let mut prev: Option<(usize, f64)> = None;
            let mut died = false;
            for (idx, row) in table.rows[start..end]
                .iter()
                .enumerate()
                .map(|(o, r)| (start + o, r))
            {
                let Some(ms) = row.measures else { continue };
                let value = ms.as_array()[mi];
                if let Some((pidx, pval)) = prev {
                    let prow = &table.rows[pidx];
                    if pval > tol && value <= tol {
                        let f = interp_fraction(pval, value, tol);
                        events.push(TransitionEvent {
                            measure: name.to_string(),
                            kind: TransitionKind::Death,
                            omega,
                            t: lerp(prow.t, row.t, f),
                            epsilon: lerp(prow.epsilon, row.epsilon, f),
                            left_index: pidx,
                            right_index: idx,
                        });
                        died = true;
                    } else if pval <= tol && value > tol && died {
                        let f = interp_fraction(pval, value, tol);
                        events.push(TransitionEvent {
                            measure: name.to_string(),
                            kind: TransitionKind::Revival,
                            omega,
                            t: lerp(prow.t, row.t, f),
                            epsilon: lerp(prow.epsilon, row.epsilon, f),
                            left_index: pidx,
                            right_index: idx,
                        });
                    }
                }
                prev = Some((idx, value));
            }
        }
        start = end;
    }
    events
}

fn interp_fraction(left: f64, right: f64, target: f64) -> f64 {
    let span = right - left;
    if span.abs() < 1e-300 {
        1.0
    } else {
        ((target - left) / span).clamp(0.0, 1.0)
    }
}

fn lerp(a: f64, b: f64, f: f64) -> f64 {
    a + (b - a) * f
}

/// Pairwise comparison of the measure series: Pearson correlation and the
/// fraction of grid steps whose discrete derivatives agree in sign, computed
/// per frequency and averaged. `None` marks a correlation that is undefined
/// because a series is constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelismReport {
    pub measures: Vec<String>,
    pub pearson: Vec<Vec<Option<f64>>>,
    pub sign_agreement: Vec<Vec<f64>>,
    pub events: Vec<TransitionEvent>,
}

pub fn parallelism_stats(table: &SweepTable) -> Result<ParallelismReport> {
    let mut pearson_acc = vec![vec![(0.0f64, 0usize); 6]; 6];
    let mut sign_acc = vec![vec![(0.0f64, 0usize); 6]; 6];

    let mut start = 0;
    let mut any_block = false;
    while start < table.rows.len() {
        let omega = table.rows[start].omega;
        let mut end = start;
        while end < table.rows.len() && table.rows[end].omega == omega {
            end += 1;
        }
        let mut series: Vec<Vec<f64>> = vec![Vec::new(); 6];
        for row in &table.rows[start..end] {
            if let Some(ms) = row.measures {
                for (mi, v) in ms.as_array().into_iter().enumerate() {
                    series[mi].push(v);
                }
            }
        }
        if series[0].len() < 3 {
            return Err(Error::Domain(format!(
                "parallelism statistics need at least 3 rows per series, got {} at omega {omega}",
                series[0].len()
            )));
        }
        any_block = true;
        for i in 0..6 {
            for j in 0..6 {
                if let Some(r) = pearson(&series[i], &series[j]) {
                    pearson_acc[i][j].0 += r;
                    pearson_acc[i][j].1 += 1;
                }
                let s = sign_agreement(&series[i], &series[j]);
                sign_acc[i][j].0 += s;
                sign_acc[i][j].1 += 1;
            }
        }
        start = end;
    }
    if !any_block {
        return Err(Error::Domain("table has no rows".into()));
    }

    let pearson_matrix: Vec<Vec<Option<f64>>> = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| {
                    if i == j {
                        Some(1.0)
                    } else {
                        let (sum, n) = pearson_acc[i][j];
                        if n == 0 {
                            None
                        } else {
                            Some(sum / n as f64)
                        }
                    }
                })
                .collect()
        })
        .collect();
    let sign_matrix: Vec<Vec<f64>> = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| {
                    if i == j {
                        1.0
                    } else {
                        let (sum, n) = sign_acc[i][j];
                        sum / n as f64
                    }
                })
                .collect()
        })
        .collect();

    Ok(ParallelismReport {
        measures: MeasureSet::NAMES.iter().map(|s| s.to_string()).collect(),
        pearson: pearson_matrix,
        sign_agreement: sign_matrix,
        events: detect_transitions(table, TRANSITION_TOL),
    })
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx < 1e-24 || syy < 1e-24 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

const DERIVATIVE_TOL: f64 = 1e-12;

fn step_sign(d: f64) -> i8 {
    if d > DERIVATIVE_TOL {
        1
    } else if d < -DERIVATIVE_TOL {
        -1
    } else {
        0
    }
}

fn sign_agreement(x: &[f64], y: &[f64]) -> f64 {
    let steps = x.len() - 1;
    let mut agree = 0usize;
    for i in 0..steps {
        if step_sign(x[i + 1] - x[i]) == step_sign(y[i + 1] - y[i]) {
            agree += 1;
        }
    }
    agree as f64 / steps as f64
}

/// Renders a float with 12 significant digits, trailing zeros trimmed,
/// always keeping one digit after the point.
pub fn format_significant(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).clamp(0, 40) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.push('0');
        }
    } else {
        s.push_str(".0");
    }
    s
}

fn csv_field(v: Option<f64>) -> String {
    v.map(format_significant).unwrap_or_default()
}

/// CSV form of a sweep table: comment lines with provenance, the fixed
/// header, then one line per row.
pub fn table_to_csv(table: &SweepTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("# qcorr sweep v{}\n", table.metadata.version));
    out.push_str(&format!("# config: {}\n", table.metadata.config));
    out.push_str(&format!("# panels: {}\n", table.metadata.panels));
    if let Some(ts) = table.metadata.timestamp {
        out.push_str(&format!("# timestamp: {ts}\n"));
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        let m = row.measures;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            format_significant(row.omega),
            format_significant(row.t),
            format_significant(row.epsilon),
            csv_field(m.map(|m| m.concurrence)),
            csv_field(m.map(|m| m.eof)),
            csv_field(m.map(|m| m.negativity)),
            csv_field(m.map(|m| m.log_negativity)),
            csv_field(m.map(|m| m.discord)),
            csv_field(m.map(|m| m.geometric_discord)),
            row.error.as_deref().unwrap_or(""),
        ));
    }
    out
}

pub fn table_to_json(table: &SweepTable) -> Result<String> {
    serde_json::to_string_pretty(table).map_err(|e| Error::Config(format!("json encode: {e}")))
}

pub fn table_to_string(table: &SweepTable, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(table_to_csv(table)),
        OutputFormat::Json => table_to_json(table),
    }
}

/// Parses a table back from its CSV form. Comment lines feed the metadata;
/// row values survive at the 12-digit precision they were written with.
pub fn parse_csv(text: &str) -> Result<SweepTable> {
    let mut version = String::new();
    let mut config = String::new();
    let mut panels = 0usize;
    let mut timestamp = None;
    let mut lines = text.lines().peekable();
    while let Some(line) = lines.peek() {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("qcorr sweep v") {
                version = v.to_string();
            } else if let Some(c) = rest.strip_prefix("config:") {
                config = c.trim().to_string();
            } else if let Some(p) = rest.strip_prefix("panels:") {
                panels = p
                    .trim()
                    .parse()
                    .map_err(|e| Error::Config(format!("bad panels line: {e}")))?;
            } else if let Some(ts) = rest.strip_prefix("timestamp:") {
                timestamp = ts.trim().parse().ok();
            }
            lines.next();
        } else {
            break;
        }
    }
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Config(format!("unexpected CSV header: {other:?}"))),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Config(format!(
                "row {} has {} fields, expected 10",
                lineno + 1,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|e| Error::Config(format!("row {}: bad number: {e}", lineno + 1)))
        };
        let measures = if fields[3..9].iter().all(|f| f.is_empty()) {
            None
        } else {
            Some(MeasureSet {
                concurrence: num(3)?,
                eof: num(4)?,
                negativity: num(5)?,
                log_negativity: num(6)?,
                discord: num(7)?,
                geometric_discord: num(8)?,
            })
        };
        rows.push(SweepRow {
            omega: num(0)?,
            t: num(1)?,
            epsilon: num(2)?,
            measures,
            error: if fields[9].is_empty() {
                None
            } else {
                Some(fields[9].to_string())
            },
        });
    }
    Ok(SweepTable {
        metadata: Metadata {
            version,
            config,
            panels,
            timestamp,
        },
        rows,
    })
}

/// CSV form of an injected-energy series.
pub fn epsilon_series_to_csv(points: &[EvalPoint]) -> String {
    let mut out = String::from("omega,t,epsilon\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            format_significant(p.omega),
            format_significant(p.t),
            format_significant(p.epsilon)
        ));
    }
    out
}

pub fn transitions_to_csv(events: &[TransitionEvent]) -> String {
    let mut out = String::from(TRANSITIONS_CSV_HEADER);
    out.push('\n');
    for e in events {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            e.measure,
            match e.kind {
                TransitionKind::Death => "death",
                TransitionKind::Revival => "revival",
            },
            format_significant(e.omega),
            format_significant(e.t),
            format_significant(e.epsilon),
            e.left_index,
            e.right_index,
        ));
    }
    out
}

pub fn transitions_to_string(events: &[TransitionEvent], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(transitions_to_csv(events)),
        OutputFormat::Json => {
            serde_json::to_string_pretty(events).map_err(|e| Error::Config(e.to_string()))
        }
    }
}

pub fn report_to_csv(report: &ParallelismReport) -> String {
    let mut out = String::from("measure_a,measure_b,pearson,sign_agreement\n");
    for i in 0..report.measures.len() {
        for j in (i + 1)..report.measures.len() {
            let r = report.pearson[i][j]
                .map(format_significant)
                .unwrap_or_else(|| "undef".to_string());
            out.push_str(&format!(
                "{},{},{},{}\n",
                report.measures[i],
                report.measures[j],
                r,
                format_significant(report.sign_agreement[i][j])
            ));
        }
    }
    out
}

pub fn report_to_string(report: &ParallelismReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(report_to_csv(report)),
        OutputFormat::Json => {
            serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))
        }
    }
}
