//! Batch runs over drive times, hot-bath temperatures and modes.
//!
//! Rows are computed on a worker pool but always emitted in
//! `(kT_hot, mode, τ)` order, so output files are byte-identical across runs.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{run_cycle, CycleMetrics, EngineConfig, Flag, Mode};
use crate::error::{Error, Result};
use crate::thermo::TemperaturePreset;

/// Environment variable that overrides the worker count.
pub const THREADS_ENV: &str = "QOTTO_THREADS";

/// Embedded in the leading comment of every CSV file.
pub const SCHEMA_VERSION: &str = "qotto-sweep/1";

pub const COLUMNS: [&str; 16] = [
    "tau_s",
    "kT_hot_peV",
    "mode",
    "W2_peV",
    "W4_peV",
    "Q1_peV",
    "Q3_peV",
    "cost2_peV",
    "cost4_peV",
    "eta_A",
    "eta1_STA",
    "eta2_STA",
    "P_A",
    "P_STA",
    "fidelity_tracking",
    "flags",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Drive times in seconds.
    pub tau_grid: Vec<f64>,
    /// Hot-bath `k_B T` values in peV.
    pub hot_temperatures: Vec<f64>,
    /// Cold-bath `k_B T` in peV.
    pub cold_temperature: f64,
    pub modes: Vec<Mode>,
    /// Supplies every engine setting not swept (fields, steps, cost, ...).
    pub base: EngineConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let preset = TemperaturePreset::Low;
        Self {
            tau_grid: tau_grid_us(200, 2250, 50).expect("default grid is valid"),
            hot_temperatures: preset.hot().to_vec(),
            cold_temperature: preset.cold(),
            modes: Mode::ALL.to_vec(),
            base: EngineConfig::default(),
        }
    }
}

/// `start, start+step, ..., ≤ stop`, in microseconds, returned in seconds.
pub fn tau_grid_us(start: u32, stop: u32, step: u32) -> Result<Vec<f64>> {
    if step == 0 || start == 0 || stop < start {
        return Err(Error::Configuration(format!(
            "invalid tau grid: start={start} stop={stop} step={step} (microseconds)"
        )));
    }
    Ok((start..=stop)
        .step_by(step as usize)
        .map(|us| f64::from(us) / 1e6)
        .collect())
}

impl SweepSpec {
    pub fn with_preset(mut self, preset: TemperaturePreset) -> Self {
        self.cold_temperature = preset.cold();
        self.hot_temperatures = preset.hot().to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_grid.is_empty() {
            return Err(Error::Configuration("tau grid is empty".into()));
        }
        if self.hot_temperatures.is_empty() {
            return Err(Error::Configuration("hot temperature list is empty".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::Configuration("mode list is empty".into()));
        }
        if let Some(tau) = self.tau_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Configuration(format!(
                "drive time {tau} s is not positive"
            )));
        }
        let temps = self.hot_temperatures.iter().chain([&self.cold_temperature]);
        if let Some(kt) = temps.into_iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(Error::Configuration(format!(
                "temperature {kt} peV is not positive"
            )));
        }
        Ok(())
    }

    /// All configurations in output order, each validated.
    pub fn configs(&self) -> Result<Vec<EngineConfig>> {
        self.validate()?;
        let sorted = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let mut modes = self.modes.clone();
        modes.sort();
        modes.dedup();
        let taus = sorted(&self.tau_grid);
        let mut out = Vec::new();
        for kt_hot in sorted(&self.hot_temperatures) {
            for &mode in &modes {
                for &tau in &taus {
                    let cfg = EngineConfig {
                        kt_cold: self.cold_temperature,
                        kt_hot,
                        mode,
                        tau,
                        ..self.base
                    };
                    cfg.validate()?;
                    out.push(cfg);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau_s: f64,
    pub kt_hot: f64,
    pub mode: Mode,
    pub metrics: CycleMetrics,
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every configuration of `spec`. `threads = None` uses the global pool.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    let configs = spec.configs()?;
    let work = || {
        configs
            .par_iter()
            .map(|cfg| {
                Ok(SweepRow {
                    tau_s: cfg.tau,
                    kt_hot: cfg.kt_hot,
                    mode: cfg.mode,
                    metrics: run_cycle(cfg)?,
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Configuration(format!("cannot start {n} worker threads: {e}")))?
            .install(work),
        None => work(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Configuration(format!(
                "unknown format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn round_sig(x: f64) -> f64 {
    format_sig(x).parse().unwrap_or(x)
}

fn flags_field(flags: &[Flag]) -> String {
    flags
        .iter()
        .map(|f| f.as_str())
        .collect::<Vec<_>>()
        .join("|")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "# schema: {SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
    for row in rows {
        let m = &row.metrics;
        w.write_record([
            format_sig(row.tau_s),
            format_sig(row.kt_hot),
            row.mode.as_str().to_string(),
            format_sig(m.w2),
            format_sig(m.w4),
            format_sig(m.q1),
            format_sig(m.q3),
            format_sig(m.cost2),
            format_sig(m.cost4),
            opt(m.eta_a),
            opt(m.eta1_sta),
            opt(m.eta2_sta),
            format_sig(m.p_a),
            format_sig(m.p_sta),
            format_sig(m.fidelity_tracking),
            flags_field(&m.flags),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRow<'a> {
    tau_s: f64,
    #[serde(rename = "kT_hot_peV")]
    kt_hot_pev: f64,
    mode: &'a str,
    #[serde(rename = "W2_peV")]
    w2: f64,
    #[serde(rename = "W4_peV")]
    w4: f64,
    #[serde(rename = "Q1_peV")]
    q1: f64,
    #[serde(rename = "Q3_peV")]
    q3: f64,
    #[serde(rename = "cost2_peV")]
    cost2: f64,
    #[serde(rename = "cost4_peV")]
    cost4: f64,
    #[serde(rename = "eta_A")]
    eta_a: Option<f64>,
    #[serde(rename = "eta1_STA")]
    eta1: Option<f64>,
    #[serde(rename = "eta2_STA")]
    eta2: Option<f64>,
    #[serde(rename = "P_A")]
    p_a: f64,
    #[serde(rename = "P_STA")]
    p_sta: f64,
    fidelity_tracking: f64,
    flags: String,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    schema: &'a str,
    rows: Vec<JsonRow<'a>>,
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    let table = JsonTable {
        schema: SCHEMA_VERSION,
        rows: rows
            .iter()
            .map(|row| {
                let m = &row.metrics;
                JsonRow {
                    tau_s: round_sig(row.tau_s),
                    kt_hot_pev: round_sig(row.kt_hot),
                    mode: row.mode.as_str(),
                    w2: round_sig(m.w2),
                    w4: round_sig(m.w4),
                    q1: round_sig(m.q1),
                    q3: round_sig(m.q3),
                    cost2: round_sig(m.cost2),
                    cost4: round_sig(m.cost4),
                    eta_a: m.eta_a.map(round_sig),
                    eta1: m.eta1_sta.map(round_sig),
                    eta2: m.eta2_sta.map(round_sig),
                    p_a: round_sig(m.p_a),
                    p_sta: round_sig(m.p_sta),
                    fidelity_tracking: round_sig(m.fidelity_tracking),
                    flags: flags_field(&m.flags),
                }
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut out, &table).map_err(io::Error::other)?;
    writeln!(out)
}

pub fn write_table<W: Write>(rows: &[SweepRow], format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

/// Position of the largest value of `key` among rows matching `filter`.
pub fn argmax_tau<F, K>(rows: &[SweepRow], filter: F, key: K) -> Option<f64>
where
    F: Fn(&SweepRow) -> bool,
    K: Fn(&SweepRow) -> f64,
{
    rows.iter()
        .filter(|r| filter(r))
        .max_by(|a, b| key(a).total_cmp(&key(b)))
        .map(|r| r.tau_s)
}
