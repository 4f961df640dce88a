//! INI configuration files.
//!
//! ```ini
//! [engine]
//! bx_hz = 1000
//! nu_z_max_hz = 2500
//! tau_us = 1000
//! kt_cold_pev = 1.9
//! kt_hot_pev = 6.45
//! mode = sta
//! n_steps = 4096
//! cost_functional = time-averaged-norm
//! thermalization_s = 0
//! heating = gibbs-reset
//!
//! [sweep]
//! preset = paper-sec4
//! tau_start_us = 200
//! tau_stop_us = 2250
//! tau_step_us = 50
//! hot_kt_pev = 6.45, 8.45
//! cold_kt_pev = 1.9
//! modes = ideal, na, sta
//! format = csv
//! out = sweep.csv
//! split_by_hot = false
//! ```
//!
//! Every key is optional. `[engine]` settings other than `tau_us`,
//! `kt_hot_pev` and `mode` also become the fixed settings of the sweep.
//! Unknown sections or keys are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::{Ini, ParseOption};

use crate::engine::{CycleTime, EngineConfig, Mode};
use crate::error::{Error, Result};
use crate::sweep::{tau_grid_us, Format, SweepSpec};
use crate::thermo::TemperaturePreset;

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub split_by_hot: bool,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            out: None,
            split_by_hot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FileConfig {
    pub engine: EngineConfig,
    pub sweep: SweepSpec,
    pub output: OutputSettings,
}

fn key_error(section: &str, key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Configuration(format!("[{section}] {key}: {msg}"))
}

fn parse<T: FromStr>(section: &str, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| {
        key_error(
            section,
            key,
            format!("cannot parse '{}': {e}", value.trim()),
        )
    })
}

fn parse_list<T: FromStr>(section: &str, key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse(section, key, v))
        .collect()
}

fn micros(section: &str, key: &str, value: &str) -> Result<f64> {
    let us: f64 = parse(section, key, value)?;
    if !(us > 0.0 && us.is_finite()) {
        return Err(key_error(
            section,
            key,
            "must be a positive number of microseconds",
        ));
    }
    Ok(us / 1e6)
}

pub fn load_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Configuration(format!("cannot read config file {}: {e}", path.display()))
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<FileConfig> {
    let opts = ParseOption {
        enabled_escape: false,
        ..ParseOption::default()
    };
    let ini = Ini::load_from_str_opt(text, opts)
        .map_err(|e| Error::Configuration(format!("malformed config file: {e}")))?;
    let mut cfg = FileConfig::default();
    let mut engine = EngineConfig::default();

    for (section, props) in ini.iter() {
        match section {
            None if props.is_empty() => {}
            None => {
                let (key, _) = props.iter().next().expect("non-empty");
                return Err(Error::Configuration(format!(
                    "{key}: keys must appear under [engine] or [sweep]"
                )));
            }
            Some("engine") => {
                for (key, value) in props.iter() {
                    apply_engine_key(&mut engine, key, value)?;
                }
            }
            Some("sweep") => {}
            Some(other) => {
                return Err(Error::Configuration(format!("unknown section [{other}]")));
            }
        }
    }
    cfg.engine = engine;
    cfg.sweep.base = engine;
    cfg.sweep.cold_temperature = engine.kt_cold;

    if let Some(props) = ini.section(Some("sweep")) {
        const S: &str = "sweep";
        // Presets first, so explicit temperatures override them.
        if let Some(value) = props.get("preset") {
            let preset: TemperaturePreset = parse(S, "preset", value)?;
            cfg.sweep = cfg.sweep.with_preset(preset);
        }
        let mut range = [None, None, None];
        for (key, value) in props.iter() {
            match key {
                "preset" => {}
                "tau_us" => {
                    cfg.sweep.tau_grid = value
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(|v| micros(S, key, v))
                        .collect::<Result<_>>()?;
                }
                "tau_start_us" => range[0] = Some(parse::<u32>(S, key, value)?),
                "tau_stop_us" => range[1] = Some(parse::<u32>(S, key, value)?),
                "tau_step_us" => range[2] = Some(parse::<u32>(S, key, value)?),
                "hot_kt_pev" => cfg.sweep.hot_temperatures = parse_list(S, key, value)?,
                "cold_kt_pev" => cfg.sweep.cold_temperature = parse(S, key, value)?,
                "modes" => cfg.sweep.modes = parse_list(S, key, value)?,
                "format" => cfg.output.format = parse(S, key, value)?,
                "out" => cfg.output.out = Some(PathBuf::from(value.trim())),
                "split_by_hot" => cfg.output.split_by_hot = parse(S, key, value)?,
                other => return Err(key_error(S, other, "unknown key")),
            }
        }
        if range.iter().any(Option::is_some) {
            if props.contains_key("tau_us") {
                return Err(key_error(
                    S,
                    "tau_us",
                    "conflicts with tau_start_us/tau_stop_us/tau_step_us",
                ));
            }
            let [start, stop, step] = range;
            let start = start.ok_or_else(|| key_error(S, "tau_start_us", "missing"))?;
            let stop = stop.unwrap_or(start);
            let step = step.unwrap_or(50);
            cfg.sweep.tau_grid =
                tau_grid_us(start, stop, step).map_err(|e| key_error(S, "tau_start_us", e))?;
        }
    }
    Ok(cfg)
}

fn apply_engine_key(engine: &mut EngineConfig, key: &str, value: &str) -> Result<()> {
    const E: &str = "engine";
    match key {
        "bx_hz" => engine.bx = parse(E, key, value)?,
        "nu_z_max_hz" => engine.nu_z_max = parse(E, key, value)?,
        "tau_us" => engine.tau = micros(E, key, value)?,
        "kt_cold_pev" => engine.kt_cold = parse(E, key, value)?,
        "kt_hot_pev" => engine.kt_hot = parse(E, key, value)?,
        "mode" => engine.mode = parse::<Mode>(E, key, value)?,
        "n_steps" => engine.n_steps = parse(E, key, value)?,
        "cost_functional" => engine.cost_functional = parse(E, key, value)?,
        "heating" => engine.heating = parse(E, key, value)?,
        "thermalization_s" => {
            let extra: f64 = parse(E, key, value)?;
            if !(extra >= 0.0 && extra.is_finite()) {
                return Err(key_error(
                    E,
                    key,
                    "must be a non-negative number of seconds",
                ));
            }
            engine.cycle_time = if extra == 0.0 {
                CycleTime::TwoTau
            } else {
                CycleTime::TwoTauPlusThermalization(extra)
            };
        }
        other => return Err(key_error(E, other, "unknown key")),
    }
    Ok(())
}
