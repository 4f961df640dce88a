//! Shared fixtures for the criterion benchmarks.

use qotto_core::{EngineConfig, Mode, SweepSpec};

/// Default engine at the given drive time (μs) and mode.
pub fn engine_at(tau_us: u32, mode: Mode) -> EngineConfig {
    EngineConfig::default()
        .with_mode(mode)
        .with_tau(f64::from(tau_us) / 1e6)
}

/// A reduced sweep: every fourth point of the default τ grid, one hot bath.
pub fn small_sweep() -> SweepSpec {
    let mut spec = SweepSpec::default();
    spec.tau_grid = spec.tau_grid.iter().copied().step_by(4).collect();
    spec.hot_temperatures.truncate(1);
    spec
}
