//! Simulation of a spin-1/2 Landau–Zener quantum Otto engine driven
//! ideally, non-adiabatically, or with a counter-diabatic shortcut.
//!
//! Layering, bottom to top: [`quantum`] (2×2 / 4×4 linear algebra),
//! [`schedule`] (cubic ramp), [`model`] (Hamiltonians), [`propagator`]
//! (time-ordered evolution), [`thermo`] (Gibbs states and energy
//! bookkeeping), [`engine`] (the four-stroke cycle), and [`sweep`],
//! [`config`], [`validate`] for batch runs and self-checks.

pub mod config;
pub mod engine;
pub mod error;
pub mod model;
pub mod propagator;
pub mod quantum;
pub mod schedule;
pub mod sweep;
pub mod thermo;
pub mod validate;

pub use engine::{
    run_cycle, CostFunctional, CycleMetrics, CycleTime, EngineConfig, Flag, HeatingStroke, Mode,
};
pub use error::{Error, Result};
pub use model::{Driving, LZModel};
pub use propagator::{EvolutionSpec, DEFAULT_STEPS};
pub use quantum::{DensityMatrix, Operator, Qubit, TwoQubit, Unitary};
pub use schedule::RampSchedule;
pub use sweep::{run_sweep, SweepRow, SweepSpec};
pub use thermo::{BathSpec, TemperaturePreset};
