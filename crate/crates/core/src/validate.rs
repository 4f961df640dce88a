//! Self-check suite run by `qotto validate`.
//!
//! Every check is deterministic: random inputs come from a fixed-seed
//! ChaCha stream, and the sweep-level checks use the default grid.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{otto_limit, run_cycle, CycleMetrics, EngineConfig, HeatingStroke, Mode};
use crate::error::Result;
use crate::model::{Driving, LZModel};
use crate::propagator::{evolve, time_ordered, total_unitary, EvolutionSpec, DEFAULT_STEPS};
use crate::quantum::{
    expm_unitary, fidelity, partial_trace, tensor, DensityMatrix, Operator, Qubit, C64,
};
use crate::schedule::RampSchedule;
use crate::sweep::{run_sweep, SweepRow, SweepSpec};
use crate::thermo::{gibbs, BathSpec};

pub const SEED: u64 = 0x5eed_0770;

/// Wall-clock budget for the whole suite, in seconds.
pub const RUNTIME_BUDGET_S: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `measured <= threshold`.
    AtMost,
    /// `measured >= threshold`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, measured: f64, threshold: f64) -> Self {
        Self {
            name,
            measured,
            threshold,
            bound: Bound::AtMost,
            passed: measured <= threshold,
        }
    }

    fn at_least(name: &'static str, measured: f64, threshold: f64) -> Self {
        Self {
            name,
            measured,
            threshold,
            bound: Bound::AtLeast,
            passed: measured >= threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "[{}] {:<28} {:>13.6e} {op} {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} failed, {:.2} s",
            self.checks.len(),
            failed,
            self.elapsed_s
        )
    }
}

fn random_operator(rng: &mut ChaCha8Rng, scale: f64) -> Operator {
    let mut c = || rng.random_range(-scale..scale);
    Operator::pauli(c(), c(), c(), c()).expect("finite")
}

fn random_qubit(rng: &mut ChaCha8Rng) -> Qubit {
    let r: f64 = rng.random_range(0.0..1.0);
    let (cos_t, phi): (f64, f64) = (
        rng.random_range(-1.0..1.0),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    let bloch = Operator::pauli(1.0, r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t)
        .expect("finite");
    DensityMatrix::new(bloch.matrix() * C64::new(0.5, 0.0)).expect("valid Bloch vector")
}

/// Fidelity of the state reached from the initial ground state with the
/// final instantaneous ground state, with the counter-diabatic field scaled
/// by `k` (1 is the exact field).
pub fn tracking_fidelity(model: &LZModel, n_steps: usize, k: f64) -> Result<f64> {
    let u = time_ordered(model.tau(), n_steps, |t| {
        Ok(model.h0(t)? + Operator::pauli(0.0, 0.0, k * model.b_cd(t)?, 0.0)?)
    })?;
    let start = DensityMatrix::pure(&model.h0(0.0)?.eigh().ground())?;
    let target = DensityMatrix::pure(&model.h0(model.tau())?.eigh().ground())?;
    fidelity(&start.conjugate(&u), &target)
}

fn engine(tau: f64) -> Result<LZModel> {
    let base = EngineConfig::default();
    LZModel::expansion(base.bx, base.nu_z_max, tau)
}

pub fn run_validation(threads: Option<usize>) -> Result<ValidationReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = Vec::new();

    // Linear algebra.
    let mut roundtrip = 0.0f64;
    let mut unitarity = 0.0f64;
    let mut reconstruction = 0.0f64;
    for _ in 0..10_000 {
        let h = random_operator(&mut rng, 1e4);
        let back = Operator::from_matrix(&h.matrix())?;
        for (a, b) in h.coefficients().iter().zip(back.coefficients()) {
            roundtrip = roundtrip.max((a - b).abs() / 1e4);
        }
        let dt = rng.random_range(0.0..1e-2);
        unitarity = unitarity.max(expm_unitary(&h, dt)?.unitarity_defect());
        let e = h.eigh();
        let rebuilt =
            e.projector(0) * C64::from(e.values[0]) + e.projector(1) * C64::from(e.values[1]);
        let scale = h.op_norm().max(1.0);
        reconstruction =
            reconstruction.max(crate::quantum::max_abs(&(rebuilt - h.matrix())) / scale);
    }
    checks.push(Check::at_most("pauli_round_trip", roundtrip, 1e-12));
    checks.push(Check::at_most("expm_unitarity", unitarity, 1e-10));
    checks.push(Check::at_most("eigh_reconstruction", reconstruction, 1e-12));

    let mut symmetry = 0.0f64;
    let mut self_fidelity = 0.0f64;
    let mut ptrace = 0.0f64;
    for _ in 0..1_000 {
        let (a, b) = (random_qubit(&mut rng), random_qubit(&mut rng));
        symmetry = symmetry.max((fidelity(&a, &b)? - fidelity(&b, &a)?).abs());
        self_fidelity = self_fidelity.max((1.0 - fidelity(&a, &a)?).abs());
        let ab = tensor(&a, &b);
        ptrace = ptrace
            .max(partial_trace(&ab, 1)?.max_abs_diff(&a))
            .max(partial_trace(&ab, 2)?.max_abs_diff(&b));
    }
    checks.push(Check::at_most("fidelity_symmetry", symmetry, 1e-10));
    checks.push(Check::at_most("fidelity_self", self_fidelity, 1e-10));
    checks.push(Check::at_most("partial_trace_of_tensor", ptrace, 1e-12));

    // Schedule and model.
    let mut fd = 0.0f64;
    for _ in 0..1_000 {
        let from = rng.random_range(-5e3..5e3);
        let to =
            from + rng.random_range(100.0..5e3) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let tau = rng.random_range(1e-4..1e-2);
        let ramp = RampSchedule::between(from, to, tau)?;
        let t = tau * rng.random_range(0.05..0.95);
        let h = tau * 1e-6;
        let numeric = (ramp.value(t + h)? - ramp.value(t - h)?) / (2.0 * h);
        let exact = ramp.derivative(t)?;
        fd = fd.max((numeric - exact).abs() / exact.abs().max(1.0));
    }
    checks.push(Check::at_most("schedule_derivative_fd", fd, 1e-6));

    let model = engine(1e-3)?;
    let gap_margin = (0..=10_000)
        .map(|k| model.gap(1e-3 * k as f64 / 1e4).map(|g| g - model.bx()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("gap_at_least_bx", gap_margin, 0.0));

    // Propagation.
    let mut infidelity = 0.0f64;
    for tau_us in [200.0, 500.0, 1000.0, 2250.0] {
        let f = tracking_fidelity(&engine(tau_us * 1e-6)?, DEFAULT_STEPS, 1.0)?;
        infidelity = infidelity.max(1.0 - f);
    }
    checks.push(Check::at_most("cd_tracking_infidelity", infidelity, 1e-6));

    // Mis-normalized fields: half strength, and π times strength.
    let mut mutant = f64::INFINITY;
    for k in [0.5, std::f64::consts::PI] {
        mutant = mutant.min(1.0 - tracking_fidelity(&engine(1e-3)?, DEFAULT_STEPS, k)?);
    }
    checks.push(Check::at_least("cd_mutant_infidelity", mutant, 1e-3));

    let mut total_defect = 0.0f64;
    for driving in [Driving::NonAdiabatic, Driving::Shortcut] {
        let spec = EvolutionSpec::new(engine(2250e-6)?, driving, DEFAULT_STEPS)?;
        total_defect = total_defect.max(total_unitary(&spec)?.unitarity_defect());
    }
    checks.push(Check::at_most(
        "total_unitary_unitarity",
        total_defect,
        1e-10,
    ));

    let spec = EvolutionSpec::new(engine(500e-6)?, Driving::NonAdiabatic, 256)?;
    let reference = total_unitary(&spec.with_steps(1 << 14)?)?;
    let err =
        |n| -> Result<f64> { Ok(total_unitary(&spec.with_steps(n)?)?.max_abs_diff(&reference)) };
    let ratio = err(256)? / err(512)?;
    checks.push(Check::at_least("step_doubling_ratio_min", ratio, 3.0));
    checks.push(Check::at_most("step_doubling_ratio_max", ratio, 5.0));

    let mut spectrum = 0.0f64;
    for _ in 0..50 {
        let rho = random_qubit(&mut rng);
        let spec = EvolutionSpec::new(
            engine(rng.random_range(2e-4..2.25e-3))?,
            Driving::NonAdiabatic,
            512,
        )?;
        let out = evolve(&rho, &spec)?;
        for (a, b) in rho.eigenvalues().iter().zip(out.eigenvalues()) {
            spectrum = spectrum.max((a - b).abs());
        }
    }
    checks.push(Check::at_most("spectrum_preserved", spectrum, 1e-12));

    // Thermodynamics.
    let mut commutator = 0.0f64;
    for _ in 0..1_000 {
        let h = random_operator(&mut rng, 1e4);
        let kt = rng.random_range(0.5..60.0);
        let rho = gibbs(&h, &BathSpec::hot(kt)?)?;
        let m = h.matrix();
        let c = m * rho.matrix() - rho.matrix() * m;
        commutator = commutator.max(crate::quantum::max_abs(&c) / h.op_norm().max(1.0));
    }
    checks.push(Check::at_most("gibbs_commutes_with_h", commutator, 1e-12));

    let rows = run_sweep(&SweepSpec::default(), threads)?;
    sweep_checks(&rows, &mut checks)?;
    asymptotic_checks(&mut checks)?;

    let elapsed_s = start.elapsed().as_secs_f64();
    checks.push(Check::at_most("runtime_s", elapsed_s, RUNTIME_BUDGET_S));
    Ok(ValidationReport { checks, elapsed_s })
}

fn sweep_checks(rows: &[SweepRow], checks: &mut Vec<Check>) -> Result<()> {
    let metrics = |mode: Mode| rows.iter().filter(move |r| r.mode == mode);

    let first_law = rows
        .iter()
        .map(|r| r.metrics.ledger().first_law_residual().abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("first_law_residual", first_law, 1e-9));

    let mut swap = 0.0f64;
    for row in rows.iter().step_by(7) {
        let cfg = row_config(row);
        let other = run_cycle(&EngineConfig {
            heating: HeatingStroke::Swap,
            ..cfg
        })?;
        let (a, b) = (row.metrics.ledger(), other.ledger());
        for d in [a.q1 - b.q1, a.w2 - b.w2, a.q3 - b.q3, a.w4 - b.w4] {
            swap = swap.max(d.abs());
        }
    }
    checks.push(Check::at_most("swap_matches_gibbs_reset", swap, 1e-12));

    let carnot_excess = rows
        .iter()
        .flat_map(|r| {
            let bound = row_config(r).carnot_bound();
            let m = &r.metrics;
            [m.eta_a, m.eta1_sta, m.eta2_sta]
                .into_iter()
                .flatten()
                .map(move |e| e - bound)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most("carnot_excess", carnot_excess, 1e-12));

    let mut sta_work = 0.0f64;
    for row in metrics(Mode::Shortcut) {
        let ideal = rows
            .iter()
            .find(|r| {
                r.mode == Mode::IdealAdiabatic && r.kt_hot == row.kt_hot && r.tau_s == row.tau_s
            })
            .expect("sweep includes ideal rows");
        sta_work = sta_work
            .max((row.metrics.w2 - ideal.metrics.w2).abs())
            .max((row.metrics.w4 - ideal.metrics.w4).abs());
    }
    checks.push(Check::at_most("sta_work_equals_ideal", sta_work, 1e-8));

    let mut ordering = f64::INFINITY;
    for row in metrics(Mode::Shortcut) {
        let na = rows
            .iter()
            .find(|r| {
                r.mode == Mode::NonAdiabatic && r.kt_hot == row.kt_hot && r.tau_s == row.tau_s
            })
            .expect("sweep includes non-adiabatic rows");
        if let (Some(e2), Some(ena)) = (row.metrics.eta2_sta, na.metrics.eta_a) {
            if e2 > 0.0 && ena > 0.0 {
                ordering = ordering.min(e2 - ena);
            }
        }
    }
    if ordering.is_finite() {
        checks.push(Check::at_least("eta2_sta_minus_eta_na", ordering, 0.0));
    }

    let eta_gap = metrics(Mode::Shortcut)
        .filter_map(|r| Some(r.metrics.eta1_sta? - r.metrics.eta2_sta?))
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("eta1_minus_eta2", eta_gap, -1e-12));
    Ok(())
}

fn row_config(row: &SweepRow) -> EngineConfig {
    EngineConfig::default()
        .with_mode(row.mode)
        .with_tau(row.tau_s)
        .with_hot(row.kt_hot)
}

/// Non-adiabatic efficiency approaches the Otto limit as τ grows. Step
/// counts scale with τ so the step size stays fixed.
fn asymptotic_checks(checks: &mut Vec<Check>) -> Result<()> {
    let base = EngineConfig::default().with_mode(Mode::NonAdiabatic);
    let otto = otto_limit(base.nu_i(), base.nu_f());
    let mut gaps = Vec::new();
    for tau_us in [2250u32, 4500, 9000, 18000] {
        let cfg = EngineConfig {
            n_steps: DEFAULT_STEPS * (tau_us as usize).div_ceil(1000),
            ..base.with_tau(f64::from(tau_us) / 1e6)
        };
        let m: CycleMetrics = run_cycle(&cfg)?;
        gaps.push(m.eta_a.map_or(f64::INFINITY, |e| (e - otto).abs()));
    }
    let worst_ratio = gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    checks.push(Check::at_most("na_otto_gap_shrinks", worst_ratio, 1.0));
    checks.push(Check::at_most(
        "na_otto_gap_at_18ms",
        *gaps.last().expect("four points"),
        1e-4,
    ));
    Ok(())
}
