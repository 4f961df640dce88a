//! Time-ordered evolution under a time-dependent single-qubit Hamiltonian.
//!
//! The interval `[0, τ]` is split into `n` equal steps and each step is
//! propagated exactly under the Hamiltonian frozen at the step midpoint
//! (exponential midpoint rule, second order in `dt`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Driving, LZModel};
use crate::quantum::{expm_unitary, Operator, Qubit, Unitary};

/// Step count used for engine-scale strokes (τ up to a few ms).
pub const DEFAULT_STEPS: usize = 4096;

/// Upper bound for [`converged_steps`].
pub const MAX_STEPS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSpec {
    model: LZModel,
    driving: Driving,
    n_steps: usize,
}

impl EvolutionSpec {
    pub fn new(model: LZModel, driving: Driving, n_steps: usize) -> Result<Self> {
        if n_steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "n_steps must be at least 2, got {n_steps}"
            )));
        }
        Ok(Self {
            model,
            driving,
            n_steps,
        })
    }

    pub fn model(&self) -> &LZModel {
        &self.model
    }

    pub fn driving(&self) -> Driving {
        self.driving
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn tau(&self) -> f64 {
        self.model.tau()
    }

    pub fn dt(&self) -> f64 {
        self.tau() / self.n_steps as f64
    }

    pub fn with_steps(&self, n_steps: usize) -> Result<Self> {
        Self::new(self.model, self.driving, n_steps)
    }

    /// Midpoint of step `k`.
    pub fn midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dt()
    }

    /// Propagator for step `k` alone.
    pub fn step(&self, k: usize) -> Result<Unitary<2>> {
        let h = self.model.h_eff(self.midpoint(k), self.driving)?;
        expm_unitary(&h, self.dt())
    }
}

/// Midpoint-rule product for an arbitrary Hamiltonian `h(t)` on `[0, tau]`.
pub fn time_ordered<F>(tau: f64, n_steps: usize, mut h: F) -> Result<Unitary<2>>
where
    F: FnMut(f64) -> Result<Operator>,
{
    if n_steps == 0 || !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need tau >= 0 and at least one step (tau={tau}, n_steps={n_steps})"
        )));
    }
    let dt = tau / n_steps as f64;
    (0..n_steps).try_fold(Unitary::identity(), |acc, k| {
        let t = (k as f64 + 0.5) * dt;
        Ok(expm_unitary(&h(t)?, dt)?.then_after(&acc))
    })
}

/// `U = U_{n-1} ⋯ U_1 U_0`, latest step leftmost.
pub fn total_unitary(spec: &EvolutionSpec) -> Result<Unitary<2>> {
    let model = spec.model;
    let driving = spec.driving;
    time_ordered(spec.tau(), spec.n_steps, |t| model.h_eff(t, driving))
}

/// `U ρ U†` with `U` from [`total_unitary`].
pub fn evolve(rho: &Qubit, spec: &EvolutionSpec) -> Result<Qubit> {
    Ok(rho.conjugate(&total_unitary(spec)?))
}

/// Visits the state at the start of every step together with the step
/// index, then returns the final state.
pub fn evolve_observed<F>(rho: &Qubit, spec: &EvolutionSpec, mut observe: F) -> Result<Qubit>
where
    F: FnMut(usize, &Qubit) -> Result<()>,
{
    let mut state = *rho;
    for k in 0..spec.n_steps {
        observe(k, &state)?;
        state = state.conjugate(&spec.step(k)?);
    }
    Ok(state)
}

/// Doubles the step count, starting from `spec.n_steps()`, until two
/// successive total propagators differ by less than `tol` in max-entry norm.
/// Returns the coarser count of the first passing pair.
pub fn converged_steps(spec: &EvolutionSpec, tol: f64) -> Result<usize> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    let mut n = spec.n_steps;
    let mut coarse = total_unitary(spec)?;
    while n < MAX_STEPS {
        let fine = total_unitary(&spec.with_steps(2 * n)?)?;
        if coarse.max_abs_diff(&fine) < tol {
            return Ok(n);
        }
        n *= 2;
        coarse = fine;
    }
    Err(Error::NonConvergence {
        tol,
        cap: MAX_STEPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{fidelity, DensityMatrix};
    use crate::schedule::RampSchedule;

    fn engine(tau: f64, driving: Driving, n: usize) -> EvolutionSpec {
        EvolutionSpec::new(LZModel::expansion(1000.0, 2500.0, tau).unwrap(), driving, n).unwrap()
    }

    #[test]
    fn constant_hamiltonian_collapses_to_single_exponential() {
        let model = LZModel::new(1000.0, RampSchedule::constant(1800.0, 1e-3).unwrap()).unwrap();
        let exact = expm_unitary(&model.h0(0.0).unwrap(), 1e-3).unwrap();
        for n in [2, 7, 64, 1000] {
            let spec = EvolutionSpec::new(model, Driving::Shortcut, n).unwrap();
            assert!(total_unitary(&spec).unwrap().max_abs_diff(&exact) < 1e-12);
        }
    }

    #[test]
    fn step_doubling_shows_second_order_convergence() {
        let reference = total_unitary(&engine(500e-6, Driving::NonAdiabatic, 1 << 14)).unwrap();
        let err = |n| {
            total_unitary(&engine(500e-6, Driving::NonAdiabatic, n))
                .unwrap()
                .max_abs_diff(&reference)
        };
        let ratio = err(256) / err(512);
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn shortcut_tracks_ground_state() {
        let spec = engine(200e-6, Driving::Shortcut, DEFAULT_STEPS);
        let model = spec.model();
        let start = DensityMatrix::pure(&model.h0(0.0).unwrap().eigh().ground()).unwrap();
        let target = DensityMatrix::pure(&model.h0(spec.tau()).unwrap().eigh().ground()).unwrap();
        let out = evolve(&start, &spec).unwrap();
        assert!(fidelity(&out, &target).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn maximally_mixed_is_stationary() {
        let out = evolve(
            &Qubit::maximally_mixed(),
            &engine(300e-6, Driving::NonAdiabatic, 512),
        )
        .unwrap();
        assert!(out.max_abs_diff(&Qubit::maximally_mixed()) < 1e-12);
    }

    #[test]
    fn purity_preserved() {
        let psi = crate::quantum::Ket::<2>::new(0.6.into(), crate::quantum::C64::new(0.0, 0.8));
        let rho = DensityMatrix::pure(&psi).unwrap();
        let out = evolve(&rho, &engine(700e-6, Driving::NonAdiabatic, 2048)).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn observed_evolution_matches_total_unitary() {
        let spec = engine(400e-6, Driving::Shortcut, 300);
        let rho = DensityMatrix::pure(&spec.model().h0(0.0).unwrap().eigh().excited()).unwrap();
        let mut visits = 0;
        let out = evolve_observed(&rho, &spec, |_, _| {
            visits += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(visits, 300);
        assert!(out.max_abs_diff(&evolve(&rho, &spec).unwrap()) < 1e-13);
    }

    #[test]
    fn converged_steps_behaviour() {
        let constant = EvolutionSpec::new(
            LZModel::new(1000.0, RampSchedule::constant(0.0, 1e-3).unwrap()).unwrap(),
            Driving::NonAdiabatic,
            16,
        )
        .unwrap();
        assert_eq!(converged_steps(&constant, 1e-12).unwrap(), 16);

        let n = converged_steps(&engine(200e-6, Driving::NonAdiabatic, 256), 1e-9).unwrap();
        assert!(n <= 1 << 16);
        assert_eq!(n, 8192);

        assert!(converged_steps(&constant, 0.0).is_err());
        assert!(converged_steps(&constant, f64::INFINITY).is_err());
    }

    #[test]
    fn rejects_too_few_steps() {
        let model = LZModel::expansion(1000.0, 2500.0, 1e-3).unwrap();
        assert!(EvolutionSpec::new(model, Driving::NonAdiabatic, 1).is_err());
    }
}
