//! Cubic driving ramp `b(t) = C + D (t/τ)² (1/2 - t/(3τ))`.
//!
//! The ramp starts at `C`, ends at `C + D/6`, and has zero slope at both
//! ends, so any counter-diabatic term built from its derivative switches on
//! and off smoothly.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Times this close to the interval (relative to τ) are clamped onto it.
const CLAMP_SLACK: f64 = 1e-15;

/// Field component a ramp drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldAxis {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule {
    initial: f64,
    amplitude: f64,
    tau: f64,
}

impl RampSchedule {
    pub fn new(initial: f64, amplitude: f64, tau: f64) -> Result<Self> {
        ensure_finite("initial", initial)?;
        ensure_finite("amplitude", amplitude)?;
        ensure_finite("tau", tau)?;
        if tau <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tau must be positive, got {tau}"
            )));
        }
        Ok(Self {
            initial,
            amplitude,
            tau,
        })
    }

    /// Ramp from `from` to `to` over `tau`.
    pub fn between(from: f64, to: f64, tau: f64) -> Result<Self> {
        Self::new(from, solve_amplitude(from, to), tau)
    }

    /// A ramp that holds `value` for the whole interval.
    pub fn constant(value: f64, tau: f64) -> Result<Self> {
        Self::new(value, 0.0, tau)
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `C + D/6`.
    pub fn final_value(&self) -> f64 {
        self.initial + self.amplitude / 6.0
    }

    /// The same ramp played backwards in time: from the final value to the initial one.
    pub fn reversed(&self) -> Self {
        Self {
            initial: self.final_value(),
            amplitude: -self.amplitude,
            tau: self.tau,
        }
    }

    fn clamp(&self, t: f64) -> Result<f64> {
        let slack = CLAMP_SLACK * self.tau;
        if !t.is_finite() || t < -slack || t > self.tau + slack {
            return Err(Error::OutOfRange { t, tau: self.tau });
        }
        Ok(t.clamp(0.0, self.tau))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        let t = self.clamp(t)?;
        if t == self.tau {
            return Ok(self.final_value());
        }
        let s = t / self.tau;
        Ok(self.initial + self.amplitude * s * s * (0.5 - s / 3.0))
    }

    /// `D t (τ - t) / τ³`, in Hz per second.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        let t = self.clamp(t)?;
        let tau = self.tau;
        Ok(self.amplitude * t * (tau - t) / (tau * tau * tau))
    }
}

/// Amplitude `D` that carries a ramp from `initial` to `final_value`.
pub fn solve_amplitude(initial: f64, final_value: f64) -> f64 {
    6.0 * (final_value - initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn expansion() -> RampSchedule {
        RampSchedule::new(0.0, 15000.0, 1e-3).unwrap()
    }

    #[test]
    fn value_examples() {
        let s = expansion();
        assert_eq!(s.value(0.0).unwrap(), 0.0);
        assert_eq!(s.value(1e-3).unwrap(), 2500.0);
        assert_relative_eq!(s.value(0.5e-3).unwrap(), 1250.0, max_relative = 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let s = expansion();
        assert_eq!(s.derivative(0.0).unwrap(), 0.0);
        assert_eq!(s.derivative(1e-3).unwrap(), 0.0);
        assert_relative_eq!(s.derivative(0.5e-3).unwrap(), 3.75e6, max_relative = 1e-14);
    }

    #[test]
    fn amplitude_examples() {
        assert_eq!(solve_amplitude(0.0, 2500.0), 15000.0);
        assert_eq!(solve_amplitude(2500.0, 0.0), -15000.0);
        assert_eq!(solve_amplitude(42.0, 42.0), 0.0);
        let s = RampSchedule::between(0.0, 2500.0, 1e-3).unwrap();
        assert_eq!(s.value(1e-3).unwrap(), 2500.0);
    }

    #[test]
    fn compression_mirrors_expansion() {
        let c = expansion().reversed();
        assert_eq!(c.value(0.0).unwrap(), 2500.0);
        assert_eq!(c.value(1e-3).unwrap(), 0.0);
    }

    #[test]
    fn out_of_range_rejected_but_round_off_clamped() {
        let s = expansion();
        assert!(matches!(s.value(-1e-9), Err(Error::OutOfRange { .. })));
        assert!(s.derivative(1.1e-3).is_err());
        assert!(s.value(f64::NAN).is_err());
        let nudged = 1e-3 * (1.0 + 5e-16);
        assert_eq!(s.value(nudged).unwrap(), 2500.0);
        assert_eq!(s.value(-1e-19).unwrap(), 0.0);
    }

    #[test]
    fn invalid_tau_rejected() {
        assert!(RampSchedule::new(0.0, 1.0, 0.0).is_err());
        assert!(RampSchedule::new(0.0, 1.0, -1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn derivative_matches_central_difference(
            initial in -5000.0f64..5000.0,
            amplitude in prop_oneof![-3e4f64..-100.0, 100.0f64..3e4],
            tau in 1e-4f64..1e-2,
            frac in 0.05f64..0.95,
        ) {
            let s = RampSchedule::new(initial, amplitude, tau).unwrap();
            let t = frac * tau;
            let h = 1e-5 * tau;
            let fd = (s.value(t + h).unwrap() - s.value(t - h).unwrap()) / (2.0 * h);
            let exact = s.derivative(t).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs());
        }

        #[test]
        fn single_signed_amplitude_gives_monotone_ramp(
            amplitude in prop_oneof![-3e4f64..-1.0, 1.0f64..3e4],
            tau in 1e-4f64..1e-2,
        ) {
            let s = RampSchedule::new(100.0, amplitude, tau).unwrap();
            let samples: Vec<f64> = (0..=200).map(|k| s.value(tau * k as f64 / 200.0).unwrap()).collect();
            for w in samples.windows(2) {
                prop_assert!((w[1] - w[0]) * amplitude.signum() > 0.0);
            }
        }

        #[test]
        fn endpoint_round_trip(from in -1e4f64..1e4, to in -1e4f64..1e4, tau in 1e-5f64..1.0) {
            let s = RampSchedule::between(from, to, tau).unwrap();
            prop_assert_eq!(s.value(0.0).unwrap(), from);
            let end = s.value(tau).unwrap();
            prop_assert!((end - to).abs() <= 1e-9 * (1.0 + to.abs()));
        }
    }
}
