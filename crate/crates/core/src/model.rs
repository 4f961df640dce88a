//! Landau–Zener working medium `H0(t) = bx σx + bz(t) σz` and its
//! counter-diabatic correction `b_cd(t) σy`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::quantum::Operator;
use crate::schedule::{FieldAxis, RampSchedule};

/// How the working medium is driven during a unitary stroke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Driving {
    /// Bare ramp, `H0(t)` only.
    NonAdiabatic,
    /// Ramp plus the counter-diabatic term.
    Shortcut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LZModel {
    bx: f64,
    bz: RampSchedule,
}

impl LZModel {
    /// `bx` must be strictly positive: at `bx = 0` the gap closes where `bz`
    /// crosses zero and the counter-diabatic field diverges.
    pub fn new(bx: f64, bz: RampSchedule) -> Result<Self> {
        ensure_finite("bx", bx)?;
        if bx <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "bx must be positive, got {bx}"
            )));
        }
        Ok(Self { bx, bz })
    }

    /// `bz` ramps from 0 up to `nu_z_max`.
    pub fn expansion(bx: f64, nu_z_max: f64, tau: f64) -> Result<Self> {
        Self::new(bx, RampSchedule::between(0.0, nu_z_max, tau)?)
    }

    /// `bz` ramps from `nu_z_max` back down to 0.
    pub fn compression(bx: f64, nu_z_max: f64, tau: f64) -> Result<Self> {
        Self::new(bx, RampSchedule::between(nu_z_max, 0.0, tau)?)
    }

    pub fn bx(&self) -> f64 {
        self.bx
    }

    pub fn bz(&self) -> &RampSchedule {
        &self.bz
    }

    pub fn tau(&self) -> f64 {
        self.bz.tau()
    }

    /// Per-axis ramp; the transverse field is a constant ramp.
    pub fn schedule(&self, axis: FieldAxis) -> RampSchedule {
        match axis {
            FieldAxis::X => RampSchedule::constant(self.bx, self.tau())
                .expect("bx and tau were validated at construction"),
            FieldAxis::Z => self.bz,
        }
    }

    pub fn h0(&self, t: f64) -> Result<Operator> {
        Operator::pauli(0.0, self.bx, 0.0, self.bz.value(t)?)
    }

    /// σy coefficient of the counter-diabatic Hamiltonian, in Hz.
    ///
    /// The eigenbasis of `H0` rotates about y by the angle `θ = atan2(bx, bz)`;
    /// cancelling that rotation takes an angular-frequency field `θ̇/2 σy`.
    /// With the propagator `exp(-i π dt (a·σ))` a stored coefficient `b`
    /// produces angular rate `π b`, hence `b_cd = θ̇ / (2π)`.
    pub fn b_cd(&self, t: f64) -> Result<f64> {
        let bz = self.bz.value(t)?;
        let dbz = self.bz.derivative(t)?;
        Ok(-self.bx * dbz / (2.0 * PI * (self.bx * self.bx + bz * bz)))
    }

    pub fn h_cd(&self, t: f64) -> Result<Operator> {
        Operator::pauli(0.0, 0.0, self.b_cd(t)?, 0.0)
    }

    pub fn h_eff(&self, t: f64, driving: Driving) -> Result<Operator> {
        let h0 = self.h0(t)?;
        match driving {
            Driving::NonAdiabatic => Ok(h0),
            Driving::Shortcut => Ok(h0 + self.h_cd(t)?),
        }
    }

    /// Level-splitting frequency `sqrt(bx² + bz(t)²)`.
    pub fn gap(&self, t: f64) -> Result<f64> {
        Ok(self.bx.hypot(self.bz.value(t)?))
    }
}
