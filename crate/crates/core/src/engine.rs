//! Four-stroke quantum Otto cycle on the Landau–Zener working medium.
//!
//! Stroke order: (i) cooling to the cold Gibbs state of `H0(0)`,
//! (ii) expansion `bz: 0 → nu_z_max`, (iii) heating to the hot Gibbs state of
//! the expanded Hamiltonian, (iv) compression back to `bz = 0`.
//!
//! Sign convention: work and heat are counted positive when they flow into
//! the working medium, so an engine has `W2 + W4 < 0` and `Q3 > 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::model::{Driving, LZModel};
use crate::propagator::{evolve, evolve_observed, EvolutionSpec, DEFAULT_STEPS};
use crate::quantum::{fidelity, partial_trace, swap_gate, tensor, Operator, Qubit};
use crate::thermo::{
    gibbs, heat, work, working_condition, BathSpec, CycleLedger, PEV_PER_PAULI_HZ,
};

/// How the two unitary strokes are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Populations are carried unchanged onto the final eigenbasis.
    #[serde(rename = "ideal")]
    IdealAdiabatic,
    /// Finite-time bare ramp.
    #[serde(rename = "na")]
    NonAdiabatic,
    /// Finite-time ramp with counter-diabatic driving.
    #[serde(rename = "sta")]
    Shortcut,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::IdealAdiabatic, Mode::NonAdiabatic, Mode::Shortcut];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::IdealAdiabatic => "ideal",
            Mode::NonAdiabatic => "na",
            Mode::Shortcut => "sta",
        }
    }

    pub fn driving(self) -> Option<Driving> {
        match self {
            Mode::IdealAdiabatic => None,
            Mode::NonAdiabatic => Some(Driving::NonAdiabatic),
            Mode::Shortcut => Some(Driving::Shortcut),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ideal" | "ideal-adiabatic" | "idealadiabatic" | "adiabatic" => {
                Ok(Mode::IdealAdiabatic)
            }
            "na" | "non-adiabatic" | "nonadiabatic" => Ok(Mode::NonAdiabatic),
            "sta" | "shortcut" | "cd" => Ok(Mode::Shortcut),
            other => Err(Error::Configuration(format!(
                "unknown mode '{other}' (expected ideal, na or sta)"
            ))),
        }
    }
}

/// How the energetic cost of the counter-diabatic field is accounted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostFunctional {
    /// `(1/τ) ∫ ‖H_CD(t)‖ dt`, in peV.
    TimeAveragedNorm,
    /// `∫ ‖H_CD(t)‖ dt`, in peV·s.
    TimeIntegratedNorm,
    /// `(1/τ) ∫ sqrt(Tr[ρ(t) H_CD(t)²]) dt`, in peV.
    StateWeighted,
}

impl CostFunctional {
    pub fn as_str(self) -> &'static str {
        match self {
            CostFunctional::TimeAveragedNorm => "time-averaged-norm",
            CostFunctional::TimeIntegratedNorm => "time-integrated-norm",
            CostFunctional::StateWeighted => "state-weighted",
        }
    }
}

impl FromStr for CostFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "time-averaged-norm" | "timeaveragednorm" => Ok(CostFunctional::TimeAveragedNorm),
            "time-integrated-norm" | "timeintegratednorm" => Ok(CostFunctional::TimeIntegratedNorm),
            "state-weighted" | "stateweighted" => Ok(CostFunctional::StateWeighted),
            other => Err(Error::Configuration(format!(
                "unknown cost functional '{other}' (expected time-averaged-norm, time-integrated-norm or state-weighted)"
            ))),
        }
    }
}

/// Duration of one full cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CycleTime {
    /// Thermal strokes are instantaneous.
    TwoTau,
    /// Each of the two thermal strokes takes the given number of seconds.
    TwoTauPlusThermalization(f64),
}

impl CycleTime {
    pub fn duration(self, tau: f64) -> f64 {
        match self {
            CycleTime::TwoTau => 2.0 * tau,
            CycleTime::TwoTauPlusThermalization(extra) => 2.0 * tau + 2.0 * extra,
        }
    }
}

/// How the heating stroke is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeatingStroke {
    /// Replace the working state by the hot Gibbs state.
    GibbsReset,
    /// SWAP the working qubit with an auxiliary qubit prepared hot.
    Swap,
}

impl FromStr for HeatingStroke {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gibbs-reset" | "reset" => Ok(Self::GibbsReset),
            "swap" => Ok(Self::Swap),
            other => Err(Error::Configuration(format!(
                "unknown heating stroke '{other}' (expected gibbs-reset or swap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Transverse field, Hz.
    pub bx: f64,
    /// Longitudinal field at the end of expansion, Hz.
    pub nu_z_max: f64,
    /// Duration of each unitary stroke, s.
    pub tau: f64,
    /// `k_B T` of the cold bath, peV.
    pub kt_cold: f64,
    /// `k_B T` of the hot bath, peV.
    pub kt_hot: f64,
    pub mode: Mode,
    pub n_steps: usize,
    pub cost_functional: CostFunctional,
    pub cycle_time: CycleTime,
    pub heating: HeatingStroke,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            bx: 1000.0,
            nu_z_max: 2500.0,
            tau: 1e-3,
            kt_cold: 1.9,
            kt_hot: 6.45,
            mode: Mode::Shortcut,
            n_steps: DEFAULT_STEPS,
            cost_functional: CostFunctional::TimeAveragedNorm,
            cycle_time: CycleTime::TwoTau,
            heating: HeatingStroke::GibbsReset,
        }
    }
}

impl EngineConfig {
    /// Smallest gap, at `bz = 0`.
    pub fn nu_i(&self) -> f64 {
        self.bx.abs()
    }

    /// Largest gap, at `bz = nu_z_max`.
    pub fn nu_f(&self) -> f64 {
        self.bx.hypot(self.nu_z_max)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_hot(mut self, kt_hot: f64) -> Self {
        self.kt_hot = kt_hot;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::InvalidArgument(msg) => Error::Configuration(msg),
            other => other,
        };
        for (name, v) in [
            ("bx", self.bx),
            ("nu_z_max", self.nu_z_max),
            ("tau", self.tau),
            ("kT_cold", self.kt_cold),
            ("kT_hot", self.kt_hot),
        ] {
            ensure_finite(name, v).map_err(cfg)?;
        }
        if self.bx <= 0.0 {
            return Err(Error::Configuration(format!(
                "bx must be positive, got {}",
                self.bx
            )));
        }
        if self.tau <= 0.0 {
            return Err(Error::Configuration(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.n_steps < 2 {
            return Err(Error::Configuration(format!(
                "n_steps must be at least 2, got {}",
                self.n_steps
            )));
        }
        if let CycleTime::TwoTauPlusThermalization(extra) = self.cycle_time {
            if !(extra >= 0.0) || !extra.is_finite() {
                return Err(Error::Configuration(format!(
                    "thermalization time must be finite and non-negative, got {extra}"
                )));
            }
        }
        let (hot, cold) = self.baths().map_err(cfg)?;
        if !working_condition(&hot, &cold, self.nu_i(), self.nu_f()) {
            return Err(Error::Configuration(format!(
                "working condition violated: kT_hot/kT_cold = {:.6} must exceed nu_f/nu_i = {:.6}",
                self.kt_hot / self.kt_cold,
                self.nu_f() / self.nu_i()
            )));
        }
        Ok(())
    }

    fn baths(&self) -> Result<(BathSpec, BathSpec)> {
        Ok((BathSpec::hot(self.kt_hot)?, BathSpec::cold(self.kt_cold)?))
    }

    pub fn expansion_model(&self) -> Result<LZModel> {
        LZModel::expansion(self.bx, self.nu_z_max, self.tau)
    }

    pub fn compression_model(&self) -> Result<LZModel> {
        LZModel::compression(self.bx, self.nu_z_max, self.tau)
    }

    pub fn cycle_duration(&self) -> f64 {
        self.cycle_time.duration(self.tau)
    }

    pub fn carnot_bound(&self) -> f64 {
        carnot_bound(self.kt_cold, self.kt_hot)
    }
}

/// Otto efficiency `1 - nu_i/nu_f`.
pub fn otto_limit(nu_i: f64, nu_f: f64) -> f64 {
    1.0 - nu_i / nu_f
}

/// Carnot efficiency `1 - kT_cold/kT_hot`.
pub fn carnot_bound(kt_cold: f64, kt_hot: f64) -> f64 {
    1.0 - kt_cold / kt_hot
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// `Q3 <= 0`: no heat is drawn from the hot bath, efficiencies are undefined.
    NotOperating,
    /// `-(W2 + W4) <= 0`: the cycle consumes work.
    NoUsefulWork,
    /// Shortcut cost exceeds extracted work; `P_STA` reported as zero.
    StaPowerClamped,
    /// A positive efficiency exceeded the Carnot bound.
    AboveCarnot,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::NotOperating => "not_operating",
            Flag::NoUsefulWork => "no_useful_work",
            Flag::StaPowerClamped => "sta_power_clamped",
            Flag::AboveCarnot => "above_carnot",
        }
    }
}

/// Shortcut cost charged on each unitary stroke.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StaCosts {
    pub expansion: f64,
    pub compression: f64,
}

impl StaCosts {
    pub fn total(&self) -> f64 {
        self.expansion + self.compression
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiguresOfMerit {
    pub eta_a: Option<f64>,
    pub eta1_sta: Option<f64>,
    pub eta2_sta: Option<f64>,
    pub p_a: f64,
    pub p_sta: f64,
    pub p_sta_raw: f64,
    pub cycle_time: f64,
    pub flags: Vec<Flag>,
}

/// Efficiencies and powers from the stroke ledger and shortcut costs.
///
/// * `eta_A  = -(W2 + W4) / Q3`
/// * `eta1   = -(W2 + W4) / (Q3 + c2 + c4)`
/// * `eta2   = -(W2 + W4 + c2 + c4) / Q3`
/// * `P_A    = -(W2 + W4) / τ_cycle`
/// * `P_STA  = -(W2 + W4 + c2 + c4) / τ_cycle`, clamped at zero
///
/// The costs reduce the delivered work in both `eta2` and `P_STA`.
/// Efficiencies are `None` when `Q3 <= 0`.
pub fn efficiencies_and_power(
    ledger: &CycleLedger,
    costs: StaCosts,
    cfg: &EngineConfig,
) -> FiguresOfMerit {
    let extracted = -ledger.net_work();
    let cost = costs.total();
    let q3 = ledger.q3;
    let cycle_time = cfg.cycle_duration();
    let mut flags = Vec::new();

    let (eta_a, eta1_sta, eta2_sta) = if q3 > 0.0 {
        (
            Some(extracted / q3),
            Some(extracted / (q3 + cost)),
            Some((extracted - cost) / q3),
        )
    } else {
        flags.push(Flag::NotOperating);
        (None, None, None)
    };
    if extracted <= 0.0 {
        flags.push(Flag::NoUsefulWork);
    }
    let p_a = extracted / cycle_time;
    let p_sta_raw = (extracted - cost) / cycle_time;
    if p_sta_raw < 0.0 && cfg.mode == Mode::Shortcut {
        flags.push(Flag::StaPowerClamped);
    }
    let carnot = cfg.carnot_bound();
    if [eta_a, eta1_sta, eta2_sta]
        .iter()
        .flatten()
        .any(|&eta| eta > 0.0 && eta > carnot + 1e-12)
    {
        flags.push(Flag::AboveCarnot);
    }
    flags.sort();
    FiguresOfMerit {
        eta_a,
        eta1_sta,
        eta2_sta,
        p_a,
        p_sta: p_sta_raw.max(0.0),
        p_sta_raw,
        cycle_time,
        flags,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleMetrics {
    #[serde(rename = "W2")]
    pub w2: f64,
    #[serde(rename = "W4")]
    pub w4: f64,
    #[serde(rename = "Q1")]
    pub q1: f64,
    #[serde(rename = "Q3")]
    pub q3: f64,
    pub cost2: f64,
    pub cost4: f64,
    #[serde(rename = "eta_A")]
    pub eta_a: Option<f64>,
    #[serde(rename = "eta1_STA")]
    pub eta1_sta: Option<f64>,
    #[serde(rename = "eta2_STA")]
    pub eta2_sta: Option<f64>,
    #[serde(rename = "P_A")]
    pub p_a: f64,
    #[serde(rename = "P_STA")]
    pub p_sta: f64,
    #[serde(rename = "P_STA_raw")]
    pub p_sta_raw: f64,
    pub fidelity_tracking: f64,
    pub cycle_time_s: f64,
    pub flags: Vec<Flag>,
}

impl CycleMetrics {
    pub fn ledger(&self) -> CycleLedger {
        CycleLedger {
            q1: self.q1,
            w2: self.w2,
            q3: self.q3,
            w4: self.w4,
        }
    }

    pub fn has(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    /// Largest absolute difference over all numeric fields.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        [
            (self.w2 - other.w2).abs(),
            (self.w4 - other.w4).abs(),
            (self.q1 - other.q1).abs(),
            (self.q3 - other.q3).abs(),
            (self.cost2 - other.cost2).abs(),
            (self.cost4 - other.cost4).abs(),
            opt(self.eta_a, other.eta_a),
            opt(self.eta1_sta, other.eta1_sta),
            opt(self.eta2_sta, other.eta2_sta),
            (self.p_a - other.p_a).abs(),
            (self.p_sta - other.p_sta).abs(),
            (self.p_sta_raw - other.p_sta_raw).abs(),
            (self.fidelity_tracking - other.fidelity_tracking).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Carries the populations of `rho` in the eigenbasis of `from` onto the
/// eigenbasis of `to`.
pub fn adiabatic_transport(rho: &Qubit, from: &Operator, to: &Operator) -> Result<Qubit> {
    let (src, dst) = (from.eigh(), to.eigh());
    let pops = src.vectors.map(|v| rho.population(&v));
    Qubit::from_populations(&pops, &dst.vectors)
}

/// Thermalizes `working` by swapping it with an auxiliary qubit prepared in
/// the Gibbs state of `h_aux` at `auxiliary_kt`. The auxiliary qubit is
/// qubit 1, the working qubit is qubit 2.
pub fn swap_thermalize(working: &Qubit, auxiliary_kt: f64, h_aux: &Operator) -> Result<Qubit> {
    let auxiliary = gibbs(h_aux, &BathSpec::hot(auxiliary_kt)?)?;
    let joint = tensor(&auxiliary, working).conjugate(&swap_gate());
    partial_trace(&joint, 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriveStroke {
    Expansion,
    Compression,
}

/// Shortcut cost of one unitary stroke, in peV (peV·s for
/// [`CostFunctional::TimeIntegratedNorm`]).
///
/// Only defined when `cfg.mode` is [`Mode::Shortcut`].
pub fn sta_cost(cfg: &EngineConfig, stroke: DriveStroke) -> Result<f64> {
    if cfg.mode != Mode::Shortcut {
        return Err(Error::Contract(format!(
            "shortcut cost requested in {} mode",
            cfg.mode
        )));
    }
    cfg.validate()?;
    let (hot, cold) = cfg.baths()?;
    let (model, start) = match stroke {
        DriveStroke::Expansion => {
            let m = cfg.expansion_model()?;
            (m, gibbs(&m.h0(0.0)?, &cold)?)
        }
        DriveStroke::Compression => {
            let m = cfg.compression_model()?;
            (m, gibbs(&m.h0(0.0)?, &hot)?)
        }
    };
    stroke_cost(&model, &start, cfg)
}

fn stroke_cost(model: &LZModel, start: &Qubit, cfg: &EngineConfig) -> Result<f64> {
    let spec = EvolutionSpec::new(*model, Driving::Shortcut, cfg.n_steps)?;
    let dt = spec.dt();
    let tau = spec.tau();
    // ‖b σy‖ = |b|; the step quadrature evaluates the field at step midpoints.
    let norm_integral = || -> Result<f64> {
        (0..spec.n_steps())
            .map(|k| model.b_cd(spec.midpoint(k)).map(|b| b.abs() * dt))
            .sum::<Result<f64>>()
    };
    let integral = match cfg.cost_functional {
        CostFunctional::TimeAveragedNorm => norm_integral()? / tau,
        CostFunctional::TimeIntegratedNorm => norm_integral()?,
        CostFunctional::StateWeighted => {
            let mut acc = 0.0;
            evolve_observed(start, &spec, |k, rho| {
                let h_cd = model.h_cd(spec.midpoint(k))?.matrix();
                let weight = (rho.matrix() * h_cd * h_cd).trace().re.max(0.0);
                acc += weight.sqrt() * dt;
                Ok(())
            })?;
            acc / tau
        }
    };
    Ok(integral * PEV_PER_PAULI_HZ)
}

fn unitary_stroke(model: &LZModel, rho: &Qubit, cfg: &EngineConfig) -> Result<(Qubit, Qubit)> {
    let tau = model.tau();
    let ideal = adiabatic_transport(rho, &model.h0(0.0)?, &model.h0(tau)?)?;
    let actual = match cfg.mode.driving() {
        None => ideal,
        Some(driving) => evolve(rho, &EvolutionSpec::new(*model, driving, cfg.n_steps)?)?,
    };
    Ok((actual, ideal))
}

/// Runs one full cycle and assembles every figure of merit.
pub fn run_cycle(cfg: &EngineConfig) -> Result<CycleMetrics> {
    cfg.validate()?;
    let (hot, cold) = cfg.baths()?;
    let expansion = cfg.expansion_model()?;
    let compression = cfg.compression_model()?;
    let h_low = expansion.h0(0.0)?;
    let h_high = expansion.h0(cfg.tau)?;

    // (i) cooling
    let rho_a = gibbs(&h_low, &cold)?;
    // (ii) expansion
    let (rho_b, ideal_b) = unitary_stroke(&expansion, &rho_a, cfg)?;
    let w2 = work(&h_low, &rho_a, &h_high, &rho_b);
    // (iii) heating
    let rho_c = match cfg.heating {
        HeatingStroke::GibbsReset => gibbs(&h_high, &hot)?,
        HeatingStroke::Swap => swap_thermalize(&rho_b, cfg.kt_hot, &h_high)?,
    };
    let q3 = heat(&h_high, &rho_b, &rho_c);
    // (iv) compression
    let (rho_d, ideal_d) = unitary_stroke(&compression, &rho_c, cfg)?;
    let w4 = work(&h_high, &rho_c, &h_low, &rho_d);
    // closing the cycle: back to the cold Gibbs state
    let q1 = heat(&h_low, &rho_d, &rho_a);

    let fidelity_tracking = fidelity(&rho_b, &ideal_b)?.min(fidelity(&rho_d, &ideal_d)?);
    let costs = if cfg.mode == Mode::Shortcut {
        StaCosts {
            expansion: stroke_cost(&expansion, &rho_a, cfg)?,
            compression: stroke_cost(&compression, &rho_c, cfg)?,
        }
    } else {
        StaCosts::default()
    };
    let ledger = CycleLedger { q1, w2, q3, w4 };
    let merit = efficiencies_and_power(&ledger, costs, cfg);
    Ok(CycleMetrics {
        w2,
        w4,
        q1,
        q3,
        cost2: costs.expansion,
        cost4: costs.compression,
        eta_a: merit.eta_a,
        eta1_sta: merit.eta1_sta,
        eta2_sta: merit.eta2_sta,
        p_a: merit.p_a,
        p_sta: merit.p_sta,
        p_sta_raw: merit.p_sta_raw,
        fidelity_tracking,
        cycle_time_s: merit.cycle_time,
        flags: merit.flags,
    })
}
