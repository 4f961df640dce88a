//! Thermal states, spin temperatures and energy bookkeeping.
//!
//! Temperatures are given as `k_B T` in peV. A Hamiltonian stored with Pauli
//! coefficients `a` (Hz) has physical energy `(h/2)(a·σ)`, so its two levels
//! are split by `h·|a|`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::quantum::{Operator, Qubit};

/// Planck's constant in peV per Hz.
pub const PLANCK_PEV_PER_HZ: f64 = 4.135667696e-3;

/// Energy in peV carried by one Hz of Pauli coefficient.
pub const PEV_PER_PAULI_HZ: f64 = 0.5 * PLANCK_PEV_PER_HZ;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathRole {
    Hot,
    Cold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    kt: f64,
    role: BathRole,
}

impl BathSpec {
    pub fn new(kt: f64, role: BathRole) -> Result<Self> {
        ensure_finite("kT", kt)?;
        if kt <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "kT must be positive, got {kt} peV"
            )));
        }
        Ok(Self { kt, role })
    }

    pub fn hot(kt: f64) -> Result<Self> {
        Self::new(kt, BathRole::Hot)
    }

    pub fn cold(kt: f64) -> Result<Self> {
        Self::new(kt, BathRole::Cold)
    }

    /// `k_B T` in peV.
    pub fn kt(&self) -> f64 {
        self.kt
    }

    pub fn role(&self) -> BathRole {
        self.role
    }
}

/// Named bath-temperature sets `(cold, [hot...])`, all in peV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TemperaturePreset {
    /// Cold 1.9 peV; hot 6.45 and 8.45 peV. The default.
    Low,
    /// Cold 11.94 peV; hot 40.54 and 53.11 peV.
    High,
}

impl TemperaturePreset {
    pub fn cold(self) -> f64 {
        match self {
            Self::Low => 1.9,
            Self::High => 11.94,
        }
    }

    pub fn hot(self) -> [f64; 2] {
        match self {
            Self::Low => [6.45, 8.45],
            Self::High => [40.54, 53.11],
        }
    }

    /// Command-line name.
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Low => "paper-sec4",
            Self::High => "paper-fig4",
        }
    }
}

impl std::str::FromStr for TemperaturePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper-sec4" | "low" => Ok(Self::Low),
            "paper-fig4" | "high" => Ok(Self::High),
            other => Err(Error::Configuration(format!(
                "unknown temperature preset '{other}' (expected paper-sec4 or paper-fig4)"
            ))),
        }
    }
}

/// Thermal state `exp(-E/kT)/Z` of `h`, built in its eigenbasis.
pub fn gibbs(h: &Operator, bath: &BathSpec) -> Result<Qubit> {
    let eig = h.eigh();
    let populations = boltzmann_populations(eig.values, bath.kt);
    Qubit::from_populations(&populations, &eig.vectors)
}

/// Level populations for Pauli eigenvalues `values` (Hz) at `kt` (peV).
pub(crate) fn boltzmann_populations(values: [f64; 2], kt: f64) -> [f64; 2] {
    let lowest = values[0].min(values[1]);
    let weights = values.map(|v| (-(v - lowest) * PEV_PER_PAULI_HZ / kt).exp());
    let z: f64 = weights.iter().sum();
    weights.map(|w| w / z)
}

/// Spin temperature `h ν / ln(p0/p1)` in peV for a gap of `nu` Hz.
pub fn spin_temperature(p0: f64, p1: f64, nu: f64) -> Result<f64> {
    for (name, v) in [("p0", p0), ("p1", p1), ("nu", nu)] {
        ensure_finite(name, v)?;
    }
    if (p0 + p1 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "populations must sum to 1, got {p0} + {p1}"
        )));
    }
    if nu <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gap must be positive, got {nu} Hz"
        )));
    }
    if !(p1 > 0.0) || p0 <= p1 {
        return Err(Error::InvalidArgument(format!(
            "populations ({p0}, {p1}) are not thermally ordered; spin temperature would be negative or infinite"
        )));
    }
    Ok(PLANCK_PEV_PER_HZ * nu / (p0 / p1).ln())
}

/// `Tr[H ρ]` in peV.
pub fn mean_energy(h: &Operator, rho: &Qubit) -> f64 {
    (h.matrix() * rho.matrix()).trace().re * PEV_PER_PAULI_HZ
}

/// `Tr[H_f ρ_f] - Tr[H_i ρ_i]`; positive means work done on the medium.
pub fn work(h_i: &Operator, rho_i: &Qubit, h_f: &Operator, rho_f: &Qubit) -> f64 {
    mean_energy(h_f, rho_f) - mean_energy(h_i, rho_i)
}

/// `Tr[H (ρ_f - ρ_i)]`; positive means heat absorbed by the medium.
pub fn heat(h: &Operator, rho_i: &Qubit, rho_f: &Qubit) -> f64 {
    mean_energy(h, rho_f) - mean_energy(h, rho_i)
}

/// Engine regime: `kT_hot / kT_cold > nu_f / nu_i`.
pub fn working_condition(hot: &BathSpec, cold: &BathSpec, nu_i: f64, nu_f: f64) -> bool {
    hot.kt / cold.kt > nu_f / nu_i
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stroke {
    Cooling,
    Expansion,
    Heating,
    Compression,
}

impl Stroke {
    pub fn is_unitary(self) -> bool {
        matches!(self, Self::Expansion | Self::Compression)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    Work,
    Heat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokeLedgerEntry {
    kind: EnergyKind,
    value: f64,
    stroke: Stroke,
}

impl StrokeLedgerEntry {
    /// Work is only exchanged on unitary strokes and heat only on thermal ones.
    pub fn new(kind: EnergyKind, value: f64, stroke: Stroke) -> Result<Self> {
        let allowed = match kind {
            EnergyKind::Work => stroke.is_unitary(),
            EnergyKind::Heat => !stroke.is_unitary(),
        };
        if !allowed {
            return Err(Error::Contract(format!(
                "{kind:?} cannot be booked on the {stroke:?} stroke"
            )));
        }
        Ok(Self {
            kind,
            value,
            stroke,
        })
    }

    pub fn kind(&self) -> EnergyKind {
        self.kind
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn stroke(&self) -> Stroke {
        self.stroke
    }
}

/// Energy exchanged on each of the four strokes of one cycle, in peV.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CycleLedger {
    pub q1: f64,
    pub w2: f64,
    pub q3: f64,
    pub w4: f64,
}

impl CycleLedger {
    pub fn from_entries(entries: &[StrokeLedgerEntry]) -> Result<Self> {
        let mut ledger = Self::default();
        let mut seen = [false; 4];
        for e in entries {
            let (slot, idx) = match e.stroke {
                Stroke::Cooling => (&mut ledger.q1, 0),
                Stroke::Expansion => (&mut ledger.w2, 1),
                Stroke::Heating => (&mut ledger.q3, 2),
                Stroke::Compression => (&mut ledger.w4, 3),
            };
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Contract(format!(
                    "duplicate entry for {:?}",
                    e.stroke
                )));
            }
            *slot = e.value;
        }
        if seen.contains(&false) {
            return Err(Error::Contract("ledger is missing a stroke".into()));
        }
        Ok(ledger)
    }

    pub fn entries(&self) -> [StrokeLedgerEntry; 4] {
        [
            StrokeLedgerEntry {
                kind: EnergyKind::Heat,
                value: self.q1,
                stroke: Stroke::Cooling,
            },
            StrokeLedgerEntry {
                kind: EnergyKind::Work,
                value: self.w2,
                stroke: Stroke::Expansion,
            },
            StrokeLedgerEntry {
                kind: EnergyKind::Heat,
                value: self.q3,
                stroke: Stroke::Heating,
            },
            StrokeLedgerEntry {
                kind: EnergyKind::Work,
                value: self.w4,
                stroke: Stroke::Compression,
            },
        ]
    }

    /// `W2 + W4`; negative when the engine delivers work.
    pub fn net_work(&self) -> f64 {
        self.w2 + self.w4
    }

    /// `W2 + W4 + Q1 + Q3`, zero for a closed cycle.
    pub fn first_law_residual(&self) -> f64 {
        self.w2 + self.w4 + self.q1 + self.q3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn h(bx: f64, bz: f64) -> Operator {
        Operator::pauli(0.0, bx, 0.0, bz).unwrap()
    }

    #[test]
    fn infinite_temperature_is_maximally_mixed() {
        let rho = gibbs(&h(1000.0, 2500.0), &BathSpec::hot(1e12).unwrap()).unwrap();
        assert!(rho.max_abs_diff(&Qubit::maximally_mixed()) < 1e-9);
    }

    #[test]
    fn boltzmann_ratio_three() {
        // h ν / kT = ln 3 with ν = 1000 Hz.
        let kt = PLANCK_PEV_PER_HZ * 1000.0 / 3f64.ln();
        let rho = gibbs(&h(0.0, 1000.0), &BathSpec::cold(kt).unwrap()).unwrap();
        let eig = h(0.0, 1000.0).eigh();
        assert_abs_diff_eq!(rho.population(&eig.ground()), 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.population(&eig.excited()), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn cold_bath_ground_population() {
        let h0 = h(1000.0, 0.0);
        let rho = gibbs(&h0, &BathSpec::cold(1.9).unwrap()).unwrap();
        let x = PLANCK_PEV_PER_HZ * 1000.0 / 1.9;
        assert_abs_diff_eq!(x, 2.1767, epsilon = 1e-4);
        let p0 = rho.population(&h0.eigh().ground());
        assert_abs_diff_eq!(p0, 1.0 / (1.0 + (-x).exp()), epsilon = 1e-12);
        assert_abs_diff_eq!(p0, 0.8982, epsilon = 1e-4);
    }

    #[test]
    fn gibbs_rejects_non_positive_temperature() {
        assert!(BathSpec::hot(0.0).is_err());
        assert!(BathSpec::cold(-1.0).is_err());
        assert!(BathSpec::cold(f64::NAN).is_err());
    }

    #[test]
    fn gibbs_commutes_with_hamiltonian() {
        for (bx, bz, kt) in [
            (1000.0, 0.0, 1.9),
            (1000.0, 2500.0, 6.45),
            (-300.0, 77.0, 0.4),
        ] {
            let op = Operator::pauli(12.0, bx, 150.0, bz).unwrap();
            let rho = gibbs(&op, &BathSpec::hot(kt).unwrap()).unwrap();
            let comm = op.matrix() * rho.matrix() - rho.matrix() * op.matrix();
            assert!(crate::quantum::max_abs(&comm) <= 1e-12 * op.op_norm());
        }
    }

    #[test]
    fn spin_temperature_examples() {
        let nu = 1000.0;
        let kt = spin_temperature(0.75, 0.25, nu).unwrap();
        assert_abs_diff_eq!(kt, PLANCK_PEV_PER_HZ * nu / 3f64.ln(), epsilon = 1e-12);
        let near = spin_temperature(0.5 + 1e-12, 0.5 - 1e-12, nu).unwrap();
        assert!(near > 1e8);
    }

    #[test]
    fn spin_temperature_rejects_inverted_populations() {
        assert!(spin_temperature(0.5, 0.5, 1000.0).is_err());
        assert!(spin_temperature(0.25, 0.75, 1000.0).is_err());
        assert!(spin_temperature(1.0, 0.0, 1000.0).is_err());
        assert!(spin_temperature(0.7, 0.2, 1000.0).is_err());
    }

    #[test]
    fn work_and_heat_identities() {
        let op = h(1000.0, 700.0);
        let rho = gibbs(&op, &BathSpec::cold(1.9).unwrap()).unwrap();
        assert_eq!(work(&op, &rho, &op, &rho), 0.0);
        assert_eq!(heat(&op, &rho, &rho), 0.0);
        let op2 = h(1000.0, 2500.0);
        let rho2 = gibbs(&op2, &BathSpec::hot(6.45).unwrap()).unwrap();
        assert_eq!(work(&op, &rho, &op2, &rho2), -work(&op2, &rho2, &op, &rho));
    }

    #[test]
    fn heating_stroke_absorbs_heat() {
        let (hi, hf) = (h(1000.0, 0.0), h(1000.0, 2500.0));
        let cold = gibbs(&hi, &BathSpec::cold(1.9).unwrap()).unwrap();
        // Carry the cold populations onto the expanded eigenbasis.
        let (ei, ef) = (hi.eigh(), hf.eigh());
        let pops = [
            cold.population(&ei.ground()),
            cold.population(&ei.excited()),
        ];
        let carried = Qubit::from_populations(&pops, &ef.vectors).unwrap();
        let hot = gibbs(&hf, &BathSpec::hot(6.45).unwrap()).unwrap();
        assert!(heat(&hf, &carried, &hot) > 0.0);
    }

    #[test]
    fn ideal_expansion_work_closed_form() {
        let (hi, hf) = (h(1000.0, 0.0), h(1000.0, 2500.0));
        let rho_i = gibbs(&hi, &BathSpec::cold(1.9).unwrap()).unwrap();
        let (ei, ef) = (hi.eigh(), hf.eigh());
        let pops = [
            rho_i.population(&ei.ground()),
            rho_i.population(&ei.excited()),
        ];
        let rho_f = Qubit::from_populations(&pops, &ef.vectors).unwrap();
        let nu_f = 1000.0f64.hypot(2500.0);
        let oracle = -(PLANCK_PEV_PER_HZ / 2.0) * (nu_f - 1000.0) * (pops[0] - pops[1]);
        assert_abs_diff_eq!(oracle, -2.787, epsilon = 1e-3);
        assert_abs_diff_eq!(work(&hi, &rho_i, &hf, &rho_f), oracle, epsilon = 1e-12);
    }

    #[test]
    fn working_condition_examples() {
        let cold = BathSpec::cold(1.9).unwrap();
        assert!(working_condition(
            &BathSpec::hot(6.45).unwrap(),
            &cold,
            1000.0,
            2692.58
        ));
        assert!(working_condition(
            &BathSpec::hot(8.45).unwrap(),
            &cold,
            1000.0,
            2692.58
        ));
        assert!(!working_condition(
            &BathSpec::hot(1.9).unwrap(),
            &cold,
            1000.0,
            2692.58
        ));
    }

    #[test]
    fn ledger_rejects_misplaced_entries() {
        assert!(StrokeLedgerEntry::new(EnergyKind::Work, 1.0, Stroke::Heating).is_err());
        assert!(StrokeLedgerEntry::new(EnergyKind::Heat, 1.0, Stroke::Expansion).is_err());
        let ok = [
            StrokeLedgerEntry::new(EnergyKind::Heat, 1.0, Stroke::Cooling).unwrap(),
            StrokeLedgerEntry::new(EnergyKind::Work, -2.0, Stroke::Expansion).unwrap(),
            StrokeLedgerEntry::new(EnergyKind::Heat, 3.0, Stroke::Heating).unwrap(),
            StrokeLedgerEntry::new(EnergyKind::Work, -2.0, Stroke::Compression).unwrap(),
        ];
        let ledger = CycleLedger::from_entries(&ok).unwrap();
        assert_eq!(ledger.first_law_residual(), 0.0);
        assert_eq!(ledger.entries(), ok);
        assert!(CycleLedger::from_entries(&ok[..3]).is_err());
        assert!(CycleLedger::from_entries(&[ok[0], ok[0], ok[2], ok[3]]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn gibbs_spin_temperature_round_trip(nu in 10.0f64..1e4, kt in 0.05f64..50.0) {
            let op = Operator::pauli(0.0, nu, 0.0, 0.0).unwrap();
            let eig = op.eigh();
            let rho = gibbs(&op, &BathSpec::cold(kt).unwrap()).unwrap();
            let (p0, p1) = (rho.population(&eig.ground()), rho.population(&eig.excited()));
            prop_assume!(p1 > 1e-12 && p0 - p1 > 1e-9);
            // `nu σx` has level splitting h·nu.
            let kt_back = spin_temperature(p0, p1, nu).unwrap();
            let again = gibbs(&op, &BathSpec::cold(kt_back).unwrap()).unwrap();
            prop_assert!((again.population(&eig.ground()) - p0).abs() <= 1e-9);
        }
    }
}
