//! Small-matrix complex linear algebra for one and two qubits.
//!
//! Hamiltonians are stored as Pauli coefficients in Hz (energy divided by
//! Planck's constant). A stored coefficient vector `a` generates the
//! propagator `exp(-i π dt (a · σ))`, i.e. the level splitting of
//! `a_x σ_x + a_z σ_z` is `h·|a|`.

use std::f64::consts::PI;
use std::ops::Add;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

pub type C64 = Complex64;
pub type Matrix<const D: usize> = SMatrix<C64, D, D>;
pub type Ket<const D: usize> = SVector<C64, D>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for structural checks (hermiticity, trace).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for spectral checks (unitarity, positivity).
pub const SPECTRAL_TOL: f64 = 1e-10;

pub fn sigma_x() -> Matrix<2> {
    Matrix::<2>::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Matrix<2> {
    Matrix::<2>::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Matrix<2> {
    Matrix::<2>::new(ONE, ZERO, ZERO, -ONE)
}

/// Largest absolute entry of a matrix.
pub fn max_abs<const D: usize>(m: &Matrix<D>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermiticity_defect<const D: usize>(m: &Matrix<D>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// A single-qubit Hermitian operator `a0 I + ax σx + ay σy + az σz`, coefficients in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Operator {
    coeffs: [f64; 4],
}

impl Operator {
    pub fn pauli(a0: f64, ax: f64, ay: f64, az: f64) -> Result<Self> {
        for (name, v) in [("a0", a0), ("ax", ax), ("ay", ay), ("az", az)] {
            ensure_finite(name, v)?;
        }
        Ok(Self {
            coeffs: [a0, ax, ay, az],
        })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Decomposes a 2×2 matrix into Pauli coefficients. The matrix must be
    /// Hermitian to within [`STRUCTURAL_TOL`].
    pub fn from_matrix(m: &Matrix<2>) -> Result<Self> {
        let defect = hermiticity_defect(m);
        if !(defect <= STRUCTURAL_TOL * (1.0 + max_abs(m))) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        Self::pauli(
            0.5 * (m00.re + m11.re),
            0.5 * (m01.re + m10.re),
            0.5 * (m10.im - m01.im),
            0.5 * (m00.re - m11.re),
        )
    }

    pub fn coefficients(&self) -> [f64; 4] {
        self.coeffs
    }

    pub fn identity_part(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn x(&self) -> f64 {
        self.coeffs[1]
    }

    pub fn y(&self) -> f64 {
        self.coeffs[2]
    }

    pub fn z(&self) -> f64 {
        self.coeffs[3]
    }

    /// Length of the traceless (Bloch) part.
    pub fn bloch_norm(&self) -> f64 {
        let [_, x, y, z] = self.coeffs;
        (x * x + y * y + z * z).sqrt()
    }

    /// Operator norm (largest absolute eigenvalue).
    pub fn op_norm(&self) -> f64 {
        self.coeffs[0].abs() + self.bloch_norm()
    }

    pub fn matrix(&self) -> Matrix<2> {
        let [a0, ax, ay, az] = self.coeffs;
        Matrix::<2>::new(
            C64::new(a0 + az, 0.0),
            C64::new(ax, -ay),
            C64::new(ax, ay),
            C64::new(a0 - az, 0.0),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| c * factor),
        }
    }

    /// Ascending eigenvalues with gauge-fixed orthonormal eigenvectors.
    pub fn eigh(&self) -> Eigh {
        eigh(self)
    }
}

impl Add for Operator {
    type Output = Operator;

    fn add(self, rhs: Operator) -> Operator {
        let mut coeffs = self.coeffs;
        for (c, r) in coeffs.iter_mut().zip(rhs.coeffs) {
            *c += r;
        }
        Operator { coeffs }
    }
}

/// Spectral decomposition of a single-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigh {
    /// Ascending eigenvalues in Hz.
    pub values: [f64; 2],
    /// `vectors[n]` belongs to `values[n]`.
    pub vectors: [Ket<2>; 2],
}

impl Eigh {
    pub fn ground(&self) -> Ket<2> {
        self.vectors[0]
    }

    pub fn excited(&self) -> Ket<2> {
        self.vectors[1]
    }

    pub fn projector(&self, n: usize) -> Matrix<2> {
        self.vectors[n] * self.vectors[n].adjoint()
    }
}

/// Makes the first component with non-negligible magnitude real and positive.
fn fix_gauge(v: Ket<2>) -> Ket<2> {
    let lead = if v[0].norm() > 1e-300 { v[0] } else { v[1] };
    let phase = lead.conj() / lead.norm();
    v * phase
}

/// Closed-form eigendecomposition of `a0 I + a·σ`.
pub fn eigh(h: &Operator) -> Eigh {
    let [a0, ax, ay, az] = h.coefficients();
    let r = h.bloch_norm();
    if r == 0.0 {
        return Eigh {
            values: [a0, a0],
            vectors: [Ket::<2>::new(ONE, ZERO), Ket::<2>::new(ZERO, ONE)],
        };
    }
    let (nx, ny, nz) = (ax / r, ay / r, az / r);
    // For eigenvalue λ = ±1 of n·σ, both (nx - i ny, λ - nz) and
    // (λ + nz, nx + i ny) are eigenvectors; pick the better conditioned one.
    let vector = |lambda: f64| {
        let v = if lambda * nz <= 0.0 {
            Ket::<2>::new(C64::new(nx, -ny), C64::new(lambda - nz, 0.0))
        } else {
            Ket::<2>::new(C64::new(lambda + nz, 0.0), C64::new(nx, ny))
        };
        fix_gauge(v / C64::new(v.norm(), 0.0))
    };
    Eigh {
        values: [a0 - r, a0 + r],
        vectors: [vector(-1.0), vector(1.0)],
    }
}

/// A `D×D` unitary matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary<const D: usize>(Matrix<D>);

impl<const D: usize> Unitary<D> {
    pub fn identity() -> Self {
        Self(Matrix::<D>::identity())
    }

    /// Wraps a matrix after checking `U†U = I` to [`SPECTRAL_TOL`].
    pub fn new(m: Matrix<D>) -> Result<Self> {
        let u = Self(m);
        let defect = u.unitarity_defect();
        if defect <= SPECTRAL_TOL {
            Ok(u)
        } else {
            Err(Error::InvalidArgument(format!(
                "matrix is not unitary (defect {defect:e})"
            )))
        }
    }

    pub fn matrix(&self) -> &Matrix<D> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `max |U†U - I|` entry-wise.
    pub fn unitarity_defect(&self) -> f64 {
        max_abs(&(self.0.adjoint() * self.0 - Matrix::<D>::identity()))
    }

    /// Composition `self · other` (apply `other` first).
    pub fn then_after(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(self.0 - other.0))
    }
}

/// Single-step propagator `exp(-i π dt (a0 I + a·σ))`.
pub fn expm_unitary(h: &Operator, dt: f64) -> Result<Unitary<2>> {
    ensure_finite("dt", dt)?;
    if dt < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "dt must be non-negative, got {dt}"
        )));
    }
    let [a0, ax, ay, az] = h.coefficients();
    let r = h.bloch_norm();
    let theta = PI * dt * r;
    let (s, c) = theta.sin_cos();
    let global = C64::from_polar(1.0, -PI * dt * a0);
    let m = if r == 0.0 {
        Matrix::<2>::identity()
    } else {
        let (nx, ny, nz) = (ax / r, ay / r, az / r);
        // cos θ I - i sin θ (n·σ)
        Matrix::<2>::new(
            C64::new(c, -s * nz),
            C64::new(-s * ny, -s * nx),
            C64::new(s * ny, -s * nx),
            C64::new(c, s * nz),
        )
    };
    Ok(Unitary(m * global))
}

/// A `D×D` density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<const D: usize>(Matrix<D>);

pub type Qubit = DensityMatrix<2>;
pub type TwoQubit = DensityMatrix<4>;

impl<const D: usize> DensityMatrix<D> {
    pub fn new(m: Matrix<D>) -> Result<Self> {
        let rho = Self(m);
        rho.validate()?;
        Ok(rho)
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix::<D>::identity() / C64::new(D as f64, 0.0))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &Ket<D>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument(
                "state vector must be nonzero".into(),
            ));
        }
        let psi = psi / C64::new(norm, 0.0);
        Ok(Self(psi * psi.adjoint()))
    }

    /// Convex mixture of projectors onto the given orthonormal kets.
    pub fn from_populations(populations: &[f64; D], kets: &[Ket<D>; D]) -> Result<Self> {
        let mut m = Matrix::<D>::zeros();
        for (p, k) in populations.iter().zip(kets) {
            m += k * k.adjoint() * C64::new(*p, 0.0);
        }
        Self::new(m)
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.0.trace();
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidArgument(format!("trace {tr} differs from 1")));
        }
        let defect = hermiticity_defect(&self.0);
        if defect > STRUCTURAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let min = self.eigenvalues()[0];
        if min < -SPECTRAL_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &Matrix<D> {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> [f64; D] {
        let herm = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        let dynamic = nalgebra::DMatrix::from_iterator(D, D, herm.iter().copied());
        let mut vals = [0.0; D];
        for (v, e) in vals.iter_mut().zip(dynamic.symmetric_eigenvalues().iter()) {
            *v = *e;
        }
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &Unitary<D>) -> Self {
        let m = u.matrix() * self.0 * u.matrix().adjoint();
        // Re-symmetrize so round-off never accumulates into a Hermitian defect.
        Self((m + m.adjoint()) * C64::new(0.5, 0.0))
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn population(&self, psi: &Ket<D>) -> f64 {
        (psi.adjoint() * self.0 * psi)[(0, 0)].re
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(self.0 - other.0))
    }
}

impl Qubit {
    /// `(rx, ry, rz)` with `ρ = (I + r·σ)/2`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let m = &self.0;
        [
            2.0 * m[(1, 0)].re,
            2.0 * m[(1, 0)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ]
    }
}

/// Overlap fidelity `|Tr(ρe ρt†)| / sqrt(Tr(ρe ρe†) Tr(ρt ρt†))`.
pub fn fidelity<const D: usize>(rho_e: &DensityMatrix<D>, rho_t: &DensityMatrix<D>) -> Result<f64> {
    let (e, t) = (rho_e.matrix(), rho_t.matrix());
    let ee = (e * e.adjoint()).trace().re;
    let tt = (t * t.adjoint()).trace().re;
    if ee <= 0.0 || tt <= 0.0 {
        return Err(Error::InvalidArgument(
            "fidelity is undefined for a zero Hilbert-Schmidt norm".into(),
        ));
    }
    let overlap = (e * t.adjoint()).trace().norm();
    Ok((overlap / (ee * tt).sqrt()).min(1.0))
}

/// Kronecker product `a ⊗ b`; qubit 1 is the most significant index.
pub fn tensor(a: &Qubit, b: &Qubit) -> TwoQubit {
    DensityMatrix(a.matrix().kronecker(b.matrix()))
}

/// Traces out one qubit of a two-qubit state, keeping qubit `keep` (1 or 2).
pub fn partial_trace(rho: &TwoQubit, keep: usize) -> Result<Qubit> {
    let m = rho.matrix();
    let mut out = Matrix::<2>::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                1 => (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum(),
                2 => (0..2).map(|k| m[(2 * k + i, 2 * k + j)]).sum(),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "qubit index must be 1 or 2, got {keep}"
                    )))
                }
            };
        }
    }
    Ok(DensityMatrix(out))
}

/// The two-qubit SWAP gate.
pub fn swap_gate() -> Unitary<4> {
    let mut m = Matrix::<4>::zeros();
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, c)] = ONE;
    }
    Unitary(m)
}
