//! Validated density operators, pure states and entropic functionals.

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, pauli, ComplexMatrix, C64, HERMITIAN_TOL, ONE, ZERO};

/// Trace must equal one within this tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated before a state is rejected as non-positive.
pub const NEGATIVITY_TOL: f64 = 1e-9;
/// Norm tolerance accepted by [`PureState::new`].
pub const NORM_TOL: f64 = 1e-8;

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose norm is within `1e-8` of one, then renormalizes.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if amplitudes.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Norm { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Norm { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            amplitudes: vec![C64::new(c, 0.0), C64::from_polar(s, phi)],
        }
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        Self::bloch(std::f64::consts::FRAC_PI_2, 0.0)
    }

    /// `(|0⟩ + i|1⟩)/√2`.
    pub fn plus_i() -> Self {
        Self::bloch(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace { trace: trace.re });
        }
        let min_eigenvalue = hermitian_eig(&matrix)?.values[0];
        if min_eigenvalue < -NEGATIVITY_TOL {
            return Err(Error::Negativity { min_eigenvalue });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Wraps a matrix produced by a trace-preserving, positivity-preserving map
    /// of a valid state. Hermiticity is enforced; nothing else is checked.
    pub(crate) fn from_channel_output(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        Self {
            matrix: ComplexMatrix::outer(a, a),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `(I + r·σ)/2`; the vector must satisfy `|r| ≤ 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        Self::new(bloch_matrix(r))
    }

    /// Diagonal state `Σ p_j |j⟩⟨j|`.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diagonal(probabilities))
    }

    /// Convex mixture `λ a + (1 − λ) b`.
    pub fn mix(lambda: f64, a: &Self, b: &Self) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        Self::new(&a.matrix.scale_real(lambda) + &b.matrix.scale_real(1.0 - lambda))
    }

    /// `U ρ U†`.
    pub fn evolve(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: unitary.dim(),
            });
        }
        Ok(Self::from_channel_output(self.matrix.conjugate_by(unitary)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .expect("density operators are Hermitian")
            .values
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Partial trace keeping the listed subsystems.
    pub fn reduce(&self, dims: &[usize], keep: &[usize]) -> Result<Self> {
        Ok(Self::from_channel_output(linalg::partial_trace(
            &self.matrix,
            dims,
            keep,
        )?))
    }
}

pub(crate) fn bloch_matrix(r: [f64; 3]) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(2);
    m = &m + &pauli::x().scale_real(r[0]);
    m = &m + &pauli::y().scale_real(r[1]);
    m = &m + &pauli::z().scale_real(r[2]);
    m.scale_real(0.5)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Shannon entropy (bits) of a spectrum, clamping eigenvalues in
/// `[−1e-9, 0)` to zero and rejecting anything more negative.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -NEGATIVITY_TOL {
            return Err(Error::Negativity { min_eigenvalue: l });
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// `H₂(p) = −p log₂ p − (1 − p) log₂(1 − p)`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// `(Tr ρσx, Tr ρσy, Tr ρσz)` for a qubit.
pub fn bloch_vector(rho: &DensityOperator) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    Ok([
        2.0 * m[(0, 1)].re,
        -2.0 * m[(0, 1)].im,
        (m[(0, 0)] - m[(1, 1)]).re,
    ])
}
