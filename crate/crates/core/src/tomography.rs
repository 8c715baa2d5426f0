//! Finite-shot single-qubit tomography: Pauli expectation estimates from
//! sampled counts and reconstruction by eigenvalue clamp-and-renormalize.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::noise::{apply_readout_noise, sample_shots_with, NoiseModel};
use crate::error::Result;
use crate::linalg::hermitian_eig;
use crate::sampling::stream_rng;
use crate::state::{bloch_matrix, bloch_vector, DensityOperator};

/// Estimated Bloch components along x, y, z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliEstimates {
    pub means: [f64; 3],
    /// Shots per axis; 0 means exact expectations.
    pub shots: u64,
    pub standard_errors: [f64; 3],
}

impl PauliEstimates {
    /// Wraps exact or externally produced means, with binomial standard errors.
    pub fn from_means(means: [f64; 3], shots: u64) -> Self {
        let se = |r: f64| {
            if shots == 0 {
                0.0
            } else {
                ((1.0 - r * r).max(0.0) / shots as f64).sqrt()
            }
        };
        Self {
            means,
            shots,
            standard_errors: means.map(se),
        }
    }
}

/// Outcome distribution `(p₀, p₁)` for a `σ_axis` measurement, after the
/// qubit-0 readout confusion of `noise`.
pub fn axis_probabilities(
    rho: &DensityOperator,
    axis: usize,
    noise: Option<&NoiseModel>,
) -> Result<[f64; 2]> {
    // Rotating the σ_axis eigenbasis onto the computational basis leaves
    // p₀ = (1 + ⟨σ_axis⟩)/2 on the first outcome.
    let r = bloch_vector(rho)?[axis];
    let p0 = (0.5 * (1.0 + r)).clamp(0.0, 1.0);
    let mut p = vec![p0, 1.0 - p0];
    if let Some(noise) = noise {
        p = apply_readout_noise(&p, &[noise.readout_for(0)])?;
    }
    Ok([p[0], p[1]])
}

pub fn estimate_pauli(
    rho: &DensityOperator,
    shots: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
) -> Result<PauliEstimates> {
    estimate_pauli_with(rho, shots, &mut stream_rng(seed, 0), noise)
}

/// Measures each Pauli axis with `shots` samples drawn from `rng`; `shots = 0`
/// returns the exact (possibly readout-distorted) expectations.
pub fn estimate_pauli_with<R: Rng + ?Sized>(
    rho: &DensityOperator,
    shots: u64,
    rng: &mut R,
    noise: Option<&NoiseModel>,
) -> Result<PauliEstimates> {
    let mut means = [0.0; 3];
    for (axis, mean) in means.iter_mut().enumerate() {
        let p = axis_probabilities(rho, axis, noise)?;
        *mean = if shots == 0 {
            p[0] - p[1]
        } else {
            let counts = sample_shots_with(&p, shots, rng)?;
            (counts[0] as f64 - counts[1] as f64) / shots as f64
        };
    }
    Ok(PauliEstimates::from_means(means, shots))
}

/// `(I + r̂·σ)/2`, with a negative eigenvalue clamped to zero and the trace
/// renormalized.
pub fn reconstruct_state(est: &PauliEstimates) -> DensityOperator {
    let raw = bloch_matrix(est.means);
    let eig = hermitian_eig(&raw).expect("Bloch matrices are Hermitian");
    let total: f64 = eig.values.iter().map(|v| v.max(0.0)).sum();
    let repaired = eig.reconstruct_with(|v| v.max(0.0) / total);
    DensityOperator::from_channel_output(repaired)
}
