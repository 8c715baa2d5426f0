//! Readout confusion, depolarizing noise and shot sampling.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::apply_local;
use crate::error::{Error, Result};
use crate::linalg::{pauli, tensor_product, ComplexMatrix};
use crate::sampling::stream_rng;

/// Per-qubit readout error rates of the three-qubit device used as the
/// default noise preset (qubits Q0, Q1, Q2).
pub const DEVICE_READOUT_ERROR: [f64; 3] = [0.0208, 0.0192, 0.0213];
/// Default depolarizing probability after each two-qubit gate.
pub const DEFAULT_DEPOLARIZING: f64 = 0.01;

/// Column-stochastic `2 × 2` matrix: `m[reported][true]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Confusion(pub [[f64; 2]; 2]);

impl Confusion {
    /// Flips either outcome with probability `p`.
    pub fn symmetric(p: f64) -> Self {
        Confusion([[1.0 - p, p], [p, 1.0 - p]])
    }

    pub fn ideal() -> Self {
        Self::symmetric(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.0;
        for col in 0..2 {
            let (a, b) = (m[0][col], m[1][col]);
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || (a + b - 1.0).abs() > 1e-12
            {
                return Err(Error::InvalidProbabilities(format!(
                    "confusion column {col} is ({a}, {b})"
                )));
            }
        }
        Ok(())
    }
}

/// Readout confusion per qubit plus a depolarizing probability applied to
/// both qubits of every two-qubit gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub readout: Vec<Confusion>,
    pub depolarizing: f64,
}

impl NoiseModel {
    pub fn new(readout: Vec<Confusion>, depolarizing: f64) -> Result<Self> {
        for c in &readout {
            c.validate()?;
        }
        if !(0.0..=1.0).contains(&depolarizing) {
            return Err(Error::InvalidProbabilities(format!(
                "depolarizing rate {depolarizing} outside [0, 1]"
            )));
        }
        Ok(Self {
            readout,
            depolarizing,
        })
    }

    /// Symmetric readout flips from [`DEVICE_READOUT_ERROR`] and
    /// [`DEFAULT_DEPOLARIZING`].
    pub fn device_default() -> Self {
        Self::with_depolarizing(DEFAULT_DEPOLARIZING)
    }

    pub fn with_depolarizing(depolarizing: f64) -> Self {
        Self::new(
            DEVICE_READOUT_ERROR
                .iter()
                .map(|&p| Confusion::symmetric(p))
                .collect(),
            depolarizing,
        )
        .expect("preset is valid")
    }

    pub fn readout_for(&self, qubit: usize) -> Confusion {
        self.readout
            .get(qubit)
            .copied()
            .unwrap_or_else(Confusion::ideal)
    }
}

fn check_probabilities(probabilities: &[f64]) -> Result<()> {
    if let Some(p) = probabilities.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::InvalidProbabilities(format!("negative entry {p}")));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities(format!(
            "entries sum to {total}"
        )));
    }
    Ok(())
}

/// Multinomial counts from a fixed seed.
pub fn sample_shots(probabilities: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    sample_shots_with(probabilities, shots, &mut stream_rng(seed, 0))
}

/// Multinomial counts by sequential conditional binomials.
pub fn sample_shots_with<R: Rng + ?Sized>(
    probabilities: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    check_probabilities(probabilities)?;
    let mut counts = vec![0u64; probabilities.len()];
    let mut remaining = shots;
    let mut mass = 1.0;
    for (i, &p) in probabilities.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probabilities.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(remaining, q)
            .expect("q is a probability")
            .sample(rng);
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    Ok(counts)
}

/// Applies per-qubit confusion to an outcome distribution over
/// `2^confusions.len()` bit strings (qubit 0 most significant).
pub fn apply_readout_noise(probabilities: &[f64], confusions: &[Confusion]) -> Result<Vec<f64>> {
    check_probabilities(probabilities)?;
    let n = confusions.len();
    if probabilities.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: probabilities.len(),
        });
    }
    let mut p = probabilities.to_vec();
    for (q, conf) in confusions.iter().enumerate() {
        conf.validate()?;
        let mask = 1usize << (n - 1 - q);
        let mut next = vec![0.0; p.len()];
        for (idx, &mass) in p.iter().enumerate() {
            let truth = usize::from(idx & mask != 0);
            for reported in 0..2 {
                let target = if reported == 1 {
                    idx | mask
                } else {
                    idx & !mask
                };
                next[target] += conf.0[reported][truth] * mass;
            }
        }
        p = next;
    }
    Ok(p)
}

/// `ρ ← (1 − p) ρ + p/4^k Σ_P P ρ P` over Pauli strings on `qubits`.
pub(crate) fn depolarize(rho: &mut ComplexMatrix, width: usize, qubits: &[usize], p: f64) {
    let singles = [
        ComplexMatrix::identity(2),
        pauli::x(),
        pauli::y(),
        pauli::z(),
    ];
    let mut strings = vec![ComplexMatrix::identity(1)];
    for _ in qubits {
        strings = strings
            .iter()
            .flat_map(|s| singles.iter().map(move |q| tensor_product(s, q)))
            .collect();
    }
    let weight = p / strings.len() as f64;
    let mut acc = rho.scale_real(1.0 - p);
    for s in &strings {
        let mut term = rho.clone();
        apply_local(&mut term, width, qubits, s);
        acc = &acc + &term.scale_real(weight);
    }
    *rho = acc;
}
