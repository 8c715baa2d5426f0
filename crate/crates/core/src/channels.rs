//! Non-revealed measurement `Φ_X(ρ) = Σ_j Π_j ρ Π_j`, the monitoring map
//! `Φ^ε_X(ρ) = (1 − ε)ρ + εΦ_X(ρ)`, composition, and superoperators.
//!
//! Channels are kept structural; [`Superoperator`] materialization exists for
//! equality checks against circuits and for algebraic identities.

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::observables::ProjectiveObservable;
use crate::state::DensityOperator;

/// Sup-norm tolerance for [`channels_equal`].
pub const CHANNEL_EQ_TOL: f64 = 1e-10;

/// Weak non-revealed measurement of an observable with intensity `ε ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct MonitoringChannel {
    observable: ProjectiveObservable,
    epsilon: f64,
}

impl MonitoringChannel {
    pub fn new(observable: ProjectiveObservable, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            observable,
            epsilon,
        })
    }

    pub fn observable(&self) -> &ProjectiveObservable {
        &self.observable
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    Ok(())
}

/// A channel descriptor.
#[derive(Clone, Debug)]
pub enum Channel {
    Identity(usize),
    Dephase(ProjectiveObservable),
    Monitor(MonitoringChannel),
    /// `outer ∘ inner`.
    Compose(Box<Channel>, Box<Channel>),
}

impl Channel {
    pub fn monitor(observable: ProjectiveObservable, epsilon: f64) -> Result<Self> {
        Ok(Channel::Monitor(MonitoringChannel::new(
            observable, epsilon,
        )?))
    }

    pub fn dim(&self) -> usize {
        match self {
            Channel::Identity(d) => *d,
            Channel::Dephase(x) => x.dim(),
            Channel::Monitor(m) => m.observable.dim(),
            Channel::Compose(outer, _) => outer.dim(),
        }
    }

    /// Applies the channel to an arbitrary operator by linearity.
    pub fn apply_operator(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: m.dim(),
            });
        }
        Ok(match self {
            Channel::Identity(_) => m.clone(),
            Channel::Dephase(x) => dephase_operator(x, m),
            Channel::Monitor(ch) => monitor_operator(ch, m),
            Channel::Compose(outer, inner) => outer.apply_operator(&inner.apply_operator(m)?)?,
        })
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.apply_operator(rho.matrix())
            .map(DensityOperator::from_channel_output)
    }
}

fn dephase_operator(x: &ProjectiveObservable, m: &ComplexMatrix) -> ComplexMatrix {
    x.projectors()
        .iter()
        .fold(ComplexMatrix::zeros(m.dim()), |acc, p| {
            &acc + &p.matmul(m).matmul(p)
        })
}

fn monitor_operator(ch: &MonitoringChannel, m: &ComplexMatrix) -> ComplexMatrix {
    let eps = ch.epsilon;
    &m.scale_real(1.0 - eps) + &dephase_operator(&ch.observable, m).scale_real(eps)
}

/// `Φ_X(ρ)`.
pub fn dephase(x: &ProjectiveObservable, rho: &DensityOperator) -> Result<DensityOperator> {
    x.check_dim(rho.dim())?;
    Ok(DensityOperator::from_channel_output(dephase_operator(
        x,
        rho.matrix(),
    )))
}

/// `Φ^ε_X(ρ)`.
pub fn monitor(ch: &MonitoringChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.observable.check_dim(rho.dim())?;
    check_epsilon(ch.epsilon)?;
    Ok(DensityOperator::from_channel_output(monitor_operator(
        ch,
        rho.matrix(),
    )))
}

/// `outer ∘ inner`.
pub fn compose(outer: Channel, inner: Channel) -> Result<Channel> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimensionMismatch {
            expected: outer.dim(),
            found: inner.dim(),
        });
    }
    Ok(Channel::Compose(Box::new(outer), Box::new(inner)))
}

/// Matrix of a linear map on `d × d` operators.
///
/// Operators are vectorized row-major: `E_kl ↦ k·d + l`, so column `k·d + l`
/// holds the image of the matrix unit `E_kl`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    /// Evaluates `map` on every matrix unit.
    pub fn from_linear_map(
        dim: usize,
        mut map: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let mut matrix = ComplexMatrix::zeros(dim * dim);
        for k in 0..dim {
            for l in 0..dim {
                let image = map(&ComplexMatrix::unit(dim, k, l))?;
                if image.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: image.dim(),
                    });
                }
                for i in 0..dim {
                    for j in 0..dim {
                        matrix[(i * dim + j, k * dim + l)] = image[(i, j)];
                    }
                }
            }
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `self ∘ inner`.
    pub fn then_after(&self, inner: &Self) -> Self {
        Self {
            dim: self.dim,
            matrix: self.matrix.matmul(&inner.matrix),
        }
    }

    pub fn apply(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim;
        let n = d * d;
        let mut out = ComplexMatrix::zeros(d);
        for row in 0..n {
            let mut acc = crate::linalg::ZERO;
            for col in 0..n {
                acc += self.matrix[(row, col)] * m.as_slice()[col];
            }
            out[(row / d, row % d)] = acc;
        }
        out
    }

    /// Sup-norm distance; infinite when dimensions differ.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Largest `|Tr Φ(E_kl) − δ_kl|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..d {
            for l in 0..d {
                let tr: crate::linalg::C64 =
                    (0..d).map(|i| self.matrix[(i * d + i, k * d + l)]).sum();
                let want = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((tr - want).norm());
            }
        }
        worst
    }
}

pub fn to_superoperator(ch: &Channel) -> Superoperator {
    Superoperator::from_linear_map(ch.dim(), |e| ch.apply_operator(e))
        .expect("matrix units have the channel dimension")
}

/// Superoperators agree within [`CHANNEL_EQ_TOL`] in sup-norm.
pub fn channels_equal(a: &Superoperator, b: &Superoperator) -> bool {
    a.max_deviation(b) <= CHANNEL_EQ_TOL
}
