//! Irreality `I_X(ρ) = S(Φ_X(ρ)) − S(ρ)`, reality `R_X = log₂ d − I_X`, and
//! their variations under monitoring.
//!
//! With `ρ_ε = Φ^ε_X(ρ)` the two variations are
//!
//! ```text
//! ΔR_X  = S(ρ_ε) − S(ρ)
//! ΔR_X' = S(Φ_X'(ρ)) + S(ρ_ε) − S(ρ) − S(Φ_X'(ρ_ε))
//!       = ΔR_X + S(Φ_X'(ρ)) − S(Φ_X'(ρ_ε))
//! ```
//!
//! Everything here is computed from entropies of explicitly constructed
//! states. The closed-form spectra at the bottom exist to cross-check that
//! path for the two single-qubit scenarios.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::{check_epsilon, dephase, monitor, MonitoringChannel};
use crate::error::Result;
use crate::observables::{commutes, complete_mub_set, is_mutually_unbiased, ProjectiveObservable};
use crate::state::{binary_entropy, bloch_vector, von_neumann_entropy, DensityOperator};

/// Tolerance for "ρ is diagonal in this basis" (`‖Φ(ρ) − ρ‖_max`).
pub const DIAGONAL_TOL: f64 = 1e-9;

pub fn irreality(x: &ProjectiveObservable, rho: &DensityOperator) -> Result<f64> {
    let dephased = dephase(x, rho)?;
    Ok(von_neumann_entropy(&dephased)? - von_neumann_entropy(rho)?)
}

pub fn reality(x: &ProjectiveObservable, rho: &DensityOperator) -> Result<f64> {
    Ok((x.dim() as f64).log2() - irreality(x, rho)?)
}

/// `ΔR_X = S(Φ^ε_X(ρ)) − S(ρ)`.
pub fn delta_reality_monitored(
    x: &ProjectiveObservable,
    epsilon: f64,
    rho: &DensityOperator,
) -> Result<f64> {
    let ch = MonitoringChannel::new(x.clone(), epsilon)?;
    Ok(von_neumann_entropy(&monitor(&ch, rho)?)? - von_neumann_entropy(rho)?)
}

/// `ΔR_X'` under monitoring of `x` with intensity `epsilon`.
pub fn delta_reality_other(
    xprime: &ProjectiveObservable,
    x: &ProjectiveObservable,
    epsilon: f64,
    rho: &DensityOperator,
) -> Result<f64> {
    Ok(Entropies::compute(x, xprime, epsilon, rho)?.delta_other())
}

/// The four entropies (bits) that determine both variations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    /// `S(ρ)`
    pub rho: f64,
    /// `S(Φ^ε_X(ρ))`
    pub monitored: f64,
    /// `S(Φ_X'(ρ))`
    pub probe: f64,
    /// `S(Φ_X'(Φ^ε_X(ρ)))`
    pub probe_monitored: f64,
}

impl Entropies {
    pub fn compute(
        x: &ProjectiveObservable,
        xprime: &ProjectiveObservable,
        epsilon: f64,
        rho: &DensityOperator,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        xprime.check_dim(rho.dim())?;
        let monitored = monitor(&MonitoringChannel::new(x.clone(), epsilon)?, rho)?;
        Self::from_states(
            rho,
            &monitored,
            &dephase(xprime, rho)?,
            &dephase(xprime, &monitored)?,
        )
    }

    pub fn from_states(
        rho: &DensityOperator,
        monitored: &DensityOperator,
        probe: &DensityOperator,
        probe_monitored: &DensityOperator,
    ) -> Result<Self> {
        Ok(Self {
            rho: von_neumann_entropy(rho)?,
            monitored: von_neumann_entropy(monitored)?,
            probe: von_neumann_entropy(probe)?,
            probe_monitored: von_neumann_entropy(probe_monitored)?,
        })
    }

    /// `ΔR_X`.
    pub fn delta_monitored(&self) -> f64 {
        self.monitored - self.rho
    }

    /// `ΔR_X'` from the four-term expansion.
    pub fn delta_other(&self) -> f64 {
        self.probe + self.monitored - self.rho - self.probe_monitored
    }
}

/// Which of the structural situations applies to `(X, X', ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// `[X, X'] = 0`.
    Compatible,
    /// `Φ_X(ρ) = ρ`.
    XDiagonal,
    /// `Φ_X'(ρ) = ρ`.
    XprimeDiagonal,
    /// `X`, `X'` mutually unbiased.
    Mu,
    /// `X`, `X'` mutually unbiased and `ρ` diagonal in a third basis unbiased to both.
    TripleMu,
    Generic,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Compatible => "compatible",
            CaseLabel::XDiagonal => "x_diagonal",
            CaseLabel::XprimeDiagonal => "xprime_diagonal",
            CaseLabel::Mu => "mu",
            CaseLabel::TripleMu => "triple_mu",
            CaseLabel::Generic => "generic",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn is_diagonal_in(x: &ProjectiveObservable, rho: &DensityOperator) -> Result<bool> {
    Ok(dephase(x, rho)?.matrix().max_abs_diff(rho.matrix()) <= DIAGONAL_TOL)
}

/// Labels `(X, X', ρ)`, testing in order: compatibility, `X`-diagonal,
/// `X'`-diagonal, triple-MU, MU, generic. Triple-MU is tested before MU since
/// it refines it.
pub fn classify_case(
    x: &ProjectiveObservable,
    xprime: &ProjectiveObservable,
    rho: &DensityOperator,
) -> Result<CaseLabel> {
    if commutes(x, xprime)? {
        return Ok(CaseLabel::Compatible);
    }
    if is_diagonal_in(x, rho)? {
        return Ok(CaseLabel::XDiagonal);
    }
    if is_diagonal_in(xprime, rho)? {
        return Ok(CaseLabel::XprimeDiagonal);
    }
    if !(x.is_nondegenerate() && xprime.is_nondegenerate()) || !is_mutually_unbiased(x, xprime)? {
        return Ok(CaseLabel::Generic);
    }
    for third in third_basis_candidates(x, xprime) {
        if is_mutually_unbiased(&third, x)?
            && is_mutually_unbiased(&third, xprime)?
            && is_diagonal_in(&third, rho)?
        {
            return Ok(CaseLabel::TripleMu);
        }
    }
    Ok(CaseLabel::Mu)
}

/// For qubits the basis unbiased to two unbiased bases is fixed: its Bloch
/// axis is the cross product of theirs. Otherwise fall back to a known
/// complete MUB set.
fn third_basis_candidates(
    x: &ProjectiveObservable,
    xprime: &ProjectiveObservable,
) -> Vec<ProjectiveObservable> {
    if x.dim() == 2 {
        let axis = |o: &ProjectiveObservable| {
            let rho = DensityOperator::from_channel_output(o.projectors()[0].clone());
            bloch_vector(&rho).expect("qubit")
        };
        let (a, b) = (axis(x), axis(xprime));
        let n = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ];
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len < 1e-9 {
            return Vec::new();
        }
        let theta = (n[2] / len).clamp(-1.0, 1.0).acos();
        let phi = n[1].atan2(n[0]);
        return vec![ProjectiveObservable::from_axis(theta, phi)];
    }
    complete_mub_set(x.dim()).unwrap_or_default()
}

/// Full account of one `(X, X', ε, ρ)` instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealityReport {
    pub epsilon: f64,
    pub irreality_before: f64,
    pub reality_before: f64,
    pub delta_r_x: f64,
    pub delta_r_xprime: f64,
    pub entropies: Entropies,
    pub case_label: CaseLabel,
}

pub fn reality_report(
    x: &ProjectiveObservable,
    xprime: &ProjectiveObservable,
    epsilon: f64,
    rho: &DensityOperator,
) -> Result<RealityReport> {
    let entropies = Entropies::compute(x, xprime, epsilon, rho)?;
    let irreality_before = irreality(x, rho)?;
    Ok(RealityReport {
        epsilon,
        irreality_before,
        reality_before: (x.dim() as f64).log2() - irreality_before,
        delta_r_x: entropies.delta_monitored(),
        delta_r_xprime: entropies.delta_other(),
        entropies,
        case_label: classify_case(x, xprime, rho)?,
    })
}

/// `(λ₊, λ₋)` pairs for `ρ = |+⟩⟨+|`, `X = σz`, `X' = n̂·σ` (φ = 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario1Spectra {
    /// Spectrum of `Φ^ε_X(ρ)`: `½(1 ± (1 − ε))`.
    pub monitored: [f64; 2],
    /// Spectrum of `Φ_X'(ρ)`: `½(1 ± sin θ)`.
    pub probe: [f64; 2],
    /// Spectrum of `Φ_X'(Φ^ε_X(ρ))`: `½(1 ± (1 − ε) sin θ)`.
    pub probe_monitored: [f64; 2],
}

fn pm(half_width: f64) -> [f64; 2] {
    [0.5 * (1.0 + half_width), 0.5 * (1.0 - half_width)]
}

pub fn scenario1_closed_form(theta: f64, epsilon: f64) -> Scenario1Spectra {
    let s = theta.sin();
    Scenario1Spectra {
        monitored: pm(1.0 - epsilon),
        probe: pm(s),
        probe_monitored: pm((1.0 - epsilon) * s),
    }
}

/// `(λ₊, λ₋)` of `Φ^ε_X(ρ)` for `ρ = |+⟩⟨+|`, `X = n̂·σ` (φ = 0):
/// `½(1 ± √(ε² sin²θ cos²θ + (1 − ε cos²θ)²))`.
pub fn scenario2_closed_form(theta: f64, epsilon: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    let radical = (epsilon * epsilon * s * s * c * c + (1.0 - epsilon * c * c).powi(2)).sqrt();
    pm(radical)
}

/// Diagonal of `Φ_X'(Φ^ε_X(ρ)) = I/2 + (ε/2) cos θ sin θ σz` in scenario 2.
pub fn scenario2_probe_monitored(theta: f64, epsilon: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    pm(epsilon * c * s)
}

/// Entropy (bits) of a two-outcome spectrum.
pub fn spectrum_entropy(pair: [f64; 2]) -> f64 {
    binary_entropy(pair[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::PureState;
    use std::f64::consts::PI;

    const H2_QUARTER: f64 = 0.811_278_124_459_132_8;
    const H2_SIN2_PI8: f64 = 0.600_876_036_692_856_2;

    fn pure(theta: f64, phi: f64) -> DensityOperator {
        DensityOperator::from_pure(&PureState::bloch(theta, phi))
    }

    fn plus() -> DensityOperator {
        pure(PI / 2.0, 0.0)
    }

    fn plus_i() -> DensityOperator {
        pure(PI / 2.0, PI / 2.0)
    }

    #[test]
    fn irreality_examples() {
        let z = ProjectiveObservable::pauli_z();
        assert!((irreality(&z, &plus()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(irreality(&z, &pure(0.0, 0.0)).unwrap(), 0.0);
        assert!((irreality(&z, &pure(PI / 4.0, 0.0)).unwrap() - H2_SIN2_PI8).abs() < 1e-12);
    }

    #[test]
    fn reality_examples() {
        let z = ProjectiveObservable::pauli_z();
        assert!((reality(&z, &pure(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!(reality(&z, &plus()).unwrap().abs() < 1e-12);
        let zz = ProjectiveObservable::computational(4);
        let mixed = DensityOperator::maximally_mixed(4);
        assert!((reality(&zz, &mixed).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn delta_monitored_examples() {
        let z = ProjectiveObservable::pauli_z();
        assert!((delta_reality_monitored(&z, 1.0, &plus()).unwrap() - 1.0).abs() < 1e-12);
        let rho = pure(1.2, 0.4);
        assert!(delta_reality_monitored(&z, 0.0, &rho).unwrap().abs() < 1e-12);
        assert!((delta_reality_monitored(&z, 0.5, &plus()).unwrap() - H2_QUARTER).abs() < 1e-12);
        assert!(delta_reality_monitored(&z, 2.0, &plus()).is_err());
    }

    #[test]
    fn delta_other_examples() {
        let z = ProjectiveObservable::pauli_z();
        let x = ProjectiveObservable::pauli_x();
        for eps in [0.0, 0.3, 1.0] {
            assert!(delta_reality_other(&x, &z, eps, &plus()).unwrap().abs() < 1e-12);
            let a = delta_reality_other(&x, &z, eps, &plus_i()).unwrap();
            let b = delta_reality_monitored(&z, eps, &plus_i()).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        let n = ProjectiveObservable::from_axis(PI / 4.0, 0.0);
        let got = delta_reality_other(&z, &n, 1.0, &plus()).unwrap();
        assert!((got - (1.0 + H2_SIN2_PI8 - H2_QUARTER)).abs() < 1e-12);
    }

    #[test]
    fn delta_other_dimension_mismatch() {
        let z = ProjectiveObservable::pauli_z();
        let c3 = ProjectiveObservable::computational(3);
        assert!(delta_reality_other(&c3, &z, 0.5, &plus()).is_err());
    }

    #[test]
    fn classification_examples() {
        let z = ProjectiveObservable::pauli_z();
        let x = ProjectiveObservable::pauli_x();
        let id = ProjectiveObservable::identity(2);
        assert_eq!(
            classify_case(&z, &id, &plus()).unwrap(),
            CaseLabel::Compatible
        );
        assert_eq!(
            classify_case(&z, &x, &plus()).unwrap(),
            CaseLabel::XprimeDiagonal
        );
        assert_eq!(
            classify_case(&z, &x, &pure(0.0, 0.0)).unwrap(),
            CaseLabel::XDiagonal
        );
        assert_eq!(
            classify_case(&z, &x, &plus_i()).unwrap(),
            CaseLabel::TripleMu
        );
        assert_eq!(
            classify_case(&z, &x, &pure(1.0, 0.3)).unwrap(),
            CaseLabel::Mu
        );
        let n = ProjectiveObservable::from_axis(PI / 4.0, 0.0);
        assert_eq!(
            classify_case(&z, &n, &plus_i()).unwrap(),
            CaseLabel::Generic
        );
    }

    #[test]
    fn classification_triple_mu_for_rotated_qubit_bases() {
        // X = n̂·σ along x, X' along y: the third axis is z.
        let x = ProjectiveObservable::pauli_x();
        let y = ProjectiveObservable::pauli_y();
        assert_eq!(
            classify_case(&x, &y, &pure(0.0, 0.0)).unwrap(),
            CaseLabel::TripleMu
        );
    }

    #[test]
    fn classification_triple_mu_qutrit() {
        let set = complete_mub_set(3).unwrap();
        let third = &set[2];
        let rho = DensityOperator::from_channel_output(third.projectors()[1].clone());
        assert_eq!(
            classify_case(&set[0], &set[1], &rho).unwrap(),
            CaseLabel::TripleMu
        );
    }

    #[test]
    fn scenario1_examples() {
        let s = scenario1_closed_form(PI / 2.0, 1.0);
        assert_eq!(s.monitored, [0.5, 0.5]);
        assert_eq!(s.probe, [1.0, 0.0]);
        assert_eq!(s.probe_monitored, [0.5, 0.5]);
        let s = scenario1_closed_form(0.9, 0.0);
        assert_eq!(s.probe_monitored, s.probe);
        let s = scenario1_closed_form(PI / 6.0, 0.5);
        assert!((s.probe_monitored[0] - 0.625).abs() < 1e-15);
        assert!((s.probe_monitored[1] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn scenario2_examples() {
        let l = scenario2_closed_form(PI / 4.0, 1.0);
        assert!((l[0] - 0.853_553_390_593_273_7).abs() < 1e-12);
        assert!((l[1] - 0.146_446_609_406_726_3).abs() < 1e-12);
        assert_eq!(scenario2_closed_form(1.3, 0.0), [1.0, 0.0]);
        for eps in [0.0, 0.25, 0.8, 1.0] {
            let a = scenario2_closed_form(0.0, eps);
            let b = scenario1_closed_form(0.4, eps).monitored;
            assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn report_recombines() {
        let z = ProjectiveObservable::pauli_z();
        let n = ProjectiveObservable::from_axis(PI / 4.0, 0.0);
        let r = reality_report(&n, &z, 1.0, &plus()).unwrap();
        assert!((r.delta_r_x - H2_SIN2_PI8).abs() < 1e-12);
        assert!((r.delta_r_xprime - 0.789_597_912_233_723_4).abs() < 1e-12);
        assert!((r.irreality_before + r.reality_before - 1.0).abs() < 1e-15);
        assert_eq!(r.case_label, CaseLabel::Generic);
    }
}
