//! Projective observables `X = Σ_j x_j Π_j`, compatibility and mutual
//! unbiasedness.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, tensor_all, ComplexMatrix, C64};

/// Eigenvalues closer than this are merged into one projector.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Tolerance for projector algebra (orthogonality, completeness).
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Tolerance for `[X, X'] = 0`.
pub const COMMUTATION_TOL: f64 = 1e-10;
/// Tolerance on `|⟨x_j|x'_k⟩|² − 1/d`.
pub const MU_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ProjectiveObservable {
    dim: usize,
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
    ranks: Vec<usize>,
}

impl ProjectiveObservable {
    /// Validates `Π_j Π_k = δ_jk Π_j`, `Σ Π_j = I`, Hermiticity, and distinct eigenvalues.
    pub fn from_projectors(eigenvalues: Vec<f64>, projectors: Vec<ComplexMatrix>) -> Result<Self> {
        if eigenvalues.len() != projectors.len() || projectors.is_empty() {
            return Err(Error::InvalidObservable(format!(
                "{} eigenvalues for {} projectors",
                eigenvalues.len(),
                projectors.len()
            )));
        }
        let dim = projectors[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (j, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            if !p.is_hermitian(PROJECTOR_TOL) {
                return Err(Error::InvalidObservable(format!(
                    "projector {j} is not Hermitian"
                )));
            }
            for (k, q) in projectors.iter().enumerate().skip(j) {
                let prod = p.matmul(q);
                let want = if j == k {
                    p.clone()
                } else {
                    ComplexMatrix::zeros(dim)
                };
                if prod.max_abs_diff(&want) > PROJECTOR_TOL {
                    return Err(Error::InvalidObservable(format!(
                        "projectors {j} and {k} are not orthogonal idempotents"
                    )));
                }
            }
            sum = &sum + p;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > PROJECTOR_TOL {
            return Err(Error::InvalidObservable(
                "projectors do not sum to identity".into(),
            ));
        }
        for (j, a) in eigenvalues.iter().enumerate() {
            for b in &eigenvalues[j + 1..] {
                if (a - b).abs() <= DEGENERACY_TOL {
                    return Err(Error::InvalidObservable(format!(
                        "eigenvalues {a} and {b} are not distinct"
                    )));
                }
            }
        }
        let ranks = projectors
            .iter()
            .map(|p| p.trace().re.round() as usize)
            .collect();
        Ok(Self {
            dim,
            eigenvalues,
            projectors,
            ranks,
        })
    }

    /// Nondegenerate observable whose eigenkets are the given orthonormal vectors.
    pub fn from_basis(vectors: &[Vec<C64>], eigenvalues: Vec<f64>) -> Result<Self> {
        let projectors = vectors.iter().map(|v| ComplexMatrix::outer(v, v)).collect();
        Self::from_projectors(eigenvalues, projectors)
    }

    /// Eigenkets are the columns of `u`, labelled `0, 1, …, d−1`.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        let vectors: Vec<_> = (0..u.dim()).map(|c| u.column(c)).collect();
        Self::from_basis(&vectors, (0..u.dim()).map(|j| j as f64).collect())
    }

    /// `n̂·σ` with eigenkets `|n₀⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` (eigenvalue +1)
    /// and `|n₁⟩ = −sin(θ/2)|0⟩ + e^{iφ} cos(θ/2)|1⟩` (eigenvalue −1).
    pub fn from_axis(theta: f64, phi: f64) -> Self {
        let (n0, n1) = axis_eigenkets(theta, phi);
        Self::from_basis(&[n0.to_vec(), n1.to_vec()], vec![1.0, -1.0])
            .expect("axis eigenkets are orthonormal")
    }

    /// Spectral decomposition of a Hermitian matrix, merging eigenvalues
    /// within [`DEGENERACY_TOL`] into a single projector. Eigenvalues ascend.
    pub fn from_hermitian(m: &ComplexMatrix) -> Result<Self> {
        let eig = hermitian_eig(m)?;
        let dim = m.dim();
        let mut eigenvalues: Vec<f64> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, &l) in eig.values.iter().enumerate() {
            match groups.last_mut() {
                Some(group) if (l - eig.values[group[0]]).abs() <= DEGENERACY_TOL => group.push(k),
                _ => {
                    groups.push(vec![k]);
                    eigenvalues.push(l);
                }
            }
        }
        let projectors = groups
            .iter()
            .map(|group| {
                group.iter().fold(ComplexMatrix::zeros(dim), |acc, &k| {
                    let v = eig.vector(k);
                    &acc + &ComplexMatrix::outer(&v, &v)
                })
            })
            .collect::<Vec<_>>();
        // Report the group mean so merged eigenvalues are symmetric.
        let eigenvalues = groups
            .iter()
            .map(|g| g.iter().map(|&k| eig.values[k]).sum::<f64>() / g.len() as f64)
            .collect();
        Self::from_projectors(eigenvalues, projectors)
    }

    pub fn pauli_x() -> Self {
        Self::from_axis(PI / 2.0, 0.0)
    }

    pub fn pauli_y() -> Self {
        Self::from_axis(PI / 2.0, PI / 2.0)
    }

    pub fn pauli_z() -> Self {
        Self::from_axis(0.0, 0.0)
    }

    /// The computational basis with eigenvalues `0..d`.
    pub fn computational(dim: usize) -> Self {
        Self::from_unitary(&ComplexMatrix::identity(dim)).expect("identity is unitary")
    }

    /// The trivial observable `I` (one rank-`d` projector).
    pub fn identity(dim: usize) -> Self {
        Self::from_projectors(vec![1.0], vec![ComplexMatrix::identity(dim)])
            .expect("identity is a projector")
    }

    /// A single-qubit observable acting on `qubit` of an `n_qubits` register
    /// (qubit 0 is the most significant tensor factor).
    pub fn on_qubit(single: &Self, qubit: usize, n_qubits: usize) -> Result<Self> {
        if single.dim != 2 || qubit >= n_qubits {
            return Err(Error::InvalidObservable(format!(
                "cannot place a d={} observable on qubit {qubit} of {n_qubits}",
                single.dim
            )));
        }
        let id = ComplexMatrix::identity(2);
        let projectors = single
            .projectors
            .iter()
            .map(|p| {
                let factors: Vec<&ComplexMatrix> = (0..n_qubits)
                    .map(|q| if q == qubit { p } else { &id })
                    .collect();
                tensor_all(factors)
            })
            .collect();
        Self::from_projectors(single.eigenvalues.clone(), projectors)
    }

    /// Nondegenerate observable diagonal in the product basis
    /// `⊗_i {|n₀(θ_i, φ_i)⟩, |n₁(θ_i, φ_i)⟩}`; eigenvalue of `|j₀ j₁ …⟩` is its index.
    pub fn product_basis(angles: &[(f64, f64)]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidObservable("empty product basis".into()));
        }
        let locals: Vec<ComplexMatrix> = angles
            .iter()
            .map(|&(t, p)| {
                let (n0, n1) = axis_eigenkets(t, p);
                ComplexMatrix::from_rows([[n0[0], n1[0]], [n0[1], n1[1]]])
            })
            .collect();
        Self::from_unitary(&tensor_all(locals.iter()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.ranks.iter().all(|&r| r == 1)
    }

    /// `Σ_j x_j Π_j`.
    pub fn matrix(&self) -> ComplexMatrix {
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(ComplexMatrix::zeros(self.dim), |acc, (&x, p)| {
                &acc + &p.scale_real(x)
            })
    }

    /// Unit eigenket of a rank-1 projector, with the phase convention of
    /// [`hermitian_eig`].
    pub fn eigenket(&self, j: usize) -> Result<Vec<C64>> {
        if self.ranks[j] != 1 {
            return Err(Error::DegenerateObservable);
        }
        let p = &self.projectors[j];
        let pivot = (0..self.dim)
            .max_by(|&a, &b| p[(a, a)].re.total_cmp(&p[(b, b)].re))
            .unwrap_or(0);
        let scale = 1.0 / p[(pivot, pivot)].re.sqrt();
        let mut v: Vec<C64> = p.column(pivot).into_iter().map(|z| z * scale).collect();
        linalg::fix_phase(&mut v);
        Ok(v)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        Ok(())
    }
}

/// `(|n₀⟩, |n₁⟩)` for the axis at polar angle `theta`, azimuth `phi`.
pub fn axis_eigenkets(theta: f64, phi: f64) -> ([C64; 2], [C64; 2]) {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    ([C64::new(c, 0.0), e * s], [C64::new(-s, 0.0), e * c])
}

/// `[X, X'] = 0` within [`COMMUTATION_TOL`] (max entry of `XX' − X'X`).
pub fn commutes(x: &ProjectiveObservable, x2: &ProjectiveObservable) -> Result<bool> {
    x.check_dim(x2.dim)?;
    Ok(x.matrix().commutator(&x2.matrix()).max_abs() <= COMMUTATION_TOL)
}

/// Every `|⟨x_j|x'_k⟩|²` equals `1/d` within [`MU_TOL`].
pub fn is_mutually_unbiased(x: &ProjectiveObservable, x2: &ProjectiveObservable) -> Result<bool> {
    x.check_dim(x2.dim)?;
    if !x.is_nondegenerate() || !x2.is_nondegenerate() {
        return Err(Error::DegenerateObservable);
    }
    let target = 1.0 / x.dim as f64;
    Ok(x.projectors.iter().all(|p| {
        x2.projectors
            .iter()
            .all(|q| (p.matmul(q).trace().re - target).abs() <= MU_TOL)
    }))
}

/// A complete set of `d + 1` mutually unbiased bases, known here for `d = 2`
/// (the Pauli eigenbases z, x, y) and odd primes (quadratic-phase Fourier bases
/// plus the computational basis).
pub fn complete_mub_set(dim: usize) -> Option<Vec<ProjectiveObservable>> {
    if dim == 2 {
        return Some(vec![
            ProjectiveObservable::pauli_z(),
            ProjectiveObservable::pauli_x(),
            ProjectiveObservable::pauli_y(),
        ]);
    }
    if dim < 3 || !is_prime(dim) {
        return None;
    }
    let d = dim as f64;
    let mut set = vec![ProjectiveObservable::computational(dim)];
    for a in 0..dim {
        let vectors: Vec<Vec<C64>> = (0..dim)
            .map(|k| {
                (0..dim)
                    .map(|j| {
                        let exponent = ((a * j * j + k * j) % dim) as f64;
                        C64::from_polar(1.0 / d.sqrt(), 2.0 * PI * exponent / d)
                    })
                    .collect()
            })
            .collect();
        let labels = (0..dim).map(|j| j as f64).collect();
        set.push(ProjectiveObservable::from_basis(&vectors, labels).ok()?);
    }
    Some(set)
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, tensor_product, ONE, ZERO};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn axis_zero_is_computational() {
        let z = ProjectiveObservable::from_axis(0.0, 0.0);
        assert!(close(
            &z.projectors()[0],
            &ComplexMatrix::diagonal(&[1.0, 0.0]),
            1e-15
        ));
        assert!(close(
            &z.projectors()[1],
            &ComplexMatrix::diagonal(&[0.0, 1.0]),
            1e-15
        ));
        assert!(close(&z.matrix(), &pauli::z(), 1e-12));
    }

    #[test]
    fn axis_equator_is_sigma_x() {
        let x = ProjectiveObservable::from_axis(PI / 2.0, 0.0);
        let half = ComplexMatrix::from_real_rows([[0.5, 0.5], [0.5, 0.5]]);
        assert!(close(&x.projectors()[0], &half, 1e-15));
        assert!(close(&x.matrix(), &pauli::x(), 1e-12));
    }

    #[test]
    fn axis_sigma_y_eigenket() {
        let y = ProjectiveObservable::from_axis(PI / 2.0, PI / 2.0);
        let (n0, _) = axis_eigenkets(PI / 2.0, PI / 2.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((n0[0] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((n0[1] - C64::new(0.0, s)).norm() < 1e-15);
        assert!(close(&y.matrix(), &pauli::y(), 1e-12));
    }

    #[test]
    fn axis_matches_n_dot_sigma() {
        for &(t, p) in &[(0.3, 1.1), (2.0, -0.4), (PI, 0.0)] {
            let obs = ProjectiveObservable::from_axis(t, p);
            assert!(close(&obs.matrix(), &pauli::axis(t, p), 1e-12));
        }
    }

    #[test]
    fn from_hermitian_sigma_z() {
        let z = ProjectiveObservable::from_hermitian(&pauli::z()).unwrap();
        assert_eq!(z.eigenvalues(), &[-1.0, 1.0]);
        assert!(close(
            &z.projectors()[0],
            &ComplexMatrix::diagonal(&[0.0, 1.0]),
            1e-15
        ));
        assert!(close(
            &z.projectors()[1],
            &ComplexMatrix::diagonal(&[1.0, 0.0]),
            1e-15
        ));
    }

    #[test]
    fn from_hermitian_identity_is_one_projector() {
        let id = ProjectiveObservable::from_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(id.eigenvalues(), &[1.0]);
        assert_eq!(id.ranks(), &[2]);
        assert!(close(
            &id.projectors()[0],
            &ComplexMatrix::identity(2),
            1e-15
        ));
    }

    #[test]
    fn from_hermitian_z_tensor_identity() {
        let m = tensor_product(&pauli::z(), &ComplexMatrix::identity(2));
        let obs = ProjectiveObservable::from_hermitian(&m).unwrap();
        assert_eq!(obs.eigenvalues().len(), 2);
        assert!((obs.eigenvalues()[0] + 1.0).abs() < 1e-12);
        assert!((obs.eigenvalues()[1] - 1.0).abs() < 1e-12);
        assert_eq!(obs.ranks(), &[2, 2]);
        assert!(close(
            &obs.projectors()[0],
            &ComplexMatrix::diagonal(&[0.0, 0.0, 1.0, 1.0]),
            1e-13
        ));
    }

    #[test]
    fn from_hermitian_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows([[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(
            ProjectiveObservable::from_hermitian(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn commutation_examples() {
        let z = ProjectiveObservable::pauli_z();
        let x = ProjectiveObservable::pauli_x();
        let id = ProjectiveObservable::identity(2);
        assert!(commutes(&z, &id).unwrap());
        assert!(!commutes(&z, &x).unwrap());
        let zi = ProjectiveObservable::on_qubit(&z, 0, 2).unwrap();
        let ix = ProjectiveObservable::on_qubit(&x, 1, 2).unwrap();
        assert!(commutes(&zi, &ix).unwrap());
        assert!(commutes(&z, &zi).is_err());
    }

    #[test]
    fn mutual_unbiasedness_examples() {
        let z = ProjectiveObservable::pauli_z();
        let x = ProjectiveObservable::pauli_x();
        assert!(is_mutually_unbiased(&z, &x).unwrap());
        assert!(!is_mutually_unbiased(&z, &z).unwrap());
        let tilted = ProjectiveObservable::from_axis(PI / 3.0, 0.0);
        assert!(!is_mutually_unbiased(&z, &tilted).unwrap());
        let overlap = z.projectors()[0].matmul(&tilted.projectors()[0]).trace().re;
        assert!((overlap - 0.75).abs() < 1e-12);
    }

    #[test]
    fn mutual_unbiasedness_rejects_degenerate() {
        let zi = ProjectiveObservable::on_qubit(&ProjectiveObservable::pauli_z(), 0, 2).unwrap();
        let c4 = ProjectiveObservable::computational(4);
        assert!(matches!(
            is_mutually_unbiased(&zi, &c4),
            Err(Error::DegenerateObservable)
        ));
    }

    #[test]
    fn mub_sets_are_pairwise_unbiased() {
        for d in [2usize, 3, 5] {
            let set = complete_mub_set(d).unwrap();
            assert_eq!(set.len(), d + 1);
            for i in 0..set.len() {
                for j in (i + 1)..set.len() {
                    assert!(
                        is_mutually_unbiased(&set[i], &set[j]).unwrap(),
                        "d={d} ({i},{j})"
                    );
                }
            }
        }
        assert!(complete_mub_set(4).is_none());
    }

    #[test]
    fn eigenket_recovers_axis_vectors() {
        let obs = ProjectiveObservable::from_axis(1.0, 0.5);
        let (n0, _) = axis_eigenkets(1.0, 0.5);
        let v = obs.eigenket(0).unwrap();
        let overlap = linalg::inner(&v, &n0).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_incomplete_projectors() {
        let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
        assert!(ProjectiveObservable::from_projectors(vec![1.0], vec![p0.clone()]).is_err());
        let p1 = ComplexMatrix::diagonal(&[0.0, 1.0]);
        assert!(ProjectiveObservable::from_projectors(vec![1.0, 1.0], vec![p0, p1]).is_err());
    }
}
