//! Ancilla dilation circuits for the monitoring map, simulated on dense
//! density matrices.
//!
//! For each system qubit `i` with measurement basis `V_i = U(θ_b, φ_b, 0)` the
//! circuit applies `V_i†`, couples the qubit to a fresh ancilla prepared in
//! `U(θ_m, 0, 0)|0⟩` through a controlled gate, then applies `V_i`. Tracing
//! out the ancillas leaves
//!
//! * controlled-Z: coherences damped by `⟨φ|σz|φ⟩ = cos θ_m`, i.e. `ε = 1 − cos θ_m`;
//! * controlled-NOT: coherences damped by `⟨φ|σx|φ⟩ = sin θ_m`, i.e. `ε = 1 − sin θ_m`.
//!
//! Qubit 0 is the most significant tensor factor. System qubits occupy
//! `0..n`, ancillas `n..2n`.

pub mod noise;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::{compose, to_superoperator, Channel, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, tensor_product, ComplexMatrix, C64, ONE, ZERO};
use crate::observables::ProjectiveObservable;
use crate::state::DensityOperator;

pub use noise::{apply_readout_noise, sample_shots, sample_shots_with, Confusion, NoiseModel};

/// `U(θ, φ, λ) = [[cos(θ/2), −e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_rows([
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ])
}

/// Checks `U(θ, φ, λ)† = U(θ, π − λ, −π − φ)` entrywise within `1e-12`.
pub fn unitary_adjoint_identity_check(theta: f64, phi: f64, lambda: f64) -> bool {
    u3(theta, phi, lambda)
        .adjoint()
        .max_abs_diff(&u3(theta, PI - lambda, -PI - phi))
        <= 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coupling {
    #[serde(rename = "cz")]
    Cz,
    #[serde(rename = "cnot")]
    Cnot,
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coupling::Cz => "cz",
            Coupling::Cnot => "cnot",
        })
    }
}

impl std::str::FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cz" => Ok(Coupling::Cz),
            "cnot" | "cx" => Ok(Coupling::Cnot),
            other => Err(Error::config(
                "coupling",
                format!("unknown coupling `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    U3 {
        qubit: usize,
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    Cz {
        control: usize,
        target: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::U3 { qubit, .. } => vec![qubit],
            Gate::Cz { control, target } | Gate::Cnot { control, target } => vec![control, target],
        }
    }

    /// Unitary on [`Gate::qubits`], first listed qubit most significant.
    pub fn matrix(&self) -> ComplexMatrix {
        match *self {
            Gate::U3 {
                theta, phi, lambda, ..
            } => u3(theta, phi, lambda),
            Gate::Cz { .. } => ComplexMatrix::diagonal(&[1.0, 1.0, 1.0, -1.0]),
            Gate::Cnot { .. } => ComplexMatrix::from_rows([
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, ONE, ZERO, ZERO],
                [ZERO, ZERO, ZERO, ONE],
                [ZERO, ZERO, ONE, ZERO],
            ]),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        !matches!(self, Gate::U3 { .. })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::U3 {
                qubit,
                theta,
                phi,
                lambda,
            } => write!(f, "U3 q{qubit} {theta} {phi} {lambda}"),
            Gate::Cz { control, target } => write!(f, "CZ q{control} q{target}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
        }
    }
}

/// A gate sequence over `n_system` system qubits followed by ancillas, all
/// ancillas starting in `|0⟩`.
#[derive(Clone, Debug)]
pub struct Circuit {
    width: usize,
    n_system: usize,
    gates: Vec<Gate>,
    strength: f64,
    coupling: Coupling,
    basis: Vec<(f64, f64)>,
}

impl Circuit {
    /// Validates qubit indices and that each ancilla meets exactly one
    /// controlled gate.
    pub fn new(
        n_system: usize,
        n_ancilla: usize,
        gates: Vec<Gate>,
        strength: f64,
        coupling: Coupling,
        basis: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let width = n_system + n_ancilla;
        if n_system == 0 {
            return Err(Error::InvalidCircuit("no system qubits".into()));
        }
        let mut touched = vec![0usize; width];
        for g in &gates {
            let qs = g.qubits();
            if qs.iter().any(|&q| q >= width) {
                return Err(Error::InvalidCircuit(format!(
                    "`{g}` exceeds width {width}"
                )));
            }
            if qs.len() == 2 {
                if qs[0] == qs[1] {
                    return Err(Error::InvalidCircuit(format!("`{g}` repeats a qubit")));
                }
                for &q in &qs {
                    touched[q] += 1;
                }
            }
        }
        if let Some(a) = (n_system..width).find(|&a| touched[a] != 1) {
            return Err(Error::InvalidCircuit(format!(
                "ancilla q{a} meets {} controlled gates, expected 1",
                touched[a]
            )));
        }
        Ok(Self {
            width,
            n_system,
            gates,
            strength,
            coupling,
            basis,
        })
    }

    /// The trivial circuit on `n_system` qubits: no ancillas, no gates.
    pub fn identity(n_system: usize) -> Self {
        Self {
            width: n_system,
            n_system,
            gates: Vec::new(),
            strength: 0.0,
            coupling: Coupling::Cz,
            basis: vec![(0.0, 0.0); n_system],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn system_qubits(&self) -> Vec<usize> {
        (0..self.n_system).collect()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Ancilla preparation angle `θ_m`.
    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// Per-system-qubit `(θ_b, φ_b)`.
    pub fn basis(&self) -> &[(f64, f64)] {
        &self.basis
    }

    /// One gate per line: `U3 q<i> theta phi lambda`, `CZ q<i> q<j>`, `CNOT q<i> q<j>`.
    pub fn dump(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// Propagates an arbitrary system operator through the circuit and traces
    /// out the ancillas. Linear in `input`.
    pub fn evolve_operator(
        &self,
        input: &ComplexMatrix,
        noise: Option<&NoiseModel>,
    ) -> Result<ComplexMatrix> {
        let dim_sys = 1usize << self.n_system;
        if input.dim() != dim_sys {
            return Err(Error::DimensionMismatch {
                expected: dim_sys,
                found: input.dim(),
            });
        }
        let n_anc = self.width - self.n_system;
        let mut ancilla0 = ComplexMatrix::zeros(1 << n_anc);
        ancilla0[(0, 0)] = ONE;
        let mut rho = tensor_product(input, &ancilla0);
        for gate in &self.gates {
            apply_gate(&mut rho, self.width, gate);
            if let (Some(noise), true) = (noise, gate.is_two_qubit()) {
                if noise.depolarizing > 0.0 {
                    noise::depolarize(&mut rho, self.width, &gate.qubits(), noise.depolarizing);
                }
            }
        }
        if n_anc == 0 {
            return Ok(rho);
        }
        partial_trace(&rho, &vec![2; self.width], &self.system_qubits())
    }
}

/// Builds the monitoring circuit for the product basis `⊗_i U(θ_i, φ_i, 0)`
/// with ancillas prepared by `U(θ_m, 0, 0)`.
pub fn build_monitor_circuit(
    basis: &[(f64, f64)],
    strength: f64,
    coupling: Coupling,
) -> Result<Circuit> {
    check_strength(strength)?;
    let n = basis.len();
    let mut gates = Vec::with_capacity(4 * n);
    for i in 0..n {
        gates.push(Gate::U3 {
            qubit: n + i,
            theta: strength,
            phi: 0.0,
            lambda: 0.0,
        });
    }
    // V† = U(θ, φ, 0)† = U(θ, π, −π − φ)
    for (i, &(theta, phi)) in basis.iter().enumerate() {
        gates.push(Gate::U3 {
            qubit: i,
            theta,
            phi: PI,
            lambda: -PI - phi,
        });
    }
    for i in 0..n {
        gates.push(match coupling {
            Coupling::Cz => Gate::Cz {
                control: i,
                target: n + i,
            },
            Coupling::Cnot => Gate::Cnot {
                control: i,
                target: n + i,
            },
        });
    }
    for (i, &(theta, phi)) in basis.iter().enumerate() {
        gates.push(Gate::U3 {
            qubit: i,
            theta,
            phi,
            lambda: 0.0,
        });
    }
    Circuit::new(n, n, gates, strength, coupling, basis.to_vec())
}

fn check_strength(strength: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&strength) {
        return Err(Error::StrengthOutOfRange(strength));
    }
    Ok(())
}

/// Monitoring intensity realized by a coupling at ancilla angle `θ_m`.
pub fn epsilon_of_strength(coupling: Coupling, strength: f64) -> Result<f64> {
    check_strength(strength)?;
    let strength = strength.min(FRAC_PI_2);
    Ok(match coupling {
        Coupling::Cz => 1.0 - strength.cos(),
        Coupling::Cnot => 1.0 - strength.sin(),
    })
}

/// Inverse of [`epsilon_of_strength`].
pub fn strength_of_epsilon(coupling: Coupling, epsilon: f64) -> Result<f64> {
    crate::channels::check_epsilon(epsilon)?;
    Ok(match coupling {
        Coupling::Cz => (1.0 - epsilon).acos(),
        Coupling::Cnot => (1.0 - epsilon).asin(),
    })
}

/// `ε` read off the extracted superoperator of a single-qubit computational
/// basis circuit: `1 − Re S[E₀₁ → E₀₁]`.
pub fn extracted_epsilon(coupling: Coupling, strength: f64) -> Result<f64> {
    let c = build_monitor_circuit(&[(0.0, 0.0)], strength, coupling)?;
    let s = extract_channel(&c, None)?;
    Ok(1.0 - s.matrix()[(1, 1)].re)
}

/// Runs `rho ⊗ |0…0⟩⟨0…0|` through the circuit and traces out the ancillas.
pub fn run_circuit_density(
    circuit: &Circuit,
    rho: &DensityOperator,
    noise: Option<&NoiseModel>,
) -> Result<DensityOperator> {
    let out = circuit.evolve_operator(rho.matrix(), noise)?;
    Ok(DensityOperator::from_channel_output(out))
}

/// Process matrix of the circuit on the system register.
pub fn extract_channel(circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<Superoperator> {
    Superoperator::from_linear_map(1 << circuit.n_system(), |e| {
        circuit.evolve_operator(e, noise)
    })
}

/// Analytic counterpart of an `n`-qubit monitoring circuit: the composition of
/// single-qubit monitors `Φ^ε_{V_i}` on each system qubit. For one qubit this
/// is `Φ^ε_{n̂·σ}`; for more qubits it equals `V Φ^ε_{0,1} V†` with
/// `Φ^ε_{0,1}` the per-qubit computational-basis monitor.
pub fn product_monitor_channel(basis: &[(f64, f64)], epsilon: f64) -> Result<Channel> {
    let n = basis.len();
    let mut channel: Option<Channel> = None;
    for (i, &(theta, phi)) in basis.iter().enumerate() {
        let local =
            ProjectiveObservable::on_qubit(&ProjectiveObservable::from_axis(theta, phi), i, n)?;
        let step = Channel::monitor(local, epsilon)?;
        channel = Some(match channel {
            None => step,
            Some(prev) => compose(step, prev)?,
        });
    }
    channel.ok_or_else(|| Error::InvalidCircuit("empty basis".into()))
}

/// Sup-norm distance between a circuit's extracted channel and its analytic
/// product-monitor counterpart.
pub fn dilation_deviation(basis: &[(f64, f64)], strength: f64, coupling: Coupling) -> Result<f64> {
    let circuit = build_monitor_circuit(basis, strength, coupling)?;
    let extracted = extract_channel(&circuit, None)?;
    let eps = epsilon_of_strength(coupling, strength)?;
    let reference = to_superoperator(&product_monitor_channel(basis, eps)?);
    Ok(extracted.max_deviation(&reference))
}

/// Applies `op` (acting on `qubits`, first most significant) as `ρ ← op ρ op†`.
pub(crate) fn apply_local(
    rho: &mut ComplexMatrix,
    width: usize,
    qubits: &[usize],
    op: &ComplexMatrix,
) {
    let k = qubits.len();
    let sub = 1usize << k;
    debug_assert_eq!(op.dim(), sub);
    let masks: Vec<usize> = qubits.iter().map(|&q| 1usize << (width - 1 - q)).collect();
    let offsets: Vec<usize> = (0..sub)
        .map(|s| {
            (0..k)
                .filter(|&b| s & (1 << (k - 1 - b)) != 0)
                .map(|b| masks[b])
                .sum()
        })
        .collect();
    let all_mask: usize = masks.iter().sum();
    let dim = 1usize << width;
    let bases: Vec<usize> = (0..dim).filter(|i| i & all_mask == 0).collect();
    let mut buf = vec![ZERO; sub];

    // Left multiplication: columns.
    for col in 0..dim {
        for &base in &bases {
            for (s, &off) in offsets.iter().enumerate() {
                buf[s] = rho[(base + off, col)];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (s, &b) in buf.iter().enumerate() {
                    acc += op[(r, s)] * b;
                }
                rho[(base + off, col)] = acc;
            }
        }
    }
    // Right multiplication by op†: rows.
    for row in 0..dim {
        for &base in &bases {
            for (s, &off) in offsets.iter().enumerate() {
                buf[s] = rho[(row, base + off)];
            }
            for (c, &off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (s, &b) in buf.iter().enumerate() {
                    acc += b * op[(c, s)].conj();
                }
                rho[(row, base + off)] = acc;
            }
        }
    }
}

fn apply_gate(rho: &mut ComplexMatrix, width: usize, gate: &Gate) {
    apply_local(rho, width, &gate.qubits(), &gate.matrix());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{channels_equal, monitor, MonitoringChannel};
    use crate::linalg::{pauli, tensor_all};
    use crate::state::PureState;

    fn plus() -> DensityOperator {
        DensityOperator::from_pure(&PureState::plus())
    }

    /// Dense reference: embed each gate as a full unitary and conjugate.
    fn dense_run(c: &Circuit, input: &ComplexMatrix) -> ComplexMatrix {
        let n_anc = c.width() - c.n_system();
        let mut anc = ComplexMatrix::zeros(1 << n_anc);
        anc[(0, 0)] = ONE;
        let mut rho = tensor_product(input, &anc);
        for g in c.gates() {
            let full = embed(g, c.width());
            rho = rho.conjugate_by(&full);
        }
        partial_trace(&rho, &vec![2; c.width()], &c.system_qubits()).unwrap()
    }

    fn embed(g: &Gate, width: usize) -> ComplexMatrix {
        let id = ComplexMatrix::identity(2);
        let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diagonal(&[0.0, 1.0]);
        match *g {
            Gate::U3 { qubit, .. } => {
                let m = g.matrix();
                tensor_all((0..width).map(|q| if q == qubit { &m } else { &id }))
            }
            Gate::Cz { control, target } | Gate::Cnot { control, target } => {
                let t = if matches!(g, Gate::Cz { .. }) {
                    pauli::z()
                } else {
                    pauli::x()
                };
                let a = tensor_all((0..width).map(|q| if q == control { &p0 } else { &id }));
                let b = tensor_all((0..width).map(|q| {
                    if q == control {
                        &p1
                    } else if q == target {
                        &t
                    } else {
                        &id
                    }
                }));
                &a + &b
            }
        }
    }

    #[test]
    fn local_application_matches_dense_embedding() {
        let basis = [(0.7, 0.3), (1.9, -1.2)];
        for coupling in [Coupling::Cz, Coupling::Cnot] {
            let c = build_monitor_circuit(&basis, 0.8, coupling).unwrap();
            let rho = DensityOperator::from_pure(
                &PureState::normalized(vec![
                    C64::new(0.3, 0.1),
                    C64::new(-0.5, 0.2),
                    C64::new(0.1, 0.7),
                    C64::new(0.4, -0.3),
                ])
                .unwrap(),
            );
            let fast = c.evolve_operator(rho.matrix(), None).unwrap();
            let slow = dense_run(&c, rho.matrix());
            assert!(fast.max_abs_diff(&slow) < 1e-13);
        }
    }

    #[test]
    fn adjoint_identity_examples() {
        assert!(unitary_adjoint_identity_check(0.0, 0.0, 0.0));
        assert!(unitary_adjoint_identity_check(PI / 2.0, 0.0, 0.0));
        assert!(unitary_adjoint_identity_check(1.3, -2.2, 0.9));
    }

    #[test]
    fn u3_is_unitary() {
        let u = u3(0.9, 1.7, -0.4);
        assert!(
            u.matmul(&u.adjoint())
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-15
        );
    }

    #[test]
    fn computational_cz_circuit_is_sigma_z_monitor() {
        for &t in &[0.0, 0.3, PI / 3.0, 1.2, FRAC_PI_2] {
            let c = build_monitor_circuit(&[(0.0, 0.0)], t, Coupling::Cz).unwrap();
            let eps = epsilon_of_strength(Coupling::Cz, t).unwrap();
            let reference =
                to_superoperator(&Channel::monitor(ProjectiveObservable::pauli_z(), eps).unwrap());
            assert!(
                channels_equal(&extract_channel(&c, None).unwrap(), &reference),
                "θ_m = {t}"
            );
        }
    }

    #[test]
    fn zero_strength_is_identity() {
        let c = build_monitor_circuit(&[(0.0, 0.0)], 0.0, Coupling::Cz).unwrap();
        assert!(channels_equal(
            &extract_channel(&c, None).unwrap(),
            &Superoperator::identity(2)
        ));
        let c = build_monitor_circuit(&[(1.0, 0.4)], 0.0, Coupling::Cz).unwrap();
        assert!(channels_equal(
            &extract_channel(&c, None).unwrap(),
            &Superoperator::identity(2)
        ));
    }

    #[test]
    fn two_qubit_full_strength_dephases_fully() {
        let c = build_monitor_circuit(&[(0.0, 0.0), (0.0, 0.0)], FRAC_PI_2, Coupling::Cz).unwrap();
        let reference = to_superoperator(&Channel::Dephase(ProjectiveObservable::computational(4)));
        assert!(channels_equal(
            &extract_channel(&c, None).unwrap(),
            &reference
        ));
    }

    #[test]
    fn identity_circuit_returns_input() {
        let rho = DensityOperator::from_pure(&PureState::bloch(0.3, 0.2));
        let out = run_circuit_density(&Circuit::identity(1), &rho, None).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn monitor_circuit_on_plus() {
        let c = build_monitor_circuit(&[(0.0, 0.0)], PI / 3.0, Coupling::Cz).unwrap();
        let out = run_circuit_density(&c, &plus(), None).unwrap();
        let want = ComplexMatrix::from_real_rows([[0.5, 0.25], [0.25, 0.5]]);
        assert!(out.matrix().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn tilted_basis_circuit_matches_scenario_two() {
        let theta_b = PI / 4.0;
        for &t in &[0.2, 0.9, FRAC_PI_2] {
            let c = build_monitor_circuit(&[(theta_b, 0.0)], t, Coupling::Cz).unwrap();
            let out = run_circuit_density(&c, &plus(), None).unwrap();
            let eps = epsilon_of_strength(Coupling::Cz, t).unwrap();
            let l = crate::reality::scenario2_closed_form(theta_b, eps);
            let ev = out.eigenvalues();
            assert!((ev[1] - l[0]).abs() < 1e-10 && (ev[0] - l[1]).abs() < 1e-10);
            let analytic = monitor(
                &MonitoringChannel::new(ProjectiveObservable::from_axis(theta_b, 0.0), eps)
                    .unwrap(),
                &plus(),
            )
            .unwrap();
            assert!(out.matrix().max_abs_diff(analytic.matrix()) < 1e-12);
        }
    }

    #[test]
    fn cnot_damping_is_sin() {
        for &t in &[0.0, 0.4, 1.0, FRAC_PI_2] {
            let c = build_monitor_circuit(&[(0.0, 0.0)], t, Coupling::Cnot).unwrap();
            let s = extract_channel(&c, None).unwrap();
            let want = ComplexMatrix::diagonal(&[1.0, t.sin(), t.sin(), 1.0]);
            assert!(s.matrix().max_abs_diff(&want) < 1e-12);
            let e = extracted_epsilon(Coupling::Cnot, t).unwrap();
            assert!((e - epsilon_of_strength(Coupling::Cnot, t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn cz_superoperator_is_cos_diagonal() {
        let t = 0.77;
        let c = build_monitor_circuit(&[(0.0, 0.0)], t, Coupling::Cz).unwrap();
        let want = ComplexMatrix::diagonal(&[1.0, t.cos(), t.cos(), 1.0]);
        assert!(
            extract_channel(&c, None)
                .unwrap()
                .matrix()
                .max_abs_diff(&want)
                < 1e-12
        );
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_of_strength(Coupling::Cz, 0.0).unwrap(), 0.0);
        assert!((epsilon_of_strength(Coupling::Cz, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((epsilon_of_strength(Coupling::Cz, PI / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            epsilon_of_strength(Coupling::Cz, 2.0),
            Err(Error::StrengthOutOfRange(_))
        ));
        assert!(epsilon_of_strength(Coupling::Cz, -0.1).is_err());
        for &e in &[0.0, 0.3, 1.0] {
            for coupling in [Coupling::Cz, Coupling::Cnot] {
                let t = strength_of_epsilon(coupling, e).unwrap();
                assert!((epsilon_of_strength(coupling, t).unwrap() - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dump_format() {
        let c = build_monitor_circuit(&[(0.5, 0.0)], 0.25, Coupling::Cz).unwrap();
        let text = c.dump();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "U3 q1 0.25 0 0");
        assert_eq!(lines[1], format!("U3 q0 0.5 {} {}", PI, -PI));
        assert_eq!(lines[2], "CZ q0 q1");
        assert_eq!(lines[3], "U3 q0 0.5 0 0");
        let c = build_monitor_circuit(&[(0.0, 0.0)], 0.25, Coupling::Cnot).unwrap();
        assert!(c.dump().contains("CNOT q0 q1\n"));
    }

    #[test]
    fn circuit_validation() {
        let bad = Circuit::new(
            1,
            1,
            vec![Gate::Cz {
                control: 0,
                target: 0,
            }],
            0.0,
            Coupling::Cz,
            vec![],
        );
        assert!(bad.is_err());
        let untouched = Circuit::new(1, 1, vec![], 0.0, Coupling::Cz, vec![]);
        assert!(untouched.is_err());
        let out_of_range = Circuit::new(
            1,
            1,
            vec![Gate::Cz {
                control: 0,
                target: 2,
            }],
            0.0,
            Coupling::Cz,
            vec![],
        );
        assert!(out_of_range.is_err());
    }

    #[test]
    fn run_rejects_dimension_mismatch() {
        let c = build_monitor_circuit(&[(0.0, 0.0)], 0.5, Coupling::Cz).unwrap();
        assert!(run_circuit_density(&c, &DensityOperator::maximally_mixed(4), None).is_err());
    }
}
