//! Figure-reproduction sweeps, randomized case verification and circuit
//! certification.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::{monitor, MonitoringChannel};
use crate::circuit::noise::{NoiseModel, DEFAULT_DEPOLARIZING, DEVICE_READOUT_ERROR};
use crate::circuit::{
    build_monitor_circuit, dilation_deviation, epsilon_of_strength, extracted_epsilon,
    run_circuit_density, strength_of_epsilon, Coupling,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::observables::{complete_mub_set, ProjectiveObservable};
use crate::reality::{
    classify_case, irreality, reality, scenario1_closed_form, scenario2_closed_form,
    spectrum_entropy, CaseLabel, Entropies,
};
use crate::sampling::{
    haar_unitary, random_density, random_diagonal_in, random_epsilon, random_observable, stream_rng,
};
use crate::state::{bloch_vector, von_neumann_entropy, DensityOperator, PureState};
use crate::tomography::{estimate_pauli_with, reconstruct_state, PauliEstimates};

pub const DEFAULT_GRID_POINTS: usize = 33;
/// Shots per Pauli axis when none are given.
pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_BOOTSTRAP: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig1,
    Fig2,
    Fig4a,
    Fig4b,
    Fig4c,
    Custom,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_ascii_lowercase()))
            .map_err(|_| Error::config("scenario", format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatePreset {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
    Mixed,
}

/// Initial qubit state: a named preset, Bloch angles of a pure state, or an
/// explicit Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StateSpec {
    Preset {
        preset: StatePreset,
    },
    Bloch {
        bloch: [f64; 3],
    },
    Angles {
        theta: f64,
        #[serde(default)]
        phi: f64,
    },
}

impl StateSpec {
    pub fn density(&self) -> Result<DensityOperator> {
        let r = match *self {
            StateSpec::Preset { preset } => match preset {
                StatePreset::Zero => [0.0, 0.0, 1.0],
                StatePreset::One => [0.0, 0.0, -1.0],
                StatePreset::Plus => [1.0, 0.0, 0.0],
                StatePreset::Minus => [-1.0, 0.0, 0.0],
                StatePreset::PlusI => [0.0, 1.0, 0.0],
                StatePreset::MinusI => [0.0, -1.0, 0.0],
                StatePreset::Mixed => [0.0, 0.0, 0.0],
            },
            StateSpec::Angles { theta, phi } => {
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(Error::config("state", "angles must be finite"));
                }
                return Ok(DensityOperator::from_pure(&PureState::bloch(theta, phi)));
            }
            StateSpec::Bloch { bloch } => {
                let n2: f64 = bloch.iter().map(|c| c * c).sum();
                if !(n2.sqrt() <= 1.0 + 1e-12) {
                    return Err(Error::config(
                        "state",
                        format!("Bloch vector {bloch:?} is longer than 1"),
                    ));
                }
                bloch
            }
        };
        DensityOperator::from_bloch(r).map_err(|e| Error::config("state", e.to_string()))
    }
}

/// Bloch axis `n̂(θ, φ)` of a qubit observable `n̂·σ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
}

impl AxisSpec {
    pub const Z: AxisSpec = AxisSpec {
        theta: 0.0,
        phi: 0.0,
    };
    pub const X: AxisSpec = AxisSpec {
        theta: FRAC_PI_2,
        phi: 0.0,
    };

    pub fn observable(&self) -> ProjectiveObservable {
        ProjectiveObservable::from_axis(self.theta, self.phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    ThetaM,
    Epsilon,
}

/// Either `points` evenly spaced values over the full range (`[0, π/2]` for
/// `theta_m`, `[0, 1]` for `epsilon`) or an explicit `values` list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_grid_kind")]
    pub kind: GridKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn default_grid_kind() -> GridKind {
    GridKind::ThetaM
}

impl GridSpec {
    pub fn even(kind: GridKind, points: usize) -> Self {
        Self {
            kind,
            points: Some(points),
            values: None,
        }
    }

    pub fn values(kind: GridKind, values: Vec<f64>) -> Self {
        Self {
            kind,
            points: None,
            values: Some(values),
        }
    }

    fn upper(&self) -> f64 {
        match self.kind {
            GridKind::ThetaM => FRAC_PI_2,
            GridKind::Epsilon => 1.0,
        }
    }

    pub fn resolve(&self) -> Result<Vec<f64>> {
        let hi = self.upper();
        let values = match (&self.values, self.points) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "grid",
                    "give either `points` or `values`, not both",
                ))
            }
            (Some(v), None) => v.clone(),
            (None, points) => {
                let n = points.unwrap_or(DEFAULT_GRID_POINTS);
                match n {
                    0 => Vec::new(),
                    1 => vec![0.0],
                    _ => (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect(),
                }
            }
        };
        if values.is_empty() {
            return Err(Error::config("grid", "grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=hi).contains(*v)) {
            let field = match self.kind {
                GridKind::ThetaM => "grid.values (theta_m)",
                GridKind::Epsilon => "grid.values (epsilon)",
            };
            return Err(Error::config(field, format!("{v} outside [0, {hi}]")));
        }
        Ok(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Channels applied exactly.
    Analytic,
    /// Dilation circuits, noiseless; finite shots if `shots > 0`.
    Circuit,
    /// Dilation circuits with depolarizing noise, readout confusion and shots.
    Noisy,
}

impl PathKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PathKind::Analytic => "analytic",
            PathKind::Circuit => "circuit",
            PathKind::Noisy => "noisy",
        }
    }
}

impl std::str::FromStr for PathKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(PathKind::Analytic),
            "circuit" => Ok(PathKind::Circuit),
            "noisy" | "circuit+noise+shots" => Ok(PathKind::Noisy),
            other => Err(Error::config("path", format!("unknown path `{other}`"))),
        }
    }
}

/// Everything that determines a sweep. Missing JSON fields are filled from the
/// preset of the chosen `scenario`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub state: StateSpec,
    /// Axis of the monitored observable `X`.
    pub monitored: AxisSpec,
    /// Axis of the probe observable `X'`.
    pub probe: AxisSpec,
    pub grid: GridSpec,
    pub path: PathKind,
    /// Shots per Pauli axis per tomographed state; 0 uses exact expectations.
    pub shots: u64,
    pub seed: u64,
    pub coupling: Coupling,
    /// Two-qubit depolarizing probability on the noisy path.
    pub depolarizing: f64,
    /// Bootstrap replicates for standard errors on shot paths; 0 disables.
    pub bootstrap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

impl SweepConfig {
    pub fn preset(scenario: Scenario) -> Self {
        let plus = StateSpec::Preset {
            preset: StatePreset::Plus,
        };
        let tilted = AxisSpec {
            theta: FRAC_PI_4,
            phi: 0.0,
        };
        let (state, monitored, probe, kind) = match scenario {
            Scenario::Fig1 => (plus, AxisSpec::Z, tilted, GridKind::Epsilon),
            Scenario::Fig2 => (plus, tilted, AxisSpec::Z, GridKind::Epsilon),
            Scenario::Fig4a | Scenario::Custom => {
                (plus, AxisSpec::Z, AxisSpec::X, GridKind::ThetaM)
            }
            Scenario::Fig4b => (
                StateSpec::Preset {
                    preset: StatePreset::PlusI,
                },
                AxisSpec::Z,
                AxisSpec::X,
                GridKind::ThetaM,
            ),
            Scenario::Fig4c => (plus, tilted, AxisSpec::Z, GridKind::ThetaM),
        };
        Self {
            scenario,
            state,
            monitored,
            probe,
            grid: GridSpec::even(kind, DEFAULT_GRID_POINTS),
            path: PathKind::Analytic,
            shots: DEFAULT_SHOTS,
            seed: 0,
            coupling: Coupling::Cz,
            depolarizing: DEFAULT_DEPOLARIZING,
            bootstrap: DEFAULT_BOOTSTRAP,
            out: None,
            svg: None,
        }
    }

    /// Parses a JSON config, overlaying its top-level fields on the preset of
    /// its `scenario` (default `custom`).
    pub fn from_json_str(text: &str) -> Result<Self> {
        let user: Value =
            serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        let Value::Object(fields) = user else {
            return Err(Error::config("config", "top level must be a JSON object"));
        };
        let scenario = match fields.get("scenario") {
            None => Scenario::Custom,
            Some(v) => serde_json::from_value(v.clone())
                .map_err(|_| Error::config("scenario", format!("unknown scenario {v}")))?,
        };
        let mut merged = serde_json::to_value(Self::preset(scenario))?;
        let target = merged
            .as_object_mut()
            .expect("config serializes to an object");
        for (k, v) in fields {
            target.insert(k, v);
        }
        let config: Self =
            serde_json::from_value(merged).map_err(|e| Error::config("config", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.state.density()?;
        for (name, axis) in [("monitored", self.monitored), ("probe", self.probe)] {
            if !axis.theta.is_finite() || !axis.phi.is_finite() {
                return Err(Error::config(name, "axis angles must be finite"));
            }
        }
        self.grid.resolve()?;
        if !(0.0..=1.0).contains(&self.depolarizing) {
            return Err(Error::config(
                "depolarizing",
                format!("{} outside [0, 1]", self.depolarizing),
            ));
        }
        if self.bootstrap == 1 {
            return Err(Error::config(
                "bootstrap",
                "need 0 (disabled) or at least 2 replicates",
            ));
        }
        Ok(())
    }

    pub fn noise_model(&self) -> Option<NoiseModel> {
        (self.path == PathKind::Noisy).then(|| NoiseModel::with_depolarizing(self.depolarizing))
    }

    /// Whether records carry sampling noise.
    pub fn is_shot_path(&self) -> bool {
        self.path != PathKind::Analytic && self.shots > 0
    }
}

/// One grid point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta_m: f64,
    pub epsilon: f64,
    pub delta_r_x: f64,
    pub delta_r_xprime: f64,
    pub entropies: Entropies,
    pub case: CaseLabel,
    pub path: PathKind,
    pub se_delta_r_x: Option<f64>,
    pub se_delta_r_xprime: Option<f64>,
}

/// Provenance stored alongside sweep records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub generator: String,
    pub config: SweepConfig,
    pub state_bloch: [f64; 3],
    pub epsilon_mapping: String,
    pub readout_error: Option<Vec<f64>>,
    pub tomography: Option<String>,
}

impl SweepMetadata {
    pub fn new(config: &SweepConfig) -> Result<Self> {
        let rho = config.state.density()?;
        let noisy = config.path == PathKind::Noisy;
        let tomography = (config.path != PathKind::Analytic).then(|| {
            if config.shots == 0 {
                "exact Pauli expectations (shots = 0)".to_string()
            } else {
                format!(
                    "simulated single-qubit Pauli tomography, {} shots per axis per state, \
                     eigenvalue clamp-and-renormalize; a stand-in for the unreported hardware procedure",
                    config.shots
                )
            }
        });
        Ok(Self {
            generator: format!("reality-core {}", env!("CARGO_PKG_VERSION")),
            config: config.clone(),
            state_bloch: bloch_vector(&rho)?,
            epsilon_mapping: match config.coupling {
                Coupling::Cz => "epsilon = 1 - cos(theta_m)".into(),
                Coupling::Cnot => "epsilon = 1 - sin(theta_m)".into(),
            },
            readout_error: noisy.then(|| DEVICE_READOUT_ERROR.to_vec()),
            tomography,
        })
    }
}

/// Evaluates every grid point, in parallel, returning records in grid order.
/// Point `i` draws its randomness from stream `i` of `config.seed`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let rho = config.state.density()?;
    let x = config.monitored.observable();
    let xprime = config.probe.observable();
    let case = classify_case(&x, &xprime, &rho)?;
    let noise = config.noise_model();
    let grid = config.grid.resolve()?;
    let ctx = PointContext {
        config,
        rho: &rho,
        x: &x,
        xprime: &xprime,
        case,
        noise: noise.as_ref(),
    };
    grid.par_iter()
        .enumerate()
        .map(|(i, &g)| ctx.evaluate(i, g))
        .collect()
}

struct PointContext<'a> {
    config: &'a SweepConfig,
    rho: &'a DensityOperator,
    x: &'a ProjectiveObservable,
    xprime: &'a ProjectiveObservable,
    case: CaseLabel,
    noise: Option<&'a NoiseModel>,
}

impl PointContext<'_> {
    fn evaluate(&self, index: usize, grid_value: f64) -> Result<SweepRecord> {
        let cfg = self.config;
        let (theta_m, epsilon) = match cfg.grid.kind {
            GridKind::ThetaM => (grid_value, epsilon_of_strength(cfg.coupling, grid_value)?),
            GridKind::Epsilon => (strength_of_epsilon(cfg.coupling, grid_value)?, grid_value),
        };
        let (entropies, se) = match cfg.path {
            PathKind::Analytic => (
                Entropies::compute(self.x, self.xprime, epsilon, self.rho)?,
                None,
            ),
            PathKind::Circuit | PathKind::Noisy => self.circuit_point(index, theta_m)?,
        };
        Ok(SweepRecord {
            theta_m,
            epsilon,
            delta_r_x: entropies.delta_monitored(),
            delta_r_xprime: entropies.delta_other(),
            entropies,
            case: self.case,
            path: cfg.path,
            se_delta_r_x: se.map(|s: [f64; 2]| s[0]),
            se_delta_r_xprime: se.map(|s| s[1]),
        })
    }

    /// The four states come from the monitoring circuit at `theta_m` and a
    /// full-strength circuit for `X'`, run one after the other.
    fn circuit_point(&self, index: usize, theta_m: f64) -> Result<(Entropies, Option<[f64; 2]>)> {
        let cfg = self.config;
        let axis = |a: AxisSpec| vec![(a.theta, a.phi)];
        let monitor_circuit = build_monitor_circuit(&axis(cfg.monitored), theta_m, cfg.coupling)?;
        let full = strength_of_epsilon(cfg.coupling, 1.0)?;
        let probe_circuit = build_monitor_circuit(&axis(cfg.probe), full, cfg.coupling)?;

        let monitored = run_circuit_density(&monitor_circuit, self.rho, self.noise)?;
        let states = [
            self.rho.clone(),
            run_circuit_density(&probe_circuit, self.rho, self.noise)?,
            run_circuit_density(&probe_circuit, &monitored, self.noise)?,
            monitored,
        ];
        let [rho, probe, probe_monitored, monitored] = &states;
        if cfg.path == PathKind::Circuit && cfg.shots == 0 {
            return Ok((
                Entropies::from_states(rho, monitored, probe, probe_monitored)?,
                None,
            ));
        }

        let mut rng = stream_rng(cfg.seed, index as u64);
        let mut estimate =
            |s: &DensityOperator| estimate_pauli_with(s, cfg.shots, &mut rng, self.noise);
        let estimates = [
            estimate(rho)?,
            estimate(monitored)?,
            estimate(probe)?,
            estimate(probe_monitored)?,
        ];
        let entropies = entropies_from_estimates(&estimates)?;
        let se = (cfg.shots > 0 && cfg.bootstrap >= 2)
            .then(|| bootstrap_errors(&estimates, cfg.bootstrap, &mut rng))
            .transpose()?;
        Ok((entropies, se))
    }
}

/// Estimates ordered as `ρ`, `Φ^ε_X(ρ)`, `Φ_X'(ρ)`, `Φ_X'Φ^ε_X(ρ)`.
fn entropies_from_estimates(est: &[PauliEstimates; 4]) -> Result<Entropies> {
    let s = |e: &PauliEstimates| von_neumann_entropy(&reconstruct_state(e));
    Ok(Entropies {
        rho: s(&est[0])?,
        monitored: s(&est[1])?,
        probe: s(&est[2])?,
        probe_monitored: s(&est[3])?,
    })
}

/// Parametric bootstrap: redraw every axis count from the estimated means and
/// take the sample standard deviation of both deltas.
fn bootstrap_errors<R: Rng + ?Sized>(
    est: &[PauliEstimates; 4],
    replicates: usize,
    rng: &mut R,
) -> Result<[f64; 2]> {
    let mut draws = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let resampled = est.map(|e| {
            let means = e.means.map(|r| {
                let p = (0.5 * (1.0 + r)).clamp(0.0, 1.0);
                let k = Binomial::new(e.shots, p)
                    .expect("p is a probability")
                    .sample(rng);
                (2.0 * k as f64 - e.shots as f64) / e.shots as f64
            });
            PauliEstimates::from_means(means, e.shots)
        });
        let ent = entropies_from_estimates(&resampled)?;
        draws.push([ent.delta_monitored(), ent.delta_other()]);
    }
    let sd = |k: usize| {
        let n = draws.len() as f64;
        let mean = draws.iter().map(|d| d[k]).sum::<f64>() / n;
        (draws.iter().map(|d| (d[k] - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok([sd(0), sd(1)])
}

/// Outcome of one property over many instances. A margin below `-tolerance`
/// is a violation; larger is better. Violations of properties that are not
/// `enforced` are reported but do not fail the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub tolerance: f64,
    pub enforced: bool,
    pub instances: usize,
    pub violations: usize,
    pub worst_margin: f64,
}

impl CheckSummary {
    fn new(name: &str, tolerance: f64, enforced: bool) -> Self {
        Self {
            name: name.into(),
            tolerance,
            enforced,
            instances: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
        }
    }

    fn record(&mut self, margin: f64) {
        self.instances += 1;
        if !(margin >= -self.tolerance) {
            self.violations += 1;
        }
        if !(margin >= self.worst_margin) {
            self.worst_margin = margin;
        }
    }

    /// Margin `lhs − rhs` for `lhs ≥ rhs`.
    fn at_least(&mut self, lhs: f64, rhs: f64) {
        self.record(lhs - rhs);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub checks: Vec<CheckSummary>,
}

impl CaseReport {
    /// Violations of enforced checks.
    pub fn violations(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.enforced)
            .map(|c| c.violations)
            .sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Deltas of one instance, with `ΔR_X'` computed twice: from the four-term
/// entropy expansion and as the change of `R_X'`.
struct Deltas {
    ent: Entropies,
    dx: f64,
    dxp: f64,
    dxp_from_reality: f64,
}

fn deltas(
    x: &ProjectiveObservable,
    xp: &ProjectiveObservable,
    eps: f64,
    rho: &DensityOperator,
) -> Result<Deltas> {
    let ent = Entropies::compute(x, xp, eps, rho)?;
    let monitored = monitor(&MonitoringChannel::new(x.clone(), eps)?, rho)?;
    Ok(Deltas {
        dx: ent.delta_monitored(),
        dxp: ent.delta_other(),
        dxp_from_reality: reality(xp, &monitored)? - reality(xp, rho)?,
        ent,
    })
}

/// Relabels the eigenbasis of `x` with distinct random eigenvalues, so the
/// result commutes with `x`.
fn relabel<R: Rng + ?Sized>(x: &ProjectiveObservable, rng: &mut R) -> Result<ProjectiveObservable> {
    let mut values: Vec<f64> = (0..x.projectors().len())
        .map(|k| k as f64 + rng.gen::<f64>() * 0.5)
        .collect();
    values.reverse();
    ProjectiveObservable::from_projectors(values, x.projectors().to_vec())
}

/// Merges the first two eigenspaces of a nondegenerate observable.
fn coarse_grain(x: &ProjectiveObservable) -> Result<ProjectiveObservable> {
    let p = x.projectors();
    let mut projectors = vec![&p[0] + &p[1]];
    projectors.extend(p[2..].iter().cloned());
    let values = (0..projectors.len()).map(|k| k as f64).collect();
    ProjectiveObservable::from_projectors(values, projectors)
}

fn rotated(obs: &ProjectiveObservable, u: &ComplexMatrix) -> Result<ProjectiveObservable> {
    let projectors = obs.projectors().iter().map(|p| p.conjugate_by(u)).collect();
    ProjectiveObservable::from_projectors(obs.eigenvalues().to_vec(), projectors)
}

/// Checks every structural property of the reality measures on `trials`
/// random instances of dimension `dim`, plus the two qubit scenario orderings
/// when `dim = 2`. Case (v) needs a known complete MUB set and is skipped
/// where none is available.
pub fn verify_cases(seed: u64, trials: usize, dim: usize) -> Result<CaseReport> {
    if trials == 0 {
        return Err(Error::config("trials", "need at least one trial"));
    }
    if dim < 2 {
        return Err(Error::config("dim", "need dimension at least 2"));
    }
    let mub = complete_mub_set(dim);
    let per_trial: Vec<Vec<(usize, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| trial_margins(seed, t, dim, mub.as_deref()))
        .collect::<Result<_>>()?;

    let mut checks: Vec<CheckSummary> = CHECKS
        .iter()
        .map(|&(n, tol, enforced)| CheckSummary::new(n, tol, enforced))
        .collect();
    for margins in per_trial {
        for (k, m) in margins {
            checks[k].record(m);
        }
    }
    if dim == 2 {
        scenario_orderings(&mut checks);
    }
    checks.retain(|c| c.instances > 0);
    Ok(CaseReport {
        seed,
        trials,
        dim,
        checks,
    })
}

/// `ΔR_X' ≥ 0` fails for generic incompatible pairs (e.g. `ρ = |+⟩`,
/// `X = n̂(π/4)·σ`, `X' = σx`, `ε = 1` gives `H₂(0.8536) − H₂(0.75) ≈ −0.21`),
/// so it is only reported there and enforced for compatible and MU pairs.
/// Likewise an `X'`-diagonal state can only lose `X'` reality, and keeps all
/// of it when the pair is MU.
const CHECKS: [(&str, f64, bool); 18] = [
    ("decomposition_identity", 1e-10, true),
    ("delta_x_nonnegative", 1e-9, true),
    ("delta_x_at_least_eps_irreality", 1e-9, true),
    ("delta_xprime_nonnegative_generic", 1e-9, false),
    ("delta_xprime_nonnegative_mu", 1e-9, true),
    ("case_i_compatible_equal", 1e-9, true),
    ("case_i_refined_equal", 1e-9, true),
    ("case_ii_delta_x_zero", 1e-9, true),
    ("case_ii_delta_xprime_zero", 1e-9, true),
    ("case_iii_delta_xprime_nonpositive", 1e-9, true),
    ("case_iii_mu_delta_xprime_zero", 1e-9, true),
    ("case_iv_mu_ordering", 1e-9, true),
    ("case_iv_concavity_bound", 1e-9, true),
    ("case_v_equal", 1e-9, true),
    ("case_v_delta_x_positive", 0.0, true),
    ("maximally_mixed_fixed", 1e-9, true),
    ("scenario1_ordering", 1e-9, true),
    ("scenario2_ordering", 1e-9, true),
];

fn check_index(name: &str) -> usize {
    CHECKS
        .iter()
        .position(|c| c.0 == name)
        .expect("known check")
}

fn trial_margins(
    seed: u64,
    trial: usize,
    dim: usize,
    mub: Option<&[ProjectiveObservable]>,
) -> Result<Vec<(usize, f64)>> {
    let mut rng = stream_rng(seed, trial as u64);
    let mut out = Vec::new();
    let mut push = |name: &str, margin: f64| out.push((check_index(name), margin));
    let log_d = (dim as f64).log2();

    // Generic instance.
    let x = random_observable(dim, &mut rng);
    let xp = random_observable(dim, &mut rng);
    let eps = random_epsilon(&mut rng);
    let rho = random_density(dim, &mut rng);
    let d = deltas(&x, &xp, eps, &rho)?;
    push(
        "decomposition_identity",
        -(d.dxp_from_reality - (d.dx + d.ent.probe - d.ent.probe_monitored)).abs(),
    );
    push("delta_x_nonnegative", d.dx);
    push(
        "delta_x_at_least_eps_irreality",
        d.dx - eps * irreality(&x, &rho)?,
    );
    push("delta_xprime_nonnegative_generic", d.dxp);

    // (i) compatible: X' shares the eigenbasis of X, or X is a coarse-graining of X'.
    let d = deltas(&x, &relabel(&x, &mut rng)?, eps, &rho)?;
    push("case_i_compatible_equal", -(d.dxp - d.dx).abs());
    if dim > 2 {
        let d = deltas(&coarse_grain(&xp)?, &xp, eps, &rho)?;
        push("case_i_refined_equal", -(d.dxp - d.dx).abs());
    }

    // (ii) ρ diagonal in X, arbitrary X'.
    let diag = random_diagonal_in(&x, &mut rng);
    let d = deltas(&x, &xp, eps, &diag)?;
    push("case_ii_delta_x_zero", -d.dx.abs());
    push("case_ii_delta_xprime_zero", -d.dxp.abs());

    // (iii) ρ diagonal in X'.
    let diag = random_diagonal_in(&xp, &mut rng);
    push(
        "case_iii_delta_xprime_nonpositive",
        -deltas(&x, &xp, eps, &diag)?.dxp,
    );

    // (iv) MU pair: a random rotation of the computational and Fourier bases.
    let u = haar_unitary(dim, &mut rng);
    let comp = rotated(&ProjectiveObservable::computational(dim), &u)?;
    let fourier = rotated(&fourier_observable(dim)?, &u)?;
    let diag = random_diagonal_in(&fourier, &mut rng);
    push(
        "case_iii_mu_delta_xprime_zero",
        -deltas(&comp, &fourier, eps, &diag)?.dxp.abs(),
    );
    let d = deltas(&comp, &fourier, eps, &rho)?;
    push("delta_xprime_nonnegative_mu", d.dxp);
    push("case_iv_mu_ordering", d.dx - d.dxp);
    push(
        "case_iv_concavity_bound",
        (d.ent.probe_monitored - d.ent.probe) - eps * (log_d - d.ent.probe),
    );

    // (v) ρ diagonal in a third basis unbiased to both.
    if let Some(set) = mub {
        let u = haar_unitary(dim, &mut rng);
        let [a, b, c] = [&set[0], &set[1], &set[2]].map(|o| rotated(o, &u));
        let (a, b, c) = (a?, b?, c?);
        let diag = random_diagonal_in(&c, &mut rng);
        let d = deltas(&a, &b, eps, &diag)?;
        push("case_v_equal", -(d.dxp - d.dx).abs());
        if eps >= 1e-3 {
            push(
                "case_v_delta_x_positive",
                if d.dx > 0.0 { d.dx } else { -1.0 },
            );
        }
    }

    let mixed = DensityOperator::maximally_mixed(dim);
    let d = deltas(&x, &xp, eps, &mixed)?;
    push("maximally_mixed_fixed", -d.dx.abs().max(d.dxp.abs()));
    Ok(out)
}

/// Observable whose eigenbasis is the discrete Fourier basis.
fn fourier_observable(dim: usize) -> Result<ProjectiveObservable> {
    let vectors: Vec<Vec<_>> = (0..dim)
        .map(|k| {
            (0..dim)
                .map(|j| {
                    let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / dim as f64;
                    crate::linalg::C64::from_polar(1.0 / (dim as f64).sqrt(), angle)
                })
                .collect()
        })
        .collect();
    ProjectiveObservable::from_basis(&vectors, (0..dim).map(|k| k as f64).collect())
}

/// Closed-form orderings of the two single-qubit scenarios on a 33 × 33 grid
/// of `θ ∈ (0, π)`, `ε ∈ [0, 1]`.
fn scenario_orderings(checks: &mut [CheckSummary]) {
    let n = 33;
    for i in 1..n {
        let theta = std::f64::consts::PI * i as f64 / n as f64;
        for j in 0..n {
            let eps = j as f64 / (n - 1) as f64;
            let s1 = scenario1_closed_form(theta, eps);
            let dx = spectrum_entropy(s1.monitored);
            let dxp = spectrum_entropy(s1.probe) + dx - spectrum_entropy(s1.probe_monitored);
            checks[check_index("scenario1_ordering")].at_least(dx, dxp);
            let dx2 = spectrum_entropy(scenario2_closed_form(theta, eps));
            let pm = crate::reality::scenario2_probe_monitored(theta, eps);
            let dxp2 = 1.0 + dx2 - spectrum_entropy(pm);
            checks[check_index("scenario2_ordering")].at_least(dxp2, dx2);
        }
    }
}

/// Deviation of one circuit family from its analytic channel over a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationEntry {
    pub n_qubits: usize,
    pub coupling: Coupling,
    pub basis: Vec<(f64, f64)>,
    pub points: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CertificationEntry {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

/// How the controlled-NOT coupling maps ancilla angle to intensity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CnotMapping {
    pub theta_m: Vec<f64>,
    pub extracted_epsilon: Vec<f64>,
    /// `max |ε_extracted − (1 − sin θ_m)|`.
    pub max_error_vs_one_minus_sin: f64,
    /// `max |ε_extracted − (1 − ½ sin θ_m)|`.
    pub max_gap_vs_one_minus_half_sin: f64,
    pub monotone: bool,
    /// Second differences bounded by `h² max|ε''|` with `|ε''| ≤ 1`.
    pub smooth: bool,
    pub note: String,
}

impl CnotMapping {
    pub fn passed(&self) -> bool {
        self.monotone && self.smooth && self.max_error_vs_one_minus_sin <= 1e-10
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub resolution: usize,
    pub entries: Vec<CertificationEntry>,
    pub cnot: CnotMapping,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(CertificationEntry::passed) && self.cnot.passed()
    }

    pub fn max_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_deviation)
            .fold(0.0, f64::max)
    }
}

fn strength_grid(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|i| FRAC_PI_2 * i as f64 / (resolution - 1) as f64)
        .collect()
}

/// Compares extracted circuit channels against composed single-qubit monitors
/// for one, two (both couplings) and three qubits, and characterizes the
/// controlled-NOT intensity mapping.
pub fn certify_circuits(resolution: usize) -> Result<CertificationReport> {
    if resolution < 2 {
        return Err(Error::config("resolution", "need at least 2 grid points"));
    }
    let grid = strength_grid(resolution);
    let families: Vec<(Vec<(f64, f64)>, Coupling, f64, usize)> = {
        let mut f = Vec::new();
        for coupling in [Coupling::Cz, Coupling::Cnot] {
            f.push((vec![(FRAC_PI_4, 0.0)], coupling, 1e-10, resolution));
            f.push((vec![(1.1, 0.7)], coupling, 1e-10, resolution));
            f.push((
                vec![(FRAC_PI_4, 0.0), (FRAC_PI_4, 0.0)],
                coupling,
                1e-10,
                resolution,
            ));
            f.push((vec![(0.3, 1.9), (2.2, -0.4)], coupling, 1e-10, resolution));
        }
        f.push((
            vec![(FRAC_PI_4, 0.0), (1.0, 0.5), (2.0, -1.0)],
            Coupling::Cz,
            1e-9,
            3,
        ));
        f
    };
    let entries = families
        .into_par_iter()
        .map(|(basis, coupling, tolerance, points)| {
            let mut max_deviation: f64 = 0.0;
            for &s in &strength_grid(points) {
                max_deviation = max_deviation.max(dilation_deviation(&basis, s, coupling)?);
            }
            Ok(CertificationEntry {
                n_qubits: basis.len(),
                coupling,
                basis,
                points,
                max_deviation,
                tolerance,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let extracted = grid
        .iter()
        .map(|&s| extracted_epsilon(Coupling::Cnot, s))
        .collect::<Result<Vec<_>>>()?;
    let max_err = |f: &dyn Fn(f64) -> f64| {
        grid.iter()
            .zip(&extracted)
            .map(|(&s, &e)| (e - f(s)).abs())
            .fold(0.0, f64::max)
    };
    let err_sin = max_err(&|s: f64| 1.0 - s.sin());
    let gap_half = max_err(&|s: f64| 1.0 - 0.5 * s.sin());
    let monotone = extracted.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let h = FRAC_PI_2 / (resolution - 1) as f64;
    let smooth = extracted
        .windows(3)
        .all(|w| (w[2] - 2.0 * w[1] + w[0]).abs() <= h * h + 1e-10);
    let note = format!(
        "CNOT coupling damps coherences by sin(theta_m), so epsilon = 1 - sin(theta_m) spans [0, 1] \
         (max error {err_sin:.1e}); the stated mapping epsilon = 1 - sin(theta)/2 on [0, 1/2] \
         disagrees by up to {gap_half:.4}"
    );
    Ok(CertificationReport {
        resolution,
        entries,
        cnot: CnotMapping {
            theta_m: grid,
            extracted_epsilon: extracted,
            max_error_vs_one_minus_sin: err_sin,
            max_gap_vs_one_minus_half_sin: gap_half,
            monotone,
            smooth,
            note,
        },
    })
}

/// Input of the `tomo-sim` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoSimConfig {
    pub state: StateSpec,
    pub shots: u64,
    pub seed: u64,
    pub noisy: bool,
    /// Independent repetitions (streams `0..repeats` of `seed`).
    pub repeats: usize,
}

impl Default for TomoSimConfig {
    fn default() -> Self {
        Self {
            state: StateSpec::Preset {
                preset: StatePreset::Plus,
            },
            shots: DEFAULT_SHOTS,
            seed: 0,
            noisy: false,
            repeats: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomoSimReport {
    pub config: TomoSimConfig,
    pub shots_note: String,
    pub true_bloch: [f64; 3],
    /// First repetition.
    pub estimates: PauliEstimates,
    pub reconstructed_bloch: [f64; 3],
    /// Median over repetitions of `max_i |r̂_i − r_i|` for the reconstruction.
    pub median_max_error: f64,
}

pub fn tomo_sim(config: &TomoSimConfig) -> Result<TomoSimReport> {
    if config.repeats == 0 {
        return Err(Error::config("repeats", "need at least one repetition"));
    }
    let rho = config.state.density()?;
    let truth = bloch_vector(&rho)?;
    let noise = config.noisy.then(NoiseModel::device_default);
    let runs = (0..config.repeats)
        .into_par_iter()
        .map(|k| {
            let est = estimate_pauli_with(
                &rho,
                config.shots,
                &mut stream_rng(config.seed, k as u64),
                noise.as_ref(),
            )?;
            let r = bloch_vector(&reconstruct_state(&est))?;
            let err = (0..3).map(|i| (r[i] - truth[i]).abs()).fold(0.0, f64::max);
            Ok((est, r, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut errors: Vec<f64> = runs.iter().map(|r| r.2).collect();
    errors.sort_by(f64::total_cmp);
    let shots_note = if config.shots == DEFAULT_SHOTS {
        format!("{DEFAULT_SHOTS} shots per axis (default; hardware shot count unreported)")
    } else {
        format!("{} shots per axis", config.shots)
    };
    Ok(TomoSimReport {
        config: config.clone(),
        shots_note,
        true_bloch: truth,
        estimates: runs[0].0,
        reconstructed_bloch: runs[0].1,
        median_max_error: median_sorted(&errors),
    })
}

/// Median of an ascending slice.
pub fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const H2_SIN2_PI8: f64 = 0.600_876_036_692_856_2;

    #[test]
    fn presets_validate() {
        for s in [
            Scenario::Fig1,
            Scenario::Fig2,
            Scenario::Fig4a,
            Scenario::Fig4b,
            Scenario::Fig4c,
            Scenario::Custom,
        ] {
            SweepConfig::preset(s).validate().unwrap();
        }
    }

    #[test]
    fn json_overlays_preset() {
        let c = SweepConfig::from_json_str(r#"{"scenario": "fig4b", "seed": 7, "path": "noisy"}"#)
            .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.path, PathKind::Noisy);
        assert_eq!(
            c.state,
            StateSpec::Preset {
                preset: StatePreset::PlusI
            }
        );
        let c = SweepConfig::from_json_str(
            r#"{"state": {"bloch": [0, 0.6, 0]}, "grid": {"kind": "epsilon", "values": [0.5]}}"#,
        )
        .unwrap();
        assert_eq!(c.scenario, Scenario::Custom);
        assert_eq!(c.grid.resolve().unwrap(), vec![0.5]);
    }

    #[test]
    fn config_errors_name_the_field() {
        let field = |text: &str| match SweepConfig::from_json_str(text) {
            Err(Error::InvalidConfig { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(
            field(r#"{"grid": {"kind": "epsilon", "values": [1.5]}}"#),
            "grid.values (epsilon)"
        );
        assert_eq!(field(r#"{"grid": {"values": []}}"#), "grid");
        assert_eq!(field(r#"{"scenario": "fig9"}"#), "scenario");
        assert_eq!(field(r#"{"state": {"bloch": [1, 1, 0]}}"#), "state");
        assert_eq!(field(r#"{"depolarizing": 2}"#), "depolarizing");
        assert_eq!(field(r#"{"bootstrap": 1}"#), "bootstrap");
        let Err(Error::InvalidConfig { message, .. }) =
            SweepConfig::from_json_str(r#"{"shotz": 3}"#)
        else {
            panic!("unknown field accepted");
        };
        assert!(message.contains("shotz"));
    }

    #[test]
    fn even_grid_hits_both_ends() {
        let g = GridSpec::even(GridKind::ThetaM, 33).resolve().unwrap();
        assert_eq!(g.len(), 33);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[32], FRAC_PI_2);
        assert_eq!(
            GridSpec::even(GridKind::Epsilon, 1).resolve().unwrap(),
            vec![0.0]
        );
    }

    #[test]
    fn full_monitoring_costs_one_bit() {
        for theta in [0.3, 1.0, FRAC_PI_2, 2.5] {
            let mut c = SweepConfig::preset(Scenario::Fig1);
            c.probe.theta = theta;
            c.grid = GridSpec::values(GridKind::Epsilon, vec![1.0]);
            let r = &run_sweep(&c).unwrap()[0];
            assert!((r.delta_r_x - 1.0).abs() < 1e-12);
            if theta == FRAC_PI_2 {
                assert!(r.delta_r_xprime.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tilted_endpoint_matches_closed_form() {
        let mut c = SweepConfig::preset(Scenario::Fig2);
        c.grid = GridSpec::values(GridKind::Epsilon, vec![1.0]);
        let r = &run_sweep(&c).unwrap()[0];
        assert!((r.delta_r_x - H2_SIN2_PI8).abs() < 1e-10);
        assert!((r.delta_r_xprime - 0.789_597_912_233_723_4).abs() < 1e-10);
    }

    #[test]
    fn theta_sweep_orderings_hold_analytically() {
        for r in run_sweep(&SweepConfig::preset(Scenario::Fig4b)).unwrap() {
            assert!((r.delta_r_x - r.delta_r_xprime).abs() < 1e-10);
            assert_eq!(r.case, CaseLabel::TripleMu);
        }
        for r in run_sweep(&SweepConfig::preset(Scenario::Fig4c)).unwrap() {
            assert!(r.delta_r_xprime >= r.delta_r_x - 1e-10);
        }
        for r in run_sweep(&SweepConfig::preset(Scenario::Fig4a)).unwrap() {
            assert!(r.delta_r_xprime.abs() < 1e-10);
            assert_eq!(r.case, CaseLabel::XprimeDiagonal);
        }
    }

    #[test]
    fn exact_circuit_path_matches_analytic() {
        for scenario in [Scenario::Fig4a, Scenario::Fig4b, Scenario::Fig4c] {
            for coupling in [Coupling::Cz, Coupling::Cnot] {
                let mut c = SweepConfig::preset(scenario);
                c.coupling = coupling;
                c.grid = GridSpec::even(GridKind::ThetaM, 9);
                let analytic = run_sweep(&c).unwrap();
                c.path = PathKind::Circuit;
                c.shots = 0;
                let circuit = run_sweep(&c).unwrap();
                for (a, b) in analytic.iter().zip(&circuit) {
                    assert_eq!(a.epsilon, b.epsilon);
                    assert!((a.delta_r_x - b.delta_r_x).abs() < 1e-9);
                    assert!((a.delta_r_xprime - b.delta_r_xprime).abs() < 1e-9);
                    assert!(b.se_delta_r_x.is_none());
                }
            }
        }
    }

    #[test]
    fn shot_path_is_deterministic_with_errors() {
        let mut c = SweepConfig::preset(Scenario::Fig4a);
        c.path = PathKind::Noisy;
        c.grid = GridSpec::even(GridKind::ThetaM, 5);
        c.bootstrap = 20;
        let a = run_sweep(&c).unwrap();
        let b = run_sweep(&c).unwrap();
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|r| r.se_delta_r_x.unwrap() >= 0.0 && r.se_delta_r_xprime.is_some()));
        c.seed = 1;
        assert_ne!(a, run_sweep(&c).unwrap());
    }

    #[test]
    fn epsilon_grid_maps_back_to_strength() {
        let mut c = SweepConfig::preset(Scenario::Fig1);
        c.coupling = Coupling::Cnot;
        c.grid = GridSpec::values(GridKind::Epsilon, vec![0.0, 0.5, 1.0]);
        let r = run_sweep(&c).unwrap();
        assert!((r[0].theta_m - FRAC_PI_2).abs() < 1e-15);
        assert!((r[1].theta_m - PI / 6.0).abs() < 1e-12);
        assert_eq!(r[2].theta_m, 0.0);
    }

    #[test]
    fn verify_cases_small_runs_clean() {
        for dim in [2, 3, 4] {
            let report = verify_cases(3, 40, dim).unwrap();
            assert!(report.passed(), "{report:#?}");
            assert_eq!(report.check("case_v_equal").is_some(), dim != 4);
        }
        assert!(verify_cases(0, 0, 2).is_err());
    }

    #[test]
    fn certification_small_grid() {
        let report = certify_circuits(5).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert!(report.cnot.max_gap_vs_one_minus_half_sin > 0.4);
        assert!(certify_circuits(1).is_err());
    }

    #[test]
    fn tomo_sim_reports_default_shots() {
        let r = tomo_sim(&TomoSimConfig::default()).unwrap();
        assert!(r.shots_note.contains("8192"));
        assert!(r.median_max_error < 0.05);
        let noisy = tomo_sim(&TomoSimConfig {
            state: StateSpec::Preset {
                preset: StatePreset::Zero,
            },
            shots: 0,
            noisy: true,
            ..TomoSimConfig::default()
        })
        .unwrap();
        assert!((noisy.estimates.means[2] - 0.9584).abs() < 1e-12);
    }
}
