//! Reality and irreality of quantum observables under weak non-revealed
//! measurements ("monitoring"), with a density-matrix simulator for the
//! ancilla dilation circuits that implement them.
//!
//! Entropies are in bits throughout.

pub mod channels;
pub mod circuit;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod observables;
pub mod output;
pub mod reality;
pub mod sampling;
pub mod state;
pub mod tomography;

pub use channels::{
    channels_equal, compose, dephase, monitor, to_superoperator, Channel, MonitoringChannel,
    Superoperator,
};
pub use circuit::{build_monitor_circuit, extract_channel, Circuit, Coupling, Gate, NoiseModel};
pub use error::{Error, Result};
pub use experiments::{
    certify_circuits, run_sweep, tomo_sim, verify_cases, PathKind, Scenario, SweepConfig,
    SweepMetadata, SweepRecord,
};
pub use linalg::{hermitian_eig, partial_trace, tensor_product, ComplexMatrix, HermitianEig, C64};
pub use observables::{commutes, is_mutually_unbiased, ProjectiveObservable};
pub use reality::{
    classify_case, delta_reality_monitored, delta_reality_other, irreality, reality,
    reality_report, scenario1_closed_form, scenario2_closed_form, CaseLabel, Entropies,
    RealityReport,
};
pub use state::{bloch_vector, von_neumann_entropy, DensityOperator, PureState};
pub use tomography::{estimate_pauli, reconstruct_state, PauliEstimates};
