//! Steady-state coherence of uncoupled qubits collectively coupled to a
//! bosonic bath.
//!
//! The crate is organised bottom-up:
//!
//! * [`qubits`] builds the register operators (`H_s`, the collective Lindblad
//!   operator) and the l1-norm coherence functional.
//! * [`bath`] holds the Ornstein-Uhlenbeck correlation functions for a thermal
//!   bath and a two-mode squeezed bath.
//! * [`dynamics`] integrates the noise-averaged non-Markovian master equation
//!   together with its memory operators, or the Markovian Lindblad limit.
//! * [`analysis`] turns coherence trajectories into steady-state values, finds
//!   peaks across parameter sweeps and provides the analytic Markovian steady
//!   state for two qubits.
//!
//! Units: `hbar = k_B = 1`; frequencies are measured in units of the qubit
//! reference frequency.

pub mod analysis;
pub mod bath;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod qubits;

pub use analysis::{
    detect_steady_state, find_peak, find_peak_with_tolerance, markov_steady_state_analytic,
    markov_steady_state_for, Peak, SteadyStateResult, SweepPoint, SweepResult,
};
pub use bath::{
    alpha_thermal, eta_thermal, spectral_density, squeezed_correlations, BathParams,
    CorrelationKind, CorrelationSet, SqueezeParams,
};
pub use dynamics::{
    propagate, rhs_lindblad, rhs_nonmarkovian_squeezed, rhs_nonmarkovian_thermal, Hygiene,
    IntegratorConfig, MemoryOperators, PropagationState, Regime, Sample, Scheme,
    StabilityPolicy, Trajectory,
};
pub use error::{Error, Result};
pub use qubits::{
    build_hamiltonian, build_lindblad, l1_coherence, Channel, DensityMatrix, OperatorMatrix,
    SystemSpec,
};

pub use num_complex::Complex64 as C64;
