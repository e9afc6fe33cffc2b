//! Register operators for `N` uncoupled qubits and the l1-norm coherence.
//!
//! Basis convention: big-endian tensor product, qubit 1 is the most
//! significant bit, `|e>` is bit value 0 and `|g>` bit value 1, with
//! `sigma_z |e> = +|e>`. For two qubits the basis order is
//! `|ee>, |eg>, |ge>, |gg>`.

use std::fmt;

use ndarray::{array, linalg::kron, Array2, ArrayView2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, ONE, ZERO};

/// Largest register the builders accept unless a different cap is passed.
pub const DEFAULT_MAX_QUBITS: usize = 12;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const NEGATIVITY_TOL: f64 = 1e-8;

/// The single-qubit operator summed over the register to form `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    SigmaX,
    SigmaZ,
    SigmaMinus,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::SigmaX => "sigma_x",
            Channel::SigmaZ => "sigma_z",
            Channel::SigmaMinus => "sigma_minus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sigma_x" => Some(Channel::SigmaX),
            "sigma_z" => Some(Channel::SigmaZ),
            "sigma_minus" => Some(Channel::SigmaMinus),
            _ => None,
        }
    }

    fn single_qubit(self) -> Array2<C64> {
        match self {
            Channel::SigmaX => sigma_x(),
            Channel::SigmaZ => sigma_z(),
            Channel::SigmaMinus => sigma_minus(),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn sigma_x() -> Array2<C64> {
    array![[ZERO, ONE], [ONE, ZERO]]
}

pub fn sigma_z() -> Array2<C64> {
    array![[ONE, ZERO], [ZERO, -ONE]]
}

/// Lowering operator, `|e> -> |g>`.
pub fn sigma_minus() -> Array2<C64> {
    array![[ZERO, ZERO], [ONE, ZERO]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    n_qubits: usize,
    omegas: Vec<f64>,
    channel: Channel,
}

impl SystemSpec {
    pub fn new(n_qubits: usize, omegas: Vec<f64>, channel: Channel) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidSystem("n_qubits must be at least 1".into()));
        }
        if omegas.len() != n_qubits {
            return Err(Error::InvalidSystem(format!(
                "expected {n_qubits} frequencies, got {}",
                omegas.len()
            )));
        }
        if let Some(w) = omegas.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidSystem(format!("frequency {w} is not finite")));
        }
        Ok(Self {
            n_qubits,
            omegas,
            channel,
        })
    }

    /// All qubits at the same frequency.
    pub fn uniform(n_qubits: usize, omega: f64, channel: Channel) -> Result<Self> {
        Self::new(n_qubits, vec![omega; n_qubits], channel)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    /// Hilbert-space dimension `2^N`. Only meaningful below the qubit cap.
    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn max_abs_omega(&self) -> f64 {
        self.omegas.iter().fold(0.0_f64, |m, w| m.max(w.abs()))
    }

    fn check_cap(&self, max_qubits: usize) -> Result<()> {
        if self.n_qubits > max_qubits {
            return Err(Error::DimensionOverflow {
                n_qubits: self.n_qubits,
                max: max_qubits,
            });
        }
        Ok(())
    }
}

/// Square complex matrix acting on the register.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(Array2<C64>);

impl OperatorMatrix {
    pub fn from_array(a: Array2<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                what: "operator columns",
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        Ok(Self(a))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Array2::zeros((dim, dim)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn view(&self) -> ArrayView2<'_, C64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<C64> {
        self.0
    }

    pub fn dagger(&self) -> Self {
        Self(linalg::dagger(&self.0.view()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermiticity_error(&self.0.view()) <= tol
    }
}

/// A validated system state: square, Hermitian, unit trace, non-negative
/// populations (within the module tolerances).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Array2<C64>);

impl DensityMatrix {
    pub fn new(a: Array2<C64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidDensityMatrix(format!(
                "not square ({}x{})",
                a.nrows(),
                a.ncols()
            )));
        }
        if !a.nrows().is_power_of_two() {
            return Err(Error::InvalidDensityMatrix(format!(
                "dimension {} is not a power of two",
                a.nrows()
            )));
        }
        if !linalg::all_finite(&a.view()) {
            return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
        }
        let herm = linalg::hermiticity_error(&a.view());
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max |rho - rho^dagger| = {herm:e})"
            )));
        }
        let tr = linalg::trace(&a.view());
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, not 1")));
        }
        if let Some(p) = a.diag().iter().find(|p| p.re < -NEGATIVITY_TOL) {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative population {}",
                p.re
            )));
        }
        Ok(Self(a))
    }

    /// Skips validation; the caller guarantees the invariants.
    pub(crate) fn from_array_unchecked(a: Array2<C64>) -> Self {
        Self(a)
    }

    /// Computational-basis projector for a string over `{e, g}`, qubit 1
    /// first. `"gg"` is the two-qubit ground state.
    pub fn basis_state(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if n == 0 {
            return Err(Error::InvalidDensityMatrix("empty basis label".into()));
        }
        if n > DEFAULT_MAX_QUBITS {
            return Err(Error::DimensionOverflow {
                n_qubits: n,
                max: DEFAULT_MAX_QUBITS,
            });
        }
        let mut index = 0usize;
        for c in label.chars() {
            let bit = match c {
                'e' => 0,
                'g' => 1,
                other => {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "basis label {label:?} contains {other:?}, expected only 'e' or 'g'"
                    )))
                }
            };
            index = (index << 1) | bit;
        }
        let dim = 1usize << n;
        let mut a = Array2::zeros((dim, dim));
        a[[index, index]] = ONE;
        Ok(Self(a))
    }

    /// `|g>^N`.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        Self::basis_state(&"g".repeat(n_qubits))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > DEFAULT_MAX_QUBITS {
            return Err(Error::InvalidSystem(format!(
                "cannot build a mixed state on {n_qubits} qubits"
            )));
        }
        let dim = 1usize << n_qubits;
        Ok(Self(Array2::eye(dim) / C64::from(dim as f64)))
    }

    /// `|psi><psi|` after normalising `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensityMatrix("state vector has zero norm".into()));
        }
        let dim = psi.len();
        let a = Array2::from_shape_fn((dim, dim), |(i, j)| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(a)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.0.nrows().trailing_zeros() as usize
    }

    pub fn view(&self) -> ArrayView2<'_, C64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[[i, j]]
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.0.view())
    }

    pub fn dagger(&self) -> Self {
        Self(linalg::dagger(&self.0.view()))
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.0.view(), &other.0.view())
    }
}

/// `sum_i omega_i sigma_z^(i)` with the default qubit cap.
pub fn build_hamiltonian(spec: &SystemSpec) -> Result<OperatorMatrix> {
    build_hamiltonian_capped(spec, DEFAULT_MAX_QUBITS)
}

pub fn build_hamiltonian_capped(spec: &SystemSpec, max_qubits: usize) -> Result<OperatorMatrix> {
    spec.check_cap(max_qubits)?;
    let dim = spec.dim();
    let n = spec.n_qubits();
    // Diagonal: qubit i contributes +omega_i when its bit is 0 (|e>).
    let mut h = Array2::zeros((dim, dim));
    for k in 0..dim {
        let energy: f64 = spec
            .omegas()
            .iter()
            .enumerate()
            .map(|(i, w)| if (k >> (n - 1 - i)) & 1 == 0 { *w } else { -*w })
            .sum();
        h[[k, k]] = C64::from(energy);
    }
    Ok(OperatorMatrix(h))
}

/// Collective coupling operator `sum_i O_i` for the spec's channel.
pub fn build_lindblad(spec: &SystemSpec) -> Result<OperatorMatrix> {
    build_lindblad_capped(spec, DEFAULT_MAX_QUBITS)
}

pub fn build_lindblad_capped(spec: &SystemSpec, max_qubits: usize) -> Result<OperatorMatrix> {
    spec.check_cap(max_qubits)?;
    let single = spec.channel().single_qubit();
    let n = spec.n_qubits();
    let mut total = Array2::zeros((spec.dim(), spec.dim()));
    for slot in 0..n {
        total += &embed(&single, slot, n);
    }
    Ok(OperatorMatrix(total))
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at `slot` (0-based, most significant first).
pub fn embed(op: &Array2<C64>, slot: usize, n_qubits: usize) -> Array2<C64> {
    let eye = Array2::<C64>::eye(2);
    let mut acc = Array2::<C64>::eye(1);
    for i in 0..n_qubits {
        acc = if i == slot {
            kron(&acc, op)
        } else {
            kron(&acc, &eye)
        };
    }
    acc
}

/// l1-norm coherence `sum_{i != j} |rho_ij|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    offdiag_l1(&rho.view())
}

pub(crate) fn offdiag_l1(a: &ArrayView2<C64>) -> f64 {
    a.indexed_iter()
        .filter(|((i, j), _)| i != j)
        .map(|(_, z)| z.norm())
        .sum()
}
