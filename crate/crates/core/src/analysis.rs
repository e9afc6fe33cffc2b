//! Steady-state extraction, sweep peaks and the analytic two-qubit Markovian
//! steady state.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::qubits::{l1_coherence, Channel, DensityMatrix, SystemSpec};

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_WINDOW: f64 = 20.0;
/// Denominator floor so that a vanishing steady coherence does not blow up
/// the relative residual.
pub const COHERENCE_FLOOR: f64 = 1e-6;
/// Values this close to the maximum are treated as ties by [`find_peak`].
pub const PEAK_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub ssqc: f64,
    /// Start of the trailing run of samples that stay within tolerance of
    /// the final value.
    pub t_converged: f64,
    pub converged: bool,
    /// Max relative deviation of C from its final value over the window.
    pub residual: f64,
    pub final_rho: DensityMatrix,
}

/// Decide whether the coherence has settled over the trailing `window`.
///
/// Converged iff `max |C(t) - C(t_end)| / max(C(t_end), 1e-6) ≤ tol` over
/// `t ≥ t_end - window`. Uses the windowed maximum rather than a derivative
/// so that oscillation turning points cannot fake a plateau.
pub fn detect_steady_state(traj: &Trajectory, tol: f64, window: f64) -> Result<SteadyStateResult> {
    if !(window > 0.0 && tol >= 0.0) {
        return Err(Error::Unsupported(format!(
            "steady-state detection needs window > 0 and tol >= 0, got window {window}, tol {tol}"
        )));
    }
    let span = traj.span();
    if traj.samples.len() < 2 || span < 2.0 * window {
        return Err(Error::TrajectoryTooShort {
            span,
            required: 2.0 * window,
        });
    }
    let last = traj.samples.last().unwrap();
    let c_end = last.coherence;
    let scale = c_end.max(COHERENCE_FLOOR);
    let t_start = last.t - window;

    let residual = traj
        .samples
        .iter()
        .filter(|s| s.t >= t_start - 1e-9)
        .map(|s| (s.coherence - c_end).abs() / scale)
        .fold(0.0_f64, f64::max);

    let mut t_converged = last.t;
    for s in traj.samples.iter().rev() {
        if (s.coherence - c_end).abs() / scale > tol {
            break;
        }
        t_converged = s.t;
    }

    Ok(SteadyStateResult {
        ssqc: l1_coherence(&last.rho),
        t_converged,
        converged: residual <= tol,
        residual,
        final_rho: last.rho.clone(),
    })
}

/// Closed-form steady state of the two-qubit Lindblad limit with
/// `L = σx₁ + σx₂`.
///
/// Degenerate qubits relax to one third of the symmetric (triplet)
/// projector; detuned qubits relax to `I/4`. The rate `ΓT/2` drops out.
pub fn markov_steady_state_analytic(omega1: f64, omega2: f64) -> DensityMatrix {
    let c = |x: f64| C64::new(x, 0.0);
    let mut a = Array2::<C64>::zeros((4, 4));
    if omega1 == omega2 {
        let third = 1.0 / 3.0;
        let sixth = 1.0 / 6.0;
        a[[0, 0]] = c(third);
        a[[3, 3]] = c(third);
        for (i, j) in [(1, 1), (2, 2), (1, 2), (2, 1)] {
            a[[i, j]] = c(sixth);
        }
    } else {
        for i in 0..4 {
            a[[i, i]] = c(0.25);
        }
    }
    DensityMatrix::new(a).expect("analytic steady state is a valid density matrix")
}

/// [`markov_steady_state_analytic`] for a full system description; rejects
/// anything other than two qubits coupled through `σx`.
pub fn markov_steady_state_for(spec: &SystemSpec) -> Result<DensityMatrix> {
    if spec.n_qubits() != 2 {
        return Err(Error::Unsupported(format!(
            "analytic Markovian steady state is known for 2 qubits, not {}",
            spec.n_qubits()
        )));
    }
    if spec.channel() != Channel::SigmaX {
        return Err(Error::Unsupported(format!(
            "analytic Markovian steady state needs the sigma_x channel, not {}",
            spec.channel()
        )));
    }
    Ok(markov_steady_state_analytic(spec.omegas()[0], spec.omegas()[1]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub ssqc: f64,
    pub converged: bool,
    pub t_converged: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_name: String,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Checks equal lengths and a strictly increasing axis.
    pub fn new(axis_name: impl Into<String>, points: Vec<SweepPoint>) -> Result<Self> {
        if let Some(w) = points
            .windows(2)
            .find(|w| !(w[1].axis_value > w[0].axis_value))
        {
            return Err(Error::InvalidSweep(format!(
                "axis is not strictly increasing at {} -> {}",
                w[0].axis_value, w[1].axis_value
            )));
        }
        Ok(Self {
            axis_name: axis_name.into(),
            points,
        })
    }

    /// Convenience constructor for converged points with no residual.
    pub fn from_values(axis_name: impl Into<String>, axis: &[f64], ssqc: &[f64]) -> Result<Self> {
        if axis.len() != ssqc.len() {
            return Err(Error::InvalidSweep(format!(
                "{} axis values but {} ssqc values",
                axis.len(),
                ssqc.len()
            )));
        }
        let points = axis
            .iter()
            .zip(ssqc)
            .map(|(&axis_value, &ssqc)| SweepPoint {
                axis_value,
                ssqc,
                converged: true,
                t_converged: 0.0,
                residual: 0.0,
            })
            .collect();
        Self::new(axis_name, points)
    }

    pub fn axis_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.axis_value).collect()
    }

    pub fn ssqc_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ssqc).collect()
    }

    pub fn converged_flags(&self) -> Vec<bool> {
        self.points.iter().map(|p| p.converged).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub axis_value: f64,
    pub ssqc: f64,
    pub is_interior: bool,
    /// Another point lay within the tie tolerance of the maximum.
    pub tied: bool,
}

/// Argmax of the sweep with ties (within [`PEAK_TIE_TOL`]) resolved toward
/// the smaller axis value.
pub fn find_peak(sweep: &SweepResult) -> Result<Peak> {
    find_peak_with_tolerance(sweep, PEAK_TIE_TOL)
}

/// As [`find_peak`], treating values within `tie_tol` of the maximum as equal.
/// A peak is interior only if it beats both neighbours by more than `tie_tol`.
pub fn find_peak_with_tolerance(sweep: &SweepResult, tie_tol: f64) -> Result<Peak> {
    let values = sweep.ssqc_values();
    if values.len() < 3 {
        return Err(Error::TooFewPoints {
            found: values.len(),
            required: 3,
        });
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let index = values.iter().position(|&v| v >= max - tie_tol).unwrap();
    let best = values[index];
    let tied = values
        .iter()
        .enumerate()
        .any(|(i, &v)| i != index && v >= max - tie_tol);
    let is_interior = index > 0
        && index + 1 < values.len()
        && best > values[index - 1] + tie_tol
        && best > values[index + 1] + tie_tol;
    Ok(Peak {
        index,
        axis_value: sweep.points[index].axis_value,
        ssqc: best,
        is_interior,
        tied,
    })
}
