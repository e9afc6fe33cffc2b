//! Bath correlation functions in Ornstein-Uhlenbeck form.
//!
//! A thermal bath (initial vacuum-referenced thermal state) is described by
//! the pair `alpha`, `eta`; a symmetric two-mode squeezed bath splits each of
//! them into two pieces, `alpha = alpha_1 + alpha_2` and `eta = eta_1 + eta_2`.
//! The squeezed pieces carry explicit `e^{±2 i omega_0 s}` factors and are
//! therefore not stationary.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Coupling strength `Γ`, bandwidth `γ` (memory time `1/γ`), temperature `T`
/// and spectral centre `ω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    coupling: f64,
    bandwidth: f64,
    temperature: f64,
    omega0: f64,
}

impl BathParams {
    pub fn new(coupling: f64, bandwidth: f64, temperature: f64, omega0: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if !(coupling.is_finite() && coupling >= 0.0) {
            problems.push(format!("coupling Gamma must be finite and >= 0, got {coupling}"));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            problems.push(format!("bandwidth gamma must be finite and > 0, got {bandwidth}"));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            problems.push(format!("temperature T must be finite and >= 0, got {temperature}"));
        }
        if !omega0.is_finite() {
            problems.push(format!("omega0 must be finite, got {omega0}"));
        }
        if !problems.is_empty() {
            return Err(Error::InvalidBath(problems.join("; ")));
        }
        Ok(Self {
            coupling,
            bandwidth,
            temperature,
            omega0,
        })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `Γ T / 2`, the Markovian dissipator rate.
    pub fn markov_rate(&self) -> f64 {
        0.5 * self.coupling * self.temperature
    }

    /// `i ω₀ + γ`.
    fn decay(&self) -> C64 {
        C64::new(self.bandwidth, self.omega0)
    }

    /// `-i ω₀ + γ`.
    fn decay_conj(&self) -> C64 {
        C64::new(self.bandwidth, -self.omega0)
    }
}

/// Squeezing strength `r` and direction `θ` of the two-mode squeezed bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    r: f64,
    theta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if !(r.is_finite() && r >= 0.0) {
            problems.push(format!("strength r must be finite and >= 0, got {r}"));
        }
        if !(theta.is_finite() && (0.0..TAU).contains(&theta)) {
            problems.push(format!("direction theta must lie in [0, 2pi), got {theta}"));
        }
        if !problems.is_empty() {
            return Err(Error::InvalidSqueeze(problems.join("; ")));
        }
        Ok(Self { r, theta })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `u = cosh r`.
    pub fn u(&self) -> f64 {
        self.r.cosh()
    }

    /// `w = sinh r`.
    pub fn w(&self) -> f64 {
        self.r.sinh()
    }

    /// `v = sinh r · e^{iθ}`.
    pub fn v(&self) -> C64 {
        C64::from_polar(self.w(), self.theta)
    }
}

/// Thermal `alpha(t, s) = (Γγ/2)(T + ω₀ - iγ) e^{-(iω₀+γ)|t-s|}`.
pub fn alpha_thermal(t: f64, s: f64, p: &BathParams) -> C64 {
    alpha_prefactor(p, p.omega0) * (-p.decay() * (t - s).abs()).exp()
}

/// Thermal `eta(t, s) = (ΓTγ/2) e^{-(-iω₀+γ)|t-s|}`.
pub fn eta_thermal(t: f64, s: f64, p: &BathParams) -> C64 {
    eta_prefactor(p) * (-p.decay_conj() * (t - s).abs()).exp()
}

/// `(Γγ/2)(T + shift - iγ)`.
fn alpha_prefactor(p: &BathParams, shift: f64) -> C64 {
    0.5 * p.coupling * p.bandwidth * C64::new(p.temperature + shift, -p.bandwidth)
}

fn eta_prefactor(p: &BathParams) -> C64 {
    C64::from(0.5 * p.coupling * p.temperature * p.bandwidth)
}

/// Ohmic spectral density with a Lorentz-Drude cutoff,
/// `J(ω) = (Γ/π) ω γ² / (γ² + (ω₀ - ω)²)`.
///
/// Only used for validation and reporting; propagation never integrates it.
/// Negative frequencies carry no modes and return 0.
pub fn spectral_density(omega: f64, p: &BathParams) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let g2 = p.bandwidth * p.bandwidth;
    let detuning = p.omega0 - omega;
    p.coupling / PI * omega * g2 / (g2 + detuning * detuning)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationKind {
    Thermal,
    Squeezed,
}

impl CorrelationKind {
    pub fn name(self) -> &'static str {
        match self {
            CorrelationKind::Thermal => "thermal",
            CorrelationKind::Squeezed => "squeezed",
        }
    }
}

/// The full family of correlation functions for one bath preparation.
///
/// For a thermal set `alpha1`/`eta1` are the thermal pair and
/// `alpha2`/`eta2` vanish, so both kinds answer the same queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationSet {
    Thermal(BathParams),
    Squeezed(BathParams, SqueezeParams),
}

/// Squeezed-bath correlations `alpha_{1,2}`, `eta_{1,2}`.
pub fn squeezed_correlations(p: &BathParams, q: &SqueezeParams) -> CorrelationSet {
    CorrelationSet::Squeezed(*p, *q)
}

impl CorrelationSet {
    pub fn thermal(p: &BathParams) -> Self {
        CorrelationSet::Thermal(*p)
    }

    pub fn kind(&self) -> CorrelationKind {
        match self {
            CorrelationSet::Thermal(_) => CorrelationKind::Thermal,
            CorrelationSet::Squeezed(..) => CorrelationKind::Squeezed,
        }
    }

    pub fn bath(&self) -> &BathParams {
        match self {
            CorrelationSet::Thermal(p) | CorrelationSet::Squeezed(p, _) => p,
        }
    }

    pub fn alpha1(&self, t: f64, s: f64) -> C64 {
        match self {
            CorrelationSet::Thermal(p) => alpha_thermal(t, s, p),
            CorrelationSet::Squeezed(p, q) => {
                let (u, v) = (q.u(), q.v());
                let phase = C64::from_polar(1.0, -2.0 * p.omega0 * s);
                alpha_prefactor(p, p.omega0)
                    * (u * u - v * u * phase)
                    * (-p.decay() * (t - s).abs()).exp()
            }
        }
    }

    pub fn alpha2(&self, t: f64, s: f64) -> C64 {
        match self {
            CorrelationSet::Thermal(_) => C64::new(0.0, 0.0),
            CorrelationSet::Squeezed(p, q) => {
                let (u, v) = (q.u(), q.v());
                let phase = C64::from_polar(1.0, 2.0 * p.omega0 * s);
                // (T - ω₀ - iγ) here, against (T + ω₀ - iγ) in alpha1.
                alpha_prefactor(p, -p.omega0)
                    * (v.norm_sqr() - v.conj() * u * phase)
                    * (-p.decay_conj() * (t - s).abs()).exp()
            }
        }
    }

    pub fn eta1(&self, t: f64, s: f64) -> C64 {
        match self {
            CorrelationSet::Thermal(p) => eta_thermal(t, s, p),
            CorrelationSet::Squeezed(p, q) => {
                let (u, v) = (q.u(), q.v());
                let phase = C64::from_polar(1.0, 2.0 * p.omega0 * s);
                eta_prefactor(p)
                    * (u * u - v * u * phase)
                    * (-p.decay_conj() * (t - s).abs()).exp()
            }
        }
    }

    pub fn eta2(&self, t: f64, s: f64) -> C64 {
        match self {
            CorrelationSet::Thermal(_) => C64::new(0.0, 0.0),
            CorrelationSet::Squeezed(p, q) => {
                let (u, v) = (q.u(), q.v());
                let phase = C64::from_polar(1.0, -2.0 * p.omega0 * s);
                eta_prefactor(p)
                    * (v.norm_sqr() - v.conj() * u * phase)
                    * (-p.decay() * (t - s).abs()).exp()
            }
        }
    }

    /// `alpha = alpha1 + alpha2`.
    pub fn alpha(&self, t: f64, s: f64) -> C64 {
        self.alpha1(t, s) + self.alpha2(t, s)
    }

    /// `eta = eta1 + eta2`.
    pub fn eta(&self, t: f64, s: f64) -> C64 {
        self.eta1(t, s) + self.eta2(t, s)
    }
}
