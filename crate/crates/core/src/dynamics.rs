//! Time evolution of the system density matrix.
//!
//! Two regimes are supported:
//!
//! * **Non-Markovian**: the noise-averaged master equation
//!
//!   ```text
//!   dρ/dt = -i[H, ρ] + [L, ρ Ō†] - [L†, Ō ρ] + [L†, ρ Q̄†] - [L, Q̄ ρ]
//!   ```
//!
//!   coupled to the memory operators. For a thermal bath there are two,
//!
//!   ```text
//!   dŌ/dt = α(0,0) L  - (iω₀ + γ) Ō - [A, Ō]
//!   dQ̄/dt = η(0,0) L† + (iω₀ - γ) Q̄ - [A, Q̄]
//!   A     = iH + L† Ō + L Q̄
//!   ```
//!
//!   and for a squeezed bath four (`Ō = Ō₁ + Ō₂`, `Q̄ = Q̄₁ + Q̄₂`), each
//!   with its own source coefficient and decay, see [`memory_channels`].
//!
//! * **Markovian**: the Lindblad limit with rate `ΓT/2` on both the `L` and
//!   `L†` dissipators.
//!
//! Everything is integrated as one stacked autonomous system with fixed-step
//! RK4. After every step ρ is symmetrised and renormalised; the size of that
//! repair is recorded in [`Hygiene`].

use std::fmt;

use log::{debug, trace, warn};
use ndarray::{Array2, Zip};
use num_complex::Complex64 as C64;

use crate::bath::{squeezed_correlations, BathParams, CorrelationKind, CorrelationSet, SqueezeParams};
use crate::error::{Error, Result};
use crate::linalg::{self, add_commutator, add_product, gemm, I, ONE, ZERO};
use crate::qubits::{
    build_hamiltonian, build_lindblad, offdiag_l1, DensityMatrix, OperatorMatrix, SystemSpec,
};

/// Upper bound on `dt·γ` and `dt·max|ω_i|`.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Repairs larger than this are counted and logged.
pub const REPAIR_LOG_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    NonMarkovian,
    Markovian,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::NonMarkovian => "nonmarkovian",
            Regime::Markovian => "markovian",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "nonmarkovian" => Some(Regime::NonMarkovian),
            "markovian" => Some(Regime::Markovian),
            _ => None,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    #[default]
    Rk4,
}

/// What to do when the step size fails the stability guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StabilityPolicy {
    #[default]
    Reject,
    Warn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_max: f64,
    pub sample_every: usize,
    pub scheme: Scheme,
    pub stability: StabilityPolicy,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_max: 200.0,
            sample_every: 10,
            scheme: Scheme::Rk4,
            stability: StabilityPolicy::Reject,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            problems.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            problems.push(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.sample_every == 0 {
            problems.push("sample_every must be at least 1".to_string());
        }
        if problems.is_empty() && self.t_max < self.dt {
            problems.push(format!("t_max {} is shorter than one step {}", self.t_max, self.dt));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidIntegrator(problems.join("; ")))
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    /// Violations of `dt·γ ≤ 0.1` (non-Markovian only, γ has no role in the
    /// Lindblad limit) and `dt·max|ω_i| ≤ 0.1`.
    pub fn stability_violations(
        &self,
        spec: &SystemSpec,
        bath: &BathParams,
        regime: Regime,
    ) -> Vec<String> {
        let mut out = Vec::new();
        if regime == Regime::NonMarkovian && self.dt * bath.bandwidth() > STABILITY_LIMIT {
            out.push(format!(
                "dt*gamma = {} exceeds {STABILITY_LIMIT}",
                self.dt * bath.bandwidth()
            ));
        }
        let w = spec.max_abs_omega();
        if self.dt * w > STABILITY_LIMIT {
            out.push(format!("dt*max|omega| = {} exceeds {STABILITY_LIMIT}", self.dt * w));
        }
        out
    }
}

/// The memory operators `Ō, Q̄` (thermal) or `Ō₁, Ō₂, Q̄₁, Q̄₂` (squeezed).
#[derive(Debug, Clone, PartialEq)]
pub enum MemoryOperators {
    Thermal {
        o: OperatorMatrix,
        q: OperatorMatrix,
    },
    Squeezed {
        o1: OperatorMatrix,
        o2: OperatorMatrix,
        q1: OperatorMatrix,
        q2: OperatorMatrix,
    },
}

impl MemoryOperators {
    /// All operators vanish at `t = 0`.
    pub fn zeros(kind: CorrelationKind, dim: usize) -> Self {
        let z = || OperatorMatrix::zeros(dim);
        match kind {
            CorrelationKind::Thermal => MemoryOperators::Thermal { o: z(), q: z() },
            CorrelationKind::Squeezed => MemoryOperators::Squeezed {
                o1: z(),
                o2: z(),
                q1: z(),
                q2: z(),
            },
        }
    }

    pub fn kind(&self) -> CorrelationKind {
        match self {
            MemoryOperators::Thermal { .. } => CorrelationKind::Thermal,
            MemoryOperators::Squeezed { .. } => CorrelationKind::Squeezed,
        }
    }

    /// In channel order: `[Ō, Q̄]` or `[Ō₁, Ō₂, Q̄₁, Q̄₂]`.
    pub fn operators(&self) -> Vec<&OperatorMatrix> {
        match self {
            MemoryOperators::Thermal { o, q } => vec![o, q],
            MemoryOperators::Squeezed { o1, o2, q1, q2 } => vec![o1, o2, q1, q2],
        }
    }

    fn from_operators(kind: CorrelationKind, mut ops: Vec<OperatorMatrix>) -> Self {
        match kind {
            CorrelationKind::Thermal => {
                let q = ops.pop().unwrap();
                let o = ops.pop().unwrap();
                MemoryOperators::Thermal { o, q }
            }
            CorrelationKind::Squeezed => {
                let q2 = ops.pop().unwrap();
                let q1 = ops.pop().unwrap();
                let o2 = ops.pop().unwrap();
                let o1 = ops.pop().unwrap();
                MemoryOperators::Squeezed { o1, o2, q1, q2 }
            }
        }
    }

    /// `Ō` (summed over components).
    pub fn o_total(&self) -> OperatorMatrix {
        match self {
            MemoryOperators::Thermal { o, .. } => o.clone(),
            MemoryOperators::Squeezed { o1, o2, .. } => {
                OperatorMatrix::from_array(o1.as_array() + o2.as_array()).unwrap()
            }
        }
    }

    /// `Q̄` (summed over components).
    pub fn q_total(&self) -> OperatorMatrix {
        match self {
            MemoryOperators::Thermal { q, .. } => q.clone(),
            MemoryOperators::Squeezed { q1, q2, .. } => {
                OperatorMatrix::from_array(q1.as_array() + q2.as_array()).unwrap()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationState {
    pub t: f64,
    pub rho: DensityMatrix,
    pub mem: MemoryOperators,
}

impl PropagationState {
    pub fn initial(rho: DensityMatrix, kind: CorrelationKind) -> Self {
        let dim = rho.dim();
        Self {
            t: 0.0,
            rho,
            mem: MemoryOperators::zeros(kind, dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalDerivative {
    pub rho: OperatorMatrix,
    pub o: OperatorMatrix,
    pub q: OperatorMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedDerivative {
    pub rho: OperatorMatrix,
    pub o1: OperatorMatrix,
    pub o2: OperatorMatrix,
    pub q1: OperatorMatrix,
    pub q2: OperatorMatrix,
}

/// Which coupling operator sources a memory operator: `L` for the `Ō`
/// family, `L†` for the `Q̄` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemorySide {
    O,
    Q,
}

/// `dX/dt = source · (L or L†) + decay · X - [A, X]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryChannel {
    pub side: MemorySide,
    pub source: C64,
    pub decay: C64,
}

/// Source and decay coefficients for each memory operator, in the order of
/// [`MemoryOperators::operators`].
pub fn memory_channels(corr: &CorrelationSet) -> Vec<MemoryChannel> {
    let p = corr.bath();
    let (w0, g) = (p.omega0(), p.bandwidth());
    // -(iω₀ + γ) and -(-iω₀ + γ) = iω₀ - γ
    let damp = C64::new(-g, -w0);
    let damp_conj = C64::new(-g, w0);
    let ch = |side, source, decay| MemoryChannel {
        side,
        source,
        decay,
    };
    match corr.kind() {
        CorrelationKind::Thermal => vec![
            ch(MemorySide::O, corr.alpha1(0.0, 0.0), damp),
            ch(MemorySide::Q, corr.eta1(0.0, 0.0), damp_conj),
        ],
        CorrelationKind::Squeezed => vec![
            ch(MemorySide::O, corr.alpha1(0.0, 0.0), damp),
            ch(MemorySide::O, corr.alpha2(0.0, 0.0), damp_conj),
            ch(MemorySide::Q, corr.eta1(0.0, 0.0), damp_conj),
            ch(MemorySide::Q, corr.eta2(0.0, 0.0), damp),
        ],
    }
}

/// Right-hand side of the stacked system `[ρ, X₁, …, X_k]`.
struct Generator {
    h: Array2<C64>,
    l: Array2<C64>,
    ld: Array2<C64>,
    regime: Regime,
    /// `L†L + LL†`, Markovian only.
    anticomm: Array2<C64>,
    markov_rate: f64,
    channels: Vec<MemoryChannel>,
}

struct Workspace {
    a: Array2<C64>,
    o_sum: Array2<C64>,
    q_sum: Array2<C64>,
    dag: Array2<C64>,
    tmp: Array2<C64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = || Array2::zeros((dim, dim));
        Self {
            a: z(),
            o_sum: z(),
            q_sum: z(),
            dag: z(),
            tmp: z(),
        }
    }
}

impl Generator {
    fn new(
        h: &OperatorMatrix,
        l: &OperatorMatrix,
        regime: Regime,
        corr: &CorrelationSet,
    ) -> Result<Self> {
        if h.dim() != l.dim() {
            return Err(Error::DimensionMismatch {
                what: "Lindblad operator",
                expected: h.dim(),
                found: l.dim(),
            });
        }
        let l_arr = l.as_array().clone();
        let ld = linalg::dagger(&l_arr.view());
        let (anticomm, channels) = match regime {
            Regime::Markovian => (ld.dot(&l_arr) + l_arr.dot(&ld), Vec::new()),
            Regime::NonMarkovian => (Array2::zeros((0, 0)), memory_channels(corr)),
        };
        Ok(Self {
            h: h.as_array().clone(),
            l: l_arr,
            ld,
            regime,
            anticomm,
            markov_rate: corr.bath().markov_rate(),
            channels,
        })
    }

    fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn stack_len(&self) -> usize {
        1 + self.channels.len()
    }

    fn eval(&self, y: &[Array2<C64>], dy: &mut [Array2<C64>], ws: &mut Workspace) {
        let rho = &y[0];
        let (drho, dmem) = dy.split_first_mut().unwrap();
        drho.fill(ZERO);
        add_commutator(-I, &self.h.view(), &rho.view(), drho);

        match self.regime {
            Regime::Markovian => {
                let k = C64::from(self.markov_rate);
                // 2 L ρ L† + 2 L† ρ L - {L†L + LL†, ρ}
                gemm(ONE, &rho.view(), &self.ld.view(), ZERO, &mut ws.tmp);
                add_product(2.0 * k, &self.l.view(), &ws.tmp.view(), drho);
                gemm(ONE, &rho.view(), &self.l.view(), ZERO, &mut ws.tmp);
                add_product(2.0 * k, &self.ld.view(), &ws.tmp.view(), drho);
                add_product(-k, &self.anticomm.view(), &rho.view(), drho);
                add_product(-k, &rho.view(), &self.anticomm.view(), drho);
            }
            Regime::NonMarkovian => {
                self.sum_memory(y, ws);
                let (l, ld) = (self.l.view(), self.ld.view());

                // [L, ρŌ†] - [L†, Ōρ]
                linalg::dagger_into(&ws.o_sum.view(), &mut ws.dag.view_mut());
                gemm(ONE, &rho.view(), &ws.dag.view(), ZERO, &mut ws.tmp);
                add_commutator(ONE, &l, &ws.tmp.view(), drho);
                gemm(ONE, &ws.o_sum.view(), &rho.view(), ZERO, &mut ws.tmp);
                add_commutator(-ONE, &ld, &ws.tmp.view(), drho);

                // [L†, ρQ̄†] - [L, Q̄ρ]
                linalg::dagger_into(&ws.q_sum.view(), &mut ws.dag.view_mut());
                gemm(ONE, &rho.view(), &ws.dag.view(), ZERO, &mut ws.tmp);
                add_commutator(ONE, &ld, &ws.tmp.view(), drho);
                gemm(ONE, &ws.q_sum.view(), &rho.view(), ZERO, &mut ws.tmp);
                add_commutator(-ONE, &l, &ws.tmp.view(), drho);

                // A = iH + L†Ō + LQ̄
                Zip::from(&mut ws.a).and(&self.h).for_each(|a, &h| *a = I * h);
                add_product(ONE, &ld, &ws.o_sum.view(), &mut ws.a);
                add_product(ONE, &l, &ws.q_sum.view(), &mut ws.a);

                for ((ch, x), dx) in self.channels.iter().zip(&y[1..]).zip(dmem.iter_mut()) {
                    let source_op = match ch.side {
                        MemorySide::O => &self.l,
                        MemorySide::Q => &self.ld,
                    };
                    Zip::from(&mut *dx)
                        .and(source_op)
                        .and(x)
                        .for_each(|d, &s, &xv| *d = ch.source * s + ch.decay * xv);
                    add_commutator(-ONE, &ws.a.view(), &x.view(), dx);
                }
            }
        }
    }

    fn sum_memory(&self, y: &[Array2<C64>], ws: &mut Workspace) {
        let mut first_o = true;
        let mut first_q = true;
        for (ch, x) in self.channels.iter().zip(&y[1..]) {
            let (target, first) = match ch.side {
                MemorySide::O => (&mut ws.o_sum, &mut first_o),
                MemorySide::Q => (&mut ws.q_sum, &mut first_q),
            };
            if *first {
                target.assign(x);
                *first = false;
            } else {
                *target += x;
            }
        }
        if first_o {
            ws.o_sum.fill(ZERO);
        }
        if first_q {
            ws.q_sum.fill(ZERO);
        }
    }
}

fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

fn wrap(a: Array2<C64>) -> OperatorMatrix {
    OperatorMatrix::from_array(a).expect("square by construction")
}

fn eval_once(
    gen: &Generator,
    rho: &DensityMatrix,
    mem: &[&OperatorMatrix],
) -> Result<Vec<OperatorMatrix>> {
    let dim = gen.dim();
    check_dim("density matrix", dim, rho.dim())?;
    for m in mem {
        check_dim("memory operator", dim, m.dim())?;
    }
    let mut y = vec![rho.as_array().clone()];
    y.extend(mem.iter().map(|m| m.as_array().clone()));
    let mut dy = vec![Array2::zeros((dim, dim)); gen.stack_len()];
    let mut ws = Workspace::new(dim);
    gen.eval(&y, &mut dy, &mut ws);
    Ok(dy.into_iter().map(wrap).collect())
}

/// Derivatives `(dρ/dt, dŌ/dt, dQ̄/dt)` for a thermal bath.
pub fn rhs_nonmarkovian_thermal(
    state: &PropagationState,
    h: &OperatorMatrix,
    l: &OperatorMatrix,
    corr: &CorrelationSet,
) -> Result<ThermalDerivative> {
    if corr.kind() != CorrelationKind::Thermal || state.mem.kind() != CorrelationKind::Thermal {
        return Err(Error::WrongCorrelationKind {
            expected: "thermal",
            found: CorrelationKind::Squeezed.name(),
        });
    }
    let gen = Generator::new(h, l, Regime::NonMarkovian, corr)?;
    let mut d = eval_once(&gen, &state.rho, &state.mem.operators())?.into_iter();
    Ok(ThermalDerivative {
        rho: d.next().unwrap(),
        o: d.next().unwrap(),
        q: d.next().unwrap(),
    })
}

/// Derivatives `(dρ/dt, dŌ₁/dt, dŌ₂/dt, dQ̄₁/dt, dQ̄₂/dt)` for a squeezed bath.
pub fn rhs_nonmarkovian_squeezed(
    state: &PropagationState,
    h: &OperatorMatrix,
    l: &OperatorMatrix,
    corr: &CorrelationSet,
) -> Result<SqueezedDerivative> {
    if corr.kind() != CorrelationKind::Squeezed || state.mem.kind() != CorrelationKind::Squeezed {
        return Err(Error::WrongCorrelationKind {
            expected: "squeezed",
            found: CorrelationKind::Thermal.name(),
        });
    }
    let gen = Generator::new(h, l, Regime::NonMarkovian, corr)?;
    let mut d = eval_once(&gen, &state.rho, &state.mem.operators())?.into_iter();
    Ok(SqueezedDerivative {
        rho: d.next().unwrap(),
        o1: d.next().unwrap(),
        o2: d.next().unwrap(),
        q1: d.next().unwrap(),
        q2: d.next().unwrap(),
    })
}

/// Markovian Lindblad generator with rate `ΓT/2` on both dissipators.
pub fn rhs_lindblad(
    rho: &DensityMatrix,
    h: &OperatorMatrix,
    l: &OperatorMatrix,
    p: &BathParams,
) -> Result<OperatorMatrix> {
    let gen = Generator::new(h, l, Regime::Markovian, &CorrelationSet::thermal(p))?;
    let mut d = eval_once(&gen, rho, &[])?;
    Ok(d.remove(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub rho: DensityMatrix,
    pub coherence: f64,
}

/// Numerical health of a propagation, measured before each post-step repair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Hygiene {
    pub steps: usize,
    /// Largest `|Tr ρ - 1|` seen right after an RK4 step.
    pub max_trace_error: f64,
    /// Largest `max|ρ - ρ†|` seen right after an RK4 step.
    pub max_hermiticity_drift: f64,
    /// Largest entrywise change made by symmetrisation plus renormalisation.
    pub max_repair: f64,
    /// Steps whose repair exceeded [`REPAIR_LOG_THRESHOLD`].
    pub repairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub hygiene: Hygiene,
    /// Memory operators at the final step.
    pub final_memory: Option<MemoryOperators>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn coherences(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.coherence).collect()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn span(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }
}

struct Rk4 {
    k: [Vec<Array2<C64>>; 4],
    stage: Vec<Array2<C64>>,
    ws: Workspace,
}

impl Rk4 {
    fn new(dim: usize, len: usize) -> Self {
        let stack = || vec![Array2::zeros((dim, dim)); len];
        Self {
            k: [stack(), stack(), stack(), stack()],
            stage: stack(),
            ws: Workspace::new(dim),
        }
    }

    fn step(&mut self, gen: &Generator, y: &mut [Array2<C64>], dt: f64) {
        let half = C64::from(0.5 * dt);
        let full = C64::from(dt);
        let [k1, k2, k3, k4] = &mut self.k;

        gen.eval(y, k1, &mut self.ws);
        axpy_stack(&mut self.stage, y, half, k1);
        gen.eval(&self.stage, k2, &mut self.ws);
        axpy_stack(&mut self.stage, y, half, k2);
        gen.eval(&self.stage, k3, &mut self.ws);
        axpy_stack(&mut self.stage, y, full, k3);
        gen.eval(&self.stage, k4, &mut self.ws);

        let w1 = C64::from(dt / 6.0);
        let w2 = C64::from(dt / 3.0);
        for i in 0..y.len() {
            Zip::from(&mut y[i])
                .and(&k1[i])
                .and(&k2[i])
                .and(&k3[i])
                .and(&k4[i])
                .for_each(|y, &a, &b, &c, &d| *y += w1 * (a + d) + w2 * (b + c));
        }
    }
}

/// `out = y + h·k`, stackwise.
fn axpy_stack(out: &mut [Array2<C64>], y: &[Array2<C64>], h: C64, k: &[Array2<C64>]) {
    for ((o, y), k) in out.iter_mut().zip(y).zip(k) {
        Zip::from(o).and(y).and(k).for_each(|o, &y, &k| *o = y + h * k);
    }
}

/// Symmetrise and renormalise in place. Returns `(trace error, hermiticity
/// drift, repair size)` as measured before the repair.
fn repair(rho: &mut Array2<C64>) -> (f64, f64, f64) {
    let herm = linalg::hermiticity_error(&rho.view());
    let tr = linalg::trace(&rho.view());
    let trace_err = (tr - ONE).norm();
    // The symmetrised diagonal is Re(rho_ii), so the new trace is Re(tr).
    let scale = 1.0 / tr.re;
    let n = rho.nrows();
    let mut repaired = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let upper = rho[[i, j]];
            let lower = rho[[j, i]];
            let value = 0.5 * (upper + lower.conj()) * scale;
            repaired = repaired.max((upper - value).norm()).max((lower - value.conj()).norm());
            rho[[i, j]] = value;
            rho[[j, i]] = value.conj();
        }
    }
    (trace_err, herm, repaired)
}

/// Integrate from `initial` with the operators of `spec`.
///
/// `squeeze` selects the squeezed-bath memory operators and is only valid in
/// the non-Markovian regime.
pub fn propagate(
    initial: &DensityMatrix,
    spec: &SystemSpec,
    bath: &BathParams,
    squeeze: Option<&SqueezeParams>,
    config: &IntegratorConfig,
    regime: Regime,
) -> Result<Trajectory> {
    config.validate()?;
    if squeeze.is_some() && regime == Regime::Markovian {
        return Err(Error::Unsupported(
            "the Markovian limit has no squeezed-bath form".into(),
        ));
    }
    check_dim("initial state", spec.dim(), initial.dim())?;
    let violations = config.stability_violations(spec, bath, regime);
    if !violations.is_empty() {
        match config.stability {
            StabilityPolicy::Reject => return Err(Error::Stability(violations)),
            StabilityPolicy::Warn => {
                for v in &violations {
                    warn!("stability guard: {v}");
                }
            }
        }
    }
    let h = build_hamiltonian(spec)?;
    let l = build_lindblad(spec)?;
    let corr = match squeeze {
        Some(q) => squeezed_correlations(bath, q),
        None => CorrelationSet::thermal(bath),
    };
    let label = format!("{bath:?}, squeeze {squeeze:?}, {regime}");
    propagate_with(initial, &h, &l, &corr, config, regime, &label)
}

/// Integrate with explicit operators. `label` is echoed in non-finite errors.
pub fn propagate_with(
    initial: &DensityMatrix,
    h: &OperatorMatrix,
    l: &OperatorMatrix,
    corr: &CorrelationSet,
    config: &IntegratorConfig,
    regime: Regime,
    label: &str,
) -> Result<Trajectory> {
    config.validate()?;
    let gen = Generator::new(h, l, regime, corr)?;
    let dim = gen.dim();
    check_dim("initial state", dim, initial.dim())?;

    let mut y = vec![Array2::zeros((dim, dim)); gen.stack_len()];
    y[0].assign(initial.as_array());
    let mut rk = Rk4::new(dim, y.len());
    let n_steps = config.n_steps();
    let mut hygiene = Hygiene::default();
    let mut samples = Vec::with_capacity(n_steps / config.sample_every + 2);
    let sample = |y: &Array2<C64>, t: f64| Sample {
        t,
        coherence: offdiag_l1(&y.view()),
        rho: DensityMatrix::from_array_unchecked(y.clone()),
    };
    samples.push(sample(&y[0], 0.0));

    for step in 1..=n_steps {
        rk.step(&gen, &mut y, config.dt);
        let t = step as f64 * config.dt;
        if !y.iter().all(|m| linalg::all_finite(&m.view())) {
            return Err(Error::NonFinite {
                step,
                t,
                params: label.to_string(),
            });
        }
        let (trace_err, herm, repaired) = repair(&mut y[0]);
        hygiene.steps = step;
        hygiene.max_trace_error = hygiene.max_trace_error.max(trace_err);
        hygiene.max_hermiticity_drift = hygiene.max_hermiticity_drift.max(herm);
        hygiene.max_repair = hygiene.max_repair.max(repaired);
        if repaired > REPAIR_LOG_THRESHOLD {
            hygiene.repairs += 1;
            trace!("step {step}: repair of {repaired:e} (trace error {trace_err:e}, drift {herm:e})");
        }
        if step % config.sample_every == 0 || step == n_steps {
            samples.push(sample(&y[0], t));
        }
    }
    debug!(
        "propagated {n_steps} steps: max trace error {:e}, max drift {:e}, {} repairs above threshold",
        hygiene.max_trace_error, hygiene.max_hermiticity_drift, hygiene.repairs
    );

    let kind = corr.kind();
    let final_memory = match regime {
        Regime::Markovian => None,
        Regime::NonMarkovian => Some(MemoryOperators::from_operators(
            kind,
            y.into_iter().skip(1).map(wrap).collect(),
        )),
    };
    Ok(Trajectory {
        samples,
        hygiene,
        final_memory,
    })
}
