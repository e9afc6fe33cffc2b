use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;
use proptest::prelude::*;
use ssqc_core::dynamics::{memory_channels, propagate_with, MemorySide};
use ssqc_core::linalg::{commutator, dagger, max_abs_diff, trace};
use ssqc_core::*;

fn two_qubits(w1: f64, w2: f64) -> SystemSpec {
    SystemSpec::new(2, vec![w1, w2], Channel::SigmaX).unwrap()
}

fn fig1_bath() -> BathParams {
    BathParams::new(0.05, 5.0, 15.0, 1.0).unwrap()
}

fn fig2() -> (BathParams, SqueezeParams) {
    (
        BathParams::new(0.04, 3.0, 8.0, 1.0).unwrap(),
        SqueezeParams::new(0.4, FRAC_PI_2).unwrap(),
    )
}

fn config(dt: f64, t_max: f64, sample_every: usize) -> IntegratorConfig {
    IntegratorConfig {
        dt,
        t_max,
        sample_every,
        ..Default::default()
    }
}

fn ops(spec: &SystemSpec) -> (OperatorMatrix, OperatorMatrix) {
    (build_hamiltonian(spec).unwrap(), build_lindblad(spec).unwrap())
}

fn coherence_at(traj: &Trajectory, t: f64) -> f64 {
    traj.samples
        .iter()
        .find(|s| (s.t - t).abs() < 1e-9)
        .unwrap_or_else(|| panic!("no sample at t = {t}"))
        .coherence
}

/// A random 4x4 Hermitian, trace-one matrix (not necessarily positive).
fn hermitian_from(seed: &[f64]) -> Array2<C64> {
    let a = Array2::from_shape_fn((4, 4), |(i, j)| C64::new(seed[4 * i + j], seed[16 + 4 * i + j]));
    let mut h = &a + &dagger(&a.view());
    for i in 0..4 {
        h[[i, i]] = C64::new(h[[i, i]].re.abs() + 0.1, 0.0);
    }
    let tr = trace(&h.view());
    h.mapv(|z| z / tr)
}

/// Straight transcription of the master equation with allocating ndarray
/// products, kept apart from the in-place generator.
fn naive_nonmarkovian(
    rho: &Array2<C64>,
    o: &Array2<C64>,
    q: &Array2<C64>,
    h: &Array2<C64>,
    l: &Array2<C64>,
    a00: C64,
    e00: C64,
    w0: f64,
    g: f64,
) -> (Array2<C64>, Array2<C64>, Array2<C64>) {
    let i = C64::new(0.0, 1.0);
    let ld = dagger(&l.view());
    let od = dagger(&o.view());
    let qd = dagger(&q.view());
    let c = |a: &Array2<C64>, b: &Array2<C64>| commutator(&a.view(), &b.view());
    let drho = c(h, rho).mapv(|z| -i * z) + c(l, &rho.dot(&od)) - c(&ld, &o.dot(rho))
        + c(&ld, &rho.dot(&qd))
        - c(l, &q.dot(rho));
    let a = h.mapv(|z| i * z) + ld.dot(o) + l.dot(q);
    let d_o = l.mapv(|z| a00 * z) - o.mapv(|z| (i * w0 + g) * z) - c(&a, o);
    let d_q = ld.mapv(|z| e00 * z) + q.mapv(|z| (i * w0 - g) * z) - c(&a, q);
    (drho, d_o, d_q)
}

#[test]
fn thermal_rhs_at_time_zero() {
    let spec = two_qubits(1.0, 1.0);
    let (h, l) = ops(&spec);
    let bath = fig1_bath();
    let corr = CorrelationSet::thermal(&bath);
    let rho = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.3, 0.2), C64::new(0.0, -0.5), C64::new(0.1, 0.0)]).unwrap();
    let state = PropagationState::initial(rho.clone(), CorrelationKind::Thermal);
    let d = rhs_nonmarkovian_thermal(&state, &h, &l, &corr).unwrap();

    let expect_o = l.as_array().mapv(|z| alpha_thermal(0.0, 0.0, &bath) * z);
    let expect_q = l.dagger().as_array().mapv(|z| eta_thermal(0.0, 0.0, &bath) * z);
    let expect_rho = commutator(&h.view(), &rho.view()).mapv(|z| C64::new(0.0, -1.0) * z);
    assert!(max_abs_diff(&d.o.view(), &expect_o.view()) < 1e-14);
    assert!(max_abs_diff(&d.q.view(), &expect_q.view()) < 1e-14);
    assert!(max_abs_diff(&d.rho.view(), &expect_rho.view()) < 1e-14);
}

#[test]
fn diagonal_state_is_stationary_without_memory() {
    let spec = two_qubits(1.0, 1.0);
    let (h, l) = ops(&spec);
    let corr = CorrelationSet::thermal(&fig1_bath());
    let rho = DensityMatrix::new(Array2::from_diag(&ndarray::arr1(&[
        C64::from(0.1),
        C64::from(0.2),
        C64::from(0.3),
        C64::from(0.4),
    ])))
    .unwrap();
    let state = PropagationState::initial(rho, CorrelationKind::Thermal);
    let d = rhs_nonmarkovian_thermal(&state, &h, &l, &corr).unwrap();
    assert!(d.rho.as_array().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn thermal_rhs_matches_naive_transcription() {
    let spec = two_qubits(1.0, 0.7);
    let (h, l) = ops(&spec);
    let bath = fig1_bath();
    let corr = CorrelationSet::thermal(&bath);
    let seed: Vec<f64> = (0..32).map(|k| ((k * 37 % 11) as f64 - 5.0) / 7.0).collect();
    let rho = hermitian_from(&seed);
    let o = Array2::from_shape_fn((4, 4), |(i, j)| C64::new(0.1 * i as f64 - 0.05 * j as f64, 0.02 * (i + j) as f64));
    let q = Array2::from_shape_fn((4, 4), |(i, j)| C64::new(0.03 * (i * j) as f64, -0.04 * i as f64 + 0.01));
    let state = PropagationState {
        t: 0.0,
        rho: DensityMatrix::new(rho.clone()).unwrap(),
        mem: MemoryOperators::Thermal {
            o: OperatorMatrix::from_array(o.clone()).unwrap(),
            q: OperatorMatrix::from_array(q.clone()).unwrap(),
        },
    };
    let d = rhs_nonmarkovian_thermal(&state, &h, &l, &corr).unwrap();
    let (nr, no, nq) = naive_nonmarkovian(
        &rho,
        &o,
        &q,
        h.as_array(),
        l.as_array(),
        alpha_thermal(0.0, 0.0, &bath),
        eta_thermal(0.0, 0.0, &bath),
        bath.omega0(),
        bath.bandwidth(),
    );
    assert!(max_abs_diff(&d.rho.view(), &nr.view()) < 1e-13);
    assert!(max_abs_diff(&d.o.view(), &no.view()) < 1e-13);
    assert!(max_abs_diff(&d.q.view(), &nq.view()) < 1e-13);
}

#[test]
fn rhs_rejects_mismatched_inputs() {
    let spec = two_qubits(1.0, 1.0);
    let (h, l) = ops(&spec);
    let one = SystemSpec::uniform(1, 1.0, Channel::SigmaX).unwrap();
    let (_, l1) = ops(&one);
    let corr = CorrelationSet::thermal(&fig1_bath());
    let state = PropagationState::initial(DensityMatrix::ground(2).unwrap(), CorrelationKind::Thermal);
    assert!(matches!(
        rhs_nonmarkovian_thermal(&state, &h, &l1, &corr),
        Err(Error::DimensionMismatch { .. })
    ));
    let small = PropagationState::initial(DensityMatrix::ground(1).unwrap(), CorrelationKind::Thermal);
    assert!(rhs_nonmarkovian_thermal(&small, &h, &l, &corr).is_err());
    let (p, q) = fig2();
    let sq = squeezed_correlations(&p, &q);
    assert!(matches!(
        rhs_nonmarkovian_thermal(&state, &h, &l, &sq),
        Err(Error::WrongCorrelationKind { .. })
    ));
    assert!(rhs_nonmarkovian_squeezed(&state, &h, &l, &sq).is_err());
    assert!(rhs_lindblad(&small.rho, &h, &l, &p).is_err());
}

#[test]
fn squeezed_rhs_at_time_zero() {
    let spec = two_qubits(1.0, 1.0);
    let (h, l) = ops(&spec);
    let (p, q) = fig2();
    let corr = squeezed_correlations(&p, &q);
    let state = PropagationState::initial(DensityMatrix::ground(2).unwrap(), CorrelationKind::Squeezed);
    let d = rhs_nonmarkovian_squeezed(&state, &h, &l, &corr).unwrap();
    let ld = l.dagger();
    let scaled = |op: &OperatorMatrix, c: C64| op.as_array().mapv(|z| c * z);
    assert!(max_abs_diff(&d.o1.view(), &scaled(&l, corr.alpha1(0.0, 0.0)).view()) < 1e-15);
    assert!(max_abs_diff(&d.o2.view(), &scaled(&l, corr.alpha2(0.0, 0.0)).view()) < 1e-15);
    assert!(max_abs_diff(&d.q1.view(), &scaled(&ld, corr.eta1(0.0, 0.0)).view()) < 1e-15);
    assert!(max_abs_diff(&d.q2.view(), &scaled(&ld, corr.eta2(0.0, 0.0)).view()) < 1e-15);
    // |gg><gg| commutes with the diagonal H.
    assert!(d.rho.as_array().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn squeezed_channels_reduce_to_thermal_coefficients() {
    let bath = fig1_bath();
    let thermal = memory_channels(&CorrelationSet::thermal(&bath));
    let sq = memory_channels(&squeezed_correlations(&bath, &SqueezeParams::new(0.0, 1.0).unwrap()));
    assert_eq!(thermal.len(), 2);
    assert_eq!(sq.len(), 4);
    // Q̄₁ decays with -(-iω₀+γ), which must equal +(iω₀-γ) of the thermal Q̄.
    assert_eq!(sq[2].decay, thermal[1].decay);
    assert_eq!(sq[2].decay, C64::new(-bath.bandwidth(), bath.omega0()));
    assert_eq!(sq[0], thermal[0]);
    assert_eq!(sq[2], thermal[1]);
    assert_eq!(sq[1].side, MemorySide::O);
    assert_eq!(sq[3].side, MemorySide::Q);
    assert_eq!(sq[1].source, C64::new(0.0, 0.0));
    assert_eq!(sq[3].source, C64::new(0.0, 0.0));
}

#[test]
fn lindblad_fixed_points() {
    let (h, l) = ops(&two_qubits(1.0, 1.0));
    for (g, t) in [(0.05, 15.0), (0.1, 5.0), (1.0, 0.3)] {
        let bath = BathParams::new(g, 5.0, t, 1.0).unwrap();
        let d = rhs_lindblad(&markov_steady_state_analytic(1.0, 1.0), &h, &l, &bath).unwrap();
        assert!(d.as_array().iter().all(|z| z.norm() <= 1e-12));
    }
    let (h, l) = ops(&two_qubits(1.0, 0.7));
    let bath = fig1_bath();
    let d = rhs_lindblad(&markov_steady_state_analytic(1.0, 0.7), &h, &l, &bath).unwrap();
    assert!(d.as_array().iter().all(|z| z.norm() <= 1e-12));
}

#[test]
fn lindblad_without_rate_is_unitary() {
    let (h, l) = ops(&two_qubits(1.0, 0.7));
    let rho = DensityMatrix::pure(&[C64::new(0.5, 0.1), C64::new(0.2, 0.0), C64::new(0.0, 0.4), C64::new(0.3, -0.3)]).unwrap();
    let unitary = commutator(&h.view(), &rho.view()).mapv(|z| C64::new(0.0, -1.0) * z);
    for bath in [
        BathParams::new(0.0, 5.0, 15.0, 1.0).unwrap(),
        BathParams::new(0.05, 5.0, 0.0, 1.0).unwrap(),
    ] {
        let d = rhs_lindblad(&rho, &h, &l, &bath).unwrap();
        assert!(max_abs_diff(&d.view(), &unitary.view()) < 1e-15);
    }
}

proptest! {
    #[test]
    fn lindblad_rhs_is_traceless(seed in proptest::collection::vec(-1.0f64..1.0, 32)) {
        let (h, l) = ops(&two_qubits(1.0, 0.7));
        let rho = DensityMatrix::new(hermitian_from(&seed)).unwrap();
        let d = rhs_lindblad(&rho, &h, &l, &fig1_bath()).unwrap();
        prop_assert!(trace(&d.view()).norm() < 1e-12);
    }

    #[test]
    fn nonmarkovian_rhs_is_traceless_and_hermitian(seed in proptest::collection::vec(-1.0f64..1.0, 64)) {
        let (h, l) = ops(&two_qubits(1.0, 1.0));
        let rho = DensityMatrix::new(hermitian_from(&seed[..32])).unwrap();
        let o = Array2::from_shape_fn((4, 4), |(i, j)| C64::new(seed[32 + 4 * i + j], seed[48 + 4 * i + j]) * 0.1);
        let q = o.t().mapv(|z| z * 0.5);
        let state = PropagationState {
            t: 1.0,
            rho,
            mem: MemoryOperators::Thermal {
                o: OperatorMatrix::from_array(o).unwrap(),
                q: OperatorMatrix::from_array(q.to_owned()).unwrap(),
            },
        };
        let d = rhs_nonmarkovian_thermal(&state, &h, &l, &CorrelationSet::thermal(&fig1_bath())).unwrap();
        prop_assert!(trace(&d.rho.view()).norm() < 1e-12);
        prop_assert!(max_abs_diff(&d.rho.view(), &dagger(&d.rho.view()).view()) < 1e-12);
    }
}

// C(t) from an independent SciPy DOP853 integration (rtol 1e-10, atol 1e-12)
// of the same equations, |gg> initial state, N = 2, omega_s = omega_0 = 1.
const SCIPY_GAMMA5: [(f64, f64); 3] = [
    (10.0, 0.4080222974755825),
    (20.0, 0.40802231155226676),
    (50.0, 0.408022312240633),
];
const SCIPY_GAMMA50: [(f64, f64); 2] = [(10.0, 0.4759848638310511), (50.0, 0.47597836768429536)];
// Squeezed bath at r = 0.4, theta = pi/2, Gamma = 0.04, gamma = 3, T = 8 (rtol 1e-11).
const SCIPY_SQUEEZED: [(f64, f64); 3] = [
    (5.0, 0.3789597057348175),
    (10.0, 0.37903104306673896),
    (40.0, 0.37904048513010946),
];

#[test]
fn thermal_trajectory_matches_independent_integrator() {
    let spec = two_qubits(1.0, 1.0);
    let rho0 = DensityMatrix::ground(2).unwrap();
    let traj = propagate(&rho0, &spec, &fig1_bath(), None, &config(0.01, 50.0, 10), Regime::NonMarkovian).unwrap();
    for (t, c) in SCIPY_GAMMA5 {
        assert!((coherence_at(&traj, t) - c).abs() < 1e-8, "t = {t}");
    }
    let bath = BathParams::new(0.05, 50.0, 15.0, 1.0).unwrap();
    let traj = propagate(&rho0, &spec, &bath, None, &config(0.002, 50.0, 50), Regime::NonMarkovian).unwrap();
    for (t, c) in SCIPY_GAMMA50 {
        assert!((coherence_at(&traj, t) - c).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn squeezed_trajectory_matches_independent_integrator() {
    let (p, q) = fig2();
    let traj = propagate(
        &DensityMatrix::ground(2).unwrap(),
        &two_qubits(1.0, 1.0),
        &p,
        Some(&q),
        &config(0.01, 40.0, 10),
        Regime::NonMarkovian,
    )
    .unwrap();
    for (t, c) in SCIPY_SQUEEZED {
        assert!((coherence_at(&traj, t) - c).abs() < 1e-8, "t = {t}");
    }
}

#[test]
fn step_halving_agrees_and_converges_at_fourth_order() {
    let spec = two_qubits(1.0, 1.0);
    let rho0 = DensityMatrix::ground(2).unwrap();
    let run = |dt: f64, every: usize| {
        propagate(&rho0, &spec, &fig1_bath(), None, &config(dt, 40.0, every), Regime::NonMarkovian)
            .unwrap()
            .coherences()
    };
    // Samples land on the same times: every 0.1 time units.
    let c1 = run(0.02, 5);
    let c2 = run(0.01, 10);
    let c4 = run(0.005, 20);
    assert_eq!(c1.len(), c2.len());
    let dev = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let coarse = dev(&c1, &c2);
    let fine = dev(&c2, &c4);
    assert!(fine < 1e-6, "dt vs dt/2 deviation {fine}");
    assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
}

#[test]
fn zero_squeezing_reproduces_thermal_trajectory() {
    let spec = two_qubits(0.5, 0.5);
    let bath = BathParams::new(0.04, 3.0, 6.0, 0.5).unwrap();
    let cfg = config(0.01, 60.0, 10);
    let rho0 = DensityMatrix::ground(2).unwrap();
    let thermal = propagate(&rho0, &spec, &bath, None, &cfg, Regime::NonMarkovian).unwrap();
    let squeezed = propagate(
        &rho0,
        &spec,
        &bath,
        Some(&SqueezeParams::new(0.0, FRAC_PI_2).unwrap()),
        &cfg,
        Regime::NonMarkovian,
    )
    .unwrap();
    assert_eq!(thermal.samples.len(), squeezed.samples.len());
    for (a, b) in thermal.samples.iter().zip(&squeezed.samples) {
        assert!(a.rho.max_abs_diff(&b.rho) <= 1e-10);
        assert!((a.coherence - b.coherence).abs() <= 1e-10);
    }
    match squeezed.final_memory.unwrap() {
        MemoryOperators::Squeezed { o2, q2, .. } => {
            assert!(o2.as_array().iter().all(|z| z.norm() == 0.0));
            assert!(q2.as_array().iter().all(|z| z.norm() == 0.0));
        }
        other => panic!("unexpected memory {other:?}"),
    }
}

#[test]
fn squeezing_enhances_steady_coherence_at_fig2_parameters() {
    let (p, q) = fig2();
    let spec = two_qubits(1.0, 1.0);
    let rho0 = DensityMatrix::ground(2).unwrap();
    let cfg = config(0.01, 100.0, 10);
    let steady = |sq: Option<&SqueezeParams>| {
        let traj = propagate(&rho0, &spec, &p, sq, &cfg, Regime::NonMarkovian).unwrap();
        let r = detect_steady_state(&traj, 1e-4, 20.0).unwrap();
        assert!(r.converged);
        r.ssqc
    };
    let with = steady(Some(&q));
    let without = steady(None);
    assert!(with > without, "squeezed {with} vs thermal {without}");
}

#[test]
fn markovian_relaxes_to_analytic_states() {
    let rho0 = DensityMatrix::ground(2).unwrap();
    let bath = fig1_bath();
    let traj = propagate(&rho0, &two_qubits(1.0, 1.0), &bath, None, &config(0.01, 200.0, 10), Regime::Markovian).unwrap();
    let last = traj.last().unwrap();
    assert!(last.rho.max_abs_diff(&markov_steady_state_analytic(1.0, 1.0)) < 1e-6);
    assert!((last.coherence - 1.0 / 3.0).abs() < 1e-6);

    let traj = propagate(&rho0, &two_qubits(1.0, 0.7), &bath, None, &config(0.01, 200.0, 10), Regime::Markovian).unwrap();
    let last = traj.last().unwrap();
    assert!(last.rho.max_abs_diff(&markov_steady_state_analytic(1.0, 0.7)) < 1e-6);
    assert!(last.coherence < 1e-4);
}

#[test]
fn markovian_rate_only_sets_the_time_scale() {
    // Weak dissipation (ΓT/2 well below ω): relaxation rates scale with Γ.
    // Near ΓT ~ ω the approach becomes overdamped and the scaling breaks.
    let rho0 = DensityMatrix::ground(2).unwrap();
    let spec = two_qubits(1.0, 1.0);
    let cfg = config(0.005, 100.0, 2);
    let run = |g: f64| {
        let bath = BathParams::new(g, 5.0, 15.0, 1.0).unwrap();
        let traj = propagate(&rho0, &spec, &bath, None, &cfg, Regime::Markovian).unwrap();
        detect_steady_state(&traj, 1e-4, 20.0).unwrap()
    };
    let slow = run(0.005);
    let fast = run(0.01);
    assert!(slow.converged && fast.converged);
    assert!(slow.final_rho.max_abs_diff(&fast.final_rho) < 1e-6);
    let ratio = fast.t_converged / (0.5 * slow.t_converged);
    assert!((0.8..=1.2).contains(&ratio), "plateau times {} vs {}", slow.t_converged, fast.t_converged);
}

#[test]
fn hygiene_stays_within_bounds() {
    let (p, q) = fig2();
    let rho0 = DensityMatrix::ground(2).unwrap();
    let traj = propagate(&rho0, &two_qubits(1.0, 1.0), &p, Some(&q), &config(0.01, 50.0, 10), Regime::NonMarkovian).unwrap();
    assert_eq!(traj.hygiene.steps, 5000);
    assert!(traj.hygiene.max_trace_error <= 1e-8);
    assert!(traj.hygiene.max_hermiticity_drift <= 1e-9);
    for s in &traj.samples {
        assert!((s.rho.trace() - C64::from(1.0)).norm() <= 1e-8);
        assert!(s.rho.max_abs_diff(&s.rho.dagger()) <= 1e-10);
        assert!(s.rho.as_array().diag().iter().all(|z| z.im == 0.0 && z.re >= -1e-8));
    }
}

#[test]
fn sampling_layout() {
    let rho0 = DensityMatrix::ground(2).unwrap();
    let traj = propagate(&rho0, &two_qubits(1.0, 1.0), &fig1_bath(), None, &config(0.01, 1.05, 10), Regime::Markovian).unwrap();
    let times = traj.times();
    assert_eq!(times.first(), Some(&0.0));
    // 105 steps: samples at 0, 10, …, 100 plus the final step.
    assert_eq!(times.len(), 12);
    assert!((times[11] - 1.05).abs() < 1e-12);
    assert_eq!(traj.samples[0].coherence, 0.0);
    assert!(traj.final_memory.is_none());
}

#[test]
fn closed_system_keeps_diagonal_state() {
    let rho0 = DensityMatrix::basis_state("eg").unwrap();
    let bath = BathParams::new(0.0, 5.0, 15.0, 1.0).unwrap();
    for regime in [Regime::Markovian, Regime::NonMarkovian] {
        let traj = propagate(&rho0, &two_qubits(1.0, 1.0), &bath, None, &config(0.01, 20.0, 10), regime).unwrap();
        assert!(traj.samples.iter().all(|s| s.coherence == 0.0));
    }
}

#[test]
fn guard_and_argument_errors() {
    let rho0 = DensityMatrix::ground(2).unwrap();
    let spec = two_qubits(1.0, 1.0);
    let wide = BathParams::new(0.05, 500.0, 15.0, 1.0).unwrap();
    match propagate(&rho0, &spec, &wide, None, &config(0.01, 1.0, 10), Regime::NonMarkovian) {
        Err(Error::Stability(v)) => assert!(v[0].contains("gamma")),
        other => panic!("expected a stability rejection, got {other:?}"),
    }
    // gamma plays no role in the Lindblad limit
    assert!(propagate(&rho0, &spec, &wide, None, &config(0.01, 1.0, 10), Regime::Markovian).is_ok());
    let fast = two_qubits(20.0, 20.0);
    assert!(matches!(
        propagate(&rho0, &fast, &fig1_bath(), None, &config(0.01, 1.0, 10), Regime::Markovian),
        Err(Error::Stability(_))
    ));
    let (_, q) = fig2();
    assert!(matches!(
        propagate(&rho0, &spec, &fig1_bath(), Some(&q), &config(0.01, 1.0, 10), Regime::Markovian),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(
        propagate(&rho0, &spec, &fig1_bath(), None, &config(0.0, 1.0, 10), Regime::Markovian),
        Err(Error::InvalidIntegrator(_))
    ));
    assert!(matches!(
        propagate(&DensityMatrix::ground(1).unwrap(), &spec, &fig1_bath(), None, &config(0.01, 1.0, 10), Regime::Markovian),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn blow_up_is_reported_with_step() {
    let rho0 = DensityMatrix::ground(2).unwrap();
    let spec = two_qubits(1.0, 1.0);
    let bath = BathParams::new(50.0, 5.0, 15.0, 1.0).unwrap();
    let cfg = IntegratorConfig {
        dt: 0.5,
        t_max: 200.0,
        sample_every: 1,
        stability: StabilityPolicy::Warn,
        ..Default::default()
    };
    match propagate(&rho0, &spec, &bath, None, &cfg, Regime::Markovian) {
        Err(Error::NonFinite { step, params, .. }) => {
            assert!(step > 0);
            assert!(params.contains("markovian"));
        }
        other => panic!("expected a non-finite abort, got {other:?}"),
    }
}

#[test]
fn propagate_with_explicit_operators() {
    let spec = SystemSpec::uniform(1, 1.0, Channel::SigmaZ).unwrap();
    let (h, l) = ops(&spec);
    let plus = DensityMatrix::pure(&[C64::from(1.0), C64::from(1.0)]).unwrap();
    let traj = propagate_with(
        &plus,
        &h,
        &l,
        &CorrelationSet::thermal(&fig1_bath()),
        &config(0.01, 20.0, 10),
        Regime::Markovian,
        "dephasing",
    )
    .unwrap();
    // Pure dephasing: |rho_01| = 1/2 e^{-4 ΓT t}, with ΓT/2 on each of two dissipators.
    let rate = 4.0 * 0.05 * 15.0;
    for s in traj.samples.iter().take(20) {
        let expect = (-rate * s.t).exp();
        assert!((s.coherence - expect).abs() < 1e-6 * expect.max(1e-3), "t = {}", s.t);
    }
}
