//! Property tests of the moment model, integrator, observables and oracle.

use std::f64::consts::PI;

use cavsim::integrator::{find_steady_state, integrate_trace, long_integration, IntegrationConfig, SteadyOptions};
use cavsim::model::MomentModel;
use cavsim::observables::{
    cavity_quadrature_variance, ensemble_quadrature_variance, min_cavity_quadrature, min_ensemble_quadrature,
    spin_metrics,
};
use cavsim::oracle::{
    build_generator, evolve, extract_moments_for_sites, single_spin_steady_state, Basis, DensityMatrix, MomentExtractor,
    OracleConfig,
};
use cavsim::{Moment, MomentState, SystemParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn state() -> impl Strategy<Value = MomentState> {
    proptest::collection::vec(c64(), 12).prop_map(|v| {
        let mut s = MomentState::from_array(v.try_into().unwrap());
        for m in Moment::ALL.into_iter().filter(|m| m.is_real()) {
            s.set(m, Complex64::new(s.get(m).re, 0.0));
        }
        s
    })
}

fn params() -> impl Strategy<Value = SystemParams> {
    (1u64..1000, 0.0..0.5f64, 0.0..1.0f64, 0.0..0.5f64, 0.0..3.0f64, -10.0..10.0f64, -10.0..10.0f64, 0.0..0.5f64)
        .prop_map(|(n, g1, gamma1, gamma2_star, omega_rabi, delta0, delta_c, n_bar)| SystemParams {
            n_emitters: n,
            g1,
            kappa: 1.0,
            gamma1,
            gamma2_star,
            omega_rabi,
            delta0,
            delta_c,
            n_bar,
        })
}

fn oracle_params() -> impl Strategy<Value = SystemParams> {
    (0.0..0.3f64, 0.05..0.5f64, 0.0..0.2f64, 0.0..1.0f64, -2.0..2.0f64, -2.0..2.0f64, 0.0..0.2f64).prop_map(
        |(g1, gamma1, gamma2_star, omega_rabi, delta0, delta_c, n_bar)| SystemParams {
            n_emitters: 1,
            g1,
            kappa: 1.0,
            gamma1,
            gamma2_star,
            omega_rabi,
            delta0,
            delta_c,
            n_bar,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn phase_average_and_orthogonality(st in state(), theta in 0.0..PI) {
        let n = st.ada.re - st.a.norm_sqr();
        let scale = 1.0 + 2.0 * n.abs();
        let avg = 0.5 * (cavity_quadrature_variance(&st, theta) + cavity_quadrature_variance(&st, theta + PI / 2.0));
        prop_assert!((avg - (1.0 + 2.0 * n)).abs() <= 1e-12 * scale);
        let q = min_cavity_quadrature(&st);
        prop_assert!((cavity_quadrature_variance(&st, q.theta_min + PI / 2.0) - q.var_max).abs() <= 1e-12 * scale);
        prop_assert!(cavity_quadrature_variance(&st, theta) >= q.var_min - 1e-12 * scale);
        let c = (st.aa - st.a * st.a).norm_sqr();
        let want = (1.0 + 2.0 * n).powi(2) - 4.0 * c;
        prop_assert!((q.var_min * q.var_max - want).abs() <= 1e-12 * scale * scale);
    }

    #[test]
    fn real_moments_stay_real(p in params(), st in state()) {
        let d = MomentModel::new(p).derivative(&st);
        for m in Moment::ALL.into_iter().filter(|m| m.is_real()) {
            prop_assert!(d.get(m).im.abs() <= 1e-12 * (1.0 + d.max_norm()), "{}: {}", m.name(), d.get(m));
        }
    }

    #[test]
    fn single_emitter_ignores_pair_moments(p in params(), st in state(), other in state()) {
        let p = SystemParams { n_emitters: 1, ..p };
        let model = MomentModel::new(p);
        let mut mixed = st;
        for m in Moment::ALL.into_iter().filter(|m| m.is_pair()) {
            mixed.set(m, other.get(m));
        }
        let (d1, d2) = (model.derivative(&st), model.derivative(&mixed));
        for m in Moment::ALL.into_iter().filter(|m| !m.is_pair()) {
            prop_assert_eq!(d1.get(m), d2.get(m), "{}", m.name());
        }
    }

    #[test]
    fn generator_preserves_trace_and_hermiticity(p in oracle_params(), n_spins in 1usize..=2, seed in any::<u64>()) {
        let cfg = OracleConfig { n_max: 3, n_spins, ..Default::default() };
        let p = SystemParams { n_emitters: n_spins as u64, ..p };
        let gen = build_generator(&p, &cfg).unwrap();
        let d = gen.dim();
        let l = gen.superoperator();
        for j in 0..d * d {
            let tr: Complex64 = (0..d).map(|k| l[(k * d + k, j)]).sum();
            prop_assert!(tr.norm() < 1e-12, "column {} trace {}", j, tr);
        }
        // random Hermitian input
        let mut x = seed | 1;
        let mut next = move || { x ^= x << 13; x ^= x >> 7; x ^= x << 17; (x % 2001) as f64 / 1000.0 - 1.0 };
        let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in r..d {
                let v = if r == c { Complex64::new(next(), 0.0) } else { Complex64::new(next(), next()) };
                rho[r * d + c] = v;
                rho[c * d + r] = v.conj();
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        let mut scratch = out.clone();
        gen.apply(&rho, &mut out, &mut scratch);
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                worst = worst.max((out[r * d + c] - out[c * d + r].conj()).norm());
            }
        }
        prop_assert!(worst < 1e-10);
    }
}

fn weak(n_spins: usize) -> (SystemParams, OracleConfig) {
    let p = SystemParams {
        n_emitters: n_spins as u64,
        g1: 0.2,
        omega_rabi: 0.6,
        gamma1: 0.1,
        gamma2_star: 0.02,
        delta0: 0.3,
        delta_c: -0.5,
        ..Default::default()
    };
    let cfg = OracleConfig { n_max: 8, n_spins, t_end: 20.0, sample_count: 41, ..Default::default() };
    (p, cfg)
}

#[test]
fn site_exchange_symmetry() {
    let (p, cfg) = weak(3);
    let gen = build_generator(&p, &cfg).unwrap();
    let rho0 = DensityMatrix::thermal(gen.basis, 0.0);
    let tr = evolve(&rho0, &gen, &cfg).unwrap();
    for rho in tr.states.iter().step_by(10) {
        let m12 = extract_moments_for_sites(rho, 0, 1);
        for (i, j) in [(1, 0), (0, 2), (2, 1)] {
            let other = extract_moments_for_sites(rho, i, j);
            assert!(m12.max_abs_diff(&other) < 1e-10, "sites ({i}, {j})");
        }
    }
}

#[test]
fn spin_variances_on_oracle_states() {
    for n in [2, 3] {
        let (p, cfg) = weak(n);
        let gen = build_generator(&p, &cfg).unwrap();
        let tr = evolve(&DensityMatrix::thermal(gen.basis, 0.0), &gen, &cfg).unwrap();
        let ex = MomentExtractor::new(gen.basis);
        for rho in &tr.states {
            let m = spin_metrics(&ex.extract(rho).state, &p);
            assert!(m.j_var.iter().all(|v| *v >= -1e-12), "{:?}", m.j_var);
            let total: f64 = m.j_var.iter().sum();
            assert!(total >= 0.5 * n as f64 - 1e-10, "N={n}: sum of variances {total}");
        }
    }
}

#[test]
fn single_emitter_uncertainty_product() {
    // V(φ)V(φ+π/2) is bounded below by (1/2)², reached by the ground state
    let (p, cfg) = weak(1);
    let gen = build_generator(&p, &cfg).unwrap();
    let mut vacuum = vec![0.0; cfg.n_max + 1];
    vacuum[0] = 1.0;
    let ground = DensityMatrix::product_diagonal(gen.basis, &vacuum, 0.0);
    let tr = evolve(&ground, &gen, &cfg).unwrap();
    let ex = MomentExtractor::new(gen.basis);
    let mut lowest = f64::INFINITY;
    for rho in &tr.states {
        let st = ex.extract(rho).state;
        for k in 0..16 {
            let phi = PI * k as f64 / 16.0;
            let prod = ensemble_quadrature_variance(&st, &p, phi) * ensemble_quadrature_variance(&st, &p, phi + PI / 2.0);
            lowest = lowest.min(prod);
        }
    }
    assert!(lowest >= 0.25 - 1e-12, "{lowest}");
    assert!((lowest - 0.25).abs() < 1e-12, "t = 0 is the ground state, got {lowest}");
}

#[test]
fn coherent_spin_state_sits_on_the_bound() {
    let n = 50.0;
    let p = SystemParams { n_emitters: n as u64, ..Default::default() };
    // every emitter along +x: ⟨σ⟩ = 1/2, products factorise
    let s = Complex64::new(0.5, 0.0);
    let st = MomentState {
        s,
        sds: Complex64::new(0.5, 0.0),
        ss: s * s,
        sds2: Complex64::new(0.25, 0.0),
        zz: Complex64::new(0.0, 0.0),
        ..MomentState::zero()
    };
    let m = spin_metrics(&st, &p);
    for axis in [1, 2] {
        assert!((m.xi2[axis].unwrap() - 1.0 / n).abs() < 1e-15);
        assert!(!m.entangled[axis]);
    }
    assert!((min_ensemble_quadrature(&st, &p).db_min).abs() < 1e-12);
}

#[test]
fn single_spin_steady_state_to_1e10() {
    for (omega, delta0, g2) in [(0.3, 0.0, 0.0), (1.0, -2.0, 0.05), (4.0, 5.0, 0.2)] {
        let p = SystemParams { omega_rabi: omega, delta0, gamma2_star: g2, gamma1: 0.1, ..Default::default() };
        let ss = find_steady_state(&p, &IntegrationConfig { abs_tol: 1e-12, ..Default::default() }).unwrap();
        let (s, sds) = single_spin_steady_state(&p);
        assert!((ss.state.s - s).norm() < 1e-10);
        assert!((ss.state.sds.re - sds).abs() < 1e-10);
    }
}

#[test]
fn root_find_and_long_integration_agree() {
    let p = SystemParams { n_emitters: 20, g1: 0.05, omega_rabi: 0.3, gamma1: 0.5, delta0: 2.0, delta_c: -1.0, ..Default::default() };
    let cfg = IntegrationConfig::default();
    let root = find_steady_state(&p, &cfg).unwrap();
    let model = MomentModel::new(p);
    let seed = cavsim::initial_thermal_state(&p);
    let opts = SteadyOptions { max_integration_windows: 200, ..Default::default() };
    let (long, _) = long_integration(&model, &seed, &cfg, &opts).unwrap();
    assert!(root.state.max_abs_diff(&long) < 1e-6, "{}", root.state.max_abs_diff(&long));
}

#[test]
fn halving_tolerances_converges() {
    let p = SystemParams { n_emitters: 100, g1: 0.05, omega_rabi: 0.5, gamma1: 0.1, delta0: 1.0, delta_c: 2.0, ..Default::default() };
    let coarse = IntegrationConfig { rel_tol: 1e-7, abs_tol: 1e-9, t_end: 30.0, sample_count: 31, ..Default::default() };
    let fine = IntegrationConfig { rel_tol: 5e-8, abs_tol: 5e-10, ..coarse };
    let init = cavsim::initial_thermal_state(&p);
    let a = integrate_trace(&p, &init, &coarse).unwrap();
    let b = integrate_trace(&p, &init, &fine).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        for m in Moment::ALL {
            let bound = 100.0 * (coarse.rel_tol * y.get(m).norm() + coarse.abs_tol);
            assert!((x.get(m) - y.get(m)).norm() < bound, "{}", m.name());
        }
    }
}

#[test]
fn trace_is_deterministic() {
    let p = SystemParams { n_emitters: 10, g1: 0.1, omega_rabi: 0.5, ..Default::default() };
    let cfg = IntegrationConfig { t_end: 10.0, sample_count: 101, ..Default::default() };
    let init = cavsim::initial_thermal_state(&p);
    let a = integrate_trace(&p, &init, &cfg).unwrap();
    let b = integrate_trace(&p, &init, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn basis_indexing_is_bijective() {
    let b = Basis { n_max: 4, n_spins: 3 };
    let mut seen = vec![false; b.dim()];
    for n in 0..=4 {
        for bits in 0..8 {
            let i = b.index(n, bits);
            assert!(!seen[i]);
            seen[i] = true;
        }
    }
}

#[test]
fn coupling_closed_form() {
    use cavsim::observables::{estimate_coupling, SPEED_OF_LIGHT as C};
    let (rho, l, lambda, gamma, n, zeta) = (1.76e23, 1e-3, 600e-9, 2e8, 2.4, 0.75);
    let est = estimate_coupling(rho, l, lambda, gamma, n, zeta).unwrap();
    // V = L²λ/8 and g₁ = (ζ/L)·√(3cγλ / (π n³))
    let v = l * l * lambda / 8.0;
    let g = zeta / l * (3.0 * C * gamma * lambda / (PI * n * n * n)).sqrt();
    assert!((est.v_eff / v - 1.0).abs() < 1e-12);
    assert!((est.g1 / g - 1.0).abs() < 1e-12);
    assert!((est.g1 / 3.7387e7 - 1.0).abs() < 1e-4);
    assert!((est.n_emitters / 1.32e10 - 1.0).abs() < 1e-12);

    let long = estimate_coupling(rho, 2.0 * l, lambda, gamma, n, zeta).unwrap();
    assert!((long.v_eff / est.v_eff - 4.0).abs() < 1e-12);
    assert!((long.n_emitters / est.n_emitters - 4.0).abs() < 1e-12);
    assert!((long.collective() / est.collective() - 1.0).abs() < 1e-12);
    assert!(estimate_coupling(rho, l, lambda, gamma, n, 1.5).is_err());
}
