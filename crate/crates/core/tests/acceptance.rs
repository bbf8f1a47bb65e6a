//! Acceptance suite. Each test prints one `[criterion N] PASS|FAIL` line.
//!
//! Run with `cargo test -p qlagrange --test acceptance -- --nocapture`.

mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qlagrange::harness::{ConfigDocument, Harness};
use qlagrange::integrators::{exact_propagator, integrate};
use qlagrange::lagrangian::LagrangianState;
use qlagrange::linalg::{max_abs, sort_spectrum, spectrum_mismatch};
use qlagrange::representations::klein_gordon::kg_squared_kernel;
use qlagrange::representations::{build_kg_hamiltonian, harmonic_potential, kg_dispersion_check};
use qlagrange::{
    build_coordinate_hamiltonian, build_eigenbasis_hamiltonian, hamilton_function, Error, GridSpec,
    HermitianOperator, LegendreMap, PhaseGenerator, RealPhaseState, RunConfig, DEFAULT_INVERTIBILITY_TOL,
};

const RANDOM_SYSTEMS: usize = 20;
const MAX_COND: f64 = 1e3;

fn verdict(criterion: u32, passed: bool, detail: String) {
    println!("[criterion {criterion}] {} {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {criterion} failed: {detail}");
}

/// The 20 random systems shared by criteria 1, 2 and 5.
fn random_systems() -> Vec<(HermitianOperator, DVector<Complex64>)> {
    let mut rng = common::rng(0x5eed_0001);
    (0..RANDOM_SYSTEMS)
        .map(|i| {
            let n = 2 + i % 15;
            let h = common::random_well_conditioned(&mut rng, n, 1.0, MAX_COND);
            let psi = common::random_state(&mut rng, n);
            (h, psi)
        })
        .collect()
}

fn run(cfg: RunConfig) -> qlagrange::harness::EquivalenceRun {
    Harness::new().run_equivalence(&ConfigDocument::from_config(cfg, ".").unwrap()).unwrap()
}

#[test]
fn criterion_1_equivalence_of_formulations() {
    let mut worst = 0.0_f64;
    for (h, psi) in random_systems() {
        let r = run(common::equivalence_config(&h, &psi, 10.0, 1e-3)).report;
        assert!(r.singularity.is_none());
        worst = worst.max(r.max_state_deviation.unwrap());
    }
    verdict(1, worst <= 1e-6, format!("max ||psi_S - psi_L||_2 = {worst:.3e} (limit 1e-6, {RANDOM_SYSTEMS} systems)"));
}

#[test]
fn criterion_2_spectrum_equivalence() {
    let mut worst = 0.0_f64;
    for (h, _) in random_systems() {
        let split = h.split();
        let mut g = PhaseGenerator::build(&split, h.hbar()).eigenvalues();
        let mut l = LegendreMap::new(split, h.hbar(), DEFAULT_INVERTIBILITY_TOL).unwrap().system().eigenvalues();
        sort_spectrum(&mut g);
        sort_spectrum(&mut l);
        worst = worst.max(spectrum_mismatch(&g, &l));
    }
    verdict(2, worst <= 1e-9, format!("max sorted-eigenvalue mismatch = {worst:.3e} (limit 1e-9)"));
}

#[test]
fn criterion_3_eigenbasis_closed_form() {
    let energies = [1.0, 2.0, 5.0];
    let h = build_eigenbasis_hamiltonian(&energies, 1.0).unwrap();
    let system = LegendreMap::new(h.split(), 1.0, DEFAULT_INVERTIBILITY_TOL).unwrap().system();
    let s0 = LagrangianState::new(DVector::from_element(3, 1.0), DVector::zeros(3), 0.0).unwrap();
    let traj = integrate(&system.embed_first_order(), &s0.stacked(), 0.0, 1.0, 1e-4).unwrap();
    let (t, end) = traj.last().unwrap();
    let err = (0..3).fold(0.0_f64, |m, i| m.max((end[i] - (energies[i] * t).cos()).abs()));
    verdict(3, err <= 1e-8 && t == 1.0, format!("max |q_m(1) - cos(e_m)| = {err:.3e} (limit 1e-8)"));
}

#[test]
fn criterion_4_singular_basis() {
    let sigma_y = HermitianOperator::from_parts(
        &DMatrix::zeros(2, 2),
        &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
        1.0,
    )
    .unwrap();
    let mut rng = common::rng(4);
    let psi = common::random_state(&mut rng, 2);

    let rejected = matches!(LegendreMap::new(sigma_y.split(), 1.0, DEFAULT_INVERTIBILITY_TOL), Err(Error::SingularRealPart(_)));
    let singular = run(common::equivalence_config(&sigma_y, &psi, 10.0, 1e-3)).report;
    let reported = singular.singularity.is_some_and(|s| !s.invertible && s.min_abs_eigenvalue == 0.0)
        && singular.max_state_deviation.is_none();

    let mut cfg = common::equivalence_config(&sigma_y, &psi, 10.0, 1e-3);
    cfg.regularize = true;
    let rotated = run(cfg).report;
    let rotated_dev = rotated.max_state_deviation.unwrap_or(f64::INFINITY);

    let zero_mode = build_eigenbasis_hamiltonian(&[0.0, 1.0], 1.0).unwrap();
    let zero_rejected =
        matches!(LegendreMap::new(zero_mode.split(), 1.0, DEFAULT_INVERTIBILITY_TOL), Err(Error::SingularRealPart(_)));
    let mut cfg = common::equivalence_config(&zero_mode, &psi, 10.0, 1e-3);
    let zero_reported = run(cfg.clone()).report.singularity.is_some();
    cfg.restrict_zero_modes = true;
    let restricted = run(cfg).report;
    let restricted_dev = restricted.max_state_deviation.unwrap_or(f64::INFINITY);

    let passed = rejected
        && reported
        && rotated_dev <= 1e-6
        && zero_rejected
        && zero_reported
        && restricted_dev <= 1e-6;
    verdict(
        4,
        passed,
        format!(
            "sigma_y rejected: {}, rotated deviation {rotated_dev:.3e}; diag(0,1) rejected: {}, restricted deviation {restricted_dev:.3e}",
            rejected && reported,
            zero_rejected && zero_reported
        ),
    );
}

#[test]
fn criterion_5_conservation() {
    let (mut norm, mut energy) = (0.0_f64, 0.0_f64);
    for (h, psi) in random_systems() {
        let out = run(common::equivalence_config(&h, &psi, 10.0, 1e-3));
        norm = norm.max(out.report.norm_drift.unwrap());
        energy = energy.max(out.report.energy_drift.unwrap());

        // independent recomputation from the recorded trajectory
        let split = h.split();
        let traj = out.schrodinger.unwrap();
        let (t0, s0) = traj.iter().next().unwrap();
        let first = RealPhaseState::from_stacked(s0, t0).unwrap();
        let (t1, s1) = traj.last().unwrap();
        let last = RealPhaseState::from_stacked(s1, t1).unwrap();
        norm = norm.max((last.norm_sqr() - first.norm_sqr()).abs());
        energy = energy.max((hamilton_function(&last, &split, 1.0) - hamilton_function(&first, &split, 1.0)).abs());
    }
    verdict(5, norm <= 1e-8 && energy <= 1e-8, format!("norm drift {norm:.3e}, energy drift {energy:.3e} (limit 1e-8)"));
}

#[test]
fn criterion_6_coordinate_representation() {
    let grid = GridSpec::new(128, 32.0).unwrap();
    let h = build_coordinate_hamiltonian(&grid, &harmonic_potential(&grid, 1.0, 1.0), 1.0, 1.0).unwrap();
    let e0 = h.eigenvalues()[0];
    let ground_err = (e0 - 0.5).abs() / 0.5;

    let x = grid.positions();
    let mut psi0 = x.map(|x| (-0.5 * x * x).exp());
    psi0 /= psi0.norm();
    let system = LegendreMap::new(h.split(), 1.0, DEFAULT_INVERTIBILITY_TOL).unwrap().system();
    let s0 = LagrangianState::new(psi0.clone(), DVector::zeros(128), 0.0).unwrap();
    let traj = integrate(&system.embed_first_order(), &s0.stacked(), 0.0, 5.0, 1e-3).unwrap();
    let (t, end) = traj.last().unwrap();
    let expected = &psi0 * (e0 * t).cos();
    let pointwise = (0..128).fold(0.0_f64, |m, j| m.max((end[j] - expected[j]).abs()));

    verdict(
        6,
        ground_err <= 1e-4 && pointwise <= 1e-5,
        format!("E0 = {e0:.12} (rel err {ground_err:.3e}, limit 1e-4); max pointwise error at t = 5: {pointwise:.3e} (limit 1e-5)"),
    );
}

#[test]
fn criterion_7_klein_gordon_dispersion() {
    let grid = GridSpec::new(128, 32.0).unwrap();
    let d = kg_dispersion_check(&grid, 1.0, 1.0, 1.0, 4).unwrap();
    let k = 8.0 * std::f64::consts::PI / 32.0;
    let theory = k * k + 1.0;
    let rel = (d.omega_measured.powi(2) - theory).abs() / theory;

    let h = build_kg_hamiltonian(&grid, 1.0, 1.0, 1.0).unwrap().split();
    let squared = h.h_real() * h.h_real() - h.h_imag() * h.h_imag();
    let reference = kg_squared_kernel(&grid, 1.0, 1.0, 1.0).to_matrix();
    let sq_err = max_abs(&(&squared - &reference)) / max_abs(&reference).max(1.0);

    verdict(
        7,
        rel <= 1e-6 && sq_err <= 1e-10 && (d.k - k).abs() < 1e-14,
        format!("|w^2 - (k^2+1)|/(k^2+1) = {rel:.3e} (limit 1e-6, {} crossings); squared operator error {sq_err:.3e} (limit 1e-10)", d.crossings),
    );
}

/// Central difference gradient of `f` at `x`.
fn fd_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, delta: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[i] += delta;
        minus[i] -= delta;
        (f(&plus) - f(&minus)) / (2.0 * delta)
    })
}

/// `(absolute, relative)` mismatch; relative divides by `max(1, |reference|_inf)`.
fn mismatch(fd: &DVector<f64>, reference: &DVector<f64>) -> (f64, f64) {
    let abs = (fd - reference).amax();
    (abs, abs / reference.amax().max(1.0))
}

#[test]
fn criterion_8_gradient_checks() {
    const DELTA: f64 = 1e-5;
    let mut rng = common::rng(8);
    let (mut hamilton_err, mut el_err) = (0.0_f64, 0.0_f64);
    let (mut hamilton_abs, mut el_abs) = (0.0_f64, 0.0_f64);
    for i in 0..50 {
        let n = 2 + i % 7;
        let hbar = 0.5 + (i % 3) as f64 * 0.5;
        let h = common::random_well_conditioned(&mut rng, n, hbar, MAX_COND);
        let split = h.split();

        // Hamilton's equations: qdot = dH/dp, pdot = -dH/dq
        let q = common::random_real(&mut rng, n);
        let p = common::random_real(&mut rng, n);
        let state = RealPhaseState::new(q.clone(), p.clone(), 0.0).unwrap();
        let flow = PhaseGenerator::build(&split, hbar).rhs(&state).unwrap();
        let dh_dq = fd_gradient(|q| hamilton_function(&RealPhaseState::new(q.clone(), p.clone(), 0.0).unwrap(), &split, hbar), &q, DELTA);
        let dh_dp = fd_gradient(|p| hamilton_function(&RealPhaseState::new(q.clone(), p.clone(), 0.0).unwrap(), &split, hbar), &p, DELTA);
        for (fd, exact) in [(dh_dp, flow.rows(0, n).into_owned()), (-dh_dq, flow.rows(n, n).into_owned())] {
            let (abs, rel) = mismatch(&fd, &exact);
            hamilton_abs = hamilton_abs.max(abs);
            hamilton_err = hamilton_err.max(rel);
        }

        // Euler-Lagrange: d/dt dL/dqdot = dL/dq with qddot from the second-order system.
        // dL/dqdot is linear in (q, qdot), so its time derivative is dL/dqdot at (qdot, qddot).
        // Both sides are differenced; the reference is the analytic dL/dq.
        let map = LegendreMap::new(split.clone(), hbar, DEFAULT_INVERTIBILITY_TOL).unwrap();
        let system = map.system();
        let lag = |q: &DVector<f64>, qd: &DVector<f64>| {
            system.coeffs.evaluate(&LagrangianState::new(q.clone(), qd.clone(), 0.0).unwrap())
        };
        let qd = common::random_real(&mut rng, n);
        let s = LagrangianState::new(q.clone(), qd.clone(), 0.0).unwrap();
        let qdd = system.rhs(&s);
        let dl_dq = fd_gradient(|x| lag(x, &qd), &q, DELTA);
        let ddt_dl_dqd = fd_gradient(|v| lag(&qd, v), &qdd, DELTA);
        let c = &system.coeffs;
        let exact_dl_dq = (&c.l_qq + c.l_qq.transpose()) * &q + &c.l_qqd * &qd;
        for fd in [&ddt_dl_dqd, &dl_dq] {
            let (abs, rel) = mismatch(fd, &exact_dl_dq);
            el_abs = el_abs.max(abs);
            el_err = el_err.max(rel);
        }
    }
    verdict(
        8,
        hamilton_err <= 1e-6 && el_err <= 1e-6,
        format!(
            "relative residuals: Hamilton {hamilton_err:.3e}, Euler-Lagrange {el_err:.3e} (limit 1e-6, 50 states; absolute {hamilton_abs:.3e}, {el_abs:.3e})"
        ),
    );
}

#[test]
fn criterion_9_integrator_order() {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let y0 = DVector::from_vec(vec![1.0, 0.0]);
    let exact = exact_propagator(&a, 10.0) * &y0;
    let err = |dt: f64| {
        let traj = integrate(&a, &y0, 0.0, 10.0, dt).unwrap();
        (traj.last().unwrap().1 - &exact).norm()
    };
    let orders: Vec<f64> = [0.2, 0.1, 0.05].iter().map(|&dt| (err(dt) / err(dt / 2.0)).log2()).collect();
    let min = orders.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(9, min >= 3.9, format!("observed orders {orders:.3?} (limit >= 3.9)"));
}
