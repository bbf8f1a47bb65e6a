#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qlagrange::HermitianOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(A + A^dagger) / 2` with iid complex Gaussian entries of variance `1/n`.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, hbar: f64) -> HermitianOperator {
    let scale = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let a = DMatrix::from_fn(n, n, |_, _| gaussian_c(rng) * scale);
    let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianOperator::new(h, hbar).expect("symmetrized matrix is Hermitian")
}

/// Rejection-samples [`random_hermitian`] until `cond(H^R) <= max_cond`.
pub fn random_well_conditioned<R: Rng>(rng: &mut R, n: usize, hbar: f64, max_cond: f64) -> HermitianOperator {
    loop {
        let h = random_hermitian(rng, n, hbar);
        let report = h.split().check_real_part_invertible(qlagrange::DEFAULT_INVERTIBILITY_TOL);
        if report.invertible && report.condition_number <= max_cond {
            return h;
        }
    }
}

/// Unit-norm complex Gaussian vector.
pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| gaussian_c(rng));
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v / Complex64::new(norm, 0.0)
}

pub fn random_real<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Haar-ish unitary from the QR factors of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| gaussian_c(rng));
    let qr = a.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) }
    });
    q * DMatrix::from_diagonal(&phases)
}

pub fn max_abs_c(v: &DVector<Complex64>) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn norm_c(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `[[H^R]]` rows as a TOML array of arrays.
pub fn toml_matrix(m: &DMatrix<f64>) -> toml::Value {
    toml::Value::Array(
        (0..m.nrows())
            .map(|i| toml::Value::Array((0..m.ncols()).map(|j| toml::Value::Float(m[(i, j)])).collect()))
            .collect(),
    )
}

/// An `inline_matrix` hamiltonian table for `h`.
pub fn inline_table(h: &HermitianOperator) -> toml::Table {
    let split = h.split();
    let mut t = toml::Table::new();
    t.insert("kind".into(), toml::Value::String("inline_matrix".into()));
    t.insert("re".into(), toml_matrix(split.h_real()));
    t.insert("im".into(), toml_matrix(split.h_imag()));
    t
}

pub fn vector_state(psi: &DVector<Complex64>) -> qlagrange::harness::InitialState {
    qlagrange::harness::InitialState::Vector {
        re: psi.iter().map(|z| z.re).collect(),
        im: psi.iter().map(|z| z.im).collect(),
        normalize: false,
    }
}

/// An equivalence config over `[0, t1]` with step `dt`.
pub fn equivalence_config(h: &HermitianOperator, psi: &DVector<Complex64>, t1: f64, dt: f64) -> qlagrange::RunConfig {
    qlagrange::RunConfig {
        hbar: Some(h.hbar()),
        t_span: Some([0.0, t1]),
        dt: Some(dt),
        method: "rk4".into(),
        outputs: Vec::new(),
        regularize: false,
        restrict_zero_modes: false,
        invertibility_tol: None,
        hamiltonian: inline_table(h),
        initial_state: Some(vector_state(psi)),
        thresholds: None,
        kg_dispersion: None,
    }
}
