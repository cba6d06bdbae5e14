//! Statistical and cross-path checks on the signal model, covariance builders and
//! baselines.

use beamlab_core::array_model::{generate_snapshots, nominal_steering_vector, ArrayGeometry, Scenario};
use beamlab_core::baselines::{capon_integral_ipnc, interference_sectors, optimal_weights, DEFAULT_CAPON_SAMPLES};
use beamlab_core::covariance::{extended_block, sample_covariance, theoretical_covariance, true_ipnc};
use beamlab_core::lcssp::{lcssp_weights, run_lcssp, LcsspConfig, SimulatedArray};
use beamlab_core::linalg::{hermitian_eigenvalues, CMatrix, CVector, C64};
use beamlab_core::metrics::{optimal_sinr, output_sinr, sinr_linear};
use beamlab_core::{CovarianceEstimate, CovarianceKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn deg(d: f64) -> f64 {
    d.to_radians()
}

fn paper_scenario(geometry: ArrayGeometry) -> Scenario {
    Scenario {
        soi_direction_true: deg(2.0),
        soi_direction_presumed: 0.0,
        interferer_directions_true: vec![deg(-30.0), deg(30.0)],
        interferer_directions_nominal: vec![deg(-30.0), deg(30.0)],
        soi_power: 10.0,
        interferer_powers: vec![1e3, 1e3],
        noise_power: 1.0,
        geometry,
    }
}

#[test]
fn sample_covariance_converges_to_model() {
    let s = paper_scenario(ArrayGeometry::nominal(10));
    let x = generate_snapshots(&s, 10, 100_000, 11).unwrap();
    let r = sample_covariance(&x).unwrap();
    let t = theoretical_covariance(&s, 10, true).unwrap();
    let rel = (r.matrix() - t.matrix()).norm() / t.matrix().norm();
    assert!(rel < 0.02, "relative Frobenius error {rel}");
}

#[test]
fn noise_only_snapshots_are_white() {
    let mut s = paper_scenario(ArrayGeometry::nominal(4));
    s.soi_power = 1e-300;
    s.interferer_powers = vec![1e-300, 1e-300];
    s.noise_power = 2.0;
    let r = sample_covariance(&generate_snapshots(&s, 6, 50_000, 3).unwrap()).unwrap();
    let target = CMatrix::identity(6, 6).scale(2.0);
    assert!((r.matrix() - &target).norm() / target.norm() < 0.03);
}

#[test]
fn noise_free_single_source_is_rank_one() {
    let mut s = paper_scenario(ArrayGeometry::nominal(5));
    s.interferer_directions_true.clear();
    s.interferer_directions_nominal.clear();
    s.interferer_powers.clear();
    s.noise_power = 1e-300;
    let x = generate_snapshots(&s, 8, 7, 5).unwrap();
    let a = s.source_response(s.soi_direction_true, 8, true).unwrap();
    for t in 0..7 {
        let col = x.column(t).into_owned();
        let coef = a.dotc(&col) / a.dotc(&a);
        assert!((col - &a * coef).norm() < 1e-12);
    }
}

#[test]
fn snapshot_generation_is_bit_reproducible() {
    let g = ArrayGeometry::new(10, 0.5, vec![0.02; 10]).unwrap();
    let s = paper_scenario(g);
    assert_eq!(
        generate_snapshots(&s, 20, 50, 99).unwrap(),
        generate_snapshots(&s, 20, 50, 99).unwrap()
    );
    assert_ne!(
        generate_snapshots(&s, 20, 50, 99).unwrap(),
        generate_snapshots(&s, 20, 50, 100).unwrap()
    );
}

#[test]
fn sample_covariance_matches_naive_sum() {
    // Orthogonal equal-norm columns (DFT vectors).
    let n = 6;
    let k = 4;
    let x = CMatrix::from_fn(n, k, |i, j| {
        let ph = 2.0 * std::f64::consts::PI * (i * j) as f64 / n as f64;
        C64::new(ph.cos(), ph.sin())
    });
    let mut naive = CMatrix::zeros(n, n);
    for t in 0..k {
        for i in 0..n {
            for j in 0..n {
                naive[(i, j)] += x[(i, t)] * x[(j, t)].conj();
            }
        }
    }
    naive /= C64::new(k as f64, 0.0);
    let r = sample_covariance(&x).unwrap();
    assert!((r.matrix() - &naive).norm() < 1e-12);
    // ||x||^2 / K times a rank-k projector.
    let p = r.matrix().scale(k as f64 / n as f64);
    assert!((&p * &p - &p).norm() < 1e-12);
}

#[test]
fn theoretical_covariance_matches_outer_product_sum() {
    let g = ArrayGeometry::new(
        10,
        0.5,
        vec![0.01, -0.02, 0.03, 0.0, 0.04, -0.05, 0.02, 0.01, 0.0, -0.01],
    )
    .unwrap();
    let s = paper_scenario(g.clone());
    let r = theoretical_covariance(&s, 10, true).unwrap();
    let mut brute = CMatrix::zeros(10, 10);
    let pos: Vec<f64> = (0..10).map(|m| 0.5 * m as f64 + g.position_errors()[m]).collect();
    let sources = [(s.soi_direction_true, s.soi_power), (deg(-30.0), 1e3), (deg(30.0), 1e3)];
    for i in 0..10 {
        for j in 0..10 {
            let mut v = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            for (theta, p) in sources {
                let ph = 2.0 * std::f64::consts::PI * (pos[i] - pos[j]) * theta.sin();
                v += C64::new(ph.cos(), ph.sin()) * (p / 10.0);
            }
            brute[(i, j)] = v;
        }
    }
    assert!((r.matrix() - brute).norm() < 1e-9);
    assert!(r.min_eigenvalue() >= -1e-10 * r.trace() / 10.0);
}

#[test]
fn true_ipnc_is_model_minus_signal() {
    let s = paper_scenario(ArrayGeometry::nominal(10));
    let r = theoretical_covariance(&s, 10, true).unwrap();
    let ipnc = true_ipnc(&s, 10).unwrap();
    let a = s.true_soi_steering().unwrap().into_values();
    let diff = r.matrix() - (&a * a.adjoint()).scale(s.soi_power);
    assert!((diff - ipnc.matrix()).norm() < 1e-9);
    assert!((ipnc.trace() - (10.0 + 2000.0)).abs() < 1e-9);
    let mut quiet = s.clone();
    quiet.interferer_directions_true.clear();
    quiet.interferer_directions_nominal.clear();
    quiet.interferer_powers.clear();
    assert!((true_ipnc(&quiet, 10).unwrap().matrix() - CMatrix::identity(10, 10)).norm() < 1e-15);
}

#[test]
fn extended_block_equals_physical_model() {
    let s = paper_scenario(ArrayGeometry::nominal(10));
    let ext = theoretical_covariance(&s, 20, true).unwrap();
    let direct = theoretical_covariance(&s, 10, true).unwrap();
    let block = extended_block(&ext, 10).unwrap();
    assert!((block.matrix() - direct.matrix()).norm() < 1e-12);
    assert!(block.min_eigenvalue() >= -1e-10 * block.trace() / 10.0);
}

#[test]
fn optimal_weights_beat_random_search() {
    let g = ArrayGeometry::new(
        10,
        0.5,
        vec![0.03, -0.01, 0.0, 0.02, -0.04, 0.05, -0.02, 0.01, 0.0, 0.03],
    )
    .unwrap();
    let s = paper_scenario(g);
    let ipnc = true_ipnc(&s, 10).unwrap();
    let sv = s.true_soi_steering().unwrap();
    let w = optimal_weights(&ipnc, &sv).unwrap();
    let best = sinr_linear(w.values(), s.soi_power, sv.values(), &ipnc).unwrap();
    let closed = s.soi_power
        * sv.values()
            .dotc(
                &beamlab_core::linalg::HermitianSolver::new(ipnc.matrix())
                    .unwrap()
                    .solve(sv.values()),
            )
            .re;
    assert!((10.0 * best.log10() - 10.0 * closed.log10()).abs() < 1e-8);
    assert!((optimal_sinr(&s).unwrap() - 10.0 * closed.log10()).abs() < 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let v = CVector::from_fn(10, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        assert!(sinr_linear(&v, s.soi_power, sv.values(), &ipnc).unwrap() <= best * (1.0 + 1e-12));
    }
    let scaled = optimal_weights(&ipnc.scaled(17.0), &sv).unwrap();
    assert!((scaled.values() - w.values()).norm() < 1e-12);
}

#[test]
fn capon_quadrature_converges() {
    // Interferers at 10 dB INR: the Capon peaks are then wider than the 200-point grid step.
    let mut s = paper_scenario(ArrayGeometry::nominal(10));
    s.interferer_powers = vec![10.0, 10.0];
    let scm = sample_covariance(&generate_snapshots(&s, 10, 200, 4).unwrap()).unwrap();
    let sectors = interference_sectors(0.0, deg(6.0));
    let coarse = capon_integral_ipnc(&scm, &sectors, DEFAULT_CAPON_SAMPLES).unwrap();
    let fine = capon_integral_ipnc(&scm, &sectors, 2 * DEFAULT_CAPON_SAMPLES).unwrap();
    let rel = (coarse.matrix() - fine.matrix()).norm() / fine.matrix().norm();
    assert!(rel < 0.01, "{rel}");
    let eig = hermitian_eigenvalues(coarse.matrix());
    assert!(eig[0] >= -1e-10 * coarse.trace() / 10.0);
}

#[test]
fn noise_only_run_gives_presumed_direction() {
    let mut s = paper_scenario(ArrayGeometry::nominal(10));
    s.soi_power = 1e-300;
    s.interferer_powers = vec![1e-300, 1e-300];
    let cfg = LcsspConfig::new(10, 0.0, deg(6.0), vec![deg(-30.0), deg(30.0)]).with_fixed_dimension(20);
    let out = run_lcssp(&SimulatedArray(&s), &cfg, 100_000, 8).unwrap();
    // Same weights as the MVDR solution on the noise-only reconstruction.
    let noise_block = beamlab_core::lcssp::reconstruct_ipnc(
        &out.projection,
        &CovarianceEstimate::new(CMatrix::identity(20, 20), CovarianceKind::Theoretical).unwrap(),
        10,
    )
    .unwrap();
    let a = nominal_steering_vector(0.0, 10).unwrap();
    let reference = lcssp_weights(&noise_block, &a).unwrap();
    let rel = (out.weights.values() - reference.values()).norm() / reference.values().norm();
    assert!(rel < 0.05, "{rel}");
    let cos = a.values().dotc(out.weights.values()).norm() / out.weights.values().norm();
    assert!(cos > 0.9, "{cos}");
}

#[test]
fn single_snapshot_run_succeeds() {
    let s = paper_scenario(ArrayGeometry::nominal(10));
    let cfg = LcsspConfig::new(10, 0.0, deg(6.0), vec![deg(-30.0), deg(30.0)]).with_fixed_dimension(20);
    let out = run_lcssp(&SimulatedArray(&s), &cfg, 1, 8).unwrap();
    assert!(out.weights.distortionless_residual() < 1e-10);
    assert_eq!(out.l_chosen, 20);
}

#[test]
fn finite_sample_run_is_distortionless_with_nulls() {
    let s = paper_scenario(ArrayGeometry::nominal(10));
    let cfg = LcsspConfig::new(10, 0.0, deg(6.0), vec![deg(-30.0), deg(30.0)]).with_fixed_dimension(20);
    let out = run_lcssp(&SimulatedArray(&s), &cfg, 50, 2024).unwrap();
    assert!(out.weights.distortionless_residual() < 1e-10);
    let a = nominal_steering_vector(0.0, 10).unwrap();
    let main = a.values().dotc(out.weights.values()).norm_sqr();
    for angle in [-30.0, 30.0] {
        let ap = nominal_steering_vector(deg(angle), 10).unwrap();
        let depth = 10.0 * (ap.values().dotc(out.weights.values()).norm_sqr() / main).log10();
        assert!(depth < -40.0, "{angle}: {depth}");
    }
    let ipnc = true_ipnc(&s, 10).unwrap();
    let sv = s.true_soi_steering().unwrap();
    assert!(output_sinr(&out.weights, s.soi_power, &sv, &ipnc).unwrap() <= optimal_sinr(&s).unwrap() + 1e-9);
}
