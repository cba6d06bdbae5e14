//! Monte Carlo experiment runner.
//!
//! Every `(x, trial)` pair is an independent job. The mismatch draws of trial `t` come
//! from a stream seeded by `(seed, t)` and are shared by all grid points, so curves
//! compare methods on common random numbers; snapshot noise is seeded by
//! `(seed, t, x index)`. Results do not depend on the worker count.

use std::collections::BTreeMap;

use beamlab_core::array_model::{generate_snapshots, ArrayGeometry, Scenario};
use beamlab_core::baselines::{
    capon_integral_weights, default_loading, diagonal_loading_weights, interference_sectors, optimal_weights,
    scm_mvdr_weights, BeamformerWeights,
};
use beamlab_core::covariance::{sample_covariance, true_ipnc};
use beamlab_core::lcssp::{
    estimate_interferer_directions, run_lcssp, select_dimension, DimensionRule, LcsspConfig, RecordedSnapshots,
};
use beamlab_core::linalg::CMatrix;
use beamlab_core::metrics::{default_grid, output_sinr, response_power, BeampatternCurve};
use beamlab_core::seeding::derive_seed;
use beamlab_core::{CovarianceEstimate, Method};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, LSetting};
use crate::error::{HarnessError, Result};

/// Slack allowed before a method beating the clairvoyant optimum counts as a violation.
pub const DOMINANCE_TOLERANCE_DB: f64 = 1e-6;
/// Grid size of the Capon spectrum scan used when estimating interferer directions.
const CAPON_SCAN_POINTS: usize = 1799;

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Statistics of one method at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub mean_db: f64,
    pub std_db: f64,
    pub n_ok: usize,
    /// Per-trial SINR in dB; `None` for failed trials.
    pub raw: Vec<Option<f64>>,
}

impl SeriesPoint {
    fn from_raw(raw: Vec<Option<f64>>) -> Self {
        let ok: Vec<f64> = raw.iter().flatten().copied().collect();
        let n_ok = ok.len();
        let mean_db = if n_ok == 0 {
            f64::NAN
        } else {
            ok.iter().sum::<f64>() / n_ok as f64
        };
        let std_db = if n_ok < 2 {
            0.0
        } else {
            (ok.iter().map(|v| (v - mean_db).powi(2)).sum::<f64>() / (n_ok - 1) as f64).sqrt()
        };
        Self {
            mean_db,
            std_db,
            n_ok,
            raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSeries {
    pub method: Method,
    pub points: Vec<SeriesPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub x_index: usize,
    pub trial: usize,
    pub method: Option<Method>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Chosen extended dimension -> number of trials.
    pub l_histogram: BTreeMap<usize, usize>,
    /// Normalized projection error of every successful reconstruction run.
    pub epsilon_n: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub experiment: Experiment,
    pub x_label: &'static str,
    pub x_values: Vec<f64>,
    pub series: Vec<MethodSeries>,
    /// Clairvoyant optimum per grid point and trial (always computed).
    pub optimal_db: Vec<Vec<f64>>,
    pub failures: Vec<TrialFailure>,
    pub dominance_violations: usize,
    pub diagnostics: Diagnostics,
    /// Trial-averaged normalized beampatterns (beampattern experiment only).
    pub beampatterns: Vec<(Method, BeampatternCurve)>,
}

impl SweepResult {
    pub fn series(&self, method: Method) -> Option<&MethodSeries> {
        self.series.iter().find(|s| s.method == method)
    }

    /// Mean of `optimal - method` over the trials where the method succeeded.
    pub fn mean_deviation(&self, method: Method, x_index: usize) -> Option<f64> {
        let point = &self.series(method)?.points[x_index];
        let devs: Vec<f64> = point
            .raw
            .iter()
            .zip(&self.optimal_db[x_index])
            .filter_map(|(v, opt)| v.map(|v| opt - v))
            .collect();
        (!devs.is_empty()).then(|| devs.iter().sum::<f64>() / devs.len() as f64)
    }

    pub fn beampattern(&self, method: Method) -> Option<&BeampatternCurve> {
        self.beampatterns.iter().find(|(m, _)| *m == method).map(|(_, c)| c)
    }

    pub fn all_ok(&self) -> bool {
        self.failures.is_empty() && self.dominance_violations == 0
    }
}

struct TrialOutcome {
    sinr: Vec<Option<f64>>,
    optimal_db: f64,
    failures: Vec<(Option<Method>, String)>,
    violations: usize,
    l_chosen: Option<usize>,
    epsilon_n: Option<f64>,
    patterns: Vec<Option<Vec<f64>>>,
}

/// Experiment-wide quantities shared by every trial.
struct Plan<'a> {
    config: &'a ExperimentConfig,
    lcssp: LcsspConfig,
    /// Rows of each generated snapshot matrix.
    rows: usize,
    sectors: Vec<beamlab_core::baselines::AngleInterval>,
    grid: Vec<f64>,
}

impl<'a> Plan<'a> {
    fn new(config: &'a ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let m = config.m;
        let mut lcssp = LcsspConfig::new(
            m,
            config.presumed_soi_deg.to_radians(),
            config.sector_halfwidth_deg.to_radians(),
            config.interferers_deg.iter().map(|d| d.to_radians()).collect(),
        )
        .with_delta(config.delta);
        lcssp.dimension = match config.l {
            LSetting::Fixed(l) => DimensionRule::Fixed(l),
            LSetting::Auto => DimensionRule::Search {
                l_initial: m,
                l_max: config.effective_l_max(),
            },
        };
        let rows = match config.l {
            LSetting::Fixed(l) => l,
            LSetting::Auto if config.estimate_interferers => config.effective_l_max(),
            LSetting::Auto => select_dimension(&lcssp)?.l,
        };
        let grid = if config.experiment == Experiment::Beampattern {
            default_grid(config.beampattern_points)
        } else {
            Vec::new()
        };
        Ok(Self {
            config,
            sectors: interference_sectors(lcssp.presumed_soi, lcssp.soi_sector_halfwidth),
            lcssp,
            rows,
            grid,
        })
    }

    fn scenario(&self, x: f64, trial: usize) -> Result<(Scenario, usize)> {
        let cfg = self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, trial as u64, 0));
        let mut offset = |halfwidth: f64| -> f64 {
            if halfwidth > 0.0 {
                rng.random_range(-halfwidth..=halfwidth)
            } else {
                0.0
            }
        };
        let mismatch = cfg.experiment.uses_mismatch();
        let doa_hw = if mismatch { cfg.doa_mismatch_halfwidth_deg } else { 0.0 };
        let pos_hw = if mismatch { cfg.position_error_halfwidth_wl } else { 0.0 };

        let soi_true = (cfg.presumed_soi_deg + offset(doa_hw)).to_radians();
        let interferers_true: Vec<f64> = cfg
            .interferers_deg
            .iter()
            .map(|d| (d + offset(doa_hw)).to_radians())
            .collect();
        let errors: Vec<f64> = (0..cfg.m).map(|_| offset(pos_hw)).collect();
        let virtual_errors: Vec<f64> = if cfg.perturb_virtual {
            (cfg.m..self.rows).map(|_| offset(pos_hw)).collect()
        } else {
            Vec::new()
        };
        let geometry = ArrayGeometry::new(cfg.m, beamlab_core::array_model::HALF_WAVELENGTH, errors)?
            .with_virtual_errors(virtual_errors)?;

        let (snr, inr, k) = match cfg.experiment {
            Experiment::Beampattern | Experiment::SinrVsSnr => (x, cfg.effective_inr_db(), cfg.k),
            Experiment::SinrVsSnapshots => (cfg.snr_db, cfg.effective_inr_db(), x as usize),
            Experiment::SinrVsInr => (cfg.snr_db, x, cfg.k),
        };
        let scenario = Scenario {
            soi_direction_true: soi_true,
            soi_direction_presumed: cfg.presumed_soi_deg.to_radians(),
            interferer_directions_nominal: cfg.interferers_deg.iter().map(|d| d.to_radians()).collect(),
            interferer_directions_true: interferers_true,
            soi_power: db_to_linear(snr),
            interferer_powers: vec![db_to_linear(inr); cfg.interferers_deg.len()],
            noise_power: 1.0,
            geometry,
        };
        scenario.validate()?;
        Ok((scenario, k))
    }

    fn run_trial(&self, x_index: usize, x: f64, trial: usize) -> Result<TrialOutcome> {
        let cfg = self.config;
        let m = cfg.m;
        let (scenario, k) = self.scenario(x, trial)?;
        let seed = derive_seed(cfg.seed, trial as u64, 1 + x_index as u64);
        let snapshots = generate_snapshots(&scenario, self.rows, k, seed)?;
        let scm = sample_covariance(&snapshots.rows(0, m).into_owned())?;
        let ipnc = true_ipnc(&scenario, m)?;
        let true_sv = scenario.true_soi_steering()?;
        let presumed_sv = scenario.presumed_soi_steering()?;
        let optimal = optimal_weights(&ipnc, &true_sv)?;
        let optimal_db = output_sinr(&optimal, scenario.soi_power, &true_sv, &ipnc)?;

        let mut outcome = TrialOutcome {
            sinr: Vec::with_capacity(cfg.methods.len()),
            optimal_db,
            failures: Vec::new(),
            violations: 0,
            l_chosen: None,
            epsilon_n: None,
            patterns: Vec::new(),
        };
        for &method in &cfg.methods {
            let weights = match method {
                Method::Optimal => Ok(optimal.clone()),
                Method::ScmMvdr => scm_mvdr_weights(&scm, &presumed_sv),
                Method::DiagonalLoading => diagonal_loading_weights(&scm, &presumed_sv, default_loading(&scm)),
                Method::CaponIntegral => capon_integral_weights(&scm, &presumed_sv, &self.sectors, cfg.capon_samples),
                Method::Lcssp => self.lcssp(&scm, &snapshots, k).map(|(w, l, eps)| {
                    outcome.l_chosen = Some(l);
                    outcome.epsilon_n = eps;
                    w
                }),
            };
            let measured = weights.and_then(|w| {
                let sinr = output_sinr(&w, scenario.soi_power, &true_sv, &ipnc)?;
                let pattern = if self.grid.is_empty() {
                    None
                } else {
                    Some(response_power(w.values(), &self.grid)?)
                };
                Ok((sinr, pattern))
            });
            match measured {
                Ok((sinr, pattern)) => {
                    if sinr > optimal_db + DOMINANCE_TOLERANCE_DB {
                        outcome.violations += 1;
                        outcome.failures.push((
                            Some(method),
                            format!("SINR {sinr} dB exceeds the optimum {optimal_db} dB"),
                        ));
                    }
                    outcome.sinr.push(Some(sinr));
                    outcome.patterns.push(pattern);
                }
                Err(e) => {
                    outcome.failures.push((Some(method), e.to_string()));
                    outcome.sinr.push(None);
                    outcome.patterns.push(None);
                }
            }
        }
        Ok(outcome)
    }

    fn lcssp(
        &self,
        scm: &CovarianceEstimate,
        snapshots: &CMatrix,
        k: usize,
    ) -> beamlab_core::Result<(BeamformerWeights, usize, Option<f64>)> {
        let source = RecordedSnapshots {
            snapshots,
            physical_elements: self.config.m,
        };
        let out = if self.config.estimate_interferers {
            let mut cfg = self.lcssp.clone();
            cfg.nominal_interferers =
                estimate_interferer_directions(scm, &cfg, self.config.interferers_deg.len(), CAPON_SCAN_POINTS)?;
            run_lcssp(&source, &cfg, k, 0)?
        } else {
            run_lcssp(&source, &self.lcssp, k, 0)?
        };
        Ok((out.weights, out.l_chosen, out.epsilon_n))
    }
}

fn run_jobs<T: Send>(workers: usize, jobs: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 1 {
        return Ok(jobs());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(jobs))
}

/// Runs every trial of `config` and aggregates per-method statistics.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SweepResult> {
    let plan = Plan::new(config)?;
    let x_values = config.x_values();
    let jobs: Vec<(usize, usize)> = (0..x_values.len())
        .flat_map(|xi| (0..config.trials).map(move |t| (xi, t)))
        .collect();
    let run = |&(xi, t): &(usize, usize)| plan.run_trial(xi, x_values[xi], t);
    let outcomes: Vec<Result<TrialOutcome>> = if config.workers == 1 {
        jobs.iter().map(run).collect()
    } else {
        run_jobs(config.workers, || jobs.par_iter().map(run).collect())?
    };

    let n_methods = config.methods.len();
    let mut raw = vec![vec![vec![None; config.trials]; x_values.len()]; n_methods];
    let mut optimal_db = vec![vec![f64::NAN; config.trials]; x_values.len()];
    let mut failures = Vec::new();
    let mut dominance_violations = 0;
    let mut diagnostics = Diagnostics::default();
    let mut pattern_sums: Vec<(Vec<f64>, usize)> = vec![(vec![0.0; plan.grid.len()], 0); n_methods];

    for (&(xi, t), outcome) in jobs.iter().zip(outcomes) {
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                failures.push(TrialFailure {
                    x_index: xi,
                    trial: t,
                    method: None,
                    message: e.to_string(),
                });
                continue;
            }
        };
        optimal_db[xi][t] = outcome.optimal_db;
        for (mi, v) in outcome.sinr.iter().enumerate() {
            raw[mi][xi][t] = *v;
        }
        for (mi, pattern) in outcome.patterns.into_iter().enumerate() {
            if let Some(p) = pattern {
                let (sum, count) = &mut pattern_sums[mi];
                sum.iter_mut().zip(&p).for_each(|(s, v)| *s += v);
                *count += 1;
            }
        }
        dominance_violations += outcome.violations;
        failures.extend(outcome.failures.into_iter().map(|(method, message)| TrialFailure {
            x_index: xi,
            trial: t,
            method,
            message,
        }));
        if let Some(l) = outcome.l_chosen {
            *diagnostics.l_histogram.entry(l).or_insert(0) += 1;
        }
        diagnostics.epsilon_n.extend(outcome.epsilon_n);
    }

    let series = config
        .methods
        .iter()
        .zip(raw)
        .map(|(&method, per_x)| MethodSeries {
            method,
            points: per_x.into_iter().map(SeriesPoint::from_raw).collect(),
        })
        .collect();
    let mut beampatterns = Vec::new();
    for (&method, (sum, count)) in config.methods.iter().zip(pattern_sums) {
        if count > 0 && !plan.grid.is_empty() {
            let mean: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
            beampatterns.push((method, BeampatternCurve::from_power(plan.grid.clone(), &mean)?));
        }
    }
    Ok(SweepResult {
        experiment: config.experiment,
        x_label: config.experiment.x_label(),
        x_values,
        series,
        optimal_db,
        failures,
        dominance_violations,
        diagnostics,
        beampatterns,
    })
}
