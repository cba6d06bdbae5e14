//! Interference-plus-noise covariance reconstruction by orthogonal projection on a
//! virtually extended array.
//!
//! The zeros of the selection function steered to the presumed signal direction give
//! an orthonormal steering basis of the `L`-dimensional array space. Keeping only the
//! basis directions outside the signal sector yields a projector `C` that removes the
//! desired signal while passing interference and noise. The physical `M x M` block of
//! `C R_L C^H` is the reconstructed covariance, and the beamformer is the MVDR solution
//! on that block. `L` grows from `M` until `C` passes the nominal interferers with a
//! normalized error below a threshold.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::array_model::{generate_snapshots, SteeringVector};
use crate::array_model::{nominal_steering_vector, selection_zero_sines, steering_vector_from_sine, Scenario};
use crate::baselines::{mvdr_weights, BeamformerWeights, Method};
use crate::covariance::{
    extended_block, sample_covariance, theoretical_covariance, CovarianceEstimate, CovarianceKind,
};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Tolerance used when deciding whether a basis angle sits on the sector boundary.
const SECTOR_EDGE_TOL: f64 = 1e-12;

/// Orthogonal projector onto the steering basis directions outside the signal sector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    matrix: CMatrix,
    retained_angles: Vec<f64>,
    retained_sines: Vec<f64>,
    excluded_angles: Vec<f64>,
    excluded_sines: Vec<f64>,
}

impl ProjectionMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Basis angles kept in the projector, ascending.
    pub fn retained_angles(&self) -> &[f64] {
        &self.retained_angles
    }

    /// The steering direction itself followed by the basis angles inside the sector.
    pub fn excluded_angles(&self) -> &[f64] {
        &self.excluded_angles
    }

    pub fn rank(&self) -> usize {
        self.retained_angles.len()
    }

    /// Unit-norm basis vectors spanning the range of the projector.
    pub fn retained_basis(&self) -> impl Iterator<Item = SteeringVector> + '_ {
        let l = self.dim();
        self.retained_sines
            .iter()
            .map(move |&s| steering_vector_from_sine(s, l).expect("basis sine lies in [-1, 1]"))
    }

    /// Unit-norm basis vectors spanning the null space of the projector.
    pub fn excluded_basis(&self) -> impl Iterator<Item = SteeringVector> + '_ {
        let l = self.dim();
        self.excluded_sines
            .iter()
            .map(move |&s| steering_vector_from_sine(s, l).expect("basis sine lies in [-1, 1]"))
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }
}

/// How the extended dimension `L` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionRule {
    /// Scan `L = l_initial, l_initial + 1, ..., l_max` and stop at the first dimension
    /// whose normalized error meets `delta`.
    Search { l_initial: usize, l_max: usize },
    /// Use this dimension unconditionally.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcsspConfig {
    /// Presumed desired-signal direction, also the steering direction of the basis.
    pub presumed_soi: f64,
    /// Half-width of the desired-signal sector.
    pub soi_sector_halfwidth: f64,
    pub delta: f64,
    pub dimension: DimensionRule,
    /// Interferer directions the normalized error is evaluated at.
    pub nominal_interferers: Vec<f64>,
}

impl LcsspConfig {
    pub const DEFAULT_DELTA: f64 = 0.05;

    /// Search configuration with `delta = 0.05`, `L` from `m` up to `8 m`.
    pub fn new(m: usize, presumed_soi: f64, soi_sector_halfwidth: f64, nominal_interferers: Vec<f64>) -> Self {
        Self {
            presumed_soi,
            soi_sector_halfwidth,
            delta: Self::DEFAULT_DELTA,
            dimension: DimensionRule::Search {
                l_initial: m,
                l_max: 8 * m,
            },
            nominal_interferers,
        }
    }

    pub fn with_fixed_dimension(mut self, l: usize) -> Self {
        self.dimension = DimensionRule::Fixed(l);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.presumed_soi.abs() < FRAC_PI_2) {
            return Err(Error::AngleOutOfRange(self.presumed_soi));
        }
        if !(self.soi_sector_halfwidth >= 0.0 && self.soi_sector_halfwidth < FRAC_PI_2) {
            return Err(Error::InvalidConfig("sector half-width must lie in [0, pi/2)"));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidConfig("delta must lie in (0, 1]"));
        }
        match self.dimension {
            DimensionRule::Search { l_initial, l_max } => {
                if l_initial < 2 || l_initial > l_max {
                    return Err(Error::InvalidConfig("need 2 <= l_initial <= l_max"));
                }
            }
            DimensionRule::Fixed(l) if l < 2 => {
                return Err(Error::InvalidConfig("extended dimension must be at least 2"));
            }
            DimensionRule::Fixed(_) => {}
        }
        if self.nominal_interferers.iter().any(|a| !(a.abs() < FRAC_PI_2)) {
            return Err(Error::InvalidConfig("interferer directions must lie in (-pi/2, pi/2)"));
        }
        Ok(())
    }

    fn in_sector(&self, angle: f64) -> bool {
        (angle - self.presumed_soi).abs() <= self.soi_sector_halfwidth + SECTOR_EDGE_TOL
    }
}

/// Projector of dimension `l` onto the selection-function zeros outside the signal sector.
pub fn build_projection(config: &LcsspConfig, l: usize) -> Result<ProjectionMatrix> {
    if l < 2 {
        return Err(Error::InvalidConfig("extended dimension must be at least 2"));
    }
    let sines = selection_zero_sines(config.presumed_soi, l)?;
    let mut retained_sines = Vec::new();
    let mut excluded_sines = alloc::vec![libm::sin(config.presumed_soi)];
    for s in sines {
        if config.in_sector(libm::asin(s)) {
            excluded_sines.push(s);
        } else {
            retained_sines.push(s);
        }
    }
    if retained_sines.is_empty() {
        return Err(Error::EmptyProjection(l));
    }
    let basis = CMatrix::from_columns(
        &retained_sines
            .iter()
            .map(|&s| steering_vector_from_sine(s, l).map(SteeringVector::into_values))
            .collect::<Result<Vec<_>>>()?,
    );
    let mut matrix = &basis * basis.adjoint();
    crate::linalg::hermitize(&mut matrix);
    Ok(ProjectionMatrix {
        matrix,
        retained_angles: retained_sines.iter().map(|&s| libm::asin(s)).collect(),
        excluded_angles: excluded_sines.iter().map(|&s| libm::asin(s)).collect(),
        retained_sines,
        excluded_sines,
    })
}

/// `||C B - B||_F / ||B||_F` with `B` the unit-norm steering vectors of `interferer_angles`.
pub fn normalized_error(c: &ProjectionMatrix, interferer_angles: &[f64]) -> Result<f64> {
    if interferer_angles.is_empty() {
        return Err(Error::EmptyInput("interferer angles"));
    }
    let l = c.dim();
    let b = CMatrix::from_columns(
        &interferer_angles
            .iter()
            .map(|&a| nominal_steering_vector(a, l).map(SteeringVector::into_values))
            .collect::<Result<Vec<_>>>()?,
    );
    let residual = c.matrix() * &b - &b;
    Ok(residual.norm() / b.norm())
}

/// Extended dimension chosen for a run, with its projector and normalized error.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionChoice {
    pub l: usize,
    pub projection: ProjectionMatrix,
    /// `None` when the dimension was fixed and no interferer directions were given.
    pub epsilon_n: Option<f64>,
}

/// Smallest `L` in the search range whose projector passes the nominal interferers with
/// normalized error at most `delta`. A fixed rule returns its dimension directly.
pub fn select_dimension(config: &LcsspConfig) -> Result<DimensionChoice> {
    config.validate()?;
    let (l_initial, l_max) = match config.dimension {
        DimensionRule::Fixed(l) => {
            let projection = build_projection(config, l)?;
            let epsilon_n = if config.nominal_interferers.is_empty() {
                None
            } else {
                Some(normalized_error(&projection, &config.nominal_interferers)?)
            };
            return Ok(DimensionChoice {
                l,
                projection,
                epsilon_n,
            });
        }
        DimensionRule::Search { l_initial, l_max } => (l_initial, l_max),
    };
    if config.nominal_interferers.is_empty() {
        return Err(Error::EmptyInput("interferer angles"));
    }
    let mut best = (l_initial, f64::INFINITY);
    for l in l_initial..=l_max {
        let projection = match build_projection(config, l) {
            Ok(p) => p,
            Err(Error::EmptyProjection(_)) => continue,
            Err(e) => return Err(e),
        };
        let err = normalized_error(&projection, &config.nominal_interferers)?;
        if err <= config.delta {
            return Ok(DimensionChoice {
                l,
                projection,
                epsilon_n: Some(err),
            });
        }
        if err < best.1 {
            best = (l, err);
        }
    }
    Err(Error::NoConvergence {
        delta: config.delta,
        l_max,
        best_l: best.0,
        best_error: best.1,
    })
}

/// Physical `m x m` block of `C R_L C^H`.
pub fn reconstruct_ipnc(c: &ProjectionMatrix, cov_l: &CovarianceEstimate, m: usize) -> Result<CovarianceEstimate> {
    if c.dim() != cov_l.n() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: cov_l.n(),
        });
    }
    if m == 0 {
        return Err(Error::ZeroElements);
    }
    if m > c.dim() {
        return Err(Error::DimensionTooSmall {
            extended: c.dim(),
            physical: m,
        });
    }
    let projected = c.matrix() * cov_l.matrix() * c.matrix().adjoint();
    let full = CovarianceEstimate::new(projected, CovarianceKind::Reconstructed)?;
    extended_block(&full, m)
}

/// MVDR weights on the reconstructed covariance toward the presumed steering vector.
pub fn lcssp_weights(ipnc: &CovarianceEstimate, presumed_sv: &SteeringVector) -> Result<BeamformerWeights> {
    mvdr_weights(ipnc.matrix(), presumed_sv, Method::Lcssp)
}

/// Supplies the extended-array covariance for a requested dimension.
pub trait ExtendedDataSource {
    fn physical_elements(&self) -> usize;

    /// Covariance of the first `l` (physical then virtual) elements from `k` snapshots.
    fn extended_covariance(&self, l: usize, k: usize, seed: u64) -> Result<CovarianceEstimate>;
}

/// Simulated snapshots drawn from a scenario.
#[derive(Debug, Clone, Copy)]
pub struct SimulatedArray<'a>(pub &'a Scenario);

impl ExtendedDataSource for SimulatedArray<'_> {
    fn physical_elements(&self) -> usize {
        self.0.physical_elements()
    }

    fn extended_covariance(&self, l: usize, k: usize, seed: u64) -> Result<CovarianceEstimate> {
        sample_covariance(&generate_snapshots(self.0, l, k, seed)?)
    }
}

/// Exact model covariance of a scenario (the infinite-snapshot limit).
#[derive(Debug, Clone, Copy)]
pub struct ExactCovariance<'a>(pub &'a Scenario);

impl ExtendedDataSource for ExactCovariance<'_> {
    fn physical_elements(&self) -> usize {
        self.0.physical_elements()
    }

    fn extended_covariance(&self, l: usize, _k: usize, _seed: u64) -> Result<CovarianceEstimate> {
        theoretical_covariance(self.0, l, true)
    }
}

/// Snapshots recorded beforehand; row `i` belongs to element `i`, physical rows first.
///
/// A request for `l` elements uses the first `l` rows and the first `k` columns.
#[derive(Debug, Clone, Copy)]
pub struct RecordedSnapshots<'a> {
    pub snapshots: &'a CMatrix,
    pub physical_elements: usize,
}

impl ExtendedDataSource for RecordedSnapshots<'_> {
    fn physical_elements(&self) -> usize {
        self.physical_elements
    }

    fn extended_covariance(&self, l: usize, k: usize, _seed: u64) -> Result<CovarianceEstimate> {
        if l > self.snapshots.nrows() {
            return Err(Error::DimensionMismatch {
                expected: l,
                got: self.snapshots.nrows(),
            });
        }
        let k = k.min(self.snapshots.ncols());
        sample_covariance(&self.snapshots.view((0, 0), (l, k)).into_owned())
    }
}

/// Result of a full reconstruction run.
#[derive(Debug, Clone)]
pub struct LcsspOutput {
    pub weights: BeamformerWeights,
    pub l_chosen: usize,
    pub epsilon_n: Option<f64>,
    pub projection: ProjectionMatrix,
    pub ipnc: CovarianceEstimate,
}

/// Dimension selection, extended sample covariance, reconstruction and weight design.
pub fn run_lcssp<S: ExtendedDataSource + ?Sized>(
    source: &S,
    config: &LcsspConfig,
    k: usize,
    seed: u64,
) -> Result<LcsspOutput> {
    let m = source.physical_elements();
    let choice = select_dimension(config)?;
    if choice.l < m {
        return Err(Error::DimensionTooSmall {
            extended: choice.l,
            physical: m,
        });
    }
    let cov_l = source.extended_covariance(choice.l, k, seed)?;
    let ipnc = reconstruct_ipnc(&choice.projection, &cov_l, m)?;
    let presumed = nominal_steering_vector(config.presumed_soi, m)?;
    let weights = lcssp_weights(&ipnc, &presumed)?;
    Ok(LcsspOutput {
        weights,
        l_chosen: choice.l,
        epsilon_n: choice.epsilon_n,
        projection: choice.projection,
        ipnc,
    })
}

/// Estimates `count` interferer directions as the strongest local maxima of the Capon
/// spectrum `1 / (a^H R^{-1} a)` of an `M`-element covariance outside the signal sector.
///
/// The spectrum is scanned on a uniform grid of `grid_points` angles strictly inside
/// `(-pi/2, pi/2)`.
pub fn estimate_interferer_directions(
    scm: &CovarianceEstimate,
    config: &LcsspConfig,
    count: usize,
    grid_points: usize,
) -> Result<Vec<f64>> {
    if grid_points < 3 {
        return Err(Error::InvalidConfig("spectrum grid needs at least three points"));
    }
    let m = scm.n();
    let solver = crate::linalg::HermitianSolver::new(scm.matrix())?;
    let step = core::f64::consts::PI / (grid_points + 1) as f64;
    let grid: Vec<f64> = (1..=grid_points).map(|i| -FRAC_PI_2 + i as f64 * step).collect();
    let spectrum = grid
        .iter()
        .map(|&angle| {
            let a = nominal_steering_vector(angle, m)?.into_values();
            Ok(1.0 / crate::linalg::inner(&a, &solver.solve(&a)).re)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut peaks: Vec<(f64, f64)> = (1..grid.len() - 1)
        .filter(|&i| spectrum[i] > spectrum[i - 1] && spectrum[i] >= spectrum[i + 1])
        .filter(|&i| !config.in_sector(grid[i]))
        .map(|i| (spectrum[i], grid[i]))
        .collect();
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<f64> = peaks.into_iter().take(count).map(|(_, angle)| angle).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}
