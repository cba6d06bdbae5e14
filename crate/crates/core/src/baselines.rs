//! Reference beamformers: the clairvoyant optimum, sample-matrix MVDR, diagonal
//! loading, and a Capon-spectrum integral reconstruction of the interference-plus-noise
//! covariance.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;
use core::str::FromStr;

use crate::array_model::{nominal_steering_vector, SteeringVector};
use crate::covariance::{CovarianceEstimate, CovarianceKind};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, inner, mvdr, CMatrix, CVector, HermitianSolver, C64};

/// Default number of quadrature points for [`capon_integral_ipnc`].
pub const DEFAULT_CAPON_SAMPLES: usize = 200;

/// Beamformer that produced a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Optimal,
    ScmMvdr,
    DiagonalLoading,
    CaponIntegral,
    Lcssp,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Optimal,
        Method::ScmMvdr,
        Method::DiagonalLoading,
        Method::CaponIntegral,
        Method::Lcssp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Optimal => "optimal",
            Method::ScmMvdr => "scm_mvdr",
            Method::DiagonalLoading => "diagonal_loading",
            Method::CaponIntegral => "capon_integral",
            Method::Lcssp => "lcssp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or(Error::InvalidConfig("unknown method name"))
    }
}

/// Complex weight vector together with the steering vector it is distortionless toward.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerWeights {
    values: CVector,
    presumed_sv: SteeringVector,
    method: Method,
}

impl BeamformerWeights {
    pub fn values(&self) -> &CVector {
        &self.values
    }

    pub fn presumed_sv(&self) -> &SteeringVector {
        &self.presumed_sv
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `|w^H a - 1|` for the presumed steering vector.
    pub fn distortionless_residual(&self) -> f64 {
        (inner(&self.values, self.presumed_sv.values()) - C64::new(1.0, 0.0)).norm()
    }
}

/// MVDR weights for covariance `r` toward `sv`, labelled with `method`.
pub fn mvdr_weights(r: &CMatrix, sv: &SteeringVector, method: Method) -> Result<BeamformerWeights> {
    let values = mvdr(r, sv.values())?;
    Ok(BeamformerWeights {
        values,
        presumed_sv: sv.clone(),
        method,
    })
}

/// Clairvoyant optimum built from the true interference-plus-noise covariance and
/// the true steering vector.
pub fn optimal_weights(true_ipnc: &CovarianceEstimate, true_sv: &SteeringVector) -> Result<BeamformerWeights> {
    mvdr_weights(true_ipnc.matrix(), true_sv, Method::Optimal)
}

/// Sample matrix inversion beamformer.
pub fn scm_mvdr_weights(scm: &CovarianceEstimate, presumed_sv: &SteeringVector) -> Result<BeamformerWeights> {
    mvdr_weights(scm.matrix(), presumed_sv, Method::ScmMvdr)
}

/// Ten times the smallest sample eigenvalue, a noise-floor estimate.
pub fn default_loading(scm: &CovarianceEstimate) -> f64 {
    10.0 * hermitian_eigenvalues(scm.matrix())[0].max(0.0)
}

pub fn diagonal_loading_weights(
    scm: &CovarianceEstimate,
    presumed_sv: &SteeringVector,
    loading: f64,
) -> Result<BeamformerWeights> {
    if !(loading >= 0.0 && loading.is_finite()) {
        return Err(Error::InvalidConfig("loading must be a finite nonnegative number"));
    }
    let n = scm.n();
    let loaded = scm.matrix() + CMatrix::from_diagonal_element(n, n, C64::new(loading, 0.0));
    mvdr_weights(&loaded, presumed_sv, Method::DiagonalLoading)
}

/// Closed angular interval `[start, end]` in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleInterval {
    pub start: f64,
    pub end: f64,
}

impl AngleInterval {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Complement of the signal sector `[presumed - halfwidth, presumed + halfwidth]`
/// within `[-pi/2, pi/2]`.
pub fn interference_sectors(presumed: f64, halfwidth: f64) -> Vec<AngleInterval> {
    let lo = presumed - halfwidth;
    let hi = presumed + halfwidth;
    let mut out = Vec::new();
    if lo > -FRAC_PI_2 {
        out.push(AngleInterval {
            start: -FRAC_PI_2,
            end: lo.min(FRAC_PI_2),
        });
    }
    if hi < FRAC_PI_2 {
        out.push(AngleInterval {
            start: hi.max(-FRAC_PI_2),
            end: FRAC_PI_2,
        });
    }
    out
}

/// Midpoints of `n` equal cells covering the union of `sectors`, plus the cell width.
fn midpoint_grid(sectors: &[AngleInterval], n: usize) -> (Vec<f64>, f64) {
    let total: f64 = sectors.iter().map(AngleInterval::width).sum();
    let step = total / n as f64;
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let mut offset = (i as f64 + 0.5) * step;
        for (j, s) in sectors.iter().enumerate() {
            if offset <= s.width() || j + 1 == sectors.len() {
                points.push(s.start + offset.min(s.width()));
                break;
            }
            offset -= s.width();
        }
    }
    (points, step)
}

/// Interference-plus-noise covariance reconstructed by integrating the Capon spectrum
/// `1 / (a^H R^{-1} a)` over `sectors` with an `n_samples`-point midpoint rule.
pub fn capon_integral_ipnc(
    scm: &CovarianceEstimate,
    sectors: &[AngleInterval],
    n_samples: usize,
) -> Result<CovarianceEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidConfig("Capon integral needs at least two samples"));
    }
    if sectors.is_empty() || sectors.iter().any(|s| !(s.width() > 0.0)) {
        return Err(Error::InvalidConfig("interference sectors must be nonempty intervals"));
    }
    let m = scm.n();
    let solver = HermitianSolver::new(scm.matrix())?;
    let (grid, step) = midpoint_grid(sectors, n_samples);
    let mut r = CMatrix::zeros(m, m);
    for angle in grid {
        let a = nominal_steering_vector(angle, m)?.into_values();
        let denom = inner(&a, &solver.solve(&a)).re;
        if !(denom > 0.0) {
            return Err(Error::SingularCovariance(f64::INFINITY));
        }
        r.gerc(C64::new(step / denom, 0.0), &a, &a, C64::new(1.0, 0.0));
    }
    CovarianceEstimate::new(r, CovarianceKind::Reconstructed)
}

/// MVDR weights on the Capon-integral reconstruction.
pub fn capon_integral_weights(
    scm: &CovarianceEstimate,
    presumed_sv: &SteeringVector,
    sectors: &[AngleInterval],
    n_samples: usize,
) -> Result<BeamformerWeights> {
    let r = capon_integral_ipnc(scm, sectors, n_samples)?;
    mvdr_weights(r.matrix(), presumed_sv, Method::CaponIntegral)
}
