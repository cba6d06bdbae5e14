//! Sample, theoretical and interference-plus-noise covariance construction.

use crate::array_model::Scenario;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermitize, trace_re, CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceKind {
    Sample,
    Theoretical,
    TrueIpnc,
    Reconstructed,
}

/// Hermitian covariance matrix tagged with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    matrix: CMatrix,
    kind: CovarianceKind,
}

impl CovarianceEstimate {
    /// Wraps a square matrix, symmetrizing it to exact Hermitian form.
    pub fn new(mut matrix: CMatrix, kind: CovarianceKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        hermitize(&mut matrix);
        Ok(Self { matrix, kind })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn kind(&self) -> CovarianceKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.matrix)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }

    /// Same matrix multiplied by a positive scalar.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            matrix: self.matrix.scale(alpha),
            kind: self.kind,
        }
    }
}

/// `(1/K) X X^H` over the columns of `snapshots`.
pub fn sample_covariance(snapshots: &CMatrix) -> Result<CovarianceEstimate> {
    if snapshots.ncols() == 0 || snapshots.nrows() == 0 {
        return Err(Error::EmptyInput("snapshot matrix"));
    }
    let k = snapshots.ncols() as f64;
    let r = (snapshots * snapshots.adjoint()).unscale(k);
    CovarianceEstimate::new(r, CovarianceKind::Sample)
}

fn model_covariance(scenario: &Scenario, n: usize, soi_power: Option<f64>, use_true_geometry: bool) -> Result<CMatrix> {
    scenario.validate()?;
    let m = scenario.physical_elements();
    if n == 0 {
        return Err(Error::ZeroElements);
    }
    if use_true_geometry && n < m {
        return Err(Error::DimensionTooSmall {
            extended: n,
            physical: m,
        });
    }
    let mut r = CMatrix::from_diagonal_element(n, n, C64::new(scenario.noise_power, 0.0));
    let sources = soi_power.map(|p| (scenario.soi_direction_true, p)).into_iter().chain(
        scenario
            .interferer_directions_true
            .iter()
            .copied()
            .zip(scenario.interferer_powers.iter().copied()),
    );
    for (angle, power) in sources {
        let a = scenario.source_response(angle, n, use_true_geometry)?;
        r.gerc(C64::new(power, 0.0), &a, &a, C64::new(1.0, 0.0));
    }
    Ok(r)
}

/// Received-signal covariance `sigma_s^2 a a^H + sum_p sigma_p^2 a_p a_p^H + sigma_n^2 I`
/// at dimension `n`, using the true source directions.
///
/// Source amplitudes are referenced to the physical aperture, so the top-left `M x M`
/// block is the physical array covariance for every `n >= M`.
pub fn theoretical_covariance(scenario: &Scenario, n: usize, use_true_geometry: bool) -> Result<CovarianceEstimate> {
    let r = model_covariance(scenario, n, Some(scenario.soi_power), use_true_geometry)?;
    CovarianceEstimate::new(r, CovarianceKind::Theoretical)
}

/// Interference-plus-noise covariance with true directions and true geometry.
pub fn true_ipnc(scenario: &Scenario, n: usize) -> Result<CovarianceEstimate> {
    let r = model_covariance(scenario, n, None, true)?;
    CovarianceEstimate::new(r, CovarianceKind::TrueIpnc)
}

/// Top-left `m x m` principal block of an extended-array covariance.
pub fn extended_block(cov: &CovarianceEstimate, m: usize) -> Result<CovarianceEstimate> {
    if m > cov.n() {
        return Err(Error::DimensionTooSmall {
            extended: cov.n(),
            physical: m,
        });
    }
    if m == 0 {
        return Err(Error::ZeroElements);
    }
    Ok(CovarianceEstimate {
        matrix: cov.matrix.view((0, 0), (m, m)).into_owned(),
        kind: cov.kind,
    })
}
