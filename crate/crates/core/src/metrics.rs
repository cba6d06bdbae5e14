//! Output SINR, deviation from the optimum, and normalized beampatterns.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::array_model::{nominal_steering_vector, steering_vector_from_sine, Scenario, SteeringVector};
use crate::baselines::{optimal_weights, BeamformerWeights};
use crate::covariance::{true_ipnc, CovarianceEstimate};
use crate::error::{Error, Result};
use crate::linalg::{inner, CVector};

/// Default beampattern grid size, 0.1 degree spacing over [-90, 90] degrees.
pub const DEFAULT_BEAMPATTERN_POINTS: usize = 1801;
/// Gains are clamped here instead of reaching negative infinity.
pub const GAIN_FLOOR_DB: f64 = -400.0;

pub fn db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}

/// Linear SINR `sigma_s^2 |w^H a|^2 / (w^H R w)` of an arbitrary weight vector.
pub fn sinr_linear(w: &CVector, soi_power: f64, true_sv: &CVector, ipnc: &CovarianceEstimate) -> Result<f64> {
    if w.len() != true_sv.len() || w.len() != ipnc.n() {
        return Err(Error::DimensionMismatch {
            expected: ipnc.n(),
            got: w.len(),
        });
    }
    let denom = inner(w, &(ipnc.matrix() * w)).re;
    if !(denom > 0.0) {
        return Err(Error::ZeroOutputPower);
    }
    Ok(soi_power * inner(w, true_sv).norm_sqr() / denom)
}

/// Output SINR in dB measured with the true steering vector and true IPNC.
pub fn output_sinr(
    w: &BeamformerWeights,
    soi_power: f64,
    true_sv: &SteeringVector,
    true_ipnc: &CovarianceEstimate,
) -> Result<f64> {
    sinr_linear(w.values(), soi_power, true_sv.values(), true_ipnc).map(db)
}

/// SINR of the clairvoyant optimum for `scenario`, in dB.
pub fn optimal_sinr(scenario: &Scenario) -> Result<f64> {
    let m = scenario.physical_elements();
    let ipnc = true_ipnc(scenario, m)?;
    let sv = scenario.true_soi_steering()?;
    let w = optimal_weights(&ipnc, &sv)?;
    output_sinr(&w, scenario.soi_power, &sv, &ipnc)
}

/// Optimal SINR minus the SINR achieved by `w`, in dB.
pub fn sinr_deviation(w: &BeamformerWeights, scenario: &Scenario) -> Result<f64> {
    let m = scenario.physical_elements();
    let ipnc = true_ipnc(scenario, m)?;
    let sv = scenario.true_soi_steering()?;
    let best = output_sinr(&optimal_weights(&ipnc, &sv)?, scenario.soi_power, &sv, &ipnc)?;
    Ok(best - output_sinr(w, scenario.soi_power, &sv, &ipnc)?)
}

/// Power response normalized to a 0 dB peak.
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternCurve {
    pub angles: Vec<f64>,
    pub gains_db: Vec<f64>,
}

impl BeampatternCurve {
    /// Normalizes linear power values to a 0 dB maximum.
    pub fn from_power(angles: Vec<f64>, power: &[f64]) -> Result<Self> {
        if angles.is_empty() || angles.len() != power.len() {
            return Err(Error::EmptyInput("beampattern grid"));
        }
        let peak = power.iter().copied().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::ZeroOutputPower);
        }
        let gains_db = power
            .iter()
            .map(|&p| {
                if p > 0.0 {
                    db(p / peak).max(GAIN_FLOOR_DB)
                } else {
                    GAIN_FLOOR_DB
                }
            })
            .collect();
        Ok(Self { angles, gains_db })
    }

    /// Angle of the largest gain.
    pub fn peak_angle(&self) -> f64 {
        let (i, _) =
            self.gains_db.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |best, (i, &g)| if g > best.1 { (i, g) } else { best },
            );
        self.angles[i]
    }
}

/// `n` evenly spaced angles covering `[-pi/2, pi/2]`.
pub fn default_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n)
            .map(|i| -FRAC_PI_2 + i as f64 * core::f64::consts::PI / (n - 1) as f64)
            .collect(),
    }
}

/// Nominal steering vector at `angle`, accepting the endfire directions.
fn display_steering(angle: f64, n: usize) -> Result<CVector> {
    if angle.abs() < FRAC_PI_2 {
        nominal_steering_vector(angle, n).map(SteeringVector::into_values)
    } else {
        steering_vector_from_sine(libm::sin(angle).clamp(-1.0, 1.0), n).map(SteeringVector::into_values)
    }
}

/// `|w^H a(theta)|^2` over `grid` with nominal steering vectors.
pub fn response_power(w: &CVector, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&angle| Ok(inner(w, &display_steering(angle, w.len())?).norm_sqr()))
        .collect()
}

/// Normalized beampattern `20 log10 |w^H a(theta)|` over `grid`.
pub fn beampattern(w: &BeamformerWeights, grid: &[f64]) -> Result<BeampatternCurve> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("beampattern grid"));
    }
    let power = response_power(w.values(), grid)?;
    BeampatternCurve::from_power(grid.to_vec(), &power)
}
