//! Uniform linear array signal model: steering vectors, the selection function and
//! its zero set, and snapshot synthesis for physical plus virtual elements.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};

/// Nominal element spacing in wavelengths.
pub const HALF_WAVELENGTH: f64 = 0.5;
/// Largest allowed position error (wavelengths) on any element.
pub const MAX_POSITION_ERROR: f64 = 0.25;
/// Slack allowed when clamping an arcsine argument back into [-1, 1].
const ARCSIN_SLACK: f64 = 1e-12;

fn unit_phasor(phase: f64) -> C64 {
    C64::new(libm::cos(phase), libm::sin(phase))
}

fn check_angle(angle: f64) -> Result<()> {
    if angle.is_finite() && angle.abs() < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(angle))
    }
}

/// Element layout of a linear array.
///
/// Elements `0..n_physical` sit at `m * spacing + position_errors[m]`. Elements past
/// the physical aperture are virtual; they use nominal positions unless
/// `virtual_position_errors` supplies a perturbation for them.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    n_physical: usize,
    spacing_wavelengths: f64,
    position_errors: Vec<f64>,
    virtual_position_errors: Vec<f64>,
}

impl ArrayGeometry {
    /// Half-wavelength ULA with exact element positions.
    pub fn nominal(n_physical: usize) -> Self {
        Self {
            n_physical,
            spacing_wavelengths: HALF_WAVELENGTH,
            position_errors: alloc::vec![0.0; n_physical],
            virtual_position_errors: Vec::new(),
        }
    }

    pub fn new(n_physical: usize, spacing_wavelengths: f64, position_errors: Vec<f64>) -> Result<Self> {
        if n_physical == 0 {
            return Err(Error::ZeroElements);
        }
        if !(spacing_wavelengths > 0.0 && spacing_wavelengths <= 0.5) {
            return Err(Error::InvalidGeometry("spacing must lie in (0, 0.5] wavelengths"));
        }
        if position_errors.len() != n_physical {
            return Err(Error::InvalidGeometry("one position error per physical element"));
        }
        check_errors(&position_errors)?;
        Ok(Self {
            n_physical,
            spacing_wavelengths,
            position_errors,
            virtual_position_errors: Vec::new(),
        })
    }

    /// Perturbs virtual element `n_physical + i` by `errors[i]` wavelengths.
    pub fn with_virtual_errors(mut self, errors: Vec<f64>) -> Result<Self> {
        check_errors(&errors)?;
        self.virtual_position_errors = errors;
        Ok(self)
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_wavelengths
    }

    pub fn position_errors(&self) -> &[f64] {
        &self.position_errors
    }

    pub fn virtual_position_errors(&self) -> &[f64] {
        &self.virtual_position_errors
    }

    /// Same spacing, all perturbations removed.
    pub fn to_nominal(&self) -> Self {
        Self {
            n_physical: self.n_physical,
            spacing_wavelengths: self.spacing_wavelengths,
            position_errors: alloc::vec![0.0; self.n_physical],
            virtual_position_errors: Vec::new(),
        }
    }

    /// Position of element `m` in wavelengths.
    pub fn position(&self, m: usize) -> f64 {
        let nominal = m as f64 * self.spacing_wavelengths;
        let error = if m < self.n_physical {
            self.position_errors[m]
        } else {
            self.virtual_position_errors
                .get(m - self.n_physical)
                .copied()
                .unwrap_or(0.0)
        };
        nominal + error
    }

    /// Phase response `exp(j 2 pi pos_m u)` for direction sine `u`, scaled by `amplitude`.
    fn response(&self, sine: f64, n: usize, amplitude: f64) -> CVector {
        CVector::from_fn(n, |m, _| unit_phasor(2.0 * PI * self.position(m) * sine) * amplitude)
    }
}

fn check_errors(errors: &[f64]) -> Result<()> {
    if errors.iter().all(|e| e.is_finite() && e.abs() <= MAX_POSITION_ERROR) {
        Ok(())
    } else {
        Err(Error::InvalidGeometry("position error exceeds 0.25 wavelengths"))
    }
}

/// Unit-norm array response toward one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    angle: f64,
    values: CVector,
}

impl SteeringVector {
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn n_elements(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &CVector {
        &self.values
    }

    pub fn into_values(self) -> CVector {
        self.values
    }
}

/// Steering vector of the first `n` elements of `geometry` toward `angle` (radians).
pub fn steering_vector(angle: f64, n: usize, geometry: &ArrayGeometry) -> Result<SteeringVector> {
    if n == 0 {
        return Err(Error::ZeroElements);
    }
    check_angle(angle)?;
    Ok(SteeringVector {
        angle,
        values: geometry.response(libm::sin(angle), n, 1.0 / libm::sqrt(n as f64)),
    })
}

/// Steering vector of an `n`-element half-wavelength ULA with exact positions.
pub fn nominal_steering_vector(angle: f64, n: usize) -> Result<SteeringVector> {
    steering_vector(angle, n, &ArrayGeometry::nominal(n))
}

/// Nominal half-wavelength steering vector parameterized by the direction sine.
///
/// Accepts the closed range `[-1, 1]`, so endfire basis directions are representable.
pub fn steering_vector_from_sine(sine: f64, n: usize) -> Result<SteeringVector> {
    if n == 0 {
        return Err(Error::ZeroElements);
    }
    if !(sine.abs() <= 1.0) {
        return Err(Error::AngleOutOfRange(sine));
    }
    Ok(SteeringVector {
        angle: libm::asin(sine),
        values: ArrayGeometry::nominal(n).response(sine, n, 1.0 / libm::sqrt(n as f64)),
    })
}

/// Inner product `a^H(phi0) a(phi)` of two nominal `n`-element half-wavelength steering vectors.
pub fn selection_function(phi: f64, phi0: f64, n: usize) -> C64 {
    let step = PI * (libm::sin(phi) - libm::sin(phi0));
    let sum: C64 = (0..n).map(|m| unit_phasor(m as f64 * step)).sum();
    sum / n as f64
}

/// Closed form of [`selection_function`] in the reduced variable
/// `z = (sin(phi) - sin(phi0)) n / 2`.
pub fn selection_function_closed_form(phi: f64, phi0: f64, n: usize) -> C64 {
    let nf = n as f64;
    let z = (libm::sin(phi) - libm::sin(phi0)) * nf / 2.0;
    let denom = nf * libm::sin(PI * z / nf);
    if denom.abs() < 1e-300 {
        // z is a multiple of n, where every term of the sum equals one.
        return C64::new(1.0, 0.0);
    }
    unit_phasor((nf - 1.0) / nf * PI * z) * (libm::sin(PI * z) / denom)
}

/// Direction sines of the `n - 1` zeros of the selection function steered to `phi0`,
/// sorted ascending.
///
/// The zeros sit at `sin(phi0) + 2 z / n` for the nonzero integers `z` in the
/// half-open interval `[(-1 - sin phi0) n / 2, (1 - sin phi0) n / 2)`.
pub fn selection_zero_sines(phi0: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroElements);
    }
    check_angle(phi0)?;
    let s0 = libm::sin(phi0);
    let nf = n as f64;
    let left = (-1.0 - s0) * nf / 2.0;
    // Exactly n integers fit in a half-open interval of length n.
    let first = libm::ceil(left - ARCSIN_SLACK * nf) as i64;
    Ok((first..first + n as i64)
        .filter(|&z| z != 0)
        .map(|z| (s0 + 2.0 * z as f64 / nf).clamp(-1.0, 1.0))
        .collect())
}

/// Angles (radians) of the `n - 1` selection-function zeros, sorted ascending.
pub fn selection_zeros(phi0: f64, n: usize) -> Result<Vec<f64>> {
    Ok(selection_zero_sines(phi0, n)?.into_iter().map(libm::asin).collect())
}

/// Ground truth for one simulated run.
///
/// Powers are linear. Source amplitudes are referenced to the physical aperture: each
/// element of the array receives `sigma^2 / M` from a source of power `sigma^2`,
/// whether it is physical or virtual.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub soi_direction_true: f64,
    pub soi_direction_presumed: f64,
    pub interferer_directions_true: Vec<f64>,
    pub interferer_directions_nominal: Vec<f64>,
    pub soi_power: f64,
    pub interferer_powers: Vec<f64>,
    pub noise_power: f64,
    pub geometry: ArrayGeometry,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.interferer_directions_true.len() != self.interferer_powers.len()
            || self.interferer_directions_nominal.len() != self.interferer_powers.len()
        {
            return Err(Error::InvalidScenario("one direction and one power per interferer"));
        }
        let powers = core::iter::once(self.soi_power)
            .chain(self.interferer_powers.iter().copied())
            .chain(core::iter::once(self.noise_power));
        for p in powers {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidScenario("powers must be strictly positive"));
            }
        }
        let angles = [self.soi_direction_true, self.soi_direction_presumed]
            .into_iter()
            .chain(self.interferer_directions_true.iter().copied())
            .chain(self.interferer_directions_nominal.iter().copied());
        for a in angles {
            check_angle(a)?;
        }
        Ok(())
    }

    pub fn physical_elements(&self) -> usize {
        self.geometry.n_physical()
    }

    /// Response of the first `n` elements toward `angle` with per-element amplitude
    /// `1/sqrt(M)`; for `n = M` this is the unit-norm steering vector.
    pub fn source_response(&self, angle: f64, n: usize, use_true_geometry: bool) -> Result<CVector> {
        check_angle(angle)?;
        let amplitude = 1.0 / libm::sqrt(self.physical_elements() as f64);
        let sine = libm::sin(angle);
        Ok(if use_true_geometry {
            self.geometry.response(sine, n, amplitude)
        } else {
            self.geometry.to_nominal().response(sine, n, amplitude)
        })
    }

    /// Unit-norm steering vector of the physical array toward the true SOI direction.
    pub fn true_soi_steering(&self) -> Result<SteeringVector> {
        steering_vector(self.soi_direction_true, self.physical_elements(), &self.geometry)
    }

    /// Nominal unit-norm steering vector toward the presumed SOI direction.
    pub fn presumed_soi_steering(&self) -> Result<SteeringVector> {
        nominal_steering_vector(self.soi_direction_presumed, self.physical_elements())
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, std_per_component: f64) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * std_per_component, im * std_per_component)
}

/// `n_elements x k` snapshot matrix for `scenario`, deterministic in `seed`.
pub fn generate_snapshots(scenario: &Scenario, n_elements: usize, k: usize, seed: u64) -> Result<CMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_snapshots_with(scenario, n_elements, k, &mut rng)
}

/// As [`generate_snapshots`], drawing from a caller-supplied generator.
///
/// Waveforms and noise are circular complex Gaussian; each column draws the SOI
/// sample, then one sample per interferer, then one noise sample per element.
pub fn generate_snapshots_with<R: Rng + ?Sized>(
    scenario: &Scenario,
    n_elements: usize,
    k: usize,
    rng: &mut R,
) -> Result<CMatrix> {
    scenario.validate()?;
    let m = scenario.physical_elements();
    if n_elements < m {
        return Err(Error::DimensionTooSmall {
            extended: n_elements,
            physical: m,
        });
    }
    if k == 0 {
        return Err(Error::EmptyInput("snapshot count"));
    }
    let soi = scenario.source_response(scenario.soi_direction_true, n_elements, true)?;
    let interferers = scenario
        .interferer_directions_true
        .iter()
        .map(|&a| scenario.source_response(a, n_elements, true))
        .collect::<Result<Vec<_>>>()?;
    let soi_std = libm::sqrt(scenario.soi_power / 2.0);
    let interferer_std: Vec<f64> = scenario.interferer_powers.iter().map(|p| libm::sqrt(p / 2.0)).collect();
    let noise_std = libm::sqrt(scenario.noise_power / 2.0);

    let mut x = CMatrix::zeros(n_elements, k);
    for t in 0..k {
        let mut column = &soi * complex_gaussian(rng, soi_std);
        for (response, &std) in interferers.iter().zip(&interferer_std) {
            column.axpy(complex_gaussian(rng, std), response, C64::new(1.0, 0.0));
        }
        for e in 0..n_elements {
            column[e] += complex_gaussian(rng, noise_std);
        }
        x.set_column(t, &column);
    }
    Ok(x)
}
