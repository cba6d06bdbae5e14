//! Dense complex linear algebra helpers shared by the estimators.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Condition number above which a covariance is considered numerically singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Relative loading (times trace / n) applied once when the condition bound is exceeded.
pub const CONDITIONING_LOAD: f64 = 1e-10;

/// Replaces `m` with `(m + m^H) / 2`.
pub fn hermitize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> DVector<f64> {
    let mut values: alloc::vec::Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    DVector::from_vec(values)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|c| c.re).sum()
}

/// `a^H b`.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

fn condition_number(m: &CMatrix) -> f64 {
    let eig = hermitian_eigenvalues(m);
    let (lo, hi) = (eig[0], eig[eig.len() - 1]);
    if hi <= 0.0 || lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Cholesky-backed solver for Hermitian positive definite systems.
///
/// Matrices whose condition number exceeds [`MAX_CONDITION`] are loaded once with
/// `CONDITIONING_LOAD * trace / n` on the diagonal; if that is still not enough the
/// matrix is rejected.
pub struct HermitianSolver {
    factor: nalgebra::Cholesky<C64, nalgebra::Dyn>,
    loading: f64,
}

impl HermitianSolver {
    pub fn new(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyInput("covariance matrix"));
        }
        let mut work = m.clone();
        hermitize(&mut work);
        let mut loading = 0.0;
        let cond = condition_number(&work);
        if cond > MAX_CONDITION {
            loading = CONDITIONING_LOAD * trace_re(&work) / work.nrows() as f64;
            if !(loading > 0.0) {
                return Err(Error::SingularCovariance(cond));
            }
            for i in 0..work.nrows() {
                work[(i, i)] += C64::new(loading, 0.0);
            }
            let cond = condition_number(&work);
            if cond > MAX_CONDITION {
                return Err(Error::SingularCovariance(cond));
            }
        }
        let factor = work.cholesky().ok_or(Error::SingularCovariance(f64::INFINITY))?;
        Ok(Self { factor, loading })
    }

    /// Diagonal loading that was applied during conditioning (0 when none).
    pub fn loading(&self) -> f64 {
        self.loading
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        self.factor.solve(b)
    }
}

/// Minimum-variance distortionless weights `R^{-1} a / (a^H R^{-1} a)`.
pub fn mvdr(r: &CMatrix, a: &CVector) -> Result<CVector> {
    if r.nrows() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: r.nrows(),
            got: a.len(),
        });
    }
    let solver = HermitianSolver::new(r)?;
    let x = solver.solve(a);
    let denom = inner(a, &x);
    if !(denom.re > 0.0) {
        return Err(Error::SingularCovariance(f64::INFINITY));
    }
    Ok(x.unscale(denom.re))
}
