//! Complex 2×2 matrices in the Pauli basis.
//!
//! Every matrix is stored as `M = c_id·I + c_x·σx + c_y·σy + c_z·σz` with
//! complex coefficients. Products, traces and determinants are evaluated
//! directly on the coefficients:
//!
//! ```text
//! (a0 + a·σ)(b0 + b·σ) = (a0 b0 + a·b) I + (a0 b + b0 a + i a×b)·σ
//! det M = c_id² − c_x² − c_y² − c_z²
//! ```
//!
//! The even kernels [`cos_even`] and [`sinc_even`] take the *square* of their
//! argument, so `cos(x)` and `sin(x)/x` are available for purely imaginary `x`
//! without ever forming a complex square root.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this magnitude of `q` the even kernels switch to their Taylor series.
pub const TAYLOR_CROSSOVER: f64 = 1e-8;

/// Default number of series terms used by [`expm`].
pub const DEFAULT_SERIES_TERMS: usize = 30;

const SERIES_TAIL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("series exponential did not converge: last term is {relative_tail:.3e} of the sum")]
    PrecisionNotMet { relative_tail: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// A 2×2 complex matrix in Pauli decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub c_id: Complex64,
    pub c_x: Complex64,
    pub c_y: Complex64,
    pub c_z: Complex64,
}

/// Builds a matrix from its Pauli coefficients, rejecting NaN or infinite input.
pub fn pauli_compose(
    c_id: Complex64,
    c_x: Complex64,
    c_y: Complex64,
    c_z: Complex64,
) -> Result<Mat2, AlgebraError> {
    let m = Mat2::from_pauli(c_id, c_x, c_y, c_z);
    if m.is_finite() {
        Ok(m)
    } else {
        Err(AlgebraError::NonFinite("Pauli coefficients"))
    }
}

impl Mat2 {
    /// Unchecked constructor; see [`pauli_compose`] for the validating one.
    pub const fn from_pauli(
        c_id: Complex64,
        c_x: Complex64,
        c_y: Complex64,
        c_z: Complex64,
    ) -> Self {
        Self {
            c_id,
            c_x,
            c_y,
            c_z,
        }
    }

    pub const fn identity() -> Self {
        Self::from_pauli(ONE, ZERO, ZERO, ZERO)
    }

    pub const fn zero() -> Self {
        Self::from_pauli(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn sigma_x() -> Self {
        Self::from_pauli(ZERO, ONE, ZERO, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Self::from_pauli(ZERO, ZERO, ONE, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Self::from_pauli(ZERO, ZERO, ZERO, ONE)
    }

    /// Row-major element form `[[m00, m01], [m10, m11]]`.
    pub fn to_elements(&self) -> [[Complex64; 2]; 2] {
        [
            [self.c_id + self.c_z, self.c_x - I * self.c_y],
            [self.c_x + I * self.c_y, self.c_id - self.c_z],
        ]
    }

    pub fn from_elements(m: [[Complex64; 2]; 2]) -> Self {
        Self {
            c_id: (m[0][0] + m[1][1]) * 0.5,
            c_x: (m[0][1] + m[1][0]) * 0.5,
            c_y: I * (m[0][1] - m[1][0]) * 0.5,
            c_z: (m[0][0] - m[1][1]) * 0.5,
        }
    }

    pub fn is_finite(&self) -> bool {
        is_finite(self.c_id) && is_finite(self.c_x) && is_finite(self.c_y) && is_finite(self.c_z)
    }

    pub fn trace(&self) -> Complex64 {
        self.c_id * 2.0
    }

    pub fn det(&self) -> Complex64 {
        self.c_id * self.c_id - self.c_x * self.c_x - self.c_y * self.c_y - self.c_z * self.c_z
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_pauli(self.c_id * s, self.c_x * s, self.c_y * s, self.c_z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::from_pauli(self.c_id * s, self.c_x * s, self.c_y * s, self.c_z * s)
    }

    /// Frobenius norm of the element matrix, `sqrt(2·Σ|c|²)`.
    pub fn norm(&self) -> f64 {
        (2.0 * (self.c_id.norm_sqr()
            + self.c_x.norm_sqr()
            + self.c_y.norm_sqr()
            + self.c_z.norm_sqr()))
        .sqrt()
    }

    /// Largest element-wise absolute difference between the two element matrices.
    pub fn max_elem_diff(&self, other: &Mat2) -> f64 {
        let a = self.to_elements();
        let b = other.to_elements();
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((a[r][c] - b[r][c]).norm());
            }
        }
        worst
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut exp: u64) -> Self {
        let mut base = *self;
        let mut acc = Mat2::identity();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mat_mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = mat_mul(&base, &base);
            }
        }
        acc
    }
}

/// Matrix product `a · b`.
pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let dot = a.c_x * b.c_x + a.c_y * b.c_y + a.c_z * b.c_z;
    // i (a × b)
    let cross_x = I * (a.c_y * b.c_z - a.c_z * b.c_y);
    let cross_y = I * (a.c_z * b.c_x - a.c_x * b.c_z);
    let cross_z = I * (a.c_x * b.c_y - a.c_y * b.c_x);
    Mat2 {
        c_id: a.c_id * b.c_id + dot,
        c_x: a.c_id * b.c_x + b.c_id * a.c_x + cross_x,
        c_y: a.c_id * b.c_y + b.c_id * a.c_y + cross_y,
        c_z: a.c_id * b.c_z + b.c_id * a.c_z + cross_z,
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        mat_mul(&self, &rhs)
    }
}

impl Mul<Complex64> for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Complex64) -> Mat2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: f64) -> Mat2 {
        self.scale_re(rhs)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::from_pauli(
            self.c_id + rhs.c_id,
            self.c_x + rhs.c_x,
            self.c_y + rhs.c_y,
            self.c_z + rhs.c_z,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::from_pauli(-self.c_id, -self.c_x, -self.c_y, -self.c_z)
    }
}

pub fn trace(m: &Mat2) -> Complex64 {
    m.trace()
}

pub fn det(m: &Mat2) -> Complex64 {
    m.det()
}

/// `cos(√q)` continued to `cosh(√−q)` for negative `q`.
pub fn cos_even(q: f64) -> Result<f64, AlgebraError> {
    if !q.is_finite() {
        return Err(AlgebraError::NonFinite("cos_even argument"));
    }
    Ok(cos_even_raw(q))
}

/// `sin(√q)/√q` continued to `sinh(√−q)/√−q` for negative `q`, with value 1 at 0.
pub fn sinc_even(q: f64) -> Result<f64, AlgebraError> {
    if !q.is_finite() {
        return Err(AlgebraError::NonFinite("sinc_even argument"));
    }
    Ok(sinc_even_raw(q))
}

/// Unchecked [`cos_even`]; non-finite input propagates.
pub(crate) fn cos_even_raw(q: f64) -> f64 {
    if q.abs() < TAYLOR_CROSSOVER {
        1.0 - q / 2.0 + q * q / 24.0
    } else if q > 0.0 {
        q.sqrt().cos()
    } else {
        (-q).sqrt().cosh()
    }
}

/// Unchecked [`sinc_even`]; non-finite input propagates.
pub(crate) fn sinc_even_raw(q: f64) -> f64 {
    if q.abs() < TAYLOR_CROSSOVER {
        1.0 - q / 6.0 + q * q / 120.0
    } else if q > 0.0 {
        let x = q.sqrt();
        x.sin() / x
    } else {
        let y = (-q).sqrt();
        y.sinh() / y
    }
}

/// `exp(−i·H·t)` for traceless `H` with `H² = (h_sq_t_sq / t²)·I`:
/// `cos(ht)·I − i·sinc(ht)·t·H`.
///
/// `h_sq_t_sq` must equal `(h·t)²` for the supplied generator; this is not checked.
pub fn segment_propagator_closed(h_sq_t_sq: f64, t: f64, hamiltonian: &Mat2) -> Mat2 {
    let c = cos_even_raw(h_sq_t_sq);
    let s = sinc_even_raw(h_sq_t_sq);
    Mat2::identity().scale_re(c) + hamiltonian.scale(-I * (s * t))
}

/// `exp(m)` by a truncated power series over `m / substeps`, raised back to the
/// `substeps`-th power.
pub fn expm_series(m: &Mat2, terms: usize, substeps: u64) -> Result<Mat2, AlgebraError> {
    if terms < 20 {
        return Err(AlgebraError::InvalidArgument(
            "expm_series needs at least 20 terms",
        ));
    }
    if substeps == 0 {
        return Err(AlgebraError::InvalidArgument(
            "expm_series needs at least one substep",
        ));
    }
    if !m.is_finite() {
        return Err(AlgebraError::NonFinite("expm_series input"));
    }
    let step = m.scale_re(1.0 / substeps as f64);
    let mut sum = Mat2::identity();
    let mut term = Mat2::identity();
    for k in 1..=terms {
        term = mat_mul(&term, &step).scale_re(1.0 / k as f64);
        sum = sum + term;
    }
    let tail = term.norm() / sum.norm().max(f64::MIN_POSITIVE);
    if tail.is_nan() || tail > SERIES_TAIL_TOL {
        return Err(AlgebraError::PrecisionNotMet {
            relative_tail: tail,
        });
    }
    Ok(sum.powi(substeps))
}

/// Substep count `2^⌈log2(max(1, ‖m‖))⌉` used by [`expm`].
pub fn adaptive_substeps(m: &Mat2) -> u64 {
    let n = m.norm().max(1.0);
    let k = n.log2().ceil().max(0.0) as u32;
    1_u64 << k.min(62)
}

/// [`expm_series`] with [`DEFAULT_SERIES_TERMS`] and norm-adaptive substeps.
pub fn expm(m: &Mat2) -> Result<Mat2, AlgebraError> {
    expm_series(m, DEFAULT_SERIES_TERMS, adaptive_substeps(m))
}
