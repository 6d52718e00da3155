//! Single-mode pure Gaussian states in the covariance formalism.
//!
//! Quadratures are `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, so the vacuum
//! has covariance `I/2` and a coherent state `|α⟩` has mean `√2 (Re α, Im α)`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `|det V − 1/4|` below this is treated as a pure state.
pub const PURITY_TOL: f64 = 1e-9;

type Mat2 = [[f64; 2]; 2];

fn rotation_matrix(angle: f64) -> Mat2 {
    let (s, c) = angle.sin_cos();
    [[c, -s], [s, c]]
}

fn mat_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// `M V Mᵀ`, symmetrised.
fn congruence(m: &Mat2, v: &Mat2) -> Mat2 {
    let mut out = mat_mul(&mat_mul(m, v), &transpose(m));
    let off = 0.5 * (out[0][1] + out[1][0]);
    out[0][1] = off;
    out[1][0] = off;
    out
}

/// Symplectic matrix of `S(r e^{2i·axis})` acting on state moments.
fn squeeze_matrix(r: f64, axis: f64) -> Mat2 {
    let rot = rotation_matrix(axis);
    let diag = [[(-r).exp(), 0.0], [0.0, r.exp()]];
    mat_mul(&mat_mul(&rot, &diag), &transpose(&rot))
}

fn squeezed_cov(r: f64, axis: f64) -> Mat2 {
    let rot = rotation_matrix(axis);
    let diag = [[0.5 * (-2.0 * r).exp(), 0.0], [0.0, 0.5 * (2.0 * r).exp()]];
    congruence(&rot, &diag)
}

/// Reduces an angle to `(−π/2, π/2]`.
fn reduce_half_turn(mut theta: f64) -> f64 {
    theta = theta.rem_euclid(PI);
    if theta > FRAC_PI_2 {
        theta -= PI;
    }
    theta
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    mean: [f64; 2],
    cov: Mat2,
}

/// Gaussian unitaries acting on one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianUnitary {
    /// `D(β)`.
    Displacement(Complex64),
    /// `S(r e^{2i·axis})`: quadrature along `axis` is squeezed by `e^{-r}`.
    Squeeze { r: f64, axis: f64 },
    /// `R_φ = exp(−iφ a†a)`.
    Rotation(f64),
}

impl GaussianUnitary {
    /// Squeeze along `axis`. A negative magnitude is folded into the axis
    /// (`S(−r)` on X equals `S(r)` along π/2).
    pub fn squeeze(r: f64, axis: f64) -> Self {
        if r < 0.0 {
            GaussianUnitary::Squeeze {
                r: -r,
                axis: reduce_half_turn(axis + FRAC_PI_2),
            }
        } else {
            GaussianUnitary::Squeeze {
                r,
                axis: reduce_half_turn(axis),
            }
        }
    }

    /// `S(ξ) = exp(½(ξ* a² − ξ a†²))`.
    pub fn squeeze_complex(xi: Complex64) -> Self {
        if xi.norm() == 0.0 {
            return GaussianUnitary::Squeeze { r: 0.0, axis: 0.0 };
        }
        GaussianUnitary::squeeze(xi.norm(), 0.5 * xi.arg())
    }

    pub fn displacement(beta: Complex64) -> Self {
        GaussianUnitary::Displacement(beta)
    }

    pub fn rotation(phi: f64) -> Self {
        GaussianUnitary::Rotation(phi)
    }

    /// Complex squeeze parameter `ξ`, if this is a squeeze.
    pub fn squeeze_parameter(&self) -> Option<Complex64> {
        match *self {
            GaussianUnitary::Squeeze { r, axis } => Some(Complex64::from_polar(r, 2.0 * axis)),
            _ => None,
        }
    }
}

/// `D(displacement) S(squeeze) |0⟩`, global phase dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureNormalForm {
    pub displacement: Complex64,
    pub squeeze: Complex64,
}

impl PureNormalForm {
    pub fn new(displacement: Complex64, squeeze: Complex64) -> Self {
        Self {
            displacement,
            squeeze,
        }
    }

    pub fn vacuum() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn coherent(alpha: Complex64) -> Self {
        Self::new(alpha, Complex64::new(0.0, 0.0))
    }

    pub fn state(&self) -> GaussianState {
        GaussianState::from_normal_form(self)
    }

    pub fn mean_photon(&self) -> f64 {
        self.displacement.norm_sqr() + self.squeeze.norm().sinh().powi(2)
    }
}

/// `D(alpha) S(r) |0⟩` with the squeeze along X.
pub fn make_dss(alpha: Complex64, r: f64) -> GaussianState {
    GaussianState {
        mean: [SQRT_2 * alpha.re, SQRT_2 * alpha.im],
        cov: [[0.5 * (-2.0 * r).exp(), 0.0], [0.0, 0.5 * (2.0 * r).exp()]],
    }
}

impl GaussianState {
    /// Validates that `cov` is symmetric positive definite.
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        if mean
            .iter()
            .chain(cov.iter().flatten())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidState("non-finite moments".into()));
        }
        let scale = cov[0][0].abs().max(cov[1][1].abs()).max(1.0);
        if (cov[0][1] - cov[1][0]).abs() > 1e-12 * scale {
            return Err(Error::InvalidState("covariance is not symmetric".into()));
        }
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        if cov[0][0] <= 0.0 || det <= 0.0 {
            return Err(Error::InvalidState(format!(
                "covariance is not positive definite (det = {det:e})"
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        make_dss(Complex64::new(0.0, 0.0), 0.0)
    }

    pub fn from_normal_form(nf: &PureNormalForm) -> Self {
        let (r, axis) = match GaussianUnitary::squeeze_complex(nf.squeeze) {
            GaussianUnitary::Squeeze { r, axis } => (r, axis),
            _ => unreachable!(),
        };
        GaussianState {
            mean: [SQRT_2 * nf.displacement.re, SQRT_2 * nf.displacement.im],
            cov: squeezed_cov(r, axis),
        }
    }

    pub fn mean(&self) -> [f64; 2] {
        self.mean
    }

    pub fn cov(&self) -> [[f64; 2]; 2] {
        self.cov
    }

    pub fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    pub fn is_pure(&self) -> bool {
        (self.det() - 0.25).abs() <= PURITY_TOL
    }

    fn require_pure(&self) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(Error::NotPure { det: self.det() })
        }
    }

    /// Mean photon number `⟨a†a⟩`.
    pub fn mean_photon(&self) -> f64 {
        0.5 * (self.cov[0][0] + self.cov[1][1] - 1.0)
            + 0.5 * (self.mean[0].powi(2) + self.mean[1].powi(2))
    }

    /// Complex amplitude `⟨a⟩`.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.mean[0], self.mean[1]) / SQRT_2
    }

    /// Moments of `U ρ U†`.
    pub fn apply(&self, u: &GaussianUnitary) -> GaussianState {
        match *u {
            GaussianUnitary::Displacement(beta) => GaussianState {
                mean: [
                    self.mean[0] + SQRT_2 * beta.re,
                    self.mean[1] + SQRT_2 * beta.im,
                ],
                cov: self.cov,
            },
            GaussianUnitary::Rotation(phi) => {
                let rot = rotation_matrix(-phi);
                GaussianState {
                    mean: mat_vec(&rot, self.mean),
                    cov: congruence(&rot, &self.cov),
                }
            }
            GaussianUnitary::Squeeze { r, axis } => {
                let m = squeeze_matrix(r, axis);
                GaussianState {
                    mean: mat_vec(&m, self.mean),
                    cov: congruence(&m, &self.cov),
                }
            }
        }
    }

    /// Applies `us` left to right (the first element acts first).
    pub fn apply_all<'a, I>(&self, us: I) -> GaussianState
    where
        I: IntoIterator<Item = &'a GaussianUnitary>,
    {
        us.into_iter().fold(*self, |s, u| s.apply(u))
    }

    pub fn wigner(&self, x: f64, p: f64) -> Result<f64> {
        let det = self.det();
        if det <= 0.0 || !det.is_finite() {
            return Err(Error::InvalidState(format!(
                "singular covariance (det = {det:e})"
            )));
        }
        let dx = x - self.mean[0];
        let dp = p - self.mean[1];
        let v = &self.cov;
        let quad = (v[1][1] * dx * dx - (v[0][1] + v[1][0]) * dx * dp + v[0][0] * dp * dp) / det;
        Ok((-0.5 * quad).exp() / (2.0 * PI * det.sqrt()))
    }

    /// Density of the X-quadrature homodyne outcome.
    pub fn homodyne_x_pdf(&self, x: f64) -> f64 {
        let var = self.cov[0][0];
        let d = x - self.mean[0];
        (-0.5 * d * d / var).exp() / (2.0 * PI * var).sqrt()
    }

    /// `D(β) S(ξ) |0⟩` parameters, with `|ξ| ≥ 0` and the squeeze axis in
    /// `(−π/2, π/2]` (axis 0 when unsqueezed).
    pub fn normal_form(&self) -> Result<PureNormalForm> {
        self.require_pure()?;
        let [[a, b], [_, c]] = self.cov;
        let half_sum = 0.5 * (a + c);
        let radius = (0.25 * (a - c).powi(2) + b * b).sqrt();
        let lambda_max = half_sum + radius;
        let lambda_min = half_sum - radius;
        let r = 0.25 * (lambda_max / lambda_min).ln();
        let squeeze = if r <= 1e-14 {
            Complex64::new(0.0, 0.0)
        } else {
            let major = 0.5 * (2.0 * b).atan2(a - c);
            let axis = reduce_half_turn(major + FRAC_PI_2);
            Complex64::from_polar(r, 2.0 * axis)
        };
        Ok(PureNormalForm {
            displacement: self.amplitude(),
            squeeze,
        })
    }
}

/// `|⟨a|b⟩|²` for pure Gaussian states.
pub fn pure_overlap_sq(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    a.require_pure()?;
    b.require_pure()?;
    let s = [
        [a.cov[0][0] + b.cov[0][0], a.cov[0][1] + b.cov[0][1]],
        [a.cov[1][0] + b.cov[1][0], a.cov[1][1] + b.cov[1][1]],
    ];
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let dx = a.mean[0] - b.mean[0];
    let dp = a.mean[1] - b.mean[1];
    let quad = (s[1][1] * dx * dx - (s[0][1] + s[1][0]) * dx * dp + s[0][0] * dp * dp) / det;
    Ok(((-0.5 * quad).exp() / det.sqrt()).clamp(0.0, 1.0))
}
