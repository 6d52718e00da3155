//! Noise channels: phase diffusion (Gaussian random rotation) and thermal
//! background (Gaussian random displacement).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    displacement_matrix, hermitize, mixture_density, FockDensity, WeightedGaussian,
    DEFAULT_TAIL_TOL, UNITARY_TRACE_LOSS,
};
use crate::gaussian::{make_dss, GaussianUnitary};
use crate::numeric::quadrature::{gauss_hermite, normal_average_rule};
use crate::numeric::special::ln_binomial;

pub const DEFAULT_QUAD_ORDER: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDiffusionSpec {
    sigma: f64,
    quad_order: usize,
}

impl PhaseDiffusionSpec {
    /// `quad_order` must be odd so that the rule contains `φ = 0`.
    pub fn new(sigma: f64, quad_order: usize) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::param(
                "sigma",
                format!("must be finite and >= 0, got {sigma}"),
            ));
        }
        if quad_order.is_multiple_of(2) {
            return Err(Error::param(
                "quad_order",
                format!("must be odd, got {quad_order}"),
            ));
        }
        Ok(Self { sigma, quad_order })
    }

    pub fn with_sigma(sigma: f64) -> Result<Self> {
        Self::new(sigma, DEFAULT_QUAD_ORDER)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// Rotation angles and probability weights; a single node at σ = 0.
    pub fn angles(&self) -> Vec<(f64, f64)> {
        if self.sigma == 0.0 {
            return vec![(0.0, 1.0)];
        }
        normal_average_rule(self.sigma, self.quad_order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    n_t: f64,
}

impl ThermalSpec {
    pub fn new(n_t: f64) -> Result<Self> {
        if !(n_t >= 0.0 && n_t.is_finite()) {
            return Err(Error::param(
                "n_t",
                format!("must be finite and >= 0, got {n_t}"),
            ));
        }
        Ok(Self { n_t })
    }

    pub fn n_t(&self) -> f64 {
        self.n_t
    }
}

/// `D(d) ρ_th(n_t) D†(d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedThermal {
    pub displacement: Complex64,
    pub n_t: f64,
}

impl DisplacedThermal {
    pub fn mean_photon(&self) -> f64 {
        self.displacement.norm_sqr() + self.n_t
    }

    /// Fock matrix, exact on `{|0⟩, …, |cutoff⟩}`.
    pub fn density(&self, cutoff: usize) -> FockDensity {
        // thermal state is diagonal, so (D ρ D†)_{ij} = Σ_k D_ik p_k D*_jk
        // needs all k; the geometric tail past cutoff is summed on a
        // working space large enough for the tail to vanish
        let extra = thermal_tail_extent(self.n_t, cutoff);
        let work = displacement_matrix(self.displacement, extra);
        let ratio = self.n_t / (1.0 + self.n_t);
        let dim = cutoff + 1;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        let mut p = 1.0 / (1.0 + self.n_t);
        for k in 0..=extra {
            if p == 0.0 {
                break;
            }
            for i in 0..dim {
                let a = work[[i, k]] * p;
                for j in 0..=i {
                    m[[i, j]] += a * work[[j, k]].conj();
                }
            }
            p *= ratio;
        }
        for i in 0..dim {
            for j in 0..i {
                m[[j, i]] = m[[i, j]].conj();
            }
        }
        hermitize(&mut m);
        FockDensity::from_parts(m, None)
    }
}

fn thermal_tail_extent(n_t: f64, cutoff: usize) -> usize {
    if n_t == 0.0 {
        return cutoff;
    }
    // geometric tail (n_t/(1+n_t))^k below 1e-18
    let ratio = n_t / (1.0 + n_t);
    let k = (1e-18f64.ln() / ratio.ln()).ceil() as usize;
    cutoff.max(k).min(4 * cutoff.max(16))
}

/// Components `Σ_k w_k R(φ_k)|α, r⟩` of the phase-diffused signal, with the
/// carrier `make_dss(alpha, r)`.
pub fn phase_diffused_components(
    alpha: Complex64,
    r: f64,
    spec: &PhaseDiffusionSpec,
) -> Vec<WeightedGaussian> {
    let base = make_dss(alpha, r);
    spec.angles()
        .into_iter()
        .map(|(phi, w)| WeightedGaussian {
            weight: w,
            state: base.apply(&GaussianUnitary::Rotation(phi)),
        })
        .collect()
}

/// Phase-diffused density of the carrier `make_dss(alpha, r)`.
pub fn phase_diffuse_pure(
    alpha: Complex64,
    r: f64,
    spec: &PhaseDiffusionSpec,
    cutoff: usize,
) -> Result<FockDensity> {
    mixture_density(
        &phase_diffused_components(alpha, r, spec),
        cutoff,
        DEFAULT_TAIL_TOL,
    )
}

/// Thermal channel on a coherent state `|d⟩`: exactly a displaced thermal
/// state.
pub fn thermal_contaminate_coherent(d: Complex64, spec: &ThermalSpec) -> DisplacedThermal {
    DisplacedThermal {
        displacement: d,
        n_t: spec.n_t,
    }
}

/// `∫ d²λ f(λ) D(λ) ρ D†(λ)` by a `quad_order × quad_order` Gauss–Hermite
/// product rule. Displacements are applied on a working space twice the
/// cutoff of `rho` and the result is truncated back.
pub fn thermal_contaminate_density(
    rho: &FockDensity,
    spec: &ThermalSpec,
    quad_order: usize,
) -> Result<FockDensity> {
    if spec.n_t == 0.0 {
        return Ok(rho.clone());
    }
    if quad_order == 0 {
        return Err(Error::param("quad_order", "must be at least 1"));
    }
    let cutoff = rho.cutoff();
    let work = 2 * (cutoff + 1);
    let mut embedded = Array2::<Complex64>::zeros((work, work));
    embedded
        .slice_mut(ndarray::s![..=cutoff, ..=cutoff])
        .assign(rho.matrix());
    let (t, w) = gauss_hermite(quad_order);
    let scale = spec.n_t.sqrt();
    let mut acc = Array2::<Complex64>::zeros((cutoff + 1, cutoff + 1));
    for (tu, wu) in t.iter().zip(&w) {
        for (tv, wv) in t.iter().zip(&w) {
            let weight = wu * wv / std::f64::consts::PI;
            let lambda = Complex64::new(scale * tu, scale * tv);
            let d = displacement_matrix(lambda, work - 1);
            let top = d.slice(ndarray::s![..=cutoff, ..]);
            let moved = top.dot(&embedded).dot(&top.t().mapv(|z| z.conj()));
            acc.scaled_add(Complex64::new(weight, 0.0), &moved);
        }
    }
    hermitize(&mut acc);
    let out = FockDensity::from_parts(acc, None);
    let loss = rho.trace() - out.trace();
    if loss > UNITARY_TRACE_LOSS {
        return Err(Error::InsufficientCutoff {
            cutoff,
            achieved_norm: out.trace(),
            tail_tol: UNITARY_TRACE_LOSS,
        });
    }
    Ok(out)
}

/// Thermal background on an arbitrary density, in closed form: additive
/// Gaussian noise of `n_t` photons is a pure-loss channel of transmissivity
/// `1/(1+n_t)` followed by a quantum-limited amplifier of gain `1+n_t`.
/// Loss is exact on the truncated space; the amplifier leaks weight above
/// the cutoff, which must stay below [`UNITARY_TRACE_LOSS`].
pub fn thermal_contaminate_exact(rho: &FockDensity, spec: &ThermalSpec) -> Result<FockDensity> {
    if spec.n_t == 0.0 {
        return Ok(rho.clone());
    }
    let dim = rho.cutoff() + 1;
    let gain = 1.0 + spec.n_t;
    let (ln_eta, ln_leak) = (-gain.ln(), (spec.n_t / gain).ln());

    // loss: out[m][n] = Σ_k c(m,k) c(n,k) ρ[m+k][n+k]
    let mut coef = Array2::<f64>::zeros((dim, dim));
    for m in 0..dim {
        for k in 0..dim - m {
            coef[[m, k]] =
                (0.5 * (ln_binomial(m + k, k) + m as f64 * ln_eta + k as f64 * ln_leak)).exp();
        }
    }
    let src = rho.matrix();
    let mut lossy = Array2::<Complex64>::zeros((dim, dim));
    for m in 0..dim {
        for n in 0..=m {
            let mut z = Complex64::new(0.0, 0.0);
            for k in 0..dim - m {
                z += src[[m + k, n + k]] * (coef[[m, k]] * coef[[n, k]]);
            }
            lossy[[m, n]] = z;
        }
    }

    // amplifier: out[m+k][n+k] += a(m,k) a(n,k) ρ[m][n]
    for m in 0..dim {
        for k in 0..dim - m {
            coef[[m, k]] = (0.5
                * (ln_binomial(m + k, k) - (m + 1) as f64 * gain.ln() + k as f64 * ln_leak))
                .exp();
        }
    }
    let mut acc = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..=i {
            let mut z = Complex64::new(0.0, 0.0);
            for k in 0..=j {
                z += lossy[[i - k, j - k]] * (coef[[i - k, k]] * coef[[j - k, k]]);
            }
            acc[[i, j]] = z;
        }
    }
    for i in 0..dim {
        for j in 0..i {
            acc[[j, i]] = acc[[i, j]].conj();
        }
    }
    hermitize(&mut acc);
    let out = FockDensity::from_parts(acc, None);
    if rho.trace() - out.trace() > UNITARY_TRACE_LOSS {
        return Err(Error::InsufficientCutoff {
            cutoff: rho.cutoff(),
            achieved_norm: out.trace(),
            tail_tol: UNITARY_TRACE_LOSS,
        });
    }
    Ok(out)
}
