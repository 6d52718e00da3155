//! Reference curves: Helstrom bounds and homodyne (SQL) error for squeezed
//! and coherent BPSK, with and without phase diffusion.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{phase_diffused_components, PhaseDiffusionSpec};
use crate::error::{Error, Result};
use crate::fock::{helstrom_mixed, mixture_density, mixture_density_at_least};
use crate::gaussian::GaussianUnitary;
use crate::numeric::special::erfc;
use crate::numeric::NeumaierSum;
use crate::receiver::{Numerics, SignalSpec};

/// `½(1 − √(1 − 4 p0 p1 |⟨ψ0|ψ1⟩|²))`, evaluated without cancellation.
pub fn helstrom_pure(overlap_sq: f64, p0: f64, p1: f64) -> f64 {
    let y = 4.0 * p0 * p1 * overlap_sq;
    2.0 * p0 * p1 * overlap_sq / (1.0 + (1.0 - y).max(0.0).sqrt())
}

/// Helstrom bound of the squeezed pair at `(N, β)`.
pub fn hb_dss_beta(n: f64, beta: f64) -> f64 {
    let s = SignalSpec::new(n)
        .and_then(|s| s.with_beta(beta))
        .expect("valid signal");
    helstrom_pure((-s.gamma_sq()).exp(), 0.5, 0.5)
}

/// Homodyne error of the squeezed pair at `(N, β)`: `½ erfc(√2 α e^r)`.
pub fn sql_dss_beta(n: f64, beta: f64) -> f64 {
    let s = SignalSpec::new(n)
        .and_then(|s| s.with_beta(beta))
        .expect("valid signal");
    0.5 * erfc(std::f64::consts::SQRT_2 * s.alpha() * s.exp_r())
}

pub fn hb_dss(n: f64) -> f64 {
    helstrom_pure((-4.0 * n * (n + 1.0)).exp(), 0.5, 0.5)
}

pub fn sql_dss(n: f64) -> f64 {
    0.5 * erfc((2.0 * n * (n + 1.0)).sqrt())
}

pub fn hb_cs(n: f64) -> f64 {
    helstrom_pure((-4.0 * n).exp(), 0.5, 0.5)
}

pub fn sql_cs(n: f64) -> f64 {
    0.5 * erfc((2.0 * n).sqrt())
}

/// Homodyne error of the pair rotated by `phi`, deciding on the sign of
/// the X outcome.
pub fn sql_rotated(signal: &SignalSpec, phi: f64) -> f64 {
    let rotated = signal.carrier(1).apply(&GaussianUnitary::Rotation(phi));
    let d = rotated.mean()[0];
    let v = rotated.cov()[0][0];
    0.5 * erfc(d / (2.0 * v).sqrt())
}

/// Phase-averaged homodyne error.
pub fn sql_dss_phase_diffused(n: f64, sigma: f64, quad_order: usize) -> Result<f64> {
    let signal = SignalSpec::new(n)?;
    sql_phase_diffused(&signal, &PhaseDiffusionSpec::new(sigma, quad_order)?)
}

pub fn sql_phase_diffused(signal: &SignalSpec, pd: &PhaseDiffusionSpec) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    for (phi, w) in pd.angles() {
        acc.add(w * sql_rotated(signal, phi));
    }
    Ok(acc.total())
}

/// Helstrom bound of the phase-diffused pair from the trace distance of
/// the two mixtures. With `cutoff = None` the cutoff is chosen and doubled
/// until both mixtures meet `tail_tol`.
pub fn hb_dss_phase_diffused(
    n: f64,
    sigma: f64,
    cutoff: Option<usize>,
    quad_order: usize,
) -> Result<f64> {
    let signal = SignalSpec::new(n)?;
    let numerics = Numerics {
        quad_order,
        ..Numerics::default()
    };
    hb_phase_diffused(
        &signal,
        &PhaseDiffusionSpec::new(sigma, quad_order)?,
        cutoff,
        &numerics,
    )
}

pub fn hb_phase_diffused(
    signal: &SignalSpec,
    pd: &PhaseDiffusionSpec,
    cutoff: Option<usize>,
    numerics: &Numerics,
) -> Result<f64> {
    let comps: Vec<_> = (0..2)
        .map(|i| {
            phase_diffused_components(Complex64::new(signal.signed_alpha(i), 0.0), signal.r(), pd)
        })
        .collect();
    let (rho0, rho1) = match cutoff {
        Some(c) => (
            mixture_density(&comps[0], c, numerics.tail_tol)?,
            mixture_density(&comps[1], c, numerics.tail_tol)?,
        ),
        None => {
            let a = mixture_density_at_least(&comps[0], 0, numerics.tail_tol)?;
            let b = mixture_density_at_least(&comps[1], a.cutoff(), numerics.tail_tol)?;
            if b.cutoff() > a.cutoff() {
                (
                    mixture_density(&comps[0], b.cutoff(), numerics.tail_tol)?,
                    b,
                )
            } else {
                (a, b)
            }
        }
    };
    helstrom_mixed(&rho0, &rho1, signal.p0(), signal.p1())
}

/// `10 log10(benchmark / p_dsr)`: positive when the receiver beats the
/// benchmark.
pub fn ratio_db(benchmark: f64, p_dsr: f64) -> f64 {
    10.0 * (benchmark / p_dsr).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BenchmarkKind {
    HbDss,
    SqlDss,
    HbCs,
    SqlCs,
    SqlDssPd(f64),
    HbDssPd(f64),
}

impl BenchmarkKind {
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Value for the ensemble `signal`. Squeezed benchmarks use the
    /// signal's squeezing fraction; coherent ones put all energy in the
    /// displacement. Helstrom bounds use the signal's priors, homodyne
    /// benchmarks decide on the sign of X.
    pub fn evaluate(&self, signal: &SignalSpec, numerics: &Numerics) -> Result<f64> {
        let (p0, p1) = (signal.p0(), signal.p1());
        Ok(match *self {
            BenchmarkKind::HbDss => helstrom_pure((-signal.gamma_sq()).exp(), p0, p1),
            BenchmarkKind::SqlDss => sql_dss_beta(signal.n(), signal.beta()),
            BenchmarkKind::HbCs => helstrom_pure((-4.0 * signal.n()).exp(), p0, p1),
            BenchmarkKind::SqlCs => sql_cs(signal.n()),
            BenchmarkKind::SqlDssPd(sigma) => sql_phase_diffused(
                signal,
                &PhaseDiffusionSpec::new(sigma, numerics.quad_order)?,
            )?,
            BenchmarkKind::HbDssPd(sigma) => hb_phase_diffused(
                signal,
                &PhaseDiffusionSpec::new(sigma, numerics.quad_order)?,
                None,
                numerics,
            )?,
        })
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchmarkKind::HbDss => f.write_str("HB_DSS"),
            BenchmarkKind::SqlDss => f.write_str("SQL_DSS"),
            BenchmarkKind::HbCs => f.write_str("HB_CS"),
            BenchmarkKind::SqlCs => f.write_str("SQL_CS"),
            BenchmarkKind::SqlDssPd(s) => write!(f, "SQL_DSS_PD({s})"),
            BenchmarkKind::HbDssPd(s) => write!(f, "HB_DSS_PD({s})"),
        }
    }
}

impl FromStr for BenchmarkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let simple = match s {
            "HB_DSS" => Some(BenchmarkKind::HbDss),
            "SQL_DSS" => Some(BenchmarkKind::SqlDss),
            "HB_CS" => Some(BenchmarkKind::HbCs),
            "SQL_CS" => Some(BenchmarkKind::SqlCs),
            _ => None,
        };
        if let Some(k) = simple {
            return Ok(k);
        }
        let bad = || Error::param("benchmark", format!("unknown benchmark '{s}'"));
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let arg = rest.strip_suffix(')').ok_or_else(bad)?;
        let sigma: f64 = arg.trim().parse().map_err(|_| bad())?;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::param(
                "benchmark",
                format!("sigma must be >= 0 in '{s}'"),
            ));
        }
        match head {
            "SQL_DSS_PD" => Ok(BenchmarkKind::SqlDssPd(sigma)),
            "HB_DSS_PD" => Ok(BenchmarkKind::HbDssPd(sigma)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for BenchmarkKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BenchmarkKind> for String {
    fn from(k: BenchmarkKind) -> String {
        k.to_string()
    }
}
