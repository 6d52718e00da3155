//! Photon-number-resolving detector models.
//!
//! A PNR(M) detector reports counts `0..M-1` exactly and lumps every count
//! `≥ M` into the overflow outcome `M`. Efficiency `eta` thins each photon
//! binomially; dark counts add an independent Poisson(`nu`) count per gate.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockDensity;
use crate::numeric::special::{
    binomial_pmf, binomial_tail, ln_binomial, ln_factorial, poisson_pmf, poisson_tail,
};

/// Largest trace deficit of a density accepted by [`outcome_probs_density`].
pub const DENSITY_DEFICIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnrModel {
    resolution: usize,
    eta: f64,
    nu: f64,
}

impl PnrModel {
    pub fn new(resolution: usize, eta: f64, nu: f64) -> Result<Self> {
        if resolution < 1 {
            return Err(Error::param("M", "resolution must be at least 1"));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::param(
                "eta",
                format!("efficiency must lie in (0, 1], got {eta}"),
            ));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::param(
                "nu",
                format!("dark count rate must be >= 0, got {nu}"),
            ));
        }
        Ok(Self {
            resolution,
            eta,
            nu,
        })
    }

    /// Unit efficiency, no dark counts.
    pub fn ideal(resolution: usize) -> Self {
        Self::new(resolution, 1.0, 0.0).expect("valid ideal detector")
    }

    /// `M`.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn is_ideal(&self) -> bool {
        self.eta == 1.0 && self.nu == 0.0
    }
}

/// Probabilities of the outcomes `0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Checks non-negativity and normalisation (1e-10).
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: probs.len(),
            });
        }
        if probs.iter().any(|p| p.is_nan() || *p < 0.0) {
            return Err(Error::param("probs", "entries must be non-negative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::param(
                "probs",
                format!("entries sum to {sum}, not 1"),
            ));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Index of the overflow outcome.
    pub fn resolution(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Outcome law for a coherent state of mean photon number `mu`:
/// Poisson(`eta·mu + nu`) binned with overflow.
pub fn outcome_probs_coherent(det: &PnrModel, mu: f64) -> OutcomeDistribution {
    let lambda = det.eta * mu.max(0.0) + det.nu;
    let m = det.resolution;
    let mut probs: Vec<f64> = (0..m).map(|n| poisson_pmf(n, lambda)).collect();
    probs.push(poisson_tail(m, lambda));
    OutcomeDistribution { probs }
}

/// Diagonal POVM elements `Π_0..Π_M` of a PNR(M) detector on the truncated
/// space `{|0⟩, …, |cutoff⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PnrPovm {
    diagonals: Vec<Vec<f64>>,
}

impl PnrPovm {
    /// `⟨k|Π_n|k⟩` for `k = 0..=cutoff`.
    pub fn diagonal(&self, n: usize) -> &[f64] {
        &self.diagonals[n]
    }

    pub fn outcomes(&self) -> usize {
        self.diagonals.len()
    }

    pub fn cutoff(&self) -> usize {
        self.diagonals[0].len() - 1
    }

    /// Dense form of element `n`.
    pub fn matrix(&self, n: usize) -> Array2<f64> {
        Array2::from_diag(&ndarray::Array1::from(self.diagonals[n].clone()))
    }

    /// `Tr(Π_n ρ)` for every outcome; ignores any trace deficit of `rho`.
    pub fn expectations(&self, rho: &FockDensity) -> Result<Vec<f64>> {
        if rho.cutoff() != self.cutoff() {
            return Err(Error::Dimension {
                expected: self.cutoff() + 1,
                found: rho.cutoff() + 1,
            });
        }
        let diag: Vec<f64> = rho
            .matrix()
            .diag()
            .iter()
            .map(|z: &Complex64| z.re)
            .collect();
        Ok(self
            .diagonals
            .iter()
            .map(|pi| {
                pi.iter()
                    .zip(&diag)
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    .max(0.0)
            })
            .collect())
    }
}

pub fn povm_matrices(det: &PnrModel, cutoff: usize) -> Result<PnrPovm> {
    let m = det.resolution;
    if cutoff < m {
        return Err(Error::Dimension {
            expected: m,
            found: cutoff,
        });
    }
    let darks: Vec<f64> = (0..m).map(|l| poisson_pmf(l, det.nu)).collect();
    let dark_tail = poisson_tail(m, det.nu);
    let mut diagonals = vec![vec![0.0; cutoff + 1]; m + 1];
    for k in 0..=cutoff {
        for (n, diag) in diagonals.iter_mut().take(m).enumerate() {
            diag[k] = (0..=n)
                .map(|l| darks[l] * binomial_pmf(k, n - l, det.eta))
                .sum();
        }
        diagonals[m][k] = (0..m)
            .map(|l| darks[l] * binomial_tail(k, det.eta, m - l))
            .sum::<f64>()
            + dark_tail;
    }
    Ok(PnrPovm { diagonals })
}

/// `Tr(Π_n ρ)`. Mass missing from a truncated `rho` (at most
/// [`DENSITY_DEFICIT_TOL`]) is assigned to the overflow outcome.
pub fn outcome_probs_density(det: &PnrModel, rho: &FockDensity) -> Result<OutcomeDistribution> {
    let povm = povm_matrices(det, rho.cutoff()).map_err(|_| Error::InsufficientCutoff {
        cutoff: rho.cutoff(),
        achieved_norm: rho.trace(),
        tail_tol: DENSITY_DEFICIT_TOL,
    })?;
    let trace = rho.trace();
    let deficit = 1.0 - trace;
    if deficit > DENSITY_DEFICIT_TOL {
        return Err(Error::InsufficientCutoff {
            cutoff: rho.cutoff(),
            achieved_norm: trace,
            tail_tol: DENSITY_DEFICIT_TOL,
        });
    }
    let mut probs = povm.expectations(rho)?;
    let m = det.resolution;
    probs[m] += deficit.max(0.0);
    Ok(OutcomeDistribution { probs })
}

/// Photon law of the displaced thermal state `D(d) ρ_th(n_t) D†(d)`.
///
/// `p(n) = e^{-x/(1+n̄)}/(1+n̄) Σ_k C(n,k) a^{n-k} b^k / k!` with `x = |d|²`,
/// `a = n̄/(1+n̄)`, `b = x/(1+n̄)²`: the Laguerre form with every term
/// positive.
pub fn displaced_thermal_pmf(n: usize, d_sq: f64, n_t: f64) -> f64 {
    let a = n_t / (1.0 + n_t);
    let b = d_sq / (1.0 + n_t).powi(2);
    let prefactor_ln = -d_sq / (1.0 + n_t) - (1.0 + n_t).ln();
    let mut logs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let j = n - k;
        if (j > 0 && a == 0.0) || (k > 0 && b == 0.0) {
            continue;
        }
        let mut t = ln_binomial(n, k) - ln_factorial(k);
        if j > 0 {
            t += j as f64 * a.ln();
        }
        if k > 0 {
            t += k as f64 * b.ln();
        }
        logs.push(t);
    }
    if logs.is_empty() {
        return 0.0;
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = logs.iter().map(|t| (t - peak).exp()).sum();
    (prefactor_ln + peak + s.ln()).exp()
}

/// `P(n ≥ m)` for the displaced thermal law, summed on the side that
/// avoids cancellation.
fn displaced_thermal_tail(m: usize, d_sq: f64, n_t: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mean = d_sq + n_t;
    if mean >= m as f64 {
        let head: f64 = (0..m).map(|n| displaced_thermal_pmf(n, d_sq, n_t)).sum();
        return (1.0 - head).max(0.0);
    }
    let mut sum = 0.0;
    let mut n = m;
    loop {
        let term = displaced_thermal_pmf(n, d_sq, n_t);
        sum += term;
        n += 1;
        if (n as f64 > mean && term <= 1e-18 * sum) || term == 0.0 || n > m + 100_000 {
            break;
        }
    }
    sum
}

/// Outcome law for `D(d) ρ_th(n_t) D†(d)`. Loss maps the state to a
/// displaced thermal state with `√η d` and `η n_t`; dark counts are
/// convolved as Poisson(`nu`).
pub fn outcome_probs_displaced_thermal(
    det: &PnrModel,
    d: Complex64,
    n_t: f64,
) -> OutcomeDistribution {
    let m = det.resolution;
    let d_sq = det.eta * d.norm_sqr();
    let nt = det.eta * n_t.max(0.0);
    let photon: Vec<f64> = (0..m).map(|n| displaced_thermal_pmf(n, d_sq, nt)).collect();
    // tails[j] = P(K >= j) for j = 1..=m
    let mut tails = vec![0.0; m + 1];
    tails[m] = displaced_thermal_tail(m, d_sq, nt);
    for j in (1..m).rev() {
        tails[j] = tails[j + 1] + photon[j];
    }
    let darks: Vec<f64> = (0..m).map(|l| poisson_pmf(l, det.nu)).collect();
    let mut probs: Vec<f64> = (0..m)
        .map(|n| (0..=n).map(|l| darks[l] * photon[n - l]).sum())
        .collect();
    let overflow: f64 =
        (0..m).map(|l| darks[l] * tails[m - l]).sum::<f64>() + poisson_tail(m, det.nu);
    probs.push(overflow);
    OutcomeDistribution { probs }
}
