//! The displacement–squeeze receiver: signal parameters, decision rules and
//! error probabilities for every noise scenario.

use num_complex::Complex64;

use crate::channels::{
    phase_diffused_components, thermal_contaminate_exact, PhaseDiffusionSpec, ThermalSpec,
    DEFAULT_QUAD_ORDER,
};
use crate::detection::{
    outcome_probs_coherent, outcome_probs_density, outcome_probs_displaced_thermal,
    OutcomeDistribution, PnrModel,
};
use crate::error::{Error, Result};
use crate::fock::{
    apply_gaussian_unitary_fock, auto_cutoff, check_priors, mixture_density_at_least, FockDensity,
    WeightedGaussian, DEFAULT_TAIL_TOL,
};
use crate::gaussian::{make_dss, GaussianState, GaussianUnitary};

/// Numerical knobs shared by the Fock-basis pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub tail_tol: f64,
    pub quad_order: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            tail_tol: DEFAULT_TAIL_TOL,
            quad_order: DEFAULT_QUAD_ORDER,
        }
    }
}

/// Squeezing fraction minimising the Helstrom bound at energy `n`.
pub fn beta_opt(n: f64) -> f64 {
    n / (2.0 * n + 1.0)
}

/// S-BPSK ensemble `{D(−α)S(r)|0⟩, D(α)S(r)|0⟩}` with priors `(p0, p1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    n: f64,
    beta: f64,
    p0: f64,
    p1: f64,
}

impl SignalSpec {
    /// Energy `n`, optimal squeezing fraction, equal priors.
    pub fn new(n: f64) -> Result<Self> {
        if !(n >= 0.0 && n.is_finite()) {
            return Err(Error::param(
                "N",
                format!("must be finite and >= 0, got {n}"),
            ));
        }
        Ok(Self {
            n,
            beta: beta_opt(n),
            p0: 0.5,
            p1: 0.5,
        })
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::param(
                "beta",
                format!("must lie in [0, 1], got {beta}"),
            ));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn with_priors(mut self, p0: f64, p1: f64) -> Result<Self> {
        check_priors(p0, p1)?;
        self.p0 = p0;
        self.p1 = p1;
        Ok(self)
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    /// Coherent amplitude `√(N(1−β))`.
    pub fn alpha(&self) -> f64 {
        (self.n * (1.0 - self.beta)).sqrt()
    }

    /// Squeeze magnitude `asinh √(Nβ)`.
    pub fn r(&self) -> f64 {
        (self.n * self.beta).sqrt().asinh()
    }

    /// `e^r = √(1+Nβ) + √(Nβ)`.
    pub fn exp_r(&self) -> f64 {
        let s = self.n * self.beta;
        (1.0 + s).sqrt() + s.sqrt()
    }

    /// Amplitude `2αe^r` of the coherent state reached by symbol 1.
    pub fn gamma(&self) -> f64 {
        2.0 * self.alpha() * self.exp_r()
    }

    /// `|γ|²`, written so that it equals `4N(N+1)` exactly at `β_opt`.
    pub fn gamma_sq(&self) -> f64 {
        let g = self.gamma();
        g * g
    }

    /// Signed carrier amplitude: `−α` for symbol 0, `+α` for symbol 1.
    pub fn signed_alpha(&self, symbol: usize) -> f64 {
        if symbol == 0 {
            -self.alpha()
        } else {
            self.alpha()
        }
    }

    pub fn carrier(&self, symbol: usize) -> GaussianState {
        make_dss(Complex64::new(self.signed_alpha(symbol), 0.0), self.r())
    }

    /// `D(α)` followed by the squeeze with axis rotated by π/2.
    pub fn receiver_unitaries(&self) -> [GaussianUnitary; 2] {
        [
            GaussianUnitary::displacement(Complex64::new(self.alpha(), 0.0)),
            GaussianUnitary::squeeze(self.r(), std::f64::consts::FRAC_PI_2),
        ]
    }
}

/// Decide '1' on outcome `n` iff `n ≥ threshold`, or per-outcome regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionRule {
    Threshold(usize),
    MapRegions(Vec<bool>),
}

impl DecisionRule {
    pub fn decides_one(&self, outcome: usize) -> bool {
        match self {
            DecisionRule::Threshold(t) => outcome >= *t,
            DecisionRule::MapRegions(ones) => ones.get(outcome).copied().unwrap_or(false),
        }
    }
}

pub fn error_from_distributions(
    q0: &OutcomeDistribution,
    q1: &OutcomeDistribution,
    rule: &DecisionRule,
    p0: f64,
    p1: f64,
) -> Result<f64> {
    if q0.len() != q1.len() {
        return Err(Error::Dimension {
            expected: q0.len(),
            found: q1.len(),
        });
    }
    if let DecisionRule::MapRegions(ones) = rule {
        if ones.len() != q0.len() {
            return Err(Error::Dimension {
                expected: q0.len(),
                found: ones.len(),
            });
        }
    }
    check_priors(p0, p1)?;
    let mut false_one = 0.0;
    let mut false_zero = 0.0;
    for (n, (a, b)) in q0.probs().iter().zip(q1.probs()).enumerate() {
        if rule.decides_one(n) {
            false_one += a;
        } else {
            false_zero += b;
        }
    }
    Ok((p0 * false_one + p1 * false_zero).clamp(0.0, 1.0))
}

/// Exhaustive search over thresholds `0..=M+1`; ties go to the smallest.
pub fn optimal_threshold(
    q0: &OutcomeDistribution,
    q1: &OutcomeDistribution,
    p0: f64,
    p1: f64,
) -> Result<(usize, f64)> {
    let mut best = (
        0,
        error_from_distributions(q0, q1, &DecisionRule::Threshold(0), p0, p1)?,
    );
    for t in 1..=q0.len() {
        let e = error_from_distributions(q0, q1, &DecisionRule::Threshold(t), p0, p1)?;
        if e < best.1 {
            best = (t, e);
        }
    }
    Ok(best)
}

/// Per-outcome MAP decision; ties decide '0'.
pub fn optimal_map_rule(
    q0: &OutcomeDistribution,
    q1: &OutcomeDistribution,
    p0: f64,
    p1: f64,
) -> Result<(DecisionRule, f64)> {
    if q0.len() != q1.len() {
        return Err(Error::Dimension {
            expected: q0.len(),
            found: q1.len(),
        });
    }
    let ones = q0
        .probs()
        .iter()
        .zip(q1.probs())
        .map(|(a, b)| p1 * b > p0 * a)
        .collect();
    let rule = DecisionRule::MapRegions(ones);
    let e = error_from_distributions(q0, q1, &rule, p0, p1)?;
    Ok((rule, e))
}

/// `½ e^{−4N(N+1)}`: ideal detector, optimal squeezing, equal priors.
pub fn dsr_error_ideal(n: f64) -> f64 {
    0.5 * (-4.0 * n * (n + 1.0)).exp()
}

/// `½ e^{−4N(N+1)η}`: efficiency only, any resolution.
pub fn dsr_error_eta(n: f64, eta: f64) -> f64 {
    0.5 * (-4.0 * n * (n + 1.0) * eta).exp()
}

/// Outcome laws, optimal threshold and error of one receiver evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DsrResult {
    pub p_err: f64,
    pub threshold: usize,
    /// Error of the per-outcome MAP rule, never above `p_err`.
    pub p_err_map: f64,
    pub q0: OutcomeDistribution,
    pub q1: OutcomeDistribution,
}

impl DsrResult {
    fn from_distributions(
        q0: OutcomeDistribution,
        q1: OutcomeDistribution,
        signal: &SignalSpec,
    ) -> Result<Self> {
        let (threshold, p_err) = optimal_threshold(&q0, &q1, signal.p0, signal.p1)?;
        let (_, p_err_map) = optimal_map_rule(&q0, &q1, signal.p0, signal.p1)?;
        Ok(Self {
            p_err,
            threshold,
            p_err_map: p_err_map.min(p_err),
            q0,
            q1,
        })
    }
}

/// Post-receiver densities alongside the receiver result.
#[derive(Debug, Clone)]
pub struct DsrStates {
    pub result: DsrResult,
    pub rho0: FockDensity,
    pub rho1: FockDensity,
}

/// Coherent outputs `|0⟩`, `|γ⟩` through a PNR detector with loss and dark
/// counts.
pub fn dsr_error_pnr(signal: &SignalSpec, det: &PnrModel) -> Result<DsrResult> {
    let q0 = outcome_probs_coherent(det, 0.0);
    let q1 = outcome_probs_coherent(det, signal.gamma_sq());
    DsrResult::from_distributions(q0, q1, signal)
}

/// Same receiver evaluated in the Fock basis: carriers are built as
/// densities, pushed through the receiver unitaries and measured with the
/// POVM.
pub fn dsr_states_fock_pipeline(
    signal: &SignalSpec,
    det: &PnrModel,
    numerics: &Numerics,
) -> Result<DsrStates> {
    let us = signal.receiver_unitaries();
    let out_cutoff = auto_cutoff(signal.gamma_sq(), numerics.tail_tol).max(det.resolution());
    let mut rhos = Vec::with_capacity(2);
    for symbol in 0..2 {
        let carrier = [WeightedGaussian {
            weight: 1.0,
            state: signal.carrier(symbol),
        }];
        let rho = mixture_density_at_least(&carrier, 0, numerics.tail_tol)?;
        rhos.push(apply_gaussian_unitary_fock(&rho, &us, out_cutoff)?);
    }
    let rho1 = rhos.pop().expect("two symbols");
    let rho0 = rhos.pop().expect("two symbols");
    let q0 = outcome_probs_density(det, &rho0)?;
    let q1 = outcome_probs_density(det, &rho1)?;
    Ok(DsrStates {
        result: DsrResult::from_distributions(q0, q1, signal)?,
        rho0,
        rho1,
    })
}

pub fn dsr_error_fock_pipeline(
    signal: &SignalSpec,
    det: &PnrModel,
    numerics: &Numerics,
) -> Result<DsrResult> {
    Ok(dsr_states_fock_pipeline(signal, det, numerics)?.result)
}

fn post_receiver_components(
    signal: &SignalSpec,
    symbol: usize,
    pd: &PhaseDiffusionSpec,
) -> Vec<WeightedGaussian> {
    let us = signal.receiver_unitaries();
    phase_diffused_components(
        Complex64::new(signal.signed_alpha(symbol), 0.0),
        signal.r(),
        pd,
    )
    .into_iter()
    .map(|c| WeightedGaussian {
        weight: c.weight,
        state: c.state.apply_all(&us),
    })
    .collect()
}

/// Phase-diffused carriers through the receiver. Each quadrature node is a
/// pure Gaussian state, so the receiver acts exactly per node; the mixture
/// is assembled in the Fock basis and measured.
pub fn dsr_states_phase_diffusion(
    signal: &SignalSpec,
    det: &PnrModel,
    pd: &PhaseDiffusionSpec,
    numerics: &Numerics,
) -> Result<DsrStates> {
    let c0 = post_receiver_components(signal, 0, pd);
    let c1 = post_receiver_components(signal, 1, pd);
    let rho0 = mixture_density_at_least(&c0, det.resolution(), numerics.tail_tol)?;
    let rho1 = mixture_density_at_least(&c1, det.resolution(), numerics.tail_tol)?;
    let q0 = outcome_probs_density(det, &rho0)?;
    let q1 = outcome_probs_density(det, &rho1)?;
    Ok(DsrStates {
        result: DsrResult::from_distributions(q0, q1, signal)?,
        rho0,
        rho1,
    })
}

pub fn dsr_error_phase_diffusion(
    signal: &SignalSpec,
    det: &PnrModel,
    pd: &PhaseDiffusionSpec,
    numerics: &Numerics,
) -> Result<DsrResult> {
    Ok(dsr_states_phase_diffusion(signal, det, pd, numerics)?.result)
}

/// Thermal background added after the receiver: outputs become displaced
/// thermal states around `0` and `γ`.
pub fn dsr_error_thermal(
    signal: &SignalSpec,
    det: &PnrModel,
    th: &ThermalSpec,
) -> Result<DsrResult> {
    let q0 = outcome_probs_displaced_thermal(det, Complex64::new(0.0, 0.0), th.n_t());
    let q1 = outcome_probs_displaced_thermal(det, Complex64::new(signal.gamma(), 0.0), th.n_t());
    DsrResult::from_distributions(q0, q1, signal)
}

/// Phase diffusion before the receiver and thermal background after it.
/// The thermal channel acts on a non-Gaussian mixture here, so it is
/// applied to the Fock density directly.
pub fn dsr_states_combined(
    signal: &SignalSpec,
    det: &PnrModel,
    pd: &PhaseDiffusionSpec,
    th: &ThermalSpec,
    numerics: &Numerics,
) -> Result<DsrStates> {
    let mut rhos = Vec::with_capacity(2);
    for symbol in 0..2 {
        let comps = post_receiver_components(signal, symbol, pd);
        let extra = auto_cutoff(th.n_t(), numerics.tail_tol);
        let rho = mixture_density_at_least(&comps, det.resolution() + extra, numerics.tail_tol)?;
        rhos.push(thermal_contaminate_exact(&rho, th)?);
    }
    let rho1 = rhos.pop().expect("two symbols");
    let rho0 = rhos.pop().expect("two symbols");
    let q0 = outcome_probs_density(det, &rho0)?;
    let q1 = outcome_probs_density(det, &rho1)?;
    Ok(DsrStates {
        result: DsrResult::from_distributions(q0, q1, signal)?,
        rho0,
        rho1,
    })
}

/// First grid index at which the error curve has saturated: the threshold
/// sits at the overflow outcome `m` and the slope either falls below
/// `1e-12` per unit `N` or changes sign.
pub fn plateau_onset(ns: &[f64], p_err: &[f64], thresholds: &[usize], m: usize) -> Option<usize> {
    let len = ns.len().min(p_err.len()).min(thresholds.len());
    for i in 1..len.saturating_sub(1) {
        if thresholds[i] != m {
            continue;
        }
        let left = (p_err[i] - p_err[i - 1]) / (ns[i] - ns[i - 1]);
        let right = (p_err[i + 1] - p_err[i]) / (ns[i + 1] - ns[i]);
        if right.abs() < 1e-12 || left * right < 0.0 {
            return Some(i);
        }
    }
    None
}
