//! Sweep evaluation, crossover search and tolerable-noise curves.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{ConfigError, Curve, Scenario, SweepConfig};
use crate::benchmarks::{sql_dss_beta, BenchmarkKind};
use crate::channels::{
    phase_diffused_components, thermal_contaminate_exact, PhaseDiffusionSpec, ThermalSpec,
};
use crate::detection::{displaced_thermal_pmf, PnrModel};
use crate::error::{Error, Result};
use crate::fock::{auto_cutoff, mixture_density_at_least, photon_distribution, WeightedGaussian};
use crate::numeric::bisect;
use crate::receiver::{
    dsr_error_phase_diffusion, dsr_error_pnr, dsr_error_thermal, dsr_states_combined, DsrResult,
    SignalSpec,
};

/// Bracket width at which crossover bisection stops.
pub const CROSSOVER_TOL: f64 = 1e-5;
/// Relative accuracy of [`max_tolerable_thermal`].
pub const NTMAX_REL_TOL: f64 = 1e-4;
pub const NTMAX_LO: f64 = 1e-9;
pub const NTMAX_HI: f64 = 1.0;

/// One parameter combination of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub n: f64,
    pub m: usize,
    pub eta: f64,
    pub nu: f64,
    pub sigma: f64,
    pub n_t: f64,
}

impl Point {
    pub fn detector(&self) -> Result<PnrModel> {
        PnrModel::new(self.m, self.eta, self.nu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: f64,
    pub beta: f64,
    pub eta: f64,
    pub nu: f64,
    pub m: usize,
    pub sigma: f64,
    pub n_t: f64,
    pub p_err_dsr: f64,
    pub n_th: Option<usize>,
    pub p_hb_dss: f64,
    pub p_sql_dss: f64,
    pub p_hb_cs: f64,
    pub p_sql_cs: f64,
    /// One entry per `outputs.ratio_benchmarks`, in order.
    pub ratios_db: Vec<f64>,
}

impl ResultRow {
    fn failed(point: &Point, beta: f64, ratios: usize) -> Self {
        Self {
            n: point.n,
            beta,
            eta: point.eta,
            nu: point.nu,
            m: point.m,
            sigma: point.sigma,
            n_t: point.n_t,
            p_err_dsr: f64::NAN,
            n_th: None,
            p_hb_dss: f64::NAN,
            p_sql_dss: f64::NAN,
            p_hb_cs: f64::NAN,
            p_sql_cs: f64::NAN,
            ratios_db: vec![f64::NAN; ratios],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    pub index: usize,
    pub n: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutput {
    pub rows: Vec<ResultRow>,
    pub errors: Vec<RowError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationRow {
    pub n: f64,
    pub beta: f64,
    pub sigma: f64,
    pub n_t: f64,
    pub stage: &'static str,
    pub symbol: usize,
    pub photons: usize,
    pub probability: f64,
}

/// Failure of a whole sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepError {
    Config(ConfigError),
    Numeric(Error),
}

impl std::fmt::Display for SweepError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepError::Config(e) => write!(f, "config error: {e}"),
            SweepError::Numeric(e) => write!(f, "numeric error: {e}"),
        }
    }
}

impl std::error::Error for SweepError {}

impl From<ConfigError> for SweepError {
    fn from(e: ConfigError) -> Self {
        SweepError::Config(e)
    }
}

impl From<Error> for SweepError {
    fn from(e: Error) -> Self {
        SweepError::Numeric(e)
    }
}

/// Cartesian product `M × η × ν × σ × n_t × N`, energy varying fastest.
pub fn points(config: &SweepConfig) -> Vec<Point> {
    let ns = config.grid.points();
    let mut out = Vec::new();
    for m in config.detector.m.values() {
        for eta in config.detector.eta.values() {
            for nu in config.detector.nu.values() {
                for sigma in config.noise.sigma.values() {
                    for n_t in config.noise.n_t.values() {
                        for &n in &ns {
                            out.push(Point {
                                n,
                                m,
                                eta,
                                nu,
                                sigma,
                                n_t,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn signal_for(config: &SweepConfig, n: f64) -> Result<SignalSpec> {
    let mut s = SignalSpec::new(n)?;
    if let Some(b) = config.signal.beta {
        s = s.with_beta(b)?;
    }
    s.with_priors(config.priors.p0, config.priors.p1)
}

/// Receiver result for `point` under the configured scenario.
pub fn evaluate_dsr(config: &SweepConfig, point: &Point) -> Result<DsrResult> {
    let signal = signal_for(config, point.n)?;
    let det = point.detector()?;
    let numerics = config.numerics.numerics();
    match config.scenario {
        Scenario::Ideal | Scenario::Benchmarks => dsr_error_pnr(&signal, &PnrModel::ideal(point.m)),
        Scenario::Pnr => dsr_error_pnr(&signal, &det),
        Scenario::PhaseDiffusion => {
            let pd = PhaseDiffusionSpec::new(point.sigma, numerics.quad_order)?;
            dsr_error_phase_diffusion(&signal, &det, &pd, &numerics)
        }
        Scenario::Thermal | Scenario::TolerableThermal => {
            dsr_error_thermal(&signal, &det, &ThermalSpec::new(point.n_t)?)
        }
        Scenario::Combined => {
            let pd = PhaseDiffusionSpec::new(point.sigma, numerics.quad_order)?;
            let th = ThermalSpec::new(point.n_t)?;
            Ok(dsr_states_combined(&signal, &det, &pd, &th, &numerics)?.result)
        }
        Scenario::Populations => Err(Error::param(
            "scenario",
            "populations produce photon-number tables, not error rows",
        )),
    }
}

pub fn evaluate_point(config: &SweepConfig, point: &Point) -> Result<ResultRow> {
    let signal = signal_for(config, point.n)?;
    let numerics = config.numerics.numerics();
    let mut point = *point;
    if config.scenario == Scenario::TolerableThermal {
        point.n_t = max_tolerable_thermal_for(&signal, &point.detector()?)?;
    }
    let dsr = evaluate_dsr(config, &point)?;
    let bench = |k: BenchmarkKind| k.evaluate(&signal, &numerics);
    let reference = match config.outputs.ratio_reference {
        Some(k) => bench(k)?,
        None => dsr.p_err,
    };
    let ratios_db = config
        .outputs
        .ratio_benchmarks
        .iter()
        .map(|k| Ok(crate::benchmarks::ratio_db(bench(*k)?, reference)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ResultRow {
        n: point.n,
        beta: signal.beta(),
        eta: point.eta,
        nu: point.nu,
        m: point.m,
        sigma: point.sigma,
        n_t: point.n_t,
        p_err_dsr: dsr.p_err,
        n_th: Some(dsr.threshold),
        p_hb_dss: bench(BenchmarkKind::HbDss)?,
        p_sql_dss: bench(BenchmarkKind::SqlDss)?,
        p_hb_cs: bench(BenchmarkKind::HbCs)?,
        p_sql_cs: bench(BenchmarkKind::SqlCs)?,
        ratios_db,
    })
}

/// Evaluates every grid point on the current rayon pool; rows come back
/// in grid order.
pub fn run_sweep(config: &SweepConfig) -> std::result::Result<SweepOutput, SweepError> {
    config.validate()?;
    if config.scenario == Scenario::Populations {
        return Err(ConfigError::new("scenario", "use run_populations for populations").into());
    }
    let pts = points(config);
    let results: Vec<Result<ResultRow>> =
        pts.par_iter().map(|p| evaluate_point(config, p)).collect();
    let mut out = SweepOutput::default();
    for (index, (p, r)) in pts.iter().zip(results).enumerate() {
        match r {
            Ok(row) => out.rows.push(row),
            Err(e) => {
                let beta = config.signal.beta.unwrap_or(crate::receiver::beta_opt(p.n));
                out.rows.push(ResultRow::failed(
                    p,
                    beta,
                    config.outputs.ratio_benchmarks.len(),
                ));
                out.errors.push(RowError {
                    index,
                    n: p.n,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

/// [`run_sweep`] on a dedicated pool of `jobs` workers (all cores when
/// `None`).
pub fn run_sweep_with_jobs(
    config: &SweepConfig,
    jobs: Option<usize>,
) -> std::result::Result<SweepOutput, SweepError> {
    with_jobs(jobs, || run_sweep(config))?
}

/// Runs `f` on a dedicated pool of `jobs` workers (all cores when `None`).
pub fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> std::result::Result<T, SweepError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(ConfigError::new("jobs", "must be at least 1").into());
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| ConfigError::new("jobs", e.to_string()))?;
    Ok(pool.install(f))
}

/// Root of `a − b` on `[lo, hi]` by bisection to [`CROSSOVER_TOL`].
pub fn find_crossover<A, B>(mut a: A, mut b: B, lo: f64, hi: f64) -> Result<f64>
where
    A: FnMut(f64) -> f64,
    B: FnMut(f64) -> f64,
{
    bisect(|n| a(n) - b(n), lo, hi, CROSSOVER_TOL)
}

/// Value of `curve` at energy `n`, with the remaining parameters taken
/// from the first entry of each configured list.
pub fn curve_value(config: &SweepConfig, curve: Curve, n: f64) -> Result<f64> {
    match curve {
        Curve::Constant(c) => Ok(c),
        Curve::Benchmark(k) => k.evaluate(&signal_for(config, n)?, &config.numerics.numerics()),
        Curve::Dsr => {
            let point = Point {
                n,
                ..base_point(config)
            };
            if config.scenario == Scenario::TolerableThermal {
                return Err(Error::param(
                    "scenario",
                    "crossover needs an error-rate scenario",
                ));
            }
            Ok(evaluate_dsr(config, &point)?.p_err)
        }
    }
}

fn base_point(config: &SweepConfig) -> Point {
    Point {
        n: 0.0,
        m: config.detector.m.values()[0],
        eta: config.detector.eta.values()[0],
        nu: config.detector.nu.values()[0],
        sigma: config.noise.sigma.values()[0],
        n_t: config.noise.n_t.values()[0],
    }
}

/// Crossover described by the `[crossover]` section.
pub fn run_crossover(config: &SweepConfig) -> std::result::Result<f64, SweepError> {
    config.validate()?;
    let c = config
        .crossover
        .ok_or_else(|| ConfigError::new("crossover", "section missing"))?;
    let mut failure = None;
    let mut eval = |curve: Curve, n: f64| match curve_value(config, curve, n) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let root = bisect(
        |n| eval(c.curve_a, n) - eval(c.curve_b, n),
        c.bracket[0],
        c.bracket[1],
        CROSSOVER_TOL,
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(root?)
}

/// Largest thermal occupation `n_t ∈ [1e-9, 1]` at which the receiver
/// error stays at or below the squeezed-state SQL at energy `n`
/// (optimal squeezing, equal priors). Returns 0 when even `1e-9` fails.
pub fn max_tolerable_thermal(n: f64, det: &PnrModel) -> Result<f64> {
    max_tolerable_thermal_for(&SignalSpec::new(n)?, det)
}

pub fn max_tolerable_thermal_for(signal: &SignalSpec, det: &PnrModel) -> Result<f64> {
    if signal.n() <= 0.0 {
        return Err(Error::param("N", "must be positive"));
    }
    let target = sql_dss_beta(signal.n(), signal.beta());
    let excess = |n_t: f64| -> Result<f64> {
        Ok(dsr_error_thermal(signal, det, &ThermalSpec::new(n_t)?)?.p_err - target)
    };
    if excess(NTMAX_LO)? > 0.0 {
        return Ok(0.0);
    }
    if excess(NTMAX_HI)? <= 0.0 {
        return Ok(NTMAX_HI);
    }
    // bisection on ln n_t gives a relative tolerance
    let root = bisect(
        |x| excess(x.exp()).unwrap_or(f64::NAN),
        NTMAX_LO.ln(),
        NTMAX_HI.ln(),
        NTMAX_REL_TOL.ln_1p(),
    )?;
    // report the feasible side of the final bracket
    let mut x = root.exp();
    while excess(x)? > 0.0 && x > NTMAX_LO {
        x *= 1.0 - NTMAX_REL_TOL;
    }
    Ok(x)
}

/// Photon-number populations of both symbols at three stages: the
/// (possibly phase-diffused) carrier, after the displacement, and after
/// the full receiver (including thermal background if configured).
pub fn run_populations(
    config: &SweepConfig,
) -> std::result::Result<Vec<PopulationRow>, SweepError> {
    config.validate()?;
    if config.scenario != Scenario::Populations {
        return Err(ConfigError::new("scenario", "expected populations").into());
    }
    let numerics = config.numerics.numerics();
    let max_n = config.numerics.max_photon;
    let mut rows = Vec::new();
    for sigma in config.noise.sigma.values() {
        for n_t in config.noise.n_t.values() {
            for n in config.grid.points() {
                let signal = signal_for(config, n)?;
                let pd = PhaseDiffusionSpec::new(sigma, numerics.quad_order)?;
                let us = signal.receiver_unitaries();
                for symbol in 0..2 {
                    let carrier = phase_diffused_components(
                        Complex64::new(signal.signed_alpha(symbol), 0.0),
                        signal.r(),
                        &pd,
                    );
                    let moved = |k: usize| -> Vec<WeightedGaussian> {
                        carrier
                            .iter()
                            .map(|c| WeightedGaussian {
                                weight: c.weight,
                                state: c.state.apply_all(&us[..k]),
                            })
                            .collect()
                    };
                    let mut stages: Vec<(&'static str, Vec<f64>)> = Vec::with_capacity(3);
                    for (stage, k) in [("input", 0), ("displaced", 1)] {
                        let rho = mixture_density_at_least(&moved(k), max_n, numerics.tail_tol)?;
                        stages.push((stage, photon_distribution(&rho)));
                    }
                    let out = if n_t == 0.0 {
                        let rho = mixture_density_at_least(&moved(2), max_n, numerics.tail_tol)?;
                        photon_distribution(&rho)
                    } else if sigma == 0.0 {
                        let d_sq = if symbol == 0 { 0.0 } else { signal.gamma_sq() };
                        (0..=max_n)
                            .map(|k| displaced_thermal_pmf(k, d_sq, n_t))
                            .collect()
                    } else {
                        let th = ThermalSpec::new(n_t)?;
                        let extra = auto_cutoff(n_t, numerics.tail_tol);
                        let rho =
                            mixture_density_at_least(&moved(2), max_n + extra, numerics.tail_tol)?;
                        let rho = thermal_contaminate_exact(&rho, &th)?;
                        photon_distribution(&rho)
                    };
                    stages.push(("receiver", out));
                    for (stage, probs) in stages {
                        for (photons, p) in probs.into_iter().take(max_n + 1).enumerate() {
                            rows.push(PopulationRow {
                                n,
                                beta: signal.beta(),
                                sigma,
                                n_t,
                                stage,
                                symbol,
                                photons,
                                probability: p,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}
