//! Truncated photon-number representations.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, GaussianUnitary, PureNormalForm};
use crate::numeric::special::poisson_tail;
use crate::numeric::{hermitian_eigen, hermitian_eigenvalues};

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
pub const CUTOFF_SAFETY: usize = 2;
pub const MIN_CUTOFF: usize = 16;
/// Hard ceiling for automatic cutoff growth.
pub const MAX_CUTOFF: usize = 4096;
/// Largest trace loss tolerated when pushing unitaries through a density.
pub const UNITARY_TRACE_LOSS: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest cutoff whose Poisson(`mean_photon`) tail above it is below
/// `tail_tol`, times the safety factor, never below [`MIN_CUTOFF`].
pub fn auto_cutoff(mean_photon: f64, tail_tol: f64) -> usize {
    let mean = mean_photon.max(0.0);
    let mut c = mean.floor() as usize;
    while poisson_tail(c + 1, mean) >= tail_tol {
        c += 1;
    }
    (c * CUTOFF_SAFETY).max(MIN_CUTOFF)
}

/// First cutoff tried by the growing searches; fails up front when even
/// the Poisson estimate exceeds [`MAX_CUTOFF`].
fn starting_cutoff(mean_photon: f64, min_cutoff: usize, tail_tol: f64) -> Result<usize> {
    let cutoff = auto_cutoff(mean_photon, tail_tol).max(min_cutoff);
    if cutoff > MAX_CUTOFF {
        return Err(Error::InsufficientCutoff {
            cutoff: MAX_CUTOFF,
            achieved_norm: 1.0 - poisson_tail(MAX_CUTOFF + 1, mean_photon.max(0.0)),
            tail_tol,
        });
    }
    Ok(cutoff)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Array1<Complex64>,
}

impl FockVector {
    pub fn new(amplitudes: Array1<Complex64>) -> Self {
        assert!(
            !amplitudes.is_empty(),
            "Fock vector needs at least the vacuum component"
        );
        Self { amplitudes }
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Amplitudes `⟨n| D(β) S(ξ) |0⟩` for `n ≤ cutoff`, with the default tail
/// tolerance.
pub fn dss_fock(nf: &PureNormalForm, cutoff: usize) -> Result<FockVector> {
    dss_fock_with_tol(nf, cutoff, DEFAULT_TAIL_TOL)
}

/// Three-term recursion obtained from the annihilator
/// `(a − β) + t (a† − β*)` of the state, `t = e^{iθ} tanh r`.
pub fn dss_fock_with_tol(nf: &PureNormalForm, cutoff: usize, tail_tol: f64) -> Result<FockVector> {
    let beta = nf.displacement;
    let r = nf.squeeze.norm();
    let t = if r == 0.0 {
        ZERO
    } else {
        nf.squeeze / r * r.tanh()
    };
    let mut amps = Array1::<Complex64>::zeros(cutoff + 1);
    amps[0] = (-0.5 * beta.norm_sqr() - 0.5 * beta.conj().powi(2) * t).exp() / r.cosh().sqrt();
    let drive = beta + t * beta.conj();
    for n in 0..cutoff {
        let prev = if n == 0 { ZERO } else { amps[n - 1] };
        amps[n + 1] = (drive * amps[n] - t * (n as f64).sqrt() * prev) / ((n + 1) as f64).sqrt();
    }
    let v = FockVector::new(amps);
    let norm = v.norm_sqr();
    if !norm.is_finite() || 1.0 - norm >= tail_tol {
        return Err(Error::InsufficientCutoff {
            cutoff,
            achieved_norm: norm,
            tail_tol,
        });
    }
    Ok(v)
}

/// Grows the cutoff from [`auto_cutoff`] until [`dss_fock_with_tol`] succeeds.
pub fn dss_fock_auto(nf: &PureNormalForm, tail_tol: f64) -> Result<FockVector> {
    let mut cutoff = starting_cutoff(nf.mean_photon(), 0, tail_tol)?;
    loop {
        match dss_fock_with_tol(nf, cutoff, tail_tol) {
            Err(Error::InsufficientCutoff { .. }) if cutoff < MAX_CUTOFF => {
                cutoff = (2 * cutoff).min(MAX_CUTOFF)
            }
            other => return other,
        }
    }
}

/// Component of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedGaussian {
    pub weight: f64,
    pub state: GaussianState,
}

/// Hermitian density matrix on `{|0⟩, …, |cutoff⟩}`.
///
/// When the density was built from a mixture of pure Gaussian states the
/// components are retained, so Gaussian unitaries can be applied exactly.
#[derive(Debug, Clone)]
pub struct FockDensity {
    matrix: Array2<Complex64>,
    mixture: Option<Vec<WeightedGaussian>>,
}

/// Outcome of [`FockDensity::check_invariants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl FockDensity {
    /// Wraps a matrix after checking that it is square and Hermitian
    /// within 1e-12.
    pub fn from_matrix(matrix: Array2<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.is_empty() {
            return Err(Error::Dimension {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > 1e-12 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            matrix,
            mixture: None,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.matrix
    }

    pub fn gaussian_mixture(&self) -> Option<&[WeightedGaussian]> {
        self.mixture.as_deref()
    }

    /// Drops the mixture provenance; later unitaries use the generic path.
    pub fn without_mixture(mut self) -> Self {
        self.mixture = None;
        self
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|z| z.re).sum()
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut m = Array2::zeros((cutoff + 1, cutoff + 1));
        m[[0, 0]] = Complex64::new(1.0, 0.0);
        Self {
            matrix: m,
            mixture: Some(vec![WeightedGaussian {
                weight: 1.0,
                state: GaussianState::vacuum(),
            }]),
        }
    }

    /// Thermal state with geometric photon law `n_t^n / (1+n_t)^{n+1}`.
    pub fn thermal(n_t: f64, cutoff: usize) -> Self {
        let mut m = Array2::zeros((cutoff + 1, cutoff + 1));
        let ratio = n_t / (1.0 + n_t);
        let mut p = 1.0 / (1.0 + n_t);
        for n in 0..=cutoff {
            m[[n, n]] = Complex64::new(p, 0.0);
            p *= ratio;
        }
        Self {
            matrix: m,
            mixture: None,
        }
    }

    /// Hermiticity, trace window `[1 − tail_tol, 1]` and PSD check
    /// (minimum eigenvalue ≥ −1e-9).
    pub fn check_invariants(&self, tail_tol: f64) -> std::result::Result<DensityReport, String> {
        let hermiticity = hermiticity_deviation(&self.matrix);
        let trace = self.trace();
        let min_eigenvalue = hermitian_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or(0.0);
        let report = DensityReport {
            hermiticity,
            trace,
            min_eigenvalue,
        };
        if hermiticity > 1e-12 {
            return Err(format!("not Hermitian: {report:?}"));
        }
        if trace < 1.0 - tail_tol || trace > 1.0 + 1e-12 {
            return Err(format!("trace outside [1 - {tail_tol:e}, 1]: {report:?}"));
        }
        if min_eigenvalue < -1e-9 {
            return Err(format!("not positive semidefinite: {report:?}"));
        }
        Ok(report)
    }
}

fn hermiticity_deviation(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

/// `|v⟩⟨v|`.
pub fn density_from_pure(v: &FockVector) -> FockDensity {
    let a = v.amplitudes();
    let n = a.len();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[[i, j]] = a[i] * a[j].conj();
        }
    }
    FockDensity {
        matrix: m,
        mixture: None,
    }
}

/// `Σ_k w_k |ψ_k⟩⟨ψ_k|` for pure Gaussian components at a common cutoff.
/// Each component may miss at most `tail_tol / w_k` of its norm, so the
/// total trace deficit stays below `tail_tol`.
pub fn mixture_density(
    components: &[WeightedGaussian],
    cutoff: usize,
    tail_tol: f64,
) -> Result<FockDensity> {
    if cutoff > MAX_CUTOFF {
        let mean = components
            .iter()
            .map(|c| c.state.mean_photon())
            .fold(0.0, f64::max);
        return Err(Error::InsufficientCutoff {
            cutoff: MAX_CUTOFF,
            achieved_norm: 1.0 - poisson_tail(MAX_CUTOFF + 1, mean),
            tail_tol,
        });
    }
    let dim = cutoff + 1;
    let mut m = Array2::<Complex64>::zeros((dim, dim));
    let total_weight: f64 = components.iter().map(|c| c.weight).sum();
    for comp in components {
        if comp.weight == 0.0 {
            continue;
        }
        let nf = comp.state.normal_form()?;
        let tol = (tail_tol / (comp.weight * components.len() as f64)).min(1.0);
        let v = dss_fock_with_tol(&nf, cutoff, tol)?;
        let a = v.amplitudes();
        for i in 0..dim {
            let wi = a[i] * comp.weight;
            for j in 0..=i {
                let z = wi * a[j].conj();
                m[[i, j]] += z;
            }
        }
    }
    for i in 0..dim {
        m[[i, i]].im = 0.0;
        for j in 0..i {
            m[[j, i]] = m[[i, j]].conj();
        }
    }
    if total_weight > 0.0 {
        let trace: f64 = m.diag().iter().map(|z| z.re).sum();
        if total_weight - trace >= tail_tol {
            return Err(Error::InsufficientCutoff {
                cutoff,
                achieved_norm: trace / total_weight,
                tail_tol,
            });
        }
    }
    Ok(FockDensity {
        matrix: m,
        mixture: Some(components.to_vec()),
    })
}

/// Smallest cutoff (starting from [`auto_cutoff`] of the heaviest
/// component, doubling) at which [`mixture_density`] succeeds.
pub fn mixture_density_auto(components: &[WeightedGaussian], tail_tol: f64) -> Result<FockDensity> {
    mixture_density_at_least(components, 0, tail_tol)
}

/// Like [`mixture_density_auto`] but never below `min_cutoff`.
pub fn mixture_density_at_least(
    components: &[WeightedGaussian],
    min_cutoff: usize,
    tail_tol: f64,
) -> Result<FockDensity> {
    let mean = components
        .iter()
        .map(|c| c.state.mean_photon())
        .fold(0.0, f64::max);
    let mut cutoff = starting_cutoff(mean, min_cutoff, tail_tol)?;
    loop {
        match mixture_density(components, cutoff, tail_tol) {
            Err(Error::InsufficientCutoff { .. }) if cutoff < MAX_CUTOFF => {
                cutoff = (2 * cutoff).min(MAX_CUTOFF)
            }
            other => return other,
        }
    }
}

/// Density of a single pure Gaussian state at the given cutoff.
pub fn gaussian_density(
    state: &GaussianState,
    cutoff: usize,
    tail_tol: f64,
) -> Result<FockDensity> {
    mixture_density(
        &[WeightedGaussian {
            weight: 1.0,
            state: *state,
        }],
        cutoff,
        tail_tol,
    )
}

/// Diagonal of `rho`, tiny negative rounding clamped to zero.
pub fn photon_distribution(rho: &FockDensity) -> Vec<f64> {
    rho.matrix.diag().iter().map(|z| z.re.max(0.0)).collect()
}

/// `Σ |λ_i|` over the eigenvalues of a Hermitian matrix.
pub fn trace_norm(h: &Array2<Complex64>) -> Result<f64> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    let deviation = hermiticity_deviation(h);
    if deviation > 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(hermitian_eigenvalues(h).iter().map(|x| x.abs()).sum())
}

/// Minimum error probability `½(1 − ‖p0 ρ0 − p1 ρ1‖₁)` for two densities.
pub fn helstrom_mixed(rho0: &FockDensity, rho1: &FockDensity, p0: f64, p1: f64) -> Result<f64> {
    check_priors(p0, p1)?;
    if rho0.cutoff() != rho1.cutoff() {
        return Err(Error::Dimension {
            expected: rho0.cutoff() + 1,
            found: rho1.cutoff() + 1,
        });
    }
    let diff = &rho0.matrix * Complex64::new(p0, 0.0) - &rho1.matrix * Complex64::new(p1, 0.0);
    let norm = trace_norm(&diff)?;
    Ok((0.5 * (1.0 - norm)).clamp(0.0, 0.5))
}

pub(crate) fn check_priors(p0: f64, p1: f64) -> Result<()> {
    if !(p0 >= 0.0 && p1 >= 0.0) || (p0 + p1 - 1.0).abs() > 1e-12 {
        return Err(Error::param(
            "priors",
            format!("need p0, p1 >= 0 with p0 + p1 = 1, got ({p0}, {p1})"),
        ));
    }
    Ok(())
}

fn annihilation(dim: usize) -> Array2<Complex64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// `exp(A)` for anti-Hermitian `A = −iH`, via the eigendecomposition of `H`.
fn exp_anti_hermitian(a: &Array2<Complex64>) -> Array2<Complex64> {
    let h = a.mapv(|z| z * Complex64::new(0.0, 1.0));
    let eig = hermitian_eigen(&h);
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -l))
        .collect();
    let mut scaled = eig.vectors.clone();
    for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
        col.mapv_inplace(|z| z * phases[j]);
    }
    scaled.dot(&dagger(&eig.vectors))
}

/// Truncated-space matrix of a Gaussian unitary, from its exponentiated
/// generator.
pub fn truncated_unitary(u: &GaussianUnitary, dim: usize) -> Array2<Complex64> {
    match *u {
        GaussianUnitary::Rotation(phi) => {
            let mut m = Array2::zeros((dim, dim));
            for n in 0..dim {
                m[[n, n]] = Complex64::from_polar(1.0, -phi * n as f64);
            }
            m
        }
        GaussianUnitary::Displacement(beta) => {
            let a = annihilation(dim);
            let gen = &dagger(&a) * beta - &a * beta.conj();
            exp_anti_hermitian(&gen)
        }
        GaussianUnitary::Squeeze { .. } => {
            let xi = u.squeeze_parameter().expect("squeeze");
            let a = annihilation(dim);
            let a2 = a.dot(&a);
            let ad2 = dagger(&a2);
            let gen = (&a2 * xi.conj() - &ad2 * xi) * Complex64::new(0.5, 0.0);
            exp_anti_hermitian(&gen)
        }
    }
}

/// `U ρ U†` for `U = u_k ⋯ u_1` (the first element acts first), truncated
/// to `cutoff`.
///
/// Gaussian mixtures are transformed exactly component by component;
/// other densities are conjugated by exponentiated truncated generators on
/// a working space at least four times larger than either cutoff.
pub fn apply_gaussian_unitary_fock(
    rho: &FockDensity,
    us: &[GaussianUnitary],
    cutoff: usize,
) -> Result<FockDensity> {
    if us.is_empty() {
        return Err(Error::param("unitaries", "sequence must not be empty"));
    }
    if cutoff > MAX_CUTOFF || rho.cutoff() > MAX_CUTOFF {
        return Err(Error::Dimension {
            expected: MAX_CUTOFF,
            found: cutoff.max(rho.cutoff()),
        });
    }
    let input_trace = rho.trace();
    if let Some(mix) = rho.gaussian_mixture() {
        let moved: Vec<WeightedGaussian> = mix
            .iter()
            .map(|c| WeightedGaussian {
                weight: c.weight,
                state: c.state.apply_all(us),
            })
            .collect();
        return mixture_density(&moved, cutoff, UNITARY_TRACE_LOSS);
    }

    let dim_in = rho.cutoff() + 1;
    let work = 4 * dim_in.max(cutoff + 1);
    let mut total = Array2::<Complex64>::eye(work);
    for u in us {
        total = truncated_unitary(u, work).dot(&total);
    }
    let mut embedded = Array2::<Complex64>::zeros((work, work));
    embedded
        .slice_mut(ndarray::s![..dim_in, ..dim_in])
        .assign(&rho.matrix);
    let moved = total.dot(&embedded).dot(&dagger(&total));
    let mut out = moved.slice(ndarray::s![..=cutoff, ..=cutoff]).to_owned();
    hermitize(&mut out);
    let out = FockDensity {
        matrix: out,
        mixture: None,
    };
    let loss = input_trace - out.trace();
    if loss > UNITARY_TRACE_LOSS {
        return Err(Error::InsufficientCutoff {
            cutoff,
            achieved_norm: out.trace(),
            tail_tol: UNITARY_TRACE_LOSS,
        });
    }
    Ok(out)
}

/// Exact matrix elements `⟨m|D(β)|k⟩` for `m, k ≤ cutoff`.
///
/// Column `k` is `(a† − β*)^k |β⟩ / √k!`; raising never feeds truncated
/// components back down, so no truncation error enters.
pub fn displacement_matrix(beta: Complex64, cutoff: usize) -> Array2<Complex64> {
    let dim = cutoff + 1;
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    let mut col = Array1::<Complex64>::zeros(dim);
    col[0] = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 1..dim {
        col[n] = col[n - 1] * beta / (n as f64).sqrt();
    }
    out.column_mut(0).assign(&col);
    let bc = beta.conj();
    for k in 1..dim {
        let mut next = Array1::<Complex64>::zeros(dim);
        for n in 0..dim {
            let raised = if n == 0 {
                ZERO
            } else {
                col[n - 1] * (n as f64).sqrt()
            };
            next[n] = (raised - bc * col[n]) / (k as f64).sqrt();
        }
        out.column_mut(k).assign(&next);
        col = next;
    }
    out
}

/// `D(β) ρ D†(β)` restricted to the cutoff of `rho`.
pub fn displace_density(rho: &FockDensity, beta: Complex64) -> FockDensity {
    let d = displacement_matrix(beta, rho.cutoff());
    let mut m = d.dot(&rho.matrix).dot(&dagger(&d));
    hermitize(&mut m);
    FockDensity {
        matrix: m,
        mixture: rho.mixture.as_ref().map(|mix| {
            mix.iter()
                .map(|c| WeightedGaussian {
                    weight: c.weight,
                    state: c.state.apply(&GaussianUnitary::Displacement(beta)),
                })
                .collect()
        }),
    }
}

pub(crate) fn hermitize(m: &mut Array2<Complex64>) {
    let n = m.nrows();
    for i in 0..n {
        m[[i, i]].im = 0.0;
        for j in 0..i {
            let z = 0.5 * (m[[i, j]] + m[[j, i]].conj());
            m[[i, j]] = z;
            m[[j, i]] = z.conj();
        }
    }
}

impl FockDensity {
    pub(crate) fn from_parts(
        matrix: Array2<Complex64>,
        mixture: Option<Vec<WeightedGaussian>>,
    ) -> Self {
        Self { matrix, mixture }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::make_dss;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn auto_cutoff_floor_and_monotone() {
        assert_eq!(auto_cutoff(0.0, 1e-10), MIN_CUTOFF);
        let c8 = auto_cutoff(8.0, 1e-10);
        assert!(c8 >= 33);
        assert!(poisson_tail(c8 + 1, 8.0) < 1e-10);
        let mut last = 0;
        for i in 0..60 {
            let cut = auto_cutoff(i as f64 * 0.5, 1e-10);
            assert!(cut >= last);
            last = cut;
        }
    }

    #[test]
    fn vacuum_and_coherent_amplitudes() {
        let v = dss_fock(&PureNormalForm::vacuum(), 20).unwrap();
        assert_eq!(v.amplitudes()[0], c(1.0, 0.0));
        assert!(v.amplitudes().iter().skip(1).all(|z| z.norm() == 0.0));

        let v = dss_fock(&PureNormalForm::coherent(c(1.0, 0.0)), 30).unwrap();
        let mut fact = 1.0;
        for n in 0..=30usize {
            if n > 0 {
                fact *= n as f64;
            }
            let expect = (-0.5f64).exp() / fact.sqrt();
            assert!((v.amplitudes()[n] - c(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn squeezed_vacuum_has_only_even_components() {
        let v = dss_fock(&PureNormalForm::new(c(0.0, 0.0), c(0.5, 0.0)), 60).unwrap();
        for n in (1..=60).step_by(2) {
            assert_eq!(v.amplitudes()[n].norm(), 0.0);
        }
    }

    #[test]
    fn too_small_cutoff_is_reported() {
        let err = dss_fock(&PureNormalForm::coherent(c(3.0, 0.0)), 5).unwrap_err();
        match err {
            Error::InsufficientCutoff {
                cutoff,
                achieved_norm,
                ..
            } => {
                assert_eq!(cutoff, 5);
                assert!(achieved_norm < 0.5);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn pure_density_is_rank_one_projector() {
        let nf = make_dss(c(0.6, 0.0), 0.3).normal_form().unwrap();
        let v = dss_fock(&nf, 40).unwrap();
        let rho = density_from_pure(&v);
        let sq = rho.matrix().dot(rho.matrix());
        let tr = rho.trace();
        for (a, b) in sq.iter().zip(rho.matrix().iter()) {
            assert!((a - b * tr).norm() < 1e-10);
        }
        let p = photon_distribution(&rho);
        for (pn, z) in p.iter().zip(v.amplitudes()) {
            assert!((pn - z.norm_sqr()).abs() < 1e-15);
        }
        let vac = density_from_pure(&dss_fock(&PureNormalForm::vacuum(), 16).unwrap());
        assert_eq!(vac.matrix()[[0, 0]], c(1.0, 0.0));
        assert_eq!(vac.trace(), 1.0);
    }

    #[test]
    fn thermal_distribution_is_geometric() {
        let rho = FockDensity::thermal(1.0, 40);
        let p = photon_distribution(&rho);
        assert_eq!(p[0], 0.5);
        for (n, pn) in p.iter().enumerate() {
            assert!((pn - 0.5f64.powi(n as i32 + 1)).abs() < 1e-16);
        }
    }

    #[test]
    fn trace_norm_simple_cases() {
        let d = Array2::from_diag(&Array1::from(vec![c(0.5, 0.0), c(-0.5, 0.0)]));
        assert!((trace_norm(&d).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trace_norm(&Array2::zeros((4, 4))).unwrap(), 0.0);
        let bad = ndarray::arr2(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(trace_norm(&bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn helstrom_limits() {
        let zero = density_from_pure(&FockVector::new(Array1::from(vec![
            c(1.0, 0.0),
            c(0.0, 0.0),
        ])));
        let one = density_from_pure(&FockVector::new(Array1::from(vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
        ])));
        assert!(helstrom_mixed(&zero, &one, 0.5, 0.5).unwrap().abs() < 1e-15);
        assert!((helstrom_mixed(&zero, &zero, 0.5, 0.5).unwrap() - 0.5).abs() < 1e-15);
        let big = FockDensity::vacuum(5);
        assert!(matches!(
            helstrom_mixed(&zero, &big, 0.5, 0.5),
            Err(Error::Dimension { .. })
        ));
        assert!(helstrom_mixed(&zero, &one, 0.7, 0.7).is_err());
    }

    #[test]
    fn displacement_of_vacuum_density_is_poissonian() {
        let alpha = c(1.2, -0.4);
        let u = [GaussianUnitary::Displacement(alpha)];
        for rho in [
            FockDensity::vacuum(40),
            FockDensity::vacuum(40).without_mixture(),
        ] {
            let out = apply_gaussian_unitary_fock(&rho, &u, 40).unwrap();
            let p = photon_distribution(&out);
            for (n, pn) in p.iter().enumerate() {
                let expect = crate::numeric::special::poisson_pmf(n, alpha.norm_sqr());
                assert!((pn - expect).abs() < 1e-10, "n={n}: {pn} vs {expect}");
            }
        }
    }

    #[test]
    fn displacement_matrix_columns_are_displaced_number_states() {
        let beta = c(0.7, 0.2);
        let d = displacement_matrix(beta, 30);
        let coherent = dss_fock(&PureNormalForm::coherent(beta), 30).unwrap();
        for n in 0..=30 {
            assert!((d[[n, 0]] - coherent.amplitudes()[n]).norm() < 1e-15);
        }
        // unitarity on the low block
        let dd = dagger(&d).dot(&d);
        for i in 0..10 {
            for j in 0..10 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((dd[[i, j]] - c(e, 0.0)).norm() < 1e-10);
            }
        }
    }
}
