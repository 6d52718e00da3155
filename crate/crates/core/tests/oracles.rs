mod common;

use common::*;
use dsr_lab::benchmarks::{hb_dss, helstrom_pure, sql_dss_phase_diffused};
use dsr_lab::channels::{
    phase_diffuse_pure, thermal_contaminate_coherent, thermal_contaminate_density,
    PhaseDiffusionSpec, ThermalSpec,
};
use dsr_lab::detection::{
    outcome_probs_coherent, outcome_probs_density, outcome_probs_displaced_thermal, PnrModel,
};
use dsr_lab::fock::{
    apply_gaussian_unitary_fock, density_from_pure, dss_fock, gaussian_density, helstrom_mixed,
    photon_distribution, trace_norm, FockDensity, DEFAULT_TAIL_TOL,
};
use dsr_lab::gaussian::{
    make_dss, pure_overlap_sq, GaussianState, GaussianUnitary, PureNormalForm,
};
use dsr_lab::numeric::special::{erf, erfc};
use dsr_lab::receiver::SignalSpec;
use ndarray::Array2;
use num_complex::Complex64;

#[test]
fn squeezed_vacuum_matches_matrix_exponential() {
    let v = dss_fock(&PureNormalForm::new(c(0.0, 0.0), c(0.5, 0.0)), 60).unwrap();
    let oracle = dss_oracle(c(0.0, 0.0), c(0.5, 0.0), 60, 200);
    for (n, (a, b)) in v.amplitudes().iter().zip(&oracle).enumerate() {
        if n % 2 == 1 {
            assert_eq!(a.norm(), 0.0);
        }
        assert!((a - b).norm() < 1e-9, "n={n}: {a} vs {b}");
    }
}

#[test]
fn displaced_squeezed_amplitudes_match_matrix_exponential() {
    for (beta, xi) in [
        (c(0.7, -0.3), Complex64::from_polar(0.4, 0.6)),
        (c(-1.1, 0.2), Complex64::from_polar(0.8, -2.0)),
        (c(0.0, 1.3), c(0.0, 0.0)),
    ] {
        let v = dss_fock(&PureNormalForm::new(beta, xi), 90).unwrap();
        let oracle = dss_oracle(beta, xi, 90, 320);
        let diff = max_abs_diff(v.amplitudes().as_slice().unwrap(), &oracle);
        assert!(diff < 1e-8, "beta={beta} xi={xi}: {diff}");
    }
}

#[test]
fn normal_form_reproduces_composed_state() {
    let (r, delta, phi): (f64, f64, f64) = (0.5, 0.3, 0.2);
    let state = make_dss(c(0.0, 0.0), 0.0)
        .apply(&GaussianUnitary::squeeze_complex(Complex64::from_polar(
            r,
            -2.0 * phi,
        )))
        .apply(&GaussianUnitary::displacement(c(delta, 0.0)))
        .apply(&GaussianUnitary::squeeze(-r, 0.0));
    let nf = state.normal_form().unwrap();
    let v = dss_fock(&nf, 40).unwrap();

    let work = 200;
    let s_in = squeeze_expm(Complex64::from_polar(r, -2.0 * phi), work);
    let d = displacement_expm(c(delta, 0.0), work);
    let s_out = squeeze_expm(c(-r, 0.0), work);
    let full = s_out * (d * (s_in * vacuum(work)));
    let oracle: Vec<Complex64> = full.iter().take(41).copied().collect();
    let diff = max_abs_diff(
        &fix_phase(v.amplitudes().as_slice().unwrap()),
        &fix_phase(&oracle),
    );
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn overlap_matches_fock_inner_product() {
    let s = SignalSpec::new(1.0).unwrap();
    let a = dss_fock(&s.carrier(0).normal_form().unwrap(), 60).unwrap();
    let b = dss_fock(&s.carrier(1).normal_form().unwrap(), 60).unwrap();
    let inner: Complex64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let gaussian = pure_overlap_sq(&s.carrier(0), &s.carrier(1)).unwrap();
    assert!((inner.norm_sqr() - gaussian).abs() < 1e-9);
    assert!((gaussian - (-8.0f64).exp()).abs() < 1e-12);
}

#[test]
fn wigner_integrates_to_one() {
    for state in [
        GaussianState::vacuum(),
        make_dss(c(0.8, 0.0), 0.4),
        make_dss(c(0.3, -0.5), 0.7).apply(&GaussianUnitary::rotation(0.9)),
    ] {
        let cov = state.cov();
        let [mx, mp] = state.mean();
        let (sx, sp) = (cov[0][0].sqrt(), cov[1][1].sqrt());
        let total = integrate_box(
            |x, p| state.wigner(x, p).unwrap(),
            (mx - 8.0 * sx, mx + 8.0 * sx),
            (mp - 8.0 * sp, mp + 8.0 * sp),
            20,
            8,
        );
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}

#[test]
fn homodyne_density_normalised_and_is_wigner_marginal() {
    let state = make_dss(c(0.8, 0.0), 0.4);
    let var = state.cov()[0][0];
    let m = state.mean()[0];
    let w = 12.0 * var.sqrt();
    let total = adaptive_simpson(&|x| state.homodyne_x_pdf(x), m - w, m + w, 1e-13);
    assert!((total - 1.0).abs() < 1e-10);

    let rotated = state.apply(&GaussianUnitary::rotation(0.35));
    let sp = rotated.cov()[1][1].sqrt();
    let mp = rotated.mean()[1];
    for x in [-1.0, 0.0, 0.4, 1.1, 2.0] {
        let marginal = adaptive_simpson(
            &|p| rotated.wigner(x, p).unwrap(),
            mp - 12.0 * sp,
            mp + 12.0 * sp,
            1e-13,
        );
        assert!((marginal - rotated.homodyne_x_pdf(x)).abs() < 1e-8);
    }
}

#[test]
fn trace_norm_matches_independent_eigensolver() {
    let mut seed = 7u64;
    let mut next = || {
        seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    for dim in [2, 5, 12, 30] {
        let mut h = Array2::<Complex64>::zeros((dim, dim));
        for i in 0..dim {
            h[[i, i]] = c(next(), 0.0);
            for j in 0..i {
                let z = c(next(), next());
                h[[i, j]] = z;
                h[[j, i]] = z.conj();
            }
        }
        let oracle: f64 = hermitian_eigenvalues_oracle(&h)
            .iter()
            .map(|e| e.abs())
            .sum();
        assert!((trace_norm(&h).unwrap() - oracle).abs() < 1e-10);
    }
}

#[test]
fn mixed_helstrom_on_pure_pairs_matches_overlap_formula() {
    for n in [0.1, 0.5, 1.0, 1.5] {
        let s = SignalSpec::new(n).unwrap();
        let rho0 = gaussian_density(&s.carrier(0), 60, DEFAULT_TAIL_TOL).unwrap();
        let rho1 = gaussian_density(&s.carrier(1), 60, DEFAULT_TAIL_TOL).unwrap();
        let mixed = helstrom_mixed(&rho0, &rho1, 0.5, 0.5).unwrap();
        let ov = pure_overlap_sq(&s.carrier(0), &s.carrier(1)).unwrap();
        assert!((mixed - helstrom_pure(ov, 0.5, 0.5)).abs() < 1e-9, "N={n}");
        assert!((mixed - hb_dss(n)).abs() < 1e-9);
    }
    let s = SignalSpec::new(1.0).unwrap();
    let rho0 = gaussian_density(&s.carrier(0), 60, DEFAULT_TAIL_TOL).unwrap();
    let rho1 = gaussian_density(&s.carrier(1), 60, DEFAULT_TAIL_TOL).unwrap();
    assert!((helstrom_mixed(&rho0, &rho1, 0.5, 0.5).unwrap() - 8.387e-5).abs() < 1e-8);
}

#[test]
fn receiver_unitary_in_fock_basis_gives_vacuum_and_poisson() {
    let s = SignalSpec::new(1.0).unwrap();
    let us = s.receiver_unitaries();
    let rho0 = gaussian_density(&s.carrier(0), 60, DEFAULT_TAIL_TOL).unwrap();
    let out0 = apply_gaussian_unitary_fock(&rho0, &us, 40).unwrap();
    assert!((out0.matrix()[[0, 0]].re - 1.0).abs() < 1e-9);

    let rho1 = gaussian_density(&s.carrier(1), 60, DEFAULT_TAIL_TOL).unwrap();
    let out1 = apply_gaussian_unitary_fock(&rho1, &us, 40).unwrap();
    let p = photon_distribution(&out1);
    let mut poisson = (-8.0f64).exp();
    for (n, pn) in p.iter().enumerate() {
        assert!((pn - poisson).abs() < 1e-8, "n={n}");
        poisson *= 8.0 / (n + 1) as f64;
    }

    // generic path: exponentiated generators on an enlarged space
    let generic = apply_gaussian_unitary_fock(&rho0.clone().without_mixture(), &us, 20).unwrap();
    assert!((generic.matrix()[[0, 0]].re - 1.0).abs() < 1e-8);
}

#[test]
fn generic_unitary_path_is_linear_on_mixtures() {
    let a = gaussian_density(&make_dss(c(0.4, 0.1), 0.2), 30, DEFAULT_TAIL_TOL).unwrap();
    let b = gaussian_density(&make_dss(c(-0.2, 0.3), 0.1), 30, DEFAULT_TAIL_TOL).unwrap();
    let us = [
        GaussianUnitary::displacement(c(0.3, -0.2)),
        GaussianUnitary::rotation(0.4),
    ];
    let mix =
        FockDensity::from_matrix(a.matrix() * c(0.3, 0.0) + b.matrix() * c(0.7, 0.0)).unwrap();
    let lhs = apply_gaussian_unitary_fock(&mix, &us, 20).unwrap();
    let ta = apply_gaussian_unitary_fock(&a.without_mixture(), &us, 20).unwrap();
    let tb = apply_gaussian_unitary_fock(&b.without_mixture(), &us, 20).unwrap();
    let rhs = ta.matrix() * c(0.3, 0.0) + tb.matrix() * c(0.7, 0.0);
    let diff = (lhs.matrix() - &rhs)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-10);
}

#[test]
fn displaced_thermal_closed_form_matches_quadrature() {
    let (t, w) = gauss_hermite_oracle(64);
    let d = 2.0 * 2f64.sqrt();
    let nt: f64 = 1e-3;
    let scale = nt.sqrt();
    let mut q0 = 0.0;
    for (tu, wu) in t.iter().zip(&w) {
        for (tv, wv) in t.iter().zip(&w) {
            let lam = c(scale * tu, scale * tv);
            q0 += wu * wv / std::f64::consts::PI * (-(lam + d).norm_sqr()).exp();
        }
    }
    let closed = outcome_probs_displaced_thermal(&PnrModel::ideal(5), c(d, 0.0), nt);
    assert!((closed.probs()[0] - q0).abs() < 1e-8);

    // full outcome law with loss and dark counts
    let det = PnrModel::new(4, 0.8, 0.02).unwrap();
    let nt: f64 = 0.05;
    let scale = nt.sqrt();
    let mut q = vec![0.0; 5];
    for (tu, wu) in t.iter().zip(&w) {
        for (tv, wv) in t.iter().zip(&w) {
            let lam = c(scale * tu, scale * tv);
            let coh = outcome_probs_coherent(&det, (lam + c(1.2, 0.0)).norm_sqr());
            for (k, p) in coh.probs().iter().enumerate() {
                q[k] += wu * wv / std::f64::consts::PI * p;
            }
        }
    }
    let closed = outcome_probs_displaced_thermal(&det, c(1.2, 0.0), nt);
    for (a, b) in closed.probs().iter().zip(&q) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn thermal_channel_quadrature_matches_closed_form() {
    let th = ThermalSpec::new(0.05).unwrap();
    let d = c(1.0, 0.3);
    let rho = gaussian_density(&make_dss(d, 0.0), 30, DEFAULT_TAIL_TOL)
        .unwrap()
        .without_mixture();
    let out = thermal_contaminate_density(&rho, &th, 24).unwrap();
    let det = PnrModel::new(6, 0.9, 0.0).unwrap();
    let from_quad = outcome_probs_density(&det, &out).unwrap();
    let closed = outcome_probs_displaced_thermal(&det, d, th.n_t());
    for (a, b) in from_quad.probs().iter().zip(closed.probs()) {
        assert!((a - b).abs() < 1e-6);
    }
    let exact = thermal_contaminate_coherent(d, &th).density(30);
    let diff = (out.matrix() - exact.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-6);
}

#[test]
fn thermal_channel_commutes_with_displacement() {
    let th = ThermalSpec::new(0.02).unwrap();
    let a = c(0.4, -0.2);
    let rho = gaussian_density(&make_dss(c(0.1, 0.0), 0.2), 24, DEFAULT_TAIL_TOL)
        .unwrap()
        .without_mixture();
    let shifted = dsr_lab::fock::displace_density(&rho, a);
    let lhs = thermal_contaminate_density(&shifted, &th, 20).unwrap();
    let rhs =
        dsr_lab::fock::displace_density(&thermal_contaminate_density(&rho, &th, 20).unwrap(), a);
    // compare away from the truncation edge
    for i in 0..12 {
        for j in 0..12 {
            assert!((lhs.matrix()[[i, j]] - rhs.matrix()[[i, j]]).norm() < 1e-7);
        }
    }
}

#[test]
fn povm_path_matches_poisson_path() {
    for mu in [0.0f64, 0.5, 8.0] {
        for eta in [1.0, 0.8] {
            for nu in [0.0, 0.01] {
                let det = PnrModel::new(3, eta, nu).unwrap();
                let v = dss_fock(&PureNormalForm::coherent(c(mu.sqrt(), 0.0)), 60).unwrap();
                let rho = density_from_pure(&v);
                let a = outcome_probs_density(&det, &rho).unwrap();
                let b = outcome_probs_coherent(&det, mu);
                for (x, y) in a.probs().iter().zip(b.probs()) {
                    assert!((x - y).abs() < 1e-9, "mu={mu} eta={eta} nu={nu}");
                }
            }
        }
    }
}

#[test]
fn quadrature_order_doubling_is_converged() {
    let s = SignalSpec::new(1.0).unwrap();
    let alpha = c(s.alpha(), 0.0);
    let lo =
        phase_diffuse_pure(alpha, s.r(), &PhaseDiffusionSpec::new(0.1, 41).unwrap(), 40).unwrap();
    let hi =
        phase_diffuse_pure(alpha, s.r(), &PhaseDiffusionSpec::new(0.1, 81).unwrap(), 40).unwrap();
    let diff = (lo.matrix() - hi.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-9, "{diff}");

    let a = sql_dss_phase_diffused(1.0, 0.1, 41).unwrap();
    let b = sql_dss_phase_diffused(1.0, 0.1, 81).unwrap();
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn phase_diffused_helstrom_bounds() {
    use dsr_lab::benchmarks::hb_dss_phase_diffused;
    let h0 = hb_dss_phase_diffused(1.0, 0.0, None, 41).unwrap();
    assert!((h0 - hb_dss(1.0)).abs() < 1e-8);
    let h1 = hb_dss_phase_diffused(1.0, 0.1, None, 41).unwrap();
    assert!(h1 >= hb_dss(1.0));
    let a = hb_dss_phase_diffused(1.0, 0.1, Some(40), 41).unwrap();
    let b = hb_dss_phase_diffused(1.0, 0.1, Some(80), 41).unwrap();
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn erf_matches_series_and_continued_fraction() {
    for i in 0..=40 {
        let x = i as f64 * 0.05;
        let s = erf_series(x);
        assert!(
            (erf(x) - s).abs() <= 1e-14 * s.abs().max(1e-300) + 1e-16,
            "x={x}"
        );
    }
    for i in 0..=40 {
        let x = 2.0 + i as f64 * 0.25;
        let cf = erfc_continued_fraction(x);
        assert!(((erfc(x) - cf) / cf).abs() < 1e-13, "x={x}");
    }
}

#[test]
fn fock_pipeline_reproduces_closed_forms() {
    use dsr_lab::receiver::{dsr_error_eta, dsr_error_fock_pipeline, dsr_error_ideal, Numerics};
    for n in [0.1, 0.5, 1.0, 2.0] {
        let s = SignalSpec::new(n).unwrap();
        let ideal = dsr_error_fock_pipeline(&s, &PnrModel::ideal(1), &Numerics::default()).unwrap();
        assert!((ideal.p_err - dsr_error_ideal(n)).abs() < 1e-8, "N={n}");
        let lossy = PnrModel::new(1, 0.8, 0.0).unwrap();
        let r = dsr_error_fock_pipeline(&s, &lossy, &Numerics::default()).unwrap();
        assert!((r.p_err - dsr_error_eta(n, 0.8)).abs() < 1e-8, "N={n}");
    }
}

#[test]
fn zero_diffusion_matches_pure_path() {
    use dsr_lab::receiver::{dsr_error_phase_diffusion, dsr_error_pnr, Numerics};
    let det = PnrModel::new(3, 0.9, 0.01).unwrap();
    let pd = PhaseDiffusionSpec::new(0.0, 41).unwrap();
    for n in [0.2, 1.0, 2.5] {
        let s = SignalSpec::new(n).unwrap();
        let a = dsr_error_phase_diffusion(&s, &det, &pd, &Numerics::default()).unwrap();
        let b = dsr_error_pnr(&s, &det).unwrap();
        assert!((a.p_err - b.p_err).abs() < 1e-9);
    }
}

#[test]
fn exact_thermal_channel_matches_quadrature_and_closed_form() {
    use dsr_lab::channels::thermal_contaminate_exact;
    let th = ThermalSpec::new(0.05).unwrap();

    let vac = FockDensity::vacuum(30);
    let out = thermal_contaminate_exact(&vac, &th).unwrap();
    let p = photon_distribution(&out);
    for (n, pn) in p.iter().enumerate() {
        let geometric = 0.05f64.powi(n as i32) / 1.05f64.powi(n as i32 + 1);
        assert!((pn - geometric).abs() < 1e-14);
    }

    let d = c(1.0, 0.3);
    let coh = gaussian_density(&make_dss(d, 0.0), 30, DEFAULT_TAIL_TOL).unwrap();
    let exact = thermal_contaminate_coherent(d, &th).density(30);
    let out = thermal_contaminate_exact(&coh, &th).unwrap();
    let diff = (out.matrix() - exact.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-9, "{diff}");

    // non-Gaussian input: a phase-diffused squeezed state
    let s = SignalSpec::new(0.5).unwrap();
    let pd = phase_diffuse_pure(
        c(s.alpha(), 0.0),
        s.r(),
        &PhaseDiffusionSpec::new(0.3, 41).unwrap(),
        30,
    )
    .unwrap()
    .without_mixture();
    let quad = thermal_contaminate_density(&pd, &th, 32).unwrap();
    let out = thermal_contaminate_exact(&pd, &th).unwrap();
    for i in 0..20 {
        for j in 0..20 {
            assert!((out.matrix()[[i, j]] - quad.matrix()[[i, j]]).norm() < 1e-7);
        }
    }
    out.check_invariants(1e-8).unwrap();
}

#[test]
fn exact_thermal_channel_commutes_with_displacement() {
    use dsr_lab::channels::thermal_contaminate_exact;
    use dsr_lab::fock::displace_density;
    let th = ThermalSpec::new(0.02).unwrap();
    let a = c(0.4, -0.2);
    let rho = gaussian_density(&make_dss(c(0.1, 0.0), 0.2), 40, DEFAULT_TAIL_TOL)
        .unwrap()
        .without_mixture();
    let lhs = thermal_contaminate_exact(&displace_density(&rho, a), &th).unwrap();
    let rhs = displace_density(&thermal_contaminate_exact(&rho, &th).unwrap(), a);
    for i in 0..20 {
        for j in 0..20 {
            assert!((lhs.matrix()[[i, j]] - rhs.matrix()[[i, j]]).norm() < 1e-9);
        }
    }
}
