#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    a
}

/// `exp(β a† − β* a)` on a truncated space.
pub fn displacement_expm(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let ad = a.adjoint();
    (ad * beta - a * beta.conj()).exp()
}

/// `exp(½(ξ* a² − ξ a†²))` on a truncated space.
pub fn squeeze_expm(xi: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let a2 = &a * &a;
    let ad2 = a2.adjoint();
    ((a2 * xi.conj() - ad2 * xi) * c(0.5, 0.0)).exp()
}

pub fn vacuum(dim: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dim);
    v[0] = c(1.0, 0.0);
    v
}

/// Amplitudes of `D(β)S(ξ)|0⟩` up to `cutoff`, from exponentials on a
/// space of dimension `work`.
pub fn dss_oracle(beta: Complex64, xi: Complex64, cutoff: usize, work: usize) -> Vec<Complex64> {
    let v = displacement_expm(beta, work) * (squeeze_expm(xi, work) * vacuum(work));
    v.iter().take(cutoff + 1).copied().collect()
}

/// Removes the global phase so that the largest entry is real positive.
pub fn fix_phase(v: &[Complex64]) -> Vec<Complex64> {
    let k = (0..v.len())
        .max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm()))
        .unwrap();
    let ph = v[k] / v[k].norm();
    v.iter().map(|z| z / ph).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix via the embedding
/// `[[Re, −Im], [Im, Re]]`, each eigenvalue appearing twice.
pub fn hermitian_eigenvalues_oracle(h: &ndarray::Array2<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[[i, j]];
            m[(i, j)] = z.re;
            m[(i + n, j + n)] = z.re;
            m[(i, j + n)] = -z.im;
            m[(i + n, j)] = z.im;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Golub–Welsch rule from the Jacobi matrix of a three-term recurrence.
fn golub_welsch(offdiag: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = offdiag.len() + 1;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for (i, b) in offdiag.iter().enumerate() {
        j[(i, i + 1)] = *b;
        j[(i + 1, i)] = *b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre_oracle(n: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&off, 2.0)
}

/// Gauss–Hermite nodes and weights for the weight `e^{-t²}`.
pub fn gauss_hermite_oracle(n: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    golub_welsch(&off, std::f64::consts::PI.sqrt())
}

/// Tensor Gauss–Legendre integral over a box, split into `panels²` cells.
pub fn integrate_box<F: Fn(f64, f64) -> f64>(
    f: F,
    x: (f64, f64),
    y: (f64, f64),
    order: usize,
    panels: usize,
) -> f64 {
    let (t, w) = gauss_legendre_oracle(order);
    let hx = (x.1 - x.0) / panels as f64;
    let hy = (y.1 - y.0) / panels as f64;
    let mut sum = 0.0;
    for px in 0..panels {
        let cx = x.0 + (px as f64 + 0.5) * hx;
        for py in 0..panels {
            let cy = y.0 + (py as f64 + 0.5) * hy;
            for (ti, wi) in t.iter().zip(&w) {
                for (tj, wj) in t.iter().zip(&w) {
                    sum += wi * wj * f(cx + 0.5 * hx * ti, cy + 0.5 * hy * tj);
                }
            }
        }
    }
    sum * 0.25 * hx * hy
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `erf` by its Maclaurin series (|x| ≲ 3).
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    for n in 1..200 {
        term *= -x2 / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// `erfc` by its continued fraction (x ≳ 2), evaluated bottom-up.
pub fn erfc_continued_fraction(x: f64) -> f64 {
    let mut f = 0.0;
    for k in (1..400).rev() {
        f = (k as f64 / 2.0) / (x + f);
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / (x + f)
}
