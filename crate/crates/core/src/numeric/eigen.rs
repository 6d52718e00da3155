//! Cyclic Jacobi eigensolver for small dense complex Hermitian matrices.

use ndarray::Array2;
use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns, in the order of `values`.
    pub vectors: Array2<Complex64>,
}

/// Eigenvalues only. The input is assumed Hermitian; only its upper
/// triangle and real diagonal influence the result.
pub fn hermitian_eigenvalues(h: &Array2<Complex64>) -> Vec<f64> {
    let mut a = h.clone();
    let values = jacobi(&mut a, None);
    let mut values = values;
    values.sort_by(f64::total_cmp);
    values
}

pub fn hermitian_eigen(h: &Array2<Complex64>) -> HermitianEigen {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = Array2::<Complex64>::eye(n);
    let values = jacobi(&mut a, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    HermitianEigen {
        values: sorted_values,
        vectors,
    }
}

fn off_diagonal_sq(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            s += a[[p, q]].norm_sqr();
        }
    }
    2.0 * s
}

fn jacobi(a: &mut Array2<Complex64>, mut v: Option<&mut Array2<Complex64>>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigensolver needs a square matrix");
    for i in 0..n {
        a[[i, i]] = Complex64::new(a[[i, i]].re, 0.0);
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let target = (1e-15f64).powi(2) * total;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[[p, q]];
                let g = apq.norm();
                if g == 0.0 || g * g <= target * 1e-6 {
                    continue;
                }
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let conj_phase = phase.conj();

                // A <- A G
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * conj_phase * s;
                    a[[k, q]] = akp * s + akq * conj_phase * c;
                }
                // A <- G^dagger A
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * phase * s;
                    a[[q, k]] = apk * s + aqk * phase * c;
                }
                a[[p, q]] = Complex64::new(0.0, 0.0);
                a[[q, p]] = Complex64::new(0.0, 0.0);
                a[[p, p]] = Complex64::new(app - t * g, 0.0);
                a[[q, q]] = Complex64::new(aqq + t * g, 0.0);

                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[[k, p]];
                        let vkq = v[[k, q]];
                        v[[k, p]] = vkp * c - vkq * conj_phase * s;
                        v[[k, q]] = vkp * s + vkq * conj_phase * c;
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[[i, i]].re).collect()
}
