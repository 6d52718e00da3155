//! Special functions and discrete distributions.
//!
//! `erf`/`erfc` delegate to `libm`, a port of the FreeBSD/musl rational
//! approximations (relative error below 1e-15 on the real line).

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn poisson_pmf(n: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * mean.ln() - mean - ln_factorial(n)).exp()
}

/// `P(X >= m)` for `X ~ Poisson(mean)`, summed from the side that avoids
/// cancellation.
pub fn poisson_tail(m: usize, mean: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if mean == 0.0 {
        return 0.0;
    }
    if mean < m as f64 {
        // terms decrease monotonically from k = m
        let mut term = poisson_pmf(m, mean);
        let mut sum = 0.0;
        let mut k = m;
        while term > 0.0 && term > 1e-18 * sum {
            sum += term;
            k += 1;
            term *= mean / k as f64;
        }
        sum
    } else {
        let head: f64 = (0..m).map(|k| poisson_pmf(k, mean)).sum();
        (1.0 - head).max(0.0)
    }
}

/// `P(Bin(trials, p) = successes)`.
pub fn binomial_pmf(trials: usize, successes: usize, p: f64) -> f64 {
    if successes > trials {
        return 0.0;
    }
    if p >= 1.0 {
        return if successes == trials { 1.0 } else { 0.0 };
    }
    if p <= 0.0 {
        return if successes == 0 { 1.0 } else { 0.0 };
    }
    let failures = trials - successes;
    (ln_binomial(trials, successes) + successes as f64 * p.ln() + failures as f64 * (-p).ln_1p())
        .exp()
}

/// `P(Bin(trials, p) >= m)` by direct summation.
pub fn binomial_tail(trials: usize, p: f64, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    (m..=trials).map(|j| binomial_pmf(trials, j, p)).sum()
}
