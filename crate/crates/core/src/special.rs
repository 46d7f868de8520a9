//! Elementary special functions for integer shape parameters.
//!
//! With integer Nakagami shape every gamma function that shows up is a
//! finite sum, so nothing here needs continued fractions.

use statrs::function::factorial::{binomial, ln_factorial};

/// `ln k!`
pub fn ln_fact(k: u64) -> f64 {
    ln_factorial(k)
}

/// Binomial coefficient `C(n, k)` as a float.
pub fn choose(n: u64, k: u64) -> f64 {
    binomial(n, k)
}

/// Poisson-type term `x^k e^{-x} / k!`, evaluated in log space.
///
/// `x = 0` gives the Kronecker delta in `k`, `x = inf` gives 0.
pub fn poisson_term(k: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if !x.is_finite() {
        return 0.0;
    }
    (k as f64 * x.ln() - x - ln_fact(k)).exp()
}

/// Regularized lower incomplete gamma `P(s, x) = gamma(s, x) / (s-1)!` for
/// integer `s >= 1`. `P(s, inf) = 1`.
pub fn gamma_p_int(s: u64, x: f64) -> f64 {
    assert!(s >= 1, "shape must be a positive integer");
    if x <= 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return 1.0;
    }
    if x < s as f64 {
        // Upper tail of the Poisson sum: sum_{j >= s} x^j e^{-x} / j!.
        // Terms decrease monotonically once j > x.
        let mut term = poisson_term(s, x);
        let mut sum = term;
        let mut j = s;
        while term > sum * 1e-17 && term > 0.0 {
            j += 1;
            term *= x / j as f64;
            sum += term;
        }
        sum.min(1.0)
    } else {
        (1.0 - gamma_q_int(s, x)).max(0.0)
    }
}

/// Upper complement `Q(s, x) = 1 - P(s, x) = e^{-x} sum_{j<s} x^j / j!`.
pub fn gamma_q_int(s: u64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if !x.is_finite() {
        return 0.0;
    }
    if x < s as f64 {
        return 1.0 - gamma_p_int(s, x);
    }
    (0..s).map(|j| poisson_term(j, x)).sum::<f64>().min(1.0)
}

/// Rising factorial `m (m+1) ... (m+j-1)`.
pub fn rising(m: u32, j: usize) -> f64 {
    (0..j).map(|i| (m as usize + i) as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_p_matches_statrs() {
        use statrs::function::gamma::gamma_lr;
        for s in 1..12u64 {
            for &x in &[1e-3, 0.1, 0.7, 1.0, 2.5, 5.0, 11.0, 30.0, 200.0] {
                let ours = gamma_p_int(s, x);
                let theirs = gamma_lr(s as f64, x);
                assert!(
                    (ours - theirs).abs() < 1e-13,
                    "s={s} x={x}: {ours} vs {theirs}"
                );
                assert!((ours + gamma_q_int(s, x) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gamma_p_tails() {
        assert_eq!(gamma_p_int(3, 0.0), 0.0);
        assert_eq!(gamma_p_int(3, f64::INFINITY), 1.0);
        // tiny x: leading term x^s / s!
        let x = 1e-5;
        assert!((gamma_p_int(2, x) / (x * x / 2.0) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn poisson_term_edges() {
        assert_eq!(poisson_term(0, 0.0), 1.0);
        assert_eq!(poisson_term(2, 0.0), 0.0);
        assert_eq!(poisson_term(1, f64::INFINITY), 0.0);
        assert!((poisson_term(3, 2.0) - 8.0 * (-2f64).exp() / 6.0).abs() < 1e-15);
        // no overflow where x^k alone would overflow
        let v = poisson_term(300, 800.0);
        assert!(v.is_finite() && v >= 0.0);
    }

    #[test]
    fn rising_factorial() {
        assert_eq!(rising(1, 0), 1.0);
        assert_eq!(rising(2, 3), 24.0);
    }
}
