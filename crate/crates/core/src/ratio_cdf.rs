//! Distributions of ratios of independent Gamma(m, m) powers.
//!
//! With `X, Y ~ Gamma(m, m)` independent and constants `a, b, I >= 0`:
//!
//! * `T1 = aX / (bY + I)`
//! * `T2 = max(aX, bY) / (min(aX, bY) + I)`
//! * `T3 = bY / (aX + I + g (aX + bY + I))`
//!
//! and the joint event `{T1 <= τ, T3 <= τ}` used for amplify-and-forward.
//! Upper limits written as `x / ((1 - τ) 1(τ < 1))` in the literature are
//! formalized by [`cutoff`]: outside the indicator the limit is `+inf` and
//! the regularized gamma function there is 1.

use crate::special::{choose, gamma_p_int, poisson_term};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCdfParams {
    pub a: f64,
    pub b: f64,
    pub i_plus_n: f64,
    pub g: f64,
    pub m: u32,
}

impl RatioCdfParams {
    pub fn new(a: f64, b: f64, i_plus_n: f64, g: f64, m: u32) -> Self {
        debug_assert!(a >= 0.0 && b >= 0.0 && (a > 0.0 || b > 0.0));
        debug_assert!(i_plus_n >= 0.0 && g >= 0.0 && m >= 1);
        RatioCdfParams {
            a,
            b,
            i_plus_n,
            g,
            m,
        }
    }
}

/// `num / ((1 - d) 1(d < 1))`: `num / (1 - d)` when `d < 1`, else `+inf`.
pub fn cutoff(num: f64, d: f64) -> f64 {
    if d < 1.0 {
        num / (1.0 - d)
    } else {
        f64::INFINITY
    }
}

/// `coef * limit` with `0 * inf = 0`.
fn scaled(coef: f64, limit: f64) -> f64 {
    if limit == 0.0 || coef == 0.0 {
        0.0
    } else {
        coef * limit
    }
}

/// `x / y` with `x / 0 = inf` for `x > 0` and `0 / 0 = 0`.
fn ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x / y
    }
}

/// Convex weights `(x/(x+y), y/(x+y))`.
fn split(x: f64, y: f64) -> (f64, f64) {
    let s = x + y;
    if s == 0.0 {
        (0.5, 0.5)
    } else {
        (x / s, y / s)
    }
}

/// Sum over `i < m`, `k <= i` of `C(k+m-1, k) px^m py^k pt(i-k, w) Pfac(m+k)`.
/// This is the shape shared by every double sum below.
fn double_sum(m: u32, px: f64, py: f64, w: f64, pfac: impl Fn(u64) -> f64) -> f64 {
    let m64 = m as u64;
    let pm = px.powi(m as i32);
    if pm == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..m64 {
        for k in 0..=i {
            let t = poisson_term(i - k, w);
            if t == 0.0 {
                continue;
            }
            s += choose(k + m64 - 1, k) * pm * py.powi(k as i32) * t * pfac(m64 + k);
        }
    }
    s
}

/// Single sum `Σ_i C(m+i-1, i) P(m+i, x) (px^m py^i + px^i py^m)`.
fn single_sum(m: u32, px: f64, py: f64, x: f64) -> f64 {
    let m64 = m as u64;
    (0..m64)
        .map(|i| {
            choose(m64 + i - 1, i)
                * gamma_p_int(m64 + i, x)
                * (px.powi(m as i32) * py.powi(i as i32) + px.powi(i as i32) * py.powi(m as i32))
        })
        .sum()
}

/// CDF of `T1` at `tau`.
pub fn cdf_t1(tau: f64, p: &RatioCdfParams) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    if p.a == 0.0 {
        return 1.0;
    }
    let m = p.m as f64;
    let (pa, pb) = split(p.a, p.b * tau);
    let w = m * tau * p.i_plus_n / p.a;
    (1.0 - double_sum(p.m, pa, pb, w, |_| 1.0)).clamp(0.0, 1.0)
}

/// CDF of `T2` at `tau`.
pub fn cdf_t2(tau: f64, p: &RatioCdfParams) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let (a, b, i) = (p.a, p.b, p.i_plus_n);
    let m = p.m as f64;
    let lim = cutoff(m * tau * i, tau);
    let (pa0, pb0) = split(a, b);
    let s1 = single_sum(p.m, pa0, pb0, scaled(ratio(1.0, a) + ratio(1.0, b), lim));
    let (pa1, pb1) = split(a, b * tau);
    let x2 = scaled(ratio(tau, a) + ratio(1.0, b), lim);
    let s2 = double_sum(p.m, pa1, pb1, ratio(m * tau * i, a), |s| gamma_p_int(s, x2));
    let (pb2, pa2) = split(b, a * tau);
    let x3 = scaled(ratio(1.0, a) + ratio(tau, b), lim);
    let s3 = double_sum(p.m, pb2, pa2, ratio(m * tau * i, b), |s| gamma_p_int(s, x3));
    (s1 - s2 - s3).clamp(0.0, 1.0)
}

/// Joint CDF `P[T1 <= tau, T3 <= tau]`.
pub fn cdf_t1_t3_joint(tau: f64, p: &RatioCdfParams) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let g = p.g;
    if g > 0.0 && tau * g >= 1.0 {
        return cdf_t1(tau, p);
    }
    let (a, b, i) = (p.a, p.b, p.i_plus_n);
    let m = p.m as f64;
    let a1 = a * (1.0 + g);
    let b1 = b * (1.0 - tau * g);
    let tg = tau * (1.0 + g);
    let lim = cutoff(m * tg * i, tg);
    let (pa0, pb0) = split(a1, b);
    let s1 = single_sum(p.m, pa0, pb0, scaled(ratio(1.0, a1) + ratio(1.0, b), lim));
    let (pa1, pb1) = split(a, b * tau);
    let x2 = scaled(ratio(tau, a) + ratio(1.0, b), lim);
    let s2 = double_sum(p.m, pa1, pb1, ratio(m * tau * i, a), |s| gamma_p_int(s, x2));
    let (pb2, pa2) = split(b1, a * tg);
    let x3 = scaled(ratio(1.0, a1) + ratio(tau, b1), lim);
    let s3 = double_sum(p.m, pb2, pa2, ratio(m * tg * i, b1), |s| gamma_p_int(s, x3));
    (s1 - s2 - s3).clamp(0.0, 1.0)
}

/// `e^{-x}` with `e^{-inf} = 0`.
fn exp_neg(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        (-x).exp()
    }
}

/// Rayleigh (m = 1) closed forms: `(F_T1, F_T2, F_{T1,T3})`.
pub fn rayleigh_cdfs(tau: f64, p: &RatioCdfParams) -> (f64, f64, f64) {
    if tau <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let (a, b, i, g) = (p.a, p.b, p.i_plus_n, p.g);
    let ta = split(a, b * tau).0 * exp_neg(ratio(tau * i, a));
    let tb = split(b, a * tau).0 * exp_neg(ratio(tau * i, b));
    let f1 = 1.0 - ta;
    let cross = a * b * (1.0 + tau) * (1.0 - tau) / ((a + b * tau) * (b + a * tau));
    let f2 = 1.0 - ta - tb
        + cross * exp_neg(scaled(ratio(1.0, a) + ratio(1.0, b), cutoff(tau * i, tau)));

    let b1 = b * (1.0 - tau * g);
    let tg = tau * (1.0 + g);
    let t3 = ratio(b1, b1 + a * tg) * exp_neg(scaled(ratio(1.0, b), cutoff(tg * i, tau * g)));
    let cross3 = a * b * (1.0 + tau) * (1.0 - tg) / ((a + b * tau) * (b1 + a * tg));
    let f13 = 1.0 - ta - t3
        + cross3
            * exp_neg(scaled(
                ratio(1.0, a * (1.0 + g)) + ratio(1.0, b),
                cutoff(tg * i, tg),
            ));
    (f1, f2, f13)
}

/// Amplify-and-forward end-to-end SINR `xy / (x + y + 1)`.
pub fn af_end_to_end_sinr(s_bd: f64, s_du: f64) -> f64 {
    if s_bd.is_infinite() {
        return s_du;
    }
    if s_du.is_infinite() {
        return s_bd;
    }
    s_bd * s_du / (s_bd + s_du + 1.0)
}

/// Decode-and-forward end-to-end SINR `min(x, y)`.
pub fn df_end_to_end_sinr(s_bd: f64, s_du: f64) -> f64 {
    s_bd.min(s_du)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, i: f64, g: f64, m: u32) -> RatioCdfParams {
        RatioCdfParams::new(a, b, i, g, m)
    }

    #[test]
    fn t1_example() {
        let v = cdf_t1(1.0, &p(1.0, 4.0, 2.0, 0.0, 1));
        assert!((v - (1.0 - 0.2 * (-2f64).exp())).abs() < 1e-15);
        assert!((v - 0.97293).abs() < 1e-5);
    }

    #[test]
    fn t2_without_interference_is_zero_below_one() {
        for m in 1..4 {
            for tau in [0.1, 0.5, 0.99] {
                assert!(cdf_t2(tau, &p(1.0, 4.0, 0.0, 0.0, m)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn seams_are_continuous() {
        for m in 1..4 {
            let q = p(1.3, 0.7, 0.4, 0.5, m);
            for seam in [1.0 / 1.5, 2.0] {
                let lo = cdf_t1_t3_joint(seam * (1.0 - 1e-12), &q);
                let hi = cdf_t1_t3_joint(seam * (1.0 + 1e-12), &q);
                assert!((lo - hi).abs() < 1e-9, "m={m} seam={seam}: {lo} vs {hi}");
            }
            let lo = cdf_t2(1.0 - 1e-12, &q);
            let hi = cdf_t2(1.0 + 1e-12, &q);
            assert!((lo - hi).abs() < 1e-9);
        }
    }

    #[test]
    fn end_to_end() {
        assert_eq!(df_end_to_end_sinr(3.0, 3.0), 3.0);
        assert!((af_end_to_end_sinr(3.0, 3.0) - 9.0 / 7.0).abs() < 1e-15);
        assert_eq!(af_end_to_end_sinr(2.5, f64::INFINITY), 2.5);
        assert_eq!(af_end_to_end_sinr(f64::INFINITY, 0.5), 0.5);
    }
}
