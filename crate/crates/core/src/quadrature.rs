//! Adaptive 21-point Gauss-Kronrod quadrature.
//!
//! The vector form integrates several integrands that share one expensive
//! setup (geometry, gains, LoS probability) on a common adaptive mesh; the
//! mesh is refined until every component meets its own tolerance.

#![allow(clippy::excessive_precision)]

// Kronrod abscissae, positive half, and the matching weights. Odd positions
// are the embedded 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525478122,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tol {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tol {
            abs,
            rel,
            max_intervals: 400,
        }
    }
}

impl Default for Tol {
    fn default() -> Self {
        Tol::new(1e-12, 1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Panel {
    a: f64,
    b: f64,
    val: Vec<f64>,
    err: Vec<f64>,
}

/// One GK21 step on [a, b] for `n` components. `scratch` holds 21*n values.
fn gk21<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    n: usize,
    scratch: &mut [f64],
) -> (Vec<f64>, Vec<f64>) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    // fv layout: node index major
    for (i, &x) in XGK.iter().enumerate() {
        if i < 10 {
            f(c - h * x, &mut scratch[(2 * i) * n..(2 * i + 1) * n]);
            f(c + h * x, &mut scratch[(2 * i + 1) * n..(2 * i + 2) * n]);
        } else {
            f(c, &mut scratch[20 * n..21 * n]);
        }
    }
    let mut val = vec![0.0; n];
    let mut err = vec![0.0; n];
    for k in 0..n {
        let fc = scratch[20 * n + k];
        let mut rk = WGK[10] * fc;
        let mut rg = 0.0;
        let mut rabs = WGK[10] * fc.abs();
        for i in 0..10 {
            let s = scratch[2 * i * n + k] + scratch[(2 * i + 1) * n + k];
            rk += WGK[i] * s;
            rabs += WGK[i] * (scratch[2 * i * n + k].abs() + scratch[(2 * i + 1) * n + k].abs());
            if i % 2 == 1 {
                rg += WG[i / 2] * s;
            }
        }
        let mean = 0.5 * rk;
        let mut rasc = WGK[10] * (fc - mean).abs();
        for i in 0..10 {
            rasc += WGK[i]
                * ((scratch[2 * i * n + k] - mean).abs()
                    + (scratch[(2 * i + 1) * n + k] - mean).abs());
        }
        let result = rk * h;
        let rabs = rabs * h.abs();
        let rasc = rasc * h.abs();
        let mut e = ((rk - rg) * h).abs();
        if rasc != 0.0 && e != 0.0 {
            e = rasc * (200.0 * e / rasc).powf(1.5).min(1.0);
        }
        if rabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * rabs);
        }
        val[k] = result;
        err[k] = e;
    }
    (val, err)
}

/// Integrates `n` functions over `[a, b]` on a shared adaptive mesh.
///
/// Component `k` is converged once its error is below
/// `max(abs[k], rel * |value_k|)`. `abs` may hold one entry, which is then
/// applied to every component. Returns values and error estimates.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    n: usize,
    a: f64,
    b: f64,
    abs: &[f64],
    rel: f64,
    max_intervals: usize,
) -> (Vec<f64>, Vec<f64>) {
    assert!(abs.len() == 1 || abs.len() == n);
    let abs_k = |k: usize| if abs.len() == 1 { abs[0] } else { abs[k] };
    if a == b || n == 0 {
        return (vec![0.0; n], vec![0.0; n]);
    }
    let mut scratch = vec![0.0; 21 * n];
    let (v, e) = gk21(&mut f, a, b, n, &mut scratch);
    let mut panels = vec![Panel { a, b, val: v, err: e }];
    loop {
        let mut tot = vec![0.0; n];
        let mut tot_err = vec![0.0; n];
        for p in &panels {
            for k in 0..n {
                tot[k] += p.val[k];
                tot_err[k] += p.err[k];
            }
        }
        let tol: Vec<f64> = (0..n).map(|k| abs_k(k).max(rel * tot[k].abs())).collect();
        let done = (0..n).all(|k| tot_err[k] <= tol[k]);
        if done || panels.len() >= max_intervals {
            return (tot, tot_err);
        }
        // bisect the panel contributing the largest normalized error
        let (worst, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let w = (0..n)
                    .filter(|&k| tot_err[k] > tol[k])
                    .map(|k| p.err[k] / tol[k].max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                (i, w)
            })
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval exhausted at machine precision
            panels.push(p);
            let (tot, err) = panels.iter().fold(
                (vec![0.0; n], vec![0.0; n]),
                |(mut t, mut e), p| {
                    for k in 0..n {
                        t[k] += p.val[k];
                        e[k] += p.err[k];
                    }
                    (t, e)
                },
            );
            return (tot, err);
        }
        let (v1, e1) = gk21(&mut f, p.a, mid, n, &mut scratch);
        let (v2, e2) = gk21(&mut f, mid, p.b, n, &mut scratch);
        panels.push(Panel {
            a: p.a,
            b: mid,
            val: v1,
            err: e1,
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            val: v2,
            err: e2,
        });
    }
}

/// Scalar adaptive integral over a finite interval.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tol) -> Estimate {
    let (v, e) = integrate_vec(
        |x, out: &mut [f64]| out[0] = f(x),
        1,
        a,
        b,
        &[tol.abs],
        tol.rel,
        tol.max_intervals,
    );
    Estimate {
        value: v[0],
        error: e[0],
    }
}

/// Maps `t in (0, 1]` onto `[a, inf)` via `u = a + c (1/t^2 - 1)`.
///
/// Returns `(u, du/dt)` up to sign. Integrands decaying like `u^{-3/2}` become
/// bounded at `t -> 0`, which keeps slowly decaying interference tails cheap.
#[inline]
pub fn semi_inf_map(t: f64, a: f64, c: f64) -> (f64, f64) {
    let it = 1.0 / t;
    (a + c * (it * it - 1.0), 2.0 * c * it * it * it)
}

/// Integral over `[a, inf)`; `scale` should be of the order of the length on
/// which the integrand varies.
pub fn integrate_semi_inf<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    tol: Tol,
) -> Estimate {
    integrate(
        |t| {
            let (u, j) = semi_inf_map(t, a, scale);
            let v = f(u);
            if v == 0.0 {
                0.0
            } else {
                v * j
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Vector version of [`integrate_semi_inf`].
pub fn integrate_vec_semi_inf<F: FnMut(f64, &mut [f64])>(
    f: F,
    n: usize,
    a: f64,
    scale: f64,
    abs: &[f64],
    rel: f64,
    max_intervals: usize,
) -> (Vec<f64>, Vec<f64>) {
    integrate_vec_mapped(f, n, a, f64::INFINITY, scale, abs, rel, max_intervals)
}

/// Integral over `[a, b]` with `b` possibly infinite, through the same map
/// as [`integrate_vec_semi_inf`]; suited to long intervals with a power-law
/// decay away from `a`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_vec_mapped<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    n: usize,
    a: f64,
    b: f64,
    scale: f64,
    abs: &[f64],
    rel: f64,
    max_intervals: usize,
) -> (Vec<f64>, Vec<f64>) {
    if b <= a {
        return (vec![0.0; n], vec![0.0; n]);
    }
    let t0 = if b.is_finite() {
        1.0 / (1.0 + (b - a) / scale).sqrt()
    } else {
        0.0
    };
    integrate_vec(
        |t, out: &mut [f64]| {
            let (u, j) = semi_inf_map(t, a, scale);
            f(u, out);
            for o in out.iter_mut() {
                if *o != 0.0 {
                    *o *= j;
                }
            }
        },
        n,
        t0,
        1.0,
        abs,
        rel,
        max_intervals,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mapped_finite_interval() {
        // ∫_1^9 x^-2 dx = 8/9
        let (v, _) = integrate_vec_mapped(|x, o: &mut [f64]| o[0] = x.powi(-2), 1, 1.0, 9.0, 1.0, &[0.0], 1e-12, 100);
        assert!((v[0] - 8.0 / 9.0).abs() < 1e-12);
        let (w, _) = integrate_vec_mapped(|x, o: &mut [f64]| o[0] = x.powi(-2), 1, 1.0, f64::INFINITY, 1.0, &[0.0], 1e-12, 100);
        assert!((w[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exact() {
        // Kronrod 21 integrates degree-31 polynomials exactly
        let e = integrate(|x| x.powi(30), -1.0, 1.0, Tol::default());
        assert!((e.value - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_and_peaked() {
        let e = integrate(|x| x.sin(), 0.0, PI, Tol::default());
        assert!((e.value - 2.0).abs() < 1e-12);
        let e = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, Tol::new(0.0, 1e-10));
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((e.value / exact - 1.0).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn semi_infinite_tails() {
        let e = integrate_semi_inf(|u| (-u).exp(), 0.0, 1.0, Tol::default());
        assert!((e.value - 1.0).abs() < 1e-11);
        // slow algebraic tail
        let e = integrate_semi_inf(|u| u.powf(-1.5), 1.0, 1.0, Tol::default());
        assert!((e.value - 2.0).abs() < 1e-10, "{}", e.value);
        let e = integrate_semi_inf(|u| 1.0 / (1.0 + u * u), 0.0, 1.0, Tol::default());
        assert!((e.value - PI / 2.0).abs() < 1e-11);
    }

    #[test]
    fn vector_components_converge_independently() {
        let (v, _) = integrate_vec(
            |x, o: &mut [f64]| {
                o[0] = x.exp();
                o[1] = 1e-6 * (50.0 * x).cos();
            },
            2,
            0.0,
            1.0,
            &[0.0],
            1e-11,
            1000,
        );
        assert!((v[0] - (1f64.exp() - 1.0)).abs() < 1e-12);
        assert!((v[1] - 1e-6 * (50f64).sin() / 50.0).abs() < 1e-17);
    }
}
