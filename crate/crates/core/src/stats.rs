//! Goodness-of-fit statistics used by the oracle checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided Kolmogorov-Smirnov distance between a sample and a cdf.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x: Vec<f64> = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Pearson's χ² for counts against expected counts; returns the statistic
/// and its upper-tail p-value. Cells with expected count below 5 are pooled
/// into their neighbour.
pub fn chi_square(observed: &[f64], expected: &[f64], ddof: usize) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        o_acc += o;
        e_acc += e;
        if e_acc >= 5.0 {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => cells.push((o_acc, e_acc)),
        }
    }
    let stat: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let df = cells.len().saturating_sub(1 + ddof).max(1) as f64;
    let p = 1.0 - ChiSquared::new(df).expect("positive dof").cdf(stat);
    (stat, p)
}

/// χ² test that pairs of probability-integral transforms are independent
/// uniforms, on a `bins × bins` grid.
pub fn chi_square_uniform_2d(pairs: &[(f64, f64)], bins: usize) -> (f64, f64) {
    let mut counts = vec![0.0; bins * bins];
    for &(u, v) in pairs {
        let i = ((u * bins as f64) as usize).min(bins - 1);
        let j = ((v * bins as f64) as usize).min(bins - 1);
        counts[i * bins + j] += 1.0;
    }
    let e = pairs.len() as f64 / (bins * bins) as f64;
    chi_square(&counts, &vec![e; bins * bins], 0)
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (v / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_grid_is_half_step() {
        let n = 1000;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((ks_statistic(&x, |v| v) - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn chi_square_matches_hand_value() {
        // (10-15)²/15 + (20-15)²/15 = 10/3 on one dof
        let (s, p) = chi_square(&[10.0, 20.0], &[15.0, 15.0], 0);
        assert!((s - 10.0 / 3.0).abs() < 1e-12);
        assert!((p - 0.067889).abs() < 1e-5);
    }

    #[test]
    fn mean_and_stderr() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }
}
