//! Goodness-of-fit and independence tests used by the oracle checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Cells with expected count below this are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Cells after pooling.
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

fn pearson(cells: &[(f64, f64)]) -> ChiSquareResult {
    let statistic: f64 = cells
        .iter()
        .map(|&(obs, exp)| (obs - exp).powi(2) / exp)
        .sum();
    let df = cells.len().saturating_sub(1);
    ChiSquareResult {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
        cells: cells.len(),
    }
}

/// Pearson test of `observed` against cell probabilities `probs`.
///
/// Cells whose expected count is below [`MIN_EXPECTED`] are pooled into one
/// tail cell; if that cell is itself too small it absorbs the smallest
/// remaining cell.
pub fn chi_square_test(observed: &[u64], probs: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), probs.len(), "one probability per cell");
    let n: u64 = observed.iter().sum();
    let mut large: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (0.0, 0.0);
    let mut any_pooled = false;
    for (&obs, &p) in observed.iter().zip(probs) {
        let exp = p * n as f64;
        if exp < MIN_EXPECTED {
            pooled.0 += obs as f64;
            pooled.1 += exp;
            any_pooled = true;
        } else {
            large.push((obs as f64, exp));
        }
    }
    if any_pooled {
        if pooled.1 < MIN_EXPECTED && !large.is_empty() {
            let (idx, _) = large
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .expect("non-empty");
            let cell = large.swap_remove(idx);
            pooled.0 += cell.0;
            pooled.1 += cell.1;
        }
        if pooled.1 > 0.0 {
            large.push(pooled);
        }
    }
    pearson(&large)
}

/// Pearson test of integer samples against a mass function on `0, 1, ...`.
///
/// Adjacent support points are merged left to right until each cell expects
/// at least [`MIN_EXPECTED`]; the mass beyond the largest observation forms
/// the last cell.
pub fn chi_square_gof<F: Fn(u64) -> f64>(samples: &[u64], pmf: F) -> ChiSquareResult {
    let n = samples.len() as f64;
    let max = samples.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0u64; max as usize + 1];
    for &s in samples {
        observed[s as usize] += 1;
    }
    let probs: Vec<f64> = (0..=max).map(&pmf).collect();
    let beyond = (1.0 - probs.iter().sum::<f64>()).max(0.0);

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(&probs) {
        acc.0 += obs as f64;
        acc.1 += p * n;
        if acc.1 >= MIN_EXPECTED {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    acc.1 += beyond * n;
    if acc.1 >= MIN_EXPECTED || cells.is_empty() {
        cells.push(acc);
    } else if let Some(last) = cells.last_mut() {
        last.0 += acc.0;
        last.1 += acc.1;
    }
    pearson(&cells)
}

/// Pearson test of independence for a contingency table (rows x columns).
/// Empty rows and columns are dropped.
pub fn contingency_test(table: &[Vec<u64>]) -> ChiSquareResult {
    let cols = table.first().map_or(0, Vec::len);
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let total: f64 = row_sums.iter().sum();
    let mut statistic = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let exp = row_sums[i] * col_sums[j] / total;
            if exp > 0.0 {
                statistic += (obs as f64 - exp).powi(2) / exp;
            }
        }
    }
    let live_rows = row_sums.iter().filter(|&&s| s > 0.0).count();
    let live_cols = col_sums.iter().filter(|&&s| s > 0.0).count();
    let df = live_rows.saturating_sub(1) * live_cols.saturating_sub(1);
    ChiSquareResult {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
        cells: live_rows * live_cols,
    }
}

/// Survival function of the Kolmogorov distribution, `Pr(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form; converges fast for small lambda.
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let mut sum = 0.0;
        let mut j = 1i32;
        loop {
            let term = y.powi(j * j);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            j += 2;
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * sum;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let x = (-2.0 * lambda * lambda).exp();
        let mut sum = 0.0;
        let mut sign = 1.0;
        for j in 1..=100i32 {
            let term = x.powi(j * j);
            sum += sign * term;
            if term < 1e-17 {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// One-sample KS test given the reference CDF at each sorted sample point.
pub fn ks_from_sorted_cdf(cdf_values: &[f64]) -> KsResult {
    let n = cdf_values.len();
    let nf = n as f64;
    let statistic = cdf_values
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let above = (i + 1) as f64 / nf - f;
            let below = f - i as f64 / nf;
            above.max(below)
        })
        .fold(0.0, f64::max);
    let sqrt_n = nf.sqrt();
    // Stephens' finite-sample correction.
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    KsResult {
        statistic,
        p_value: kolmogorov_sf(lambda),
        n,
    }
}

/// One-sample KS test of `samples` against `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(mut samples: Vec<f64>, cdf: F) -> KsResult {
    samples.sort_by(f64::total_cmp);
    let values: Vec<f64> = samples.iter().map(|&x| cdf(x)).collect();
    ks_from_sorted_cdf(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn kolmogorov_known_points() {
        // Classical critical values: Pr(K > 1.3581) = 0.05, Pr(K > 1.9495) = 0.001.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(1.9495) - 0.001).abs() < 1e-5);
        assert!((kolmogorov_sf(0.8276) - 0.5).abs() < 1e-3);
        // The two series agree where they meet.
        assert!((kolmogorov_sf(1.18 - 1e-12) - kolmogorov_sf(1.18)).abs() < 1e-12);
    }

    #[test]
    fn ks_accepts_uniforms_and_rejects_shifted() {
        let mut rng = RngStream::new(1);
        let u: Vec<f64> = (0..10_000).map(|_| rng.uniform()).collect();
        assert!(ks_test(u.clone(), |x| x).p_value > 1e-3);
        let shifted: Vec<f64> = u.iter().map(|x| x * x).collect();
        assert!(ks_test(shifted, |x| x).p_value < 1e-6);
    }

    #[test]
    fn chi_square_matches_hand_computation() {
        // Expected (25, 25, 50), observed (30, 20, 50): stat = 1 + 1 + 0 = 2, df = 2.
        let r = chi_square_test(&[30, 20, 50], &[0.25, 0.25, 0.5]);
        assert!((r.statistic - 2.0).abs() < 1e-12);
        assert_eq!(r.df, 2);
        assert!((r.p_value - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn chi_square_pools_small_cells() {
        let r = chi_square_test(&[50, 47, 2, 1], &[0.5, 0.47, 0.02, 0.01]);
        // The pooled cell expects 3 < 5 and absorbs the 47-cell.
        assert_eq!(r.cells, 2);
    }

    #[test]
    fn gof_rejects_wrong_law() {
        let mut rng = RngStream::new(2);
        let samples: Vec<u64> = (0..20_000).map(|_| (rng.uniform() * 6.0) as u64).collect();
        assert!(chi_square_gof(&samples, |k| if k < 6 { 1.0 / 6.0 } else { 0.0 }).p_value > 1e-3);
        assert!(chi_square_gof(&samples, |k| if k < 5 { 0.2 } else { 0.0 }).p_value < 1e-6);
    }

    #[test]
    fn contingency_detects_dependence() {
        let independent = vec![vec![100, 200], vec![50, 100]];
        assert!(contingency_test(&independent).p_value > 0.99);
        let dependent = vec![vec![200, 10], vec![10, 200]];
        assert!(contingency_test(&dependent).p_value < 1e-10);
    }
}
