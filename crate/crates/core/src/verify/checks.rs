//! Individual oracle checks. Each returns a [`CheckReport`]; none panics on a
//! failed identity.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_integer::Integer;

use super::enumerate::enumerate_compositions;
use super::jacobian::{fd_log_det_log_ratio_inverse, fd_log_det_ratio_inverse};
use super::quadrature::adaptive_simpson;
use super::stats::{chi_square_gof, chi_square_test, contingency_test, ks_from_sorted_cdf, ks_test};
use super::{CheckReport, Comparison};
use crate::dist::{
    alr_dirichlet_log_pdf, beta_binomial_log_pmf, dirichlet_log_pdf, dirichlet_multinomial_log_pmf,
    dirichlet_sample, inverted_dirichlet_log_pdf, multinomial_log_pmf, nb_truncation_bound,
    negative_binomial_log_pmf, negative_binomial_sample_via_mixture, normalized_nb_log_pmf,
    normalized_nb_value_pmf, poisson_gamma_counts_sample, poisson_log_pmf, poisson_sample,
    BetaBinomialParams, CountVector, DirichletParams, GammaMixtureParams, NB_TAIL_TOLERANCE,
};
use crate::dist::gamma_sample;
use crate::numeric::ln_sum_exp;
use crate::rng::RngStream;
use crate::simplex::{
    log_det_jacobian_log_ratio_inverse, log_det_jacobian_ratio_inverse, log_ratio_forward,
    log_ratio_inverse, ratio_forward, ratio_inverse, Composition, LogRatioVector, RatioVector,
};

/// Significance level for every statistical check.
pub const SIGNIFICANCE: f64 = 1e-3;
/// Change-of-variables identities and round trips.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Closed-form vs finite-difference Jacobian determinants.
pub const JACOBIAN_TOLERANCE: f64 = 1e-6;
/// Exact-enumeration normalization and marginalization.
pub const ENUMERATION_TOLERANCE: f64 = 1e-10;
/// Truncated infinite sums over the normalized Negative Binomial pairs.
pub const PAIR_MASS_TOLERANCE: f64 = 1e-9;
/// Standard errors allowed per Monte-Carlo cell.
pub const MC_SIGMAS: f64 = 4.0;
/// Attempts allowed when conditioning Poisson draws on their total.
pub const MAX_CONDITIONING_ATTEMPTS: u64 = 10_000_000;

/// Which simplex chart a transform check exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Ratio,
    LogRatio,
}

impl Chart {
    fn label(self) -> &'static str {
        match self {
            Chart::Ratio => "ratio",
            Chart::LogRatio => "alr",
        }
    }
}

/// Relative error between two positive quantities given by their logs.
pub fn log_rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let e = (a - b).exp_m1().abs();
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

fn log_uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.uniform()).exp()
}

fn random_shapes(rng: &mut RngStream, n: usize) -> Vec<f64> {
    (0..n).map(|_| log_uniform(rng, 0.1, 10.0)).collect()
}

fn random_composition(rng: &mut RngStream, n: usize) -> Composition {
    let w: Vec<f64> = (0..n).map(|_| -rng.uniform_open().ln()).collect();
    Composition::from_weights(w).expect("positive exponential weights")
}

/// Analytic push-forward density vs pulled-back Dirichlet density plus the
/// closed-form log-Jacobian, at `points` random `(alpha, y)` per dimension.
pub fn check_transform_density_pointwise(
    chart: Chart,
    dims: RangeInclusive<usize>,
    points: usize,
    rng: &mut RngStream,
) -> CheckReport {
    let mut worst = 0.0f64;
    let mut evaluated = 0u64;
    for n in dims {
        for _ in 0..points {
            let alpha = DirichletParams::new(
                (0..n).map(|_| log_uniform(rng, 0.2, 10.0)).collect(),
            )
            .expect("positive shapes");
            let coords: Vec<f64> = (0..n - 1).map(|_| 8.0 * rng.uniform() - 4.0).collect();
            let err = match chart {
                Chart::Ratio => {
                    let y = RatioVector::new(coords.iter().map(|v| v.exp()).collect())
                        .expect("positive ratios");
                    let direct = inverted_dirichlet_log_pdf(&alpha, &y);
                    let pulled = ratio_inverse(&y)
                        .and_then(|x| dirichlet_log_pdf(&alpha, &x))
                        .map(|v| v + log_det_jacobian_ratio_inverse(&y));
                    pair_err(direct, pulled)
                }
                Chart::LogRatio => {
                    let y = LogRatioVector::new(coords).expect("finite coordinates");
                    let direct = alr_dirichlet_log_pdf(&alpha, &y);
                    let pulled = log_ratio_inverse(&y)
                        .and_then(|x| dirichlet_log_pdf(&alpha, &x))
                        .map(|v| v + log_det_jacobian_log_ratio_inverse(&y));
                    pair_err(direct, pulled)
                }
            };
            worst = worst.max(err);
            evaluated += 1;
        }
    }
    CheckReport::new(
        format!("{}_change_of_variables", chart.label()),
        worst,
        IDENTITY_TOLERANCE,
        Comparison::AtMost,
        evaluated,
    )
}

fn pair_err(a: crate::Result<f64>, b: crate::Result<f64>) -> f64 {
    match (a, b) {
        (Ok(a), Ok(b)) => log_rel_err(a, b),
        _ => f64::INFINITY,
    }
}

/// Closed-form log-Jacobians against central-difference determinants.
pub fn check_jacobian_finite_difference(
    chart: Chart,
    dims: RangeInclusive<usize>,
    points: usize,
    rng: &mut RngStream,
) -> CheckReport {
    let mut worst = 0.0f64;
    let mut evaluated = 0u64;
    for n in dims {
        for _ in 0..points {
            let coords: Vec<f64> = (0..n - 1).map(|_| 6.0 * rng.uniform() - 3.0).collect();
            let err = match chart {
                Chart::Ratio => {
                    let y = RatioVector::new(coords.iter().map(|v| v.exp()).collect())
                        .expect("positive ratios");
                    pair_err(Ok(log_det_jacobian_ratio_inverse(&y)), fd_log_det_ratio_inverse(&y))
                }
                Chart::LogRatio => {
                    let y = LogRatioVector::new(coords).expect("finite coordinates");
                    pair_err(
                        Ok(log_det_jacobian_log_ratio_inverse(&y)),
                        fd_log_det_log_ratio_inverse(&y),
                    )
                }
            };
            worst = worst.max(err);
            evaluated += 1;
        }
    }
    CheckReport::new(
        format!("{}_jacobian_finite_difference", chart.label()),
        worst,
        JACOBIAN_TOLERANCE,
        Comparison::AtMost,
        evaluated,
    )
}

/// Both inverse-after-forward round trips on random compositions;
/// componentwise relative error.
pub fn check_round_trips(
    dims: RangeInclusive<usize>,
    points: usize,
    rng: &mut RngStream,
) -> CheckReport {
    let mut worst = 0.0f64;
    let mut evaluated = 0u64;
    for n in dims {
        for _ in 0..points {
            let x = random_composition(rng, n);
            for back in [
                ratio_inverse(&ratio_forward(&x)),
                log_ratio_inverse(&log_ratio_forward(&x)),
            ] {
                let err = match back {
                    Ok(b) => b
                        .as_slice()
                        .iter()
                        .zip(x.as_slice())
                        .map(|(u, v)| ((u - v) / v).abs())
                        .fold(0.0, f64::max),
                    Err(_) => f64::INFINITY,
                };
                worst = worst.max(err);
            }
            evaluated += 1;
        }
    }
    CheckReport::new("transform_round_trips", worst, IDENTITY_TOLERANCE, Comparison::AtMost, evaluated)
}

/// KS test of transformed `Dir(alpha)` draws (`n = 2`) against the CDF of the
/// analytic push-forward density, obtained by adaptive Simpson on `(0, 1)`.
pub fn check_transform_density_ks(
    alpha: [f64; 2],
    chart: Chart,
    trials: u64,
    rng: &mut RngStream,
) -> CheckReport {
    let params = DirichletParams::new(alpha.to_vec()).expect("positive shapes");
    // Every draw is mapped to t = x1 / (x1 + x2) in (0, 1); the density of t
    // is the analytic density of y times |dy/dt|.
    let mut ts: Vec<f64> = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let x = match dirichlet_sample(&params, rng) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let t = match chart {
            Chart::Ratio => {
                let y = ratio_forward(&x).entries()[0];
                y / (1.0 + y)
            }
            Chart::LogRatio => {
                let y = log_ratio_forward(&x).entries()[0];
                1.0 / (1.0 + (-y).exp())
            }
        };
        ts.push(t);
    }
    ts.sort_by(f64::total_cmp);
    let density = |t: f64| -> f64 {
        let t = t.clamp(1e-300, 1.0 - 1e-16);
        let log_density = match chart {
            Chart::Ratio => {
                let y = t / (1.0 - t);
                RatioVector::new(vec![y])
                    .and_then(|r| inverted_dirichlet_log_pdf(&params, &r))
                    .map(|v| v - 2.0 * (1.0 - t).ln())
            }
            Chart::LogRatio => {
                let y = t.ln() - (-t).ln_1p();
                LogRatioVector::new(vec![y])
                    .and_then(|l| alr_dirichlet_log_pdf(&params, &l))
                    .map(|v| v - t.ln() - (-t).ln_1p())
            }
        };
        log_density.map_or(0.0, f64::exp)
    };
    let mut cdf = Vec::with_capacity(ts.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &t in &ts {
        acc += adaptive_simpson(density, prev, t, 1e-10);
        prev = t;
        cdf.push(acc);
    }
    let ks = ks_from_sorted_cdf(&cdf);
    CheckReport::new(
        format!("{}_transform_ks", chart.label()),
        ks.p_value,
        SIGNIFICANCE,
        Comparison::Above,
        ks.n as u64,
    )
}

/// Multinomial masses over every lattice point sum to one, for random
/// probability vectors, `n` in `2..=max_n`, `m <= max_m`.
pub fn check_multinomial_normalization(
    max_n: usize,
    max_m: u64,
    draws: usize,
    rng: &mut RngStream,
) -> CheckReport {
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for _ in 0..draws {
        for n in 2..=max_n {
            let probs = random_composition(rng, n);
            for m in 0..=max_m {
                let logs: Vec<f64> = enumerate_compositions(n, m)
                    .map(|x| multinomial_log_pmf(m, &probs, &x).unwrap_or(f64::NAN))
                    .collect();
                worst = worst.max(log_rel_err(ln_sum_exp(logs.iter().copied()), 0.0));
                evaluated += logs.len() as u64;
            }
        }
    }
    CheckReport::new(
        "multinomial_normalization",
        worst,
        ENUMERATION_TOLERANCE,
        Comparison::AtMost,
        evaluated,
    )
}

/// Dirichlet-Multinomial masses sum to one over every lattice point.
pub fn check_dm_normalization(
    max_n: usize,
    max_m: u64,
    draws: usize,
    rng: &mut RngStream,
) -> CheckReport {
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for _ in 0..draws {
        for n in 2..=max_n {
            let shapes = DirichletParams::new(random_shapes(rng, n)).expect("positive shapes");
            for m in 0..=max_m {
                let logs: Vec<f64> = enumerate_compositions(n, m)
                    .map(|x| dirichlet_multinomial_log_pmf(&shapes, m, &x).unwrap_or(f64::NAN))
                    .collect();
                worst = worst.max(log_rel_err(ln_sum_exp(logs.iter().copied()), 0.0));
                evaluated += logs.len() as u64;
            }
        }
    }
    CheckReport::new(
        "dirichlet_multinomial_normalization",
        worst,
        ENUMERATION_TOLERANCE,
        Comparison::AtMost,
        evaluated,
    )
}

/// For every category `i` and every `k`, the Dirichlet-Multinomial mass summed
/// over `{x : x_i = k}` equals `BetaBinomial(k; m, r_i, R - r_i)`.
pub fn check_beta_binomial_merge(r: &[f64], m: u64) -> CheckReport {
    let name = format!("beta_binomial_merge{r:?}_m{m}");
    let shapes = match DirichletParams::new(r.to_vec()) {
        Ok(s) => s,
        Err(_) => return CheckReport::new(name, f64::INFINITY, ENUMERATION_TOLERANCE, Comparison::AtMost, 0),
    };
    let n = r.len();
    let total: f64 = r.iter().sum();
    let points: Vec<(CountVector, f64)> = enumerate_compositions(n, m)
        .map(|x| {
            let v = dirichlet_multinomial_log_pmf(&shapes, m, &x).unwrap_or(f64::NAN);
            (x, v)
        })
        .collect();
    let mut worst = 0.0f64;
    for (i, &ri) in r.iter().enumerate() {
        let bb = BetaBinomialParams::new(ri, total - ri, m).expect("positive split");
        for k in 0..=m {
            let merged = ln_sum_exp(
                points
                    .iter()
                    .filter(|(x, _)| x.counts()[i] == k)
                    .map(|&(_, v)| v)
                    .collect::<Vec<_>>()
                    .into_iter(),
            );
            let direct = beta_binomial_log_pmf(&bb, k).unwrap_or(f64::NAN);
            worst = worst.max(log_rel_err(merged, direct));
        }
    }
    CheckReport::new(name, worst, ENUMERATION_TOLERANCE, Comparison::AtMost, points.len() as u64)
}

/// Chi-square of Poisson-Gamma mixture draws against `NB(R, theta/(1+theta))`.
pub fn check_nb_mixture(total_shape: f64, theta: f64, trials: u64, rng: &mut RngStream) -> CheckReport {
    let p = theta / (1.0 + theta);
    let draws: Vec<u64> = (0..trials)
        .map(|_| negative_binomial_sample_via_mixture(total_shape, theta, rng).unwrap_or(u64::MAX))
        .collect();
    let test = chi_square_gof(&draws, |m| {
        negative_binomial_log_pmf(total_shape, p, m).map_or(0.0, f64::exp)
    });
    CheckReport::new(
        format!("nb_mixture_R{total_shape}_theta{theta}"),
        test.p_value,
        SIGNIFICANCE,
        Comparison::Above,
        trials,
    )
}

/// Independent Poissons kept only when their total is exactly `m`; the kept
/// vectors are compared with `Multinomial(m, lambda / sum lambda)`.
///
/// Draws until `trials` vectors are accepted or the attempt cap is hit.
/// Fewer than ten accepted draws per cell is reported as inconclusive.
pub fn check_conditional_multinomial(
    lambda: &[f64],
    m: u64,
    trials: u64,
    rng: &mut RngStream,
) -> CheckReport {
    let name = format!("conditional_multinomial{lambda:?}_m{m}");
    let probs = match Composition::from_weights(lambda.to_vec()) {
        Ok(p) => p,
        Err(_) => return CheckReport::new(name, 0.0, SIGNIFICANCE, Comparison::Above, 0),
    };
    let cells: Vec<CountVector> = enumerate_compositions(lambda.len(), m).collect();
    let index: HashMap<&[u64], usize> = cells.iter().enumerate().map(|(i, c)| (c.counts(), i)).collect();
    let mut observed = vec![0u64; cells.len()];
    let mut accepted = 0u64;
    let mut attempts = 0u64;
    let mut draw = vec![0u64; lambda.len()];
    while accepted < trials && attempts < MAX_CONDITIONING_ATTEMPTS {
        attempts += 1;
        for (d, &l) in draw.iter_mut().zip(lambda) {
            *d = poisson_sample(l, rng).unwrap_or(u64::MAX);
        }
        if draw.iter().sum::<u64>() == m {
            observed[index[draw.as_slice()]] += 1;
            accepted += 1;
        }
    }
    let expected: Vec<f64> = cells
        .iter()
        .map(|x| multinomial_log_pmf(m, &probs, x).map_or(0.0, f64::exp))
        .collect();
    let test = chi_square_test(&observed, &expected);
    let report = CheckReport::new(name, test.p_value, SIGNIFICANCE, Comparison::Above, accepted);
    if accepted < 10 * cells.len() as u64 {
        report.inconclusive()
    } else {
        report
    }
}

fn pi_and_totals(params: &GammaMixtureParams, trials: u64, rng: &mut RngStream) -> (Vec<f64>, Vec<u64>) {
    let mut pis = Vec::with_capacity(trials as usize);
    let mut totals = Vec::with_capacity(trials as usize);
    for _ in 0..trials {
        let draw = poisson_gamma_counts_sample(params, rng);
        let sum: f64 = draw.intensities.iter().sum();
        pis.push(draw.intensities[0] / sum);
        totals.push(draw.counts.total());
    }
    (pis, totals)
}

fn decile_by_total_table(pis: &[f64], totals: &[u64]) -> Vec<Vec<u64>> {
    let mut sorted = pis.to_vec();
    sorted.sort_by(f64::total_cmp);
    let edges: Vec<f64> = (1..10).map(|j| sorted[j * sorted.len() / 10]).collect();
    let mut table = vec![vec![0u64; 4]; 10];
    for (&pi, &s) in pis.iter().zip(totals) {
        let row = edges.iter().filter(|&&e| pi >= e).count();
        table[row][s.min(3) as usize] += 1;
    }
    table
}

/// Chi-square independence test of `pi_1 = lambda_1 / sum lambda` (deciles)
/// against the total count `S` (bins 0, 1, 2, >=3), for two components.
pub fn check_pi_independent_of_s(params: &GammaMixtureParams, trials: u64, rng: &mut RngStream) -> CheckReport {
    let (pis, totals) = pi_and_totals(params, trials, rng);
    let test = contingency_test(&decile_by_total_table(&pis, &totals));
    CheckReport::new(
        format!("pi_independent_of_total{:?}_theta{}", params.shapes(), params.scale()),
        test.p_value,
        SIGNIFICANCE,
        Comparison::Above,
        trials,
    )
}

/// Negative control: replaces `S` with `floor(4 pi_1)`, a deterministic
/// function of `pi_1`. Passes only if the independence test rejects.
pub fn check_pi_dependence_control(params: &GammaMixtureParams, trials: u64, rng: &mut RngStream) -> CheckReport {
    let (pis, _) = pi_and_totals(params, trials, rng);
    let fake: Vec<u64> = pis.iter().map(|&p| (4.0 * p).floor() as u64).collect();
    let test = contingency_test(&decile_by_total_table(&pis, &fake));
    CheckReport::new(
        "pi_dependence_negative_control",
        test.p_value,
        SIGNIFICANCE,
        Comparison::Below,
        trials,
    )
}

/// Monte-Carlo evaluation of the Multinomial x Dirichlet integral at every
/// lattice point; the largest per-cell z-score against the closed-form
/// Dirichlet-Multinomial mass must stay within [`MC_SIGMAS`].
pub fn check_dm_integral(shapes: &[f64], m: u64, trials: u64, rng: &mut RngStream) -> CheckReport {
    let name = format!("dm_integral{shapes:?}_m{m}");
    let params = match DirichletParams::new(shapes.to_vec()) {
        Ok(p) => p,
        Err(_) => return CheckReport::new(name, f64::INFINITY, MC_SIGMAS, Comparison::AtMost, 0),
    };
    let cells: Vec<CountVector> = enumerate_compositions(shapes.len(), m).collect();
    let mut sum = vec![0.0f64; cells.len()];
    let mut sum_sq = vec![0.0f64; cells.len()];
    let mut used = 0u64;
    for _ in 0..trials {
        let Ok(pi) = dirichlet_sample(&params, rng) else { continue };
        used += 1;
        for (i, x) in cells.iter().enumerate() {
            let v = multinomial_log_pmf(m, &pi, x).map_or(0.0, f64::exp);
            sum[i] += v;
            sum_sq[i] += v * v;
        }
    }
    let nf = used as f64;
    let mut worst = 0.0f64;
    let mut mass = 0.0;
    for (i, x) in cells.iter().enumerate() {
        let mean = sum[i] / nf;
        mass += mean;
        let var = (sum_sq[i] / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
        let se = (var / nf).sqrt();
        let exact = dirichlet_multinomial_log_pmf(&params, m, x).map_or(f64::NAN, f64::exp);
        let diff = (mean - exact).abs();
        let z = if se > 0.0 { diff / se } else if diff <= 1e-12 { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
    }
    // Each draw contributes a full multinomial, so the MC mass is one up to
    // rounding.
    if (mass - 1.0).abs() > 1e-9 {
        worst = f64::INFINITY;
    }
    CheckReport::new(name, worst, MC_SIGMAS, Comparison::AtMost, used)
}

/// Total mass of the `(k, m)` pair law up to the Negative Binomial truncation
/// bound.
pub fn check_normalized_nb_mass(params: &GammaMixtureParams, component: usize) -> CheckReport {
    let name = format!(
        "normalized_nb_mass{:?}_theta{}_c{component}",
        params.shapes(),
        params.scale()
    );
    let bound = match nb_truncation_bound(params.total_shape(), params.success_prob(), NB_TAIL_TOLERANCE) {
        Ok(b) => b,
        Err(_) => return CheckReport::new(name, f64::INFINITY, PAIR_MASS_TOLERANCE, Comparison::AtMost, 0),
    };
    let mut total = 0.0;
    for m in 0..=bound {
        for k in 0..=m {
            total += normalized_nb_log_pmf(params, component, k, m).map_or(f64::NAN, f64::exp);
        }
    }
    CheckReport::new(name, (total - 1.0).abs(), PAIR_MASS_TOLERANCE, Comparison::AtMost, bound)
}

/// Value-aggregated masses over all reduced fractions with denominator up to
/// `max_den`: they must equal the direct pair enumeration over the same
/// pairs, and with the `m = 0` atom cover at least `Pr(S <= max_den)`.
pub fn check_normalized_nb_values(params: &GammaMixtureParams, component: usize, max_den: u64) -> CheckReport {
    let name = format!("normalized_nb_value_aggregation_den{max_den}");
    let fail = || CheckReport::new(name.clone(), f64::INFINITY, ENUMERATION_TOLERANCE, Comparison::AtMost, 0);
    let (r_total, p) = (params.total_shape(), params.success_prob());
    let Ok(bound) = nb_truncation_bound(r_total, p, NB_TAIL_TOLERANCE) else { return fail() };
    let mut by_value = 0.0;
    for den in 1..=max_den {
        for num in 0..=den {
            if num.gcd(&den) != 1 {
                continue;
            }
            match normalized_nb_value_pmf(params, component, num, den, Some(bound)) {
                Ok(v) => by_value += v.log_mass.exp(),
                Err(_) => return fail(),
            }
        }
    }
    let mut by_pair = 0.0;
    for m in 1..=bound {
        for k in 0..=m {
            if m / k.gcd(&m) <= max_den {
                by_pair += normalized_nb_log_pmf(params, component, k, m).map_or(f64::NAN, f64::exp);
            }
        }
    }
    let atom = normalized_nb_log_pmf(params, component, 0, 0).map_or(f64::NAN, f64::exp);
    let covered: f64 = (0..=max_den)
        .map(|m| negative_binomial_log_pmf(r_total, p, m).map_or(f64::NAN, f64::exp))
        .sum();
    let shortfall = (covered - (by_value + atom) - 1e-15).max(0.0);
    let stat = ((by_value - by_pair) / by_pair).abs().max(shortfall);
    CheckReport::new(name, stat, ENUMERATION_TOLERANCE, Comparison::AtMost, bound)
}

/// `sum_{m <= upto} NB(m; R, p)` against one.
pub fn check_nb_truncated_sum(total_shape: f64, p: f64, upto: u64) -> CheckReport {
    let total: f64 = (0..=upto)
        .map(|m| negative_binomial_log_pmf(total_shape, p, m).map_or(f64::NAN, f64::exp))
        .sum();
    CheckReport::new(
        format!("nb_truncated_sum_R{total_shape}_p{p}"),
        (total - 1.0).abs(),
        ENUMERATION_TOLERANCE,
        Comparison::AtMost,
        upto,
    )
}

/// `Gamma(1, theta)` draws against the Exponential CDF.
pub fn check_gamma_exponential(theta: f64, trials: u64, rng: &mut RngStream) -> CheckReport {
    let draws: Vec<f64> = (0..trials)
        .map(|_| gamma_sample(1.0, theta, rng).unwrap_or(f64::NAN))
        .collect();
    let ks = ks_test(draws, |x| -(-x / theta).exp_m1());
    CheckReport::new("gamma_unit_shape_exponential", ks.p_value, SIGNIFICANCE, Comparison::Above, trials)
}

/// `Gamma(r1, theta) + Gamma(r2, theta)` against `Gamma(r1 + r2, theta)` with
/// `r1 + r2 = 2`, whose CDF is `1 - e^-u (1 + u)`.
pub fn check_gamma_common_scale(r1: f64, theta: f64, trials: u64, rng: &mut RngStream) -> CheckReport {
    let r2 = 2.0 - r1;
    let draws: Vec<f64> = (0..trials)
        .map(|_| {
            gamma_sample(r1, theta, rng).unwrap_or(f64::NAN) + gamma_sample(r2, theta, rng).unwrap_or(f64::NAN)
        })
        .collect();
    let ks = ks_test(draws, |x| {
        let u = x / theta;
        -(-u).exp_m1() - u * (-u).exp()
    });
    CheckReport::new("gamma_common_scale_sum", ks.p_value, SIGNIFICANCE, Comparison::Above, trials)
}

/// `Poisson(a) + Poisson(b)` against `Poisson(a + b)`.
pub fn check_poisson_superposition(a: f64, b: f64, trials: u64, rng: &mut RngStream) -> CheckReport {
    let draws: Vec<u64> = (0..trials)
        .map(|_| {
            poisson_sample(a, rng).unwrap_or(u64::MAX / 2) + poisson_sample(b, rng).unwrap_or(u64::MAX / 2)
        })
        .collect();
    let test = chi_square_gof(&draws, |k| poisson_log_pmf(a + b, k).map_or(0.0, f64::exp));
    CheckReport::new("poisson_superposition", test.p_value, SIGNIFICANCE, Comparison::Above, trials)
}

/// Chi-square of the total count from the full Gamma -> Poisson hierarchy
/// against `NB(R, p)`.
pub fn check_hierarchy_total(params: &GammaMixtureParams, trials: u64, rng: &mut RngStream) -> CheckReport {
    let totals: Vec<u64> = (0..trials)
        .map(|_| poisson_gamma_counts_sample(params, rng).counts.total())
        .collect();
    let (r, p) = (params.total_shape(), params.success_prob());
    let test = chi_square_gof(&totals, |m| negative_binomial_log_pmf(r, p, m).map_or(0.0, f64::exp));
    CheckReport::new("hierarchy_total_is_nb", test.p_value, SIGNIFICANCE, Comparison::Above, trials)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixture(shapes: &[f64], theta: f64) -> GammaMixtureParams {
        GammaMixtureParams::new(shapes.to_vec(), theta).unwrap()
    }

    #[test]
    fn conditional_multinomial_small_cases() {
        let mut rng = RngStream::new(101);
        let r = check_conditional_multinomial(&[1.0, 1.0], 2, 20_000, &mut rng);
        assert!(r.passed, "{r:?}");
        let r = check_conditional_multinomial(&[2.0, 1.0, 1.0], 3, 20_000, &mut rng);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn conditional_multinomial_scale_invariant_target() {
        // lambda and c * lambda give the same multinomial probabilities.
        let a = Composition::from_weights(vec![2.0, 1.0, 1.0]).unwrap();
        let b = Composition::from_weights(vec![6.0, 3.0, 3.0]).unwrap();
        for x in enumerate_compositions(3, 3) {
            assert_eq!(
                multinomial_log_pmf(3, &a, &x).unwrap(),
                multinomial_log_pmf(3, &b, &x).unwrap()
            );
        }
    }

    #[test]
    fn conditional_multinomial_inconclusive_when_starved() {
        let mut rng = RngStream::new(102);
        // A huge total is essentially never hit within 50 accepted targets.
        let r = check_conditional_multinomial(&[0.1, 0.1], 40, 50, &mut rng);
        assert_eq!(r.outcome, super::super::Outcome::Inconclusive);
        assert!(!r.passed);
    }

    #[test]
    fn pi_independence_and_control() {
        let mut rng = RngStream::new(103);
        let p = mixture(&[1.0, 1.0], 1.0);
        assert!(check_pi_independent_of_s(&p, 20_000, &mut rng).passed);
        let control = check_pi_dependence_control(&p, 20_000, &mut rng);
        assert!(control.passed, "{control:?}");
        assert!(control.statistic < 1e-100);
    }

    #[test]
    fn beta_binomial_merge_cases() {
        for (r, m) in [(vec![1.0, 1.0, 1.0], 4), (vec![2.0, 1.5, 1.5], 7), (vec![0.4, 2.2], 9)] {
            let rep = check_beta_binomial_merge(&r, m);
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn dm_integral_cases() {
        let mut rng = RngStream::new(104);
        for (r, m) in [(vec![1.0, 1.0, 1.0], 2), (vec![2.0, 1.0], 5)] {
            let rep = check_dm_integral(&r, m, 20_000, &mut rng);
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn normalized_nb_checks() {
        let p = mixture(&[1.0, 1.0], 1.0);
        let rep = check_normalized_nb_mass(&p, 0);
        assert!(rep.passed, "{rep:?}");
        let rep = check_normalized_nb_values(&p, 0, 50);
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn transform_ks_detects_wrong_parameters() {
        // Samples from Dir(1, 1) but reference density from Dir(2, 3) would
        // fail; here both agree and the test passes.
        let mut rng = RngStream::new(105);
        let rep = check_transform_density_ks([1.0, 1.0], Chart::Ratio, 20_000, &mut rng);
        assert!(rep.passed, "{rep:?}");
        let rep = check_transform_density_ks([2.0, 3.0], Chart::LogRatio, 20_000, &mut rng);
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn log_rel_err_basics() {
        assert_eq!(log_rel_err(0.5, 0.5), 0.0);
        assert!((log_rel_err(1e-3, 0.0) - 1e-3).abs() < 1e-6);
        assert_eq!(log_rel_err(f64::NAN, 0.0), f64::INFINITY);
    }
}
