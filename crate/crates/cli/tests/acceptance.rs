//! Acceptance criteria: one PASS/FAIL line per criterion with the measured
//! statistic and wall time. Tolerances and time budgets are pinned here
//! rather than read from the library.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use countcomp::dist::GammaMixtureParams;
use countcomp::verify::checks::{
    check_beta_binomial_merge, check_conditional_multinomial, check_dm_normalization,
    check_jacobian_finite_difference, check_nb_mixture, check_normalized_nb_mass,
    check_pi_dependence_control, check_pi_independent_of_s, check_round_trips,
    check_transform_density_pointwise, Chart,
};
use countcomp::verify::CheckReport;
use countcomp::RngStream;

const SEED: u64 = 20_261_019;
const TRIALS: u64 = 100_000;
const P_MIN: f64 = 1e-3;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
}

struct Verdict {
    passed: bool,
    detail: String,
}

fn rng(stream: u64) -> RngStream {
    RngStream::new(SEED).substream(stream)
}

fn at_most(reports: &[CheckReport], tol: f64) -> Verdict {
    let worst = reports.iter().map(|r| r.statistic).fold(0.0, f64::max);
    Verdict {
        passed: reports.iter().all(|r| r.statistic <= tol) && !reports.is_empty(),
        detail: format!("max error {worst:.3e} <= {tol:e}"),
    }
}

fn p_above(reports: &[CheckReport]) -> Verdict {
    let min_p = reports.iter().map(|r| r.statistic).fold(1.0, f64::min);
    Verdict {
        passed: reports.iter().all(|r| r.statistic > P_MIN && r.sample_size >= TRIALS),
        detail: format!("min p-value {min_p:.4} > {P_MIN}, {} tests", reports.len()),
    }
}

fn mixture(shapes: &[f64], theta: f64) -> GammaMixtureParams {
    GammaMixtureParams::new(shapes.to_vec(), theta).expect("fixed parameters")
}

fn criterion_1() -> Verdict {
    at_most(&[check_transform_density_pointwise(Chart::Ratio, 2..=6, 1000, &mut rng(1))], 1e-12)
}

fn criterion_2() -> Verdict {
    at_most(&[check_transform_density_pointwise(Chart::LogRatio, 2..=6, 1000, &mut rng(2))], 1e-12)
}

fn criterion_3() -> Verdict {
    at_most(
        &[
            check_jacobian_finite_difference(Chart::Ratio, 2..=6, 100, &mut rng(3)),
            check_jacobian_finite_difference(Chart::LogRatio, 2..=6, 100, &mut rng(4)),
        ],
        1e-6,
    )
}

fn criterion_4() -> Verdict {
    at_most(&[check_dm_normalization(4, 12, 20, &mut rng(5))], 1e-10)
}

fn criterion_5() -> Verdict {
    let shapes: [&[f64]; 6] = [
        &[0.4, 2.2],
        &[1.0, 1.0, 1.0],
        &[2.0, 1.5, 1.5],
        &[0.3, 1.0, 2.5, 4.0],
        &[1.7, 0.6, 0.9, 3.1, 0.2],
        &[5.0, 5.0, 0.1, 0.1, 1.0],
    ];
    let reports: Vec<CheckReport> = shapes
        .iter()
        .flat_map(|r| (0..=12).map(move |m| check_beta_binomial_merge(r, m)))
        .collect();
    at_most(&reports, 1e-10)
}

fn criterion_6() -> Verdict {
    let settings = [(2.0, 1.0), (0.5, 3.0), (5.0, 0.2), (1.3, 0.7), (10.0, 2.0)];
    let reports: Vec<CheckReport> = settings
        .iter()
        .enumerate()
        .map(|(i, &(r, theta))| check_nb_mixture(r, theta, TRIALS, &mut rng(10 + i as u64)))
        .collect();
    p_above(&reports)
}

fn criterion_7() -> Verdict {
    p_above(&[
        check_conditional_multinomial(&[1.0, 1.0], 2, TRIALS, &mut rng(20)),
        check_conditional_multinomial(&[2.0, 1.0, 1.0], 3, TRIALS, &mut rng(21)),
    ])
}

fn criterion_8() -> Verdict {
    let independent = check_pi_independent_of_s(&mixture(&[1.0, 1.0], 1.0), TRIALS, &mut rng(30));
    let control = check_pi_dependence_control(&mixture(&[1.0, 1.0], 1.0), TRIALS, &mut rng(31));
    Verdict {
        passed: independent.statistic > P_MIN && control.statistic < P_MIN,
        detail: format!(
            "independence p {:.4} > {P_MIN}; negative control p {:.3e} < {P_MIN}",
            independent.statistic, control.statistic
        ),
    }
}

fn criterion_9() -> Verdict {
    at_most(
        &[
            check_normalized_nb_mass(&mixture(&[1.0, 1.0], 1.0), 0),
            check_normalized_nb_mass(&mixture(&[2.0, 0.5, 1.5], 3.0), 1),
            check_normalized_nb_mass(&mixture(&[0.7, 4.0], 0.2), 0),
        ],
        1e-9,
    )
}

fn verify_bytes() -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_countcomp"))
        .args(["verify", "--seed", "42", "--level", "quick"])
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn criterion_10() -> Verdict {
    let trips = check_round_trips(2..=8, 1000, &mut rng(40));
    let (code_a, first) = verify_bytes();
    let (code_b, second) = verify_bytes();
    let identical = first == second && !first.is_empty();
    Verdict {
        passed: trips.statistic <= 1e-12 && identical && code_a == Some(0) && code_b == Some(0),
        detail: format!(
            "round trip {:.3e} <= 1e-12; verify exit {:?}/{:?}, byte-identical {identical}",
            trips.statistic, code_a, code_b
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(Criterion, fn() -> Verdict); 10] = [
        (Criterion { id: 1, title: "ratio change of variables", budget: Duration::from_secs(1) }, criterion_1),
        (Criterion { id: 2, title: "log-ratio change of variables", budget: Duration::from_secs(1) }, criterion_2),
        (Criterion { id: 3, title: "closed-form vs finite-difference Jacobians", budget: Duration::from_secs(5) }, criterion_3),
        (Criterion { id: 4, title: "Dirichlet-Multinomial normalization", budget: Duration::from_secs(10) }, criterion_4),
        (Criterion { id: 5, title: "Beta-Binomial equals merged marginal", budget: Duration::from_secs(10) }, criterion_5),
        (Criterion { id: 6, title: "Poisson-Gamma mixture is Negative Binomial", budget: Duration::from_secs(10) }, criterion_6),
        (Criterion { id: 7, title: "conditioned Poissons are Multinomial", budget: Duration::from_secs(30) }, criterion_7),
        (Criterion { id: 8, title: "proportions independent of total", budget: Duration::from_secs(10) }, criterion_8),
        (Criterion { id: 9, title: "normalized Negative Binomial total mass", budget: Duration::from_secs(5) }, criterion_9),
        (Criterion { id: 10, title: "round trips and verify determinism", budget: Duration::from_secs(60) }, criterion_10),
    ];
    let mut failures = 0;
    for (c, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < c.budget;
        let ok = verdict.passed && in_time;
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {}: {}; {:.3}s < {}s",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            verdict.detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
