//! Acceptance suite: one `PASS`/`FAIL` line per criterion and case.
//!
//! Runs without the libtest harness so that every line reaches the test log.
//! The process fails when a case fails that is not listed in
//! [`KNOWN_SHORTFALLS`], or when a listed case unexpectedly passes (the list
//! is then stale). Listed cases still print `FAIL`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use spectral_rates::asymptotics::{
    bessel_transform_decay, dyadic, envelope_degrees, fit_log_points, fit_rate, fit_rate_envelope,
    predict_rate, BesselFamily, BesselParams, LogRegressor, Parity,
};
use spectral_rates::coefficients::{
    closed_form_endpoint_coeff, derivative_coeff_factor, hermite_coeffs, laguerre_coeffs,
};
use spectral_rates::orthopoly::{
    hermite_laguerre_identity_error, hilb_residual, rodrigues_k1_error, HermiteRecurrence,
    LaguerreBasis, LaguerreRecurrence,
};
use spectral_rates::projection::{
    l2_tail_error, sup_grid, weighted_sup_envelope, weighted_sup_errors,
};
use spectral_rates::{Basis, CoefficientSeries, RuleKind, SingularFunctionSpec, Target};

/// Tolerances, each tied to its criterion.
mod tol {
    /// Gram matrix deviation from the identity (criterion 1).
    pub const GRAM: f64 = 1e-10;
    /// Quadrature coefficients against the closed form (criterion 2).
    pub const ORACLE_REL: f64 = 1e-7;
    /// Coefficient and `L²` slopes (criteria 3-7).
    pub const SLOPE: f64 = 0.1;
    /// Weighted sup slopes (criterion 5).
    pub const SUP_SLOPE: f64 = 0.15;
    /// `log_n|h_n|` against `−(n+s)/2−1` (criterion 6).
    pub const STIRLING_RATIO: f64 = 0.05;
    /// Hilb residual ratio: max over median (criterion 8).
    pub const HILB_SPREAD: f64 = 2.0;
    /// Hermite-Laguerre identities (criterion 9).
    pub const HERMITE_LAGUERRE_REL: f64 = 1e-9;
    /// Rodrigues reduction (criterion 9).
    pub const RODRIGUES_REL: f64 = 1e-10;
}

/// Absolute quadrature tolerance per coefficient.
const QUAD_TOL: f64 = 1e-13;
/// Coefficient fits over dyadic `n ∈ [64, 2048]`.
const COEFF_WINDOW: (usize, usize) = (64, 2048);
/// Error curves at dyadic `N ∈ [64, 1024]` from coefficients `0..=4096`.
const ERROR_WINDOW: (usize, usize) = (64, 1024);
const SERIES_MAX: usize = 4096;

/// Cases that fail at desk scale; see the decisions ledger. Each entry is a
/// `(criterion, label)` pair.
const KNOWN_SHORTFALLS: &[(u8, &str)] = &[
    (3, "alpha=0"),
    (5, "endpoint l2"),
    (5, "interior gamma=3 sup"),
    (6, "hermite coefficient"),
    (8, "alpha=0"),
];

struct Case {
    criterion: u8,
    label: String,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Report {
    cases: Vec<Case>,
}

impl Report {
    fn record(
        &mut self,
        criterion: u8,
        label: impl Into<String>,
        pass: bool,
        detail: impl Into<String>,
    ) {
        let case = Case {
            criterion,
            label: label.into(),
            pass,
            detail: detail.into(),
        };
        println!(
            "{} criterion {:>2} [{}] {}",
            if case.pass { "PASS" } else { "FAIL" },
            case.criterion,
            case.label,
            case.detail
        );
        self.cases.push(case);
    }

    fn slope(
        &mut self,
        criterion: u8,
        label: &str,
        fitted: spectral_rates::Result<f64>,
        predicted: f64,
        tol: f64,
    ) {
        match fitted {
            Ok(p) => self.record(
                criterion,
                label,
                (p - predicted).abs() <= tol,
                format!("fitted {p:.4} predicted {predicted:.4} ± {tol}"),
            ),
            Err(e) => self.record(criterion, label, false, format!("error: {e}")),
        }
    }
}

fn gram_deviation(rows: impl Fn(f64, &mut [f64]), kind: RuleKind, nodes: usize) -> f64 {
    let rule = spectral_rates::quadrature::gauss_rule(kind, nodes).unwrap();
    let mut g = vec![[0.0f64; 51]; 51];
    let mut row = vec![0.0; 51];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights_over_density) {
        rows(x, &mut row);
        for i in 0..51 {
            for j in 0..51 {
                g[i][j] += w * row[i] * row[j];
            }
        }
    }
    let mut dev = 0.0f64;
    for (i, gi) in g.iter().enumerate() {
        for (j, &gij) in gi.iter().enumerate() {
            dev = dev.max((gij - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    dev
}

fn criterion_1(r: &mut Report) {
    for alpha in [-0.5, 0.0, 1.0] {
        let rec = LaguerreRecurrence::new(LaguerreBasis::new(alpha).unwrap(), 50);
        let dev = gram_deviation(
            |x, row| rec.fill(x, row).unwrap(),
            RuleKind::Laguerre { alpha },
            200,
        );
        r.record(
            1,
            format!("laguerre alpha={alpha}"),
            dev <= tol::GRAM,
            format!("max deviation {dev:.2e}"),
        );
    }
    let rec = HermiteRecurrence::new(50);
    let dev = gram_deviation(|x, row| rec.fill(x, row), RuleKind::Hermite, 120);
    r.record(
        1,
        "hermite",
        dev <= tol::GRAM,
        format!("max deviation {dev:.2e}"),
    );
}

fn criterion_2(r: &mut Report) {
    let ns: Vec<usize> = (0..=200).collect();
    for (alpha, delta) in [(0.0, 0.5), (1.0, 1.2), (-0.5, 0.7)] {
        for mu in 0..=2 {
            let label = format!("alpha={alpha} delta={delta} mu={mu}");
            let spec = SingularFunctionSpec::laguerre_endpoint(delta, mu);
            let run = || -> spectral_rates::Result<(f64, usize)> {
                let raw = laguerre_coeffs(&spec, alpha, &ns, QUAD_TOL)?.raw();
                let mut worst = (0.0f64, 0);
                for (i, &n) in ns.iter().enumerate() {
                    let want = closed_form_endpoint_coeff(n, alpha, delta, mu)?;
                    let rel = (raw.coeff_normalized[i] - want).abs() / want.abs();
                    if rel > worst.0 {
                        worst = (rel, n);
                    }
                }
                Ok(worst)
            };
            match run() {
                Ok((rel, n)) => r.record(
                    2,
                    label,
                    rel <= tol::ORACLE_REL,
                    format!("max relative error {rel:.2e} at n = {n}"),
                ),
                Err(e) => r.record(2, label, false, format!("error: {e}")),
            }
        }
    }
}

fn criterion_3(r: &mut Report) {
    let spec = SingularFunctionSpec::laguerre_endpoint(1.2, 3);
    let ns = dyadic(COEFF_WINDOW.0, COEFF_WINDOW.1);
    for alpha in [0.0, 1.0, 2.0] {
        let predicted = alpha + 1.2 + 1.0;
        let fitted = laguerre_coeffs(&spec, alpha, &ns, QUAD_TOL)
            .and_then(|s| fit_rate(&s.raw(), 3, COEFF_WINDOW).map(|f| f.exponent_hat));
        r.slope(3, &format!("alpha={alpha}"), fitted, predicted, tol::SLOPE);
    }
}

fn criterion_4(r: &mut Report) {
    let centres = dyadic(COEFF_WINDOW.0, COEFF_WINDOW.1);
    for (gamma, mu) in [(1.2, 2), (3.0, 1)] {
        let spec = SingularFunctionSpec::laguerre_interior(0.3, gamma, mu);
        for alpha in [0.0, 1.0] {
            let predicted = (alpha + gamma) / 2.0 + 0.75;
            let basis = Basis::Laguerre { alpha };
            let fitted = laguerre_coeffs(
                &spec,
                alpha,
                &envelope_degrees(&spec, basis, &centres),
                QUAD_TOL,
            )
            .and_then(|s| fit_rate_envelope(&s.raw(), mu, &centres).map(|f| f.exponent_hat));
            r.slope(
                4,
                &format!("gamma={gamma} mu={mu} alpha={alpha}"),
                fitted,
                predicted,
                tol::SLOPE,
            );
        }
    }
}

fn curve_slope(n: &[usize], e: &[f64], mu: u32) -> spectral_rates::Result<f64> {
    let pts: Vec<(f64, f64)> = n
        .iter()
        .zip(e)
        .map(|(&n, &e)| (n as f64, e.log10()))
        .collect();
    Ok(fit_log_points(&pts, mu, LogRegressor::TwoSqrtN)?.exponent_hat)
}

fn error_slopes(
    r: &mut Report,
    criterion: u8,
    label: &str,
    series: spectral_rates::Result<CoefficientSeries>,
    alpha: Option<f64>,
    with_sup: bool,
) {
    let big_n = dyadic(ERROR_WINDOW.0, ERROR_WINDOW.1);
    let series = match series {
        Ok(s) => s,
        Err(e) => {
            r.record(
                criterion,
                format!("{label} l2"),
                false,
                format!("error: {e}"),
            );
            return;
        }
    };
    let spec = series.spec.clone();
    let l2 = predict_rate(&spec, alpha, Target::L2Error).unwrap();
    let fitted = l2_tail_error(&series, &big_n)
        .and_then(|c| curve_slope(&c.n_values, &c.errors, l2.log_power));
    r.slope(
        criterion,
        &format!("{label} l2"),
        fitted,
        l2.exponent_p,
        tol::SLOPE,
    );
    if with_sup {
        let sup = predict_rate(&spec, alpha, Target::WeightedSupError).unwrap();
        let grid = sup_grid(&series, ERROR_WINDOW.1);
        let curve = if spec.location() == 0.0 {
            weighted_sup_errors(&series, &big_n, &grid)
        } else {
            weighted_sup_envelope(&series, &big_n, &grid)
        };
        let fitted = curve.and_then(|c| curve_slope(&c.n_values, &c.errors, sup.log_power));
        r.slope(
            criterion,
            &format!("{label} sup"),
            fitted,
            sup.exponent_p,
            tol::SUP_SLOPE,
        );
    }
}

fn criterion_5(r: &mut Report) {
    let all: Vec<usize> = (0..=SERIES_MAX).collect();
    let endpoint = SingularFunctionSpec::laguerre_endpoint(1.2, 3);
    error_slopes(
        r,
        5,
        "endpoint",
        laguerre_coeffs(&endpoint, 0.0, &all, QUAD_TOL),
        Some(0.0),
        true,
    );
    for (gamma, mu) in [(1.2, 2), (3.0, 1)] {
        let spec = SingularFunctionSpec::laguerre_interior(0.3, gamma, mu);
        let label = format!("interior gamma={gamma}");
        error_slopes(
            r,
            5,
            &label,
            laguerre_coeffs(&spec, 0.0, &all, QUAD_TOL),
            Some(0.0),
            true,
        );
    }
}

fn criterion_6(r: &mut Report) {
    let s = 1.2;
    let spec = SingularFunctionSpec::hermite_interior(3.0, s, 2);
    let centres = dyadic(COEFF_WINDOW.0, COEFF_WINDOW.1);
    let windowed = hermite_coeffs(
        &spec,
        &envelope_degrees(&spec, Basis::Hermite, &centres),
        QUAD_TOL,
    );
    let fitted = windowed
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|s| fit_rate_envelope(s, 2, &centres).map(|f| f.exponent_hat));
    r.slope(6, "hermite coefficient", fitted, s / 2.0 + 0.75, tol::SLOPE);

    let all: Vec<usize> = (0..=SERIES_MAX).collect();
    error_slopes(
        r,
        6,
        "hermite",
        hermite_coeffs(&spec, &all, QUAD_TOL),
        None,
        false,
    );

    let n = 512usize;
    match hermite_coeffs(&spec, &[n], QUAD_TOL) {
        Ok(series) => {
            let log_n = series.raw_log10(0) * std::f64::consts::LN_10 / (n as f64).ln();
            let reference = -(n as f64 + s) / 2.0 - 1.0;
            let ratio = log_n / reference;
            r.record(
                6,
                "stirling log_n|h_n| at n=512",
                (ratio - 1.0).abs() <= tol::STIRLING_RATIO,
                format!("log_n|h_n| {log_n:.3} reference {reference:.3} ratio {ratio:.4}"),
            );
        }
        Err(e) => r.record(
            6,
            "stirling log_n|h_n| at n=512",
            false,
            format!("error: {e}"),
        ),
    }
}

fn criterion_7(r: &mut Report) {
    let omegas: Vec<f64> = (4..=14).map(|k| 2f64.powi(k)).collect();
    let degrees: Vec<f64> = dyadic(64, 2048).into_iter().map(|n| n as f64).collect();
    let d = BesselParams::default();
    let cases: Vec<(&str, BesselFamily, BesselParams, &[f64])> = vec![
        (
            "log at 0 alpha=1/2 beta=0 mu=0",
            BesselFamily::LogAtZero,
            BesselParams {
                alpha: 0.5,
                ..d.clone()
            },
            &omegas,
        ),
        (
            "log at 0 alpha=1/2 beta=0 mu=2",
            BesselFamily::LogAtZero,
            BesselParams {
                alpha: 0.5,
                mu: 2,
                ..d.clone()
            },
            &omegas,
        ),
        (
            "interior beta=-1/2 mu=1",
            BesselFamily::InteriorLeft,
            BesselParams {
                a: 1.0,
                b: 4.0,
                beta: -0.5,
                mu: 1,
                ..d.clone()
            },
            &omegas,
        ),
        (
            "interior beta=1/2 mu=1",
            BesselFamily::InteriorLeft,
            BesselParams {
                a: 1.0,
                b: 4.0,
                beta: 0.5,
                mu: 1,
                ..d.clone()
            },
            &omegas,
        ),
        (
            "laguerre transform endpoint branch",
            BesselFamily::LaguerreTransform,
            BesselParams {
                alpha: 1.0,
                tau: -0.5,
                beta: 0.5,
                mu: 1,
                ..d.clone()
            },
            &degrees,
        ),
        (
            "laguerre transform interior branch",
            BesselFamily::LaguerreTransform,
            BesselParams {
                a: 1.0,
                b: 2.5,
                beta: 0.5,
                mu: 1,
                ..d.clone()
            },
            &degrees,
        ),
        (
            "hermite transform beta=1/2 even",
            BesselFamily::HermiteTransform,
            BesselParams {
                a: -1.0,
                b: 1.0,
                beta: 0.5,
                ..d.clone()
            },
            &degrees,
        ),
        (
            "hermite transform beta=1/2 odd",
            BesselFamily::HermiteTransform,
            BesselParams {
                a: -1.0,
                b: 1.0,
                beta: 0.5,
                parity: Parity::Odd,
                ..d.clone()
            },
            &degrees,
        ),
    ];
    for (label, family, params, points) in cases {
        match bessel_transform_decay(family, &params, points) {
            Ok(rep) => r.record(
                7,
                label,
                rep.passes(tol::SLOPE),
                format!(
                    "fitted {:.4} predicted {:.4} (log power {}){} ± {}",
                    rep.fit.exponent_hat,
                    rep.predicted.0,
                    rep.predicted.1,
                    if rep.ambiguous {
                        format!(", alternative {:.4}", rep.alternative.0)
                    } else {
                        String::new()
                    },
                    tol::SLOPE
                ),
            ),
            Err(e) => r.record(7, label, false, format!("error: {e}")),
        }
    }
}

fn criterion_8(r: &mut Report) {
    let x: f64 = 0.5;
    for alpha in [0.0, 0.5] {
        let ratios: spectral_rates::Result<Vec<f64>> = dyadic(64, 4096)
            .into_iter()
            .map(|n| {
                Ok(hilb_residual(alpha, n, x)?.abs()
                    / (x.powf(1.25) * (n as f64).powf(alpha / 2.0 - 0.75)))
            })
            .collect();
        match ratios {
            Ok(v) => {
                let mut s = v.clone();
                s.sort_by(f64::total_cmp);
                let median = s[s.len() / 2];
                let max = s[s.len() - 1];
                r.record(
                    8,
                    format!("alpha={alpha}"),
                    max <= tol::HILB_SPREAD * median,
                    format!(
                        "max/median {:.3} (limit {})",
                        max / median,
                        tol::HILB_SPREAD
                    ),
                );
            }
            Err(e) => r.record(8, format!("alpha={alpha}"), false, format!("error: {e}")),
        }
    }
}

fn criterion_9(r: &mut Report) {
    let mut worst = 0.0f64;
    for n in 0..=30 {
        for x in [0.1, 0.5, 0.9, 2.5, 4.0] {
            let (e, o) = hermite_laguerre_identity_error(n, x);
            worst = worst.max(e).max(o);
        }
    }
    r.record(
        9,
        "hermite-laguerre n<=30",
        worst <= tol::HERMITE_LAGUERRE_REL,
        format!("max relative error {worst:.2e}"),
    );

    let mut worst = 0.0f64;
    for n in 1..=50 {
        for x in [0.5, 1.0, 4.0] {
            for alpha in [0.0, 0.5, 2.0] {
                worst = worst.max(rodrigues_k1_error(n, alpha, x));
            }
        }
    }
    r.record(
        9,
        "rodrigues k=1 n<=50",
        worst <= tol::RODRIGUES_REL,
        format!("max relative error {worst:.2e}"),
    );

    // f = x, α = 0: f' = 1 has a_0^{(1)}(1) = 1.
    let a1 = closed_form_endpoint_coeff(1, 0.0, 1.0, 0).unwrap();
    let v = derivative_coeff_factor(0, 1, 0.0) * a1;
    r.record(
        9,
        "derivative identity q=1",
        v == 1.0,
        format!("a_0' = {v:e}"),
    );
}

fn run_cli(dir: &Path, threads: usize, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_spectral-rates"))
        .arg("--threads")
        .arg(threads.to_string())
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_10(r: &mut Report) {
    for args in [
        ["figures", "--figure", "2", "--n-max", "256"],
        ["figures", "--figure", "6", "--n-max", "512"],
    ] {
        let label = args.join(" ");
        let one = tempfile::tempdir().unwrap();
        let many = tempfile::tempdir().unwrap();
        let result = run_cli(one.path(), 1, &args).and_then(|_| run_cli(many.path(), 4, &args));
        match result {
            Ok(()) => {
                let (a, b) = (dir_bytes(one.path()), dir_bytes(many.path()));
                let csvs = a.iter().filter(|(n, _)| n.ends_with(".csv")).count();
                r.record(
                    10,
                    label,
                    a == b && csvs > 0,
                    format!("{csvs} CSV files, threads 1 vs 4, identical: {}", a == b),
                );
            }
            Err(e) => r.record(10, label, false, format!("error: {e}")),
        }
    }
}

fn main() {
    let start = Instant::now();
    let mut report = Report::default();
    let criteria: [fn(&mut Report); 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    for c in criteria {
        c(&mut report);
    }

    let known = |c: &Case| KNOWN_SHORTFALLS.contains(&(c.criterion, c.label.as_str()));
    let failed = report.cases.iter().filter(|c| !c.pass).count();
    let unexpected: Vec<&Case> = report
        .cases
        .iter()
        .filter(|c| !c.pass && !known(c))
        .collect();
    let stale: Vec<&Case> = report.cases.iter().filter(|c| c.pass && known(c)).collect();
    println!(
        "acceptance: {} cases, {} PASS, {} FAIL ({} documented shortfalls), {:.0?}",
        report.cases.len(),
        report.cases.len() - failed,
        failed,
        failed - unexpected.len(),
        start.elapsed()
    );
    for c in &unexpected {
        println!("unexpected FAIL: criterion {} [{}]", c.criterion, c.label);
    }
    for c in &stale {
        println!(
            "documented shortfall now passes: criterion {} [{}]",
            c.criterion, c.label
        );
    }
    if !unexpected.is_empty() || !stale.is_empty() {
        std::process::exit(1);
    }
}
