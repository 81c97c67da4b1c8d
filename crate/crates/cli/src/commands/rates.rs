use std::io::Write;

use spectral_rates::asymptotics::{fit_rate, fit_rate_envelope, predict_rate, FitResult};
use spectral_rates::{Basis, CoefficientSeries, SingularFunctionSpec, Target};

use super::{alpha_of, spec_from_meta};
use crate::range::parse_window;
use crate::table::{read_table, ParsedTable};
use crate::{CliError, CliResult, RatesArgs, ViewArg};

/// Outcome of a rate check.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub predicted: f64,
    pub log_power: u32,
    pub source: String,
    pub fit: FitResult,
    pub pass: bool,
}

impl RateReport {
    pub fn line(&self) -> String {
        format!(
            "predicted {:.4} ({}, log power {}) fitted {:.4} window [{}, {}] points {} max residual {:.3e} {}",
            self.predicted,
            self.source,
            self.log_power,
            self.fit.exponent_hat,
            self.fit.window.0,
            self.fit.window.1,
            self.fit.n_points,
            self.fit.max_residual,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn column(t: &ParsedTable, name: &str) -> CliResult<usize> {
    t.column(name)
        .ok_or_else(|| CliError::usage(format!("column `{name}` missing")))
}

fn cell<T: std::str::FromStr>(row: &[String], i: usize, name: &str) -> CliResult<T> {
    row.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::usage(format!("bad `{name}` value in row {row:?}")))
}

/// Series in the requested view; the `gated` column (when present) is
/// carried as the convergence flag.
fn series_from_table(
    t: &ParsedTable,
    spec: SingularFunctionSpec,
    basis: Basis,
    view: ViewArg,
) -> CliResult<CoefficientSeries> {
    let (n_col, c_col) = (column(t, "n")?, column(t, "coeff_normalized")?);
    let raw_col = t.column("coeff_raw_log10");
    let gate_col = t.column("gated");
    let err_col = t.column("err_est");
    let mut s = CoefficientSeries {
        basis,
        n_values: Vec::new(),
        coeff_normalized: Vec::new(),
        log10_abs: Vec::new(),
        err_est: Vec::new(),
        converged: Vec::new(),
        spec,
    };
    for row in &t.rows {
        let c: f64 = cell(row, c_col, "coeff_normalized")?;
        let err: f64 = match err_col {
            Some(i) => cell(row, i, "err_est")?,
            None => 0.0,
        };
        let gated = match gate_col {
            Some(i) => cell(row, i, "gated")?,
            None => c != 0.0 && c.abs() >= 10.0 * err,
        };
        let log10 = match view {
            ViewArg::Normalized => c.abs().log10(),
            ViewArg::Raw => {
                let i = raw_col
                    .ok_or_else(|| CliError::usage("raw view needs column `coeff_raw_log10`"))?;
                cell(row, i, "coeff_raw_log10")?
            }
        };
        s.n_values.push(cell(row, n_col, "n")?);
        s.coeff_normalized.push(c);
        s.log10_abs.push(log10);
        s.err_est.push(0.0);
        s.converged.push(gated);
    }
    if s.n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::usage("degrees must be strictly increasing"));
    }
    Ok(s)
}

pub fn check(args: &RatesArgs) -> CliResult<RateReport> {
    let table = read_table(&args.csv)?;
    let from_meta = spec_from_meta(&table.meta)?;
    let (spec, basis) = match from_meta.clone() {
        Some(sb) => sb,
        None => {
            if args.predicted.is_none() || args.log_power.is_none() {
                return Err(CliError::usage(
                    "CSV has no meta block; pass --predicted and --log-power",
                ));
            }
            (
                SingularFunctionSpec::laguerre_endpoint(0.0, 0),
                Basis::Laguerre { alpha: 0.0 },
            )
        }
    };
    let view = args.view.unwrap_or(match (&from_meta, basis) {
        (Some(_), Basis::Laguerre { .. }) => ViewArg::Raw,
        _ => ViewArg::Normalized,
    });
    let series = series_from_table(&table, spec.clone(), basis, view)?;

    let (predicted, log_power, source) = match args.predicted {
        Some(p) => (
            p,
            args.log_power.unwrap_or(spec.log_power),
            "user".to_string(),
        ),
        None => {
            let pred = predict_rate(
                &spec,
                alpha_of(basis),
                Target::Coefficient {
                    normalized: view == ViewArg::Normalized,
                },
            )?;
            (
                pred.exponent_p,
                args.log_power.unwrap_or(pred.log_power),
                format!("{}, {}", pred.source, pred.target),
            )
        }
    };

    let (lo, hi) = match &args.window {
        Some(w) => parse_window(w)?,
        None => (0.0, f64::INFINITY),
    };
    let centres: Option<Vec<usize>> = table.meta.get("envelope_centres").map(|c| {
        c.split(';')
            .filter_map(|s| s.parse().ok())
            .filter(|&n: &usize| n as f64 >= lo && n as f64 <= hi)
            .collect()
    });
    let fit = match centres {
        Some(c) => fit_rate_envelope(&series, log_power, &c)?,
        None => {
            let hi = if hi.is_finite() {
                hi as usize
            } else {
                usize::MAX
            };
            fit_rate(&series, log_power, (lo.ceil() as usize, hi))?
        }
    };
    let pass = (fit.exponent_hat - predicted).abs() <= args.rate_tol;
    Ok(RateReport {
        predicted,
        log_power,
        source,
        fit,
        pass,
    })
}

pub fn run(args: &RatesArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let report = check(args)?;
    writeln!(stdout, "{}", report.line()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::RateFail)
    }
}
