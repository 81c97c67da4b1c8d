//! Data behind the six figures: one CSV per panel plus a gnuplot script and
//! a rate-comparison report per figure.
//!
//! Figures 1, 2, 5 plot coefficients at dyadic degrees `16..n_max`
//! (windowed envelopes for interior singularities); figures 3, 4, 6 plot
//! truncation errors at dyadic `N` in `16..n_max/2` from coefficients
//! `0..=2 n_max`. Endpoint error panels use the closed-form coefficients:
//! their tails fall below the quadrature floor (about `3e-14` for `δ = 4`).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use spectral_rates::asymptotics::{
    coefficient_envelope, dyadic, fit_log_points, predict_rate, LogRegressor, RatePrediction,
};
use spectral_rates::coefficients::closed_form_endpoint_series;
use spectral_rates::projection::{
    l2_tail_error, sup_grid, weighted_sup_envelope, weighted_sup_errors,
};
use spectral_rates::{Basis, ErrorCurve, SingularFunctionSpec, SingularityKind, Target};

use super::{alpha_of, compute_series, spec_meta};
use crate::table::{fmt_f64, write_atomic, Table};
use crate::{CliError, CliResult, FiguresArgs};

pub const FIGURE_HEADER: [&str; 3] = ["n_or_N", "value", "reference_line"];
/// Extra columns of figure 5.
pub const HERMITE_LOG_COLUMNS: [&str; 2] = ["log_n_abs_h", "log_n_reference"];

/// `α` values per panel; the captions leave them open.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.0, 1.0, 2.0];
/// `(s, μ)` of figures 5 and 6; the captions leave them open.
pub const DEFAULT_HERMITE_PARAMS: [(f64, u32); 2] = [(1.2, 2), (3.0, 1)];
pub const INTERIOR_X0: f64 = 0.3;
pub const HERMITE_Z0: f64 = 3.0;
const FIRST_DEGREE: usize = 16;
/// Smallest `n_max` giving five dyadic points from [`FIRST_DEGREE`].
pub const MIN_N_MAX: usize = 256;
const TOL: f64 = spectral_rates::coefficients::DEFAULT_ABS_TOL;

/// One panel of a figure.
#[derive(Debug, Clone)]
pub struct Panel {
    pub name: String,
    pub table: Table,
    /// `(n, value)` points, used for the rate report.
    pub points: Vec<(f64, f64)>,
    pub prediction: RatePrediction,
}

fn ln2sqrt(n: f64) -> f64 {
    (2.0 * n.sqrt()).ln()
}

/// `C n^{-p} ln^μ(2√n)` through the last point.
fn reference(points: &[(f64, f64)], p: f64, mu: u32) -> Vec<f64> {
    let Some(&(n_last, v_last)) = points.last() else {
        return Vec::new();
    };
    points
        .iter()
        .map(|&(n, _)| {
            v_last * (n / n_last).powf(-p) * (ln2sqrt(n) / ln2sqrt(n_last)).powi(mu as i32)
        })
        .collect()
}

fn panel(
    name: String,
    mut table: Table,
    points: Vec<(f64, f64)>,
    extra: Vec<Vec<String>>,
    prediction: RatePrediction,
) -> Panel {
    let refs = reference(&points, prediction.exponent_p, prediction.log_power);
    for (i, (&(n, v), r)) in points.iter().zip(refs).enumerate() {
        let mut row = vec![format!("{n}"), fmt_f64(v), fmt_f64(r)];
        if let Some(e) = extra.get(i) {
            row.extend(e.iter().cloned());
        }
        table.push(row);
    }
    Panel {
        name,
        table,
        points,
        prediction,
    }
}

fn base_table(
    header: &[&str],
    figure: u8,
    spec: &SingularFunctionSpec,
    basis: Basis,
    pred: &RatePrediction,
    defaults: &str,
) -> Table {
    let mut t = Table::new(header);
    t.meta("command", "figures").meta("figure", figure);
    spec_meta(&mut t, spec, basis, TOL);
    t.meta("theorem", pred.source)
        .meta("target", pred.target)
        .meta("predicted_p", pred.exponent_p)
        .meta("log_power", pred.log_power)
        .meta("defaults", defaults);
    t
}

fn tag(spec: &SingularFunctionSpec, basis: Basis) -> String {
    let e = match spec.kind {
        SingularityKind::LaguerreEndpoint => "delta",
        SingularityKind::LaguerreInterior { .. } => "gamma",
        SingularityKind::HermiteInterior { .. } => "s",
    };
    let mut s = format!("{e}{}_mu{}", spec.exponent, spec.log_power);
    if let Basis::Laguerre { alpha } = basis {
        let _ = write!(s, "_alpha{alpha}");
    }
    s
}

fn coefficient_panel(
    figure: u8,
    spec: SingularFunctionSpec,
    basis: Basis,
    n_max: usize,
    defaults: &str,
) -> CliResult<Panel> {
    let hermite = basis == Basis::Hermite;
    let pred = predict_rate(
        &spec,
        alpha_of(basis),
        Target::Coefficient {
            normalized: hermite,
        },
    )?;
    let centres = dyadic(FIRST_DEGREE, n_max);
    let endpoint = spec.kind == SingularityKind::LaguerreEndpoint;
    let degrees = if endpoint {
        centres.clone()
    } else {
        spectral_rates::asymptotics::envelope_degrees(&spec, basis, &centres)
    };
    let series = compute_series(&spec, basis, &degrees, TOL)?;
    let view = if hermite {
        series.clone()
    } else {
        series.raw()
    };
    let log_points: Vec<(f64, f64)> = if endpoint {
        (0..view.len())
            .filter(|&i| view.gated(i))
            .map(|i| (view.n_values[i] as f64, view.log10_abs[i]))
            .collect()
    } else {
        coefficient_envelope(&view, pred.log_power, &centres)?
    };
    let points: Vec<(f64, f64)> = log_points
        .iter()
        .map(|&(n, l)| (n, 10f64.powf(l)))
        .collect();

    let mut header = FIGURE_HEADER.to_vec();
    let mut extra = Vec::new();
    if hermite {
        header.extend(HERMITE_LOG_COLUMNS);
        for &(n, l) in &log_points {
            let ln_raw = l * std::f64::consts::LN_10 + series.ln_raw_factor(n as usize);
            let reference = -(n + spec.exponent) / 2.0 - 1.0;
            extra.push(vec![fmt_f64(ln_raw / n.ln()), fmt_f64(reference)]);
        }
    }
    let mut t = base_table(&header, figure, &spec, basis, &pred, defaults);
    let value = match (hermite, endpoint) {
        (true, _) => "windowed envelope of |h_n| normalized",
        (false, true) => "|a_n| raw",
        (false, false) => "windowed envelope of |a_n| raw",
    };
    t.meta("value", value).meta("n_max", n_max);
    if !endpoint {
        t.meta("envelope_centres", super::join(&centres));
    }
    Ok(panel(
        format!("fig{figure}_{}", tag(&spec, basis)),
        t,
        points,
        extra,
        pred,
    ))
}

fn error_panels(
    figure: u8,
    spec: SingularFunctionSpec,
    basis: Basis,
    n_max: usize,
    defaults: &str,
) -> CliResult<Vec<Panel>> {
    let l2_pred = predict_rate(&spec, alpha_of(basis), Target::L2Error)?;
    let sup_pred = predict_rate(&spec, alpha_of(basis), Target::WeightedSupError)?;
    let n_top = n_max / 2;
    let big_n = dyadic(FIRST_DEGREE, n_top);
    let series_max = 2 * n_max;
    let degrees: Vec<usize> = (0..=series_max).collect();
    let endpoint = spec.kind == SingularityKind::LaguerreEndpoint;
    let series = match (endpoint, basis) {
        (true, Basis::Laguerre { alpha }) => closed_form_endpoint_series(&spec, alpha, &degrees)?,
        _ => compute_series(&spec, basis, &degrees, TOL)?,
    };
    let l2 = l2_tail_error(&series, &big_n)?;
    let grid = sup_grid(&series, n_top);
    let sup = if endpoint {
        weighted_sup_errors(&series, &big_n, &grid)?
    } else {
        weighted_sup_envelope(&series, &big_n, &grid)?
    };
    let mut out = Vec::new();
    for (norm, curve, pred) in [("l2", l2, l2_pred), ("sup", sup, sup_pred)] {
        let ErrorCurve {
            n_values,
            errors,
            flagged,
            ..
        } = curve;
        let points: Vec<(f64, f64)> = n_values
            .iter()
            .zip(&errors)
            .map(|(&n, &e)| (n as f64, e))
            .collect();
        let mut t = base_table(&FIGURE_HEADER, figure, &spec, basis, &pred, defaults);
        t.meta("norm", norm)
            .meta(
                "coefficients",
                if endpoint {
                    "closed-form"
                } else {
                    "quadrature"
                },
            )
            .meta("series_n_max", series_max)
            .meta("grid_points", if norm == "sup" { grid.len() } else { 0 })
            .meta("flagged_tail", flagged.iter().filter(|&&f| f).count());
        out.push(panel(
            format!("fig{figure}_{norm}_{}", tag(&spec, basis)),
            t,
            points,
            Vec::new(),
            pred,
        ));
    }
    Ok(out)
}

/// All panels of one figure.
pub fn panels(figure: u8, n_max: usize) -> CliResult<Vec<Panel>> {
    let least = if matches!(figure, 1 | 2 | 5) {
        MIN_N_MAX
    } else {
        2 * MIN_N_MAX
    };
    if n_max < least {
        return Err(CliError::usage(format!(
            "figure {figure} needs --n-max ≥ {least}"
        )));
    }
    let laguerre = |spec: &SingularFunctionSpec| -> Vec<(SingularFunctionSpec, Basis)> {
        DEFAULT_ALPHAS
            .iter()
            .map(|&a| (spec.clone(), Basis::Laguerre { alpha: a }))
            .collect()
    };
    let cases: Vec<(SingularFunctionSpec, Basis)> = match figure {
        1 | 3 => {
            let second = if figure == 1 { (3.0, 3) } else { (4.0, 1) };
            [(1.2, 3), second]
                .iter()
                .flat_map(|&(d, mu)| laguerre(&SingularFunctionSpec::laguerre_endpoint(d, mu)))
                .collect()
        }
        2 | 4 => [(1.2, 2), (3.0, 1)]
            .iter()
            .flat_map(|&(g, mu)| {
                laguerre(&SingularFunctionSpec::laguerre_interior(INTERIOR_X0, g, mu))
            })
            .collect(),
        5 | 6 => DEFAULT_HERMITE_PARAMS
            .iter()
            .map(|&(s, mu)| {
                (
                    SingularFunctionSpec::hermite_interior(HERMITE_Z0, s, mu),
                    Basis::Hermite,
                )
            })
            .collect(),
        _ => {
            return Err(CliError::usage(format!(
                "figure must be 1..6, got {figure}"
            )))
        }
    };
    let defaults = if figure >= 5 { "s;mu" } else { "alpha" };
    let mut out = Vec::new();
    for (spec, basis) in cases {
        match figure {
            1 | 2 | 5 => out.push(coefficient_panel(figure, spec, basis, n_max, defaults)?),
            _ => out.extend(error_panels(figure, spec, basis, n_max, defaults)?),
        }
    }
    Ok(out)
}

/// Fitted decay of a panel against its prediction.
pub fn panel_rate(p: &Panel) -> Option<f64> {
    let pts: Vec<(f64, f64)> = p
        .points
        .iter()
        .filter(|(_, v)| *v > 0.0)
        .map(|&(n, v)| (n, v.log10()))
        .collect();
    fit_log_points(&pts, p.prediction.log_power, LogRegressor::TwoSqrtN)
        .ok()
        .map(|f| f.exponent_hat)
}

pub fn report(figure: u8, panels: &[Panel]) -> String {
    let mut s = format!("figure {figure}\n");
    for p in panels {
        let fitted = panel_rate(p).map_or("n/a".to_string(), |r| format!("{r:.4}"));
        let _ = writeln!(
            s,
            "{}: predicted {:.4} ({}, {}, log power {}) fitted {}",
            p.name,
            p.prediction.exponent_p,
            p.prediction.source,
            p.prediction.target,
            p.prediction.log_power,
            fitted
        );
    }
    s
}

fn gnuplot(figure: u8, panels: &[Panel]) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset logscale xy\nset xlabel 'n'\n");
    let _ = writeln!(
        s,
        "set terminal pngcairo size 900,600\nset output 'fig{figure}.png'"
    );
    let plots: Vec<String> = panels
        .iter()
        .map(|p| {
            format!(
                "'{0}.csv' using 1:2 with points title '{0}', '' using 1:3 with lines notitle",
                p.name
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

pub fn write_figure(figure: u8, n_max: usize, dir: &Path) -> CliResult<(Vec<PathBuf>, String)> {
    let panels = panels(figure, n_max)?;
    let mut written = Vec::new();
    for p in &panels {
        let path = dir.join(format!("{}.csv", p.name));
        write_atomic(&path, &p.table.to_bytes()?)?;
        written.push(path);
    }
    let script = dir.join(format!("fig{figure}.gp"));
    write_atomic(&script, gnuplot(figure, &panels).as_bytes())?;
    written.push(script);
    let text = report(figure, &panels);
    let report_path = dir.join(format!("fig{figure}_rates.txt"));
    write_atomic(&report_path, text.as_bytes())?;
    written.push(report_path);
    Ok((written, text))
}

pub fn run(args: &FiguresArgs, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let dir = out.unwrap_or(Path::new("."));
    let (written, text) = write_figure(args.figure, args.n_max, dir)?;
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    stdout.write_all(text.as_bytes()).map_err(io)?;
    for p in written {
        writeln!(stdout, "wrote {}", p.display()).map_err(io)?;
    }
    Ok(())
}
