use std::io::Write;
use std::path::Path;

use spectral_rates::asymptotics::{
    bessel_transform_decay, BesselDecayReport, BesselFamily, BesselParams, Parity,
};

use super::smooth_factor;
use crate::range::parse_degrees;
use crate::table::{fmt_f64, write_atomic, Table};
use crate::{CliError, CliResult, LemmaArgs, LemmaFamilyArg};

pub(crate) fn family(arg: LemmaFamilyArg) -> BesselFamily {
    match arg {
        LemmaFamilyArg::LogAtZero => BesselFamily::LogAtZero,
        LemmaFamilyArg::LogAtB => BesselFamily::LogAtB,
        LemmaFamilyArg::InteriorLeft => BesselFamily::InteriorLeft,
        LemmaFamilyArg::InteriorRight => BesselFamily::InteriorRight,
        LemmaFamilyArg::Signed => BesselFamily::Signed,
        LemmaFamilyArg::LaguerreTransform => BesselFamily::LaguerreTransform,
        LemmaFamilyArg::HermiteTransform => BesselFamily::HermiteTransform,
    }
}

pub fn params(args: &LemmaArgs) -> BesselParams {
    BesselParams {
        alpha: args.alpha,
        beta: args.beta,
        tau: args.tau,
        delta: args.delta,
        mu: args.mu,
        nu: args.nu,
        a: args.a,
        b: args.b,
        psi: smooth_factor(args.psi),
        parity: if args.odd { Parity::Odd } else { Parity::Even },
    }
}

pub fn check(args: &LemmaArgs) -> CliResult<BesselDecayReport> {
    let fam = family(args.family);
    let default = if fam.in_degree() {
        "64:2048:dyadic"
    } else {
        "16:16384:dyadic"
    };
    let range = parse_degrees(args.range.as_deref().unwrap_or(default))?;
    let points: Vec<f64> = range.values.iter().map(|&n| n as f64).collect();
    Ok(bessel_transform_decay(fam, &params(args), &points)?)
}

pub fn report_line(r: &BesselDecayReport, tol: f64) -> String {
    format!(
        "predicted {:.4} ({}, log power {}) alternative {:.4} (log power {}){} fitted {:.4} window [{}, {}] points {} max residual {:.3e} {}",
        r.predicted.0,
        r.family.tag(),
        r.predicted.1,
        r.alternative.0,
        r.alternative.1,
        if r.ambiguous { " ambiguous" } else { "" },
        r.fit.exponent_hat,
        r.fit.window.0,
        r.fit.window.1,
        r.fit.n_points,
        r.fit.max_residual,
        if r.passes(tol) { "PASS" } else { "FAIL" }
    )
}

pub fn run(args: &LemmaArgs, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let r = check(args)?;
    writeln!(stdout, "{}", report_line(&r, args.rate_tol)).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })?;
    if let Some(path) = out {
        let mut t = Table::new(&["omega_or_n", "log10_envelope"]);
        let p = params(args);
        t.meta("command", "lemma-check")
            .meta("theorem", r.family.tag())
            .meta("alpha", p.alpha)
            .meta("beta", p.beta)
            .meta("tau", p.tau)
            .meta("delta", p.delta)
            .meta("mu", p.mu)
            .meta("nu", p.nu)
            .meta("a", p.a)
            .meta("b", p.b)
            .meta("psi", p.psi.name())
            .meta("parity", if args.odd { "odd" } else { "even" })
            .meta("predicted_p", r.predicted.0)
            .meta("log_power", r.predicted.1);
        for &(x, y) in &r.samples {
            t.push(vec![fmt_f64(x), fmt_f64(y)]);
        }
        let path = if path.is_dir() {
            path.join("lemma.csv")
        } else {
            path.to_path_buf()
        };
        write_atomic(&path, &t.to_bytes()?)?;
    }
    if r.passes(args.rate_tol) {
        Ok(())
    } else {
        Err(CliError::RateFail)
    }
}
