pub mod coeffs;
pub mod figures;
pub mod lemma;
pub mod rates;

use std::collections::BTreeMap;

use spectral_rates::coefficients::{hermite_coeffs, laguerre_coeffs};
use spectral_rates::{
    Basis, CoefficientSeries, SingularFunctionSpec, SingularityKind, SmoothFactor,
};

use crate::table::{fmt_f64, Table};
use crate::{CliError, CliResult, FamilyArg, SmoothArg};

pub const COEFF_HEADER: [&str; 5] = [
    "n",
    "coeff_normalized",
    "coeff_raw_log10",
    "err_est",
    "gated",
];

pub(crate) fn smooth_factor(arg: SmoothArg) -> SmoothFactor {
    match arg {
        SmoothArg::One => SmoothFactor::One,
        SmoothArg::ExpNeg => SmoothFactor::ExpNeg,
        SmoothArg::Lorentzian => SmoothFactor::Lorentzian,
    }
}

fn smooth_from_name(name: &str) -> CliResult<SmoothFactor> {
    [
        SmoothFactor::One,
        SmoothFactor::ExpNeg,
        SmoothFactor::Lorentzian,
    ]
    .into_iter()
    .find(|g| g.name() == name)
    .ok_or_else(|| CliError::usage(format!("unknown smooth factor `{name}`")))
}

pub(crate) fn family_name(kind: SingularityKind) -> &'static str {
    match kind {
        SingularityKind::LaguerreEndpoint => "laguerre-endpoint",
        SingularityKind::LaguerreInterior { .. } => "laguerre-interior",
        SingularityKind::HermiteInterior { .. } => "hermite-interior",
    }
}

pub(crate) fn build_spec(
    family: FamilyArg,
    exponent: f64,
    mu: u32,
    location: f64,
) -> SingularFunctionSpec {
    match family {
        FamilyArg::LaguerreEndpoint => SingularFunctionSpec::laguerre_endpoint(exponent, mu),
        FamilyArg::LaguerreInterior => {
            SingularFunctionSpec::laguerre_interior(location, exponent, mu)
        }
        FamilyArg::HermiteInterior => {
            SingularFunctionSpec::hermite_interior(location, exponent, mu)
        }
    }
}

pub(crate) fn basis_for(spec: &SingularFunctionSpec, alpha: f64) -> Basis {
    match spec.kind {
        SingularityKind::HermiteInterior { .. } => Basis::Hermite,
        _ => Basis::Laguerre { alpha },
    }
}

pub(crate) fn alpha_of(basis: Basis) -> Option<f64> {
    match basis {
        Basis::Laguerre { alpha } => Some(alpha),
        Basis::Hermite => None,
    }
}

pub(crate) fn compute_series(
    spec: &SingularFunctionSpec,
    basis: Basis,
    degrees: &[usize],
    tol: f64,
) -> CliResult<CoefficientSeries> {
    Ok(match basis {
        Basis::Laguerre { alpha } => laguerre_coeffs(spec, alpha, degrees, tol)?,
        Basis::Hermite => hermite_coeffs(spec, degrees, tol)?,
    })
}

/// Parameter lines shared by every table derived from one function.
pub(crate) fn spec_meta(t: &mut Table, spec: &SingularFunctionSpec, basis: Basis, tol: f64) {
    t.meta("family", family_name(spec.kind));
    if let Basis::Laguerre { alpha } = basis {
        t.meta("alpha", alpha);
    }
    t.meta("exponent", spec.exponent)
        .meta("mu", spec.log_power)
        .meta("location", spec.location())
        .meta("smooth", spec.smooth_factor.name())
        .meta("tol", format!("{tol:e}"));
}

/// Inverse of [`spec_meta`].
pub(crate) fn spec_from_meta(
    meta: &BTreeMap<String, String>,
) -> CliResult<Option<(SingularFunctionSpec, Basis)>> {
    let Some(family) = meta.get("family") else {
        return Ok(None);
    };
    let num = |key: &str| -> CliResult<f64> {
        meta.get(key)
            .ok_or_else(|| CliError::usage(format!("meta key `{key}` missing")))?
            .parse()
            .map_err(|_| CliError::usage(format!("meta key `{key}` is not a number")))
    };
    let family = match family.as_str() {
        "laguerre-endpoint" => FamilyArg::LaguerreEndpoint,
        "laguerre-interior" => FamilyArg::LaguerreInterior,
        "hermite-interior" => FamilyArg::HermiteInterior,
        other => return Err(CliError::usage(format!("unknown family `{other}` in meta"))),
    };
    let mu = num("mu")?;
    if mu < 0.0 || mu.fract() != 0.0 {
        return Err(CliError::usage(
            "meta key `mu` must be a non-negative integer",
        ));
    }
    let mut spec = build_spec(
        family,
        num("exponent")?,
        mu as u32,
        num("location").unwrap_or(0.0),
    );
    if let Some(g) = meta.get("smooth") {
        spec = spec.with_smooth_factor(smooth_from_name(g)?);
    }
    let alpha = if family == FamilyArg::HermiteInterior {
        0.0
    } else {
        num("alpha")?
    };
    let basis = basis_for(&spec, alpha);
    Ok(Some((spec, basis)))
}

pub(crate) fn coefficient_table(series: &CoefficientSeries) -> Table {
    let mut t = Table::new(&COEFF_HEADER);
    for i in 0..series.len() {
        t.push(vec![
            series.n_values[i].to_string(),
            fmt_f64(series.coeff_normalized[i]),
            fmt_f64(series.raw_log10(i)),
            fmt_f64(series.err_est[i]),
            series.gated(i).to_string(),
        ]);
    }
    t
}

pub(crate) fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";")
}
