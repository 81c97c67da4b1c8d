use std::io::Write;
use std::path::Path;

use spectral_rates::asymptotics::{envelope_degrees, predict_rate};
use spectral_rates::{SingularityKind, Target};

use super::{
    alpha_of, basis_for, build_spec, coefficient_table, compute_series, join, smooth_factor,
    spec_meta,
};
use crate::range::parse_degrees;
use crate::table::write_atomic;
use crate::{CliError, CliResult, CoeffsArgs};

pub fn run(args: &CoeffsArgs, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    let spec = build_spec(args.family, args.exponent, args.mu, args.location)
        .with_smooth_factor(smooth_factor(args.smooth));
    spec.validate()?;
    let basis = basis_for(&spec, args.alpha);
    let hermite = alpha_of(basis).is_none();
    let prediction = predict_rate(
        &spec,
        alpha_of(basis),
        Target::Coefficient {
            normalized: hermite,
        },
    )?;

    let range = parse_degrees(&args.n)?;
    let interior = !matches!(spec.kind, SingularityKind::LaguerreEndpoint);
    let centres = (interior && range.dyadic && !args.no_envelope).then(|| range.values.clone());
    let degrees = match &centres {
        Some(c) => envelope_degrees(&spec, basis, c),
        None => range.values.clone(),
    };
    let series = compute_series(&spec, basis, &degrees, args.tol)?;

    let mut t = coefficient_table(&series);
    t.meta("command", "coeffs");
    spec_meta(&mut t, &spec, basis, args.tol);
    t.meta("n", &args.n);
    if let Some(c) = &centres {
        t.meta("envelope_centres", join(c));
    }
    t.meta("theorem", prediction.source)
        .meta("target", prediction.target)
        .meta("predicted_p", prediction.exponent_p)
        .meta("log_power", prediction.log_power);
    let bytes = t.to_bytes()?;

    match out {
        Some(path) => {
            let path = if path.is_dir() {
                path.join("coeffs.csv")
            } else {
                path.to_path_buf()
            };
            write_atomic(&path, &bytes)
        }
        None => stdout.write_all(&bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}
