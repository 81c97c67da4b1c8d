//! Degree-range syntax: `lo:hi`, `lo:hi:step`, `lo:hi:dyadic`, `n1,n2,...`.

use spectral_rates::asymptotics::dyadic;

use crate::{CliError, CliResult};

/// Whether a range names dyadic centres, which interior families expand
/// into envelope windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeRange {
    pub values: Vec<usize>,
    pub dyadic: bool,
}

fn num(s: &str, spec: &str) -> CliResult<usize> {
    s.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("bad degree `{s}` in range `{spec}`")))
}

pub fn parse_degrees(spec: &str) -> CliResult<DegreeRange> {
    let parts: Vec<&str> = spec.split(':').collect();
    let (values, is_dyadic) = match parts.as_slice() {
        [single] => {
            let mut v = single
                .split(',')
                .map(|s| num(s, spec))
                .collect::<CliResult<Vec<_>>>()?;
            v.sort_unstable();
            v.dedup();
            (v, false)
        }
        [lo, hi] => ((num(lo, spec)?..=num(hi, spec)?).collect(), false),
        [lo, hi, "dyadic"] => (dyadic(num(lo, spec)?, num(hi, spec)?), true),
        [lo, hi, step] => {
            let step = num(step, spec)?;
            if step == 0 {
                return Err(CliError::usage(format!("zero step in range `{spec}`")));
            }
            (
                (num(lo, spec)?..=num(hi, spec)?).step_by(step).collect(),
                false,
            )
        }
        _ => return Err(CliError::usage(format!("unrecognized range `{spec}`"))),
    };
    if values.is_empty() {
        return Err(CliError::usage(format!("range `{spec}` is empty")));
    }
    Ok(DegreeRange {
        values,
        dyadic: is_dyadic,
    })
}

/// `lo:hi` with real endpoints.
pub fn parse_window(spec: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::usage(format!("window must be `lo:hi`, got `{spec}`"));
    let (lo, hi) = spec.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}
