//! Fixtures shared by the benchmarks.

use spectral_rates::SingularFunctionSpec;

/// `x^{1.2} ln³x`, the endpoint case of the coefficient figures.
pub fn endpoint_spec() -> SingularFunctionSpec {
    SingularFunctionSpec::laguerre_endpoint(1.2, 3)
}

/// `|x − 0.3|^{1.2} ln²|x − 0.3|`.
pub fn interior_spec() -> SingularFunctionSpec {
    SingularFunctionSpec::laguerre_interior(0.3, 1.2, 2)
}

/// `|x − 3|^{1.2} ln²|x − 3|` on the real line.
pub fn hermite_spec() -> SingularFunctionSpec {
    SingularFunctionSpec::hermite_interior(3.0, 1.2, 2)
}
