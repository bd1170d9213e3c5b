#![allow(dead_code)]

use parabolic::generators::{GeneratorParams, GeneratorSpec, RemainderKind};
use parabolic::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn two_term(a: C64, alpha: f64, b: C64, beta: f64) -> GeneratorSpec {
    GeneratorSpec::two_term(a, alpha, b, beta).expect("valid generator")
}

/// `f(z) = (1-z)^2`.
pub fn pure_quadratic() -> GeneratorSpec {
    two_term(c(1.0, 0.0), 1.0, c(0.0, 0.0), 1.0)
}

/// `f(z) = (1-z)^2 + i(1-z)^(5/2)`: `λ = 2`, `μ = i√2`.
pub fn one_sided() -> GeneratorSpec {
    two_term(c(1.0, 0.0), 1.0, c(0.0, 1.0), 0.5)
}

pub fn with_remainder(a: C64, alpha: f64, b: C64, beta: f64, rc: C64, gamma: f64) -> GeneratorSpec {
    GeneratorSpec::new(GeneratorParams {
        a,
        alpha,
        b,
        beta,
        remainder: RemainderKind::ExtraPower { c: rc, gamma },
    })
    .expect("valid generator")
}

/// Pure power, one two-term generator per regime, a strong remainder,
/// the rational example and the one-sided generator `(1-z)^2 + i(1-z)^2.5`.
pub fn matrix() -> Vec<(&'static str, GeneratorSpec)> {
    vec![
        ("pure_quadratic", pure_quadratic()),
        ("pure_rotated", two_term(C64::from_polar(1.0, 0.3), 1.5, c(0.0, 0.0), 1.0)),
        ("beta_less", two_term(c(1.0, 0.0), 1.5, c(0.0, 0.3), 0.5)),
        ("beta_equal", two_term(c(1.0, 0.0), 1.0, c(0.3, 0.0), 1.0)),
        ("beta_greater", two_term(c(1.0, 0.0), 1.5, c(0.2, 0.1), 2.0)),
        ("extra_power", with_remainder(c(1.0, 0.0), 1.0, c(0.1, 0.0), 0.75, c(0.05, 0.02), 2.6)),
        ("rational", GeneratorSpec::rational_example()),
        ("one_sided", one_sided()),
    ]
}

/// Initial points in the disk used across the generator matrix.
pub fn disk_points() -> Vec<C64> {
    vec![c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.4), c(-0.5, 0.2), c(0.2, -0.6)]
}
