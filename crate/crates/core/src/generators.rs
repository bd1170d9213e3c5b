//! Infinitesimal generators, their half-plane conjugates and the Cayley map.
//!
//! Every evaluation near the Denjoy–Wolff point goes through the gap
//! `g = 1 - z` and the normalized symbol `N(g) = f / g^(1+α)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used when comparing `|arg a|` with the admissible sector.
pub const ARG_TOLERANCE: f64 = 1e-12;

/// Holomorphic remainder `R(z)` added to the two leading terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RemainderKind {
    Zero,
    /// `c (1-z)^(1+γ)` with `γ > α + β`.
    ExtraPower { c: C64, gamma: f64 },
    /// `f(z) = (1-z)^2 / (4 + i(1-z)^2)`; forces `(a, α, b, β) = (1/4, 1, -i/16, 2)`.
    #[serde(rename = "rational_example_1")]
    RationalExample1,
}

impl Default for RemainderKind {
    fn default() -> Self {
        RemainderKind::Zero
    }
}

/// Raw parameters as they appear in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub a: C64,
    pub alpha: f64,
    pub b: C64,
    pub beta: f64,
    #[serde(default)]
    pub remainder: RemainderKind,
}

/// `A = 2^α a`, `B = 2^(α+β) b`, `λ = α A`, `μ = B / A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    #[serde(rename = "A")]
    pub a_cap: C64,
    #[serde(rename = "B")]
    pub b_cap: C64,
    pub lambda: C64,
    pub mu: C64,
}

/// A validated generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorParams", into = "GeneratorParams")]
pub struct GeneratorSpec {
    params: GeneratorParams,
    consts: DerivedConstants,
    tangential: bool,
}

impl TryFrom<GeneratorParams> for GeneratorSpec {
    type Error = Error;

    fn try_from(params: GeneratorParams) -> Result<Self> {
        GeneratorSpec::new(params)
    }
}

impl From<GeneratorSpec> for GeneratorParams {
    fn from(spec: GeneratorSpec) -> Self {
        spec.params
    }
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl GeneratorSpec {
    pub fn new(params: GeneratorParams) -> Result<Self> {
        let GeneratorParams { a, alpha, b, beta, ref remainder } = params;
        let mut problems = Vec::new();
        if !finite(a) || a == C64::new(0.0, 0.0) {
            problems.push("a must be finite and nonzero".to_string());
        }
        if !finite(b) {
            problems.push("b must be finite".to_string());
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            problems.push(format!("alpha = {alpha} is outside (0, 2]"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            problems.push(format!("beta = {beta} must be positive"));
        }
        let mut tangential = false;
        if problems.is_empty() {
            let bound = FRAC_PI_2 * alpha.min(2.0 - alpha);
            let arg = a.arg().abs();
            if arg > bound + ARG_TOLERANCE {
                problems.push(format!(
                    "|arg a| = {arg} exceeds the admissible sector bound {bound}"
                ));
            }
            tangential = arg >= FRAC_PI_2 * alpha - ARG_TOLERANCE;
        }
        match remainder {
            RemainderKind::Zero => {}
            RemainderKind::ExtraPower { c, gamma } => {
                if !finite(*c) {
                    problems.push("remainder coefficient c must be finite".to_string());
                }
                if !(gamma.is_finite() && *gamma > alpha + beta) {
                    problems.push(format!(
                        "remainder exponent gamma = {gamma} must exceed alpha + beta = {}",
                        alpha + beta
                    ));
                }
            }
            RemainderKind::RationalExample1 => {
                let close = |x: C64, y: C64| (x - y).norm() <= 1e-12;
                if !(close(a, C64::new(0.25, 0.0))
                    && (alpha - 1.0).abs() <= 1e-12
                    && close(b, C64::new(0.0, -1.0 / 16.0))
                    && (beta - 2.0).abs() <= 1e-12)
                {
                    problems.push(
                        "rational_example_1 requires (a, alpha, b, beta) = (1/4, 1, -i/16, 2)"
                            .to_string(),
                    );
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidGenerator(problems.join("; ")));
        }
        let a_cap = a * 2f64.powf(alpha);
        let b_cap = b * 2f64.powf(alpha + beta);
        let consts = DerivedConstants {
            a_cap,
            b_cap,
            lambda: a_cap * alpha,
            mu: b_cap / a_cap,
        };
        Ok(GeneratorSpec { params, consts, tangential })
    }

    /// Two-term generator with zero remainder.
    pub fn two_term(a: C64, alpha: f64, b: C64, beta: f64) -> Result<Self> {
        Self::new(GeneratorParams { a, alpha, b, beta, remainder: RemainderKind::Zero })
    }

    /// `f(z) = (1-z)^2 / (4 + i(1-z)^2)`.
    pub fn rational_example() -> Self {
        Self::new(GeneratorParams {
            a: C64::new(0.25, 0.0),
            alpha: 1.0,
            b: C64::new(0.0, -1.0 / 16.0),
            beta: 2.0,
            remainder: RemainderKind::RationalExample1,
        })
        .expect("rational example parameters are valid")
    }

    pub fn params(&self) -> &GeneratorParams {
        &self.params
    }

    pub fn a(&self) -> C64 {
        self.params.a
    }

    pub fn b(&self) -> C64 {
        self.params.b
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn beta(&self) -> f64 {
        self.params.beta
    }

    pub fn remainder(&self) -> &RemainderKind {
        &self.params.remainder
    }

    pub fn constants(&self) -> DerivedConstants {
        self.consts
    }

    pub fn lambda(&self) -> C64 {
        self.consts.lambda
    }

    pub fn mu(&self) -> C64 {
        self.consts.mu
    }

    /// `|arg a| = πα/2` (only possible for `α ≤ 1`).
    pub fn is_tangential(&self) -> bool {
        self.tangential
    }

    /// No second term and no remainder: `f = a(1-z)^(1+α)`.
    pub fn is_pure_power(&self) -> bool {
        self.params.b == C64::new(0.0, 0.0)
            && matches!(self.params.remainder, RemainderKind::Zero)
    }

    /// Remainders satisfying the strong decay hypothesis: `γ > 2α`.
    pub fn has_strong_remainder(&self) -> bool {
        match self.params.remainder {
            RemainderKind::Zero => true,
            RemainderKind::ExtraPower { gamma, .. } => gamma > 2.0 * self.params.alpha,
            RemainderKind::RationalExample1 => true,
        }
    }

    /// Exponents `e` such that `N(g) - a` expands in powers `g^e`.
    pub(crate) fn excess_exponents(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match self.params.remainder {
            RemainderKind::Zero => {
                if self.params.b != C64::new(0.0, 0.0) {
                    out.push(self.params.beta);
                }
            }
            RemainderKind::ExtraPower { c, gamma } => {
                if self.params.b != C64::new(0.0, 0.0) {
                    out.push(self.params.beta);
                }
                if c != C64::new(0.0, 0.0) {
                    out.push(gamma - self.params.alpha);
                }
            }
            RemainderKind::RationalExample1 => out.push(2.0),
        }
        out
    }

    /// `N(g) = f(1-g) / g^(1+α)`.
    pub fn normalized(&self, g: C64) -> C64 {
        match self.params.remainder {
            RemainderKind::RationalExample1 => 1.0 / (4.0 + C64::i() * g * g),
            _ => self.params.a + self.normalized_excess(g),
        }
    }

    /// `N(g) - a`, evaluated without cancellation.
    pub fn normalized_excess(&self, g: C64) -> C64 {
        let p = &self.params;
        match p.remainder {
            RemainderKind::Zero => p.b * g.powf(p.beta),
            RemainderKind::ExtraPower { c, gamma } => {
                p.b * g.powf(p.beta) + c * g.powf(gamma - p.alpha)
            }
            RemainderKind::RationalExample1 => {
                let g2 = g * g;
                -C64::i() * g2 / (4.0 * (4.0 + C64::i() * g2))
            }
        }
    }

    /// `dN/dg`.
    pub fn normalized_derivative(&self, g: C64) -> C64 {
        let p = &self.params;
        match p.remainder {
            RemainderKind::Zero => p.b * p.beta * g.powf(p.beta - 1.0),
            RemainderKind::ExtraPower { c, gamma } => {
                p.b * p.beta * g.powf(p.beta - 1.0)
                    + c * (gamma - p.alpha) * g.powf(gamma - p.alpha - 1.0)
            }
            RemainderKind::RationalExample1 => {
                let d = 4.0 + C64::i() * g * g;
                -2.0 * C64::i() * g / (d * d)
            }
        }
    }

    /// `f` at the point `1 - g`.
    pub fn f_at_gap(&self, g: C64) -> C64 {
        g.powf(1.0 + self.params.alpha) * self.normalized(g)
    }

    /// `f'` at the point `1 - g`.
    pub fn f_prime_at_gap(&self, g: C64) -> C64 {
        let al = self.params.alpha;
        -((1.0 + al) * g.powf(al) * self.normalized(g)
            + g.powf(1.0 + al) * self.normalized_derivative(g))
    }

    /// `p(z) = f(z) / (1-z)^2` at the point `1 - g`.
    pub fn p_at_gap(&self, g: C64) -> C64 {
        self.normalized(g) * g.powf(self.params.alpha - 1.0)
    }

    pub fn eval_f(&self, z: C64) -> Result<C64> {
        check_disk(z)?;
        Ok(self.f_at_gap(1.0 - z))
    }

    pub fn eval_f_prime(&self, z: C64) -> Result<C64> {
        check_disk(z)?;
        Ok(self.f_prime_at_gap(1.0 - z))
    }

    pub fn eval_p(&self, z: C64) -> Result<C64> {
        check_disk(z)?;
        Ok(self.p_at_gap(1.0 - z))
    }

    /// Conjugate generator on the right half-plane.
    pub fn half_plane(&self) -> HalfPlaneGenerator<'_> {
        HalfPlaneGenerator { spec: self }
    }

    /// Same generator with `b` replaced by `b + c`, i.e. `f + c(1-z)^(1+α+β)`.
    pub fn perturbed(&self, c: C64) -> Result<Self> {
        let mut params = self.params.clone();
        if matches!(params.remainder, RemainderKind::RationalExample1) {
            return Err(Error::InvalidArgument(
                "the rational example cannot be perturbed in place".into(),
            ));
        }
        params.b += c;
        Self::new(params)
    }
}

fn check_disk(z: C64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::outside(z, "unit disk"));
    }
    Ok(())
}

/// `φ(w) = C'(C⁻¹ w) f(C⁻¹ w)` on `Re w > 0`.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlaneGenerator<'a> {
    spec: &'a GeneratorSpec,
}

impl HalfPlaneGenerator<'_> {
    /// `φ(w) = 2^α N(2/(w+1)) (w+1)^(1-α)`.
    pub fn eval(&self, w: C64) -> Result<C64> {
        if !(w.re > 0.0) || !finite(w) {
            return Err(Error::outside(w, "right half-plane"));
        }
        Ok(self.eval_shifted(w + 1.0))
    }

    /// `φ` expressed through `s = w + 1`.
    pub fn eval_shifted(&self, s: C64) -> C64 {
        let al = self.spec.alpha();
        2f64.powf(al) * self.spec.normalized(2.0 / s) * s.powf(1.0 - al)
    }

    /// `(A, B)` of the expansion `φ(w) = A(w+1)^(1-α) + B(w+1)^(1-α-β) + ...`.
    pub fn coefficients(&self) -> (C64, C64) {
        (self.spec.consts.a_cap, self.spec.consts.b_cap)
    }
}

/// `C(z) = (1+z)/(1-z)`.
pub fn cayley(z: C64) -> Result<C64> {
    check_disk(z)?;
    Ok((1.0 + z) / (1.0 - z))
}

/// `C⁻¹(w) = (w-1)/(w+1)`.
pub fn cayley_inverse(w: C64) -> Result<C64> {
    if !(w.re > 0.0) || !finite(w) {
        return Err(Error::outside(w, "right half-plane"));
    }
    Ok((w - 1.0) / (w + 1.0))
}

/// Sampling pattern for [`validate_admissibility`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityGrid {
    /// Uniform radii in `(0, 1)`.
    pub radial: usize,
    /// Angles on each circle.
    pub angular: usize,
    /// Extra samples hugging the Denjoy–Wolff point and the unit circle.
    pub boundary_refinement: usize,
}

impl Default for AdmissibilityGrid {
    fn default() -> Self {
        AdmissibilityGrid { radial: 48, angular: 96, boundary_refinement: 40 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub min_re_p: f64,
    pub argmin: C64,
    pub max_abs_p: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Samples `Re p` over the disk; `p` must have nonnegative real part.
pub fn validate_admissibility(
    gen: &GeneratorSpec,
    grid: &AdmissibilityGrid,
) -> AdmissibilityReport {
    let mut gaps = Vec::new();
    let na = grid.angular.max(4);
    let mut radii: Vec<f64> = (1..=grid.radial).map(|i| i as f64 / (grid.radial + 1) as f64).collect();
    for k in 1..=grid.boundary_refinement.min(13) {
        radii.push(1.0 - 10f64.powi(-(k as i32)));
    }
    gaps.push(C64::new(1.0, 0.0));
    for &r in &radii {
        for j in 0..na {
            let th = 2.0 * PI * (j as f64 + 0.5) / na as f64;
            gaps.push(1.0 - C64::from_polar(r, th));
        }
    }
    // Near z = 1 the disk looks like the half-plane `Re g > |g|^2 / 2`.
    let nb = grid.boundary_refinement.max(2);
    for i in 0..nb {
        let eps = 10f64.powf(-12.0 * i as f64 / (nb - 1) as f64);
        for j in 0..na {
            let th = -FRAC_PI_2 + PI * (j as f64 + 0.5) / na as f64;
            let limit = 2.0 * th.cos();
            let r = eps.min(limit * (1.0 - 1e-9));
            if r > 0.0 {
                gaps.push(C64::from_polar(r, th));
            }
        }
    }
    let mut min_re = f64::INFINITY;
    let mut argmin = C64::new(0.0, 0.0);
    let mut max_abs: f64 = 0.0;
    for &g in &gaps {
        let p = gen.p_at_gap(g);
        max_abs = max_abs.max(p.norm());
        if p.re < min_re {
            min_re = p.re;
            argmin = 1.0 - g;
        }
    }
    AdmissibilityReport {
        min_re_p: min_re,
        argmin,
        max_abs_p: max_abs,
        samples: gaps.len(),
        pass: min_re >= -1e-12 * max_abs.max(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn derived_constants_of_two_term_generator() {
        let g = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 1.0), 0.5).unwrap();
        let k = g.constants();
        assert!((k.a_cap - c(2.0, 0.0)).norm() < 1e-15);
        assert!((k.lambda - c(2.0, 0.0)).norm() < 1e-15);
        assert!((k.mu - c(0.0, 2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GeneratorSpec::two_term(c(0.0, 0.0), 1.0, c(1.0, 0.0), 1.0).is_err());
        assert!(GeneratorSpec::two_term(c(1.0, 0.0), 2.5, c(1.0, 0.0), 1.0).is_err());
        assert!(GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(1.0, 0.0), 0.0).is_err());
        // |arg a| = π/2 with α = 0.5 exceeds the sector bound π/4.
        assert!(GeneratorSpec::two_term(c(0.0, 1.0), 0.5, c(1.0, 0.0), 1.0).is_err());
        let bad_gamma = GeneratorParams {
            a: c(1.0, 0.0),
            alpha: 1.0,
            b: c(1.0, 0.0),
            beta: 0.5,
            remainder: RemainderKind::ExtraPower { c: c(1.0, 0.0), gamma: 1.5 },
        };
        assert!(GeneratorSpec::new(bad_gamma).is_err());
    }

    #[test]
    fn sector_boundary_is_tangential() {
        let a = C64::from_polar(1.0, FRAC_PI_2 * 0.5);
        let g = GeneratorSpec::two_term(a, 0.5, c(0.1, 0.0), 1.0).unwrap();
        assert!(g.is_tangential());
        let g = GeneratorSpec::two_term(c(1.0, 0.0), 0.5, c(0.1, 0.0), 1.0).unwrap();
        assert!(!g.is_tangential());
    }

    #[test]
    fn rational_example_matches_closed_form() {
        let g = GeneratorSpec::rational_example();
        for &z in &[c(0.0, 0.0), c(0.3, -0.4), c(0.9, 0.05)] {
            let w = 1.0 - z;
            let exact = w * w / (4.0 + C64::i() * w * w);
            assert!((g.eval_f(z).unwrap() - exact).norm() < 1e-15);
            let h = 1e-6;
            let fd = (g.eval_f(z + h).unwrap() - g.eval_f(z - h).unwrap()) / (2.0 * h);
            assert!((g.eval_f_prime(z).unwrap() - fd).norm() < 1e-8);
        }
        let wrong = GeneratorParams {
            a: c(1.0, 0.0),
            alpha: 1.0,
            b: c(0.0, 0.0),
            beta: 2.0,
            remainder: RemainderKind::RationalExample1,
        };
        assert!(GeneratorSpec::new(wrong).is_err());
    }

    #[test]
    fn half_plane_conjugate_identity() {
        let g = GeneratorSpec::two_term(c(1.0, 0.2), 1.5, c(0.1, 0.3), 0.7).unwrap();
        for &z in &[c(0.1, 0.2), c(-0.5, 0.3), c(0.95, -0.01)] {
            let w = cayley(z).unwrap();
            let lhs = g.half_plane().eval(w).unwrap();
            let rhs = 2.0 * g.eval_f(z).unwrap() / ((1.0 - z) * (1.0 - z));
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn pure_quadratic_is_constant_in_half_plane() {
        let g = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 0.0), 1.0).unwrap();
        for &w in &[c(0.1, 0.0), c(3.0, -7.0), c(1e6, 1e3)] {
            assert!((g.half_plane().eval(w).unwrap() - c(2.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn cayley_round_trip() {
        for &z in &[c(0.0, 0.0), c(0.5, -0.5), c(-0.9, 0.1)] {
            let back = cayley_inverse(cayley(z).unwrap()).unwrap();
            assert!((back - z).norm() < 1e-14);
        }
        assert!(cayley(c(1.0, 0.0)).is_err());
        assert!(cayley_inverse(c(-0.1, 0.0)).is_err());
    }

    #[test]
    fn admissibility_flags_large_second_term() {
        let good = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 1.0), 0.5).unwrap();
        assert!(validate_admissibility(&good, &AdmissibilityGrid::default()).pass);
        let bad = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 100.0), 0.5).unwrap();
        let report = validate_admissibility(&bad, &AdmissibilityGrid::default());
        assert!(!report.pass);
        assert!(report.min_re_p < 0.0);
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{"a":[1,0],"alpha":1,"b":[0,1],"beta":0.5,"remainder":{"kind":"zero"}}"#;
        let g: GeneratorSpec = serde_json::from_str(text).unwrap();
        assert_eq!(g.b(), c(0.0, 1.0));
        let back: GeneratorSpec = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        let text = r#"{"a":[0.25,0],"alpha":1,"b":[0,-0.0625],"beta":2,"remainder":{"kind":"rational_example_1"}}"#;
        let g: GeneratorSpec = serde_json::from_str(text).unwrap();
        assert!(matches!(g.remainder(), RemainderKind::RationalExample1));
        let text = r#"{"a":[1,0],"alpha":1,"b":[0,1],"beta":0.5,"remainder":{"kind":"extra_power","c":[0.1,0],"gamma":3}}"#;
        assert!(serde_json::from_str::<GeneratorSpec>(text).is_ok());
        let text = r#"{"a":[0,0],"alpha":1,"b":[0,1],"beta":0.5}"#;
        assert!(serde_json::from_str::<GeneratorSpec>(text).is_err());
    }
}
