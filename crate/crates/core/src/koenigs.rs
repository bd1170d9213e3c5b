//! Kœnigs functions `h` (disk) and `σ` (half-plane) and their normalized
//! versions `h₁`, `σ₁`.
//!
//! `h(z) = ∫₀^z dζ/f(ζ)` solves `h(F_t(z)) = h(z) + t`. The leading part
//! `((1-z)^(-α) - 1)/(αa)` is integrated in closed form; only the remainder
//! `1/f - 1/(a(1-ζ)^(1+α))` goes through quadrature. Its integral up to the
//! Denjoy–Wolff point defines `c₁` whenever it converges, i.e. for `β > α`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{estimate_limit_with, TailModel};
use crate::flow::{flow_gap_at, half_plane_flow_at};
use crate::generators::GeneratorSpec;
use crate::quad::{integrate, integrate_segment, QuadTol};
use crate::series::lattice_exponents;

/// Value with an error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: C64,
    pub error: f64,
}

pub struct KoenigsEvaluator {
    gen: GeneratorSpec,
    tol: QuadTol,
    c1: Option<Estimate>,
    c1_half_plane: Option<Estimate>,
}

impl std::fmt::Debug for KoenigsEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KoenigsEvaluator")
            .field("gen", &self.gen)
            .field("c1", &self.c1)
            .finish()
    }
}

impl KoenigsEvaluator {
    /// Builds the evaluator and, when `β > α`, both normalization constants.
    pub fn new(gen: &GeneratorSpec, tol: QuadTol) -> Result<Self> {
        let mut ev = KoenigsEvaluator { gen: gen.clone(), tol, c1: None, c1_half_plane: None };
        if ev.normalizable() {
            ev.c1 = Some(ev.compute_c1_disk()?);
            ev.c1_half_plane = Some(ev.compute_c1_half_plane()?);
        }
        Ok(ev)
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.gen
    }

    pub fn tolerance(&self) -> &QuadTol {
        &self.tol
    }

    /// The remainder of `1/f` is integrable up to the Denjoy–Wolff point.
    pub fn normalizable(&self) -> bool {
        let exps = self.gen.excess_exponents();
        exps.iter().all(|e| *e > self.gen.alpha() + 1e-12)
    }

    /// Powers of the distance to the Denjoy–Wolff point in the tail of `c₁`.
    fn tail_exponents(&self) -> Vec<f64> {
        let al = self.gen.alpha();
        let exps = self.gen.excess_exponents();
        if exps.is_empty() {
            return Vec::new();
        }
        let min = exps.iter().copied().fold(f64::INFINITY, f64::min);
        lattice_exponents(&exps, al, 0.0, (min - al) + 6.0, 5, false)
    }

    /// `1/f - 1/(a g^(1+α))` at gap `g`.
    fn remainder_disk(&self, g: C64) -> C64 {
        let al = self.gen.alpha();
        let n = self.gen.normalized(g);
        -g.powf(-1.0 - al) * self.gen.normalized_excess(g) / (self.gen.a() * n)
    }

    /// `1/φ(v) - (v+1)^(α-1)/A` at `s = v + 1`.
    fn remainder_half_plane(&self, s: C64) -> C64 {
        let al = self.gen.alpha();
        let g = 2.0 / s;
        let n = self.gen.normalized(g);
        -g.powf(1.0 - al) * self.gen.normalized_excess(g) / (2.0 * self.gen.a() * n)
    }

    fn extrapolated(&self, samples: Vec<(f64, C64)>, quad_err: f64) -> Result<Estimate> {
        let ps = self.tail_exponents();
        let est = estimate_limit_with(&samples, &TailModel::Exponents(ps))?;
        if est.divergent {
            return Err(Error::Unreliable("normalization integral did not settle".into()));
        }
        Ok(Estimate { value: est.value, error: est.error + quad_err })
    }

    /// `c₁ = ∫₀¹ (1/f(s) - 1/(a(1-s)^(α+1))) ds`, integrated on `[0, 1-δ]`
    /// and extrapolated to `δ = 0`.
    fn compute_c1_disk(&self) -> Result<Estimate> {
        if self.gen.excess_exponents().is_empty() {
            return Ok(Estimate { value: C64::new(0.0, 0.0), error: 0.0 });
        }
        let mut samples = Vec::new();
        let mut acc = C64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut upper = 1.0;
        for k in 0..24 {
            let delta = 1e-2 * 0.5f64.powi(k);
            let piece = integrate(|g| self.remainder_disk(C64::new(g, 0.0)), delta, upper, &self.tol)?;
            acc += piece.value;
            err += piece.error;
            upper = delta;
            samples.push((1.0 / delta, acc));
        }
        self.extrapolated(samples, err)
    }

    /// Half-plane route: `∫₁^∞ (1/φ(v) - (v+1)^(α-1)/A) dv`, truncated at `V`
    /// and extrapolated in `V + 1 → ∞`.
    fn compute_c1_half_plane(&self) -> Result<Estimate> {
        if self.gen.excess_exponents().is_empty() {
            return Ok(Estimate { value: C64::new(0.0, 0.0), error: 0.0 });
        }
        let mut samples = Vec::new();
        let mut acc = C64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut lower = 1.0;
        for k in 0..24 {
            let v_max = 100.0 * 2f64.powi(k);
            let piece = integrate(
                |v| self.remainder_half_plane(C64::new(v + 1.0, 0.0)),
                lower,
                v_max,
                &self.tol,
            )?;
            acc += piece.value;
            err += piece.error;
            lower = v_max;
            samples.push((v_max + 1.0, acc));
        }
        self.extrapolated(samples, err)
    }

    pub fn c1(&self) -> Result<Estimate> {
        self.c1.ok_or_else(|| {
            Error::RegimeMismatch("c1 needs the remainder of 1/f to be integrable (beta > alpha)".into())
        })
    }

    /// The same constant obtained independently in the half-plane.
    pub fn c1_half_plane(&self) -> Result<Estimate> {
        self.c1_half_plane.ok_or_else(|| {
            Error::RegimeMismatch("c1 needs the remainder of 1/f to be integrable (beta > alpha)".into())
        })
    }

    fn check_gap(g: C64) -> Result<()> {
        let z = 1.0 - g;
        if !(z.norm() < 1.0) || g == C64::new(0.0, 0.0) {
            return Err(Error::outside(z, "unit disk"));
        }
        Ok(())
    }

    /// `h(1 - g)`, integrating along the chord from 0 parametrized from its far end.
    pub fn h_at_gap(&self, g: C64) -> Result<C64> {
        Self::check_gap(g)?;
        let al = self.gen.alpha();
        let z = 1.0 - g;
        let leading = (g.powf(-al) - 1.0) / (al * self.gen.a());
        let rest = integrate(|r| self.remainder_disk(g + z * r) * z, 0.0, 1.0, &self.tol)?;
        Ok(leading + rest.value)
    }

    pub fn h(&self, z: C64) -> Result<C64> {
        self.h_at_gap(1.0 - z)
    }

    /// `h₁(z) = h(z) + 2^α/λ - c₁`.
    pub fn h1_at_gap(&self, g: C64) -> Result<C64> {
        let c1 = self.c1()?.value;
        Self::check_gap(g)?;
        let al = self.gen.alpha();
        let z = 1.0 - g;
        let leading = g.powf(-al) / (al * self.gen.a());
        let rest = integrate(|r| self.remainder_disk(g + z * r) * z, 0.0, 1.0, &self.tol)?;
        Ok(leading + rest.value - c1)
    }

    pub fn h1(&self, z: C64) -> Result<C64> {
        self.h1_at_gap(1.0 - z)
    }

    fn check_half_plane(w: C64) -> Result<()> {
        if !(w.re > 0.0 && w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::outside(w, "right half-plane"));
        }
        Ok(())
    }

    fn sigma_rest(&self, w: C64) -> Result<C64> {
        let one = C64::new(1.0, 0.0);
        Ok(integrate_segment(|v| self.remainder_half_plane(v + 1.0), one, w, &self.tol)?.value)
    }

    /// `σ(w) = ∫₁^w dv/φ(v)` along the segment from 1.
    pub fn sigma(&self, w: C64) -> Result<C64> {
        Self::check_half_plane(w)?;
        let al = self.gen.alpha();
        let leading = ((w + 1.0).powf(al) - 2f64.powf(al)) / self.gen.lambda();
        Ok(leading + self.sigma_rest(w)?)
    }

    /// `σ₁(w) = σ(w) + 2^α/λ - ∫₁^∞ (σ'(v) - (v+1)^(α-1)/A) dv`.
    pub fn sigma1(&self, w: C64) -> Result<C64> {
        let k = self.c1_half_plane()?.value;
        Self::check_half_plane(w)?;
        let leading = (w + 1.0).powf(self.gen.alpha()) / self.gen.lambda();
        Ok(leading + self.sigma_rest(w)? - k)
    }

    /// `∫ dζ/f` along a polyline starting at 0, without the closed-form split.
    pub fn h_along_path(&self, path: &[C64]) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        let mut prev = C64::new(0.0, 0.0);
        for &p in path {
            if !(p.norm() < 1.0) {
                return Err(Error::outside(p, "unit disk"));
            }
            acc += integrate_segment(|z| 1.0 / self.gen.f_at_gap(1.0 - z), prev, p, &self.tol)?.value;
            prev = p;
        }
        Ok(acc)
    }
}

/// `|h(F_t(z)) - h(z) - t|`.
pub fn abel_residual(ev: &KoenigsEvaluator, z: C64, t: f64, rel_tol: f64) -> Result<f64> {
    let g_t = flow_gap_at(ev.generator(), z, t, rel_tol)?;
    Ok((ev.h_at_gap(g_t)? - ev.h(z)? - t).norm())
}

/// `|σ(Φ_t(w)) - σ(w) - t|`.
pub fn abel_residual_half_plane(ev: &KoenigsEvaluator, w: C64, t: f64, rel_tol: f64) -> Result<f64> {
    let w_t = half_plane_flow_at(ev.generator(), w, t, rel_tol)?;
    Ok((ev.sigma(w_t)? - ev.sigma(w)? - t).norm())
}
