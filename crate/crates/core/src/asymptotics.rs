//! Asymptotic expansions of trajectories and their numerical validation.
//!
//! Predictions are for `Φ_t(w) + 1` in the half-plane and for `1/(1 - F_t(z))`
//! in the disk; the two differ by the factor 2. Remainders are computed from
//! the offsets carried by [`Trajectory`] so that cancellation is avoided.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{estimate_limit_with, LimitEstimate, TailModel};
use crate::flow::{integrate_half_plane, integrate_pair, integrate_trajectory, Frame, IntegratorConfig, Trajectory};
use crate::generators::{cayley, GeneratorSpec};
use crate::koenigs::KoenigsEvaluator;
use crate::series::{binomial, lattice_exponents, pow_1p_m1};

pub use crate::extrapolate::{estimate_limit, LimitModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    BetaLess,
    BetaEqual,
    /// `k = max{j : jα ≤ β}`.
    BetaGreater { k: u32 },
    PurePower,
}

impl Regime {
    /// Classification by the exact relation between `α` and `β`.
    pub fn of(gen: &GeneratorSpec) -> Regime {
        if gen.b() == C64::new(0.0, 0.0) {
            return Regime::PurePower;
        }
        let (al, be) = (gen.alpha(), gen.beta());
        if be == al {
            Regime::BetaEqual
        } else if be < al {
            Regime::BetaLess
        } else {
            let mut k = (be / al).floor() as u32;
            while (k + 1) as f64 * al <= be {
                k += 1;
            }
            while k > 1 && k as f64 * al > be {
                k -= 1;
            }
            Regime::BetaGreater { k }
        }
    }
}

/// Point in either frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "frame", content = "point", rename_all = "snake_case")]
pub enum FramePoint {
    Disk(C64),
    HalfPlane(C64),
}

impl FramePoint {
    pub fn frame(&self) -> Frame {
        match self {
            FramePoint::Disk(_) => Frame::Disk,
            FramePoint::HalfPlane(_) => Frame::HalfPlane,
        }
    }

    pub fn value(&self) -> C64 {
        match self {
            FramePoint::Disk(z) | FramePoint::HalfPlane(z) => *z,
        }
    }

    /// The reference point `z = 0`, i.e. `w = 1`, in the same frame.
    pub fn origin(frame: Frame) -> FramePoint {
        match frame {
            Frame::Disk => FramePoint::Disk(C64::new(0.0, 0.0)),
            Frame::HalfPlane => FramePoint::HalfPlane(C64::new(1.0, 0.0)),
        }
    }
}

pub(crate) fn trajectory_of(gen: &GeneratorSpec, p: FramePoint, cfg: &IntegratorConfig) -> Result<Trajectory> {
    match p {
        FramePoint::Disk(z) => integrate_trajectory(gen, z, cfg),
        FramePoint::HalfPlane(w) => integrate_half_plane(gen, w, cfg),
    }
}

/// `h(z)` or `σ(w)`.
pub(crate) fn koenigs_value(ev: &KoenigsEvaluator, p: FramePoint) -> Result<C64> {
    match p {
        FramePoint::Disk(z) => ev.h(z),
        FramePoint::HalfPlane(w) => ev.sigma(w),
    }
}

/// `h₁(z)` or `σ₁(w)`.
pub(crate) fn normalized_koenigs_value(ev: &KoenigsEvaluator, p: FramePoint) -> Result<C64> {
    match p {
        FramePoint::Disk(z) => ev.h1(z),
        FramePoint::HalfPlane(w) => ev.sigma1(w),
    }
}

/// Decay exponents of `t^lead · (series in the natural increments)`.
pub(crate) fn tail_exponents(gen: &GeneratorSpec, lead: f64, count: usize) -> Vec<f64> {
    let al = gen.alpha();
    let mut incs: Vec<f64> = gen.excess_exponents().iter().map(|e| e / al).collect();
    incs.push(1.0);
    lattice_exponents(&incs, lead, 0.0, lead.max(0.0) + 4.0, count, true)
}

/// `X - 1` where the prediction is `(λt)^(1/α) X`.
fn relative_correction(gen: &GeneratorSpec, regime: Regime, shift: Option<C64>, t: f64) -> C64 {
    let al = gen.alpha();
    let be = gen.beta();
    let lt = gen.lambda() * t;
    let mu = gen.mu();
    match regime {
        Regime::PurePower => C64::new(0.0, 0.0),
        Regime::BetaLess => mu / (al - be) * lt.powf(-be / al),
        Regime::BetaEqual => mu / al * (t + 1.0).ln() / lt,
        Regime::BetaGreater { k } => {
            let s = shift.expect("normalized Kœnigs value") / t;
            let mut acc = mu / (al - be) * lt.powf(-be / al);
            let mut pw = C64::new(1.0, 0.0);
            for j in 1..=k as usize {
                pw *= s;
                acc += binomial(1.0 / al, j) * pw;
            }
            acc
        }
    }
}

fn shift_for(ev: &KoenigsEvaluator, regime: Regime, p: FramePoint) -> Result<Option<C64>> {
    match regime {
        Regime::BetaGreater { .. } => Ok(Some(normalized_koenigs_value(ev, p)?)),
        _ => Ok(None),
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("expansion needs t > 0, got {t}")));
    }
    Ok(())
}

/// Predicted `Φ_t(w) + 1` with the remainder set to zero.
pub fn predict_halfplane(ev: &KoenigsEvaluator, w: C64, t: f64) -> Result<C64> {
    check_time(t)?;
    let gen = ev.generator();
    let regime = Regime::of(gen);
    let shift = shift_for(ev, regime, FramePoint::HalfPlane(w))?;
    let x = 1.0 + relative_correction(gen, regime, shift, t);
    Ok((gen.lambda() * t).powf(1.0 / gen.alpha()) * x)
}

/// Predicted `1/(1 - F_t(z))`.
pub fn predict_disk(ev: &KoenigsEvaluator, z: C64, t: f64) -> Result<C64> {
    check_time(t)?;
    cayley(z)?;
    let gen = ev.generator();
    let regime = Regime::of(gen);
    let shift = shift_for(ev, regime, FramePoint::Disk(z))?;
    let x = 1.0 + relative_correction(gen, regime, shift, t);
    Ok(0.5 * (gen.lambda() * t).powf(1.0 / gen.alpha()) * x)
}

/// Regime-scaled remainder at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderSample {
    pub t: f64,
    pub value: C64,
}

/// Scaled remainders along a sampled trajectory (entries with `t > 0`).
pub fn scaled_remainders(ev: &KoenigsEvaluator, traj: &Trajectory) -> Result<Vec<RemainderSample>> {
    let gen = ev.generator();
    let regime = Regime::of(gen);
    let p = match traj.frame {
        Frame::Disk => FramePoint::Disk(traj.initial_point),
        Frame::HalfPlane => FramePoint::HalfPlane(traj.initial_point),
    };
    let shift = shift_for(ev, regime, p)?;
    let al = gen.alpha();
    let be = gen.beta();
    let mut out = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let t = traj.times[i];
        if t <= 0.0 {
            continue;
        }
        let lt = gen.lambda() * t;
        // (Φ+1)/(λt)^(1/α) - 1 without cancellation.
        let rel = pow_1p_m1(traj.offsets[i] / lt, 1.0 / al);
        let gamma = rel - relative_correction(gen, regime, shift, t);
        let value = match regime {
            Regime::PurePower => {
                // Φ_t - (λt)^(1/α) = (λt)^(1/α) rel - 1.
                (lt.powf(1.0 / al) * rel - 1.0) * t.powf(-1.0 / al)
            }
            Regime::BetaLess | Regime::BetaGreater { .. } => gamma * t.powf(be / al),
            Regime::BetaEqual => gamma * t / (t + 1.0).ln(),
        };
        out.push(RemainderSample { t, value });
    }
    Ok(out)
}

/// Integrates from `point` and returns the regime-scaled remainders.
pub fn remainder_decay(ev: &KoenigsEvaluator, point: FramePoint, cfg: &IntegratorConfig) -> Result<Vec<RemainderSample>> {
    let traj = trajectory_of(ev.generator(), point, cfg)?;
    scaled_remainders(ev, &traj)
}

fn check_refined(gen: &GeneratorSpec) -> Result<Regime> {
    let regime = Regime::of(gen);
    if regime == Regime::PurePower {
        return Ok(regime);
    }
    let (al, be) = (gen.alpha(), gen.beta());
    if !(be > al / 2.0 && be <= al) {
        return Err(Error::RegimeMismatch(format!(
            "refined expansion needs alpha/2 < beta <= alpha (alpha = {al}, beta = {be})"
        )));
    }
    if !gen.has_strong_remainder() {
        return Err(Error::HypothesisViolation(
            "refined expansion needs a remainder decaying faster than (1-z)^(1+2 alpha)".into(),
        ));
    }
    Ok(regime)
}

/// Second-order terms of `(Φ_t + 1)^α` beyond `λt`, excluding `λσ + C`.
fn refined_terms(gen: &GeneratorSpec, regime: Regime, t: f64, shifted_time: bool) -> C64 {
    let (al, be) = (gen.alpha(), gen.beta());
    let mu = gen.mu();
    let lam = gen.lambda();
    match regime {
        Regime::PurePower => C64::new(0.0, 0.0),
        Regime::BetaEqual => mu * (t + 1.0).ln(),
        _ => {
            let tt = if shifted_time { t + 1.0 } else { t };
            al * mu / (al - be) * (lam * tt).powf(1.0 - be / al)
        }
    }
}

/// Predicted `(Φ_t(w) + 1)^α` (half-plane) or `(2/(1 - F_t(z)))^α` (disk)
/// including the constant `C`.
pub fn refined_expansion(ev: &KoenigsEvaluator, point: FramePoint, t: f64, c: C64) -> Result<C64> {
    check_time(t)?;
    let gen = ev.generator();
    let regime = check_refined(gen)?;
    let k = koenigs_value(ev, point)?;
    Ok(gen.lambda() * t + refined_terms(gen, regime, t, false) + gen.lambda() * k + c)
}

/// `(Φ_t + 1)^α` minus the refined expansion, along a sampled trajectory.
pub fn refined_remainders(ev: &KoenigsEvaluator, traj: &Trajectory, c: C64) -> Result<Vec<RemainderSample>> {
    let gen = ev.generator();
    let regime = check_refined(gen)?;
    let p = match traj.frame {
        Frame::Disk => FramePoint::Disk(traj.initial_point),
        Frame::HalfPlane => FramePoint::HalfPlane(traj.initial_point),
    };
    let k = koenigs_value(ev, p)?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.offsets)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, v)| RemainderSample {
            t: *t,
            value: v - refined_terms(gen, regime, *t, false) - gen.lambda() * k - c,
        })
        .collect())
}

/// The constant `C` of the refined expansion, from the trajectory of
/// `w = 1` (equivalently `z = 0`).
pub fn constant_c_estimate(ev: &KoenigsEvaluator, frame: Frame, cfg: &IntegratorConfig) -> Result<LimitEstimate> {
    let gen = ev.generator();
    let regime = check_refined(gen)?;
    let traj = trajectory_of(gen, FramePoint::origin(frame), cfg)?;
    let samples: Vec<(f64, C64)> = traj
        .times
        .iter()
        .zip(&traj.offsets)
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, v)| (*t, v - refined_terms(gen, regime, *t, true)))
        .collect();
    let model = match regime {
        Regime::BetaEqual => TailModel::Free,
        _ => TailModel::Exponents(tail_exponents(gen, 1.0, 4)),
    };
    estimate_limit_with(&samples, &model)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub estimate: LimitEstimate,
    pub closed_form: C64,
    pub relative_error: f64,
}

impl LimitCheck {
    fn new(estimate: LimitEstimate, closed_form: C64) -> Self {
        let relative_error = (estimate.value - closed_form).norm() / closed_form.norm().max(1e-300);
        LimitCheck { estimate, closed_form, relative_error }
    }
}

fn paired(ev: &KoenigsEvaluator, point: FramePoint, cfg: &IntegratorConfig) -> Result<[Trajectory; 2]> {
    let gen = ev.generator();
    let origin = FramePoint::origin(point.frame());
    integrate_pair([gen, gen], [point.value(), origin.value()], point.frame(), cfg)
}

/// `(t+1)^(β/α) ((Φ_t(w)+1)^α - (Φ_t(1)+1)^α - λσ(w)) → μ λ^(1-β/α) σ(w)`;
/// in the disk the same with `(1/(1-F))^α`, `h` and an extra factor `2^(-α)`.
pub fn appendix_limit(ev: &KoenigsEvaluator, point: FramePoint, cfg: &IntegratorConfig) -> Result<LimitCheck> {
    let gen = ev.generator();
    let (al, be) = (gen.alpha(), gen.beta());
    let lam = gen.lambda();
    let k = koenigs_value(ev, point)?;
    let scale = match point.frame() {
        Frame::HalfPlane => 1.0,
        Frame::Disk => 2f64.powf(-al),
    };
    let [a, b] = paired(ev, point, cfg)?;
    let samples: Vec<(f64, C64)> = (1..a.len())
        .map(|i| {
            let t = a.times[i];
            let d = a.offsets[i] - b.offsets[i] - lam * k;
            (t, (t + 1.0).powf(be / al) * d * scale)
        })
        .collect();
    let est = estimate_limit_with(&samples, &TailModel::Exponents(tail_exponents(gen, 0.0, 4)))?;
    let closed = gen.mu() * lam.powf(1.0 - be / al) * k * scale;
    Ok(LimitCheck::new(est, closed))
}

/// `(1/(1-F_t(z)))^α - (1/(1-F_t(0)))^α → λh(z)/2^α`, or in the half-plane
/// `(Φ_t(w)+1)^α - (Φ_t(1)+1)^α → λσ(w)`.
pub fn koenigs_difference_limit(ev: &KoenigsEvaluator, point: FramePoint, cfg: &IntegratorConfig) -> Result<LimitCheck> {
    let gen = ev.generator();
    let al = gen.alpha();
    let scale = match point.frame() {
        Frame::HalfPlane => 1.0,
        Frame::Disk => 2f64.powf(-al),
    };
    let [a, b] = paired(ev, point, cfg)?;
    let samples: Vec<(f64, C64)> = (1..a.len())
        .map(|i| (a.times[i], (a.offsets[i] - b.offsets[i]) * scale))
        .collect();
    let est = estimate_limit_with(&samples, &TailModel::Exponents(tail_exponents(gen, 0.0, 4)))?;
    let closed = gen.lambda() * koenigs_value(ev, point)? * scale;
    Ok(LimitCheck::new(est, closed))
}

/// `|Φ_t + 1 - prediction| / |Φ_t + 1|` along a trajectory.
pub fn prediction_error_curve(ev: &KoenigsEvaluator, traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for i in 1..traj.len() {
        let t = traj.times[i];
        let (actual, predicted) = match traj.frame {
            Frame::HalfPlane => (traj.lifted(i), predict_halfplane(ev, traj.initial_point, t)?),
            Frame::Disk => (0.5 * traj.lifted(i), predict_disk(ev, traj.initial_point, t)?),
        };
        out.push((t, (actual - predicted).norm() / actual.norm()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::TimeGrid;
    use crate::quad::QuadTol;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn regime_classification() {
        let g = |al, be, b| GeneratorSpec::two_term(c(1.0, 0.0), al, b, be).unwrap();
        assert_eq!(Regime::of(&g(1.0, 0.5, c(0.0, 1.0))), Regime::BetaLess);
        assert_eq!(Regime::of(&g(1.0, 1.0, c(0.3, 0.0))), Regime::BetaEqual);
        assert_eq!(Regime::of(&g(1.0, 2.0, c(0.1, 0.0))), Regime::BetaGreater { k: 2 });
        assert_eq!(Regime::of(&g(0.5, 1.2, c(0.1, 0.0))), Regime::BetaGreater { k: 2 });
        assert_eq!(Regime::of(&g(1.0, 0.5, c(0.0, 0.0))), Regime::PurePower);
        assert_eq!(Regime::of(&GeneratorSpec::rational_example()), Regime::BetaGreater { k: 2 });
    }

    #[test]
    fn pure_quadratic_prediction_and_constant() {
        let gen = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 0.0), 1.0).unwrap();
        let ev = KoenigsEvaluator::new(&gen, QuadTol::default()).unwrap();
        let w = c(0.5, 2.0);
        for &t in &[1.0, 10.0, 1e4] {
            let p = predict_halfplane(&ev, w, t).unwrap();
            assert!((p - c(2.0 * t, 0.0)).norm() < 1e-12 * t);
            let r = refined_expansion(&ev, FramePoint::HalfPlane(w), t, c(2.0, 0.0)).unwrap();
            assert!((r - (w + 1.0 + 2.0 * t)).norm() < 1e-9 * t);
        }
        let cfg = IntegratorConfig::with_grid(TimeGrid::up_to(1e4));
        let est = constant_c_estimate(&ev, Frame::HalfPlane, &cfg).unwrap();
        assert!((est.value - c(2.0, 0.0)).norm() < 1e-9, "{est:?}");
    }

    #[test]
    fn refined_expansion_rejects_weak_remainder() {
        use crate::generators::{GeneratorParams, RemainderKind};
        let gen = GeneratorSpec::new(GeneratorParams {
            a: c(1.0, 0.0),
            alpha: 1.0,
            b: c(0.1, 0.0),
            beta: 0.75,
            remainder: RemainderKind::ExtraPower { c: c(0.01, 0.0), gamma: 1.76 },
        })
        .unwrap();
        let ev = KoenigsEvaluator::new(&gen, QuadTol::default()).unwrap();
        assert!(matches!(
            refined_expansion(&ev, FramePoint::HalfPlane(c(1.0, 0.0)), 1.0, c(0.0, 0.0)),
            Err(Error::HypothesisViolation(_))
        ));
        let low = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.1, 0.0), 0.4).unwrap();
        let ev = KoenigsEvaluator::new(&low, QuadTol::default()).unwrap();
        assert!(matches!(
            refined_expansion(&ev, FramePoint::HalfPlane(c(1.0, 0.0)), 1.0, c(0.0, 0.0)),
            Err(Error::RegimeMismatch(_))
        ));
    }
}
