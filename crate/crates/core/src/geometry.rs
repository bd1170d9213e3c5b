//! Local geometry of trajectories near the Denjoy–Wolff point.
//!
//! The limit tangent line is `ℓ = {1 + x e^(iψ)}` with `ψ = -arg(a)/α`;
//! signed distances use the normal `i e^(iψ)`. In the half-plane the
//! asymptote question reduces to the limit of `Im(conj(λ^(1/α)) (Φ_t + 1))`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{tail_exponents, trajectory_of, FramePoint};
use crate::error::{Error, Result};
use crate::extrapolate::{estimate_limit, estimate_limit_with, power_law_tail, LimitEstimate, TailModel};
use crate::flow::{integrate_pair, Frame, IntegratorConfig, Trajectory};
use crate::generators::GeneratorSpec;
use crate::koenigs::KoenigsEvaluator;
use crate::series::{ln_1p, pow_1p_m1};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaRegion {
    Omega1,
    Omega2,
    Omega3,
    Omega4,
    Omega5,
}

/// Region of `(α, β) ∈ (0, 2] × (0, ∞)` by the set-builder definitions.
pub fn classify_omega(alpha: f64, beta: f64) -> Result<OmegaRegion> {
    if !(alpha > 0.0 && alpha <= 2.0) || !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "(alpha, beta) = ({alpha}, {beta}) outside (0, 2] x (0, inf)"
        )));
    }
    let region = if alpha > 1.0 && beta > 1.0 {
        OmegaRegion::Omega1
    } else if alpha == 1.0 && beta > 1.0 {
        OmegaRegion::Omega2
    } else if alpha < 1.0f64.min(beta) {
        OmegaRegion::Omega3
    } else if beta == 1.0 && alpha > 1.0 {
        OmegaRegion::Omega4
    } else {
        OmegaRegion::Omega5
    };
    Ok(region)
}

/// How to decide whether `Im(μ λ^(-β/α))` vanishes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImCondition {
    /// Floating-point test with threshold `1e-12` relative to `|μ λ^(-β/α)|`.
    #[default]
    Auto,
    Zero,
    NonZero,
}

/// `μ λ^(-β/α)`.
pub fn twist(gen: &GeneratorSpec) -> C64 {
    gen.mu() * gen.lambda().powf(-gen.beta() / gen.alpha())
}

/// Whether `Im(μ λ^(-β/α)) = 0` under the given decision rule.
pub fn twist_is_real(gen: &GeneratorSpec, rule: ImCondition) -> bool {
    match rule {
        ImCondition::Zero => true,
        ImCondition::NonZero => false,
        ImCondition::Auto => {
            let k = twist(gen);
            k.im.abs() <= 1e-12 * k.norm()
        }
    }
}

/// `ψ = -arg(a)/α`.
pub fn limit_slope(gen: &GeneratorSpec) -> f64 {
    -gen.a().arg() / gen.alpha()
}

/// `arg(1 - F_t) - ψ` at a sample with `t > 0`, from the trajectory offsets.
fn relative_angle(traj: &Trajectory, i: usize) -> f64 {
    let y = traj.offsets[i] / (traj.lambda * traj.times[i]);
    -ln_1p(y).im / traj.alpha
}

/// Tail of `arg(1 - F_t(z))`.
pub fn empirical_slope(gen: &GeneratorSpec, z: C64, cfg: &IntegratorConfig) -> Result<LimitEstimate> {
    let traj = trajectory_of(gen, FramePoint::Disk(z), cfg)?;
    let psi = limit_slope(gen);
    let samples: Vec<(f64, C64)> = (1..traj.len())
        .map(|i| (traj.times[i], C64::new(psi + relative_angle(&traj, i), 0.0)))
        .collect();
    estimate_limit_with(&samples, &TailModel::Exponents(tail_exponents(gen, 0.0, 4)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub t: f64,
    /// Distance from `F_t(z)` to `ℓ`.
    pub d: f64,
    /// Signed distance, positive on the side of `i e^(iψ)`.
    pub signed: f64,
    /// `|1 - F_t(z)|`.
    pub gap: f64,
    /// The same distance from `|λ^(1/α)| |Im(r/λ^(1/α))| |1 - F_t|²`.
    pub d_expansion: f64,
}

/// Distances to the limit tangent line along a trajectory (entries with `t > 0`).
pub fn tangent_distance(gen: &GeneratorSpec, traj: &Trajectory) -> Vec<TangentSample> {
    let psi = limit_slope(gen);
    let rot = C64::from_polar(1.0, -psi);
    let al = gen.alpha();
    let lam = gen.lambda();
    let lam_root = lam.powf(1.0 / al);
    let mut out = Vec::with_capacity(traj.len());
    for i in 1..traj.len() {
        let t = traj.times[i];
        let g = traj.gap(i);
        // Geometric: component of 1 - F normal to ℓ.
        let signed = -(g * rot).im;
        let y = traj.offsets[i] / (lam * t);
        let r = 0.5 * (lam * t).powf(1.0 / al) * pow_1p_m1(y, 1.0 / al);
        let d_expansion = lam_root.norm() * (r / lam_root).im.abs() * g.norm_sqr();
        out.push(TangentSample { t, d: signed.abs(), signed, gap: g.norm(), d_expansion });
    }
    out
}

/// Signed curvature `Im(conj(ż) z̈)/|ż|³` of an orbit of `ż = f(z)` where
/// `f` and `f'` are the field and its derivative at the point.
pub fn plane_curvature(f: C64, f_prime: C64) -> f64 {
    // z̈ = f'(z) f(z), so the expression reduces to Im f' / |f|.
    f_prime.im / f.norm()
}

/// Curvature of `γ_z` at `F_t(z)` for a point given by its gap `1 - F_t(z)`.
pub fn curvature_at_gap(gen: &GeneratorSpec, g: C64) -> Result<f64> {
    let f = gen.f_at_gap(g);
    if !(f.norm() > 1e-300) {
        return Err(Error::Unreliable("generator value underflows at this point".into()));
    }
    Ok(plane_curvature(f, gen.f_prime_at_gap(g)))
}

/// Curvature of the trajectory of `z` at time `t`.
pub fn curvature(gen: &GeneratorSpec, z: C64, t: f64, rel_tol: f64) -> Result<f64> {
    let g = crate::flow::flow_gap_at(gen, z, t, rel_tol)?;
    curvature_at_gap(gen, g)
}

/// `(t, κ)` along a sampled trajectory.
pub fn curvature_curve(gen: &GeneratorSpec, traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    (0..traj.len()).map(|i| Ok((traj.times[i], curvature_at_gap(gen, traj.gap(i))?))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureClass {
    /// Every trajectory has zero limit curvature.
    Zero,
    /// Finite, different for different trajectories.
    FinitePerTrajectory,
    /// One finite non-zero value shared by all trajectories.
    FiniteShared,
    /// Only the trajectory with `Im h₁ = 0` has finite (zero) limit curvature.
    InfiniteExceptSpecial,
    Infinite,
}

/// Limit curvature class of a two-term generator.
pub fn limit_curvature_class(gen: &GeneratorSpec, rule: ImCondition) -> Result<CurvatureClass> {
    let region = classify_omega(gen.alpha(), gen.beta())?;
    let real = twist_is_real(gen, rule);
    Ok(match region {
        OmegaRegion::Omega1 => CurvatureClass::Zero,
        OmegaRegion::Omega2 => CurvatureClass::FinitePerTrajectory,
        OmegaRegion::Omega3 => CurvatureClass::InfiniteExceptSpecial,
        OmegaRegion::Omega4 if real => CurvatureClass::Zero,
        OmegaRegion::Omega4 => CurvatureClass::FiniteShared,
        OmegaRegion::Omega5 if real => CurvatureClass::Zero,
        OmegaRegion::Omega5 => CurvatureClass::Infinite,
    })
}

/// Predicted contact order with the limit tangent line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum OrderTheory {
    Exact(f64),
    AtLeast(f64),
    /// `d / (|1-F|^(1+α) |log|1-F||)` has a finite limit.
    LogCorrected(f64),
    /// The trajectory lies on the tangent line.
    AboveAll,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalContact {
    pub order: OrderTheory,
    /// Limit of the scaled distance, when the order is exact.
    pub constant: Option<f64>,
}

/// Contact order and constant predicted for the trajectory of `z`.
pub fn theoretical_contact(ev: &KoenigsEvaluator, z: C64) -> Result<TheoreticalContact> {
    let gen = ev.generator();
    let (al, be) = (gen.alpha(), gen.beta());
    let lam = gen.lambda();
    let lam_abs = lam.norm();
    let k = twist(gen);
    let twist_real = twist_is_real(gen, ImCondition::Auto);
    let generic = |h1: C64| lam_abs * h1.im.abs() / (al * 2f64.powf(al));
    let h1_real = |h1: C64| h1.im.abs() <= 1e-10 * h1.norm().max(1.0);
    if gen.is_pure_power() {
        let h1 = ev.h1(z)?;
        return Ok(if h1_real(h1) {
            TheoreticalContact { order: OrderTheory::AboveAll, constant: None }
        } else {
            TheoreticalContact { order: OrderTheory::Exact(al), constant: Some(generic(h1)) }
        });
    }
    let beta_term = |den: f64| lam_abs.powf(be / al) * k.im.abs() / (2f64.powf(be) * den);
    Ok(if be < al {
        if twist_real {
            TheoreticalContact { order: OrderTheory::AtLeast(be), constant: None }
        } else {
            TheoreticalContact { order: OrderTheory::Exact(be), constant: Some(beta_term(al - be)) }
        }
    } else if be == al {
        let c = lam_abs * (gen.mu() / lam).im.abs() / 2f64.powf(al);
        TheoreticalContact { order: OrderTheory::LogCorrected(al), constant: Some(c) }
    } else {
        let h1 = ev.h1(z)?;
        if !h1_real(h1) {
            TheoreticalContact { order: OrderTheory::Exact(al), constant: Some(generic(h1)) }
        } else if twist_real {
            TheoreticalContact { order: OrderTheory::AtLeast(be), constant: None }
        } else {
            TheoreticalContact { order: OrderTheory::Exact(be), constant: Some(beta_term(be - al)) }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactOrderReport {
    /// Regression slope of `log d` against `log|1-F|`, minus one.
    pub estimated_order: f64,
    pub fit_r2: f64,
    /// `r² ≥ 0.999`.
    pub reliable: bool,
    /// The distance vanishes to rounding level on the tail.
    pub above_all: bool,
    pub theoretical: Option<TheoreticalContact>,
    /// Limit of the distance scaled by the theoretical order.
    pub limit_constant: Option<LimitEstimate>,
}

/// Power-law fit of `d` against `|1 - F|` over the last decade and a half.
pub fn contact_order_estimate(
    samples: &[TangentSample],
    theory: Option<TheoreticalContact>,
) -> Result<ContactOrderReport> {
    let tail: Vec<&TangentSample> = samples.iter().filter(|s| s.gap > 0.0).collect();
    if tail.len() < 6 {
        return Err(Error::InsufficientSamples { needed: 6, got: tail.len() });
    }
    let g_min = tail.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    let window: Vec<&&TangentSample> = tail.iter().filter(|s| s.gap <= g_min * 10f64.powf(1.5)).collect();
    let above_all = window.iter().all(|s| s.d <= 1e-14 * s.gap);
    if above_all {
        return Ok(ContactOrderReport {
            estimated_order: f64::INFINITY,
            fit_r2: 1.0,
            reliable: true,
            above_all: true,
            theoretical: theory,
            limit_constant: None,
        });
    }
    let xs: Vec<f64> = tail.iter().map(|s| s.gap).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.d).collect();
    let fit = power_law_tail(&xs, &ys, 1.5)?;
    let limit_constant = match theory.map(|t| t.order) {
        Some(OrderTheory::Exact(k)) => Some(scaled_limit(&tail, |s| s.d / s.gap.powf(1.0 + k))?),
        Some(OrderTheory::LogCorrected(k)) => {
            Some(scaled_limit(&tail, |s| s.d / (s.gap.powf(1.0 + k) * s.gap.ln().abs()))?)
        }
        _ => None,
    };
    Ok(ContactOrderReport {
        estimated_order: (fit.slope - 1.0).max(0.0),
        fit_r2: fit.r2,
        reliable: fit.r2 >= 0.999,
        above_all: false,
        theoretical: theory,
        limit_constant,
    })
}

fn scaled_limit(tail: &[&TangentSample], f: impl Fn(&TangentSample) -> f64) -> Result<LimitEstimate> {
    let samples: Vec<(f64, C64)> = tail.iter().map(|s| (s.t, C64::new(f(s), 0.0))).collect();
    estimate_limit(&samples)
}

/// Integrates from `z`, measures the tangent distance and fits the order.
pub fn contact_order_of(ev: &KoenigsEvaluator, z: C64, cfg: &IntegratorConfig) -> Result<ContactOrderReport> {
    let gen = ev.generator();
    let traj = trajectory_of(gen, FramePoint::Disk(z), cfg)?;
    let samples = tangent_distance(gen, &traj);
    contact_order_estimate(&samples, Some(theoretical_contact(ev, z)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoteExistence {
    Yes,
    No,
    OnlySpecialTrajectory,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteReport {
    pub region: OmegaRegion,
    pub exists: AsymptoteExistence,
    pub shared_across_initial_points: bool,
    pub passes_through_minus_one: bool,
    /// Signed offset of the asymptote from `-1` along `i λ^(1/α)/|λ^(1/α)|`.
    pub intercept: Option<f64>,
    /// Predicted limit of `Im(conj(λ^(1/α)) (Φ_t + 1))`, when finite.
    pub predicted_limit: Option<f64>,
    pub numeric_limit: LimitEstimate,
    /// Numerics agree with the classification.
    pub consistent: bool,
}

/// `Im(conj(λ^(1/α)) (Φ_t + 1))` along a half-plane or disk trajectory.
pub fn asymptote_samples(traj: &Trajectory) -> Vec<(f64, C64)> {
    let al = traj.alpha;
    let lam = traj.lambda;
    let lam_root = lam.powf(1.0 / al);
    let scale = lam.norm().powf(2.0 / al);
    (1..traj.len())
        .map(|i| {
            let t = traj.times[i];
            let y = traj.offsets[i] / (lam * t);
            let value = if y.norm() < 0.5 {
                // conj(λ^(1/α)) (λt)^(1/α) is real, so only the correction contributes.
                scale * t.powf(1.0 / al) * pow_1p_m1(y, 1.0 / al).im
            } else {
                (lam_root.conj() * traj.lifted(i)).im
            };
            (t, C64::new(value, 0.0))
        })
        .collect()
}

/// Theoretical asymptote of the trajectory of `w` and its numerical check.
pub fn asymptote_report(
    ev: &KoenigsEvaluator,
    w: C64,
    cfg: &IntegratorConfig,
    rule: ImCondition,
) -> Result<AsymptoteReport> {
    let gen = ev.generator();
    let (al, be) = (gen.alpha(), gen.beta());
    let region = classify_omega(al, be)?;
    let lam = gen.lambda();
    let root_abs = lam.norm().powf(1.0 / al);
    let real = twist_is_real(gen, rule);
    let traj = trajectory_of(gen, FramePoint::HalfPlane(w), cfg)?;
    let samples = asymptote_samples(&traj);
    let numeric_limit = estimate_limit_with(&samples, &TailModel::Exponents(tail_exponents(gen, 1.0 / al, 4)))?;

    use AsymptoteExistence::*;
    let (exists, shared, through, predicted) = if gen.is_pure_power() {
        // Only α decides: the correction is (Φ_0 + 1)^α / λ times t^(1/α - 1).
        if al > 1.0 {
            (Yes, true, true, Some(0.0))
        } else if al == 1.0 {
            let v0 = (w + 1.0).powf(al);
            (Yes, false, false, Some((lam.conj() * v0).im))
        } else {
            (OnlySpecialTrajectory, false, true, None)
        }
    } else {
        match region {
            OmegaRegion::Omega1 => (Yes, true, true, Some(0.0)),
            OmegaRegion::Omega2 => {
                let s1 = ev.sigma1(w)?;
                (Yes, false, false, Some(lam.norm_sqr() * s1.im))
            }
            OmegaRegion::Omega3 => (OnlySpecialTrajectory, false, true, None),
            OmegaRegion::Omega4 => {
                let k = lam.norm().powf(2.0 / al) / (al - 1.0) * twist(gen).im;
                let k = if real { 0.0 } else { k };
                (Yes, true, real, Some(k))
            }
            OmegaRegion::Omega5 if real => (Yes, true, true, Some(0.0)),
            OmegaRegion::Omega5 => (No, false, false, None),
        }
    };
    let consistent = match predicted {
        Some(p) => {
            let tol = (0.01 * p.abs()).max(1e-2).max(3.0 * numeric_limit.error);
            !numeric_limit.divergent && (numeric_limit.value.re - p).abs() <= tol
        }
        None => numeric_limit.divergent || numeric_limit.value.norm() > 1e2,
    };
    Ok(AsymptoteReport {
        region,
        exists,
        shared_across_initial_points: shared,
        passes_through_minus_one: through,
        intercept: predicted.map(|p| p / root_abs),
        predicted_limit: predicted,
        numeric_limit,
        consistent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutualPosition {
    MutuallyConvergent,
    AsymptoticallyParallel { s_value: C64 },
    MutuallyDivergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualPositionReport {
    /// Class predicted from `(α, β)`; `None` where only numerics decide.
    pub predicted: Option<MutualPositionKind>,
    pub measured: MutualPosition,
    /// Estimate of `s(w1, w2) = lim (Φ_t(w1) - Φ_t(w2))`.
    pub evidence: LimitEstimate,
    /// `|Φ_t(w1) - Φ_t(w2)|` at the last grid time.
    pub last_distance: f64,
    /// `s / (σ(w1) - σ(w2))` for parallel trajectories.
    pub sigma_ratio: Option<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutualPositionKind {
    MutuallyConvergent,
    AsymptoticallyParallel,
    MutuallyDivergent,
}

impl MutualPosition {
    pub fn kind(&self) -> MutualPositionKind {
        match self {
            MutualPosition::MutuallyConvergent => MutualPositionKind::MutuallyConvergent,
            MutualPosition::AsymptoticallyParallel { .. } => MutualPositionKind::AsymptoticallyParallel,
            MutualPosition::MutuallyDivergent => MutualPositionKind::MutuallyDivergent,
        }
    }
}

/// Class of `Φ_t(w1) - Φ_t(w2)` implied by `(α, β)`.
pub fn predicted_mutual_position(gen: &GeneratorSpec) -> Option<MutualPositionKind> {
    let (al, be) = (gen.alpha(), gen.beta());
    if gen.is_pure_power() {
        return Some(if al > 1.0 {
            MutualPositionKind::MutuallyConvergent
        } else if al == 1.0 {
            MutualPositionKind::AsymptoticallyParallel
        } else {
            MutualPositionKind::MutuallyDivergent
        });
    }
    if al > 1.0 && be >= 1.0 {
        Some(MutualPositionKind::MutuallyConvergent)
    } else if al == 1.0 && be > 1.0 {
        Some(MutualPositionKind::AsymptoticallyParallel)
    } else if al < 1.0f64.min(be) {
        Some(MutualPositionKind::MutuallyDivergent)
    } else {
        None
    }
}

/// `(t, Φ_t(w1) - Φ_t(w2))` from a pair integrated on a shared clock.
pub fn difference_samples(pair: &[Trajectory; 2]) -> Vec<(f64, C64)> {
    let [a, b] = pair;
    let s = 1.0 / a.alpha;
    (1..a.len())
        .map(|i| {
            let t = a.times[i];
            let lt = a.lambda * t;
            let y2 = b.offsets[i] / lt;
            if y2.norm() < 0.5 {
                // (1+y1)^s - (1+y2)^s = (1+y2)^s ((1 + (y1-y2)/(1+y2))^s - 1)
                let dy = (a.offsets[i] - b.offsets[i]) / lt;
                let value = lt.powf(s) * (1.0 + y2).powf(s) * pow_1p_m1(dy / (1.0 + y2), s);
                (t, value)
            } else {
                (t, a.lifted(i) - b.lifted(i))
            }
        })
        .collect()
}

pub fn mutual_position(
    ev: &KoenigsEvaluator,
    w1: C64,
    w2: C64,
    cfg: &IntegratorConfig,
) -> Result<MutualPositionReport> {
    if w1 == w2 {
        return Err(Error::InvalidArgument("mutual position needs distinct points".into()));
    }
    let gen = ev.generator();
    let pair = integrate_pair([gen, gen], [w1, w2], Frame::HalfPlane, cfg)?;
    let samples = difference_samples(&pair);
    let last_distance = samples.last().map(|s| s.1.norm()).unwrap_or(0.0);
    let lead = 1.0 / gen.alpha() - 1.0;
    let evidence = estimate_limit_with(&samples, &TailModel::Exponents(tail_exponents(gen, lead, 4)))?;
    let measured = if evidence.divergent {
        MutualPosition::MutuallyDivergent
    } else if evidence.value.norm() <= (1e-3 * (w1 - w2).norm()).max(3.0 * evidence.error) {
        MutualPosition::MutuallyConvergent
    } else {
        MutualPosition::AsymptoticallyParallel { s_value: evidence.value }
    };
    let sigma_ratio = match measured {
        MutualPosition::AsymptoticallyParallel { s_value } => Some(s_value / (ev.sigma(w1)? - ev.sigma(w2)?)),
        _ => None,
    };
    Ok(MutualPositionReport {
        predicted: predicted_mutual_position(gen),
        measured,
        evidence,
        last_distance,
        sigma_ratio,
    })
}

/// Ratios `s/(σ(w1) - σ(w2))` over several pairs and their largest relative
/// deviation from the mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelRatioCheck {
    pub ratios: Vec<C64>,
    pub max_relative_spread: f64,
}

pub fn parallel_ratio_check(
    ev: &KoenigsEvaluator,
    pairs: &[(C64, C64)],
    cfg: &IntegratorConfig,
) -> Result<ParallelRatioCheck> {
    let mut ratios = Vec::with_capacity(pairs.len());
    for &(w1, w2) in pairs {
        let rep = mutual_position(ev, w1, w2, cfg)?;
        match rep.sigma_ratio {
            Some(r) => ratios.push(r),
            None => {
                return Err(Error::RegimeMismatch(format!(
                    "trajectories of {w1} and {w2} are not asymptotically parallel"
                )))
            }
        }
    }
    let mean = ratios.iter().sum::<C64>() / ratios.len().max(1) as f64;
    let max_relative_spread = ratios
        .iter()
        .map(|r| (r - mean).norm() / mean.norm())
        .fold(0.0, f64::max);
    Ok(ParallelRatioCheck { ratios, max_relative_spread })
}

/// Root of `Im h₁` (disk) or `Im σ₁` (half-plane) on the segment `[from, to]`.
pub fn special_trajectory_locator(ev: &KoenigsEvaluator, frame: Frame, from: C64, to: C64) -> Result<C64> {
    let gen = ev.generator();
    if !(gen.beta() > gen.alpha()) {
        return Err(Error::RegimeMismatch("the special trajectory exists for beta > alpha".into()));
    }
    let f = |p: C64| -> Result<f64> {
        Ok(match frame {
            Frame::Disk => ev.h1(p)?.im,
            Frame::HalfPlane => ev.sigma1(p)?.im,
        })
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut f_lo = f(from)?;
    let f_hi = f(to)?;
    if f_lo == 0.0 {
        return Ok(from);
    }
    if f_hi == 0.0 {
        return Ok(to);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange);
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(from + (to - from) * mid)?;
        if f_mid == 0.0 {
            return Ok(from + (to - from) * mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(from + (to - from) * (0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn omega_table() {
        assert_eq!(classify_omega(1.5, 2.0).unwrap(), OmegaRegion::Omega1);
        assert_eq!(classify_omega(1.0, 2.0).unwrap(), OmegaRegion::Omega2);
        assert_eq!(classify_omega(0.5, 0.7).unwrap(), OmegaRegion::Omega3);
        assert_eq!(classify_omega(2.0, 1.0).unwrap(), OmegaRegion::Omega4);
        assert_eq!(classify_omega(1.0, 1.0).unwrap(), OmegaRegion::Omega5);
        assert_eq!(classify_omega(0.5, 0.5).unwrap(), OmegaRegion::Omega5);
        assert!(classify_omega(2.5, 1.0).is_err());
        assert!(classify_omega(1.0, 0.0).is_err());
    }

    #[test]
    fn circle_oracle() {
        let center = c(0.3, -0.2);
        for &z in &[c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.5)] {
            let k = plane_curvature(C64::i() * (z - center), C64::i());
            assert!((k - 1.0 / (z - center).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_of_rotated_leading_term() {
        let gen = GeneratorSpec::two_term(C64::from_polar(1.0, std::f64::consts::FRAC_PI_4), 1.0, c(0.0, 0.0), 1.0)
            .unwrap();
        assert!((limit_slope(&gen) + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn curvature_classes() {
        let g = |al, be, b| GeneratorSpec::two_term(c(1.0, 0.0), al, b, be).unwrap();
        let auto = ImCondition::Auto;
        assert_eq!(limit_curvature_class(&g(1.5, 2.0, c(0.2, 0.0)), auto).unwrap(), CurvatureClass::Zero);
        assert_eq!(
            limit_curvature_class(&g(1.0, 2.0, c(0.2, 0.0)), auto).unwrap(),
            CurvatureClass::FinitePerTrajectory
        );
        assert_eq!(limit_curvature_class(&g(1.0, 0.5, c(0.0, 1.0)), auto).unwrap(), CurvatureClass::Infinite);
        assert_eq!(limit_curvature_class(&g(1.0, 0.5, c(0.3, 0.0)), auto).unwrap(), CurvatureClass::Zero);
        assert_eq!(
            limit_curvature_class(&g(1.0, 0.5, c(0.3, 0.0)), ImCondition::NonZero).unwrap(),
            CurvatureClass::Infinite
        );
    }
}
