//! Comparison of two semigroups with the same leading term `a(1-z)^(1+α)`.
//!
//! Both flows are integrated on one step sequence, and `F_t(z1) - F*_t(z2)`
//! is formed from the difference of the lifted coordinates, so the gap is
//! resolved far below the size of either point's distance to 1.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{estimate_limit, power_law_tail, LimitEstimate};
use crate::flow::{integrate_pair, Frame, IntegratorConfig, Trajectory};
use crate::generators::{validate_admissibility, AdmissibilityGrid, AdmissibilityReport, GeneratorSpec};
use crate::geometry::{difference_samples, OrderTheory};
use crate::koenigs::KoenigsEvaluator;
use crate::quad::QuadTol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub t: f64,
    /// `|F_t(z1) - F*_t(z2)|`.
    pub distance: f64,
    /// `|1 - F_t(z1)|`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOrderReport {
    /// Regression slope of `log distance` against `log gap`, minus one;
    /// infinite when the flows coincide.
    pub estimated_order: f64,
    pub predicted_order: Option<OrderTheory>,
    pub fit_r2: f64,
    pub above_all: bool,
    /// `distance / gap^(1+β)` at the end of the grid relative to its value
    /// at the start of the fit window.
    pub beta_scaled_drop: f64,
    pub gap_curve: Vec<PairSample>,
}

impl PairOrderReport {
    /// Slope within `±0.05` of `1 + κ` with `r² ≥ 0.999`.
    pub fn order_approx(&self, kappa: f64) -> bool {
        !self.above_all && (self.estimated_order - kappa).abs() <= 0.05 && self.fit_r2 >= 0.999
    }

    /// The `β`-scaled distance drops below `1e-3` of its value at the start of the window.
    pub fn order_exceeds_beta(&self) -> bool {
        self.above_all || self.beta_scaled_drop < 1e-3
    }
}

fn check_same_leading(gen: &GeneratorSpec, gen_star: &GeneratorSpec) -> Result<()> {
    if gen.a() != gen_star.a() || gen.alpha() != gen_star.alpha() {
        return Err(Error::InvalidArgument(
            "compared semigroups must share the leading coefficient a and exponent alpha".into(),
        ));
    }
    Ok(())
}

/// `(t, F_t(z1) - F*_t(z2), 1 - F_t(z1))` for a disk pair on one clock.
fn pair_differences(pair: &[Trajectory; 2]) -> Vec<(f64, C64, C64)> {
    let diffs = difference_samples(pair);
    diffs
        .iter()
        .enumerate()
        .map(|(k, (t, d))| {
            let i = k + 1;
            let (l1, l2) = (pair[0].lifted(i), pair[1].lifted(i));
            // 2/L2 - 2/L1 = 2 (L1 - L2) / (L1 L2)
            (*t, 2.0 * d / (l1 * l2), pair[0].gap(i))
        })
        .collect()
}

fn predicted_pair_order(gen: &GeneratorSpec, gen_star: &GeneratorSpec) -> OrderTheory {
    let (al, be) = (gen.alpha(), gen.beta());
    if gen.params() == gen_star.params() {
        return OrderTheory::AtLeast(be.min(al));
    }
    if gen.beta() != gen_star.beta() {
        return OrderTheory::Exact(be.min(gen_star.beta()).min(al));
    }
    if be < al {
        OrderTheory::Exact(be)
    } else if be == al {
        OrderTheory::LogCorrected(al)
    } else {
        OrderTheory::Exact(al)
    }
}

fn order_report(gen: &GeneratorSpec, samples: &[(f64, C64, C64)], predicted: Option<OrderTheory>) -> Result<PairOrderReport> {
    let gap_curve: Vec<PairSample> = samples
        .iter()
        .map(|(t, d, g)| PairSample { t: *t, distance: d.norm(), gap: g.norm() })
        .collect();
    if gap_curve.len() < 6 {
        return Err(Error::InsufficientSamples { needed: 6, got: gap_curve.len() });
    }
    let g_min = gap_curve.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min);
    let cut = g_min * 10f64.powf(1.5);
    let window: Vec<&PairSample> = gap_curve.iter().filter(|s| s.gap <= cut).collect();
    let above_all = window.iter().all(|s| s.distance <= 1e-14 * s.gap);
    if above_all {
        return Ok(PairOrderReport {
            estimated_order: f64::INFINITY,
            predicted_order: predicted,
            fit_r2: 1.0,
            above_all: true,
            beta_scaled_drop: 0.0,
            gap_curve,
        });
    }
    let xs: Vec<f64> = gap_curve.iter().map(|s| s.gap).collect();
    let ys: Vec<f64> = gap_curve.iter().map(|s| s.distance).collect();
    let fit = power_law_tail(&xs, &ys, 1.5)?;
    let be = gen.beta();
    let scaled = |s: &PairSample| s.distance / s.gap.powf(1.0 + be);
    let first = window.first().map(|s| scaled(s)).unwrap_or(f64::NAN);
    let last = window.last().map(|s| scaled(s)).unwrap_or(f64::NAN);
    Ok(PairOrderReport {
        estimated_order: (fit.slope - 1.0).max(0.0),
        predicted_order: predicted,
        fit_r2: fit.r2,
        above_all: false,
        beta_scaled_drop: last / first,
        gap_curve,
    })
}

/// Parameter-related contact order of `F_t(z1)` and `F*_t(z2)`.
pub fn pair_order_estimate(
    gen: &GeneratorSpec,
    gen_star: &GeneratorSpec,
    z1: C64,
    z2: C64,
    cfg: &IntegratorConfig,
) -> Result<PairOrderReport> {
    check_same_leading(gen, gen_star)?;
    let pair = integrate_pair([gen, gen_star], [z1, z2], Frame::Disk, cfg)?;
    let predicted = (z1 == z2).then(|| predicted_pair_order(gen, gen_star));
    order_report(gen, &pair_differences(&pair), predicted)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakRigidityVerdict {
    pub c: C64,
    pub admissibility: AdmissibilityReport,
    pub report: PairOrderReport,
    pub order_exceeds_beta: bool,
    /// Order within `±0.05` of `β`.
    pub order_matches_beta: bool,
    /// `c = 0` exactly when the order exceeds `β`.
    pub consistent: bool,
}

/// Pair order of `S` against `S*` generated by `f + c(1-z)^(1+α+β)` from the same point.
pub fn weak_rigidity_experiment(
    gen: &GeneratorSpec,
    c: C64,
    z: C64,
    cfg: &IntegratorConfig,
) -> Result<WeakRigidityVerdict> {
    if gen.beta() > gen.alpha() {
        return Err(Error::RegimeMismatch("weak rigidity needs beta <= alpha".into()));
    }
    let star = gen.perturbed(c)?;
    let admissibility = validate_admissibility(&star, &AdmissibilityGrid::default());
    if !admissibility.pass {
        return Err(Error::NotAdmissible { min_re_p: admissibility.min_re_p });
    }
    let report = pair_order_estimate(gen, &star, z, z, cfg)?;
    let exceeds = report.order_exceeds_beta();
    let matches = report.order_approx(gen.beta());
    let is_zero = c == C64::new(0.0, 0.0);
    let consistent = if is_zero { exceeds } else { !exceeds && matches };
    Ok(WeakRigidityVerdict {
        c,
        admissibility,
        report,
        order_exceeds_beta: exceeds,
        order_matches_beta: matches,
        consistent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrongRigidityMode {
    /// Reject generators outside the strong rigidity hypotheses.
    Strict,
    /// Run anyway and record the outcome as exploratory data.
    Probe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongRigidityPoint {
    pub z: C64,
    /// Limit of `t^(1+1/α) Re(e^(iθ)(F_t(z) - F*_t(z)))`.
    pub limit: LimitEstimate,
    pub vanishes: bool,
    /// `h(z) - h*(z)`.
    pub koenigs_difference: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongRigidityReport {
    pub theta: f64,
    pub hypotheses_hold: bool,
    pub points: Vec<StrongRigidityPoint>,
    /// Every scaled limit vanishes, which characterizes `S = S*`.
    pub all_vanish: bool,
    /// Largest deviation of `h - h*` from its value at the first point.
    pub koenigs_difference_spread: f64,
}

fn strong_hypotheses(gen: &GeneratorSpec, gen_star: &GeneratorSpec) -> bool {
    let (al, be) = (gen.alpha(), gen.beta());
    if be != gen_star.beta() {
        return false;
    }
    let strong = gen.has_strong_remainder() && gen_star.has_strong_remainder();
    (be > al / 2.0 && be <= al && strong) || be > al
}

pub fn strong_rigidity_check(
    gen: &GeneratorSpec,
    gen_star: &GeneratorSpec,
    theta: f64,
    zs: &[C64],
    cfg: &IntegratorConfig,
    mode: StrongRigidityMode,
) -> Result<StrongRigidityReport> {
    check_same_leading(gen, gen_star)?;
    let hypotheses_hold = strong_hypotheses(gen, gen_star);
    if !hypotheses_hold && mode == StrongRigidityMode::Strict {
        return Err(Error::HypothesisViolation(
            "strong rigidity needs alpha/2 < beta <= alpha with strong remainders, or beta > alpha".into(),
        ));
    }
    let ev = KoenigsEvaluator::new(gen, QuadTol::default())?;
    let ev_star = KoenigsEvaluator::new(gen_star, QuadTol::default())?;
    let rot = C64::from_polar(1.0, theta);
    let expo = 1.0 + 1.0 / gen.alpha();
    let mut points = Vec::with_capacity(zs.len());
    for &z in zs {
        let pair = integrate_pair([gen, gen_star], [z, z], Frame::Disk, cfg)?;
        let samples: Vec<(f64, C64)> = pair_differences(&pair)
            .into_iter()
            .map(|(t, d, _)| (t, C64::new(t.powf(expo) * (rot * d).re, 0.0)))
            .collect();
        let limit = estimate_limit(&samples)?;
        let vanishes = !limit.divergent && limit.value.norm() <= (3.0 * limit.error).max(1e-8);
        let koenigs_difference = ev.h(z)? - ev_star.h(z)?;
        points.push(StrongRigidityPoint { z, limit, vanishes, koenigs_difference });
    }
    let base = points.first().map(|p| p.koenigs_difference).unwrap_or_default();
    let koenigs_difference_spread = points
        .iter()
        .map(|p| (p.koenigs_difference - base).norm())
        .fold(0.0, f64::max);
    Ok(StrongRigidityReport {
        theta,
        hypotheses_hold,
        all_vanish: points.iter().all(|p| p.vanishes),
        points,
        koenigs_difference_spread,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SameTrajectoryReport {
    pub pair: PairOrderReport,
    /// Limit of `(F_t(z1) - F_t(z2)) / (1 - F_t(z1))^(1+α)`.
    pub scaled_limit: LimitEstimate,
    /// `λ (h(z1) - h(z2)) / (α 2^α)`.
    pub closed_form: C64,
}

/// Two trajectories of one semigroup compared at equal times.
pub fn same_trajectory_order(ev: &KoenigsEvaluator, z1: C64, z2: C64, cfg: &IntegratorConfig) -> Result<SameTrajectoryReport> {
    if z1 == z2 {
        return Err(Error::InvalidArgument("same_trajectory_order needs distinct points".into()));
    }
    let gen = ev.generator();
    let al = gen.alpha();
    let pair = integrate_pair([gen, gen], [z1, z2], Frame::Disk, cfg)?;
    let diffs = pair_differences(&pair);
    let mut report = order_report(gen, &diffs, None)?;
    report.predicted_order = Some(OrderTheory::Exact(al));
    let samples: Vec<(f64, C64)> = diffs.iter().map(|(t, d, g)| (*t, d / g.powf(1.0 + al))).collect();
    let scaled_limit = estimate_limit(&samples)?;
    let closed_form = gen.lambda() * (ev.h(z1)? - ev.h(z2)?) / (al * 2f64.powf(al));
    Ok(SameTrajectoryReport { pair: report, scaled_limit, closed_form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::TimeGrid;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identical_flows_are_above_all() {
        let gen = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 1.0), 0.5).unwrap();
        let cfg = IntegratorConfig::with_grid(TimeGrid::up_to(1e4));
        let rep = pair_order_estimate(&gen, &gen, c(0.1, 0.2), c(0.1, 0.2), &cfg).unwrap();
        assert!(rep.above_all);
        assert!(rep.order_exceeds_beta());
    }

    #[test]
    fn rejects_different_leading_terms() {
        let g1 = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 1.0), 0.5).unwrap();
        let g2 = GeneratorSpec::two_term(c(2.0, 0.0), 1.0, c(0.0, 1.0), 0.5).unwrap();
        let cfg = IntegratorConfig::with_grid(TimeGrid::up_to(1e3));
        assert!(matches!(
            pair_order_estimate(&g1, &g2, c(0.0, 0.0), c(0.0, 0.0), &cfg),
            Err(Error::InvalidArgument(_))
        ));
    }
}
