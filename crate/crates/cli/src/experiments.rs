//! Report kinds.

use std::path::Path;

use num_complex::Complex64 as C64;
use parabolic::asymptotics::{appendix_limit, koenigs_difference_limit, prediction_error_curve, FramePoint, LimitCheck, Regime};
use parabolic::extrapolate::LimitEstimate;
use parabolic::flow::{integrate_half_plane, integrate_trajectory, Frame, Trajectory};
use parabolic::fmt::g17;
use parabolic::generators::DerivedConstants;
use parabolic::geometry::{
    classify_omega, contact_order_of, curvature_curve, empirical_slope, limit_curvature_class, limit_slope,
    mutual_position, predicted_mutual_position, tangent_distance, twist, AsymptoteReport, ContactOrderReport,
    CurvatureClass, MutualPositionKind, MutualPositionReport, OmegaRegion,
};
use parabolic::koenigs::{Estimate, KoenigsEvaluator};
use parabolic::rigidity::{
    pair_order_estimate, strong_rigidity_check, weak_rigidity_experiment, PairOrderReport, StrongRigidityReport,
    WeakRigidityVerdict,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::output::write_atomic;

/// One representative `(α, β)` per region.
pub const CANONICAL_PAIRS: [(f64, f64); 5] = [(1.5, 2.0), (1.0, 2.0), (0.5, 1.5), (1.5, 1.0), (1.5, 0.5)];

#[derive(Serialize)]
struct AsymptoticsPoint {
    point: C64,
    limit: LimitEstimate,
    closed_form: C64,
    relative_error: f64,
    prediction_error_curve: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct AsymptoticsReport {
    regime: Regime,
    frame: Frame,
    constants: DerivedConstants,
    c1: Option<Estimate>,
    points: Vec<AsymptoticsPoint>,
}

#[derive(Serialize)]
struct GeometryPoint {
    z: C64,
    empirical_slope: LimitEstimate,
    contact: ContactOrderReport,
    curve_csv: String,
}

#[derive(Serialize)]
struct GeometryReport {
    region: OmegaRegion,
    limit_slope: f64,
    twist: C64,
    curvature_class: CurvatureClass,
    points: Vec<GeometryPoint>,
}

#[derive(Serialize)]
struct OmegaEntry {
    alpha: f64,
    beta: f64,
    region: OmegaRegion,
}

#[derive(Serialize)]
struct OmegaReport {
    generator_region: OmegaRegion,
    predicted_mutual_position: Option<MutualPositionKind>,
    pairs: Vec<OmegaEntry>,
}

#[derive(Serialize)]
struct AsymptotePoint {
    w: C64,
    report: AsymptoteReport,
}

#[derive(Serialize)]
struct AsymptoteRun {
    points: Vec<AsymptotePoint>,
    /// Consecutive pairs of points.
    mutual_positions: Vec<MutualPositionReport>,
}

#[derive(Serialize)]
struct PairOrderEntry {
    z: C64,
    report: PairOrderReport,
}

#[derive(Serialize)]
struct RigidityReport {
    weak: Vec<WeakRigidityVerdict>,
    pair_orders: Vec<PairOrderEntry>,
    strong: Option<StrongRigidityReport>,
}

#[derive(Serialize)]
struct AppendixPoint {
    point: C64,
    check: LimitCheck,
}

#[derive(Serialize)]
struct AppendixReport {
    frame: Frame,
    points: Vec<AppendixPoint>,
}

fn frame_point(frame: Frame, p: C64) -> FramePoint {
    match frame {
        Frame::Disk => FramePoint::Disk(p),
        Frame::HalfPlane => FramePoint::HalfPlane(p),
    }
}

pub fn trajectory(cfg: &ExperimentConfig, p: C64) -> Result<Trajectory, CliError> {
    let ic = cfg.integrator();
    Ok(match cfg.frame {
        Frame::Disk => integrate_trajectory(&cfg.generator, p, &ic)?,
        Frame::HalfPlane => integrate_half_plane(&cfg.generator, p, &ic)?,
    })
}

fn to_value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Runs one experiment; auxiliary CSV files go to `dir` under `label`.
pub fn run(cfg: &ExperimentConfig, exp: &Experiment, label: &str, dir: &Path) -> Result<Value, CliError> {
    let gen = &cfg.generator;
    let ic = cfg.integrator();
    let ev = || KoenigsEvaluator::new(gen, cfg.tolerances.quadrature);
    match exp {
        Experiment::Asymptotics { .. } => {
            let ev = ev()?;
            let mut points = Vec::new();
            for &p in cfg.points_for(exp)? {
                let chk = koenigs_difference_limit(&ev, frame_point(cfg.frame, p), &ic)?;
                let traj = trajectory(cfg, p)?;
                points.push(AsymptoticsPoint {
                    point: p,
                    limit: chk.estimate,
                    closed_form: chk.closed_form,
                    relative_error: chk.relative_error,
                    prediction_error_curve: prediction_error_curve(&ev, &traj)?,
                });
            }
            let c1 = if ev.normalizable() { Some(ev.c1()?) } else { None };
            Ok(to_value(AsymptoticsReport {
                regime: Regime::of(gen),
                frame: cfg.frame,
                constants: gen.constants(),
                c1,
                points,
            }))
        }
        Experiment::Geometry { im_condition, .. } => {
            let ev = ev()?;
            let mut points = Vec::new();
            for (i, &p) in cfg.points_for(exp)?.iter().enumerate() {
                let z = cfg.to_disk(p)?;
                let traj = integrate_trajectory(gen, z, &ic)?;
                let curve_csv = format!("{label}_curve_{i:02}.csv");
                write_curve(&dir.join(&curve_csv), cfg, &traj)?;
                points.push(GeometryPoint {
                    z,
                    empirical_slope: empirical_slope(gen, z, &ic)?,
                    contact: contact_order_of(&ev, z, &ic)?,
                    curve_csv,
                });
            }
            Ok(to_value(GeometryReport {
                region: classify_omega(gen.alpha(), gen.beta())?,
                limit_slope: limit_slope(gen),
                twist: twist(gen),
                curvature_class: limit_curvature_class(gen, *im_condition)?,
                points,
            }))
        }
        Experiment::Omega { pairs, .. } => {
            let pairs = pairs.clone().unwrap_or_else(|| CANONICAL_PAIRS.to_vec());
            let entries = pairs
                .into_iter()
                .map(|(alpha, beta)| Ok(OmegaEntry { alpha, beta, region: classify_omega(alpha, beta)? }))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(to_value(OmegaReport {
                generator_region: classify_omega(gen.alpha(), gen.beta())?,
                predicted_mutual_position: predicted_mutual_position(gen),
                pairs: entries,
            }))
        }
        Experiment::Asymptote { im_condition, .. } => {
            let ev = ev()?;
            let ws = cfg.points_for(exp)?.iter().map(|p| cfg.to_half_plane(*p)).collect::<Result<Vec<_>, _>>()?;
            let mut points = Vec::new();
            for &w in &ws {
                let report = parabolic::geometry::asymptote_report(&ev, w, &ic, *im_condition)?;
                points.push(AsymptotePoint { w, report });
            }
            let mutual_positions =
                ws.windows(2).map(|p| mutual_position(&ev, p[0], p[1], &ic)).collect::<Result<Vec<_>, _>>()?;
            Ok(to_value(AsymptoteRun { points, mutual_positions }))
        }
        Experiment::Rigidity { c, theta, mode, .. } => {
            let zs = cfg.points_for(exp)?.iter().map(|p| cfg.to_disk(*p)).collect::<Result<Vec<_>, _>>()?;
            let star = match (&cfg.generator_star, c) {
                (Some(s), _) => Some(s.clone()),
                (None, Some(c)) => Some(gen.perturbed(*c)?),
                (None, None) => None,
            };
            let Some(star) = star else {
                return Err(CliError::Config("rigidity needs generator_star or c".into()));
            };
            let mut weak = Vec::new();
            if let Some(c) = c {
                for &z in &zs {
                    weak.push(weak_rigidity_experiment(gen, *c, z, &ic)?);
                }
            }
            let mut pair_orders = Vec::new();
            if c.is_none() {
                for &z in &zs {
                    pair_orders.push(PairOrderEntry { z, report: pair_order_estimate(gen, &star, z, z, &ic)? });
                }
            }
            let strong = match theta {
                Some(th) => Some(strong_rigidity_check(gen, &star, *th, &zs, &ic, *mode)?),
                None => None,
            };
            Ok(to_value(RigidityReport { weak, pair_orders, strong }))
        }
        Experiment::Appendix { .. } => {
            let ev = ev()?;
            let mut points = Vec::new();
            for &p in cfg.points_for(exp)? {
                points.push(AppendixPoint { point: p, check: appendix_limit(&ev, frame_point(cfg.frame, p), &ic)? });
            }
            Ok(to_value(AppendixReport { frame: cfg.frame, points }))
        }
    }
}

/// Columns `t,d,gap,kappa` along a disk trajectory.
fn write_curve(path: &Path, cfg: &ExperimentConfig, traj: &Trajectory) -> Result<(), CliError> {
    let samples = tangent_distance(&cfg.generator, traj);
    let kappa = curvature_curve(&cfg.generator, traj)?;
    write_atomic(path, |w| {
        writeln!(w, "t,d,gap,kappa")?;
        // curvature_curve includes t = 0, tangent samples start at index 1.
        for (s, (_, k)) in samples.iter().zip(kappa.iter().skip(1)) {
            writeln!(w, "{},{},{},{}", g17(s.t), g17(s.d), g17(s.gap), g17(*k))?;
        }
        Ok(())
    })
}
