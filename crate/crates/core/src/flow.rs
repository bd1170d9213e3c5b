//! Trajectories of the semigroup.
//!
//! The flow is integrated in the half-plane through the Abel coordinate
//! `u = (Φ + 1)^α`, which obeys `du/dt = α 2^α N(2 u^(-1/α))` and therefore
//! grows almost linearly. The state actually carried is the offset
//! `v = u - λt`, so differences between trajectories and remainders of
//! asymptotic expansions keep full relative precision for large `t`.
//! Disk points are recovered through the exact relation `1 - F = 2/(Φ + 1)`.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::generators::GeneratorSpec;
use crate::ode::{self, StepControl};

/// Initial points this close to the unit circle are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Disk,
    HalfPlane,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeGrid {
    /// `t0 · ratio^k` up to `t_max`; `t_max` itself is always included.
    Geometric { t0: f64, ratio: f64, t_max: f64 },
    Explicit { times: Vec<f64> },
}

impl TimeGrid {
    /// `t0 = 1`, four samples per doubling.
    pub fn up_to(t_max: f64) -> Self {
        TimeGrid::Geometric { t0: 1.0, ratio: 2f64.powf(0.25), t_max }
    }

    /// Positive sample times in increasing order.
    pub fn samples(&self) -> Result<Vec<f64>> {
        let out = match self {
            TimeGrid::Geometric { t0, ratio, t_max } => {
                if !(*t0 > 0.0 && *ratio > 1.0 && t_max.is_finite() && *t_max >= *t0) {
                    return Err(Error::InvalidArgument(format!(
                        "geometric grid needs 0 < t0 <= t_max and ratio > 1 (got {t0}, {ratio}, {t_max})"
                    )));
                }
                let mut out = Vec::new();
                let mut k = 0i32;
                loop {
                    let t = t0 * ratio.powi(k);
                    if t > t_max * (1.0 - 1e-9) {
                        break;
                    }
                    out.push(t);
                    k += 1;
                }
                out.push(*t_max);
                out
            }
            TimeGrid::Explicit { times } => {
                let out: Vec<f64> = times.iter().copied().filter(|t| *t != 0.0).collect();
                if out.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                    return Err(Error::InvalidArgument("explicit times must be finite and nonnegative".into()));
                }
                if out.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidArgument("explicit times must increase".into()));
                }
                out
            }
        };
        Ok(out)
    }

    pub fn t_max(&self) -> f64 {
        match self {
            TimeGrid::Geometric { t_max, .. } => *t_max,
            TimeGrid::Explicit { times } => times.last().copied().unwrap_or(0.0),
        }
    }

    /// Same grid stopped at `t_max`.
    pub fn with_t_max(&self, t_max: f64) -> Self {
        match self {
            TimeGrid::Geometric { t0, ratio, .. } => TimeGrid::Geometric { t0: *t0, ratio: *ratio, t_max },
            TimeGrid::Explicit { times } => TimeGrid::Explicit {
                times: times.iter().copied().filter(|t| *t <= t_max).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step_growth: f64,
    pub max_steps: usize,
    pub grid: TimeGrid,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_step_growth: 5.0,
            max_steps: 2_000_000,
            grid: TimeGrid::up_to(1e6),
        }
    }
}

impl IntegratorConfig {
    pub fn with_grid(grid: TimeGrid) -> Self {
        IntegratorConfig { grid, ..Default::default() }
    }

    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = rel_tol * 1e-2;
        self
    }

    fn control(&self) -> Result<StepControl> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step_growth > 1.0) {
            return Err(Error::InvalidArgument("tolerances must be positive and growth > 1".into()));
        }
        Ok(StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step_growth: self.max_step_growth,
            max_steps: self.max_steps,
        })
    }
}

/// Sampled trajectory; index 0 is `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub frame: Frame,
    pub initial_point: C64,
    pub times: Vec<f64>,
    /// `F_t(z)` in the disk frame, `Φ_t(w)` in the half-plane frame.
    pub points: Vec<C64>,
    /// Accumulated local error estimates, in the units of `points`.
    pub est_error: Vec<f64>,
    /// `(Φ_t + 1)^α - λt`.
    pub offsets: Vec<C64>,
    pub lambda: C64,
    pub alpha: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(Φ_t + 1)^α`.
    pub fn abel(&self, i: usize) -> C64 {
        self.lambda * self.times[i] + self.offsets[i]
    }

    /// `Φ_t + 1`.
    pub fn lifted(&self, i: usize) -> C64 {
        if i == 0 {
            return match self.frame {
                Frame::Disk => 2.0 / (1.0 - self.initial_point),
                Frame::HalfPlane => self.initial_point + 1.0,
            };
        }
        self.abel(i).powf(1.0 / self.alpha)
    }

    /// `1 - F_t`, accurate when `F_t` is close to 1.
    pub fn gap(&self, i: usize) -> C64 {
        if i == 0 && self.frame == Frame::Disk {
            return 1.0 - self.initial_point;
        }
        2.0 / self.lifted(i)
    }

    pub fn disk_point(&self, i: usize) -> C64 {
        match self.frame {
            Frame::Disk => self.points[i],
            Frame::HalfPlane => 1.0 - self.gap(i),
        }
    }

    pub fn half_plane_point(&self, i: usize) -> C64 {
        match self.frame {
            Frame::HalfPlane => self.points[i],
            Frame::Disk => self.lifted(i) - 1.0,
        }
    }

    /// Header `t,re,im,err`, values printed with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,re,im,err")?;
        for i in 0..self.len() {
            let p = self.points[i];
            writeln!(
                out,
                "{},{},{},{}",
                g17(self.times[i]),
                g17(p.re),
                g17(p.im),
                g17(self.est_error[i])
            )?;
        }
        Ok(())
    }
}

fn check_disk_start(z0: C64) -> Result<()> {
    if !(z0.norm() < 1.0 - BOUNDARY_MARGIN) {
        return Err(Error::outside(z0, "unit disk (away from the boundary)"));
    }
    Ok(())
}

fn check_half_plane_start(w0: C64) -> Result<()> {
    if !(w0.re > 0.0 && w0.im.is_finite() && w0.re.is_finite()) {
        return Err(Error::outside(w0, "right half-plane"));
    }
    Ok(())
}

/// `(Φ_0 + 1)^α` for a disk start.
fn abel_start_disk(gen: &GeneratorSpec, z0: C64) -> C64 {
    (2.0 / (1.0 - z0)).powf(gen.alpha())
}

fn abel_start_half_plane(gen: &GeneratorSpec, w0: C64) -> C64 {
    (w0 + 1.0).powf(gen.alpha())
}

/// Rate of the offset `v = u - λt` at time `t`.
fn offset_rate(gen: &GeneratorSpec, t: f64, v: C64) -> Option<C64> {
    let al = gen.alpha();
    let u = gen.lambda() * t + v;
    if !(u.re.is_finite() && u.im.is_finite()) || u.norm() == 0.0 {
        return None;
    }
    // Φ + 1 has positive real part exactly when |arg u| < απ/2.
    if u.arg().abs() >= al * FRAC_PI_2 {
        return None;
    }
    let g = 2.0 / u.powf(1.0 / al);
    Some(al * 2f64.powf(al) * gen.normalized_excess(g))
}

struct Lifted<const N: usize> {
    times: Vec<f64>,
    offsets: Vec<[C64; N]>,
    errors: Vec<f64>,
}

fn lift_flow<const N: usize>(
    gens: [&GeneratorSpec; N],
    u0: [C64; N],
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Lifted<N>> {
    let ctl = cfg.control()?;
    let out = ode::solve(
        |t, v: &[C64; N]| {
            let mut dv = [C64::new(0.0, 0.0); N];
            for k in 0..N {
                dv[k] = offset_rate(gens[k], t, v[k])?;
            }
            Some(dv)
        },
        0.0,
        u0,
        times,
        &ctl,
    )?;
    let mut all_times = Vec::with_capacity(times.len() + 1);
    all_times.push(0.0);
    all_times.extend_from_slice(times);
    let mut offsets = Vec::with_capacity(times.len() + 1);
    offsets.push(u0);
    offsets.extend(out.states);
    let mut errors = Vec::with_capacity(times.len() + 1);
    errors.push(0.0);
    errors.extend(out.errors);
    Ok(Lifted { times: all_times, offsets, errors })
}

fn assemble<const N: usize>(
    gen: &GeneratorSpec,
    frame: Frame,
    start: C64,
    lifted: &Lifted<N>,
    k: usize,
) -> Trajectory {
    let mut traj = Trajectory {
        frame,
        initial_point: start,
        times: lifted.times.clone(),
        points: Vec::with_capacity(lifted.times.len()),
        est_error: Vec::with_capacity(lifted.times.len()),
        offsets: lifted.offsets.iter().map(|s| s[k]).collect(),
        lambda: gen.lambda(),
        alpha: gen.alpha(),
    };
    for i in 0..traj.len() {
        let rel = lifted.errors[i] / traj.abel(i).norm() / gen.alpha();
        let (p, e) = match frame {
            Frame::Disk if i == 0 => (start, 0.0),
            Frame::HalfPlane if i == 0 => (start, 0.0),
            Frame::Disk => {
                let g = traj.gap(i);
                (1.0 - g, g.norm() * rel)
            }
            Frame::HalfPlane => {
                let s = traj.lifted(i);
                (s - 1.0, s.norm() * rel)
            }
        };
        traj.points.push(p);
        traj.est_error.push(e);
    }
    traj
}

/// Trajectory `t ↦ F_t(z0)` sampled on `cfg.grid`.
pub fn integrate_trajectory(gen: &GeneratorSpec, z0: C64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    check_disk_start(z0)?;
    let times = cfg.grid.samples()?;
    let lifted = lift_flow([gen], [abel_start_disk(gen, z0)], &times, cfg)?;
    Ok(assemble(gen, Frame::Disk, z0, &lifted, 0))
}

/// Trajectory `t ↦ Φ_t(w0)` in the right half-plane.
pub fn integrate_half_plane(gen: &GeneratorSpec, w0: C64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    check_half_plane_start(w0)?;
    let times = cfg.grid.samples()?;
    let lifted = lift_flow([gen], [abel_start_half_plane(gen, w0)], &times, cfg)?;
    Ok(assemble(gen, Frame::HalfPlane, w0, &lifted, 0))
}

/// Two trajectories on one shared step sequence, so integration noise in
/// their difference is correlated. The generators must share `α`.
pub fn integrate_pair(
    gens: [&GeneratorSpec; 2],
    starts: [C64; 2],
    frame: Frame,
    cfg: &IntegratorConfig,
) -> Result<[Trajectory; 2]> {
    if (gens[0].alpha() - gens[1].alpha()).abs() > 1e-12 {
        return Err(Error::InvalidArgument("paired trajectories need a common alpha".into()));
    }
    let mut u0 = [C64::new(0.0, 0.0); 2];
    for k in 0..2 {
        u0[k] = match frame {
            Frame::Disk => {
                check_disk_start(starts[k])?;
                abel_start_disk(gens[k], starts[k])
            }
            Frame::HalfPlane => {
                check_half_plane_start(starts[k])?;
                abel_start_half_plane(gens[k], starts[k])
            }
        };
    }
    let times = cfg.grid.samples()?;
    let lifted = lift_flow(gens, u0, &times, cfg)?;
    Ok([
        assemble(gens[0], frame, starts[0], &lifted, 0),
        assemble(gens[1], frame, starts[1], &lifted, 1),
    ])
}

/// Independent route: integrates `dg/dt = -f(1 - g)` for the gap directly
/// in the disk. Intended for moderate times and for cross-checks.
pub fn integrate_disk_direct(gen: &GeneratorSpec, z0: C64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    check_disk_start(z0)?;
    let times = cfg.grid.samples()?;
    let ctl = cfg.control()?;
    let out = ode::solve(
        |_, g: &[C64; 1]| {
            if !(g[0].re > 0.0) || !((1.0 - g[0]).norm() < 1.0 + 1e-9) {
                return None;
            }
            Some([-gen.f_at_gap(g[0])])
        },
        0.0,
        [1.0 - z0],
        &times,
        &ctl,
    )?;
    let al = gen.alpha();
    let mut traj = Trajectory {
        frame: Frame::Disk,
        initial_point: z0,
        times: std::iter::once(0.0).chain(times.iter().copied()).collect(),
        points: vec![z0],
        est_error: vec![0.0],
        offsets: vec![abel_start_disk(gen, z0)],
        lambda: gen.lambda(),
        alpha: al,
    };
    for (k, s) in out.states.iter().enumerate() {
        let g = s[0];
        traj.points.push(1.0 - g);
        traj.est_error.push(out.errors[k]);
        traj.offsets.push((2.0 / g).powf(al) - gen.lambda() * times[k]);
    }
    Ok(traj)
}

fn single_time(t: f64, rel_tol: f64) -> Result<IntegratorConfig> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
    }
    Ok(IntegratorConfig::with_grid(TimeGrid::Explicit { times: vec![t] }).with_tol(rel_tol))
}

/// `1 - F_t(z0)`.
pub fn flow_gap_at(gen: &GeneratorSpec, z0: C64, t: f64, rel_tol: f64) -> Result<C64> {
    check_disk_start(z0)?;
    if t == 0.0 {
        return Ok(1.0 - z0);
    }
    let traj = integrate_trajectory(gen, z0, &single_time(t, rel_tol)?)?;
    Ok(traj.gap(traj.len() - 1))
}

/// `F_t(z0)`.
pub fn flow_at(gen: &GeneratorSpec, z0: C64, t: f64, rel_tol: f64) -> Result<C64> {
    if t == 0.0 {
        check_disk_start(z0)?;
        return Ok(z0);
    }
    Ok(1.0 - flow_gap_at(gen, z0, t, rel_tol)?)
}

/// `Φ_t(w0)`.
pub fn half_plane_flow_at(gen: &GeneratorSpec, w0: C64, t: f64, rel_tol: f64) -> Result<C64> {
    check_half_plane_start(w0)?;
    if t == 0.0 {
        return Ok(w0);
    }
    let traj = integrate_half_plane(gen, w0, &single_time(t, rel_tol)?)?;
    Ok(traj.points[traj.len() - 1])
}

/// `|F_(t+s)(z0) - F_t(F_s(z0))|`, compared through the gaps.
pub fn check_semigroup_property(gen: &GeneratorSpec, z0: C64, s: f64, t: f64, rel_tol: f64) -> Result<f64> {
    check_disk_start(z0)?;
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::InvalidArgument("times must be nonnegative".into()));
    }
    let direct = flow_gap_at(gen, z0, s + t, rel_tol)?;
    let g_s = flow_gap_at(gen, z0, s, rel_tol)?;
    let composed = if t == 0.0 {
        g_s
    } else {
        // Restart from the lifted point so precision near 1 is not lost.
        let cfg = single_time(t, rel_tol)?;
        let u0 = (2.0 / g_s).powf(gen.alpha());
        let lifted = lift_flow([gen], [u0], &[t], &cfg)?;
        let u = gen.lambda() * t + lifted.offsets[1][0];
        2.0 / u.powf(1.0 / gen.alpha())
    };
    Ok((direct - composed).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub z: C64,
    pub f: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionField {
    pub samples: Vec<FieldSample>,
    /// Cell centres that fell outside the disk.
    pub skipped: usize,
}

/// Generator values at the `nx × ny` cell centres of `rect` inside the disk.
pub fn direction_field(gen: &GeneratorSpec, rect: &Rect, nx: usize, ny: usize) -> Result<DirectionField> {
    if nx == 0 || ny == 0 || !(rect.re_max > rect.re_min && rect.im_max > rect.im_min) {
        return Err(Error::InvalidArgument("empty sampling rectangle".into()));
    }
    let mut samples = Vec::with_capacity(nx * ny);
    let mut skipped = 0;
    for j in 0..ny {
        let y = rect.im_min + (rect.im_max - rect.im_min) * (j as f64 + 0.5) / ny as f64;
        for i in 0..nx {
            let x = rect.re_min + (rect.re_max - rect.re_min) * (i as f64 + 0.5) / nx as f64;
            let z = C64::new(x, y);
            if z.norm() < 1.0 {
                samples.push(FieldSample { z, f: gen.f_at_gap(1.0 - z) });
            } else {
                skipped += 1;
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::outside(
            C64::new(0.5 * (rect.re_min + rect.re_max), 0.5 * (rect.im_min + rect.im_max)),
            "unit disk",
        ));
    }
    Ok(DirectionField { samples, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pure_quadratic_has_closed_form() {
        // φ ≡ 2: Φ_t(w) = w + 2t, F_t(z) = 1 - 2/(C(z) + 1 + 2t).
        let gen = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 0.0), 1.0).unwrap();
        let cfg = IntegratorConfig::with_grid(TimeGrid::up_to(1e6));
        let w0 = c(0.3, 1.7);
        let traj = integrate_half_plane(&gen, w0, &cfg).unwrap();
        for i in 0..traj.len() {
            let exact = w0 + 2.0 * traj.times[i];
            assert!((traj.points[i] - exact).norm() <= 1e-12 * exact.norm());
        }
        let z0 = c(0.2, -0.4);
        let traj = integrate_trajectory(&gen, z0, &cfg).unwrap();
        let w = (1.0 + z0) / (1.0 - z0);
        for i in 0..traj.len() {
            let exact_gap = 2.0 / (w + 1.0 + 2.0 * traj.times[i]);
            assert!((traj.gap(i) - exact_gap).norm() <= 1e-13 * exact_gap.norm());
        }
    }

    #[test]
    fn grid_includes_end_point() {
        let s = TimeGrid::up_to(1e3).samples().unwrap();
        assert_eq!(s[0], 1.0);
        assert_eq!(*s.last().unwrap(), 1e3);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert!(TimeGrid::Explicit { times: vec![2.0, 1.0] }.samples().is_err());
    }

    #[test]
    fn rejects_boundary_starts() {
        let gen = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 1.0), 0.5).unwrap();
        let cfg = IntegratorConfig::with_grid(TimeGrid::up_to(10.0));
        assert!(integrate_trajectory(&gen, c(1.0, 0.0), &cfg).is_err());
        assert!(integrate_trajectory(&gen, c(0.0, 1.0 - 1e-13), &cfg).is_err());
        assert!(integrate_half_plane(&gen, c(-1.0, 0.0), &cfg).is_err());
    }

    #[test]
    fn csv_layout() {
        let gen = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 0.0), 1.0).unwrap();
        let cfg = IntegratorConfig::with_grid(TimeGrid::Explicit { times: vec![1.0, 2.0] });
        let traj = integrate_trajectory(&gen, c(0.0, 0.0), &cfg).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,re,im,err");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0,0,"));
    }

    #[test]
    fn direction_field_skips_outside_points() {
        let gen = GeneratorSpec::two_term(c(1.0, 0.0), 1.0, c(0.0, 1.0), 0.5).unwrap();
        let rect = Rect { re_min: 0.75, re_max: 1.0, im_min: -0.12, im_max: 0.03 };
        let field = direction_field(&gen, &rect, 20, 20).unwrap();
        assert_eq!(field.samples.len() + field.skipped, 400);
        assert!(field.samples.iter().all(|s| s.z.norm() < 1.0));
        let far = Rect { re_min: 2.0, re_max: 3.0, im_min: 0.0, im_max: 1.0 };
        assert!(direction_field(&gen, &far, 4, 4).is_err());
    }
}
