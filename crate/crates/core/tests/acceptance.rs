//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p parabolic --test acceptance -- --nocapture` to see
//! the report. The whole suite is executed twice to check that the report is
//! byte-identical.

mod common;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use common::{c, disk_points, one_sided, matrix, pure_quadratic, two_term};
use parabolic::asymptotics::{appendix_limit, remainder_decay, FramePoint, Regime};
use parabolic::flow::{integrate_half_plane, integrate_trajectory, IntegratorConfig, TimeGrid};
use parabolic::fmt::g17;
use parabolic::generators::{validate_admissibility, AdmissibilityGrid, GeneratorSpec};
use parabolic::geometry::{
    asymptote_report, classify_omega, contact_order_of, curvature_at_gap, mutual_position, parallel_ratio_check,
    plane_curvature, twist_is_real, ImCondition, OmegaRegion,
};
use parabolic::koenigs::{abel_residual, KoenigsEvaluator};
use parabolic::quad::QuadTol;
use parabolic::rigidity::weak_rigidity_experiment;
use parabolic::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot be met by any implementation, with the reason.
/// They are still evaluated at the stated tolerance and reported as FAIL.
const UNATTAINABLE: &[(u32, &str)] = &[(
    9,
    "for beta = alpha the scaled remainder t*Gamma/log(t+1) behaves like \
     (sigma(w) + C/lambda)/(alpha*log t), so its value at 1e6 is about half its value at 1e3",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail }
    }
}

fn cfg(t_max: f64) -> IntegratorConfig {
    IntegratorConfig::with_grid(TimeGrid::up_to(t_max))
}

fn evaluator(gen: &GeneratorSpec) -> KoenigsEvaluator {
    KoenigsEvaluator::new(gen, QuadTol::default()).expect("Kœnigs evaluator")
}

fn criterion_1() -> Outcome {
    let gen = pure_quadratic();
    let points: Vec<C64> = (0..10)
        .map(|k| C64::from_polar(0.09 * k as f64, 0.7 * k as f64))
        .collect();
    let mut worst = 0.0f64;
    for &z in &points {
        let traj = integrate_trajectory(&gen, z, &cfg(1e4)).expect("trajectory");
        let h = z / (1.0 - z);
        for i in 0..traj.len() {
            let s = h + traj.times[i];
            let exact = s / (1.0 + s);
            worst = worst.max((traj.disk_point(i) - exact).norm());
        }
    }
    Outcome::new(worst < 1e-8, format!("max |F - oracle| = {} over 10 points, t <= 1e4", g17(worst)))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut who = "";
    for (name, gen) in matrix() {
        let ev = evaluator(&gen);
        for &z in &disk_points() {
            for &t in &[1.0, 10.0, 100.0, 1000.0] {
                let r = abel_residual(&ev, z, t, 1e-12).expect("Abel residual") / (1.0 + t);
                if r > worst {
                    worst = r;
                    who = name;
                }
            }
        }
    }
    Outcome::new(worst < 1e-6, format!("max residual/(1+t) = {} ({who})", g17(worst)))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut who = "";
    for (name, gen) in matrix() {
        let lam = gen.lambda().norm();
        let al = gen.alpha();
        for &z in &disk_points() {
            let w = parabolic::generators::cayley(z).unwrap();
            let traj = integrate_half_plane(&gen, w, &cfg(1e6)).expect("trajectory");
            let i = traj.len() - 1;
            let t = traj.times[i];
            let dev = (traj.gap(i).norm() * (lam * t).powf(1.0 / al) / 2.0 - 1.0).abs();
            if dev > worst {
                worst = dev;
                who = name;
            }
        }
    }
    Outcome::new(worst < 0.02, format!("max deviation at t = 1e6: {} ({who})", g17(worst)))
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    let mut who = "";
    for (name, gen) in matrix() {
        if gen.is_tangential() {
            continue;
        }
        let psi = parabolic::geometry::limit_slope(&gen);
        for &z in &disk_points() {
            let w = parabolic::generators::cayley(z).unwrap();
            let traj = integrate_half_plane(&gen, w, &cfg(1e6)).expect("trajectory");
            let g = traj.gap(traj.len() - 1);
            let dev = (g * C64::from_polar(1.0, -psi)).arg().abs();
            if dev > worst {
                worst = dev;
                who = name;
            }
        }
    }
    Outcome::new(worst < 1e-2, format!("max |arg(1-F) + arg(a)/alpha| at t = 1e6: {} ({who})", g17(worst)))
}

fn criterion_5() -> Outcome {
    let gen = one_sided();
    let ev = evaluator(&gen);
    let rep = contact_order_of(&ev, c(0.0, 0.0), &cfg(1e6)).expect("contact order");
    let constant = rep.limit_constant.map(|l| l.value.re).unwrap_or(f64::NAN);
    let pass = (rep.estimated_order - 0.5).abs() <= 0.05 && ((constant - 2.0) / 2.0).abs() <= 0.05;
    Outcome::new(
        pass,
        format!(
            "order {} (r2 {}), constant {} vs 2",
            g17(rep.estimated_order),
            g17(rep.fit_r2),
            g17(constant)
        ),
    )
}

/// Independent membership tests written from the set-builder definitions.
fn memberships(al: f64, be: f64) -> [bool; 5] {
    let in4 = be == 1.0 && 1.0 < al;
    [
        al > 1.0 && be > 1.0,
        al == 1.0 && 1.0 < be,
        al < 1.0f64.min(be),
        in4,
        be <= 1.0f64.min(al) && !in4,
    ]
}

fn criterion_6() -> Outcome {
    use OmegaRegion::*;
    let table = [
        ((1.5, 2.0), Omega1),
        ((1.0, 2.0), Omega2),
        ((0.5, 0.7), Omega3),
        ((2.0, 1.0), Omega4),
        ((1.0, 1.0), Omega5),
    ];
    let table_ok = table.iter().all(|((a, b), r)| classify_omega(*a, *b).ok() == Some(*r));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for k in 0..10_000 {
        // Every fourth sample sits on one of the lines α = 1, β = 1, β = α.
        let mut al: f64 = rng.gen_range(1e-6..=2.0);
        let mut be: f64 = rng.gen_range(1e-6..4.0);
        match k % 4 {
            1 => al = 1.0,
            2 => be = 1.0,
            3 => be = al,
            _ => {}
        }
        if k % 100 == 0 {
            al = 2.0;
        }
        let m = memberships(al, be);
        let region = classify_omega(al, be).expect("in domain");
        let idx = region as usize;
        if m.iter().filter(|x| **x).count() != 1 || !m[idx] {
            bad += 1;
        }
    }
    Outcome::new(table_ok && bad == 0, format!("table {}, random mismatches {bad}/10000", if table_ok { "exact" } else { "wrong" }))
}

fn criterion_7() -> Outcome {
    let cases: Vec<(&str, GeneratorSpec, &str)> = vec![
        ("omega1", two_term(c(1.0, 0.0), 1.5, c(0.0, 0.2), 2.0), "through"),
        ("omega2", two_term(C64::from_polar(1.0, std::f64::consts::FRAC_PI_6), 1.0, c(0.2, 0.0), 1.5), "own"),
        ("omega3", two_term(c(1.0, 0.0), 0.5, c(0.1, 0.1), 0.7), "none"),
        ("omega4_im", two_term(c(1.0, 0.0), 1.5, c(0.0, 0.5), 1.0), "closed_form"),
        ("omega4_real", two_term(c(1.0, 0.0), 1.5, c(0.3, 0.0), 1.0), "through"),
        ("omega5_real", two_term(c(1.0, 0.0), 1.5, c(0.3, 0.0), 0.5), "through"),
        ("omega5_im", one_sided(), "none"),
    ];
    let w = c(2.0, 1.0);
    let mut pass = true;
    let mut detail = String::new();
    for (name, gen, expect) in cases {
        let ev = evaluator(&gen);
        let rep = asymptote_report(&ev, w, &cfg(1e6), ImCondition::Auto).expect("asymptote report");
        let lim = rep.numeric_limit;
        let ok = match expect {
            "through" => !lim.divergent && lim.value.re.abs() < 0.01,
            "closed_form" => {
                let k = rep.predicted_limit.unwrap_or(f64::NAN);
                !lim.divergent && ((lim.value.re - k) / k).abs() < 0.01
            }
            "own" => {
                let other = asymptote_report(&ev, c(1.0, 0.0), &cfg(1e6), ImCondition::Auto).expect("report");
                let k = rep.predicted_limit.unwrap_or(f64::NAN);
                !lim.divergent
                    && ((lim.value.re - k) / k).abs() < 0.01
                    && (other.numeric_limit.value.re - lim.value.re).abs() > 0.01
            }
            _ => lim.value.norm() > 1e2,
        };
        pass &= ok;
        let _ = write!(
            detail,
            "{name}={}{} ",
            g17(lim.value.re),
            rep.predicted_limit.map(|p| format!("(pred {})", g17(p))).unwrap_or_default()
        );
    }
    Outcome::new(pass, detail.trim_end().to_string())
}

fn criterion_8() -> Outcome {
    let conv = two_term(c(1.0, 0.0), 1.5, c(0.2, 0.0), 1.2);
    let ev = evaluator(&conv);
    let a = mutual_position(&ev, c(1.0, 0.0), c(1.5, 0.0), &cfg(1e6)).expect("mutual position");
    let div = two_term(c(1.0, 0.0), 0.5, c(0.1, 0.0), 0.7);
    let ev = evaluator(&div);
    let b = mutual_position(&ev, c(1.0, 0.0), c(1.5, 0.0), &cfg(1e6)).expect("mutual position");
    let par = two_term(c(1.0, 0.0), 1.0, c(0.2, 0.1), 1.5);
    let ev = evaluator(&par);
    let pairs = [(c(1.0, 0.0), c(2.0, 0.0)), (c(1.0, 1.0), c(3.0, 0.0)), (c(0.5, -1.0), c(2.0, 2.0))];
    let r = parallel_ratio_check(&ev, &pairs, &cfg(1e6)).expect("parallel ratios");
    let pass = a.last_distance < 1e-2 && b.last_distance > 1e2 && r.max_relative_spread < 0.02;
    Outcome::new(
        pass,
        format!(
            "convergent {}, divergent {}, ratio spread {} (ratio {})",
            g17(a.last_distance),
            g17(b.last_distance),
            g17(r.max_relative_spread),
            g17(r.ratios[0].re)
        ),
    )
}

fn criterion_9() -> Outcome {
    let cases: Vec<(&str, GeneratorSpec)> = vec![
        ("beta_less", one_sided()),
        ("beta_equal", two_term(c(1.0, 0.0), 1.0, c(0.3, 0.0), 1.0)),
        ("beta_greater", GeneratorSpec::rational_example()),
        ("pure_power", pure_quadratic()),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (name, gen) in cases {
        let ev = evaluator(&gen);
        let rs = remainder_decay(&ev, FramePoint::HalfPlane(c(1.0, 1.0)), &cfg(1e6)).expect("remainders");
        let at = |t: f64| {
            rs.iter()
                .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
                .map(|s| s.value.norm())
                .unwrap()
        };
        let ratio = at(1e6) / at(1e3);
        let last_decade: Vec<f64> = rs.iter().filter(|s| s.t >= 1e5).map(|s| s.value.norm()).collect();
        let monotone = last_decade.windows(2).all(|w| w[1] <= w[0]);
        let ok = ratio < 0.1 && monotone;
        pass &= ok;
        let regime = match Regime::of(&gen) {
            Regime::BetaLess => "<",
            Regime::BetaEqual => "=",
            Regime::BetaGreater { .. } => ">",
            Regime::PurePower => "0",
        };
        let _ = write!(detail, "{name}[{regime}] ratio {} monotone {monotone}; ", g17(ratio));
    }
    Outcome::new(pass, detail.trim_end_matches("; ").to_string())
}

fn criterion_10() -> Outcome {
    let gen = one_sided();
    let ev = evaluator(&gen);
    let mut worst = 0.0f64;
    for w in [c(2.0, 0.0), c(3.0, 0.0), c(1.0, 1.0)] {
        let chk = appendix_limit(&ev, FramePoint::HalfPlane(w), &cfg(1e6)).expect("appendix limit");
        worst = worst.max(chk.relative_error);
    }
    Outcome::new(worst < 0.02, format!("max relative error {}", g17(worst)))
}

fn criterion_11() -> Outcome {
    let gen = one_sided();
    let mut pass = true;
    let mut detail = String::new();
    for cc in [c(0.0, 0.0), c(0.1, 0.0), c(-0.1, 0.0), c(0.0, 0.1)] {
        let v = weak_rigidity_experiment(&gen, cc, c(0.0, 0.0), &cfg(1e6)).expect("weak rigidity");
        let is_zero = cc == c(0.0, 0.0);
        let ok = if is_zero {
            v.report.above_all
        } else {
            !v.report.above_all && v.order_matches_beta
        };
        pass &= ok;
        let order = if v.report.above_all { "above_all".to_string() } else { g17(v.report.estimated_order) };
        let _ = write!(detail, "c={cc}: {order}; ");
    }
    Outcome::new(pass, detail.trim_end_matches("; ").to_string())
}

fn criterion_12() -> Outcome {
    let omega1 = two_term(c(1.0, 0.0), 1.5, c(0.2, 0.0), 2.0);
    let t1 = integrate_trajectory(&omega1, c(0.0, 0.1), &cfg(1e5)).expect("trajectory");
    let k1 = curvature_at_gap(&omega1, t1.gap(t1.len() - 1)).unwrap().abs();
    let os = one_sided();
    let t2 = integrate_trajectory(&os, c(0.0, 0.0), &cfg(1e5)).expect("trajectory");
    let k2 = curvature_at_gap(&os, t2.gap(t2.len() - 1)).unwrap().abs();
    let center = c(0.25, -0.5);
    let mut oracle = 0.0f64;
    for k in 0..16 {
        let z = center + C64::from_polar(0.1 + 0.2 * k as f64, 0.4 * k as f64);
        let kappa = plane_curvature(C64::i() * (z - center), C64::i());
        oracle = oracle.max((kappa - 1.0 / (z - center).norm()).abs());
    }
    Outcome::new(
        k1 < 1e-2 && k2 > 1e2 && oracle < 1e-10,
        format!("omega1 {}, one_sided {}, circle oracle error {}", g17(k1), g17(k2), g17(oracle)),
    )
}

type Criterion = (u32, fn() -> Outcome, Option<Duration>);

fn criteria() -> Vec<Criterion> {
    vec![
        (1, criterion_1, Some(Duration::from_secs(1))),
        (2, criterion_2, Some(Duration::from_secs(30))),
        (3, criterion_3, None),
        (4, criterion_4, None),
        (5, criterion_5, None),
        (6, criterion_6, None),
        (7, criterion_7, None),
        (8, criterion_8, None),
        (9, criterion_9, None),
        (10, criterion_10, None),
        (11, criterion_11, None),
        (12, criterion_12, None),
    ]
}

/// Writes straight to the process stdout so the line shows without `--nocapture`.
fn emit(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = std::io::Write::write_all(&mut out, format!("{line}\n").as_bytes());
    let _ = std::io::Write::flush(&mut out);
}

/// Runs criteria 1–12; returns the deterministic report and the pass flags.
fn run_suite(verbose: bool) -> (String, Vec<(u32, bool)>) {
    let mut report = String::new();
    let mut flags = Vec::new();
    for (id, run, limit) in criteria() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = limit.map_or(true, |l| elapsed < l);
        let pass = out.pass && in_time;
        let _ = writeln!(report, "criterion {id}: {} {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if verbose {
            let timing = match limit {
                Some(l) => format!(" [{:.3}s, limit {}s]", elapsed.as_secs_f64(), l.as_secs()),
                None => format!(" [{:.3}s]", elapsed.as_secs_f64()),
            };
            emit(format!("criterion {id}: {}  {}{timing}", if pass { "PASS" } else { "FAIL" }, out.detail));
            if let Some((_, why)) = UNATTAINABLE.iter().find(|(k, _)| *k == id) {
                emit(format!("    known unattainable: {why}"));
            }
        }
        flags.push((id, pass));
    }
    (report, flags)
}

#[test]
fn acceptance() {
    let mut used: Vec<GeneratorSpec> = matrix().into_iter().map(|(_, g)| g).collect();
    used.extend([
        two_term(c(1.0, 0.0), 1.5, c(0.0, 0.2), 2.0),
        two_term(C64::from_polar(1.0, std::f64::consts::FRAC_PI_6), 1.0, c(0.2, 0.0), 1.5),
        two_term(c(1.0, 0.0), 0.5, c(0.1, 0.1), 0.7),
        two_term(c(1.0, 0.0), 1.5, c(0.0, 0.5), 1.0),
        two_term(c(1.0, 0.0), 1.5, c(0.3, 0.0), 1.0),
        two_term(c(1.0, 0.0), 1.5, c(0.3, 0.0), 0.5),
        two_term(c(1.0, 0.0), 1.5, c(0.2, 0.0), 1.2),
        two_term(c(1.0, 0.0), 0.5, c(0.1, 0.0), 0.7),
        two_term(c(1.0, 0.0), 1.0, c(0.2, 0.1), 1.5),
        two_term(c(1.0, 0.0), 1.5, c(0.2, 0.0), 2.0),
    ]);
    for g in &used {
        let rep = validate_admissibility(g, &AdmissibilityGrid::default());
        assert!(rep.pass, "inadmissible generator {:?}: min Re p = {}", g.params(), rep.min_re_p);
    }
    assert!(!twist_is_real(&one_sided(), ImCondition::Auto));

    let start = Instant::now();
    let (first, flags) = run_suite(true);
    let (second, _) = run_suite(false);
    let elapsed = start.elapsed();
    let deterministic = first == second;
    let in_time = elapsed < Duration::from_secs(600);
    emit(format!(
        "criterion 13: {}  reports identical: {deterministic}, two full runs in {:.1}s (limit 600s)",
        if deterministic && in_time { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    ));

    let mut unexpected = Vec::new();
    for (id, pass) in flags {
        let known = UNATTAINABLE.iter().any(|(k, _)| *k == id);
        if pass == known {
            unexpected.push(id);
        }
    }
    assert!(deterministic && in_time, "criterion 13 failed");
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
