//! Property-based invariants.

mod common;

use common::{c, one_sided, pure_quadratic, two_term};
use parabolic::asymptotics::{predict_disk, predict_halfplane};
use parabolic::extrapolate::estimate_limit;
use parabolic::flow::{check_semigroup_property, flow_at};
use parabolic::fmt::g17;
use parabolic::generators::{cayley, cayley_inverse};
use parabolic::geometry::{classify_omega, plane_curvature, OmegaRegion};
use parabolic::koenigs::{abel_residual, KoenigsEvaluator};
use parabolic::quad::QuadTol;
use parabolic::C64;
use proptest::prelude::*;

fn disk_point() -> impl Strategy<Value = C64> {
    (0.0f64..0.95, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, th)| C64::from_polar(r, th))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn cayley_round_trip(z in disk_point()) {
        let w = cayley(z).unwrap();
        prop_assert!(w.re > 0.0);
        prop_assert!((cayley_inverse(w).unwrap() - z).norm() < 1e-12 * (1.0 + w.norm()));
    }

    #[test]
    fn omega_regions_partition(alpha in 1e-6f64..=2.0, beta in 1e-6f64..5.0, snap in 0u8..4) {
        let (al, be) = match snap {
            1 => (1.0, beta),
            2 => (alpha, 1.0),
            3 => (alpha, alpha),
            _ => (alpha, beta),
        };
        let members = [
            al > 1.0 && be > 1.0,
            al == 1.0 && be > 1.0,
            al < 1.0f64.min(be),
            be == 1.0 && al > 1.0,
            be <= 1.0f64.min(al) && !(be == 1.0 && al > 1.0),
        ];
        prop_assert_eq!(members.iter().filter(|m| **m).count(), 1);
        let region = classify_omega(al, be).unwrap();
        let idx = match region {
            OmegaRegion::Omega1 => 0,
            OmegaRegion::Omega2 => 1,
            OmegaRegion::Omega3 => 2,
            OmegaRegion::Omega4 => 3,
            OmegaRegion::Omega5 => 4,
        };
        prop_assert!(members[idx]);
    }

    #[test]
    fn pure_quadratic_flow_is_exact(z in disk_point(), t in 0.0f64..1e4) {
        let f = flow_at(&pure_quadratic(), z, t, 1e-12).unwrap();
        let s = z / (1.0 - z) + t;
        prop_assert!((f - s / (1.0 + s)).norm() < 1e-11);
    }

    #[test]
    fn semigroup_property(z in disk_point(), s in 0.0f64..50.0, t in 0.0f64..50.0) {
        prop_assert!(check_semigroup_property(&one_sided(), z, s, t, 1e-12).unwrap() < 1e-9);
    }

    #[test]
    fn abel_equation_holds(z in disk_point(), t in 0.5f64..200.0) {
        let ev = KoenigsEvaluator::new(&one_sided(), QuadTol::default()).unwrap();
        prop_assert!(abel_residual(&ev, z, t, 1e-12).unwrap() < 1e-7 * (1.0 + t));
    }

    #[test]
    fn disk_prediction_is_half_plane_prediction(z in disk_point(), t in 1.0f64..1e6, beta in 0.1f64..0.9) {
        let gen = two_term(c(1.0, 0.0), 1.0, c(0.1, 0.2), beta);
        let ev = KoenigsEvaluator::new(&gen, QuadTol::default()).unwrap();
        let d = predict_disk(&ev, z, t).unwrap();
        let h = predict_halfplane(&ev, cayley(z).unwrap(), t).unwrap();
        prop_assert_eq!(2.0 * d, h);
    }

    #[test]
    fn limit_of_power_tail(l_re in -5.0f64..5.0, l_im in -5.0f64..5.0, k in 0.1f64..3.0, p in 0.2f64..2.0) {
        let target = c(l_re, l_im);
        let samples: Vec<(f64, C64)> = (0..60)
            .map(|i| {
                let t = 2f64.powf(i as f64 / 4.0);
                (t, target + k * t.powf(-p))
            })
            .collect();
        let est = estimate_limit(&samples).unwrap();
        prop_assert!(!est.divergent);
        prop_assert!((est.value - target).norm() < 1e-6 * (1.0 + k), "{:?}", est);
    }

    #[test]
    fn circle_curvature(cx in -2.0f64..2.0, cy in -2.0f64..2.0, r in 0.01f64..10.0, th in 0.0f64..6.28) {
        let center = c(cx, cy);
        let z = center + C64::from_polar(r, th);
        let k = plane_curvature(C64::i() * (z - center), C64::i());
        prop_assert!((k - 1.0 / r).abs() < 1e-10 * (1.0 + 1.0 / r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, ..ProptestConfig::default() })]

    #[test]
    fn g17_round_trips(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        prop_assert_eq!(g17(x).parse::<f64>().unwrap(), x);
    }
}
