//! Small helpers for expansions near the Denjoy–Wolff point.

use num_complex::Complex64 as C64;

/// `ln(1 + y)` accurate for small `|y|`.
pub(crate) fn ln_1p(y: C64) -> C64 {
    let re = 0.5 * (2.0 * y.re + y.norm_sqr()).ln_1p();
    let im = y.im.atan2(1.0 + y.re);
    C64::new(re, im)
}

/// `e^w - 1` accurate for small `|w|`.
pub(crate) fn exp_m1(w: C64) -> C64 {
    let half = (0.5 * w.im).sin();
    let cos_m1 = -2.0 * half * half;
    let em1 = w.re.exp_m1();
    C64::new(em1 * w.im.cos() + cos_m1, w.re.exp() * w.im.sin())
}

/// `(1 + y)^s - 1` on the principal branch.
pub(crate) fn pow_1p_m1(y: C64, s: f64) -> C64 {
    exp_m1(ln_1p(y) * s)
}

/// Generalized binomial coefficient `(s choose j)`.
pub(crate) fn binomial(s: f64, j: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..j {
        out *= (s - i as f64) / (i + 1) as f64;
    }
    out
}

/// Sorted distinct values `Σ nᵢ incᵢ - shift` that are `> floor`, up to `cap`.
///
/// With `include_zero_sum` the empty sum also counts.
pub(crate) fn lattice_exponents(
    increments: &[f64],
    shift: f64,
    floor: f64,
    cap: f64,
    limit: usize,
    include_zero_sum: bool,
) -> Vec<f64> {
    let incs: Vec<f64> = increments.iter().copied().filter(|x| *x > 1e-12).collect();
    let mut sums = vec![0.0];
    let mut frontier = vec![0.0];
    // Enumerate by depth; sums grow so the loop ends once everything passes `cap`.
    for _ in 0..64 {
        let mut next = Vec::new();
        for &s in &frontier {
            for &inc in &incs {
                let v = s + inc;
                if v - shift <= cap + 1e-9 && !sums.iter().any(|x: &f64| (x - v).abs() < 1e-9) {
                    sums.push(v);
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut out: Vec<f64> = sums
        .into_iter()
        .filter(|s| include_zero_sum || *s > 0.0)
        .map(|s| s - shift)
        .filter(|e| *e > floor + 1e-9)
        .collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.truncate(limit);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_accuracy() {
        let y = C64::new(1e-12, -3e-13);
        let exact_ln = y - y * y / 2.0 + y * y * y / 3.0;
        assert!((ln_1p(y) - exact_ln).norm() <= 1e-28);
        let w = C64::new(-2e-11, 5e-12);
        let exact_exp = w + w * w / 2.0;
        assert!((exp_m1(w) - exact_exp).norm() <= 1e-26);
        let r = pow_1p_m1(C64::new(0.3, 0.2), 1.5);
        let direct = C64::new(1.3, 0.2).powf(1.5) - 1.0;
        assert!((r - direct).norm() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(2.0, 3), 0.0);
        assert!((binomial(0.5, 2) + 0.125).abs() < 1e-16);
        assert_eq!(binomial(3.0, 0), 1.0);
    }

    #[test]
    fn lattice() {
        let e = lattice_exponents(&[0.5, 1.0], 1.0, 0.0, 3.0, 10, false);
        assert_eq!(e, vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        let e = lattice_exponents(&[2.0], 0.0, -1.0, 5.0, 10, true);
        assert_eq!(e, vec![0.0, 2.0, 4.0]);
    }
}
