//! Limits of sampled sequences and log-log power fits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the limit was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitModel {
    /// Least-squares fit `L + Σ cₖ t^(-pₖ)`; the field is the leading exponent.
    TailFit(f64),
    Aitken,
    LastValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: C64,
    pub error: f64,
    pub model: LimitModel,
    pub samples_used: usize,
    /// The tail does not settle: the value is the last sample.
    pub divergent: bool,
}

impl LimitEstimate {
    /// `|value - target| <= tol`, false for divergent tails.
    pub fn agrees_with(&self, target: C64, tol: f64) -> bool {
        !self.divergent && (self.value - target).norm() <= tol
    }
}

/// Tail model for [`estimate_limit_with`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    /// Single correction `c t^(-p)` with `p` fitted.
    Free,
    /// Known correction exponents, smallest first.
    Exponents(Vec<f64>),
    /// Iterated Aitken Δ² on the last samples.
    Aitken,
}

pub const MIN_SAMPLES: usize = 6;

/// Limit of `v(t)` as `t → ∞` from geometrically spaced samples.
pub fn estimate_limit(samples: &[(f64, C64)]) -> Result<LimitEstimate> {
    estimate_limit_with(samples, &TailModel::Free)
}

pub fn estimate_limit_with(samples: &[(f64, C64)], model: &TailModel) -> Result<LimitEstimate> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidArgument("sample times must increase".into()));
        }
    }
    if samples.iter().any(|(t, v)| !(t.is_finite() && *t > 0.0 && v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidArgument("samples must be finite with positive times".into()));
    }
    let n = samples.len();
    let tail_len = (n / 2).max(MIN_SAMPLES).min(n);
    let tail = &samples[n - tail_len..];
    let last = tail[tail_len - 1].1;
    let scale = tail.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let spread = tail.iter().map(|(_, v)| (v - last).norm()).fold(0.0, f64::max);
    if spread <= 1e-13 * scale || spread == 0.0 {
        return Ok(LimitEstimate {
            value: last,
            error: spread,
            model: LimitModel::LastValue,
            samples_used: tail_len,
            divergent: false,
        });
    }
    if let Some(growth) = difference_growth(tail) {
        if growth > -0.05 {
            // Flat differences at rounding level mean the tail has settled.
            if spread <= 1e-5 * scale {
                return Ok(LimitEstimate {
                    value: last,
                    error: spread,
                    model: LimitModel::LastValue,
                    samples_used: tail_len,
                    divergent: false,
                });
            }
            return Ok(divergent(tail));
        }
    }
    let est = match model {
        TailModel::Free => free_fit(tail),
        TailModel::Exponents(ps) => exponent_fit(tail, ps),
        TailModel::Aitken => aitken(tail),
    };
    let mut est = est?;
    if est.error > scale {
        est = divergent(tail);
    }
    Ok(est)
}

fn divergent(tail: &[(f64, C64)]) -> LimitEstimate {
    let last = tail[tail.len() - 1].1;
    LimitEstimate {
        value: last,
        error: (last - tail[0].1).norm(),
        model: LimitModel::LastValue,
        samples_used: tail.len(),
        divergent: true,
    }
}

/// Log-log slope of successive differences; `None` if they vanish.
fn difference_growth(tail: &[(f64, C64)]) -> Option<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for w in tail.windows(2) {
        let d = (w[1].1 - w[0].1).norm() / (w[1].0 / w[0].0).ln();
        if d > 0.0 {
            xs.push((w[0].0 * w[1].0).sqrt().ln());
            ys.push(d.ln());
        }
    }
    if xs.len() < 3 {
        return None;
    }
    Some(linear_fit(&xs, &ys).slope)
}

/// Complex least squares with a real design matrix.
fn lstsq(design: &DMatrix<f64>, values: &[C64]) -> Option<(Vec<C64>, Vec<C64>)> {
    // Unit-norm columns keep the singular value cutoff meaningful.
    let norms: Vec<f64> = design.column_iter().map(|c| c.norm().max(1e-300)).collect();
    let mut scaled = design.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col /= norms[j];
    }
    let svd = scaled.svd(true, true);
    let re = DVector::from_iterator(values.len(), values.iter().map(|v| v.re));
    let im = DVector::from_iterator(values.len(), values.iter().map(|v| v.im));
    let x_re = svd.solve(&re, 1e-13).ok()?;
    let x_im = svd.solve(&im, 1e-13).ok()?;
    let x_re = DVector::from_iterator(norms.len(), x_re.iter().zip(&norms).map(|(x, n)| x / n));
    let x_im = DVector::from_iterator(norms.len(), x_im.iter().zip(&norms).map(|(x, n)| x / n));
    let coef: Vec<C64> = x_re.iter().zip(x_im.iter()).map(|(r, i)| C64::new(*r, *i)).collect();
    let fit_re = design * &x_re;
    let fit_im = design * &x_im;
    let resid = values
        .iter()
        .enumerate()
        .map(|(k, v)| v - C64::new(fit_re[k], fit_im[k]))
        .collect();
    Some((coef, resid))
}

fn design(tail: &[(f64, C64)], ps: &[f64]) -> DMatrix<f64> {
    let t_ref = tail[tail.len() - 1].0;
    DMatrix::from_fn(tail.len(), ps.len() + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            (tail[i].0 / t_ref).powf(-ps[j - 1])
        }
    })
}

fn fit_with(tail: &[(f64, C64)], ps: &[f64]) -> Option<(C64, f64, Vec<C64>)> {
    let values: Vec<C64> = tail.iter().map(|s| s.1).collect();
    let (coef, resid) = lstsq(&design(tail, ps), &values)?;
    let ss = resid.iter().map(|r| r.norm_sqr()).sum();
    Some((coef[0], ss, resid))
}

fn finish(tail: &[(f64, C64)], ps: &[f64], leading: f64) -> Result<LimitEstimate> {
    let (value, _, resid) =
        fit_with(tail, ps).ok_or_else(|| Error::Unreliable("singular tail fit".into()))?;
    let third = (tail.len() / 3).max(1);
    let resid_max = resid[tail.len() - third..].iter().map(|r| r.norm()).fold(0.0, f64::max);
    // Stability: refit on the later part of the tail.
    let drop = tail.len() / 3;
    let later = &tail[drop..];
    let shift = if later.len() >= ps.len() + 2 {
        fit_with(later, ps).map(|(v, _, _)| (v - value).norm())
    } else {
        None
    };
    let shift = match shift {
        Some(s) => s,
        None if !ps.is_empty() => fit_with(tail, &ps[..ps.len() - 1])
            .map(|(v, _, _)| (v - value).norm())
            .unwrap_or(f64::INFINITY),
        None => 0.0,
    };
    Ok(LimitEstimate {
        value,
        error: resid_max.max(shift),
        model: LimitModel::TailFit(leading),
        samples_used: tail.len(),
        divergent: false,
    })
}

fn free_fit(tail: &[(f64, C64)]) -> Result<LimitEstimate> {
    let cost = |p: f64| fit_with(tail, &[p]).map(|(_, ss, _)| ss).unwrap_or(f64::INFINITY);
    let (lo, hi) = (0.01f64, 6.0f64);
    let m = 160;
    let grid: Vec<f64> = (0..=m).map(|i| lo * (hi / lo).powf(i as f64 / m as f64)).collect();
    let costs: Vec<f64> = grid.iter().map(|p| cost(*p)).collect();
    let best = (0..=m).min_by(|a, b| costs[*a].total_cmp(&costs[*b])).unwrap();
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(m)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    for _ in 0..60 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = cost(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = cost(x2);
        }
    }
    let p = 0.5 * (a + b);
    finish(tail, &[p], p)
}

fn exponent_fit(tail: &[(f64, C64)], ps: &[f64]) -> Result<LimitEstimate> {
    let mut ps: Vec<f64> = ps.iter().copied().filter(|p| *p > 0.0).collect();
    if ps.is_empty() {
        return free_fit(tail);
    }
    // Keep at least two degrees of freedom per fitted exponent.
    let max_terms = (tail.len().saturating_sub(2)) / 2;
    ps.truncate(max_terms.max(1));
    let leading = ps[0];
    finish(tail, &ps, leading)
}

fn aitken(tail: &[(f64, C64)]) -> Result<LimitEstimate> {
    let mut seq: Vec<C64> = tail.iter().map(|s| s.1).collect();
    let mut prev_best = seq[seq.len() - 1];
    let mut err = f64::INFINITY;
    while seq.len() >= 3 {
        let mut next = Vec::with_capacity(seq.len() - 2);
        for w in seq.windows(3) {
            let d1 = w[1] - w[0];
            let d2 = w[2] - w[1];
            let den = d2 - d1;
            if den.norm() <= 1e-300 {
                next.push(w[2]);
            } else {
                next.push(w[2] - d2 * d2 / den);
            }
        }
        let best = next[next.len() - 1];
        err = (best - prev_best).norm();
        prev_best = best;
        seq = next;
        if seq.len() < 3 {
            break;
        }
    }
    Ok(LimitEstimate {
        value: prev_best,
        error: err,
        model: LimitModel::Aitken,
        samples_used: tail.len(),
        divergent: false,
    })
}

/// Ordinary least squares line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    LineFit { slope, intercept: my - slope * mx, r2 }
}

/// Fits `y = C x^s` on the samples with `x` in the last `decades` decades of decrease.
pub fn power_law_tail(xs: &[f64], ys: &[f64], decades: f64) -> Result<LineFit> {
    let x_min = xs
        .iter()
        .copied()
        .filter(|x| *x > 0.0)
        .fold(f64::INFINITY, f64::min);
    let cut = x_min * 10f64.powf(decades);
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (x, y) in xs.iter().zip(ys) {
        if *x > 0.0 && *y > 0.0 && *x <= cut {
            lx.push(x.ln());
            ly.push(y.ln());
        }
    }
    if lx.len() < 4 {
        return Err(Error::InsufficientSamples { needed: 4, got: lx.len() });
    }
    Ok(linear_fit(&lx, &ly))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(n: usize) -> Vec<f64> {
        (0..n).map(|k| 2f64.powf(k as f64 / 4.0)).collect()
    }

    #[test]
    fn free_fit_recovers_power_tail() {
        let ts = geometric(80);
        let target = C64::new(1.5, -0.25);
        let s: Vec<(f64, C64)> = ts.iter().map(|&t| (t, target + C64::new(0.3, 2.0) * t.powf(-0.7))).collect();
        let est = estimate_limit(&s).unwrap();
        assert!(!est.divergent);
        assert!((est.value - target).norm() < 1e-9, "{est:?}");
        match est.model {
            LimitModel::TailFit(p) => assert!((p - 0.7).abs() < 1e-4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponent_fit_handles_several_terms() {
        let ts = geometric(80);
        let s: Vec<(f64, C64)> = ts
            .iter()
            .map(|&t| (t, C64::new(2.0, 0.0) + 3.0 * t.powf(-1.0 / 3.0) - 5.0 * t.powf(-2.0 / 3.0) + t.powf(-1.0)))
            .collect();
        let est = estimate_limit_with(&s, &TailModel::Exponents(vec![1.0 / 3.0, 2.0 / 3.0, 1.0])).unwrap();
        assert!((est.value - C64::new(2.0, 0.0)).norm() < 1e-8, "{est:?}");
    }

    #[test]
    fn growth_is_divergent() {
        let ts = geometric(60);
        let s: Vec<(f64, C64)> = ts.iter().map(|&t| (t, C64::new(t.powf(0.3), 0.0))).collect();
        assert!(estimate_limit(&s).unwrap().divergent);
        let s: Vec<(f64, C64)> = ts.iter().map(|&t| (t, C64::new(t.ln(), 0.0))).collect();
        assert!(estimate_limit(&s).unwrap().divergent);
    }

    #[test]
    fn constant_is_last_value() {
        let s: Vec<(f64, C64)> = geometric(10).iter().map(|&t| (t, C64::new(4.0, 1.0))).collect();
        let est = estimate_limit(&s).unwrap();
        assert_eq!(est.model, LimitModel::LastValue);
        assert_eq!(est.value, C64::new(4.0, 1.0));
    }

    #[test]
    fn aitken_on_geometric_tail() {
        let s: Vec<(f64, C64)> = (1..12).map(|k| (k as f64, C64::new(1.0 + 0.5f64.powi(k), 0.0))).collect();
        let est = estimate_limit_with(&s, &TailModel::Aitken).unwrap();
        assert!((est.value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_samples() {
        let s: Vec<(f64, C64)> = (1..5).map(|k| (k as f64, C64::new(1.0, 0.0))).collect();
        assert!(matches!(estimate_limit(&s), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn power_law_slope() {
        let xs: Vec<f64> = (0..40).map(|k| 10f64.powf(-k as f64 / 8.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5) * (1.0 + x)).collect();
        let fit = power_law_tail(&xs, &ys, 1.5).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-3);
        assert!(fit.r2 > 0.999);
    }
}
