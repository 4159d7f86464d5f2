//! Log-log decay fits `log E ≈ c + p log(1+t)`.

use serde::Serialize;

use crate::error::{Result, VmlError};

/// Minimum number of points in a fit window.
pub const MIN_POINTS: usize = 4;

/// Least-squares power-law fit on a window; `residual` is the RMS deviation
/// of `log E` from the fitted line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub points: usize,
    pub exponent: f64,
    pub residual: f64,
    /// `−(k + s)`
    pub target: f64,
    /// `residual` below the configured threshold
    pub meaningful: bool,
}

impl DecayFit {
    pub fn meets_target(&self, tol: f64) -> bool {
        self.meaningful && (self.exponent - self.target).abs() <= tol
    }
}

/// Slope, intercept and RMS residual of the least-squares line.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let res = (x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum::<f64>() / n).sqrt();
    (slope, icpt, res)
}

fn fit_range(t: &[f64], v: &[f64], lo: usize, hi: usize, k: usize, s: f64, threshold: f64) -> Result<DecayFit> {
    let points = hi - lo;
    if points < MIN_POINTS {
        return Err(VmlError::WindowTooSmall {
            points,
            needed: MIN_POINTS,
        });
    }
    for i in lo..hi {
        if !(v[i] > 0.0) {
            return Err(VmlError::NonPositiveData { t: t[i], value: v[i] });
        }
    }
    let x: Vec<f64> = t[lo..hi].iter().map(|t| (1.0 + t).ln()).collect();
    let y: Vec<f64> = v[lo..hi].iter().map(|v| v.ln()).collect();
    let (exponent, _, residual) = line_fit(&x, &y);
    Ok(DecayFit {
        window: (t[lo], t[hi - 1]),
        points,
        exponent,
        residual,
        target: -(k as f64 + s),
        meaningful: residual < threshold,
    })
}

/// Fit `values(t)` on `window` (inclusive); without a window, every
/// contiguous window whose `1+t` spans at least a factor `min_span` is tried
/// and the one with the smallest residual wins.
pub fn decay_fit(
    t: &[f64],
    values: &[f64],
    window: Option<(f64, f64)>,
    k: usize,
    s: f64,
    threshold: f64,
    min_span: f64,
) -> Result<DecayFit> {
    if t.len() != values.len() {
        return Err(VmlError::ShapeMismatch {
            expected: t.len(),
            got: values.len(),
        });
    }
    if let Some((a, b)) = window {
        let lo = t.iter().position(|&x| x >= a).unwrap_or(t.len());
        let hi = t.iter().rposition(|&x| x <= b).map_or(lo, |i| i + 1).max(lo);
        return fit_range(t, values, lo, hi, k, s, threshold);
    }
    let mut best: Option<DecayFit> = None;
    for lo in 0..t.len() {
        for hi in lo + MIN_POINTS..=t.len() {
            if (1.0 + t[hi - 1]) < min_span * (1.0 + t[lo]) {
                continue;
            }
            let Ok(f) = fit_range(t, values, lo, hi, k, s, threshold) else {
                continue;
            };
            if best.as_ref().is_none_or(|b| f.residual < b.residual) {
                best = Some(f);
            }
        }
    }
    best.ok_or(VmlError::WindowTooSmall {
        points: t.len(),
        needed: MIN_POINTS,
    })
}

/// Exponential rate `λ` of `E ≈ C e^{−λt}` from a linear fit of `log E`
/// against `t` over the last `fraction` of the series.
pub fn late_exponential_rate(t: &[f64], values: &[f64], fraction: f64) -> Result<f64> {
    let n = t.len();
    let count = ((n as f64 * fraction).ceil() as usize).max(MIN_POINTS).min(n);
    if count < MIN_POINTS {
        return Err(VmlError::WindowTooSmall {
            points: n,
            needed: MIN_POINTS,
        });
    }
    let lo = n - count;
    for i in lo..n {
        if !(values[i] > 0.0) {
            return Err(VmlError::NonPositiveData { t: t[i], value: values[i] });
        }
    }
    let y: Vec<f64> = values[lo..].iter().map(|v| v.ln()).collect();
    Ok(-line_fit(&t[lo..], &y).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_synthetic_power() {
        let t: Vec<f64> = (0..60).map(|i| i as f64 * 0.5).collect();
        let v: Vec<f64> = t.iter().map(|t| 3.0 * (1.0 + t).powf(-1.5)).collect();
        let f = decay_fit(&t, &v, Some((2.0, 25.0)), 1, 0.5, 0.05, 1.0).unwrap();
        assert!((f.exponent + 1.5).abs() < 1e-10);
        assert!(f.meets_target(0.01));
    }

    #[test]
    fn exponential_is_flagged() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 * 0.5).collect();
        let v: Vec<f64> = t.iter().map(|t| (-t).exp()).collect();
        let f = decay_fit(&t, &v, Some((5.0, 50.0)), 0, 0.5, 0.05, 1.0).unwrap();
        assert!(f.exponent < -5.0);
        assert!(!f.meaningful);
        assert!((late_exponential_rate(&t, &v, 0.25).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn guards() {
        let t = [0.0, 1.0, 2.0];
        assert!(matches!(
            decay_fit(&t, &[1.0, 0.5, 0.2], Some((0.0, 2.0)), 0, 0.5, 0.05, 1.0),
            Err(VmlError::WindowTooSmall { .. })
        ));
        let t = [0.0, 1.0, 2.0, 3.0];
        assert!(matches!(
            decay_fit(&t, &[1.0, 0.5, 0.0, 0.1], Some((0.0, 3.0)), 0, 0.5, 0.05, 1.0),
            Err(VmlError::NonPositiveData { .. })
        ));
    }
}
