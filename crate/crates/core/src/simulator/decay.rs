use serde::Serialize;

use crate::error::{Error, Result};

/// Exponential fit `‖u(t)‖ ≈ M′ e^{−η t}` over a trailing window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayEstimate {
    /// Norm decay rate `η` (half the decay rate of `V = ‖u‖²`).
    pub rate: f64,
    /// `M′ = exp(intercept)` for the norm; its square bounds `V`.
    pub prefactor: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
}

/// Minimum number of samples in the fit window.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares fit of `ln √V` against `t` over the trailing
/// `window_fraction` of the time span.
///
/// An identically zero tail yields `rate = +∞`.
pub fn fit_decay(times: &[f64], v: &[f64], window_fraction: f64) -> Result<DecayEstimate> {
    if times.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: v.len() });
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("window fraction must lie in (0, 1], got {window_fraction}")));
    }
    let (Some(&t_first), Some(&t_last)) = (times.first(), times.last()) else {
        return Err(Error::TooFewSamples(0));
    };
    let t_start = t_last - window_fraction * (t_last - t_first);
    let idx: Vec<usize> = (0..times.len()).filter(|&k| times[k] >= t_start).collect();
    if idx.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples(idx.len()));
    }
    let window = (times[idx[0]], t_last);
    if idx.iter().all(|&k| v[k] == 0.0) {
        return Ok(DecayEstimate { rate: f64::INFINITY, prefactor: 0.0, window, r_squared: 1.0, samples: idx.len() });
    }
    if let Some(&k) = idx.iter().find(|&&k| !(v[k] > 0.0 && v[k].is_finite())) {
        return Err(Error::InvalidParameter(format!("V({}) = {} is not positive in the fit window", times[k], v[k])));
    }
    let n = idx.len() as f64;
    let xs: Vec<f64> = idx.iter().map(|&k| times[k]).collect();
    let ys: Vec<f64> = idx.iter().map(|&k| 0.5 * v[k].ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit window has zero time extent".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if ss_tot <= f64::EPSILON * ys.iter().map(|y| y * y).sum::<f64>() {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(DecayEstimate { rate: -slope, prefactor: intercept.exp(), window, r_squared, samples: idx.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize, t_end: f64) -> Vec<f64> {
        (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn pure_exponential() {
        let t = grid(200, 5.0);
        let v: Vec<f64> = t.iter().map(|s| 4.0 * (-2.0 * s).exp()).collect();
        let e = fit_decay(&t, &v, 0.5).unwrap();
        assert_abs_diff_eq!(e.rate, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.prefactor, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_has_zero_rate() {
        let t = grid(50, 1.0);
        let e = fit_decay(&t, &vec![3.0; 50], 1.0).unwrap();
        assert_abs_diff_eq!(e.rate, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_tail_is_infinite() {
        let t = grid(50, 1.0);
        assert_eq!(fit_decay(&t, &vec![0.0; 50], 0.5).unwrap().rate, f64::INFINITY);
    }

    #[test]
    fn too_few_samples() {
        let t = grid(12, 1.0);
        assert!(matches!(fit_decay(&t, &vec![1.0; 12], 0.3), Err(Error::TooFewSamples(_))));
    }
}
