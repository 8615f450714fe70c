//! Small post-processing helpers for spectra and delay scans.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::{C64, HBAR};

/// Three-point moving average; the end points average with their single
/// neighbour.
pub fn smooth3(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Indices of interior strict local maxima, skipping `|axis| < exclude`.
pub fn local_maxima(axis: &[f64], values: &[f64], exclude: f64) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| axis[i].abs() >= exclude)
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

/// Full width at half of `values[peak]`, with linear interpolation at both
/// crossings. `None` if either side never drops below half.
pub fn fwhm_around(axis: &[f64], values: &[f64], peak: usize) -> Option<f64> {
    let half = 0.5 * values[peak];
    let crossing = |i: usize, j: usize| {
        let (x0, x1, y0, y1) = (axis[i], axis[j], values[i], values[j]);
        x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    };
    let mut left = None;
    for i in (0..peak).rev() {
        if values[i] <= half {
            left = Some(crossing(i, i + 1));
            break;
        }
    }
    let mut right = None;
    for i in peak + 1..values.len() {
        if values[i] <= half {
            right = Some(crossing(i - 1, i));
            break;
        }
    }
    Some(right? - left?)
}

/// Least-squares fit of `y = A exp(-x / c)` on the log scale over the points
/// with `y > 0`. Returns `(A, c)`.
pub fn fit_exponential_decay(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(_, v)| **v > 0.0)
        .map(|(a, v)| (*a, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return None;
    }
    Some(((my - slope * mx).exp(), -1.0 / slope))
}

/// Strongest non-zero frequency of uniformly sampled data, as an energy
/// `hbar * 2 pi |f|` in eV, together with the bin width in the same unit.
/// The mean is removed first.
pub fn dominant_frequency(dt: f64, samples: &[C64]) -> Option<(f64, f64)> {
    let n = samples.len();
    if n < 4 || !(dt > 0.0) {
        return None;
    }
    let mean = samples.iter().sum::<C64>() / n as f64;
    let mut buf: Vec<C64> = samples.iter().map(|s| s - mean).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bin = 2.0 * PI * HBAR / (n as f64 * dt);
    let (k, _) = buf
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
    let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    Some((signed.abs() * bin, bin))
}

/// `||a - b|| / ||b||`.
pub fn relative_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
