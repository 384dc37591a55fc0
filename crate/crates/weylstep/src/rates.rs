//! Convergence-rate fitting on dyadic sweeps.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RateFit {
    /// Least-squares slope of log2(error) against log2(scale).
    pub slope: f64,
    pub intercept: f64,
    /// (scale, error) pairs that entered the fit.
    pub points: Vec<(f64, f64)>,
}

impl RateFit {
    /// Fitted error at a given scale.
    pub fn predict(&self, scale: f64) -> f64 {
        (self.intercept + self.slope * scale.log2()).exp2()
    }
}

/// Fit error ~ C * scale^slope by least squares in log2-log2 coordinates.
/// Pairs with zero or non-finite error are excluded (an error at rounding
/// floor carries no rate information); at least two must survive.
pub fn fit_rate(scales: &[f64], errors: &[f64]) -> Result<RateFit> {
    if scales.len() != errors.len() {
        return Err(Error::Invalid(format!(
            "rate fit with {} scales vs {} errors",
            scales.len(),
            errors.len()
        )));
    }
    let points: Vec<(f64, f64)> = scales
        .iter()
        .zip(errors.iter())
        .filter(|(&s, &e)| s > 0.0 && e.is_finite() && e > 1e-300)
        .map(|(&s, &e)| (s, e))
        .collect();
    if points.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: points.len() });
    }
    let xs: Vec<f64> = points.iter().map(|(s, _)| s.log2()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Invalid("rate fit needs at least two distinct scales".into()));
    }
    let slope = sxy / sxx;
    Ok(RateFit { slope, intercept: my - slope * mx, points })
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Invalid("spearman inputs of different lengths".into()));
    }
    if a.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: a.len() });
    }
    let ra = ranks(a);
    let rb = ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for (x, y) in ra.iter().zip(rb.iter()) {
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
        sab += (x - ma) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        // A constant sequence is uncorrelated with anything.
        return Ok(0.0);
    }
    Ok(sab / (saa * sbb).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).expect("non-NaN rank input"));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovers_slope() {
        let scales: Vec<f64> = (4..=10).map(|k| 2f64.powi(-k)).collect();
        let errors: Vec<f64> = scales.iter().map(|s| 3.0 * s.powf(1.5)).collect();
        let fit = fit_rate(&scales, &errors).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12);
        assert!((fit.predict(0.25) - 3.0 * 0.25f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn zero_errors_are_dropped_not_fatal() {
        let fit = fit_rate(&[0.5, 0.25, 0.125], &[1.0, 0.5, 0.0]).unwrap();
        assert_eq!(fit.points.len(), 2);
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_points_is_an_error() {
        assert!(matches!(
            fit_rate(&[0.5, 0.25], &[0.0, 0.0]),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn spearman_detects_monotone_and_flat() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let up = [0.1, 0.2, 0.3, 0.4];
        let down = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &down).unwrap() + 1.0).abs() < 1e-12);
        let noise = [0.3, 0.1, 0.4, 0.2];
        let r = spearman(&x, &noise).unwrap();
        assert!(r.abs() < 0.5);
    }

    #[test]
    fn spearman_handles_ties_by_average_rank() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 1.0, 2.0, 2.0];
        let r = spearman(&x, &y).unwrap();
        assert!(r > 0.85 && r <= 1.0);
    }
}
