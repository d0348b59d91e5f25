//! Weighted straight-line fits.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// `y = slope x + offset` with one-sigma parameter errors from the weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub offset: f64,
    pub slope_error: f64,
    pub offset_error: f64,
    pub covariance: f64,
    pub chi2: f64,
    pub points: usize,
}

impl FitResult {
    /// Errors rescaled by `sqrt(chi2 / dof)`, for data whose sigmas are only relative weights.
    pub fn scaled_by_residuals(&self) -> FitResult {
        let dof = self.points.saturating_sub(2).max(1) as f64;
        let s = (self.chi2 / dof).sqrt();
        FitResult {
            slope_error: self.slope_error * s,
            offset_error: self.offset_error * s,
            covariance: self.covariance * s * s,
            ..*self
        }
    }
}

/// Closed-form weighted least squares with weights `1 / sigma^2`.
pub fn weighted_linear_fit(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> Result<FitResult> {
    let n = xs.len();
    if ys.len() != n || sigmas.len() != n {
        return Err(domain("weighted_linear_fit", "xs, ys and sigmas differ in length"));
    }
    if n < 3 {
        return Err(domain("weighted_linear_fit", format!("need at least 3 points, got {n}")));
    }
    if sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(domain("weighted_linear_fit", "sigmas must be finite and > 0"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(domain("weighted_linear_fit", "non-finite data"));
    }
    let w: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xm = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ym = ys.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut scale = 0.0;
    for i in 0..n {
        let dx = xs[i] - xm;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (ys[i] - ym);
        scale += w[i] * xs[i] * xs[i];
    }
    if sxx <= 1e-14 * scale || sxx == 0.0 {
        return Err(domain("weighted_linear_fit", "abscissae have no spread"));
    }
    let slope = sxy / sxx;
    let offset = ym - slope * xm;
    let chi2 = (0..n)
        .map(|i| w[i] * (ys[i] - slope * xs[i] - offset).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        offset,
        slope_error: (1.0 / sxx).sqrt(),
        offset_error: (1.0 / sw + xm * xm / sxx).sqrt(),
        covariance: -xm / sxx,
        chi2,
        points: n,
    })
}
