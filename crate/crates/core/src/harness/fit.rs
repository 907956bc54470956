use serde::Serialize;

use super::config::Family;

/// Least-squares fit of `ln(value)` against `ln |A|`.
///
/// Descriptive only: powers of `log |A|` hidden in asymptotic bounds are
/// invisible at these sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub family: Family,
    pub quantity: &'static str,
    pub slope: f64,
    pub intercept: f64,
    pub samples: usize,
    pub residuals: Vec<f64>,
    /// Asymptotic exponent to compare against, if the quantity has one.
    pub reference_exponent: Option<f64>,
}

/// `None` unless at least two distinct sizes `>= 2` with positive values.
pub fn fit_exponent(
    family: Family,
    quantity: &'static str,
    samples: &[(usize, u128)],
    reference_exponent: Option<f64>,
) -> Option<ExponentFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(s, v)| s >= 2 && v > 0)
        .map(|&(s, v)| ((s as f64).ln(), (v as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Some(ExponentFit {
        family,
        quantity,
        slope,
        intercept,
        samples: pts.len(),
        residuals: pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect(),
        reference_exponent,
    })
}
