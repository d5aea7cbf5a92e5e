/// Relative scores `(total - worst) / (best - worst)`; everyone scores 1
/// when all totals tie.
pub fn ippc_score(totals: &[f64]) -> Vec<f64> {
    let best = totals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = totals.iter().copied().fold(f64::INFINITY, f64::min);
    if best == worst {
        return vec![1.0; totals.len()];
    }
    totals.iter().map(|t| (t - worst) / (best - worst)).collect()
}

/// Sample mean and standard error of the mean (0 for fewer than two values).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
