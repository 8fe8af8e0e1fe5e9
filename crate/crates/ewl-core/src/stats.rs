//! Small sample-statistics helpers used by the experiment harness.

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; 0 for fewer than two points.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Half-width of the 99% normal-approximation confidence interval for the
/// mean of `xs`.
pub fn ci99_half_width(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    Z99 * (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Mean and 99% CI half-width of the paired differences a_i − b_i.
/// Panics if the slices differ in length.
pub fn paired_diff_ci99(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len(), "paired samples must align");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    (mean(&diffs), ci99_half_width(&diffs))
}
