//! Small numeric helpers shared by the estimators.

use nalgebra::{DMatrix, DVector};

/// Median of an ascending slice; NaN when empty.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    median_sorted(&v)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance (n − 1 denominator).
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Percentile interval endpoints of an ascending slice. The endpoints are the
/// order statistics of rank `q (n + 1)`, rounded outward and kept in `1..=n`.
pub fn outward_interval(sorted: &[f64], q_lo: f64, q_hi: f64) -> (f64, f64) {
    if sorted.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = sorted.len();
    let slots = (n + 1) as f64;
    let lo = ((q_lo * slots).floor() as usize).clamp(1, n);
    let hi = ((q_hi * slots).ceil() as usize).clamp(1, n);
    (sorted[lo - 1], sorted[hi - 1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
    /// 2-norm condition number of the design.
    pub condition: f64,
}

/// Ordinary least squares via SVD. `x` is row-major with `p` columns.
pub fn least_squares(x: &[f64], p: usize, y: &[f64]) -> Option<LeastSquares> {
    let n = y.len();
    if n < p || x.len() != n * p || p == 0 {
        return None;
    }
    let a = DMatrix::from_row_slice(n, p, x);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let beta = svd.solve(&b, smax * 1e-15).ok()?;
    let fitted = &a * &beta;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let ym = mean(y);
    let ss_tot: f64 = y.iter().map(|v| (v - ym).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(LeastSquares {
        coefficients: beta.iter().copied().collect(),
        residuals,
        r_squared,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians_and_intervals() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        assert_eq!(outward_interval(&[1.0, 5.0], 0.025, 0.975), (1.0, 5.0));
        let v: Vec<f64> = (0..101).map(f64::from).collect();
        assert_eq!(outward_interval(&v, 0.025, 0.975), (1.0, 99.0));
        // 999 replicates: ranks 25 and 975 exactly.
        let v: Vec<f64> = (1..1000).map(f64::from).collect();
        assert_eq!(outward_interval(&v, 0.025, 0.975), (25.0, 975.0));
        let v: Vec<f64> = (1..51).map(f64::from).collect();
        assert_eq!(outward_interval(&v, 0.025, 0.975), (1.0, 50.0));
    }

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..5).flat_map(|i| [1.0, f64::from(i)]).collect();
        let y: Vec<f64> = (0..5).map(|i| 2.0 + 3.0 * f64::from(i)).collect();
        let ls = least_squares(&x, 2, &y).unwrap();
        assert!((ls.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((ls.coefficients[1] - 3.0).abs() < 1e-12);
        assert!((ls.r_squared - 1.0).abs() < 1e-12);
    }
}
