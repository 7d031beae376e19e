//! Small numeric helpers shared across modules.

/// Neville polynomial extrapolation of (x_i, y_i) to x = 0.
/// Used for Richardson-style limits along parameter sweeps.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len();
    let mut p = ys.to_vec();
    for m in 1..n {
        for i in 0..(n - m) {
            p[i] = ((0.0 - xs[i + m]) * p[i] + (xs[i] - 0.0) * p[i + 1]) / (xs[i] - xs[i + m]);
        }
    }
    p[0]
}

/// Least-squares slope of log|y| against log x. Points with |y| below
/// `floor` are dropped; returns None when fewer than two usable points.
pub fn loglog_slope(xs: &[f64], ys: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys.iter())
        .filter(|(_, y)| y.abs() > floor)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn neville_recovers_polynomial_value() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + x * x).collect();
        assert_relative_eq!(neville_at_zero(&xs, &ys), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [0.1f64, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x.powf(1.5)).collect();
        assert_relative_eq!(loglog_slope(&xs, &ys, 1e-300).unwrap(), 1.5, epsilon = 1e-10);
    }
}
