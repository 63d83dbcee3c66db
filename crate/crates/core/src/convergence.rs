//! Observed convergence orders from residuals on successively refined grids.

/// `ln(coarse / fine) / ln(ratio)`; NaN when either residual is not positive.
pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    if coarse > 0.0 && fine > 0.0 && ratio > 1.0 {
        (coarse / fine).ln() / ratio.ln()
    } else {
        f64::NAN
    }
}

/// Orders between consecutive `(h, residual)` pairs, coarsest first.
pub fn orders(levels: &[(f64, f64)]) -> Vec<f64> {
    levels.windows(2).map(|w| observed_order(w[0].1, w[1].1, w[0].0 / w[1].0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_sequence() {
        let lv: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|h| (*h, 3.0 * h * h)).collect();
        for o in orders(&lv) {
            assert!((o - 2.0).abs() < 1e-12);
        }
        assert!(observed_order(0.0, 1.0, 2.0).is_nan());
    }
}
