use super::ModelError;

/// Probabilities are clamped into `[EPS, 1 - EPS]` before any logarithm.
pub const PROBABILITY_EPS: f64 = 1e-12;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(PROBABILITY_EPS, 1.0 - PROBABILITY_EPS)
}

/// Mean binary cross-entropy `-(y ln ŷ + (1 - y) ln(1 - ŷ))`.
pub fn bce_loss(y: &[u8], y_hat: &[f64]) -> Result<f64, ModelError> {
    if y.len() != y_hat.len() {
        return Err(ModelError::LengthMismatch {
            expected: y.len(),
            found: y_hat.len(),
        });
    }
    if y.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let total: f64 = y
        .iter()
        .zip(y_hat)
        .map(|(&yi, &p)| {
            let p = clamp_probability(p);
            if yi == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    Ok(total / y.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction_is_nearly_free() {
        // The clamp leaves a residual of -ln(1 - 1e-12) ≈ 1e-12.
        assert!(bce_loss(&[1], &[1.0]).unwrap() < 1e-11);
    }

    #[test]
    fn coin_flip_costs_ln2() {
        assert!((bce_loss(&[1], &[0.5]).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn two_sample_mean() {
        let expected = -(0.9f64.ln() + 0.8f64.ln()) / 2.0;
        let got = bce_loss(&[1, 0], &[0.9, 0.2]).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.1643).abs() < 1e-4);
    }

    #[test]
    fn length_checks() {
        assert!(matches!(bce_loss(&[1, 0], &[0.5]), Err(ModelError::LengthMismatch { .. })));
        assert!(matches!(bce_loss(&[], &[]), Err(ModelError::EmptyInput)));
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(0.0), 0.5);
    }
}
