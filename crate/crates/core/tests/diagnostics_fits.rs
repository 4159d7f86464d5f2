use proptest::prelude::*;
use vml_core::diagnostics::{late_exponential_rate, mixed_norms};
use vml_core::{decay_fit, VmlError};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn power_law_is_recovered(p in 0.2f64..3.0, c in 1e-8f64..1e3, dt in 0.05f64..0.5) {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * dt).collect();
        let v: Vec<f64> = t.iter().map(|t| c * (1.0 + t).powf(-p)).collect();
        let fit = decay_fit(&t, &v, None, 1, 0.5, 0.05, 4.0).unwrap();
        prop_assert!((fit.exponent + p).abs() < 1e-9);
        prop_assert!(fit.meaningful);
        prop_assert!((1.0 + fit.window.1) >= 4.0 * (1.0 + fit.window.0) - 1e-9);
        prop_assert_eq!(fit.meets_target(0.3), (p - 1.5).abs() <= 0.3);
    }

    #[test]
    fn exponential_rate_is_recovered(lambda in 0.01f64..2.0, c in 1e-6f64..1e3) {
        let t: Vec<f64> = (0..80).map(|i| i as f64 * 0.25).collect();
        let v: Vec<f64> = t.iter().map(|t| c * (-lambda * t).exp()).collect();
        let r = late_exponential_rate(&t, &v, 0.25).unwrap();
        prop_assert!((r - lambda).abs() < 1e-9 * lambda.max(1.0));
    }

    #[test]
    fn mixed_norm_with_equal_exponents_is_the_plain_norm(
        vals in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 6), 5),
        p in 1.0f64..4.0,
    ) {
        let (xv, vx) = mixed_norms(&vals, p, p, 0.5, 0.25);
        let plain = (vals.iter().flatten().map(|x| x.abs().powf(p)).sum::<f64>() * 0.125).powf(1.0 / p);
        prop_assert!((xv - plain).abs() <= 1e-12 * plain.max(1e-300));
        prop_assert!((vx - plain).abs() <= 1e-12 * plain.max(1e-300));
    }
}

#[test]
fn too_short_span_is_reported() {
    let t: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
    let v: Vec<f64> = t.iter().map(|t| (1.0 + t).powf(-1.0)).collect();
    assert!(matches!(
        decay_fit(&t, &v, None, 0, 0.5, 0.05, 4.0),
        Err(VmlError::WindowTooSmall { .. })
    ));
}
