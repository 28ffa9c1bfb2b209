use std::f64::consts::PI;

use funkarea::balance::{balance_residual, balanced_field, FieldOptions, FieldSpec};
use funkarea::funk::{area, area_gradient, AreaMethod, FunkContext};
use funkarea::quadrature::{body_integral, build_rule};
use funkarea::reference::{ball_funk_area_closed, fd_scalar, montecarlo_body_integral, OracleConfig};
use funkarea::{ConvexBody, Vector};

#[test]
fn monte_carlo_ball_volumes() {
    let cfg = OracleConfig::new(42, 400_000, 1e-3).unwrap();
    let disk = montecarlo_body_integral(&ConvexBody::ball(2).unwrap(), |_| 1.0, &cfg).unwrap();
    assert!((disk.estimate - PI).abs() < 3.0 * disk.standard_error);
    let ball = montecarlo_body_integral(&ConvexBody::ball(3).unwrap(), |_| 1.0, &cfg).unwrap();
    assert!((ball.estimate - 4.0 * PI / 3.0).abs() < 3.0 * ball.standard_error);
    let rule = build_rule(3, 32).unwrap();
    let exact = body_integral(&ConvexBody::ball(3).unwrap(), |_| 1.0, &rule).unwrap();
    assert!((exact - 4.0 * PI / 3.0).abs() < 1e-13);
}

#[test]
fn ball_gradient_and_residual_at_half() {
    // r(s) = (2π/s) ln((1+s)/(1-s)); r'(0.5) ≈ 5.899
    let body = ConvexBody::ball(3).unwrap();
    let rule = build_rule(3, 64).unwrap();
    let p = Vector::from_vec(vec![0.0, 0.0, 0.5]);
    let grad = area_gradient(&FunkContext::new(&body, p.clone()).unwrap(), &rule).unwrap();
    let cfg = OracleConfig::default();
    let fd = fd_scalar(|s| ball_funk_area_closed(3, s), 0.5, 1, &cfg).unwrap().value;
    assert!((grad[2] - fd).abs() < 1e-8, "{} vs {fd}", grad[2]);
    assert!((fd - 5.899).abs() < 1e-3);
    assert!(grad[0].abs() < 1e-12 && grad[1].abs() < 1e-12);
    // ‖β‖ = (2/(n-1)) ‖∇r‖ with n = 3
    let residual = balance_residual(&body, &p, &rule).unwrap();
    assert!((residual - grad.norm()).abs() < 1e-10);
}

#[test]
fn disk_area_at_half() {
    let body = ConvexBody::ball(2).unwrap();
    let rule = build_rule(2, 256).unwrap();
    let ctx = FunkContext::new(&body, Vector::from_vec(vec![0.0, 0.5])).unwrap();
    let r = area(&ctx, &rule, AreaMethod::Direct).unwrap();
    assert!((r - 6.63).abs() < 5e-3, "{r}");
    assert!((r - ball_funk_area_closed(2, 0.5).unwrap()).abs() < 1e-12);
}

#[test]
fn constant_randers_field() {
    let text = r#"{
        "grid": [{"min": -0.2, "max": 0.2, "count": 3}],
        "body_template": {"dimension": 2, "kind": "randers", "matrix": [[1, 0], [0, 1]], "beta": [0, 0.3]}
    }"#;
    let spec = FieldSpec::from_json_str(text).unwrap();
    let rule = build_rule(2, 256).unwrap();
    let field = balanced_field(&spec, &rule, &FieldOptions::default()).unwrap();
    for p in field.points() {
        let v = p.balancing.as_ref().unwrap();
        assert!(v[0].abs() < 1e-8 && (v[1] + 0.3 / 0.91).abs() < 1e-8);
    }
    assert!(field.max_residual() < 1e-8);
    let jac = field.jacobian(1).unwrap();
    assert!(jac.amax() < 1e-8);
}
