use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailscope::laplace::*;

fn riemann(p: &LaplaceParams, m: usize) -> f64 {
    let h = 1.0 / m as f64;
    (0..m).map(|i| p.exponent((i as f64 + 0.5) * h).exp()).sum::<f64>() * h
}

#[test]
fn quadrature_matches_riemann_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let p = LaplaceParams::new(rng.random_range(0.0..5.0), rng.random_range(0.1..20.0), rng.random_range(0.3..3.0))
            .unwrap();
        let (q, r) = (integral_i(&p), riemann(&p, 1_000_000));
        assert!((q - r).abs() <= 1e-6 * q.max(1.0), "{p:?}: {q} vs {r}");
    }
}

#[test]
fn case2_envelope_in_regime() {
    for &beta in &[0.3, 0.5, 0.8, 1.0] {
        for &k in &[0.01, 0.1, 0.5, 1.0, 2.0, 5.0] {
            for &l in &[1.0, 3.0, 10.0, 30.0, 100.0, 1000.0] {
                let p = LaplaceParams::new(k, l, beta).unwrap();
                if let Ok(rec) = bound_check(&p) {
                    assert!(rec.ratio <= case2_constant(beta), "{p:?}: {}", rec.ratio);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn maximizer_dominates(k in 0.01f64..10.0, l in 0.01f64..10.0, beta in 1.05f64..4.0, u in 0.0f64..1.0) {
        let p = LaplaceParams::new(k, l, beta).unwrap();
        let m = maximizer(&p).unwrap();
        prop_assert!(m.value >= p.exponent(u) - 1e-12 * m.value.abs().max(1.0));
    }

    #[test]
    fn beta_one_closed_form(k in 0.0f64..30.0, l in 0.0f64..30.0) {
        let p = LaplaceParams::new(k, l, 1.0).unwrap();
        let exact = integral_i_beta1(k, l);
        prop_assert!((integral_i(&p) - exact).abs() <= 1e-10 * exact.max(1.0));
    }
}

#[test]
fn thin_boundary_layers_are_resolved() {
    for &(k, l) in &[(1e-3, 6309.57), (0.5, 1e4), (10.0, 1e6), (1e-6, 1e8)] {
        let q = integral_i(&LaplaceParams::new(k, l, 1.0).unwrap());
        let c = integral_i_beta1(k, l);
        assert!((q / c - 1.0).abs() < 1e-10, "K={k}, L={l}: {q} vs {c}");
    }
    // β < 1, L → ∞: I ≈ Γ(1 + 1/β) L^{−1/β}
    let (beta, l) = (0.5, 1e6);
    let q = integral_i(&LaplaceParams::new(0.0, l, beta).unwrap());
    let asym = 2.0 / (l * l);
    assert!((q / asym - 1.0).abs() < 1e-8, "{q} vs {asym}");
    // β > 1 with a sharp interior peak
    let p = LaplaceParams::new(200.0, 1e4, 2.0).unwrap();
    let m = maximizer(&p).unwrap();
    let q = integral_i(&p);
    // exact: e^{E(u₀)} ∫₀¹ e^{−L(u−u₀)²} du
    let erf = |x: f64| 2.0 * tailscope::refdist::gauss_cdf(x * std::f64::consts::SQRT_2) - 1.0;
    let sl = 1e4f64.sqrt();
    let gauss = m.value.exp() * 0.5 * (std::f64::consts::PI / 1e4).sqrt() * (erf(sl * (1.0 - m.u0)) + erf(sl * m.u0));
    assert!((q / gauss - 1.0).abs() < 1e-6, "{q} vs {gauss}");
}
