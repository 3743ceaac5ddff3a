use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use tailscope::concentration::*;
use tailscope::samplers::{lp_norm, sample, BodySpec};

fn b_inf(n: usize) -> BodySpec {
    BodySpec::lp_volume(f64::INFINITY, n).unwrap().scaled(1.0 / 3f64.sqrt()).unwrap()
}

#[test]
fn scaled_sphere_never_deviates() {
    let n = 49;
    let spec = BodySpec::sphere(n).unwrap().scaled(1.0 / 7.0).unwrap();
    let b = sample(&spec, 2000, 1).unwrap();
    let c = empirical_deviation(&b, &[0.0, 1e-9, 0.1, 0.5]).unwrap();
    assert_eq!(c.points[0].p_hat, 1.0);
    assert!(c.points[1..].iter().all(|p| p.p_hat == 0.0));
}

#[test]
fn deviation_matches_direct_recount() {
    let n = 256;
    let b = sample(&b_inf(n), 20_000, 2).unwrap();
    let c = empirical_deviation(&b, &[0.1]).unwrap();
    // recount straight from the stored points, in unscaled coordinates
    let raw_scale = 1.0 / 3f64.sqrt();
    let hits = b
        .iter_rows()
        .filter(|r| {
            let raw: Vec<f64> = r.iter().map(|x| x * raw_scale).collect();
            let norm = lp_norm(&raw, 2.0) / raw_scale / (n as f64).sqrt();
            (norm - 1.0).abs() >= 0.1
        })
        .count();
    assert!((c.points[0].p_hat - hits as f64 / 20_000.0).abs() < 1e-12);
}

#[test]
fn psi_alpha_fit_on_exponential_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..1_000_000).map(|_| Exp1.sample(&mut rng)).collect();
    let f = psi_alpha_fit(&x, (0.5, 9.0)).unwrap();
    assert!((f.alpha - 1.0).abs() < 0.1, "{f:?}");
    assert!((0.0..=1.0).contains(&f.r2));
}

#[test]
fn psi_alpha_fit_on_gaussian_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x: Vec<f64> = (0..4_000_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let f = psi_alpha_fit(&x, (2.0, 4.4)).unwrap();
    assert!((f.alpha - 2.0).abs() < 0.2, "{f:?}");
}

#[test]
fn psi_alpha_fit_needs_tail_mass() {
    let x: Vec<f64> = (0..20_000).map(|i| i as f64 / 20_000.0).collect();
    assert!(matches!(psi_alpha_fit(&x, (0.999, 1.5)), Err(tailscope::Error::InsufficientTailMass(_))));
}

#[test]
fn cross_polytope_marginal_is_at_least_exponential() {
    let n = 256;
    let mut cache = tailscope::lab::ScaleCache::new(5);
    let spec = cache.isotropic(&BodySpec::lp_volume(1.0, n).unwrap()).unwrap();
    let b = sample(&spec, 200_000, 6).unwrap();
    let theta = {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = lp_norm(&v, 2.0);
        v.into_iter().map(|x| x / r).collect::<Vec<_>>()
    };
    let proj: Vec<f64> = b.iter_rows().map(|r| r.iter().zip(&theta).map(|(a, b)| a * b).sum()).collect();
    let f = psi_alpha_fit(&proj, (0.5, 3.5)).unwrap();
    assert!(f.alpha >= 0.7, "{f:?}");
}

#[test]
fn bernstein_monte_carlo_stays_below_envelope() {
    let eps: Vec<f64> = (0..=8).map(|i| 0.05 * i as f64).collect();
    let rows = bernstein_mc_check(100, 100_000, &eps, 8).unwrap();
    for r in rows {
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn sphere_cap_inequality_grid() {
    let gammas: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
    for &n in &[8, 32, 128, 512] {
        assert!(sphere_cap_check(n, &gammas).unwrap().all_hold(), "n={n}");
    }
}

#[test]
fn sphere_cap_monte_carlo_agrees() {
    for &(n, g) in &[(128, 0.5), (32, 0.3), (8, 0.5)] {
        let r = sphere_cap_monte_carlo(n, g, 100_000, 9).unwrap();
        assert!(r.agree, "{r:?}");
    }
}

#[test]
fn cross_polytope_cone_norm_exponent() {
    // E‖V‖₂ ~ n^{1/2 − 1/p}
    let f = cone_norm_growth(1.0, &[16, 64, 256, 1024], 20_000, 10).unwrap();
    assert!((f.slope - (-0.5)).abs() < 0.05, "{f:?}");
}

proptest! {
    #[test]
    fn transfer_formula(a in 0.01f64..10.0, b in 0.01f64..10.0, alpha in -2.0f64..3.0, beta in 0.1f64..4.0) {
        let p = ConcentrationProfile::new(a, b, alpha, beta).unwrap();
        for src in [TransferSource::Cone, TransferSource::Surface] {
            let q = transfer_profile(&p, src);
            prop_assert_eq!(q.alpha, alpha.min(1.0));
            prop_assert_eq!(q.beta, beta.max(1.0));
            prop_assert_eq!(q.a, a + 1.0);
            prop_assert!(q.b <= 0.5 && q.b > 0.0);
        }
    }

    #[test]
    fn synthetic_round_trip(a in 1.0f64..3.0, b in 0.5f64..2.0, alpha in 0.5f64..1.0, beta in 1.0f64..2.5) {
        let truth = ConcentrationProfile::new(a, b, alpha, beta).unwrap();
        let u: Vec<f64> = (1..=40).map(|i| 0.025 * i as f64).collect();
        let curves: Vec<_> = [16, 64, 256].iter().map(|&n| DeviationCurve::synthetic(&truth, n, &u)).collect();
        let f = fit_profile(&curves).unwrap();
        for (got, want) in [(f.a, a), (f.b, b), (f.alpha, alpha), (f.beta, beta)] {
            prop_assert!((got / want - 1.0).abs() < 0.02, "{} vs {}", got, want);
        }
    }
}
