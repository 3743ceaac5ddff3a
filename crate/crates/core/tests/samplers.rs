use proptest::prelude::*;
use tailscope::quad::gauss_kronrod;
use tailscope::refdist::SphericalMarginal;
use tailscope::samplers::*;
use tailscope::stats::{self, clopper_pearson, ks_critical, ks_statistic, ks_two_sample, ks_two_sample_critical};

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

#[test]
fn sphere_rows_are_unit_and_coordinates_centered() {
    let b = sample_sphere(16, 20_000, 1).unwrap();
    for r in b.iter_rows() {
        assert!((lp_norm(r, 2.0) - 1.0).abs() < 1e-12);
    }
    let tol = 4.0 / (b.rows as f64).sqrt();
    for j in 0..16 {
        assert!(mean(&b.column(j)).abs() < tol);
    }
}

#[test]
fn sphere_first_coordinate_passes_ks() {
    let n = 64;
    let b = sample_sphere(n, 200_000, 2).unwrap();
    let m = SphericalMarginal::new(n).unwrap();
    let sn = (n as f64).sqrt();
    let d = ks_statistic(&mut b.column(0), |x| m.cdf(sn * x));
    assert!(d < ks_critical(0.01, b.rows), "D = {d}");
}

#[test]
fn gen_gaussian_moments() {
    let total = 200_000;
    let tol = 5.0 / (total as f64).sqrt();
    let b = sample_gen_gaussian(2.0, 1, total, 3).unwrap();
    let (m, v) = stats::mean_var(&b.points);
    assert!((v - 0.5).abs() < tol && m.abs() < tol);
    let b = sample_gen_gaussian(1.0, 1, total, 4).unwrap();
    let abs: Vec<f64> = b.points.iter().map(|x| x.abs()).collect();
    assert!((mean(&abs) - 1.0).abs() < tol);
    let cube: Vec<f64> = b.points.iter().map(|x| x.powi(3)).collect();
    assert!(mean(&cube).abs() < 20.0 * tol);
}

#[test]
fn gen_gaussian_passes_ks_against_integrated_cdf() {
    for &p in &[1.0, 1.5, 3.0] {
        let b = sample_gen_gaussian(p, 1, 20_000, 5).unwrap();
        let d = ks_statistic(&mut b.points.clone(), |t| gen_gaussian_cdf(p, t));
        assert!(d < ks_critical(0.01, b.rows), "p={p} D={d}");
    }
}

#[test]
fn cone_rows_have_unit_lp_norm() {
    for &p in &[1.0, 1.5, 2.0, 4.0, 7.5] {
        let b = sample_cone_lp(p, 33, 2000, 6).unwrap();
        for r in b.iter_rows() {
            assert!((lp_norm(r, p) - 1.0).abs() < 1e-12, "p={p}");
        }
    }
}

#[test]
fn l2_cone_is_the_sphere() {
    let n = 64;
    let b = sample_cone_lp(2.0, n, 50_000, 7).unwrap();
    let m = SphericalMarginal::new(n).unwrap();
    let d = ks_statistic(&mut b.column(0), |x| m.cdf(8.0 * x));
    assert!(d < ks_critical(0.01, b.rows));
}

#[test]
fn l1_cone_in_three_dimensions_matches_simplex_quadrature() {
    // uniform on the face x, y ≥ 0, x + y ≤ 1 of the cross-polytope
    let inner = |x: f64| {
        gauss_kronrod(|y| x * x + y * y + (1.0 - x - y).powi(2), 0.0, 1.0 - x, 1e-14, 1e-13).value
    };
    let oracle = 2.0 * gauss_kronrod(inner, 0.0, 1.0, 1e-14, 1e-13).value;
    assert!((oracle - 0.5).abs() < 1e-12);
    let b = sample_cone_lp(1.0, 3, 100_000, 8).unwrap();
    let sq: Vec<f64> = b.iter_rows().map(|r| r.iter().map(|x| x * x).sum()).collect();
    let (m, v) = stats::mean_var(&sq);
    assert!((m - oracle).abs() < 3.0 * (v / sq.len() as f64).sqrt());
}

#[test]
fn cube_second_moment() {
    let b = sample_volume_lp(f64::INFINITY, 8, 50_000, 9).unwrap();
    let sq: Vec<f64> = b.points.iter().map(|x| x * x).collect();
    assert!((mean(&sq) - 1.0 / 3.0).abs() < 5.0 / (sq.len() as f64).sqrt());
}

#[test]
fn volume_radial_law_is_r_to_the_n() {
    let total = 40_000u64;
    for &(p, n) in &[(1.0, 3usize), (1.5, 4), (3.0, 6), (f64::INFINITY, 5), (2.0, 10)] {
        let b = sample_volume_lp(p, n, total as usize, 10).unwrap();
        let k = b.iter_rows().filter(|r| lp_norm(r, p) <= 0.5).count() as u64;
        let (lo, hi) = clopper_pearson(k, total, 0.999);
        let target = 0.5f64.powi(n as i32);
        assert!(lo <= target && target <= hi, "p={p} n={n}: {k}/{total}");
        for r in b.iter_rows() {
            assert!(lp_norm(r, p) <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn three_ball_marginal() {
    let b = sample_volume_lp(2.0, 3, 50_000, 11).unwrap();
    // density ¾(1 − x²) on [−1, 1]
    let cdf = |x: f64| {
        let x = x.clamp(-1.0, 1.0);
        0.5 + 0.75 * x - 0.25 * x.powi(3)
    };
    let d = ks_statistic(&mut b.column(0), cdf);
    assert!(d < ks_critical(0.01, b.rows));
}

#[test]
fn product_laws() {
    let b = sample_product(CoordinateLaw::Rademacher, 7, 1000, 12).unwrap();
    assert!(b.points.iter().all(|x| x.abs() == 1.0));
    let law = CoordinateLaw::Uniform { a: 3f64.sqrt() };
    assert!((law.variance() - 1.0).abs() < 1e-15);
    let b = sample_product(law, 1, 100_000, 13).unwrap();
    let (_, v) = stats::mean_var(&b.points);
    assert!((v - 1.0).abs() < 5.0 * 0.9 / (b.rows as f64).sqrt());
}

#[test]
fn rademacher_projection_matches_binomial() {
    let n = 20u64;
    let total = 100_000u64;
    let b = sample_product(CoordinateLaw::Rademacher, n as usize, total as usize, 14).unwrap();
    let mut counts = vec![0u64; n as usize + 1];
    for r in b.iter_rows() {
        let s: f64 = r.iter().sum();
        counts[((s + n as f64) / 2.0).round() as usize] += 1;
    }
    for (k, &c) in counts.iter().enumerate() {
        let p = stats::binomial_ln_pmf(k as u64, n, 0.5).exp();
        let (lo, hi) = clopper_pearson(c, total, 0.999);
        assert!(lo <= p && p <= hi, "k={k}: {c} vs p={p}");
    }
}

#[test]
fn radial_projection_examples() {
    let b = sample_sphere(25, 100, 15).unwrap();
    let r = radial_projection(&b).unwrap();
    for (v, _) in r.weighted() {
        assert!((v - 0.2).abs() < 1e-12);
    }
    let spec = BodySpec::sphere(25).unwrap().scaled(0.2).unwrap();
    let r = radial_projection(&sample(&spec, 100, 15).unwrap()).unwrap();
    for (v, _) in r.weighted() {
        assert!((v - 1.0).abs() < 1e-12);
    }
    let b = sample_volume_lp(f64::INFINITY, 512, 2000, 16).unwrap();
    let r = radial_projection(&b).unwrap();
    assert!((r.mean() - (1.0f64 / 3.0).sqrt()).abs() < 5e-3);
}

#[test]
fn streaming_radial_equals_materialized() {
    let spec = BodySpec::lp_volume(1.5, 9).unwrap();
    let a = radial_projection(&sample(&spec, 5000, 17).unwrap()).unwrap();
    let b = radial_sample(&spec, 5000, 17, DEFAULT_CHUNK).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sphere_covariance_is_isotropic() {
    let n = 6;
    let b = sample_sphere(n, 100_000, 18).unwrap();
    let tol = 5.0 / (b.rows as f64).sqrt();
    for i in 0..n {
        for j in 0..n {
            let c = mean(&b.iter_rows().map(|r| r[i] * r[j]).collect::<Vec<_>>());
            let want = if i == j { 1.0 / n as f64 } else { 0.0 };
            assert!((c - want).abs() < tol, "({i},{j}) {c}");
        }
    }
}

#[test]
fn volume_rescaled_to_boundary_matches_cone() {
    let (p, n) = (1.5, 10);
    let v = sample_volume_lp(p, n, 30_000, 19).unwrap();
    let c = sample_cone_lp(p, n, 30_000, 20).unwrap();
    let mut a: Vec<f64> = v.iter_rows().map(|r| r[0] / lp_norm(r, p)).collect();
    let mut b = c.column(0);
    let d = ks_two_sample(&mut a, &mut b);
    assert!(d < ks_two_sample_critical(0.01, v.rows, c.rows), "D={d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn determinism_and_norms(p in 1.0f64..6.0, n in 1usize..40, seed in any::<u64>(), chunk in 1usize..300) {
        let spec = BodySpec::lp_cone(p, n).unwrap();
        let a = sample_chunked(&spec, 300, seed, chunk).unwrap();
        let b = sample_chunked(&spec, 300, seed, chunk).unwrap();
        prop_assert_eq!(&a, &b);
        for r in a.iter_rows() {
            prop_assert!((lp_norm(r, p) - 1.0).abs() < 1e-12);
        }
    }
}
