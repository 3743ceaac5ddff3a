use proptest::prelude::*;
use tailscope::bv::*;
use tailscope::lab::{estimate_avg_tail, TailMethod};
use tailscope::refdist::SphericalMarginal;
use tailscope::samplers::{radial_sample, BodySpec, DEFAULT_CHUNK};

fn b_inf(n: usize) -> BodySpec {
    BodySpec::lp_volume(f64::INFINITY, n).unwrap().scaled(1.0 / 3f64.sqrt()).unwrap()
}

#[test]
fn scaled_atom() {
    let n = 20;
    let m = SphericalMarginal::new(n).unwrap();
    let r = RadialDistribution::atom(n, 1.3).unwrap();
    for &t in &[0.0, 0.5, 2.0, 4.0] {
        assert!((avg_tail(&r, t).unwrap() - m.sf(t / 1.3)).abs() < 1e-15);
    }
}

#[test]
fn derivative_of_tail_is_density() {
    let n = 30;
    let r = RadialDistribution::atoms(n, vec![(0.7, 0.2), (1.0, 0.5), (1.6, 0.3)]).unwrap();
    for i in 1..40 {
        let t = 0.1 * i as f64;
        let h = 1e-4;
        let fd = -(avg_tail(&r, t + h).unwrap() - avg_tail(&r, t - h).unwrap()) / (2.0 * h);
        let d = avg_density(&r, t).unwrap();
        assert!((fd / d - 1.0).abs() < 1e-5, "t={t}");
    }
}

#[test]
fn b_inf_64_radial_transform_agrees_with_direct_monte_carlo() {
    let spec = b_inf(64);
    let bv = estimate_avg_tail(&spec, &[1.0], 100_000, 3, TailMethod::BvFromRadial, None).unwrap();
    let mc = estimate_avg_tail(&spec, &[1.0], 100_000, 4, TailMethod::DirectMc, None).unwrap();
    let (a, b) = (bv.rows[0], mc.rows[0]);
    let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.estimate - b.estimate).abs() <= 3.0 * se, "{} vs {} (se {se})", a.estimate, b.estimate);
}

#[test]
fn error_term_inequality_on_b_inf_256() {
    let n = 256;
    let radial = radial_sample(&b_inf(n), 50_000, 8, DEFAULT_CHUNK).unwrap();
    let t = 2.0;
    let m = SphericalMarginal::new(n).unwrap();
    let dev = (avg_tail(&radial, t).unwrap() / m.sf(t) - 1.0).abs();
    let terms = error_terms(&radial, t).unwrap();
    assert!(dev <= terms.bound(tailscope::refdist::SPHDER_CONSTANT, t), "{dev} vs {terms:?}");
}

#[test]
fn heavy_radial_has_positive_first_term() {
    let r = RadialDistribution::atoms(40, vec![(1.0, 0.9), (2.5, 0.1)]).unwrap();
    assert!(error_terms(&r, 1.0).unwrap().term1 > 0.0);
}

proptest! {
    #[test]
    fn mixture_linearity(n in 4usize..300, a in 0.0f64..1.0, r1 in 0.3f64..2.0, r2 in 0.3f64..2.0, t in 0.0f64..3.0) {
        let x = RadialDistribution::atoms(n, vec![(r1, 0.4), (r1 * 1.1, 0.6)]).unwrap();
        let y = RadialDistribution::atom(n, r2).unwrap();
        let mix = x.mixture(a, &y).unwrap();
        let lhs = avg_tail(&mix, t).unwrap();
        let rhs = a * avg_tail(&x, t).unwrap() + (1.0 - a) * avg_tail(&y, t).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn tail_nonincreasing(n in 4usize..500, r in 0.5f64..1.5, t in 0.0f64..4.0, dt in 0.0f64..1.0) {
        let x = RadialDistribution::atoms(n, vec![(r, 0.5), (1.0, 0.5)]).unwrap();
        prop_assert!(avg_tail(&x, t + dt).unwrap() <= avg_tail(&x, t).unwrap());
    }

    #[test]
    fn atom_one_identity(n in 3usize..10_000, u in -1.0f64..1.0) {
        let m = SphericalMarginal::new(n).unwrap();
        let t = u * m.support_edge();
        let r = RadialDistribution::atom(n, 1.0).unwrap();
        prop_assert!((avg_tail(&r, t).unwrap() - m.sf(t)).abs() < 1e-12);
        prop_assert!((avg_density(&r, t).unwrap() - m.density(t)).abs() < 1e-12);
    }
}
