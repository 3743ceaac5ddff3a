use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use tailscope::concentration::{sphere_cap_check, sphere_cap_monte_carlo};
use tailscope::lab::ScaleCache;
use tailscope::laplace::{self, LaplaceParams};
use tailscope::quad::gauss_kronrod_points;
use tailscope::refdist::{self, SphericalMarginal};
use tailscope::samplers::{radial_sample, BodySpec, DEFAULT_CHUNK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Lemma {
    Sph,
    Sphder,
    Logder,
    Normal,
    Lapl,
    SphereConc,
    Sc2v,
}

impl Lemma {
    pub const ALL: [Lemma; 7] =
        [Lemma::Sph, Lemma::Sphder, Lemma::Logder, Lemma::Normal, Lemma::Lapl, Lemma::SphereConc, Lemma::Sc2v];
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub seed: Option<u64>,
    pub beta: Option<f64>,
    pub dims: Option<Vec<usize>>,
    /// subtract D(n, 0) before the fourth-order comparison
    pub centered: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub lemma: Lemma,
    pub check: String,
    pub cells: usize,
    pub passed: bool,
    /// largest observed value of the checked quantity
    pub worst: f64,
    pub limit: f64,
    pub first_failure: Option<String>,
}

struct Tally {
    lemma: Lemma,
    check: String,
    cells: usize,
    worst: f64,
    limit: f64,
    first_failure: Option<String>,
}

impl Tally {
    fn new(lemma: Lemma, check: impl Into<String>, limit: f64) -> Self {
        Self { lemma, check: check.into(), cells: 0, worst: f64::NEG_INFINITY, limit, first_failure: None }
    }

    // records value ≤ limit
    fn cell(&mut self, value: f64, what: impl FnOnce() -> String) {
        self.cells += 1;
        self.worst = self.worst.max(value);
        if !(value <= self.limit) && self.first_failure.is_none() {
            self.first_failure = Some(format!("{}: {value:.6e} > {:.6e}", what(), self.limit));
        }
    }

    fn done(self) -> Outcome {
        Outcome {
            lemma: self.lemma,
            check: self.check,
            cells: self.cells,
            passed: self.first_failure.is_none(),
            worst: self.worst,
            limit: self.limit,
            first_failure: self.first_failure,
        }
    }
}

pub fn run(lemma: Lemma, opt: &VerifyOptions) -> Result<Vec<Outcome>> {
    match lemma {
        Lemma::Sph => sph(opt),
        Lemma::Sphder => sphder(),
        Lemma::Logder => logder(),
        Lemma::Normal => normal(),
        Lemma::Lapl => lapl(opt),
        Lemma::SphereConc => sphere_conc(opt),
        Lemma::Sc2v => sc2v(opt),
    }
}

fn sph(opt: &VerifyOptions) -> Result<Vec<Outcome>> {
    let dims = opt.dims.clone().unwrap_or(vec![64, 256, 1024, 4096]);
    let mut norm = Tally::new(Lemma::Sph, "|∫ψₙ − 1|", 1e-9);
    for &n in &dims {
        let m = SphericalMarginal::new(n)?;
        let e = m.support_edge();
        let pts: Vec<f64> = [-e, -1.0, 0.0, 1.0, e].into_iter().filter(|&x| x.abs() <= e).collect();
        let v = gauss_kronrod_points(|t| m.density(t), &pts, 1e-13, 1e-13).value;
        norm.cell((v - 1.0).abs(), || format!("n={n}"));
    }
    let label = if opt.centered {
        "|D(n,t) − D(n,0)| / 2(t²/n + t⁶/n²), t ≤ n^0.3"
    } else {
        "|ln(ψₙ/φ) + t⁴/4n| / 2(t²/n + t⁶/n²), t ≤ n^0.3"
    };
    let mut law = Tally::new(Lemma::Sph, label, 1.0);
    let mut sups = Vec::new();
    for &n in &dims {
        let nf = n as f64;
        let d0 = if opt.centered { refdist::fourth_order_diagnostic(n, 0.0)? } else { 0.0 };
        let top = nf.powf(0.3);
        for i in 1..=40 {
            let t = top * i as f64 / 40.0;
            let d = refdist::fourth_order_diagnostic(n, t)? - d0;
            let bound = 2.0 * (t * t / nf + t.powi(6) / (nf * nf));
            law.cell(d.abs() / bound, || format!("n={n}, t={t:.4}"));
        }
        sups.push((n, refdist::sup_density_deviation(n, nf.powf(0.2), 400)?));
    }
    let mut mono = Tally::new(Lemma::Sph, "sup_{t≤n^0.2}|ψₙ/φ − 1| strictly decreasing in n", 0.0);
    for w in sups.windows(2) {
        mono.cell(w[1].1 - w[0].1, || format!("n={} → n={}: {:.4e} → {:.4e}", w[0].0, w[1].0, w[0].1, w[1].1));
    }
    Ok(vec![norm.done(), law.done(), mono.done()])
}

fn sphder() -> Result<Vec<Outcome>> {
    let env = refdist::sphder_envelope(&refdist::SPHDER_SCAN_DIMS, 200)?;
    let mut t = Tally::new(Lemma::Sphder, "max((1−Ψₙ)/(ψₙ/t), reciprocal), t ∈ [1, √(n/8)]", refdist::SPHDER_CONSTANT);
    t.cell(env.two_sided_constant(), || format!("{} cells", env.cells));
    t.cells = env.cells;
    Ok(vec![t.done()])
}

fn logder() -> Result<Vec<Outcome>> {
    let env = refdist::logder_envelope(&refdist::LOGDER_SCAN_DIMS, 60)?;
    let (lo, hi) = refdist::LOGDER_BOUNDS;
    let mut a = Tally::new(Lemma::Logder, "normalized shift log-ratio, upper", hi);
    a.cell(env.max, || "upper bound".into());
    a.cells = env.cells;
    let mut b = Tally::new(Lemma::Logder, "normalized shift log-ratio, lower (reported as −min)", -lo);
    b.cell(-env.min, || "lower bound".into());
    b.cells = env.cells;
    Ok(vec![a.done(), b.done()])
}

fn normal() -> Result<Vec<Outcome>> {
    let mut mills = Tally::new(Lemma::Normal, "(1 − Φ(t))·t·e^{t²/2}, t ∈ [1, 30]", 1.0);
    for i in 0..=580 {
        let t = 1.0 + 0.05 * i as f64;
        mills.cell(refdist::gauss_mills_constant(t), || format!("t={t}"));
    }
    let env = refdist::normal_shift_envelope(6.0, 200);
    let mut shift =
        Tally::new(Lemma::Normal, "(1 − Φ(t−s)) / ((1 − Φ(t))e^{st}), 0 ≤ s ≤ t ≤ 6", refdist::NORMAL_SHIFT_CONSTANT);
    shift.cell(env.max, || "shift envelope".into());
    shift.cells = env.cells;
    Ok(vec![mills.done(), shift.done()])
}

fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect()
}

pub const LAPL_BETAS: [f64; 7] = [0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0];

fn lapl(opt: &VerifyOptions) -> Result<Vec<Outcome>> {
    let betas: Vec<f64> = opt.beta.map_or(LAPL_BETAS.to_vec(), |b| vec![b]);
    let ks = log_grid(1e-3, 50.0, 25);
    let ls = log_grid(1e-2, 1e4, 31);
    let mut out = Vec::new();
    for &beta in &betas {
        if beta == 1.0 {
            let mut t = Tally::new(Lemma::Lapl, "β=1: |quadrature/closed form − 1|", 1e-8);
            for &k in &ks {
                for &l in &ls {
                    if k / l >= 0.5 {
                        continue;
                    }
                    let q = laplace::integral_i(&LaplaceParams::new(k, l, 1.0)?);
                    let c = laplace::integral_i_beta1(k, l);
                    t.cell((q / c - 1.0).abs(), || format!("K={k:.4e}, L={l:.4e}"));
                }
            }
            out.push(t.done());
        }
        if beta <= 1.0 {
            let c = laplace::case2_constant(beta);
            let mut a = Tally::new(Lemma::Lapl, format!("β={beta}: K·I / (Kᵝ/L)"), c);
            let mut b = Tally::new(Lemma::Lapl, format!("β={beta}: K·I / (K/L)"), c);
            for &k in &ks {
                for &l in &ls {
                    let kb = k.powf(beta) / l;
                    if !(kb < 0.5 && k / l < 0.5) {
                        continue;
                    }
                    let lhs = k * laplace::integral_i(&LaplaceParams::new(k, l, beta)?);
                    a.cell(lhs / kb, || format!("K={k:.4e}, L={l:.4e}"));
                    b.cell(lhs * l / k, || format!("K={k:.4e}, L={l:.4e}"));
                }
            }
            out.push(a.done());
            out.push(b.done());
        } else {
            let s = laplace::scan_ratio(beta, &ks, &ls)?;
            let mut t = Tally::new(Lemma::Lapl, format!("β={beta}: sup K·I / (Kᵝ/L) on the grid (finite)"), f64::MAX);
            t.cell(s.sup_ratio, || format!("argmax K={:.4e}, L={:.4e}", s.argmax.0, s.argmax.1));
            t.cells = s.cells;
            out.push(t.done());
        }
    }
    Ok(out)
}

pub const CAP_DIMS: [usize; 4] = [8, 32, 128, 512];

fn sphere_conc(opt: &VerifyOptions) -> Result<Vec<Outcome>> {
    let dims = opt.dims.clone().unwrap_or(CAP_DIMS.to_vec());
    let gammas: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
    let mut t = Tally::new(Lemma::SphereConc, "σ(A)(1 − σ({A}_γ)) / e^{−(n−1)γ²/4}", 1.0);
    for &n in &dims {
        for row in sphere_cap_check(n, &gammas)?.rows {
            t.cell(row.lhs / row.rhs, || format!("n={n}, γ={}", row.gamma));
        }
    }
    let mut out = vec![t.done()];
    if let Some(seed) = opt.seed {
        let mc = sphere_cap_monte_carlo(128, 0.5, opt.samples, seed)?;
        let mut m = Tally::new(Lemma::SphereConc, "Monte Carlo vs analytic at n=128, γ=0.5 (standard errors)", 3.0);
        m.cell((mc.lhs_mc - mc.lhs_analytic).abs() / mc.stderr, || format!("N={}", mc.samples));
        out.push(m.done());
    }
    Ok(out)
}

fn sc2v(opt: &VerifyOptions) -> Result<Vec<Outcome>> {
    let seed = opt.seed.ok_or_else(|| crate::Usage("verify --lemma sc2v draws samples and needs --seed".into()))?;
    let dims = opt.dims.clone().unwrap_or(vec![64, 256]);
    let us: Vec<f64> = (1..=50).map(|i| i as f64 / 50.0).collect();
    let mut low = Tally::new(Lemma::Sc2v, "V{r < 1−u} − (C{r < 1−u/2} + e^{−nu/2})", 0.0);
    let mut high = Tally::new(Lemma::Sc2v, "V{r > 1+u} − C{r > 1+u}", 0.0);
    let mut cache = ScaleCache::new(seed);
    for &p in &[1.0, 1.5, 4.0] {
        for &n in &dims {
            let spec = cache.isotropic(&BodySpec::lp_cone(p, n)?)?;
            let radial = radial_sample(&spec, opt.samples, seed, DEFAULT_CHUNK)?;
            let tailscope::bv::RadialRepr::Empirical { samples: c } = radial.repr() else { unreachable!() };
            let nf = n as f64;
            let m = c.len() as f64;
            for &u in &us {
                // volume radius R·c with P(R ≤ r) = rⁿ, integrated exactly over R
                let v_low = c.iter().map(|&ci| ((1.0 - u) / ci).powf(nf).min(1.0)).sum::<f64>() / m;
                let c_low = c.iter().filter(|&&ci| ci < 1.0 - 0.5 * u).count() as f64 / m;
                low.cell(v_low - c_low - (-0.5 * nf * u).exp(), || format!("p={p}, n={n}, u={u}"));
                let v_high = c.iter().map(|&ci| 1.0 - ((1.0 + u) / ci).powf(nf).min(1.0)).sum::<f64>() / m;
                let c_high = c.iter().filter(|&&ci| ci > 1.0 + u).count() as f64 / m;
                high.cell(v_high - c_high, || format!("p={p}, n={n}, u={u}"));
            }
        }
    }
    Ok(vec![low.done(), high.done()])
}
