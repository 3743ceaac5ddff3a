use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};
use tailscope::bv::{self, RadialDistribution};
use tailscope::concentration::{self, ConcentrationProfile, TransferSource};
use tailscope::io;
use tailscope::lab::{self, Directions, ScaleCache, TailMethod, TailRatioReport};
use tailscope::refdist::{gauss_cdf, gauss_density, gauss_tail, SphericalMarginal};
use tailscope::samplers::{self, BodySpec, CoordinateLaw};

use crate::output::{prepare_dir, Plot, Sink};
use crate::verify::{self, Lemma, VerifyOptions};
use crate::{BodyArgs, BodyName, Cli, Command, Emit, Format, Method, Norm, Source, Usage};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn need_seed(cli: &Cli) -> Result<u64> {
    cli.global.seed.ok_or_else(|| usage("this command samples and needs --seed"))
}

fn grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || steps == 0 {
        return Err(usage(format!("bad range: need t_min < t_max and steps ≥ 1, got [{lo}, {hi}] in {steps} steps")));
    }
    Ok((0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect())
}

/// Table as CSV or as a JSON array of row objects; returns the file name.
fn table(sink: &Sink, format: Format, stem: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    match format {
        Format::Csv => {
            let name = format!("{stem}.csv");
            sink.csv(&name, header, rows)?;
            Ok(name)
        }
        Format::Json => {
            let objs: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = header
                        .iter()
                        .zip(r)
                        .map(|(h, &x)| (h.to_string(), serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)))
                        .collect();
                    Value::Object(m)
                })
                .collect();
            let name = format!("{stem}.json");
            sink.json(&name, &objs)?;
            Ok(name)
        }
    }
}

pub fn body_spec(b: &BodyArgs, seed: Option<u64>) -> Result<BodySpec> {
    let p = |what: &str| b.p.map(|e| e.0).ok_or_else(|| usage(format!("--body {what} needs --p")));
    let raw = match b.body {
        BodyName::Sphere => BodySpec::sphere(b.n)?,
        BodyName::GenGaussian => BodySpec::gen_gaussian(p("gen-gaussian")?, b.n)?,
        BodyName::LpCone => BodySpec::lp_cone(p("lp-cone")?, b.n)?,
        BodyName::LpVolume => BodySpec::lp_volume(p("lp-volume")?, b.n)?,
        BodyName::Uniform => BodySpec::product(CoordinateLaw::Uniform { a: b.a }, b.n)?,
        BodyName::Rademacher => BodySpec::product(CoordinateLaw::Rademacher, b.n)?,
        BodyName::TruncatedNormal => BodySpec::product(CoordinateLaw::TruncatedNormal { c: b.cutoff }, b.n)?,
    };
    if b.normalize == Norm::Raw {
        return Ok(raw);
    }
    let path = b.scale_cache.as_deref();
    let mut cache = match path {
        Some(p) if p.exists() => ScaleCache::load(p).with_context(|| format!("reading {}", p.display()))?,
        _ => ScaleCache::new(seed.unwrap_or(0)),
    };
    let spec = cache.isotropic(&raw)?;
    if let Some(p) = path {
        cache.save(p)?;
    }
    Ok(spec)
}

fn load_profile(path: &Option<std::path::PathBuf>) -> Result<Option<ConcentrationProfile>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let s = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Some(serde_json::from_str(&s).with_context(|| format!("parsing {}", p.display()))?))
        }
    }
}

fn read_radial(path: &Path) -> Result<Vec<f64>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(io::read_radial_csv(std::io::BufReader::new(f))?)
}

fn read_directions(path: &Path, n: usize) -> Result<Vec<Vec<f64>>> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in s.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(|x| x.trim().parse::<f64>()).collect();
        match vals {
            Ok(v) if v.len() == n => out.push(v),
            Ok(v) => return Err(usage(format!("{}:{}: {} values, expected {n}", path.display(), i + 1, v.len()))),
            Err(_) if i == 0 => continue, // header
            Err(e) => return Err(usage(format!("{}:{}: {e}", path.display(), i + 1))),
        }
    }
    if out.is_empty() {
        return Err(usage(format!("{}: no directions", path.display())));
    }
    Ok(out)
}

pub fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    prepare_dir(&g.out).map_err(|e| usage(format!("output directory {}: {e}", g.out.display())))?;
    let sink = Sink { dir: g.out.clone(), plot: g.plot };
    match &cli.command {
        Command::Refdist { n, t_min, t_max, steps } => {
            let n = *n as usize;
            let ts = grid(*t_min, *t_max, *steps)?;
            let m = SphericalMarginal::new(n)?;
            let rows: Vec<Vec<f64>> = ts
                .iter()
                .map(|&t| {
                    let (d, c, s) = (m.density(t), m.cdf(t), m.sf(t));
                    vec![t, d, c, gauss_density(t), gauss_cdf(t), d / gauss_density(t), s / gauss_tail(t)]
                })
                .collect();
            let header = ["t", "psi_n", "Psi_n", "phi", "Phi", "density_ratio", "tail_ratio"];
            let mut outs = vec![table(&sink, g.format, "refdist", &header, &rows)?];
            if sink.plot {
                let plot = Plot {
                    title: format!("spherical marginal, n = {n}"),
                    x_label: "t".into(),
                    series: vec![
                        ("psi_n".into(), rows.iter().map(|r| (r[0], r[1])).collect()),
                        ("phi".into(), rows.iter().map(|r| (r[0], r[3])).collect()),
                    ],
                };
                sink.svg("refdist.svg", &plot)?;
                outs.push("refdist.svg".into());
            }
            sink.provenance("refdist", cli, None, &outs)?;
        }
        Command::Sample { body, samples, emit, binary, u_max, u_steps } => {
            let seed = need_seed(cli)?;
            let spec = body_spec(body, Some(seed))?;
            let outs = match emit {
                Emit::Points => {
                    let batch = samplers::sample(&spec, *samples, seed)?;
                    let name = if *binary {
                        let name = "sample.bin".to_string();
                        io::write_batch_binary(sink.create(&name)?, &batch)?;
                        name
                    } else if g.format == Format::Json {
                        let name = "sample.json".to_string();
                        sink.json(&name, &batch)?;
                        name
                    } else {
                        let name = "sample.csv".to_string();
                        io::write_batch_csv(sink.create(&name)?, &batch)?;
                        name
                    };
                    vec![name]
                }
                Emit::Radial => {
                    let radial = samplers::radial_sample(&spec, *samples, seed, samplers::DEFAULT_CHUNK)?;
                    let bv::RadialRepr::Empirical { samples: r } = radial.repr() else { unreachable!() };
                    let name = if g.format == Format::Json {
                        sink.json("radial.json", r)?;
                        "radial.json".to_string()
                    } else {
                        io::write_radial_csv(sink.create("radial.csv")?, r)?;
                        "radial.csv".to_string()
                    };
                    vec![name]
                }
                Emit::Deviation => {
                    let us = grid(0.0, *u_max, *u_steps)?;
                    let curve = concentration::deviation_curve(&spec, *samples, seed, &us)?;
                    let name = if g.format == Format::Json {
                        sink.json("deviation.json", &curve)?;
                        "deviation.json".to_string()
                    } else {
                        io::write_deviation_csv(sink.create("deviation.csv")?, std::slice::from_ref(&curve))?;
                        "deviation.csv".to_string()
                    };
                    vec![name]
                }
            };
            sink.provenance("sample", cli, Some(&spec), &outs)?;
        }
        Command::Transform { radial, n, t_min, t_max, steps, profile } => {
            let ts = grid(*t_min, *t_max, *steps)?;
            let r = RadialDistribution::empirical(*n, read_radial(radial)?)?;
            let profile = load_profile(profile)?;
            let m = SphericalMarginal::new(*n)?;
            let rows = ts
                .iter()
                .map(|&t| {
                    let (tail, tail_se) = bv::avg_tail_with_stderr(&r, t)?;
                    let (dens, dens_se) = bv::avg_density_with_stderr(&r, t)?;
                    let bound = profile.as_ref().and_then(|p| bv::theorem_bound(p, *n, t).ok()).unwrap_or(f64::NAN);
                    Ok(vec![
                        t,
                        tail,
                        tail_se,
                        dens,
                        dens_se,
                        m.sf(t),
                        gauss_tail(t),
                        tail / m.sf(t),
                        tail / gauss_tail(t),
                        dens / m.density(t),
                        dens / gauss_density(t),
                        bound,
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            let header = [
                "t",
                "avg_tail",
                "avg_tail_stderr",
                "avg_density",
                "avg_density_stderr",
                "sph_tail",
                "gauss_tail",
                "tail_ratio_sph",
                "tail_ratio_gauss",
                "density_ratio_sph",
                "density_ratio_gauss",
                "theorem_bound",
            ];
            let mut outs = vec![table(&sink, g.format, "transform", &header, &rows)?];
            if sink.plot {
                let plot = Plot {
                    title: format!("average-marginal tail ratio, n = {n}"),
                    x_label: "t".into(),
                    series: vec![
                        ("(1-F^av)/(1-Psi_n)".into(), rows.iter().map(|r| (r[0], r[7])).collect()),
                        ("(1-F^av)/(1-Phi)".into(), rows.iter().map(|r| (r[0], r[8])).collect()),
                    ],
                };
                sink.svg("transform.svg", &plot)?;
                outs.push("transform.svg".into());
            }
            sink.provenance("transform", cli, None, &outs)?;
        }
        Command::Fit { deviation, p_max, transfer } => {
            let mut curves = Vec::new();
            for p in deviation {
                let f = std::fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
                curves.extend(io::read_deviation_csv(std::io::BufReader::new(f))?);
            }
            let fit = concentration::fit_profile_with(&curves, *p_max)?;
            let mut profiles = vec![fit.clone()];
            if let Some(src) = transfer {
                let s = match src {
                    Source::Cone => TransferSource::Cone,
                    Source::Surface => TransferSource::Surface,
                };
                profiles.push(concentration::transfer_profile(&fit, s));
            }
            let name = match g.format {
                Format::Json => {
                    if profiles.len() == 1 {
                        sink.json("fit.json", &profiles[0])?;
                    } else {
                        sink.json("fit.json", &profiles)?;
                    }
                    "fit.json".to_string()
                }
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = profiles
                        .iter()
                        .map(|p| {
                            vec![
                                p.a,
                                p.b,
                                p.alpha,
                                p.beta,
                                p.provenance.points_used as f64,
                                p.provenance.max_log_residual,
                            ]
                        })
                        .collect();
                    let header = ["A", "B", "alpha", "beta", "points_used", "max_log_residual"];
                    table(&sink, Format::Csv, "fit", &header, &rows)?
                }
            };
            sink.provenance("fit", cli, None, &[name])?;
        }
        Command::Marginal { body, samples, t_min, t_max, steps, method, density, profile } => {
            let seed = need_seed(cli)?;
            let spec = body_spec(body, Some(seed))?;
            let ts = grid(*t_min, *t_max, *steps)?;
            let profile = load_profile(profile)?;
            let report: TailRatioReport = if *density {
                lab::estimate_avg_density(&spec, &ts, *samples, seed)?
            } else {
                let m = match method {
                    Method::Bv => TailMethod::BvFromRadial,
                    Method::Direct => TailMethod::DirectMc,
                };
                lab::estimate_avg_tail(&spec, &ts, *samples, seed, m, profile.as_ref())?
            };
            let name = match g.format {
                Format::Json => {
                    sink.json("marginal.json", &report)?;
                    "marginal.json".to_string()
                }
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = report
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.t,
                                r.estimate,
                                r.stderr,
                                r.spherical,
                                r.gaussian,
                                r.ratio_spherical,
                                r.ratio_gaussian,
                                r.theorem_bound.unwrap_or(f64::NAN),
                            ]
                        })
                        .collect();
                    let header =
                        ["t", "estimate", "stderr", "spherical", "gaussian", "ratio_spherical", "ratio_gaussian", "theorem_bound"];
                    table(&sink, Format::Csv, "marginal", &header, &rows)?
                }
            };
            let mut outs = vec![name];
            if sink.plot {
                let plot = Plot {
                    title: format!("average marginal, n = {}", spec.n),
                    x_label: "t".into(),
                    series: vec![
                        ("ratio to spherical".into(), report.rows.iter().map(|r| (r.t, r.ratio_spherical)).collect()),
                        ("ratio to Gaussian".into(), report.rows.iter().map(|r| (r.t, r.ratio_gaussian)).collect()),
                    ],
                };
                sink.svg("marginal.svg", &plot)?;
                outs.push("marginal.svg".into());
            }
            sink.provenance("marginal", cli, Some(&spec), &outs)?;
        }
        Command::Sweep { body, t_max, directions, samples, t_step, local, h, direction_file } => {
            let seed = need_seed(cli)?;
            if !(*t_max > 0.0) || !(*t_step > 0.0) {
                return Err(usage("--T and --t-step must be positive"));
            }
            let spec = body_spec(body, Some(seed))?;
            let dirs = match direction_file {
                Some(p) => Directions::Given(read_directions(p, spec.n)?),
                None => Directions::Random(*directions),
            };
            let k = (t_max / t_step).round().max(1.0) as usize;
            let ts: Vec<f64> = (0..=k).map(|i| t_max * i as f64 / k as f64).collect();
            let report = if *local {
                lab::local_direction_sweep(&spec, *t_max, &ts, *h, &dirs, *samples, seed)?
            } else {
                lab::direction_sweep(&spec, *t_max, &ts, &dirs, *samples, seed)?
            };
            sink.json("sweep.json", &report)?;
            let mut outs = vec!["sweep.json".to_string()];
            if g.format == Format::Csv {
                let rows: Vec<Vec<f64>> = report
                    .directions
                    .iter()
                    .map(|d| vec![d.index as f64, d.sup_deviation, f64::from(u8::from(d.flagged))])
                    .collect();
                outs.push(table(&sink, Format::Csv, "sweep", &["index", "sup_deviation", "flagged"], &rows)?);
            }
            if sink.plot {
                let mut sups: Vec<f64> = report.directions.iter().map(|d| d.sup_deviation).collect();
                sups.sort_by(f64::total_cmp);
                let m = sups.len() as f64;
                let thr = report.threshold_factor * report.eps_hat;
                let plot = Plot {
                    title: "per-direction sup deviation (sorted)".into(),
                    x_label: "direction quantile".into(),
                    series: vec![
                        ("sup deviation".into(), sups.iter().enumerate().map(|(i, &s)| ((i as f64 + 0.5) / m, s)).collect()),
                        ("10 eps".into(), vec![(0.0, thr), (1.0, thr)]),
                    ],
                };
                sink.svg("sweep.svg", &plot)?;
                outs.push("sweep.svg".into());
            }
            eprintln!(
                "eps_hat = {:.4e}, exceed fraction at {}·eps_hat = {:.3}, median sup = {:.4e}",
                report.eps_hat, report.threshold_factor, report.exceed_fraction, report.median_sup
            );
            sink.provenance("sweep", cli, Some(&spec), &outs)?;
        }
        Command::Verify { lemma, all, beta, dims, centered, samples } => {
            let lemmas: Vec<Lemma> = if *all { Lemma::ALL.to_vec() } else { lemma.iter().copied().collect() };
            if *all && g.seed.is_none() {
                return Err(usage("verify --all includes sampling checks and needs --seed"));
            }
            let opt = VerifyOptions { seed: g.seed, beta: *beta, dims: dims.clone(), centered: *centered, samples: *samples };
            let mut results = Vec::new();
            for l in lemmas {
                results.extend(verify::run(l, &opt)?);
            }
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                println!("{tag} {:?}: {} ({} cells, worst {:.6e}, limit {:.6e})", r.lemma, r.check, r.cells, r.worst, r.limit);
                if let Some(f) = &r.first_failure {
                    eprintln!("first failing cell [{:?}] {}: {f}", r.lemma, r.check);
                }
            }
            let name = match g.format {
                Format::Json => {
                    sink.json("verify.json", &results)?;
                    "verify.json".to_string()
                }
                Format::Csv => {
                    let rows: Vec<Vec<String>> = results
                        .iter()
                        .map(|r| {
                            vec![
                                serde_json::to_value(r.lemma).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                                r.check.clone(),
                                r.cells.to_string(),
                                r.passed.to_string(),
                                io::fmt_f64(r.worst),
                                io::fmt_f64(r.limit),
                                r.first_failure.clone().unwrap_or_default(),
                            ]
                        })
                        .collect();
                    let header = ["lemma", "check", "cells", "passed", "worst", "limit", "first_failure"];
                    io::write_csv(sink.create("verify.csv")?, &header, &rows)?;
                    "verify.csv".to_string()
                }
            };
            sink.provenance("verify", cli, None, &[name])?;
            return Ok(results.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}
