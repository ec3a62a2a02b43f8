//! Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

use std::path::Path;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use alphamod::evolve::{evolve, free_propagate, scaling_transform, EvolutionConfig, ScaleTarget};
use alphamod::fit::fit_loglog;
use alphamod::grid::{sample, FieldSpec};
use alphamod::norms::{p_variation, sobolev_norm};
use alphamod::{Field, GridSpec};
use alphamod_cli::{run_text, Command, Options, RunOutcome};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<(bool, String), String>;

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

fn config_text(name: &str) -> String {
    std::fs::read_to_string(configs().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn run_config(command: Command, name: &str, out: &Path) -> Result<RunOutcome, String> {
    let opts = Options { out: Some(out.join(name.trim_end_matches(".json"))), ..Default::default() };
    run_text(command, Some(&config_text(name)), &opts).map_err(|e| e.to_string())
}

fn metric(o: &RunOutcome, key: &str) -> f64 {
    o.report.metrics.get(key).copied().unwrap_or(f64::NAN)
}

fn failed_checks(o: &RunOutcome) -> String {
    let bad: Vec<&str> = o.report.checks.iter().filter(|c| !*c.1).map(|c| c.0.as_str()).collect();
    if bad.is_empty() {
        String::new()
    } else {
        format!(" failed: {}", bad.join(","))
    }
}

fn gaussian(g: &GridSpec, width: f64, freq: f64) -> Field {
    sample(g, &FieldSpec::Gaussian { center: vec![0.0; g.d], width, frequency: vec![freq; g.d] }).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn partition(out: &Path) -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    for name in ["decompose_1d.json", "decompose_2d.json"] {
        let o = run_config(Command::Decompose, name, out)?;
        ok &= o.pass();
        detail.push(format!(
            "d={} dyadic {:.1e} alpha {:.1e}{}",
            o.config.grid.d,
            metric(&o, "dyadic_residual"),
            metric(&o, "max_alpha_residual"),
            failed_checks(&o)
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn plancherel() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grids = [GridSpec::new(1, 256, 10.0), GridSpec::new(2, 64, 6.0), GridSpec::new(3, 16, 3.0)];
    let (mut worst_p, mut worst_r) = (0.0_f64, 0.0_f64);
    for g in grids {
        let g = g.map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let values =
                (0..g.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let f = Field::new(g, values).map_err(|e| e.to_string())?;
            let spec = f.to_spectral();
            worst_p = worst_p.max(rel(f.l2_norm(), spec.l2_norm()));
            worst_r = worst_r.max(spec.to_physical().sub(&f).unwrap().l2_norm() / f.l2_norm());
        }
    }
    Ok((worst_p <= 1e-12 && worst_r <= 1e-12, format!("plancherel {worst_p:.1e}, round trip {worst_r:.1e}")))
}

fn conservation() -> Check {
    let g = GridSpec::new(1, 1024, 40.0).unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    for kappa in [1u32, 3] {
        let u0 = gaussian(&g, 1.0, 1.0);
        let mut cfg = EvolutionConfig::new(1.0, kappa, 1e-3, 1.0);
        cfg.snapshot_stride = 10;
        let traj = evolve(&u0, &cfg).map_err(|e| e.to_string())?;
        let drift = traj.mass_drift();
        ok &= traj.steps == 1000 && drift <= 1e-10;

        let dts = [0.04, 0.02, 0.01, 0.005];
        let mut drifts = Vec::new();
        for dt in dts {
            let mut cfg = EvolutionConfig::new(1.0, kappa, dt, 1.0);
            cfg.snapshot_stride = 1;
            cfg.diagnostics_only = true;
            drifts.push(evolve(&u0, &cfg).map_err(|e| e.to_string())?.energy_drift());
        }
        let order = fit_loglog(&dts, &drifts).map_err(|e| e.to_string())?.slope;
        ok &= (order - 2.0).abs() <= 0.2;
        detail
            .push(format!("kappa={kappa}: mass drift {drift:.1e} over {} steps, energy order {order:.3}", traj.steps));
    }
    Ok((ok, detail.join("; ")))
}

fn propagator_oracle() -> Check {
    let g = GridSpec::new(1, 1024, 40.0).unwrap();
    let t = 0.5;
    let u = free_propagate(&gaussian(&g, 1.0, 0.0).to_spectral(), t).to_physical();
    let exact = Field::from_fn(g, |x| {
        let z = Complex64::new(1.0, 2.0 * t);
        z.powf(-0.5) * (-(x[0] * x[0]) / (2.0 * z)).exp()
    })
    .map_err(|e| e.to_string())?;
    let err = u.sub(&exact).unwrap().l2_norm() / exact.l2_norm();
    Ok((err <= 1e-8, format!("relative L2 error {err:.1e}")))
}

fn strichartz(out: &Path) -> Check {
    let o = run_config(Command::Strichartz, "strichartz.json", out)?;
    Ok((
        o.pass(),
        format!(
            "slope {:.4} (target {:.4}), alpha=0 spread {:.3}{}",
            metric(&o, "slope"),
            o.report.targets.get("slope").copied().unwrap_or(f64::NAN),
            metric(&o, "alpha0.ratio_spread"),
            failed_checks(&o)
        ),
    ))
}

fn bilinear(out: &Path) -> Check {
    let o = run_config(Command::Bilinear, "bilinear.json", out)?;
    Ok((
        o.pass(),
        format!(
            "slope {:.4}, sweep oracle {:.1e}, 20 random pairs {:.1e}, conjugation {:.1e}{}",
            metric(&o, "slope"),
            metric(&o, "max_oracle_rel_diff"),
            metric(&o, "random_max_oracle_rel_diff"),
            metric(&o, "conjugation_rel_diff"),
            failed_checks(&o)
        ),
    ))
}

fn scaling() -> Check {
    let g = GridSpec::new(1, 1024, 40.0).unwrap();
    let u = gaussian(&g, 1.0, 0.0);
    let mut detail = Vec::new();
    let mut ok = true;

    let sigmas = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
    let mut worst_exp = 0.0_f64;
    for kappa in [1u32, 2, 3] {
        let ratios: Vec<f64> = sigmas
            .iter()
            .map(|&s| scaling_transform(&u, s, kappa, ScaleTarget::Rescaled).map(|v| v.l2_norm() / u.l2_norm()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let slope = fit_loglog(&sigmas, &ratios).map_err(|e| e.to_string())?.slope;
        worst_exp = worst_exp.max((slope - (1.0 / kappa as f64 - 0.5)).abs());
    }
    ok &= worst_exp <= 1e-10;
    detail.push(format!("L2 exponent error {worst_exp:.1e}"));

    let carrier = gaussian(&GridSpec::new(1, 2048, 40.0).unwrap(), 1.0, 8.0);
    let mut worst_h = 0.0_f64;
    for kappa in [2u32, 3, 4] {
        let s = 0.5 - 1.0 / kappa as f64;
        for (field, target) in [(&u, ScaleTarget::Rescaled), (&carrier, ScaleTarget::SameGrid)] {
            let v = scaling_transform(field, 2.0, kappa, target).map_err(|e| e.to_string())?;
            let a = sobolev_norm(&field.to_spectral(), s, true).map_err(|e| e.to_string())?;
            let b = sobolev_norm(&v.to_spectral(), s, true).map_err(|e| e.to_string())?;
            worst_h = worst_h.max(rel(a, b));
        }
    }
    ok &= worst_h <= 1e-6;
    detail.push(format!("critical Sobolev invariance {worst_h:.1e}"));

    // evolve-then-scale against scale-then-evolve on the rescaled box
    let (sigma, kappa, t, dt) = (2.0, 1u32, 0.5, 1e-3);
    let u0 = gaussian(&g, 1.0, 1.0);
    let solve = |v: &Field, t: f64, dt: f64| {
        let mut cfg = EvolutionConfig::new(1.0, kappa, dt, t);
        cfg.snapshot_stride = 0;
        evolve(v, &cfg).map(|tr| tr.final_state().clone())
    };
    let a = scaling_transform(&solve(&u0, t, dt).map_err(|e| e.to_string())?, sigma, kappa, ScaleTarget::Rescaled)
        .map_err(|e| e.to_string())?;
    let b = solve(
        &scaling_transform(&u0, sigma, kappa, ScaleTarget::Rescaled).map_err(|e| e.to_string())?,
        t / (sigma * sigma),
        dt / (sigma * sigma),
    )
    .map_err(|e| e.to_string())?;
    let commute = a.sub(&b).map_err(|e| e.to_string())?.l2_norm() / a.l2_norm();
    let coarse = solve(&u0, t, 2.0 * dt).map_err(|e| e.to_string())?;
    let scheme = coarse.sub(&solve(&u0, t, dt).unwrap()).unwrap().l2_norm() / coarse.l2_norm();
    ok &= commute <= 1e-3 * scheme;
    detail.push(format!("solve/scale commutation {commute:.1e} (scheme error {scheme:.1e})"));
    Ok((ok, detail.join("; ")))
}

fn supercritical(out: &Path) -> Check {
    let o = run_config(Command::Construct, "construct.json", out)?;
    Ok((
        o.pass(),
        format!(
            "M-norm sigma slope {:.3}, Besov exponent {:.3}, grid-max exponent {:.3}, alpha=0 grid-max exponent {:.3}{}",
            metric(&o, "modulation_slope"),
            metric(&o, "besov_exponent"),
            metric(&o, "grid_max_exponent"),
            metric(&o, "alpha0.grid_max_exponent"),
            failed_checks(&o)
        ),
    ))
}

fn inflation(out: &Path) -> Check {
    let a = run_config(Command::Inflate, "inflate_alpha0.json", out)?;
    let summary: Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("inflate_alpha0/inflate_summary.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let kappa = a.config.experiment.inflate.kappa as f64;
    let s = a.config.experiment.inflate.s;
    let summary_ok = summary["metrics"]["slope"].is_f64()
        && summary["targets"]["slope"].as_f64().is_some_and(|t| (t + 2.0 * kappa * s).abs() < 1e-12)
        && summary["pass"].is_boolean();
    let b = run_config(Command::Inflate, "inflate_alpha05.json", out)?;
    Ok((
        a.pass() && b.pass() && summary_ok,
        format!(
            "alpha=0 slope {:.3} (target {:.3}), control slope {:.3}; alpha=0.5 slope {:.3} (target {:.3}){}{}",
            metric(&a, "slope"),
            -2.0 * kappa * s,
            metric(&a, "control_slope"),
            metric(&b, "slope"),
            b.report.targets.get("slope").copied().unwrap_or(f64::NAN),
            failed_checks(&a),
            failed_checks(&b)
        ),
    ))
}

fn picard(out: &Path) -> Check {
    let small = run_config(Command::Picard, "picard_small.json", out)?;
    let large = run_config(Command::Picard, "picard_large.json", out)?;
    let failed = large.report.notes.iter().any(|n| n.contains("failed to contract"));
    Ok((
        small.pass() && large.pass() && failed,
        format!(
            "small data: {} iterations, max ratio {:.1e}; large data: contraction failure {}{}{}",
            metric(&small, "iterations"),
            metric(&small, "max_ratio"),
            failed,
            failed_checks(&small),
            failed_checks(&large)
        ),
    ))
}

fn glassey(out: &Path) -> Check {
    let o = run_config(Command::Glassey, "glassey.json", out)?;
    Ok((
        o.pass(),
        format!(
            "energy {:.3}, virial {:.3}, focusing growth {:.1}x, defocusing {:.2}x{}",
            metric(&o, "energy"),
            metric(&o, "virial"),
            metric(&o, "growth"),
            metric(&o, "defocusing_ratio"),
            failed_checks(&o)
        ),
    ))
}

fn p_variation_enumeration() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=12usize);
        let p = rng.gen_range(1..=3u32);
        // integer samples keep every partial sum exact
        let series: Vec<f64> = (0..n).map(|_| rng.gen_range(-50i64..50) as f64).collect();
        let dist = |a: &f64, b: &f64| (a - b).abs();
        let dp = p_variation(&series, p as f64, dist).map_err(|e| e.to_string())?;
        let mut best = 0.0_f64;
        for mask in 0u32..(1 << (n - 2)) {
            let mut idx = vec![0];
            idx.extend((1..n - 1).filter(|i| mask & (1 << (i - 1)) != 0));
            idx.push(n - 1);
            let sum: f64 = idx.windows(2).map(|w| dist(&series[w[0]], &series[w[1]]).powi(p as i32)).sum();
            best = best.max(sum);
        }
        if dp != best.powf(1.0 / p as f64) {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches in 200 cases")))
}

fn determinism(out: &Path) -> Check {
    let bin = env!("CARGO_BIN_EXE_alphamod");
    let cases = [
        ("evolve", "evolve_linear.json"),
        ("decompose", "decompose_2d.json"),
        ("picard", "picard_small.json"),
        ("glassey", "glassey.json"),
    ];
    let quick_bilinear =
        r#"{"command":"bilinear","seed":7,"experiment":{"bilinear":{"separations":[4.0,8.0],"random_pairs":3}}}"#;
    let quick_path = out.join("quick_bilinear.json");
    std::fs::write(&quick_path, quick_bilinear).map_err(|e| e.to_string())?;
    let mut compared = 0;
    let mut differing = Vec::new();
    let all =
        cases.iter().map(|(c, f)| (*c, configs().join(f))).chain(std::iter::once(("bilinear", quick_path.clone())));
    for (command, cfg) in all {
        let mut dirs = Vec::new();
        for (run, jobs) in [(0, "1"), (1, "2")] {
            let dir = out.join(format!("determinism_{command}_{run}"));
            let status = Process::new(bin)
                .args([command, "--config"])
                .arg(&cfg)
                .args(["--jobs", jobs, "--out"])
                .arg(&dir)
                .output()
                .map_err(|e| e.to_string())?
                .status;
            if status.code() != Some(0) {
                return Ok((false, format!("{command} exited with {status}")));
            }
            dirs.push(dir);
        }
        let mut names: Vec<_> = std::fs::read_dir(&dirs[0])
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok().map(|e| e.file_name()))
            .filter(|n| n.to_string_lossy().ends_with(".csv"))
            .collect();
        names.sort();
        for name in names {
            let a = std::fs::read(dirs[0].join(&name)).map_err(|e| e.to_string())?;
            let b = std::fs::read(dirs[1].join(&name)).map_err(|e| e.to_string())?;
            compared += 1;
            if a != b {
                differing.push(name.to_string_lossy().into_owned());
            }
        }
    }
    Ok((
        differing.is_empty() && compared > 0,
        format!("{compared} CSV files compared across runs with 1 and 2 threads, {} differ", differing.len()),
    ))
}

struct Criterion {
    number: u32,
    name: &'static str,
    limit: Duration,
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let out = tmp.path();
    let secs = Duration::from_secs;
    let criteria: Vec<(Criterion, Box<dyn Fn() -> Check + '_>)> = vec![
        (Criterion { number: 1, name: "partition of unity", limit: secs(10) }, Box::new(|| partition(out))),
        (Criterion { number: 2, name: "transform and Plancherel", limit: secs(10) }, Box::new(plancherel)),
        (Criterion { number: 3, name: "conservation", limit: secs(120) }, Box::new(conservation)),
        (Criterion { number: 4, name: "free propagator oracle", limit: secs(5) }, Box::new(propagator_oracle)),
        (Criterion { number: 5, name: "Strichartz exponent", limit: secs(300) }, Box::new(|| strichartz(out))),
        (Criterion { number: 6, name: "bilinear decay", limit: secs(300) }, Box::new(|| bilinear(out))),
        (Criterion { number: 7, name: "scaling laws", limit: secs(120) }, Box::new(scaling)),
        (Criterion { number: 8, name: "supercritical data claims", limit: secs(600) }, Box::new(|| supercritical(out))),
        (Criterion { number: 9, name: "norm inflation", limit: secs(900) }, Box::new(|| inflation(out))),
        (Criterion { number: 10, name: "Picard contraction", limit: secs(300) }, Box::new(|| picard(out))),
        (Criterion { number: 11, name: "Glassey blow-up", limit: secs(300) }, Box::new(|| glassey(out))),
        (Criterion { number: 12, name: "p-variation", limit: secs(10) }, Box::new(p_variation_enumeration)),
        (Criterion { number: 13, name: "determinism", limit: secs(60) }, Box::new(|| determinism(out))),
    ];
    let mut failures = 0;
    for (c, check) in &criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok((ok, detail)) => (ok, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= c.limit;
        let pass = ok && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<28} {}  [{:.1} s / {} s] {}{}",
            c.number,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            detail,
            if in_time { "" } else { " (over time limit)" }
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
