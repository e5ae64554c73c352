//! The six experiment commands.

use std::io::Write;

use serde_json::json;

use tlf_core::cumulants::{
    cumulants_with_tolerance, oracle_cumulants_with_tolerance, CumulantReport, CumulantSet,
};
use tlf_core::distribution::{tail_density_first_order, TruncatedDistribution};
use tlf_core::estimator::{correlation_coefficient, joint_cumulant, BootstrapConfig};
use tlf_core::sampler::WalkEnsemble;
use tlf_core::verification;
use tlf_core::walk_theory::{classify_regime, threefold_coefficient, Regime};
use tlf_core::{Error, Result};

use crate::config::{ExperimentConfig, Format};
use crate::output::OutputCtx;

fn print_warnings(set: &CumulantSet, label: &str) {
    for w in set.warnings() {
        eprintln!("warning ({label}): {w}");
    }
}

/// `cumulants`: expansion and oracle cumulant sets side by side.
pub fn cmd_cumulants(cfg: &ExperimentConfig) -> Result<()> {
    let out = OutputCtx::new(&cfg.out_dir, cfg.hash())?;
    let engine = cumulants_with_tolerance(&cfg.deformation, cfg.stable, cfg.max_order, cfg.tolerance)?;
    print_warnings(&engine, "expansion");
    let oracle =
        oracle_cumulants_with_tolerance(&cfg.deformation, cfg.stable, cfg.max_order, cfg.tolerance)?;

    let rep_engine = CumulantReport::new(&cfg.deformation, cfg.stable, &engine, "expansion");
    let rep_oracle = CumulantReport::new(&cfg.deformation, cfg.stable, &oracle, "oracle");

    if cfg.wants(Format::Json) {
        let path = out.write_json(
            "cumulants.json",
            json!({ "results": [rep_engine, rep_oracle] }),
        )?;
        println!("wrote {}", path.display());
    }
    if cfg.wants(Format::Csv) {
        let (mut w, path) = out.csv_writer("cumulants.csv")?;
        writeln!(
            w,
            "order,kappa_expansion,kappa_oracle,lambda_expansion,lambda_oracle"
        )?;
        for j in 1..=cfg.max_order {
            let (le, lo) = if j >= 3 {
                (
                    format!("{:.17e}", engine.lambda(j)),
                    format!("{:.17e}", oracle.lambda(j)),
                )
            } else {
                (String::new(), String::new())
            };
            writeln!(
                w,
                "{j},{:.17e},{:.17e},{le},{lo}",
                engine.kappa(j),
                oracle.kappa(j)
            )?;
        }
        println!("wrote {}", path.display());
    }
    println!(
        "epsilon = {:.3e}; expansion vs oracle kappa2: {:.6e} vs {:.6e}",
        engine.epsilon(),
        engine.kappa(2),
        oracle.kappa(2)
    );
    Ok(())
}

/// `simulate`: generate and store a walk ensemble.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<()> {
    let out = OutputCtx::new(&cfg.out_dir, cfg.hash())?;
    let ensemble = WalkEnsemble::generate_with_budget(
        &cfg.deformation,
        cfg.stable,
        cfg.walks,
        cfg.steps,
        cfg.seed,
        cfg.budget_mb * (1 << 20),
    )?;
    println!(
        "generated {} walks x {} steps (seed {}), acceptance rate {:.5}",
        ensemble.walks(),
        ensemble.steps(),
        ensemble.seed(),
        ensemble.acceptance_rate()
    );
    if cfg.wants(Format::Binary) {
        let path = out.path("ensemble.bin");
        ensemble.write_binary_path(&path, out.hash())?;
        println!("wrote {}", path.display());
    }
    if cfg.wants(Format::Csv) {
        if cfg.walks * cfg.steps <= 100_000 {
            let (mut w, path) = out.csv_writer("ensemble.csv")?;
            ensemble.write_csv(&mut w)?;
            println!("wrote {}", path.display());
        } else {
            eprintln!(
                "note: skipping CSV export ({} values; CSV is for small cases)",
                cfg.walks * cfg.steps
            );
        }
    }
    Ok(())
}

fn load_or_generate(cfg: &ExperimentConfig) -> Result<WalkEnsemble> {
    match &cfg.ensemble_path {
        Some(path) => {
            let (ensemble, _) = WalkEnsemble::read_binary_path(path)?;
            if ensemble.stable() != cfg.stable
                || ensemble.spec().kind() != cfg.deformation.kind()
                || (ensemble.spec().beta() - cfg.deformation.beta()).abs() > 1e-12
                || (ensemble.spec().l() - cfg.deformation.l()).abs() > 1e-12
            {
                eprintln!(
                    "warning: ensemble file parameters differ from the config; \
                     using the file's parameters for theory values"
                );
            }
            Ok(ensemble)
        }
        None => WalkEnsemble::generate_with_budget(
            &cfg.deformation,
            cfg.stable,
            cfg.walks,
            cfg.steps,
            cfg.seed,
            cfg.budget_mb * (1 << 20),
        ),
    }
}

/// `correlate`: theory-vs-simulation correlation reports plus the anchored
/// threefold-correlation surface grid.
pub fn cmd_correlate(cfg: &ExperimentConfig) -> Result<()> {
    let out = OutputCtx::new(&cfg.out_dir, cfg.hash())?;
    let ensemble = load_or_generate(cfg)?;
    let spec = ensemble.spec().clone();
    let stable = ensemble.stable();
    let order = cfg.max_order.max(4);
    let theory = cumulants_with_tolerance(&spec, stable, order, cfg.tolerance)?;
    print_warnings(&theory, "theory cumulants");
    let boot = BootstrapConfig {
        resamples: cfg.bootstrap_resamples,
        seed: cfg.bootstrap_seed(),
    };

    let mut rows = Vec::new();
    for times in &cfg.queries {
        let max_t = *times.iter().max().unwrap() as usize;
        if max_t > ensemble.steps() {
            return Err(Error::Domain(format!(
                "query {times:?} exceeds the ensemble length N = {}",
                ensemble.steps()
            )));
        }
        let k = joint_cumulant(&ensemble, times, &boot)?;
        let r = correlation_coefficient(&ensemble, times, &theory, &boot)?;
        let min = *times.iter().min().unwrap() as f64;
        rows.push(json!({
            "times": times,
            "order": times.len(),
            "k_hat": k.value,
            "k_se": k.std_error,
            "k_theory": theory.kappa(times.len()) * min,
            "r_theory": r.theory,
            "r_hat": r.empirical,
            "r_se": r.std_error,
            "z": r.z_score,
            "m_used": r.m_used,
        }));
        println!(
            "R_{}{:?}: empirical {:.4} ± {:.4}, theory {:.4} (z = {:+.2})",
            times.len(),
            times,
            r.empirical,
            r.std_error,
            r.theory,
            r.z_score
        );
    }

    if cfg.wants(Format::Json) {
        let path = out.write_json(
            "correlations.json",
            json!({
                "ensemble": {
                    "walks": ensemble.walks(),
                    "steps": ensemble.steps(),
                    "seed": ensemble.seed(),
                    "acceptance_rate": ensemble.acceptance_rate(),
                },
                "reports": rows,
            }),
        )?;
        println!("wrote {}", path.display());
    }
    if cfg.wants(Format::Csv) {
        let (mut w, path) = out.csv_writer("correlations.csv")?;
        writeln!(w, "order,times,k_hat,k_se,k_theory,r_theory,r_hat,r_se,z,m_used")?;
        for row in &rows {
            let times: Vec<String> = row["times"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.to_string())
                .collect();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                row["order"],
                times.join(":"),
                row["k_hat"],
                row["k_se"],
                row["k_theory"],
                row["r_theory"],
                row["r_hat"],
                row["r_se"],
                row["z"],
                row["m_used"],
            )?;
        }
        println!("wrote {}", path.display());

        let (mut w, path) = out.csv_writer("surface_r3.csv")?;
        writeln!(w, "tau2,tau3,r3,region")?;
        let m = cfg.anchor_m;
        let lambda3 = theory.lambda(3);
        let lo = -(m as f64) + 1.0;
        let hi = 3.0 * m as f64;
        for i in 0..cfg.surface_grid {
            let t2 = lo + (hi - lo) * i as f64 / (cfg.surface_grid - 1) as f64;
            for k in 0..cfg.surface_grid {
                let t3 = lo + (hi - lo) * k as f64 / (cfg.surface_grid - 1) as f64;
                let (r3, region) = threefold_coefficient(lambda3, m, t2, t3)?;
                writeln!(w, "{t2},{t3},{r3:.17e},{region:?}")?;
            }
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// `regime`: Lévy/crossover/Gaussian classification over a step sweep.
pub fn cmd_regime(cfg: &ExperimentConfig) -> Result<()> {
    let out = OutputCtx::new(&cfg.out_dir, cfg.hash())?;
    let scale = (cfg.deformation.l() / cfg.stable.gamma()).powf(cfg.stable.alpha());
    let mut rows = Vec::new();
    let mut n = 1u64;
    while n <= cfg.regime_max_n {
        let regime = classify_regime(cfg.stable, &cfg.deformation, n);
        rows.push((n, regime));
        n = n.saturating_mul(2);
    }
    if cfg.wants(Format::Json) {
        let body = json!({
            "levy_below": scale,
            "gaussian_above": 100.0 * scale,
            "rows": rows.iter().map(|(n, r)| json!({ "n": n, "regime": r })).collect::<Vec<_>>(),
        });
        let path = out.write_json("regime.json", body)?;
        println!("wrote {}", path.display());
    }
    if cfg.wants(Format::Csv) {
        let (mut w, path) = out.csv_writer("regime.csv")?;
        writeln!(w, "# levy for n <= {scale}, gaussian for n >= {}", 100.0 * scale)?;
        writeln!(w, "n,regime")?;
        for (n, regime) in &rows {
            let label = match regime {
                Regime::Levy => "levy",
                Regime::Crossover => "crossover",
                Regime::Gaussian => "gaussian",
            };
            writeln!(w, "{n},{label}")?;
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// `tailcheck`: tail-density comparison table (first-order tail form vs the
/// full density, free and truncated).
pub fn cmd_tailcheck(cfg: &ExperimentConfig) -> Result<()> {
    let out = OutputCtx::new(&cfg.out_dir, cfg.hash())?;
    let spec = &cfg.deformation;
    let stable = cfg.stable;
    let dist = TruncatedDistribution::with_tolerance(spec, stable, cfg.tolerance)?;
    let tail_mass = dist.tail_mass();
    if tail_mass > 0.5 {
        eprintln!(
            "warning: removed tail mass b = {tail_mass:.3} exceeds 0.5; \
             the small-epsilon picture has broken down"
        );
    }

    let ratio = spec.l() / stable.gamma();
    let (lo_supp, hi_supp) = spec.support(1e-12);
    let z_min = 20.0f64;
    let mut rows = Vec::new();
    for side in [-1.0f64, 1.0] {
        let edge = if side > 0.0 { hi_supp } else { -lo_supp };
        let z_max = 0.9 * edge * ratio;
        if z_max <= z_min * 1.5 {
            return Err(Error::Domain(format!(
                "truncation support ends at |x|/gamma = {z_max:.1}; \
                 no tail region beyond {z_min} to check (increase l/gamma)"
            )));
        }
        let step = (z_max / z_min).powf(1.0 / (cfg.tail_points - 1).max(1) as f64);
        let mut z = z_min;
        for _ in 0..cfg.tail_points {
            let x = side * z * stable.gamma();
            let p_full = tlf_core::distribution::stable_pdf(stable, x);
            let p_tail = tail_density_first_order(stable, x);
            let p_trunc = dist.pdf(x);
            let p_trunc_tail = p_tail * spec.eval(x / spec.l());
            rows.push(json!({
                "x": x,
                "xi": x / spec.l(),
                "stable_pdf": p_full,
                "stable_tail_first_order": p_tail,
                "stable_rel_dev": p_full / p_tail - 1.0,
                "truncated_pdf": p_trunc,
                "truncated_tail_first_order": p_trunc_tail,
                "truncated_rel_dev": if p_trunc_tail != 0.0 { p_trunc / p_trunc_tail - 1.0 } else { f64::NAN },
            }));
            z *= step;
        }
    }
    rows.sort_by(|a, b| a["x"].as_f64().unwrap().total_cmp(&b["x"].as_f64().unwrap()));

    if cfg.wants(Format::Json) {
        let path = out.write_json(
            "tailcheck.json",
            json!({
                "normalization": dist.normalization(),
                "tail_mass": tail_mass,
                "rows": rows,
            }),
        )?;
        println!("wrote {}", path.display());
    }
    if cfg.wants(Format::Csv) {
        let (mut w, path) = out.csv_writer("tailcheck.csv")?;
        writeln!(w, "# normalization={} tail_mass={}", dist.normalization(), tail_mass)?;
        writeln!(
            w,
            "x,xi,stable_pdf,stable_tail_first_order,stable_rel_dev,\
             truncated_pdf,truncated_tail_first_order,truncated_rel_dev"
        )?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r["x"],
                r["xi"],
                r["stable_pdf"],
                r["stable_tail_first_order"],
                r["stable_rel_dev"],
                r["truncated_pdf"],
                r["truncated_tail_first_order"],
                r["truncated_rel_dev"],
            )?;
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// `reproduce-paper`: run every desk-scale check, print one line per
/// criterion, optionally write the report. Returns true when all pass.
pub fn cmd_reproduce_paper(out_dir: Option<&std::path::Path>) -> Result<bool> {
    let outcomes = verification::run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let all = outcomes.iter().all(|o| o.passed);
    println!(
        "{}: {} of {} criteria passed",
        if all { "SUCCESS" } else { "FAILURE" },
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    );
    if let Some(dir) = out_dir {
        let out = OutputCtx::new(dir, 0)?;
        let body = json!({
            "all_passed": all,
            "criteria": outcomes.iter().map(|o| json!({
                "id": o.id,
                "name": o.name,
                "passed": o.passed,
                "details": o.details,
            })).collect::<Vec<_>>(),
        });
        let path = out.write_json("reproduction.json", body)?;
        println!("wrote {}", path.display());
        let (mut w, path) = out.csv_writer("reproduction.csv")?;
        writeln!(w, "id,passed,name")?;
        for o in &outcomes {
            writeln!(w, "{},{},{}", o.id, o.passed, o.name)?;
        }
        println!("wrote {}", path.display());
    }
    Ok(all)
}

