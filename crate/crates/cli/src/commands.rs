use std::fmt::Write as _;

use haavail_core::metrics::{
    self, availability, downtime_sweep, log_grid, validate_all, Method, ModelKind, SweepFixed,
    ValidationOptions,
};
use haavail_core::montecarlo::{self, SimConfig, SimMode, RNG_ALGORITHM};
use haavail_core::{ModelError, ModelParams, StateId};

use crate::output::{num, write_csv, RunManifest};
use crate::{
    CliError, CliResult, CommonOut, MethodArg, SimArgs, SimulateArgs, SolveArgs, SweepArgs,
    ValidateArgs,
};

fn params_line(p: &ModelParams) -> String {
    format!(
        "lambda={} lambda_s={} mu={} beta={} c={} c_s={} T={}",
        p.lambda_active, p.lambda_standby, p.mu, p.beta, p.c, p.c_s, p.diag_interval
    )
}

fn manifest_for(command: &str, out: &CommonOut) -> RunManifest {
    let mut m = RunManifest::new(command);
    if out.stamp {
        m.stamp_now();
    }
    if let Some(path) = &out.output {
        m.outputs.push(path.clone());
    }
    m
}

fn emit(out: &CommonOut, manifest: &RunManifest, columns: &[&str], rows: &[Vec<String>], table: String) -> CliResult {
    match &out.output {
        Some(path) => {
            write_csv(path, manifest, columns, rows).map_err(CliError::Input)?;
            println!("wrote {}", path.display());
        }
        None => print!("{table}"),
    }
    Ok(())
}

pub fn solve(args: SolveArgs) -> CliResult {
    let p = args.params.resolve().map_err(CliError::Input)?;
    let model = ModelKind::from(args.model);
    let method = match args.method {
        MethodArg::Numeric => Method::Numeric,
        MethodArg::Closed => Method::ClosedForm,
    };
    let report = metrics::solve(model, method, p)?;
    let ss = &report.state_probs;

    let mut manifest = manifest_for("solve", &args.out);
    manifest.params = Some(report.params);
    manifest.set("model", model);
    manifest.set("source", ss.source());
    manifest.set("availability", num(report.availability));
    manifest.set("downtime_min_per_year", num(report.downtime_min_per_year));

    let rows: Vec<Vec<String>> = StateId::ALL
        .iter()
        .map(|s| {
            vec![
                s.to_string(),
                if s.is_down() { "down" } else { "up" }.to_string(),
                num(ss.prob(*s)),
            ]
        })
        .collect();

    let mut t = String::new();
    let _ = writeln!(t, "model: {model} ({})", ss.source());
    let _ = writeln!(t, "parameters: {}", params_line(&report.params));
    let _ = writeln!(t, "{:<6} {:<5} {:<24} description", "state", "", "probability");
    for s in StateId::ALL {
        let status = if s.is_down() { "down" } else { "up" };
        let _ = writeln!(t, "{:<6} {:<5} {:<24} {}", s, status, num(ss.prob(s)), s.describe());
    }
    let _ = writeln!(t, "sum of probabilities: {}", num(ss.total()));
    let _ = writeln!(t, "availability: {}", num(report.availability));
    let _ = writeln!(t, "downtime (minutes/year): {}", num(report.downtime_min_per_year));

    emit(&args.out, &manifest, &["state", "status", "probability"], &rows, t)
}

pub fn sweep(args: SweepArgs) -> CliResult {
    let ratios = match &args.ratios {
        Some(r) => r.clone(),
        None => {
            if args.points == 0 {
                return Err(CliError::Input(anyhow::anyhow!("points must be at least 1")));
            }
            if !(args.ratio_min > 0.0) || !(args.ratio_max > args.ratio_min) {
                return Err(CliError::Input(anyhow::anyhow!(
                    "ratio range must satisfy 0 < ratio-min < ratio-max"
                )));
            }
            log_grid(args.ratio_min, args.ratio_max, args.points)
        }
    };
    let fixed = SweepFixed {
        c: args.c,
        c_s: args.c_s,
        mu: args.mu,
        beta: args.beta,
    };
    let result = downtime_sweep(&ratios, fixed, args.t)?;

    let mut manifest = manifest_for("sweep", &args.out);
    manifest.set("T", num(args.t));
    manifest.set("c", num(fixed.c));
    manifest.set("c_s", num(fixed.c_s));
    manifest.set("mu", num(fixed.mu));
    manifest.set("beta", num(fixed.beta));
    manifest.set("lambda", "mu/ratio");
    manifest.set("lambda_s", "lambda/4");
    manifest.set("points", result.rows.len());

    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.ratio),
                num(r.params.lambda_active),
                num(r.params.lambda_standby),
                num(r.downtime_ctmc),
                num(r.downtime_smp),
                num(r.difference),
            ]
        })
        .collect();

    let mut t = String::new();
    let _ = writeln!(
        t,
        "T={} c={} c_s={} mu={} beta={} lambda_s=lambda/4",
        args.t, fixed.c, fixed.c_s, fixed.mu, fixed.beta
    );
    let _ = writeln!(
        t,
        "{:>12} {:>12} {:>18} {:>18} {:>14}",
        "mu/lambda", "lambda", "ctmc min/yr", "smp min/yr", "smp - ctmc"
    );
    for r in &result.rows {
        let _ = writeln!(
            t,
            "{:>12.4e} {:>12.4e} {:>18.9} {:>18.9} {:>14.6e}",
            r.ratio, r.params.lambda_active, r.downtime_ctmc, r.downtime_smp, r.difference
        );
    }

    emit(
        &args.out,
        &manifest,
        &[
            "ratio",
            "lambda",
            "lambda_s",
            "downtime_ctmc_min_yr",
            "downtime_smp_min_yr",
            "difference_min_yr",
        ],
        &rows,
        t,
    )
}

fn sim_config(p: ModelParams, sim: &SimArgs, mode: SimMode) -> SimConfig {
    SimConfig {
        params: p,
        horizon: sim.horizon,
        max_transitions: sim.max_transitions,
        seed: sim.seed,
        mode,
        replications: sim.reps,
    }
}

pub fn simulate(args: SimulateArgs) -> CliResult {
    let p = args.params.resolve().map_err(CliError::Input)?;
    let cfg = sim_config(p, &args.sim, args.mode.into());
    let result = montecarlo::simulate(&cfg)?;
    // the semi-Markov solution needs lambda > 0
    let analytic = match metrics::solve_smp(p) {
        Ok(r) => Some(r),
        Err(ModelError::InvalidParam(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let a_smp = analytic.map(|r| r.availability);
    let est = result.availability;

    let mut manifest = manifest_for("simulate", &args.out);
    manifest.params = Some(p);
    manifest.seed = Some(cfg.seed);
    manifest.rng = Some(RNG_ALGORITHM);
    manifest.set("mode", cfg.mode);
    manifest.set("horizon_hours_per_replication", num(cfg.horizon));
    manifest.set("replications", cfg.replications);
    if let Some(m) = cfg.max_transitions {
        manifest.set("max_transitions", m);
    }
    manifest.set("availability", num(est.mean));
    manifest.set("ci95_half_width", num(est.half_width));
    if let Some(a) = a_smp {
        manifest.set("availability_smp", num(a));
        manifest.set("abs_gap_vs_smp", num((est.mean - a).abs()));
    }

    let rows: Vec<Vec<String>> = StateId::ALL
        .iter()
        .map(|s| {
            vec![
                s.to_string(),
                num(result.occupancy[s.index()]),
                analytic
                    .map(|r| num(r.state_probs.prob(*s)))
                    .unwrap_or_else(|| "nan".into()),
            ]
        })
        .collect();

    let mut t = String::new();
    let _ = writeln!(t, "mode: {}", cfg.mode);
    let _ = writeln!(t, "parameters: {}", params_line(&p));
    let _ = writeln!(
        t,
        "seed={} replications={} horizon={} h/replication rng={}",
        cfg.seed, cfg.replications, cfg.horizon, RNG_ALGORITHM
    );
    let _ = writeln!(t, "transitions observed: {}", result.total_transitions());
    let _ = writeln!(t, "{:<6} {:<24} {:<24}", "state", "occupancy", "smp analytic");
    for row in &rows {
        let _ = writeln!(t, "{:<6} {:<24} {:<24}", row[0], row[1], row[2]);
    }
    let _ = writeln!(
        t,
        "simulated availability: {} (95% CI [{}, {}])",
        num(est.mean),
        num(est.lower()),
        num(est.upper())
    );
    match a_smp {
        Some(a) => {
            let _ = writeln!(t, "analytic smp availability: {}", num(a));
            let _ = writeln!(t, "analytic inside CI: {}", if est.contains(a) { "yes" } else { "no" });
            if cfg.mode == SimMode::PeriodicClock {
                let _ = writeln!(t, "periodic vs smp availability gap: {}", num((est.mean - a).abs()));
            }
        }
        None => {
            let _ = writeln!(t, "analytic smp availability: n/a (requires lambda > 0)");
        }
    }

    emit(&args.out, &manifest, &["state", "occupancy", "smp_probability"], &rows, t)
}

pub fn validate(args: ValidateArgs) -> CliResult {
    let p = args.params.resolve().map_err(CliError::Input)?;
    let opts = ValidationOptions {
        horizon: args.sim.horizon,
        replications: args.sim.reps,
        seed: args.sim.seed,
        closed_form_perturbation: args.perturb_closed_form,
    };
    if args.sim.max_transitions.is_some() {
        return Err(CliError::Input(anyhow::anyhow!(
            "--max-transitions is not supported by validate"
        )));
    }
    let report = validate_all(p, &opts)?;

    let mut manifest = manifest_for("validate", &args.out);
    manifest.params = Some(report.params);
    manifest.seed = Some(opts.seed);
    manifest.rng = Some(RNG_ALGORITHM);
    manifest.set("horizon_hours_per_replication", num(opts.horizon));
    manifest.set("replications", opts.replications);
    if let Some(eps) = opts.closed_form_perturbation {
        manifest.set("closed_form_perturbation", num(eps));
    }
    manifest.set("passed", report.passed());

    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                format!("\"{}\"", c.name),
                num(c.value),
                num(c.tolerance),
                c.passed.to_string(),
            ]
        })
        .collect();

    let mut t = String::new();
    let _ = writeln!(t, "parameters: {}", params_line(&report.params));
    let _ = write!(t, "{:<6}", "state");
    for s in &report.sources {
        let _ = write!(t, " {:<24}", s.source().as_str());
    }
    let _ = writeln!(t);
    for st in StateId::ALL {
        let _ = write!(t, "{:<6}", st.to_string());
        for s in &report.sources {
            let _ = write!(t, " {:<24}", num(s.prob(st)));
        }
        let _ = writeln!(t);
    }
    let _ = write!(t, "{:<6}", "avail");
    for s in &report.sources {
        let _ = write!(t, " {:<24}", num(availability(s)));
    }
    let _ = writeln!(t);
    let _ = writeln!(t, "pairwise max relative difference:");
    for (a, b, d) in &report.pairwise {
        let _ = writeln!(t, "  {a} vs {b}: {}", num(*d));
    }
    let sim = &report.simulation.availability;
    let _ = writeln!(
        t,
        "simulated availability: {} ± {} (95% CI), smp: {}",
        num(sim.mean),
        num(sim.half_width),
        num(report.availability_smp)
    );
    let _ = writeln!(t, "checks:");
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(t, "  [{verdict}] {}: {} (limit {})", c.name, num(c.value), num(c.tolerance));
    }
    for note in &report.notes {
        let _ = writeln!(t, "note: {note}");
    }
    let _ = writeln!(t, "result: {}", if report.passed() { "PASS" } else { "FAIL" });

    // the report is printed even when --output is given
    print!("{t}");
    if let Some(path) = &args.out.output {
        write_csv(path, &manifest, &["check", "value", "tolerance", "passed"], &rows)
            .map_err(CliError::Input)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}
