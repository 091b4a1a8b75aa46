//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode, Output};

use haavail_core::ctmc::{build_generator, ctmc_steady_state_closed_form, ctmc_steady_state_numeric};
use haavail_core::metrics::{default_ratio_grid, downtime_sweep, solve_smp, SweepFixed};
use haavail_core::montecarlo::{simulate, SimConfig};
use haavail_core::numerics::integrate_tail;
use haavail_core::smp::{
    embedded_matrix, mean_sojourn_times, smp_state_probabilities, smp_state_probabilities_closed_form,
    sojourn_descriptors,
};
use haavail_core::{ModelParams, StateId, SteadyState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        10f64.powf(rng.random_range(lo.log10()..=hi.log10()))
    };
    let lambda = log_uniform(rng, 1e-5, 1e-2);
    ModelParams {
        lambda_active: lambda,
        lambda_standby: lambda / 4.0,
        mu: log_uniform(rng, 0.1, 10.0),
        beta: log_uniform(rng, 1.0, 100.0),
        c: rng.random_range(0.5..=1.0),
        c_s: rng.random_range(0.5..=1.0),
        diag_interval: log_uniform(rng, 1.0, 1e3),
    }
}

fn analytic_solutions(p: ModelParams) -> Result<[SteadyState; 4], String> {
    let err = |e: haavail_core::ModelError| format!("{e} at {p:?}");
    Ok([
        ctmc_steady_state_numeric(&build_generator(p).map_err(err)?).map_err(err)?,
        ctmc_steady_state_closed_form(p).map_err(err)?,
        smp_state_probabilities(p).map_err(err)?,
        smp_state_probabilities_closed_form(p).map_err(err)?,
    ])
}

fn random_sets() -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    (0..1000).map(|_| random_params(&mut rng)).collect()
}

fn closed_numeric_equivalence() -> Outcome {
    let mut worst_ctmc = 0.0f64;
    let mut worst_smp = 0.0f64;
    for p in random_sets() {
        let [cn, cc, sn, sc] = analytic_solutions(p)?;
        worst_ctmc = worst_ctmc.max(cn.max_rel_diff(&cc));
        worst_smp = worst_smp.max(sn.max_rel_diff(&sc));
    }
    let msg = format!("1000 sets, max rel diff ctmc {worst_ctmc:.2e}, smp {worst_smp:.2e} (tol 1e-9)");
    if worst_ctmc <= 1e-9 && worst_smp <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn normalization() -> Outcome {
    let mut worst = 0.0f64;
    let mut sets = random_sets();
    sets.push(ModelParams::baseline());
    for p in sets {
        for ss in analytic_solutions(p)? {
            worst = worst.max((ss.total() - 1.0).abs());
        }
    }
    let msg = format!("max |sum - 1| = {worst:.2e} over 4004 solutions (tol 1e-12)");
    if worst <= 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sojourn_consistency() -> Outcome {
    let p = ModelParams::baseline();
    let h = mean_sojourn_times(p).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for d in sojourn_descriptors(&p) {
        let numeric = integrate_tail(&d, d.default_upper()).map_err(|e| e.to_string())?;
        let analytic = h[d.state.index()];
        worst = worst.max((numeric - analytic).abs() / analytic);
    }
    let h6 = h[StateId::BOTH_DOWN.index()];
    let msg = format!("max rel diff {worst:.2e} (tol 1e-6), h6 = {h6}");
    if worst <= 1e-6 && h6 == 0.5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// P(U < X) for U ~ U(0, t), X ~ Exp(lambda), as the double integral
/// 1 − (1/t) ∫₀ᵗ ∫₀ᵘ λe^{−λx} dx du with nested Simpson rules.
fn race_double_integral(lambda: f64, t: f64, panels: usize) -> f64 {
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
        let h = (b - a) / panels as f64;
        let mut acc = f(a) + f(b);
        for k in 1..panels {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
        }
        acc * h / 3.0
    };
    let inner = |u: f64| simpson(&|x: f64| lambda * (-lambda * x).exp(), 0.0, u);
    1.0 - simpson(&inner, 0.0, t) / t
}

fn embedded_kernel() -> Outcome {
    let mut worst_row = 0.0f64;
    let mut sets = random_sets();
    sets.push(ModelParams::baseline());
    for p in &sets {
        let ec = embedded_matrix(*p).map_err(|e| e.to_string())?;
        for s in ec.p.row_sums() {
            worst_row = worst_row.max((s - 1.0).abs());
        }
        if ec.prob(6, 3) != 0.5 || ec.prob(6, 4) != 0.5 {
            return Err(format!("row 6 is not (1/2, 1/2) at {p:?}"));
        }
    }
    let unit = ModelParams {
        lambda_active: 1.0,
        lambda_standby: 0.25,
        diag_interval: 1.0,
        ..ModelParams::baseline()
    };
    let p54 = embedded_matrix(unit).map_err(|e| e.to_string())?.prob(5, 4);
    let quad = race_double_integral(1.0, 1.0, 400);
    let exact = 1.0 - (-1.0f64).exp();
    let msg = format!(
        "max |row sum - 1| = {worst_row:.2e}, P54 = {p54:.15}, double integral {quad:.15}, 1 - e^-1 = {exact:.15}"
    );
    if worst_row <= 1e-12 && (p54 - quad).abs() <= 1e-10 && (p54 - exact).abs() <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn simulation_agreement() -> Outcome {
    let p = ModelParams::baseline();
    let a_smp = solve_smp(p).map_err(|e| e.to_string())?.availability;
    let sim = simulate(&SimConfig::new(p, 1e7, 10, 42)).map_err(|e| e.to_string())?;
    let est = sim.availability;
    let msg = format!(
        "A_SMP = {a_smp:.10}, simulated {:.10} with 95% CI [{:.10}, {:.10}]",
        est.mean,
        est.lower(),
        est.upper()
    );
    if est.contains(a_smp) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn haavail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haavail"))
        .args(args)
        .output()
        .expect("failed to launch haavail")
}

fn run_twice_to_file(args: &[&str], path: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let mut full = args.to_vec();
    full.extend(["--output", path]);
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = haavail(&full);
        if !out.status.success() {
            return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
        }
        outputs.push(fs::read(path).map_err(|e| e.to_string())?);
    }
    Ok((outputs.remove(0), outputs.remove(0)))
}

fn sweep_properties() -> Outcome {
    let fixed = SweepFixed::default();
    let grid = default_ratio_grid();
    let base = downtime_sweep(&grid, fixed, 168.0).map_err(|e| e.to_string())?;
    let monotone = |f: fn(&haavail_core::metrics::SweepRow) -> f64| {
        base.rows.windows(2).all(|w| f(&w[1]) <= f(&w[0]))
    };
    let mono_ctmc = monotone(|r| r.downtime_ctmc);
    let mono_smp = monotone(|r| r.downtime_smp);

    let short = downtime_sweep(&grid, fixed, 1e-3).map_err(|e| e.to_string())?;
    let max_gap = short.rows.iter().map(|r| r.difference.abs()).fold(0.0, f64::max);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("sweep.csv");
    let (a, b) = run_twice_to_file(&["sweep"], path.to_str().unwrap())?;
    let rows = String::from_utf8_lossy(&a)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count()
        - 1;

    let msg = format!(
        "{} points, nonincreasing ctmc {mono_ctmc} smp {mono_smp}, max |gap| at T=1e-3 {max_gap:.2e} min/yr (tol 1e-2), csv rows {rows}, reproducible {}",
        grid.len(),
        a == b
    );
    if grid.len() == 40 && mono_ctmc && mono_smp && max_gap <= 1e-2 && rows == 40 && a == b {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn degenerate_coverage() -> Outcome {
    let mut worst = 0.0f64;
    let mut sets = random_sets();
    sets.push(ModelParams::baseline());
    for p in sets {
        let p = ModelParams { c: 1.0, c_s: 1.0, ..p };
        for ss in analytic_solutions(p)? {
            worst = worst
                .max(ss.prob(StateId::UNCOVERED_ACTIVE).abs())
                .max(ss.prob(StateId::LATENT_STANDBY).abs());
        }
    }
    let msg = format!("max(pi2, pi5) over 4004 solutions = {worst:e}");
    if worst <= f64::EPSILON {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let invocations: [&[&str]; 5] = [
        &["solve", "smp"],
        &["solve", "ctmc", "--method", "closed", "--c", "0.95"],
        &["sweep", "--T", "24", "--points", "12"],
        &["simulate", "--seed", "7", "--horizon", "1e6", "--reps", "6"],
        &["validate", "--seed", "42", "--horizon", "1e6"],
    ];
    for (i, args) in invocations.iter().enumerate() {
        let path = dir.path().join(format!("out{i}.csv"));
        let (a, b) = run_twice_to_file(args, path.to_str().unwrap())?;
        if a != b {
            return Err(format!("{args:?} wrote different bytes"));
        }
        let (x, y) = (haavail(args), haavail(args));
        if x.stdout != y.stdout || x.status.code() != y.status.code() {
            return Err(format!("{args:?} printed different output"));
        }
    }
    Ok(format!("{} invocations byte-identical on stdout and CSV", invocations.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("closed-form vs numeric equivalence", closed_numeric_equivalence),
        ("normalization", normalization),
        ("sojourn consistency", sojourn_consistency),
        ("embedded kernel", embedded_kernel),
        ("simulation agreement", simulation_agreement),
        ("downtime sweep properties", sweep_properties),
        ("degenerate coverage", degenerate_coverage),
        ("cli determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("PASS {}. {name}: {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL {}. {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
