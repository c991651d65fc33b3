//! `fbsq`: command-line driver for the Boussinesq simulator and its
//! diagnostic toolkits.
//!
//! Exit codes for `simulate`: 0 clean finish, 1 invalid configuration,
//! 2 non-finite state (partial artifacts flushed), 3 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fbsq_core::admissibility::{
    check_prop31, check_theorem11, discrepancies, enumerate_region, gamma_exponent,
};
use fbsq_core::config::RunConfig;
use fbsq_core::diag::{fit_decay, ResolvabilityGate};
use fbsq_core::error::FbsqError;
use fbsq_core::run::{
    read_series_column, run_simulation, stability_run, thread_cap, verify_lp_suite, RunStatus,
};

#[derive(Parser)]
#[command(name = "fbsq", version, about = "2-D Boussinesq system with fractional dissipation: solver, Littlewood-Paley diagnostics, admissibility calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured simulation to t_end and write CSV/JSON/checkpoint artifacts.
    Simulate(SimulateArgs),
    /// Evaluate the parameter windows of the well-posedness statement.
    Admissible(AdmissibleArgs),
    /// Fit the L^2 decay slope of a recorded series against <t>^{-s0/alpha}.
    FitDecay(FitDecayArgs),
    /// Run the Littlewood-Paley property suites over seeded random fields.
    VerifyLp(VerifyLpArgs),
    /// Co-evolve a perturbed twin and record the stability functional Y(t).
    Stability(StabilityArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct AdmissibleArgs {
    /// Single alpha to evaluate.
    #[arg(long)]
    alpha: Option<f64>,
    /// Scan specification `start:end:step`.
    #[arg(long)]
    scan: Option<String>,
    /// Optional point check values.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    s0: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    c_mu: f64,
    /// Dimension for the basic-energy proposition windows.
    #[arg(long, default_value_t = 2)]
    d: u32,
    /// Write the full JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the scan summary CSV here (with --scan).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct FitDecayArgs {
    /// Series CSV produced by `simulate` (or any CSV with a `t` column).
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    s0: f64,
    #[arg(long)]
    alpha: f64,
    /// Fit window `t_a:t_b`; defaults to [1, gate limit].
    #[arg(long)]
    window: Option<String>,
    /// Column to fit (mean-free L^2 by default).
    #[arg(long, default_value = "l2_theta_zeromean")]
    column: String,
    /// Box length L; taken from a sibling config.toml when omitted.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    gate_beta: f64,
    #[arg(long, default_value_t = 4.0)]
    gate_factor: f64,
    /// Write the fit JSON here (stdout otherwise).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyLpArgs {
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Fault-injection hook for tests: detune the partition profiles.
    #[arg(long, hide = true)]
    corrupt_partition: bool,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    config: PathBuf,
    /// L^2 amplitude of the theta perturbation (0 = identical twins).
    #[arg(long)]
    delta: f64,
    /// Output directory (defaults to `<output.dir>/stability`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Admissible(args) => cmd_admissible(args),
        Command::FitDecay(args) => cmd_fit_decay(args),
        Command::VerifyLp(args) => cmd_verify_lp(args),
        Command::Stability(args) => cmd_stability(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &FbsqError) -> u8 {
    match e {
        FbsqError::ConfigInvalid(_) | FbsqError::MissingColumn(_) => 1,
        FbsqError::NonFiniteState { .. } => 2,
        FbsqError::Io(_) | FbsqError::Csv(_) | FbsqError::Json(_) => 3,
        _ => 1,
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, FbsqError> {
    let (cfg, warnings) = RunConfig::load(&args.config)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let outcome = run_simulation(&cfg, warnings)?;
    println!(
        "run {} at t = {:.4}: theta residual (cumulative) {:.3e}, velocity residual {:.3e}",
        outcome.summary.status,
        outcome.records.last().map(|r| r.t).unwrap_or(0.0),
        outcome.summary.balance.theta_cumulative_residual,
        outcome.summary.balance.velocity_residual,
    );
    println!("artifacts in {}", outcome.out_dir.display());
    match outcome.status {
        RunStatus::Ok => Ok(ExitCode::SUCCESS),
        RunStatus::NonFinite => {
            eprintln!(
                "non-finite state: {}",
                outcome.summary.error.as_deref().unwrap_or("unknown")
            );
            Ok(ExitCode::from(2))
        }
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64, f64), FbsqError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(FbsqError::ConfigInvalid(format!(
            "bad range spec `{spec}`, want start:end:step"
        )));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| FbsqError::ConfigInvalid(format!("bad number `{s}` in range spec")))
    };
    Ok((parse(parts[0])?, parse(parts[1])?, parse(parts[2])?))
}

fn cmd_admissible(args: AdmissibleArgs) -> Result<ExitCode, FbsqError> {
    if let Some(spec) = &args.scan {
        let (start, end, step) = parse_range(spec)?;
        if !(step > 0.0 && end >= start) {
            return Err(FbsqError::ConfigInvalid("scan needs start <= end, step > 0".into()));
        }
        let mut grid = Vec::new();
        let mut a = start;
        while a <= end + 1e-12 {
            grid.push(a);
            a += step;
        }
        let report = enumerate_region(&grid, 4, 4, 3, args.epsilon, args.c_mu);
        let mut csv = String::from(
            "alpha,q_lower,q_upper,nonempty,n_passing,binding_constraint,q_upper_thm11,q_upper_prop31_d2,s0_lower_thm11,s0_lower_prop31_d2\r\n",
        );
        for s in &report.summaries {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\r\n",
                s.alpha,
                s.q_window.0,
                s.q_window.1,
                s.q_window_nonempty,
                s.n_passing,
                s.binding_constraint.as_deref().unwrap_or(""),
                s.discrepancies.q_upper_theorem11,
                s.discrepancies.q_upper_prop31_d2,
                s.discrepancies.s0_lower_theorem11,
                s.discrepancies.s0_lower_prop31_d2,
            ));
        }
        match &args.csv {
            Some(path) => std::fs::write(path, &csv)?,
            None => print!("{csv}"),
        }
        if let Some(path) = &args.json {
            std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
        }
        return Ok(ExitCode::SUCCESS);
    }

    let alpha = args
        .alpha
        .ok_or_else(|| FbsqError::ConfigInvalid("need --alpha or --scan start:end:step".into()))?;
    let disc = discrepancies(alpha);
    if !(alpha > 2.0 / 3.0 && alpha <= 1.0) {
        println!("alpha = {alpha}: empty region (binding constraint: alpha must lie in (2/3, 1])");
        if let Some(path) = &args.json {
            let report = enumerate_region(&[alpha], 4, 4, 3, args.epsilon, args.c_mu);
            std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
        }
        return Ok(ExitCode::SUCCESS);
    }

    let q_lo = fbsq_core::admissibility::q_lower_theorem11(alpha);
    let q_hi = fbsq_core::admissibility::q_upper_theorem11(alpha);
    let p_lo = 8.0 / (3.0 * alpha - 2.0);
    println!("alpha = {alpha}");
    println!("  q-window (theorem): ({q_lo:.6}, {q_hi:.6})  [upper = min(2, 4a/(3(2a-1)))]");
    println!(
        "  s0-window (theorem): (3 - 2a, 4a/q - 8a + 6) = ({:.6}, 4a/q - {:.6})",
        3.0 - 2.0 * alpha,
        8.0 * alpha - 6.0
    );
    println!("  p > 8/(3a-2) = {p_lo:.6}; soft upper bound p < 1/(C eps)");
    println!(
        "  discrepancy (q upper): theorem {} = {:.6} vs prop-3.1 d=2 {} = {:.6}",
        disc.q_upper_theorem11_formula,
        disc.q_upper_theorem11,
        disc.q_upper_prop31_d2_formula,
        disc.q_upper_prop31_d2
    );
    println!(
        "  discrepancy (s0 lower): theorem {} = {:.6} vs prop-3.1 d=2 {} = {:.6} (defaults use max = {:.6})",
        disc.s0_lower_theorem11_formula,
        disc.s0_lower_theorem11,
        disc.s0_lower_prop31_d2_formula,
        disc.s0_lower_prop31_d2,
        disc.s0_lower_intersection
    );

    if let (Some(q), Some(s0)) = (args.q, args.s0) {
        let p = args.p.unwrap_or(p_lo * 2.0);
        let t11 = check_theorem11(alpha, p, q, s0, args.epsilon, args.c_mu);
        println!("  point check (theorem 1.1), p = {p}: pass = {}", t11.pass);
        for v in &t11.verdicts {
            println!(
                "    {:>5} {} slack {:+.4e}{}",
                if v.satisfied { "ok" } else { "FAIL" },
                v.name,
                v.slack,
                if v.soft { " (soft)" } else { "" }
            );
        }
        let p31 = check_prop31(args.d, alpha, q, s0);
        println!("  point check (prop 3.1, d = {}): pass = {}", args.d, p31.pass);
        for v in &p31.verdicts {
            println!(
                "    {:>5} {} slack {:+.4e}",
                if v.satisfied { "ok" } else { "FAIL" },
                v.name,
                v.slack
            );
        }
        if let Some(p) = args.p {
            match gamma_exponent(alpha, p) {
                Ok(g) => println!(
                    "  gamma(alpha, p) = {:.6}{}",
                    g.value,
                    if g.in_unit_range { "" } else { "  [outside (1,2], reported as written]" }
                ),
                Err(e) => println!("  gamma: {e}"),
            }
        }
        if let Some(path) = &args.json {
            std::fs::write(
                path,
                serde_json::to_string_pretty(&serde_json::json!({
                    "theorem11": t11,
                    "prop31": p31,
                    "discrepancies": disc,
                }))?,
            )?;
        }
    } else if let Some(path) = &args.json {
        let report = enumerate_region(&[alpha], 4, 4, 3, args.epsilon, args.c_mu);
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit_decay(args: FitDecayArgs) -> Result<ExitCode, FbsqError> {
    let series = read_series_column(&args.csv, &args.column)?;
    let l = match args.l {
        Some(l) => l,
        None => {
            let sidecar = args.csv.parent().map(|d| d.join("config.toml"));
            match sidecar.filter(|p| p.exists()) {
                Some(p) => RunConfig::load(&p)?.0.grid.box_length(),
                None => {
                    return Err(FbsqError::ConfigInvalid(
                        "box length unknown: pass --l or keep config.toml next to the CSV".into(),
                    ))
                }
            }
        }
    };
    let gate = ResolvabilityGate {
        beta: args.gate_beta,
        factor: args.gate_factor,
        alpha: args.alpha,
        k0: 2.0 * std::f64::consts::PI / l,
    };
    let t_last = series.last().map(|(t, _)| *t).unwrap_or(0.0);
    let window = match &args.window {
        Some(spec) => {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 2 {
                return Err(FbsqError::ConfigInvalid(format!(
                    "bad window `{spec}`, want t_a:t_b"
                )));
            }
            let pa = parts[0]
                .parse::<f64>()
                .map_err(|_| FbsqError::ConfigInvalid("bad window start".into()))?;
            let pb = parts[1]
                .parse::<f64>()
                .map_err(|_| FbsqError::ConfigInvalid("bad window end".into()))?;
            (pa, pb)
        }
        None => (1.0, gate.t_limit().min(t_last)),
    };
    let fit = fit_decay(&series, window, args.alpha, args.s0, &gate)?;
    let json = serde_json::to_string_pretty(&fit)?;
    match &args.json {
        Some(path) => std::fs::write(path, &json)?,
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_lp(args: VerifyLpArgs) -> Result<ExitCode, FbsqError> {
    let threads = thread_cap();
    let report =
        verify_lp_suite(args.grid, args.samples, args.seed, threads, args.corrupt_partition)?;
    println!(
        "LP suite: N = {}, samples = {}, threads = {}",
        report.n, report.samples, report.threads
    );
    println!("  partition residual        {:.3e}", report.partition_residual);
    println!("  reconstruction residual   {:.3e}", report.max_reconstruction_residual);
    println!("  orthogonality residual    {:.3e}", report.max_orthogonality_residual);
    println!(
        "  Besov B^0_22 / L2 range   [{:.6}, {:.6}]",
        report.besov_l2_ratio_range.0, report.besov_l2_ratio_range.1
    );
    println!("  Bony residual             {:.3e}", report.max_bony_residual);
    println!("  constant-u commutator     {:.3e}", report.max_constant_u_commutator);
    println!("  commutator bound constant {:.3}", report.commutator_bound_constant);
    for s in &report.bernstein.shells {
        println!(
            "  Bernstein j = {}: ball C = {:.4}, annulus [{:.4}, {:.4}]",
            s.j, s.ball_const, s.annulus_lo, s.annulus_hi
        );
    }
    if let Some(path) = &args.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    if report.pass {
        println!("PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &report.hard_failures {
            eprintln!("FAIL: {f}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_stability(args: StabilityArgs) -> Result<ExitCode, FbsqError> {
    let (cfg, warnings) = RunConfig::load(&args.config)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from(&cfg.output.dir).join("stability"));
    let artifacts = stability_run(&cfg, args.delta, &out)?;
    println!(
        "stability: gamma = {:.4}{}, Y(T)/Y(0+) = {:.6e}, K_end = {:.4}, K_fit = {:.4}",
        artifacts.result.gamma,
        if artifacts.result.gamma_in_unit_range { "" } else { " (outside (1,2])" },
        artifacts.result.growth_factor,
        artifacts.result.k_end,
        artifacts.result.k_fit,
    );
    println!("artifacts in {}", out.display());
    Ok(ExitCode::SUCCESS)
}
