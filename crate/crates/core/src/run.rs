//! Experiment orchestration: drive a configured run to `t_end`, collect the
//! per-sample norm bundle, and write deterministic artifacts (RFC-4180 CSV
//! series, JSON summary, binary checkpoint, config copy). Also hosts the
//! Littlewood-Paley verification suite and the stability-experiment runner.
//!
//! Determinism contract: a (config, seed, thread-count) triple fully
//! determines every output byte. Simulation runs are single-threaded; the
//! verification suite parallelizes over samples with per-sample seeds, so its
//! results are identical for every thread count.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::admissibility::{discrepancies, gamma_exponent, DiscrepancyReport, Gamma};
use crate::checkpoint::write_checkpoint;
use crate::config::RunConfig;
use crate::diag::{
    self, collect_record, fit_decay, max_principle_check, temperature_balance_residual,
    temperature_balance_residual_cumulative, velocity_balance_residual, DecayFit,
    DiagnosticsRecord, DiagnosticsSpec, MaxPrincipleReport, ResolvabilityGate,
};
use crate::error::{FbsqError, Result};
use crate::field::VectorField;
use crate::grid::Grid;
use crate::init::make_initial_data;
use crate::lp::{self, build_partition, BernsteinReport, DyadicPartition, Flavor, HomogeneousBand};
use crate::ops;
use crate::solver::{Solver, StepOptions};
use crate::stability::{stability_experiment, StabilityResult};

pub const MAX_PRINCIPLE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Serialize)]
pub struct SchonbekSummary {
    pub beta: f64,
    /// Ratio statistics over the resolvable window [1, t_gate].
    pub window: (f64, f64),
    pub samples: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitoredNorms {
    /// sup_t ||grad u||_{L^2}.
    pub grad_u_linf_t_l2: f64,
    /// ||du/dt||_{L^2_t(L^2)} by trapezoid over samples.
    pub dt_u_l2t_l2: f64,
    /// ||u||_{L~^2_t(B^{3/2}_{2,inf})} (homogeneous blocks).
    pub u_cl2_b32: f64,
    /// ||theta||_{L~^inf_t(B^{alpha/2}_{p,inf})} (inhomogeneous blocks).
    pub theta_clinf_b_alpha2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BalanceSummary {
    pub theta_centered_residual: f64,
    pub theta_cumulative_residual: f64,
    pub velocity_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub status: String,
    pub error: Option<String>,
    pub seed: u64,
    pub threads: usize,
    pub n: usize,
    pub box_length: f64,
    pub shift: f64,
    pub e_cal: f64,
    pub e0: f64,
    pub warnings: Vec<String>,
    pub balance: BalanceSummary,
    pub max_principle: Option<MaxPrincipleReport>,
    pub max_principle_violation: Option<String>,
    pub decay_fit: Option<DecayFit>,
    pub decay_fit_error: Option<String>,
    pub schonbek: Vec<SchonbekSummary>,
    pub monitored: MonitoredNorms,
    pub homogeneous_band: HomogeneousBand,
    pub theta_min_overall: f64,
    pub gamma: Option<Gamma>,
    pub discrepancies: DiscrepancyReport,
}

pub struct RunOutcome {
    pub status: RunStatus,
    pub summary: RunSummary,
    pub records: Vec<DiagnosticsRecord>,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    NonFinite,
}

/// Run a configured simulation and write all artifacts into `output.dir`.
pub fn run_simulation(cfg: &RunConfig, warnings: Vec<String>) -> Result<RunOutcome> {
    let out_dir = PathBuf::from(&cfg.output.dir);
    std::fs::create_dir_all(&out_dir)?;

    let grid = Grid::new(cfg.grid.n, cfg.grid.box_length());
    let part = build_partition(&grid)?;
    let params = cfg.phys_params();
    let opts = StepOptions {
        advection: cfg.time.advection,
        cfl_factor: cfg.time.cfl_factor,
        dt_max: cfg.time.dt_max,
    };
    let state0 = make_initial_data(&cfg.init_spec(), &grid);

    // E0 from the mean-free part (a constant shift is a torus artifact).
    let theta0_mf = state0.theta.zero_mean_part();
    let (e_cal, e0) =
        diag::e0_functional(&theta0_mf, &state0.u, cfg.diagnostics.q, cfg.diagnostics.s0)?;

    let dspec = DiagnosticsSpec {
        p_list: cfg.diagnostics.p_list.clone(),
        beta_list: cfg.diagnostics.beta_list.clone(),
        s0: cfg.diagnostics.s0,
        q: cfg.diagnostics.q,
        p_besov: cfg.diagnostics.p,
        e0,
        advection: cfg.time.advection,
    };

    let mut solver = Solver::new(params, opts, &state0);
    let mut state = state0.clone();
    let mut records =
        vec![collect_record(&state, &params, &dspec, &part, solver.cumulative())?];

    let steps = (cfg.time.t_end / cfg.time.dt).round() as usize;
    let mut status = RunStatus::Ok;
    let mut error: Option<String> = None;
    for step in 1..=steps {
        match solver.step(&state, cfg.time.dt) {
            Ok(next) => state = next,
            Err(e) => {
                status = RunStatus::NonFinite;
                error = Some(e.to_string());
                break;
            }
        }
        if step % cfg.time.sample_every == 0 || step == steps {
            match collect_record(&state, &params, &dspec, &part, solver.cumulative()) {
                Ok(rec) => records.push(rec),
                Err(e) => {
                    status = RunStatus::NonFinite;
                    error = Some(e.to_string());
                    break;
                }
            }
        }
    }

    let summary = summarize(cfg, &part, &records, status, error, e_cal, e0, state0.shift, warnings);

    // Artifacts: partial diagnostics are flushed even on a failed run.
    if cfg.output.write_csv {
        write_series_csv(&out_dir.join("series.csv"), &records, &dspec, &part, params.alpha)?;
    }
    if cfg.output.write_summary {
        let json = serde_json::to_string_pretty(&summary)?;
        std::fs::write(out_dir.join("summary.json"), json)?;
    }
    if cfg.output.write_checkpoint {
        write_checkpoint(&out_dir.join("final.fbsq"), &state, &params, cfg.init.seed)?;
    }
    std::fs::write(out_dir.join("config.toml"), cfg.to_toml())?;
    std::fs::write(
        out_dir.join("meta.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "schema_version": cfg.schema_version,
            "seed": cfg.init.seed,
            "threads": 1,
            "tool": "fbsq",
        }))?,
    )?;

    Ok(RunOutcome { status, summary, records, out_dir })
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    cfg: &RunConfig,
    part: &DyadicPartition,
    records: &[DiagnosticsRecord],
    status: RunStatus,
    error: Option<String>,
    e_cal: f64,
    e0: f64,
    shift: f64,
    warnings: Vec<String>,
) -> RunSummary {
    let params = cfg.phys_params();
    let gate = ResolvabilityGate {
        beta: cfg.diagnostics.gate_beta,
        factor: cfg.diagnostics.gate_factor,
        alpha: params.alpha,
        k0: 2.0 * std::f64::consts::PI / cfg.grid.box_length(),
    };

    let theta_centered = temperature_balance_residual(records, params.kappa).unwrap_or(f64::NAN);
    let theta_cum = temperature_balance_residual_cumulative(records).unwrap_or(f64::NAN);
    let vel = velocity_balance_residual(records).unwrap_or(f64::NAN);

    let (max_principle, max_violation) =
        match max_principle_check(records, &cfg.diagnostics.p_list, MAX_PRINCIPLE_TOL) {
            Ok(rep) => (Some(rep), None),
            Err(e) => (None, Some(e.to_string())),
        };

    // Decay fit on the mean-free L^2 column.
    let series: Vec<(f64, f64)> =
        records.iter().map(|r| (r.t, r.l2_theta_zeromean)).collect();
    let t_gate = gate.t_limit();
    let t_last = records.last().map(|r| r.t).unwrap_or(0.0);
    let t_a = cfg.diagnostics.fit_window.0;
    let t_b = if cfg.diagnostics.fit_window.1 > t_a {
        cfg.diagnostics.fit_window.1.min(t_gate).min(t_last)
    } else {
        t_gate.min(t_last)
    };
    let (decay_fit, decay_err) =
        match fit_decay(&series, (t_a, t_b), params.alpha, cfg.diagnostics.s0, &gate) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };

    // Schonbek ratio statistics per beta over the beta-resolvable window.
    let schonbek = cfg
        .diagnostics
        .beta_list
        .iter()
        .enumerate()
        .map(|(bi, &beta)| {
            let bgate = ResolvabilityGate { beta, ..gate };
            let tb = bgate.t_limit().min(t_last);
            let ratios: Vec<f64> = records
                .iter()
                .filter(|r| r.t >= 1.0 && r.t <= tb)
                .map(|r| r.low_freq[bi].ratio)
                .collect();
            let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let ratio_max = ratios.iter().copied().fold(0.0_f64, f64::max);
            SchonbekSummary {
                beta,
                window: (1.0, tb),
                samples: ratios.len(),
                ratio_min,
                ratio_max,
                ratio_spread: if ratio_min > 0.0 { ratio_max / ratio_min } else { f64::NAN },
            }
        })
        .collect();

    // Monitored (not asserted) norms from the block-norm matrices.
    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let js_hom: Vec<i32> = part.j_range(Flavor::Homogeneous).collect();
    let js_inh: Vec<i32> = part.j_range(Flavor::Inhomogeneous).collect();
    let rows_u: Vec<Vec<f64>> = records.iter().map(|r| r.block_l2_u.clone()).collect();
    let rows_th: Vec<Vec<f64>> = records.iter().map(|r| r.block_lp_theta.clone()).collect();
    let dt_u_sq: f64 = (1..records.len())
        .map(|i| {
            0.5 * (records[i].t - records[i - 1].t)
                * (records[i - 1].ddt_u_l2.powi(2) + records[i].ddt_u_l2.powi(2))
        })
        .sum();
    let monitored = MonitoredNorms {
        grad_u_linf_t_l2: records.iter().map(|r| r.hdot1_u).fold(0.0, f64::max),
        dt_u_l2t_l2: dt_u_sq.sqrt(),
        u_cl2_b32: lp::chemin_lerner_from_blocks(&ts, &rows_u, &js_hom, 1.5, f64::INFINITY, 2.0),
        theta_clinf_b_alpha2: lp::chemin_lerner_from_blocks(
            &ts,
            &rows_th,
            &js_inh,
            params.alpha / 2.0,
            f64::INFINITY,
            f64::INFINITY,
        ),
    };

    RunSummary {
        schema_version: cfg.schema_version,
        status: match status {
            RunStatus::Ok => "ok".into(),
            RunStatus::NonFinite => "nonfinite".into(),
        },
        error,
        seed: cfg.init.seed,
        threads: 1,
        n: cfg.grid.n,
        box_length: cfg.grid.box_length(),
        shift,
        e_cal,
        e0,
        warnings,
        balance: BalanceSummary {
            theta_centered_residual: theta_centered,
            theta_cumulative_residual: theta_cum,
            velocity_residual: vel,
        },
        max_principle,
        max_principle_violation: max_violation,
        decay_fit,
        decay_fit_error: decay_err,
        schonbek,
        monitored,
        homogeneous_band: HomogeneousBand {
            j_min: part.j_min(),
            j_max: part.j_max(),
            skipped_mean: shift,
        },
        theta_min_overall: records.iter().map(|r| r.theta_min).fold(f64::INFINITY, f64::min),
        gamma: gamma_exponent(params.alpha, cfg.diagnostics.p).ok(),
        discrepancies: discrepancies(params.alpha),
    }
}

fn format_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else if p == p.trunc() {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

/// Stable CSV column order (documented in docs/formats.md). Norm columns
/// carry their (s, p, r) indices in the name.
pub fn csv_header(dspec: &DiagnosticsSpec, part: &DyadicPartition, alpha: f64) -> Vec<String> {
    let mut h = vec![
        "t".to_string(),
        "l2_theta".into(),
        "l2_theta_zeromean".into(),
        "l2_u".into(),
        "hdot_alpha2_theta".into(),
        "hdot1_u".into(),
        "hdot_neg_s0_theta".into(),
    ];
    for p in &dspec.p_list {
        h.push(format!("lp_theta_p{}", format_p(*p)));
    }
    h.push(format!("besov_theta_s{}_p{}_rinf", alpha / 2.0, format_p(dspec.p_besov)));
    for beta in &dspec.beta_list {
        h.push(format!("lowfreq_measured_beta{}", format_p(*beta)));
        h.push(format!("lowfreq_bound_beta{}", format_p(*beta)));
        h.push(format!("lowfreq_ratio_beta{}", format_p(*beta)));
    }
    h.extend(
        ["diss_theta_cum", "diss_u_cum", "buoy_cum", "ddt_u_l2", "theta_min"]
            .map(String::from),
    );
    for j in part.j_range(Flavor::Homogeneous) {
        h.push(format!("block_l2_u_j{j}"));
    }
    for j in part.j_range(Flavor::Inhomogeneous) {
        h.push(format!("block_lp_theta_j{j}"));
    }
    h
}

pub fn write_series_csv(
    path: &Path,
    records: &[DiagnosticsRecord],
    dspec: &DiagnosticsSpec,
    part: &DyadicPartition,
    alpha: f64,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)?;
    w.write_record(csv_header(dspec, part, alpha))?;
    for r in records {
        let mut row: Vec<String> = vec![
            r.t.to_string(),
            r.l2_theta.to_string(),
            r.l2_theta_zeromean.to_string(),
            r.l2_u.to_string(),
            r.hdot_alpha2_theta.to_string(),
            r.hdot1_u.to_string(),
            r.hdot_neg_s0_theta.to_string(),
        ];
        for v in &r.lp_theta {
            row.push(v.to_string());
        }
        row.push(r.besov_theta.to_string());
        for pt in &r.low_freq {
            row.push(pt.measured.to_string());
            row.push(pt.bound_shape.to_string());
            row.push(pt.ratio.to_string());
        }
        row.push(r.diss_theta_cum.to_string());
        row.push(r.diss_u_cum.to_string());
        row.push(r.buoy_cum.to_string());
        row.push(r.ddt_u_l2.to_string());
        row.push(r.theta_min.to_string());
        for v in &r.block_l2_u {
            row.push(v.to_string());
        }
        for v in &r.block_lp_theta {
            row.push(v.to_string());
        }
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read `(t, column)` pairs from a series CSV.
pub fn read_series_column(path: &Path, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let t_idx = headers
        .iter()
        .position(|h| h == "t")
        .ok_or_else(|| FbsqError::MissingColumn("t".into()))?;
    let c_idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| FbsqError::MissingColumn(column.into()))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let t: f64 = rec[t_idx]
            .parse()
            .map_err(|_| FbsqError::ConfigInvalid(format!("bad float in column t: {}", &rec[t_idx])))?;
        let v: f64 = rec[c_idx]
            .parse()
            .map_err(|_| FbsqError::ConfigInvalid(format!("bad float in {column}")))?;
        out.push((t, v));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Littlewood-Paley verification suite.

#[derive(Debug, Clone, Serialize)]
pub struct LpSuiteReport {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub threads: usize,
    pub partition_residual: f64,
    pub max_reconstruction_residual: f64,
    pub max_orthogonality_residual: f64,
    pub besov_l2_ratio_range: (f64, f64),
    pub max_bony_residual: f64,
    pub max_constant_u_commutator: f64,
    pub commutator_bound_constant: f64,
    pub bernstein: BernsteinReport,
    pub hard_failures: Vec<String>,
    pub pass: bool,
}

struct LpSample {
    recon_inh: f64,
    recon_hom: f64,
    ortho: f64,
    besov_ratio: f64,
    bony: f64,
    commutator_const: f64,
}

/// Thread cap: FBSQ_THREADS, else available parallelism, else 1.
pub fn thread_cap() -> usize {
    std::env::var("FBSQ_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
        })
}

fn parallel_map<T: Send>(count: usize, threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    if count == 0 {
        return Vec::new();
    }
    let threads = threads.clamp(1, count);
    let chunk = count.div_ceil(threads);
    let mut results: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|s| {
        for (ci, slice) in results.chunks_mut(chunk).enumerate() {
            let f = &f;
            s.spawn(move || {
                for (i, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(ci * chunk + i));
                }
            });
        }
    });
    results.into_iter().map(|o| o.expect("all samples computed")).collect()
}

/// Run the reconstruction / orthogonality / Besov / Bony / commutator /
/// Bernstein property suites over `samples` seeded random fields.
pub fn verify_lp_suite(
    n: usize,
    samples: usize,
    seed: u64,
    threads: usize,
    corrupt_partition: bool,
) -> Result<LpSuiteReport> {
    use rand::SeedableRng;
    let grid = Grid::new(n, 32.0 * std::f64::consts::PI);
    let mut part = build_partition(&grid)?;
    if corrupt_partition {
        part.corrupt_for_tests();
    }

    // Partition-of-unity residual on all retained modes.
    let mut partition_residual = 0.0_f64;
    for idx in 0..grid.len() {
        if !grid.below_cutoff(idx) {
            continue;
        }
        let r = grid.mode_abs(idx);
        let mut sum = part.chi(r);
        for j in 0..=part.j_max() {
            sum += part.phi(r * 0.5_f64.powi(j));
        }
        partition_residual = partition_residual.max((sum - 1.0).abs());
    }

    let alpha = 0.8;
    let p_comm = 16.0;
    let sample_results: Vec<Result<LpSample>> = parallel_map(samples, threads, |i| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let cutoff = grid.dealias_cutoff() as f64;
        let f = lp::random_supported(&grid, &mut rng, |r| r <= cutoff);

        // Reconstruction, both flavors.
        let rec = lp::decompose(&part, &f, Flavor::Inhomogeneous)?.reconstruct();
        let recon_inh = rec.sub(&f).l2_norm() / f.l2_norm();
        let f0 = f.zero_mean_part();
        let rec = lp::decompose(&part, &f0, Flavor::Homogeneous)?.reconstruct();
        let recon_hom = rec.sub(&f0).l2_norm() / f0.l2_norm();

        // Almost-orthogonality on a pair of separated shells.
        let span = (part.j_max() - 1).max(1);
        let j0 = -1 + (i as i32).rem_euclid(span);
        let bj = lp::block(&part, &f, j0, Flavor::Inhomogeneous)?;
        let bb = lp::block(&part, &bj, j0 + 2, Flavor::Inhomogeneous)?;
        let ortho = bb.l2_norm() / f.l2_norm();

        // Besov B^0_{2,2} against L^2.
        let besov_ratio =
            lp::besov_norm(&part, &f, 0.0, 2.0, 2.0, Flavor::Inhomogeneous)? / f.l2_norm();

        // Bony reconstruction.
        let g = lp::random_supported(&grid, &mut rng, |r| r <= cutoff).zero_mean_part();
        let (t_uv, t_vu, rem) = lp::bony_decompose(&part, &f0, &g, Flavor::Homogeneous)?;
        let product = ops::product(&f0, &g);
        let bony =
            t_uv.add(&t_vu).add(&rem).sub(&product).l2_norm() / product.l2_norm().max(1e-300);

        // Commutator empirical constant on a divergence-free low-pass flow.
        let psi = lp::random_supported(&grid, &mut rng, |r| r <= 12.0);
        let (px, py) = ops::gradient(&psi);
        let u = VectorField { x: py.scaled(-1.0), y: px };
        let h = lp::random_supported(&grid, &mut rng, |r| r <= 20.0);
        let commutator_const = lp::commutator_bound_constant(&part, &u, &h, alpha, p_comm)?;

        Ok(LpSample { recon_inh, recon_hom, ortho, besov_ratio, bony, commutator_const })
    });

    let mut max_recon = 0.0_f64;
    let mut max_ortho = 0.0_f64;
    let mut besov_lo = f64::INFINITY;
    let mut besov_hi = 0.0_f64;
    let mut max_bony = 0.0_f64;
    let mut max_comm_const = 0.0_f64;
    for s in sample_results {
        let s = s?;
        max_recon = max_recon.max(s.recon_inh).max(s.recon_hom);
        max_ortho = max_ortho.max(s.ortho);
        besov_lo = besov_lo.min(s.besov_ratio);
        besov_hi = besov_hi.max(s.besov_ratio);
        max_bony = max_bony.max(s.bony);
        max_comm_const = max_comm_const.max(s.commutator_const);
    }

    // Constant-velocity commutator (exactness check).
    let mut max_const_u = 0.0_f64;
    {
        use num_complex::Complex64;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut u = VectorField::zeros(&grid);
        u.x.set_zero_mode(Complex64::new(0.9, 0.0));
        u.y.set_zero_mode(Complex64::new(-0.4, 0.0));
        let f = lp::random_supported(&grid, &mut rng, |r| r <= grid.dealias_cutoff() as f64);
        for j in part.j_range(Flavor::Inhomogeneous) {
            let r = lp::commutator(&part, &u, &f, j, Flavor::Inhomogeneous)?;
            max_const_u = max_const_u.max(r.l2_norm() / f.l2_norm());
        }
    }

    let bernstein = lp::bernstein_harness(&part, &grid, samples.clamp(10, 100), seed ^ 0xbe57);

    let mut hard = Vec::new();
    if samples > 0 {
        if partition_residual > 1e-12 {
            hard.push(format!("partition residual {partition_residual:.3e} > 1e-12"));
        }
        if max_recon > 1e-10 {
            hard.push(format!("reconstruction residual {max_recon:.3e} > 1e-10"));
        }
        if max_ortho > 1e-12 {
            hard.push(format!("almost-orthogonality residual {max_ortho:.3e} > 1e-12"));
        }
        if besov_lo < 0.5_f64.sqrt() * (1.0 - 1e-12) || besov_hi > 1.0 + 1e-12 {
            hard.push(format!("Besov/L2 ratio [{besov_lo:.6}, {besov_hi:.6}] outside [2^-1/2, 1]"));
        }
        if max_bony > 1e-8 {
            hard.push(format!("Bony reconstruction residual {max_bony:.3e} > 1e-8"));
        }
        if max_const_u > 1e-12 {
            hard.push(format!("constant-u commutator {max_const_u:.3e} > 1e-12"));
        }
        if !bernstein.annulus_lower_bound_ok {
            hard.push("Bernstein annulus lower constant below 3/4".into());
        }
        if !bernstein.spreads_within_factor_4 {
            hard.push("Bernstein constants drift with j beyond factor 4".into());
        }
    }

    Ok(LpSuiteReport {
        n,
        samples,
        seed,
        threads,
        partition_residual,
        max_reconstruction_residual: max_recon,
        max_orthogonality_residual: max_ortho,
        besov_l2_ratio_range: (besov_lo, besov_hi),
        max_bony_residual: max_bony,
        max_constant_u_commutator: max_const_u,
        commutator_bound_constant: max_comm_const,
        bernstein,
        hard_failures: hard.clone(),
        pass: hard.is_empty(),
    })
}

// ---------------------------------------------------------------------------
// Stability experiment runner.

#[derive(Debug, Serialize)]
pub struct StabilityArtifacts {
    pub result: StabilityResult,
    pub delta: f64,
}

/// Drive the uniqueness/stability experiment from a config: the second
/// trajectory starts from `theta_0 + delta * (unit-normalized bump)`.
pub fn stability_run(cfg: &RunConfig, delta: f64, out_dir: &Path) -> Result<StabilityArtifacts> {
    std::fs::create_dir_all(out_dir)?;
    let grid = Grid::new(cfg.grid.n, cfg.grid.box_length());
    let part = build_partition(&grid)?;
    let params = cfg.phys_params();
    let opts = StepOptions {
        advection: cfg.time.advection,
        cfl_factor: cfg.time.cfl_factor,
        dt_max: cfg.time.dt_max,
    };
    let base = make_initial_data(&cfg.init_spec(), &grid);
    let mut perturbed = base.clone();
    if delta != 0.0 {
        let bump_spec = crate::init::InitSpec {
            seed: cfg.init.seed ^ 0x7e57_ab1e,
            amp_theta: 1.0,
            amp_u: 0.0,
            nonnegative_shift: false,
            ..cfg.init_spec()
        };
        let bump = make_initial_data(&bump_spec, &grid);
        let norm = bump.theta.l2_norm();
        perturbed.theta.axpy(delta / norm, &bump.theta);
    }

    let result = stability_experiment(
        &base,
        &perturbed,
        &params,
        &opts,
        &part,
        cfg.diagnostics.p,
        cfg.time.dt,
        cfg.time.t_end,
        cfg.time.sample_every,
    )?;

    // y_series.csv + stability.json.
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(out_dir.join("y_series.csv"))?;
    w.write_record(["t", "du_l2_sq", "dtheta_l2_sq", "dtheta_besov_sq", "y"])?;
    for pt in &result.series {
        w.write_record([
            pt.t.to_string(),
            pt.du_l2_sq.to_string(),
            pt.dtheta_l2_sq.to_string(),
            pt.dtheta_besov_sq.to_string(),
            pt.y.to_string(),
        ])?;
    }
    w.flush()?;
    let artifacts = StabilityArtifacts { result, delta };
    std::fs::write(out_dir.join("stability.json"), serde_json::to_string_pretty(&artifacts)?)?;
    Ok(artifacts)
}

/// Write a small human-readable admissibility report (used by the CLI).
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
