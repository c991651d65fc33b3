//! Run diagnostics: Sobolev norms, the initial-data size functional, energy
//! balance residuals, Schonbek low-frequency splitting, decay-exponent
//! fitting, and the L^p maximum-principle monitor.
//!
//! Decay-related quantities (L^2 decay column, negative Sobolev norms,
//! Schonbek sums) act on the mean-free part of theta: a constant is not in
//! L^2 of the plane, and the torus zero mode would otherwise mask the decay
//! the splitting argument extracts. Maximum-principle quantities use the full
//! field.


use serde::Serialize;

use crate::error::{FbsqError, Result};
use crate::field::SpectralField;
use crate::lp::{self, DyadicPartition, Flavor};
use crate::physics::PhysParams;
use crate::solver::{CumulativeIntegrals, FlowState};

/// Japanese bracket `<t> = sqrt(1 + t^2)`.
pub fn japanese_bracket(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

/// Homogeneous Sobolev norm `(sum_{k != 0} |k|^{2s} |f_k|^2 L^2)^{1/2}`
/// (physical wavenumbers). `s = 0` recovers the L^2 norm of the mean-free
/// part; `s < 0` requires mean-zero input.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> Result<f64> {
    if s < 0.0 {
        let scale: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if f.zero_mode().norm() > 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(FbsqError::NegativeIndexOnNonzeroMean { s });
        }
    }
    let grid = f.grid();
    let mut acc = 0.0;
    for idx in 1..grid.len() {
        let k = grid.k_abs(idx);
        acc += k.powf(2.0 * s) * f.coeffs()[idx].norm_sqr();
    }
    Ok(grid.box_length() * acc.sqrt())
}

/// Exact fractional-heat evolution `theta_k e^{-kappa t |k|^alpha}`, the
/// Duhamel semigroup factor (also the stepper's linear part).
pub fn heat_semigroup(theta0: &SpectralField, params: &PhysParams, t: f64) -> SpectralField {
    let grid = theta0.grid().clone();
    let mut out = theta0.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = grid.k_abs(idx);
        if k > 0.0 {
            *c *= (-params.kappa * t * k.powf(params.alpha)).exp();
        }
    }
    out
}

/// The initial-data size functional of the decay estimate:
/// `E_cal = ||th0||_{H^{-s0}} + ||th0||_{L^2} + (||u0||_{L^2} + ||th0||_{L^q})(1 + ||th0||_{L^q})`,
/// `E0 = E_cal (1 + E_cal)`.
pub fn e0_functional(
    theta0: &SpectralField,
    u0: &crate::field::VectorField,
    q: f64,
    s0: f64,
) -> Result<(f64, f64)> {
    let hneg = sobolev_norm(theta0, -s0)?;
    let l2 = theta0.l2_norm();
    let lq = theta0.to_phys().lp_norm(q);
    let ul2 = u0.l2_norm();
    let e_cal = hneg + l2 + (ul2 + lq) * (1.0 + lq);
    Ok((e_cal, e_cal * (1.0 + e_cal)))
}

/// Schonbek splitting measurement at one time: energy inside the shrinking
/// ball `S(t) = {0 < |k| <= g(t)}`, `g(t) = (beta <t>)^{-1/alpha}`, against
/// the bound shape `E0^2 <t>^{-2 s0/alpha}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SchonbekPoint {
    pub t: f64,
    pub beta: f64,
    pub g: f64,
    /// Modes strictly inside S(t) (zero mode excluded).
    pub modes_inside: usize,
    pub measured: f64,
    pub bound_shape: f64,
    pub ratio: f64,
    /// False when g(t) < 2*pi/L: no modes inside the shell (flagged, not fatal).
    pub resolvable: bool,
}

pub fn schonbek_low_energy(
    theta: &SpectralField,
    t: f64,
    beta: f64,
    alpha: f64,
    s0: f64,
    e0: f64,
) -> SchonbekPoint {
    let grid = theta.grid();
    let g = (beta * japanese_bracket(t)).powf(-1.0 / alpha);
    let l2sq = grid.box_length() * grid.box_length();
    let mut measured = 0.0;
    let mut modes = 0usize;
    for idx in 1..grid.len() {
        if grid.k_abs(idx) <= g {
            measured += theta.coeffs()[idx].norm_sqr();
            modes += 1;
        }
    }
    measured *= l2sq;
    let bound_shape = e0 * e0 * japanese_bracket(t).powf(-2.0 * s0 / alpha);
    let ratio = if bound_shape > 0.0 { measured / bound_shape } else { 0.0 };
    SchonbekPoint {
        t,
        beta,
        g,
        modes_inside: modes,
        measured,
        bound_shape,
        ratio,
        resolvable: g >= grid.k0(),
    }
}

/// The resolvability gate for decay fits: the paper's splitting radius
/// `g(t) = (beta <t>)^{-1/alpha}` must stay above `factor` grid modes.
/// `beta` and `factor` are configuration (defaults 2.0 and 4.0).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResolvabilityGate {
    pub beta: f64,
    pub factor: f64,
    pub alpha: f64,
    /// Fundamental wavenumber 2*pi/L of the grid the series came from.
    pub k0: f64,
}

impl ResolvabilityGate {
    pub fn g(&self, t: f64) -> f64 {
        (self.beta * japanese_bracket(t)).powf(-1.0 / self.alpha)
    }

    pub fn threshold(&self) -> f64 {
        self.factor * self.k0
    }

    pub fn resolvable_at(&self, t: f64) -> bool {
        // Round-off slack so t_limit() itself passes.
        self.g(t) >= self.threshold() * (1.0 - 1e-9)
    }

    /// Largest t with g(t) >= factor * k0.
    pub fn t_limit(&self) -> f64 {
        let bracket = self.threshold().powf(-self.alpha) / self.beta;
        if bracket <= 1.0 {
            0.0
        } else {
            (bracket * bracket - 1.0).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub t_a: f64,
    pub t_b: f64,
    pub samples: usize,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    /// The A in the fitted law `A <t>^slope` (the decay constant is then
    /// A / E0, reported rather than assumed, and only its t-independence is
    /// ever checked).
    pub fitted_amplitude: f64,
    pub theoretical_slope: f64,
    pub resolvable: bool,
}

/// Least-squares slope of `log v` against `log <t>` over a window.
///
/// The window must start at t >= 1 (the `<t> ~ t` regime), contain at least
/// 10 samples, and end while the splitting shell is still resolvable.
pub fn fit_decay(
    series: &[(f64, f64)],
    window: (f64, f64),
    alpha: f64,
    s0: f64,
    gate: &ResolvabilityGate,
) -> Result<DecayFit> {
    let (t_a, t_b) = window;
    if t_a < 1.0 {
        return Err(FbsqError::ConfigInvalid(format!(
            "decay-fit window must start at t >= 1, got {t_a}"
        )));
    }
    if !gate.resolvable_at(t_b) {
        return Err(FbsqError::WindowUnresolvable {
            t_a,
            t_b,
            g: gate.g(t_b),
            threshold: gate.threshold(),
        });
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, v)| *t >= t_a && *t <= t_b && *v > 0.0)
        .map(|(t, v)| (japanese_bracket(*t).ln(), v.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(FbsqError::TooFewSamples { got: pts.len(), need: 10 });
    }
    let n = pts.len() as f64;
    let xbar = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let ybar = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|(x, _)| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = pts
        .iter()
        .map(|(x, y)| {
            let pred = ybar + slope * (x - xbar);
            (y - pred) * (y - pred)
        })
        .sum();
    let stderr = if pts.len() > 2 { (ss_res / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(DecayFit {
        t_a,
        t_b,
        samples: pts.len(),
        fitted_slope: slope,
        slope_stderr: stderr,
        fitted_amplitude: (ybar - slope * xbar).exp(),
        theoretical_slope: -s0 / alpha,
        resolvable: true,
    })
}

/// One row of the per-sample norm bundle.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// L^2 of the full temperature field (includes any shift).
    pub l2_theta: f64,
    /// L^2 of the mean-free part (the decay quantity).
    pub l2_theta_zeromean: f64,
    pub l2_u: f64,
    /// ||theta||_{H^{alpha/2}} (mean-free by construction).
    pub hdot_alpha2_theta: f64,
    /// ||grad u||_{L^2}.
    pub hdot1_u: f64,
    /// ||theta||_{H^{-s0}} of the mean-free part.
    pub hdot_neg_s0_theta: f64,
    /// L^p norms of the full field, in p_list order.
    pub lp_theta: Vec<f64>,
    /// Inhomogeneous B^{alpha/2}_{p,inf} norm of theta.
    pub besov_theta: f64,
    /// Schonbek points, one per beta in beta_list.
    pub low_freq: Vec<SchonbekPoint>,
    /// Cumulative flux integrals from the stepper (dt-resolution trapezoid).
    pub diss_theta_cum: f64,
    pub diss_u_cum: f64,
    pub buoy_cum: f64,
    /// ||du/dt||_{L^2} at this sample.
    pub ddt_u_l2: f64,
    /// Pointwise minimum of theta (sign monitor).
    pub theta_min: f64,
    /// Homogeneous ||Delta_j u||_{L^2} per shell (for the L~^2 B^{3/2}_{2,inf} monitor).
    pub block_l2_u: Vec<f64>,
    /// Inhomogeneous ||Delta_j theta||_{L^p} per shell (for L~^inf B^{alpha/2}_{p,inf}).
    pub block_lp_theta: Vec<f64>,
}

/// What to sample each record.
#[derive(Debug, Clone)]
pub struct DiagnosticsSpec {
    pub p_list: Vec<f64>,
    pub beta_list: Vec<f64>,
    pub s0: f64,
    pub q: f64,
    /// Besov integrability index (the p of B^{alpha/2}_{p,inf}).
    pub p_besov: f64,
    pub e0: f64,
    /// Mirrors the stepper's advection switch (for the du/dt monitor).
    pub advection: bool,
}

pub fn collect_record(
    state: &FlowState,
    params: &PhysParams,
    spec: &DiagnosticsSpec,
    part: &DyadicPartition,
    cum: CumulativeIntegrals,
) -> Result<DiagnosticsRecord> {
    let theta_mf = state.theta.zero_mean_part();
    let phys = state.theta.to_phys();
    let lp_theta = spec.p_list.iter().map(|&p| phys.lp_norm(p)).collect();
    let low_freq = spec
        .beta_list
        .iter()
        .map(|&beta| schonbek_low_energy(&theta_mf, state.t, beta, params.alpha, spec.s0, spec.e0))
        .collect();
    let du = crate::solver::rhs_u_total(state, params, spec.advection);
    let block_l2_u: Vec<f64> = part
        .j_range(Flavor::Homogeneous)
        .map(|j| {
            let bx = lp::block(part, &state.u.x, j, Flavor::Homogeneous)?;
            let by = lp::block(part, &state.u.y, j, Flavor::Homogeneous)?;
            Ok((bx.l2_norm().powi(2) + by.l2_norm().powi(2)).sqrt())
        })
        .collect::<Result<_>>()?;
    let block_lp_theta = lp::block_lp_norms(part, &state.theta, spec.p_besov, Flavor::Inhomogeneous)?
        .into_iter()
        .map(|(_, v)| v)
        .collect();

    let rec = DiagnosticsRecord {
        t: state.t,
        l2_theta: state.theta.l2_norm(),
        l2_theta_zeromean: theta_mf.l2_norm(),
        l2_u: state.u.l2_norm(),
        hdot_alpha2_theta: sobolev_norm(&state.theta, params.alpha / 2.0)?,
        hdot1_u: {
            let gx2: f64 = {
                let grid = state.theta.grid();
                let mut acc = 0.0;
                for idx in 1..grid.len() {
                    let k = grid.k_abs(idx);
                    acc += k * k
                        * (state.u.x.coeffs()[idx].norm_sqr()
                            + state.u.y.coeffs()[idx].norm_sqr());
                }
                acc * grid.box_length() * grid.box_length()
            };
            gx2.sqrt()
        },
        hdot_neg_s0_theta: sobolev_norm(&theta_mf, -spec.s0)?,
        lp_theta,
        besov_theta: lp::besov_norm(
            part,
            &state.theta,
            params.alpha / 2.0,
            spec.p_besov,
            f64::INFINITY,
            Flavor::Inhomogeneous,
        )?,
        low_freq,
        diss_theta_cum: cum.diss_theta,
        diss_u_cum: cum.diss_u,
        buoy_cum: cum.buoy,
        ddt_u_l2: du.l2_norm(),
        theta_min: phys.min(),
        block_l2_u,
        block_lp_theta,
    };
    for v in [rec.l2_theta, rec.l2_u, rec.hdot_alpha2_theta, rec.hdot_neg_s0_theta] {
        if !v.is_finite() {
            return Err(FbsqError::NonFiniteState { t: state.t, component: "diagnostics".into() });
        }
    }
    Ok(rec)
}

/// Centered-difference residual of the temperature energy identity
/// `1/2 d/dt ||theta||^2 + kappa ||theta||^2_{H^{alpha/2}} = 0`, normalized by
/// `||theta_0||^2` (mean-free). Needs at least 3 samples.
pub fn temperature_balance_residual(records: &[DiagnosticsRecord], kappa: f64) -> Result<f64> {
    if records.len() < 3 {
        return Err(FbsqError::TooFewSamples { got: records.len(), need: 3 });
    }
    let norm0 = records[0].l2_theta_zeromean.powi(2);
    if norm0 == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0_f64;
    for i in 1..records.len() - 1 {
        let dt = records[i + 1].t - records[i - 1].t;
        let lhs = 0.5
            * (records[i + 1].l2_theta_zeromean.powi(2)
                - records[i - 1].l2_theta_zeromean.powi(2))
            / dt;
        let resid = (lhs + kappa * records[i].hdot_alpha2_theta.powi(2)).abs();
        worst = worst.max(resid);
    }
    Ok(worst / norm0)
}

/// Cumulative form of the temperature balance, using the stepper's
/// dt-resolution dissipation integral:
/// `max_n |1/2 ||theta(t_n)||^2 - 1/2 ||theta_0||^2 + int diss| / (1/2 ||theta_0||^2)`.
pub fn temperature_balance_residual_cumulative(records: &[DiagnosticsRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(FbsqError::EmptySeries);
    }
    let half0 = 0.5 * records[0].l2_theta_zeromean.powi(2);
    if half0 == 0.0 {
        return Ok(0.0);
    }
    let base_cum = records[0].diss_theta_cum;
    let mut worst = 0.0_f64;
    for r in records.iter().skip(1) {
        let resid =
            (0.5 * r.l2_theta_zeromean.powi(2) - half0 + (r.diss_theta_cum - base_cum)).abs();
        worst = worst.max(resid);
    }
    Ok(worst / half0)
}

/// Velocity balance residual (cumulative, flux-normalized):
/// `R(t) = 1/2||u||^2 - 1/2||u_0||^2 + int 2 mu d:d - int theta u_2`,
/// reported as `max_n |R(t_n)| / (int diss + |int buoy| + 1/2 ||u_0||^2)`,
/// a per-unit-time relative measure of the identity drift.
pub fn velocity_balance_residual(records: &[DiagnosticsRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(FbsqError::EmptySeries);
    }
    let half0 = 0.5 * records[0].l2_u.powi(2);
    let mut worst = 0.0_f64;
    for r in records.iter().skip(1) {
        let resid = 0.5 * r.l2_u.powi(2) - half0
            + (r.diss_u_cum - records[0].diss_u_cum)
            - (r.buoy_cum - records[0].buoy_cum);
        let scale = (r.diss_u_cum - records[0].diss_u_cum).abs()
            + (r.buoy_cum - records[0].buoy_cum).abs()
            + half0;
        if scale > 0.0 {
            worst = worst.max(resid.abs() / scale);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxPrincipleReport {
    /// Per p: worst observed `||theta(t)||_p / ||theta_0||_p - 1`.
    pub worst_margin: Vec<(f64, f64)>,
    pub tolerance: f64,
}

/// Assert `||theta(t)||_{L^p} <= ||theta_0||_{L^p} (1 + tol)` at every sample.
pub fn max_principle_check(
    records: &[DiagnosticsRecord],
    p_list: &[f64],
    tol: f64,
) -> Result<MaxPrincipleReport> {
    if records.is_empty() {
        return Err(FbsqError::EmptySeries);
    }
    let mut worst = vec![f64::NEG_INFINITY; p_list.len()];
    for r in records {
        for (i, _) in p_list.iter().enumerate() {
            let base = records[0].lp_theta[i];
            if base == 0.0 {
                worst[i] = worst[i].max(0.0);
                continue;
            }
            let margin = r.lp_theta[i] / base - 1.0;
            worst[i] = worst[i].max(margin);
            if margin > tol {
                return Err(FbsqError::MaxPrincipleViolation {
                    t: r.t,
                    p: p_list[i],
                    value: r.lp_theta[i],
                    bound: base * (1.0 + tol),
                });
            }
        }
    }
    Ok(MaxPrincipleReport {
        worst_margin: p_list.iter().copied().zip(worst).collect(),
        tolerance: tol,
    })
}

/// Build an analytic pure-heat record series from exact semigroup evolution
/// (test oracle; only the balance-related fields are populated).
pub fn pure_heat_series(
    theta0: &SpectralField,
    params: &PhysParams,
    ts: &[f64],
) -> Vec<DiagnosticsRecord> {
    let mut cum = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    ts.iter()
        .map(|&t| {
            let th = heat_semigroup(theta0, params, t);
            let mf = th.zero_mean_part();
            let hdot = sobolev_norm(&th, params.alpha / 2.0).unwrap();
            let rate = params.kappa * hdot * hdot;
            if let Some((tp, rp)) = prev {
                cum += 0.5 * (t - tp) * (rp + rate);
            }
            prev = Some((t, rate));
            DiagnosticsRecord {
                t,
                l2_theta: th.l2_norm(),
                l2_theta_zeromean: mf.l2_norm(),
                l2_u: 0.0,
                hdot_alpha2_theta: hdot,
                hdot1_u: 0.0,
                hdot_neg_s0_theta: 0.0,
                lp_theta: vec![],
                besov_theta: 0.0,
                low_freq: vec![],
                diss_theta_cum: cum,
                diss_u_cum: 0.0,
                buoy_cum: 0.0,
                ddt_u_l2: 0.0,
                theta_min: 0.0,
                block_l2_u: vec![],
                block_lp_theta: vec![],
            }
        })
        .collect()
}
