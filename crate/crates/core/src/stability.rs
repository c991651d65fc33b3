//! Uniqueness/stability experiment: co-evolve two solutions and track the
//! difference functional
//!
//! ```text
//! Y(t) = ||du||^2_{L^inf_t(L^2)} + ||dth||^2_{L^inf_t(L^2)} + ||dth||^2_{L^inf_t(B^0_{gamma,inf})}
//! ```
//!
//! with `gamma = 4p/(4 + 4p - 3 alpha p)` from the difference-system estimate.
//! Identical inputs give bitwise-identical trajectories (single-threaded,
//! same code path), hence Y identically zero.

use serde::Serialize;

use crate::admissibility::gamma_exponent;
use crate::error::Result;
use crate::lp::{self, DyadicPartition, Flavor};
use crate::physics::PhysParams;
use crate::solver::{FlowState, Solver, StepOptions};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityPoint {
    pub t: f64,
    /// Running maxima of the three squared components.
    pub du_l2_sq: f64,
    pub dtheta_l2_sq: f64,
    pub dtheta_besov_sq: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityResult {
    pub gamma: f64,
    pub gamma_in_unit_range: bool,
    pub series: Vec<StabilityPoint>,
    /// Y(T) / Y(0+); zero when both stay identical.
    pub growth_factor: f64,
    /// Exponential rate from ln(Y(T)/Y(0+))/T (0 when Y = 0).
    pub k_end: f64,
    /// Least-squares slope of ln Y(t) over the samples with Y > 0.
    pub k_fit: f64,
}

/// Co-evolve two states under the same parameters and record Y(t).
///
/// `sample_every` counts steps between records; the Besov index gamma comes
/// from (alpha, p) via the difference-system lemma (values above 2 are legal
/// here and flagged, not rejected).
#[allow(clippy::too_many_arguments)]
pub fn stability_experiment(
    state1: &FlowState,
    state2: &FlowState,
    params: &PhysParams,
    opts: &StepOptions,
    part: &DyadicPartition,
    p: f64,
    dt: f64,
    t_end: f64,
    sample_every: usize,
) -> Result<StabilityResult> {
    let gamma = gamma_exponent(params.alpha, p)?;
    let mut solver1 = Solver::new(*params, *opts, state1);
    let mut solver2 = Solver::new(*params, *opts, state2);
    let mut s1 = state1.clone();
    let mut s2 = state2.clone();

    let mut max_du = 0.0_f64;
    let mut max_dth = 0.0_f64;
    let mut max_db = 0.0_f64;
    let mut series = Vec::new();

    let steps = (t_end / dt).round() as usize;
    let record = |s1: &FlowState, s2: &FlowState, max_du: &mut f64, max_dth: &mut f64, max_db: &mut f64|
     -> Result<StabilityPoint> {
        let du = s1.u.sub(&s2.u).l2_norm();
        let dth_field = s1.theta.sub(&s2.theta);
        let dth = dth_field.l2_norm();
        let db = lp::besov_norm(
            part,
            &dth_field.zero_mean_part(),
            0.0,
            gamma.value,
            f64::INFINITY,
            Flavor::Homogeneous,
        )?;
        *max_du = max_du.max(du * du);
        *max_dth = max_dth.max(dth * dth);
        *max_db = max_db.max(db * db);
        Ok(StabilityPoint {
            t: s1.t,
            du_l2_sq: *max_du,
            dtheta_l2_sq: *max_dth,
            dtheta_besov_sq: *max_db,
            y: *max_du + *max_dth + *max_db,
        })
    };

    series.push(record(&s1, &s2, &mut max_du, &mut max_dth, &mut max_db)?);
    for step in 1..=steps {
        s1 = solver1.step(&s1, dt)?;
        s2 = solver2.step(&s2, dt)?;
        if step % sample_every == 0 || step == steps {
            series.push(record(&s1, &s2, &mut max_du, &mut max_dth, &mut max_db)?);
        }
    }

    // Y(0+): first positive sample (initial perturbations give it at index 0).
    let y0 = series.iter().map(|p| p.y).find(|&y| y > 0.0).unwrap_or(0.0);
    let y_end = series.last().map(|p| p.y).unwrap_or(0.0);
    let growth_factor = if y0 > 0.0 { y_end / y0 } else { 0.0 };
    let k_end = if y0 > 0.0 && t_end > 0.0 { (y_end / y0).ln() / t_end } else { 0.0 };

    // LSQ slope of ln Y over positive samples.
    let pts: Vec<(f64, f64)> =
        series.iter().filter(|p| p.y > 0.0).map(|p| (p.t, p.y.ln())).collect();
    let k_fit = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let xb = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
        let yb = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|(x, _)| (x - xb) * (x - xb)).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| (x - xb) * (y - yb)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };

    Ok(StabilityResult {
        gamma: gamma.value,
        gamma_in_unit_range: gamma.in_unit_range,
        series,
        growth_factor,
        k_end,
        k_fit,
    })
}
