//! Time integration of the Boussinesq system
//!
//! ```text
//! d theta/dt + u . grad theta + kappa |D|^alpha theta = 0
//! d u/dt + u . grad u - div(2 mu(theta) d(u)) + grad Pi = theta e2,  div u = 0
//! ```
//!
//! The viscous term is split as `Lap u + div(2 (mu - 1) d(u))`: the dominant
//! unit-viscosity part and the fractional temperature dissipation integrate
//! exactly through their semigroups, everything else (advection, variable
//! viscosity, buoyancy) is explicit. One step is a Lawson (integrating-factor)
//! Heun update, second order, which reduces to the exact semigroup when the
//! explicit part vanishes. Pressure never appears: the Leray projection
//! replaces grad Pi.
//!
//! The stepper also maintains trapezoidal (per-step) accumulators of the
//! energy-balance fluxes so the L^2 identities can be checked at dt
//! resolution.

use num_complex::Complex64;

use crate::error::{FbsqError, Result};
use crate::field::{PhysField, SpectralField, VectorField};
use crate::ops;
use crate::physics::PhysParams;

/// Instantaneous flow state; `u` is divergence-free.
#[derive(Clone)]
pub struct FlowState {
    pub theta: SpectralField,
    pub u: VectorField,
    pub t: f64,
    /// Constant added to theta_0 by the nonnegativity shift (zero if unused).
    pub shift: f64,
}

impl FlowState {
    pub fn check_finite(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(FbsqError::NonFiniteState { t: self.t, component: "theta".into() });
        }
        if !self.u.x.is_finite() {
            return Err(FbsqError::NonFiniteState { t: self.t, component: "u1".into() });
        }
        if !self.u.y.is_finite() {
            return Err(FbsqError::NonFiniteState { t: self.t, component: "u2".into() });
        }
        Ok(())
    }
}

/// Stepper switches; advection can be disabled for linear test problems.
#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub advection: bool,
    pub cfl_factor: f64,
    pub dt_max: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { advection: true, cfl_factor: 0.4, dt_max: 0.1 }
    }
}

/// Instantaneous balance fluxes entering the L^2 energy identities.
#[derive(Debug, Clone, Copy, Default)]
pub struct BalanceRates {
    /// kappa ||theta||^2_{H^{alpha/2}} (temperature dissipation).
    pub diss_theta: f64,
    /// 2 int mu(theta) d(u):d(u) dx (mu-weighted viscous dissipation).
    pub diss_u: f64,
    /// int theta u_2 dx (buoyancy power).
    pub buoy: f64,
}

/// Running time integrals of the balance fluxes (per-step trapezoid).
#[derive(Debug, Clone, Copy, Default)]
pub struct CumulativeIntegrals {
    pub diss_theta: f64,
    pub diss_u: f64,
    pub buoy: f64,
}

/// Largest pointwise speed, from the physical velocity.
pub fn u_max(state: &FlowState) -> f64 {
    let ux = state.u.x.to_phys();
    let uy = state.u.y.to_phys();
    ux.vals()
        .iter()
        .zip(uy.vals())
        .map(|(a, b)| (a * a + b * b).sqrt())
        .fold(0.0, f64::max)
}

/// Stable step size: `C_cfl * min(dx / max|u|, 1/(4 eps k_max^2))` capped at
/// `dt_max`. The second bound covers the explicitly treated variable-viscosity
/// stiffness.
pub fn cfl_dt(state: &FlowState, params: &PhysParams, opts: &StepOptions) -> f64 {
    let grid = state.theta.grid();
    let mut bound = f64::INFINITY;
    if opts.advection {
        let speed = u_max(state);
        if speed > 0.0 {
            bound = bound.min(grid.dx() / speed);
        }
    }
    if params.epsilon > 0.0 {
        let kmax = grid.k_max();
        bound = bound.min(1.0 / (4.0 * params.epsilon * kmax * kmax));
    }
    (opts.cfl_factor * bound).min(opts.dt_max)
}

/// Full temperature tendency `-dealias(u . grad theta) - kappa |D|^alpha theta`.
pub fn rhs_theta(state: &FlowState, params: &PhysParams, advection: bool) -> SpectralField {
    let mut out = dissipation_theta(&state.theta, params).scaled(-1.0);
    if advection {
        out.axpy(-1.0, &ops::advect(&state.u, &state.theta));
    }
    out
}

fn dissipation_theta(theta: &SpectralField, params: &PhysParams) -> SpectralField {
    // kappa |D|^alpha theta; the symbol vanishes at the zero mode.
    let grid = theta.grid().clone();
    let mut out = theta.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = grid.k_abs(idx);
        *c = if k == 0.0 {
            Complex64::default()
        } else {
            *c * params.kappa * k.powf(params.alpha)
        };
    }
    out
}

/// Explicit velocity tendency `P[-u . grad u + div(2 (mu-1) d(u)) + theta e2]`;
/// the `Lap u` part is handled by the semigroup and not included.
pub fn rhs_u_explicit(state: &FlowState, params: &PhysParams, advection: bool) -> VectorField {
    explicit_tendency(state, params, advection).n_u
}

/// Full velocity tendency including the Laplacian, for oracle tests and the
/// `d u/dt` diagnostic.
pub fn rhs_u_total(state: &FlowState, params: &PhysParams, advection: bool) -> VectorField {
    let mut out = rhs_u_explicit(state, params, advection);
    let grid = state.theta.grid().clone();
    for idx in 0..grid.len() {
        let k = grid.k_abs(idx);
        let k2 = k * k;
        out.x.coeffs_mut()[idx] -= k2 * state.u.x.coeffs()[idx];
        out.y.coeffs_mut()[idx] -= k2 * state.u.y.coeffs()[idx];
    }
    out
}

struct Tendency {
    n_theta: SpectralField,
    n_u: VectorField,
    max_speed: f64,
}

fn explicit_tendency(state: &FlowState, params: &PhysParams, advection: bool) -> Tendency {
    let grid = state.theta.grid().clone();
    let need_visc = params.epsilon > 0.0;

    let (ux_p, uy_p, max_speed) = if advection || need_visc {
        let ux = state.u.x.to_phys();
        let uy = state.u.y.to_phys();
        let speed = ux
            .vals()
            .iter()
            .zip(uy.vals())
            .map(|(a, b)| (a * a + b * b).sqrt())
            .fold(0.0, f64::max);
        (Some(ux), Some(uy), speed)
    } else {
        (None, None, 0.0)
    };

    // Temperature advection.
    let mut n_theta = SpectralField::zeros(&grid);
    if advection {
        let (tx, ty) = ops::gradient(&state.theta);
        let (tx, ty) = (tx.to_phys(), ty.to_phys());
        let (ux, uy) = (ux_p.as_ref().unwrap(), uy_p.as_ref().unwrap());
        let vals: Vec<f64> = (0..grid.len())
            .map(|i| -(ux.vals()[i] * tx.vals()[i] + uy.vals()[i] * ty.vals()[i]))
            .collect();
        n_theta = SpectralField::from_phys(&PhysField::from_vals(&grid, vals));
        ops::dealias_in_place(&mut n_theta);
    }

    // Velocity gradient in physical space, shared by advection and d(u).
    let grads = if advection || need_visc {
        let (u1x, u1y) = ops::gradient(&state.u.x);
        let (u2x, u2y) = ops::gradient(&state.u.y);
        Some((u1x.to_phys(), u1y.to_phys(), u2x.to_phys(), u2y.to_phys()))
    } else {
        None
    };

    let mut n_u = VectorField::zeros(&grid);
    if advection {
        let (u1x, u1y, u2x, u2y) = grads.as_ref().unwrap();
        let (ux, uy) = (ux_p.as_ref().unwrap(), uy_p.as_ref().unwrap());
        let adv = |gx: &PhysField, gy: &PhysField| -> SpectralField {
            let vals: Vec<f64> = (0..grid.len())
                .map(|i| -(ux.vals()[i] * gx.vals()[i] + uy.vals()[i] * gy.vals()[i]))
                .collect();
            let mut s = SpectralField::from_phys(&PhysField::from_vals(&grid, vals));
            ops::dealias_in_place(&mut s);
            s
        };
        n_u.x = adv(u1x, u1y);
        n_u.y = adv(u2x, u2y);
    }

    // Variable-viscosity stress divergence, div(2 (mu - 1) d(u)).
    if need_visc {
        let (u1x, u1y, u2x, u2y) = grads.as_ref().unwrap();
        let theta_p = state.theta.to_phys();
        let mut s11 = vec![0.0; grid.len()];
        let mut s12 = vec![0.0; grid.len()];
        let mut s22 = vec![0.0; grid.len()];
        for i in 0..grid.len() {
            let mu1 = params.mu(theta_p.vals()[i]) - 1.0;
            s11[i] = 2.0 * mu1 * u1x.vals()[i];
            s12[i] = mu1 * (u1y.vals()[i] + u2x.vals()[i]);
            s22[i] = 2.0 * mu1 * u2y.vals()[i];
        }
        let to_spec = |v: Vec<f64>| {
            let mut s = SpectralField::from_phys(&PhysField::from_vals(&grid, v));
            ops::dealias_in_place(&mut s);
            s
        };
        let (s11, s12, s22) = (to_spec(s11), to_spec(s12), to_spec(s22));
        for idx in 0..grid.len() {
            let (kx, ky) = grid.k_pair(idx);
            let i = Complex64::new(0.0, 1.0);
            n_u.x.coeffs_mut()[idx] += i * (kx * s11.coeffs()[idx] + ky * s12.coeffs()[idx]);
            n_u.y.coeffs_mut()[idx] += i * (kx * s12.coeffs()[idx] + ky * s22.coeffs()[idx]);
        }
    }

    // Buoyancy theta e2.
    for idx in 0..grid.len() {
        n_u.y.coeffs_mut()[idx] += state.theta.coeffs()[idx];
    }

    n_u = ops::leray_project(&n_u);
    Tendency { n_theta, n_u, max_speed }
}

/// Recover the pressure on demand: the projection step eliminates
/// `grad Pi = (I - P)[ -u.grad u + div(2 (mu-1) d(u)) + theta e2 ]`, so
/// `Pi_k = -i k . G_k / |k|^2` for the unprojected explicit tendency G
/// (mean-free normalization; the exactly-integrated `Lap u` is
/// divergence-free and contributes nothing).
pub fn recover_pressure(state: &FlowState, params: &PhysParams, advection: bool) -> SpectralField {
    let grid = state.theta.grid().clone();
    let g = unprojected_tendency(state, params, advection);
    let pg = ops::leray_project(&g);
    let mut pressure = SpectralField::zeros(&grid);
    for idx in 1..grid.len() {
        let (kx, ky) = grid.k_pair(idx);
        let k2 = kx * kx + ky * ky;
        let gx = g.x.coeffs()[idx] - pg.x.coeffs()[idx];
        let gy = g.y.coeffs()[idx] - pg.y.coeffs()[idx];
        // grad Pi = (gx, gy): Pi = (k . g) / (i |k|^2).
        let kdotg = kx * gx + ky * gy;
        pressure.coeffs_mut()[idx] = kdotg / (Complex64::new(0.0, 1.0) * k2);
    }
    pressure
}

fn unprojected_tendency(state: &FlowState, params: &PhysParams, advection: bool) -> VectorField {
    let grid = state.theta.grid().clone();
    let mut g = VectorField::zeros(&grid);
    // Advection.
    if advection {
        let (u1x, u1y) = ops::gradient(&state.u.x);
        let (u2x, u2y) = ops::gradient(&state.u.y);
        let (u1x, u1y, u2x, u2y) =
            (u1x.to_phys(), u1y.to_phys(), u2x.to_phys(), u2y.to_phys());
        let ux = state.u.x.to_phys();
        let uy = state.u.y.to_phys();
        let adv = |gx: &PhysField, gy: &PhysField| -> SpectralField {
            let vals: Vec<f64> = (0..grid.len())
                .map(|i| -(ux.vals()[i] * gx.vals()[i] + uy.vals()[i] * gy.vals()[i]))
                .collect();
            let mut s = SpectralField::from_phys(&PhysField::from_vals(&grid, vals));
            ops::dealias_in_place(&mut s);
            s
        };
        g.x = adv(&u1x, &u1y);
        g.y = adv(&u2x, &u2y);
    }
    if params.epsilon > 0.0 {
        let (u1x, u1y) = ops::gradient(&state.u.x);
        let (u2x, u2y) = ops::gradient(&state.u.y);
        let (u1x, u1y, u2x, u2y) =
            (u1x.to_phys(), u1y.to_phys(), u2x.to_phys(), u2y.to_phys());
        let theta_p = state.theta.to_phys();
        let mut s11 = vec![0.0; grid.len()];
        let mut s12 = vec![0.0; grid.len()];
        let mut s22 = vec![0.0; grid.len()];
        for i in 0..grid.len() {
            let mu1 = params.mu(theta_p.vals()[i]) - 1.0;
            s11[i] = 2.0 * mu1 * u1x.vals()[i];
            s12[i] = mu1 * (u1y.vals()[i] + u2x.vals()[i]);
            s22[i] = 2.0 * mu1 * u2y.vals()[i];
        }
        let to_spec = |v: Vec<f64>| {
            let mut s = SpectralField::from_phys(&PhysField::from_vals(&grid, v));
            ops::dealias_in_place(&mut s);
            s
        };
        let (s11, s12, s22) = (to_spec(s11), to_spec(s12), to_spec(s22));
        for idx in 0..grid.len() {
            let (kx, ky) = grid.k_pair(idx);
            let i = Complex64::new(0.0, 1.0);
            g.x.coeffs_mut()[idx] += i * (kx * s11.coeffs()[idx] + ky * s12.coeffs()[idx]);
            g.y.coeffs_mut()[idx] += i * (kx * s12.coeffs()[idx] + ky * s22.coeffs()[idx]);
        }
    }
    for idx in 0..grid.len() {
        g.y.coeffs_mut()[idx] += state.theta.coeffs()[idx];
    }
    g
}

/// Balance fluxes at a state (dissipations by spectral sums plus the
/// mu-weighted quadrature, buoyancy by the spectral pairing).
pub fn balance_rates(state: &FlowState, params: &PhysParams) -> BalanceRates {
    let grid = state.theta.grid().clone();
    let l2sq = grid.box_length() * grid.box_length();

    let mut diss_theta = 0.0;
    let mut grad_u_sq = 0.0;
    let mut buoy = 0.0;
    for idx in 1..grid.len() {
        let k = grid.k_abs(idx);
        diss_theta += k.powf(params.alpha) * state.theta.coeffs()[idx].norm_sqr();
        grad_u_sq += k * k
            * (state.u.x.coeffs()[idx].norm_sqr() + state.u.y.coeffs()[idx].norm_sqr());
    }
    for idx in 0..grid.len() {
        buoy += (state.theta.coeffs()[idx] * state.u.y.coeffs()[idx].conj()).re;
    }
    diss_theta *= params.kappa * l2sq;
    grad_u_sq *= l2sq;
    buoy *= l2sq;

    // 2 int (mu - 1) d:d dx on the grid; zero when epsilon = 0.
    let mut extra = 0.0;
    if params.epsilon > 0.0 {
        let (u1x, u1y) = ops::gradient(&state.u.x);
        let (u2x, u2y) = ops::gradient(&state.u.y);
        let (u1x, u1y, u2x, u2y) =
            (u1x.to_phys(), u1y.to_phys(), u2x.to_phys(), u2y.to_phys());
        let theta_p = state.theta.to_phys();
        let mut acc = 0.0;
        for i in 0..grid.len() {
            let mu1 = params.mu(theta_p.vals()[i]) - 1.0;
            let d11 = u1x.vals()[i];
            let d22 = u2y.vals()[i];
            let d12 = 0.5 * (u1y.vals()[i] + u2x.vals()[i]);
            acc += mu1 * (d11 * d11 + d22 * d22 + 2.0 * d12 * d12);
        }
        extra = 2.0 * acc * grid.cell_area();
    }

    // For div-free band-limited u, ||grad u||^2 = 2 int d:d dx exactly.
    BalanceRates { diss_theta, diss_u: grad_u_sq + extra, buoy }
}

/// Per-mode semigroup factors for a fixed dt, cached by the stepper.
struct Semigroups {
    dt: f64,
    exp_theta: Vec<f64>,
    exp_u: Vec<f64>,
}

impl Semigroups {
    fn build(state: &FlowState, params: &PhysParams, dt: f64) -> Self {
        let grid = state.theta.grid();
        let exp_theta = (0..grid.len())
            .map(|idx| {
                let k = grid.k_abs(idx);
                if k == 0.0 { 1.0 } else { (-params.kappa * dt * k.powf(params.alpha)).exp() }
            })
            .collect();
        let exp_u = (0..grid.len())
            .map(|idx| {
                let k = grid.k_abs(idx);
                (-dt * k * k).exp()
            })
            .collect();
        Semigroups { dt, exp_theta, exp_u }
    }

    fn apply(&self, theta: &mut SpectralField, u: &mut VectorField) {
        for (c, e) in theta.coeffs_mut().iter_mut().zip(&self.exp_theta) {
            *c *= *e;
        }
        for (c, e) in u.x.coeffs_mut().iter_mut().zip(&self.exp_u) {
            *c *= *e;
        }
        for (c, e) in u.y.coeffs_mut().iter_mut().zip(&self.exp_u) {
            *c *= *e;
        }
    }
}

/// The time stepper. Owns the balance accumulators; a fixed seed plus a fixed
/// thread count (the stepper is single-threaded) gives bitwise-reproducible
/// trajectories.
pub struct Solver {
    pub params: PhysParams,
    pub opts: StepOptions,
    cum: CumulativeIntegrals,
    last_rates: BalanceRates,
    cache: Option<Semigroups>,
}

impl Solver {
    pub fn new(params: PhysParams, opts: StepOptions, state0: &FlowState) -> Self {
        let last_rates = balance_rates(state0, &params);
        Solver { params, opts, cum: CumulativeIntegrals::default(), last_rates, cache: None }
    }

    pub fn cumulative(&self) -> CumulativeIntegrals {
        self.cum
    }

    pub fn current_rates(&self) -> BalanceRates {
        self.last_rates
    }

    /// One Lawson-Heun step. Errors on CFL violation or a non-finite result
    /// (the failed state is returned inside the error for post-mortems).
    pub fn step(&mut self, state: &FlowState, dt: f64) -> Result<FlowState> {
        assert!(dt > 0.0, "dt must be positive");
        if self.cache.as_ref().map(|c| c.dt != dt).unwrap_or(true) {
            self.cache = Some(Semigroups::build(state, &self.params, dt));
        }

        let k1 = explicit_tendency(state, &self.params, self.opts.advection);

        // CFL guard, using the speed already materialized by the tendency.
        // A non-finite speed falls through to the NonFiniteState check below.
        if k1.max_speed.is_finite() {
            let limit = {
                let grid = state.theta.grid();
                let mut bound = f64::INFINITY;
                if self.opts.advection && k1.max_speed > 0.0 {
                    bound = bound.min(grid.dx() / k1.max_speed);
                }
                if self.params.epsilon > 0.0 {
                    let kmax = grid.k_max();
                    bound = bound.min(1.0 / (4.0 * self.params.epsilon * kmax * kmax));
                }
                (self.opts.cfl_factor * bound).min(self.opts.dt_max)
            };
            if dt > limit * (1.0 + 1e-12) {
                return Err(FbsqError::CFLViolation { dt, limit });
            }
        }

        let sg = self.cache.as_ref().unwrap();

        // Predictor: E(dt) (x + dt k1).
        let mut pred = FlowState {
            theta: state.theta.clone(),
            u: state.u.clone(),
            t: state.t + dt,
            shift: state.shift,
        };
        pred.theta.axpy(dt, &k1.n_theta);
        pred.u.axpy(dt, &k1.n_u);
        sg.apply(&mut pred.theta, &mut pred.u);

        let k2 = explicit_tendency(&pred, &self.params, self.opts.advection);

        // Corrector: E x + dt/2 (E k1 + k2).
        let mut theta = state.theta.clone();
        let mut u = state.u.clone();
        theta.axpy(0.5 * dt, &k1.n_theta);
        u.axpy(0.5 * dt, &k1.n_u);
        sg.apply(&mut theta, &mut u);
        theta.axpy(0.5 * dt, &k2.n_theta);
        u.axpy(0.5 * dt, &k2.n_u);

        let u = ops::leray_project(&u);
        let next = FlowState { theta, u, t: state.t + dt, shift: state.shift };
        next.check_finite()?;

        // Trapezoidal flux accumulation at dt resolution.
        let rates = balance_rates(&next, &self.params);
        self.cum.diss_theta += 0.5 * dt * (self.last_rates.diss_theta + rates.diss_theta);
        self.cum.diss_u += 0.5 * dt * (self.last_rates.diss_u + rates.diss_u);
        self.cum.buoy += 0.5 * dt * (self.last_rates.buoy + rates.buoy);
        self.last_rates = rates;

        Ok(next)
    }
}
