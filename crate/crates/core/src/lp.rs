//! Littlewood-Paley theory on the grid: dyadic partition of unity, frequency
//! blocks, Besov and Chemin-Lerner norms, Bony paraproducts, transport
//! commutators, and the Bernstein property harness.
//!
//! Shell indices are measured in units of the fundamental wavenumber `2*pi/L`
//! so they are grid-independent: shell `j` covers `|m| in 2^j * [3/4, 8/3]`
//! with `m` the integer mode. The low-pass profile chi equals 1 on
//! `|m| <= 3/4`, vanishes for `|m| >= 4/3`, and `phi(m) = chi(m/2) - chi(m)`,
//! which makes every partition identity telescope exactly.

use num_complex::Complex64;

use crate::error::{FbsqError, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::Grid;
use crate::ops;

/// Which dyadic family a computation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// Blocks j = -1, 0, 1, ..; block -1 is the chi ball (holds the mean).
    Inhomogeneous,
    /// Blocks j in Z restricted to the resolvable band; the zero mode is
    /// skipped, so use mean-zero fields.
    Homogeneous,
}

/// Smooth step built from the exp(-1/x) glue: 0 at t <= 0, 1 at t >= 1.
fn smooth_step(t: f64) -> f64 {
    let psi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = psi(t);
    let b = psi(1.0 - t);
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        1.0
    } else {
        a / (a + b)
    }
}

/// Dyadic partition of unity on a grid's mode lattice.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    j_min: i32,
    j_max: i32,
    shells_below_cutoff: usize,
    corrupt: bool,
}

impl DyadicPartition {
    /// Radial low-pass profile: 1 on r <= 3/4, 0 on r >= 4/3.
    pub fn chi(&self, r: f64) -> f64 {
        const LO: f64 = 0.75;
        const HI: f64 = 4.0 / 3.0;
        if r <= LO {
            1.0
        } else if r >= HI {
            0.0
        } else {
            smooth_step((HI - r) / (HI - LO))
        }
    }

    /// Annulus profile phi(r) = chi(r/2) - chi(r); support [3/4, 8/3].
    pub fn phi(&self, r: f64) -> f64 {
        let base = self.chi(0.5 * r) - self.chi(r);
        // Test hook: detuning phi breaks the telescoping identity.
        if self.corrupt {
            0.9 * base
        } else {
            base
        }
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Number of whole shells whose support lies below the dealias cutoff.
    pub fn shells_below_cutoff(&self) -> usize {
        self.shells_below_cutoff
    }

    /// Block range for a flavor (both start at -1 on the integer lattice:
    /// the lowest nonzero mode |m| = 1 sits in shells -1 and 0).
    pub fn j_range(&self, flavor: Flavor) -> std::ops::RangeInclusive<i32> {
        match flavor {
            Flavor::Inhomogeneous => -1..=self.j_max,
            Flavor::Homogeneous => self.j_min..=self.j_max,
        }
    }

    /// Multiplier value of block j at radius r (mode units).
    pub fn block_profile(&self, j: i32, flavor: Flavor, r: f64) -> f64 {
        if flavor == Flavor::Inhomogeneous && j == -1 {
            self.chi(r)
        } else {
            self.phi(r * 0.5_f64.powi(j))
        }
    }

    #[doc(hidden)]
    pub fn corrupt_for_tests(&mut self) {
        self.corrupt = true;
    }
}

/// Build the partition for a grid.
///
/// Fails with `GridTooCoarse` when fewer than 4 whole dyadic shells fit below
/// the dealias cutoff.
pub fn build_partition(grid: &Grid) -> Result<DyadicPartition> {
    let max_mode = (grid.n() as f64 / 2.0) * std::f64::consts::SQRT_2;
    let j_max = (4.0 * max_mode / 3.0).log2().floor() as i32;
    let cutoff = grid.dealias_cutoff() as f64;
    // Shell j lies entirely below the cutoff when 2^j * 8/3 <= cutoff.
    let mut shells = 0usize;
    for j in -1..=j_max {
        if 2.0_f64.powi(j) * (8.0 / 3.0) <= cutoff {
            shells += 1;
        }
    }
    if shells < 4 {
        return Err(FbsqError::GridTooCoarse { shells, needed: 4 });
    }
    Ok(DyadicPartition { j_min: -1, j_max, shells_below_cutoff: shells, corrupt: false })
}

/// Dyadic block `Delta_j f` as a Fourier multiplier.
pub fn block(
    part: &DyadicPartition,
    f: &SpectralField,
    j: i32,
    flavor: Flavor,
) -> Result<SpectralField> {
    let range = part.j_range(flavor);
    if !range.contains(&j) {
        return Err(FbsqError::IndexOutOfRange { j, j_min: *range.start(), j_max: *range.end() });
    }
    let grid = f.grid().clone();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let r = grid.mode_abs(idx);
        if flavor == Flavor::Homogeneous && idx == 0 {
            *c = Complex64::default();
        } else {
            *c *= part.block_profile(j, flavor, r);
        }
    }
    Ok(out)
}

/// Low-frequency cut-off `S_j f = sum_{j' <= j-1} Delta_{j'} f`, realized as
/// the chi(2^{-j} .) multiplier (the telescoping closed form).
pub fn low_cutoff(
    part: &DyadicPartition,
    f: &SpectralField,
    j: i32,
    flavor: Flavor,
) -> SpectralField {
    let grid = f.grid().clone();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        if flavor == Flavor::Homogeneous && idx == 0 {
            *c = Complex64::default();
            continue;
        }
        let r = grid.mode_abs(idx) * 0.5_f64.powi(j);
        *c *= part.chi(r);
    }
    out
}

/// Full block decomposition of a field.
pub struct BlockDecomposition {
    pub flavor: Flavor,
    pub blocks: Vec<(i32, SpectralField)>,
}

pub fn decompose(
    part: &DyadicPartition,
    f: &SpectralField,
    flavor: Flavor,
) -> Result<BlockDecomposition> {
    let blocks = part
        .j_range(flavor)
        .map(|j| Ok((j, block(part, f, j, flavor)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDecomposition { flavor, blocks })
}

impl BlockDecomposition {
    pub fn reconstruct(&self) -> SpectralField {
        let mut out = self.blocks[0].1.clone();
        for (_, b) in &self.blocks[1..] {
            out.axpy(1.0, b);
        }
        out
    }
}

/// ell^r aggregation of a sequence of nonnegative terms.
fn lr_aggregate(terms: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|a| a.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Besov norm `|| (2^{js} ||Delta_j f||_{L^p})_j ||_{l^r}`.
///
/// Homogeneous flavor skips the zero mode and shells below `j_min`; callers
/// can surface that truncation via [`homogeneous_band`].
pub fn besov_norm(
    part: &DyadicPartition,
    f: &SpectralField,
    s: f64,
    p: f64,
    r: f64,
    flavor: Flavor,
) -> Result<f64> {
    let terms = part
        .j_range(flavor)
        .map(|j| {
            let b = block(part, f, j, flavor)?;
            Ok(2.0_f64.powf(j as f64 * s) * b.to_phys().lp_norm(p))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(lr_aggregate(terms.into_iter(), r))
}

/// The truncation that homogeneous norms carry on a torus: the resolvable
/// shell band and the skipped zero-mode mass of a given field.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct HomogeneousBand {
    pub j_min: i32,
    pub j_max: i32,
    pub skipped_mean: f64,
}

pub fn homogeneous_band(part: &DyadicPartition, f: &SpectralField) -> HomogeneousBand {
    HomogeneousBand { j_min: part.j_min, j_max: part.j_max, skipped_mean: f.mean() }
}

/// Per-sample block L^p norms, the raw material of Chemin-Lerner norms.
pub fn block_lp_norms(
    part: &DyadicPartition,
    f: &SpectralField,
    p: f64,
    flavor: Flavor,
) -> Result<Vec<(i32, f64)>> {
    part.j_range(flavor)
        .map(|j| Ok((j, block(part, f, j, flavor)?.to_phys().lp_norm(p))))
        .collect()
}

/// Trapezoidal `L^sigma` norm in time of a sampled scalar.
fn time_lsigma(ts: &[f64], vals: &[f64], sigma: f64) -> f64 {
    if sigma.is_infinite() {
        return vals.iter().copied().fold(0.0, f64::max);
    }
    let mut acc = 0.0;
    for i in 1..ts.len() {
        let dt = ts[i] - ts[i - 1];
        acc += 0.5 * dt * (vals[i - 1].powf(sigma) + vals[i].powf(sigma));
    }
    acc.powf(1.0 / sigma)
}

/// Chemin-Lerner norm `|| f ||_{L~^sigma_T(B^s_{p,r})}`: the time norm is
/// taken inside the dyadic aggregation.
pub fn chemin_lerner_norm(
    part: &DyadicPartition,
    series: &[(f64, SpectralField)],
    s: f64,
    p: f64,
    r: f64,
    sigma: f64,
    flavor: Flavor,
) -> Result<f64> {
    if series.is_empty() {
        return Err(FbsqError::EmptySeries);
    }
    let ts: Vec<f64> = series.iter().map(|(t, _)| *t).collect();
    let mut per_j: Vec<Vec<f64>> = Vec::new();
    for (_, f) in series {
        let norms = block_lp_norms(part, f, p, flavor)?;
        if per_j.is_empty() {
            per_j = vec![Vec::with_capacity(series.len()); norms.len()];
        }
        for (slot, (_, v)) in per_j.iter_mut().zip(&norms) {
            slot.push(*v);
        }
    }
    let js: Vec<i32> = part.j_range(flavor).collect();
    let terms = js
        .iter()
        .zip(&per_j)
        .map(|(j, vals)| 2.0_f64.powf(*j as f64 * s) * time_lsigma(&ts, vals, sigma));
    Ok(lr_aggregate(terms, r))
}

/// Chemin-Lerner norm from pre-recorded block norms (one row of per-shell
/// `||Delta_j f||_{L^p}` per sample). Used by run diagnostics so full fields
/// need not be stored.
pub fn chemin_lerner_from_blocks(
    ts: &[f64],
    rows: &[Vec<f64>],
    js: &[i32],
    s: f64,
    r: f64,
    sigma: f64,
) -> f64 {
    let terms = js.iter().enumerate().map(|(col, j)| {
        let vals: Vec<f64> = rows.iter().map(|row| row[col]).collect();
        2.0_f64.powf(*j as f64 * s) * time_lsigma(ts, &vals, sigma)
    });
    lr_aggregate(terms, r)
}

/// Time-outside companion norm `|| f ||_{L^lambda_T(B^s_{p,r})}` for the
/// Minkowski-ordering checks.
pub fn time_outside_norm(
    part: &DyadicPartition,
    series: &[(f64, SpectralField)],
    s: f64,
    p: f64,
    r: f64,
    lambda: f64,
    flavor: Flavor,
) -> Result<f64> {
    if series.is_empty() {
        return Err(FbsqError::EmptySeries);
    }
    let ts: Vec<f64> = series.iter().map(|(t, _)| *t).collect();
    let vals = series
        .iter()
        .map(|(_, f)| besov_norm(part, f, s, p, r, flavor))
        .collect::<Result<Vec<f64>>>()?;
    Ok(time_lsigma(&ts, &vals, lambda))
}

/// Bony decomposition of the product `u v` into low-high, high-low and
/// high-high frequency interactions: `uv = T_u v + T_v u + R(u, v)`.
///
/// The pair sum over blocks is partitioned exactly, so the three pieces
/// reconstruct the (dealiased) product to round-off.
pub fn bony_decompose(
    part: &DyadicPartition,
    u: &SpectralField,
    v: &SpectralField,
    flavor: Flavor,
) -> Result<(SpectralField, SpectralField, SpectralField)> {
    u.check_grid(v)?;
    let grid = u.grid().clone();
    let ub = decompose(part, u, flavor)?;
    let vb = decompose(part, v, flavor)?;
    let u_phys: Vec<_> = ub.blocks.iter().map(|(j, b)| (*j, b.to_phys())).collect();
    let v_phys: Vec<_> = vb.blocks.iter().map(|(j, b)| (*j, b.to_phys())).collect();

    let mut t_uv = vec![0.0; grid.len()];
    let mut t_vu = vec![0.0; grid.len()];
    let mut remainder = vec![0.0; grid.len()];
    for (ju, up) in &u_phys {
        for (jv, vp) in &v_phys {
            let target = if *ju <= *jv - 2 {
                &mut t_uv
            } else if *jv <= *ju - 2 {
                &mut t_vu
            } else {
                &mut remainder
            };
            for (o, (a, b)) in target.iter_mut().zip(up.vals().iter().zip(vp.vals())) {
                *o += a * b;
            }
        }
    }
    let spec = |vals: Vec<f64>| {
        ops::dealias(&SpectralField::from_phys(&crate::field::PhysField::from_vals(&grid, vals)))
    };
    Ok((spec(t_uv), spec(t_vu), spec(remainder)))
}

/// Transport commutator `R_j = [u . grad, Delta_j] f`, dealiased.
///
/// Requires `div u = 0`; the commutator of a block with constant-coefficient
/// transport vanishes identically.
pub fn commutator(
    part: &DyadicPartition,
    u: &VectorField,
    f: &SpectralField,
    j: i32,
    flavor: Flavor,
) -> Result<SpectralField> {
    let div = ops::divergence(u);
    let scale = 1.0 + u.l2_norm() * u.grid().k_max();
    let residual = div.l2_norm();
    if residual > 1e-10 * scale {
        return Err(FbsqError::NotDivergenceFree { residual, tol: 1e-10 });
    }
    let adv_then_block = block(part, &ops::advect(u, f), j, flavor)?;
    let block_then_adv = ops::advect(u, &block(part, f, j, flavor)?);
    Ok(adv_then_block.sub(&block_then_adv))
}

/// Empirical constant of the commutator bound used in the a priori estimates:
/// `sup_j 2^{j a/2} ||R_j||_{L^p} / (||grad u||_{L^inf} ||f||_{B^{a/2}_{p,inf}})`
/// with homogeneous blocks.
pub fn commutator_bound_constant(
    part: &DyadicPartition,
    u: &VectorField,
    f: &SpectralField,
    alpha: f64,
    p: f64,
) -> Result<f64> {
    let (ux_x, ux_y) = ops::gradient(&u.x);
    let (uy_x, uy_y) = ops::gradient(&u.y);
    let grad_linf = [ux_x, ux_y, uy_x, uy_y]
        .iter()
        .map(|g| g.to_phys().lp_norm(f64::INFINITY))
        .fold(0.0, f64::max);
    let besov = besov_norm(part, f, alpha / 2.0, p, f64::INFINITY, Flavor::Homogeneous)?;
    let denom = grad_linf * besov;
    let mut sup = 0.0_f64;
    for j in part.j_range(Flavor::Homogeneous) {
        let rj = commutator(part, u, f, j, Flavor::Homogeneous)?;
        let val = 2.0_f64.powf(j as f64 * alpha / 2.0) * rj.to_phys().lp_norm(p);
        sup = sup.max(val);
    }
    Ok(sup / denom)
}

/// Outcome of the Bernstein-lemma harness for a single shell index.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BernsteinShell {
    pub j: i32,
    /// Ball case (a, b) = (2, inf), k = 0: max ||u||_inf / (lambda ||u||_2).
    pub ball_const: f64,
    /// Annulus case k = 1, a = 2: min and max of ||grad u||_2 / (lambda ||u||_2).
    pub annulus_lo: f64,
    pub annulus_hi: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BernsteinReport {
    pub shells: Vec<BernsteinShell>,
    /// max over j / min over j for each recorded constant family.
    pub ball_spread: f64,
    pub annulus_lo_spread: f64,
    pub annulus_hi_spread: f64,
    pub annulus_lower_bound_ok: bool,
    pub spreads_within_factor_4: bool,
}

/// Random fields supported on one shell / one ball, exercised against the
/// Bernstein inequalities; constants must not drift with j. `lambda` is the
/// physical shell scale `2^j * 2*pi/L`, which keeps the ratios unit-free.
pub fn bernstein_harness(
    part: &DyadicPartition,
    grid: &std::sync::Arc<Grid>,
    samples: usize,
    seed: u64,
) -> BernsteinReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let k0 = grid.k0();
    // Shells whose support sits inside the Nyquist square.
    let j_hi = ((3.0 * grid.n() as f64 / 16.0).log2().floor() as i32).min(part.j_max());
    let mut shells = Vec::new();
    for j in 0..=j_hi {
        let lo = 0.75 * 2.0_f64.powi(j);
        let hi = (8.0 / 3.0) * 2.0_f64.powi(j);
        let lambda = 2.0_f64.powi(j) * k0;
        let mut ball_const = 0.0_f64;
        let mut ann_lo = f64::INFINITY;
        let mut ann_hi = 0.0_f64;
        for _ in 0..samples {
            // Annulus-supported sample.
            let f = random_supported(grid, &mut rng, |r| r >= lo && r <= hi);
            let l2 = f.l2_norm();
            if l2 > 0.0 {
                let (gx, gy) = ops::gradient(&f);
                let grad = (gx.l2_norm().powi(2) + gy.l2_norm().powi(2)).sqrt();
                let ratio = grad / (lambda * l2);
                ann_lo = ann_lo.min(ratio);
                ann_hi = ann_hi.max(ratio);
            }
            // Ball-supported sample, radius (4/3) 2^j.
            let b = random_supported(grid, &mut rng, |r| r <= (4.0 / 3.0) * 2.0_f64.powi(j));
            let l2 = b.l2_norm();
            if l2 > 0.0 {
                let linf = b.to_phys().lp_norm(f64::INFINITY);
                ball_const = ball_const.max(linf / ((4.0 / 3.0) * 2.0_f64.powi(j) * k0 * l2));
            }
        }
        // Coherent extremal candidate (all phases aligned): random phases only
        // reach sqrt(log M) of the sharp L^inf concentration, so without this
        // the measured "constant" shrinks with j instead of stabilizing.
        let b = coherent_supported(grid, |r| r <= (4.0 / 3.0) * 2.0_f64.powi(j));
        let l2 = b.l2_norm();
        if l2 > 0.0 {
            let linf = b.to_phys().lp_norm(f64::INFINITY);
            ball_const = ball_const.max(linf / ((4.0 / 3.0) * 2.0_f64.powi(j) * k0 * l2));
        }
        shells.push(BernsteinShell { j, ball_const, annulus_lo: ann_lo, annulus_hi: ann_hi });
    }
    let spread = |get: fn(&BernsteinShell) -> f64| {
        let max = shells.iter().map(get).fold(0.0_f64, f64::max);
        let min = shells.iter().map(get).fold(f64::INFINITY, f64::min);
        max / min
    };
    let ball_spread = spread(|s| s.ball_const);
    let annulus_lo_spread = spread(|s| s.annulus_lo);
    let annulus_hi_spread = spread(|s| s.annulus_hi);
    let annulus_lower_bound_ok = shells.iter().all(|s| s.annulus_lo >= 0.75);
    BernsteinReport {
        shells,
        ball_spread,
        annulus_lo_spread,
        annulus_hi_spread,
        annulus_lower_bound_ok,
        spreads_within_factor_4: ball_spread <= 4.0
            && annulus_lo_spread <= 4.0
            && annulus_hi_spread <= 4.0,
    }
}

/// Unit-coefficient field on every mode whose radius satisfies the predicate
/// (all phases aligned, the L^inf-extremal profile).
pub fn coherent_supported(grid: &std::sync::Arc<Grid>, keep: impl Fn(f64) -> bool) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let half = grid.n() as i32 / 2;
    for my in -half + 1..=half - 1 {
        for mx in -half + 1..=half - 1 {
            let r = ((mx * mx + my * my) as f64).sqrt();
            if r == 0.0 || !keep(r) {
                continue;
            }
            f.coeffs_mut()[grid.index_of_mode(mx, my)] = Complex64::new(1.0, 0.0);
        }
    }
    f
}

/// Random Hermitian-symmetric field restricted to modes whose radius (in mode
/// units) satisfies the predicate.
pub fn random_supported(
    grid: &std::sync::Arc<Grid>,
    rng: &mut impl rand::Rng,
    keep: impl Fn(f64) -> bool,
) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let half = grid.n() as i32 / 2;
    for my in -half + 1..=half - 1 {
        for mx in -half + 1..=half - 1 {
            if (my, mx) <= (0, 0) {
                continue;
            }
            let r = ((mx * mx + my * my) as f64).sqrt();
            if r == 0.0 || !keep(r) {
                continue;
            }
            let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let amp = rng.gen_range(0.1..1.0);
            let c = amp * Complex64::new(phase.cos(), phase.sin());
            f.coeffs_mut()[grid.index_of_mode(mx, my)] = c;
            f.coeffs_mut()[grid.index_of_mode(-mx, -my)] = c.conj();
        }
    }
    f
}
