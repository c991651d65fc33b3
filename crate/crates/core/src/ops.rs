//! Fourier-side differential operators: fractional multipliers, gradients,
//! divergence, deformation tensor, Leray projection, and 2/3-rule dealiasing.
//!
//! All operators are pure functions on immutable inputs. The symbol `|k|^s`
//! vanishes at the zero mode for every s, so `|D|^s` always annihilates the
//! mean; negative powers additionally require mean-zero input.

use num_complex::Complex64;

use crate::error::{FbsqError, Result};
use crate::field::{SpectralField, VectorField};

/// Apply the Fourier multiplier with symbol `|k|^s` (physical units).
///
/// The zero mode maps to zero for `s != 0`. For `s < 0` the input must be
/// mean-zero up to round-off.
pub fn apply_multiplier(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        let scale: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let z = f.zero_mode().norm();
        if z > 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(FbsqError::NegativePowerOnNonzeroMean { s, zero_mode: z });
        }
    }
    let grid = f.grid();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = grid.k_abs(idx);
        *c = if k == 0.0 { Complex64::default() } else { *c * k.powf(s) };
    }
    Ok(out)
}

/// Spectral gradient `(d/dx f, d/dy f)` via the multipliers `i k`.
pub fn gradient(f: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = f.grid();
    let mut gx = f.clone();
    let mut gy = f.clone();
    for idx in 0..grid.len() {
        let (kx, ky) = grid.k_pair(idx);
        let c = f.coeffs()[idx];
        gx.coeffs_mut()[idx] = Complex64::new(0.0, kx) * c;
        gy.coeffs_mut()[idx] = Complex64::new(0.0, ky) * c;
    }
    (gx, gy)
}

/// Divergence of a vector field, `i k . v`.
pub fn divergence(v: &VectorField) -> SpectralField {
    let grid = v.grid();
    let mut out = SpectralField::zeros(grid);
    for idx in 0..grid.len() {
        let (kx, ky) = grid.k_pair(idx);
        out.coeffs_mut()[idx] = Complex64::new(0.0, kx) * v.x.coeffs()[idx]
            + Complex64::new(0.0, ky) * v.y.coeffs()[idx];
    }
    out
}

/// Scalar curl of a 2-D vector field, `d/dx v_y - d/dy v_x`.
pub fn curl(v: &VectorField) -> SpectralField {
    let grid = v.grid();
    let mut out = SpectralField::zeros(grid);
    for idx in 0..grid.len() {
        let (kx, ky) = grid.k_pair(idx);
        out.coeffs_mut()[idx] = Complex64::new(0.0, kx) * v.y.coeffs()[idx]
            - Complex64::new(0.0, ky) * v.x.coeffs()[idx];
    }
    out
}

/// Symmetric part of the velocity gradient, `d(u) = (grad u + grad u^T)/2`,
/// returned as the three independent entries `(d11, d12, d22)`.
pub fn deformation(v: &VectorField) -> (SpectralField, SpectralField, SpectralField) {
    let grid = v.grid();
    let mut d11 = SpectralField::zeros(grid);
    let mut d12 = SpectralField::zeros(grid);
    let mut d22 = SpectralField::zeros(grid);
    for idx in 0..grid.len() {
        let (kx, ky) = grid.k_pair(idx);
        let (ux, uy) = (v.x.coeffs()[idx], v.y.coeffs()[idx]);
        let i = Complex64::new(0.0, 1.0);
        d11.coeffs_mut()[idx] = i * kx * ux;
        d22.coeffs_mut()[idx] = i * ky * uy;
        d12.coeffs_mut()[idx] = 0.5 * i * (kx * uy + ky * ux);
    }
    (d11, d12, d22)
}

/// Leray projection onto divergence-free fields:
/// `v_out(k) = (I - k k^T / |k|^2) v(k)`, zero mode passed through.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let mut out = v.clone();
    for idx in 1..grid.len() {
        let (kx, ky) = grid.k_pair(idx);
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            continue;
        }
        let (vx, vy) = (v.x.coeffs()[idx], v.y.coeffs()[idx]);
        let dot = (kx * vx + ky * vy) / k2;
        out.x.coeffs_mut()[idx] = vx - kx * dot;
        out.y.coeffs_mut()[idx] = vy - ky * dot;
    }
    out
}

/// Zero every mode with `max(|mx|, |my|) > (2/3) (N/2)` (the 2/3 rule).
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField) {
    let grid = f.grid().clone();
    for (idx, c) in f.coeffs_mut().iter_mut().enumerate() {
        if !grid.below_cutoff(idx) {
            *c = Complex64::default();
        }
    }
}

/// Pseudo-spectral product: inverse transform, pointwise multiply, forward
/// transform, dealias.
pub fn product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    let fp = f.to_phys();
    let gp = g.to_phys();
    let mut out = SpectralField::from_phys(&fp.mul(&gp));
    dealias_in_place(&mut out);
    out
}

/// Advection term `u . grad f`, formed in physical space and dealiased.
pub fn advect(u: &VectorField, f: &SpectralField) -> SpectralField {
    let (fx, fy) = gradient(f);
    let ux = u.x.to_phys();
    let uy = u.y.to_phys();
    let fx = fx.to_phys();
    let fy = fy.to_phys();
    let grid = f.grid();
    let vals: Vec<f64> = (0..grid.len())
        .map(|i| ux.vals()[i] * fx.vals()[i] + uy.vals()[i] * fy.vals()[i])
        .collect();
    let mut out = SpectralField::from_phys(&crate::field::PhysField::from_vals(grid, vals));
    dealias_in_place(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysField;
    use crate::grid::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    /// Random smooth field: Gaussian-enveloped spectrum, mean-zero.
    fn smooth_field(grid: &Arc<Grid>, seed: u64, xi_c: f64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(grid);
        let half = grid.n() as i32 / 2;
        for my in -half + 1..=half - 1 {
            for mx in -half + 1..=half - 1 {
                if (mx, my) <= (0, 0) {
                    continue;
                }
                let m2 = (mx * mx + my * my) as f64;
                let amp = (-m2 / (2.0 * xi_c * xi_c)).exp();
                let phase = rng.gen_range(0.0..2.0 * PI);
                let c = amp * Complex64::new(phase.cos(), phase.sin());
                let i = grid.index_of_mode(mx, my);
                let j = grid.index_of_mode(-mx, -my);
                f.coeffs_mut()[i] = c;
                f.coeffs_mut()[j] = c.conj();
            }
        }
        f
    }

    fn single_mode(grid: &Arc<Grid>, mx: i32, my: i32) -> SpectralField {
        let mut f = SpectralField::zeros(grid);
        let c = Complex64::new(0.5, 0.0);
        f.coeffs_mut()[grid.index_of_mode(mx, my)] = c;
        f.coeffs_mut()[grid.index_of_mode(-mx, -my)] = c;
        f
    }

    #[test]
    fn multiplier_on_single_mode_is_power_of_k() {
        // |k| = 2 on a 2*pi box, s = 0.8: the mode is an eigenfunction with
        // eigenvalue 2^0.8.
        let grid = Grid::new(32, 2.0 * PI);
        let f = single_mode(&grid, 2, 0);
        let g = apply_multiplier(&f, 0.8).unwrap();
        let expect = 2.0_f64.powf(0.8);
        let idx = grid.index_of_mode(2, 0);
        assert!((g.coeffs()[idx] - expect * f.coeffs()[idx]).norm() < 1e-14);
    }

    #[test]
    fn multiplier_annihilates_constants() {
        let grid = Grid::new(16, 1.0);
        let mut f = SpectralField::zeros(&grid);
        f.set_zero_mode(Complex64::new(3.0, 0.0));
        let g = apply_multiplier(&f, 1.0).unwrap();
        assert!(g.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn negative_power_rejects_nonzero_mean() {
        let grid = Grid::new(16, 1.0);
        let mut f = single_mode(&grid, 1, 0);
        f.set_zero_mode(Complex64::new(1.0, 0.0));
        assert!(matches!(
            apply_multiplier(&f, -0.5),
            Err(FbsqError::NegativePowerOnNonzeroMean { .. })
        ));
    }

    #[test]
    fn multiplier_squared_matches_finite_difference_laplacian() {
        // |D|^2 = -Laplacian; compare against a 4th-order centered stencil.
        let n = 256;
        let grid = Grid::new(n, 2.0 * PI);
        let f = smooth_field(&grid, 11, 6.0);
        let lap_spec = apply_multiplier(&f, 2.0).unwrap().to_phys();

        let fp = f.to_phys();
        let dx = grid.dx();
        let v = fp.vals();
        let idx = |ix: i32, iy: i32| -> f64 {
            let i = ix.rem_euclid(n as i32) as usize;
            let j = iy.rem_euclid(n as i32) as usize;
            v[j * n + i]
        };
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for iy in 0..n as i32 {
            for ix in 0..n as i32 {
                let d2x = (-idx(ix + 2, iy) + 16.0 * idx(ix + 1, iy) - 30.0 * idx(ix, iy)
                    + 16.0 * idx(ix - 1, iy)
                    - idx(ix - 2, iy))
                    / (12.0 * dx * dx);
                let d2y = (-idx(ix, iy + 2) + 16.0 * idx(ix, iy + 1) - 30.0 * idx(ix, iy)
                    + 16.0 * idx(ix, iy - 1)
                    - idx(ix, iy - 2))
                    / (12.0 * dx * dx);
                let fd = -(d2x + d2y);
                let sp = lap_spec.vals()[iy as usize * n + ix as usize];
                worst = worst.max((fd - sp).abs());
                scale = scale.max(sp.abs());
            }
        }
        assert!(worst <= 1e-4 * scale, "FD mismatch {worst:.3e} vs scale {scale:.3e}");
    }

    #[test]
    fn multiplier_composition_adds_exponents() {
        let grid = Grid::new(64, 3.0);
        let f = smooth_field(&grid, 5, 8.0);
        let a = apply_multiplier(&apply_multiplier(&f, 0.7).unwrap(), 0.9).unwrap();
        let b = apply_multiplier(&f, 1.6).unwrap();
        let scale = b.l2_norm();
        assert!(a.sub(&b).l2_norm() <= 1e-10 * scale);
    }

    #[test]
    fn gradient_of_sine_is_cosine() {
        let l = 4.0;
        let grid = Grid::new(64, l);
        let f = SpectralField::from_fn(&grid, |x, _| (2.0 * PI * x / l).sin());
        let (gx, gy) = gradient(&f);
        let expect = SpectralField::from_fn(&grid, |x, _| (2.0 * PI / l) * (2.0 * PI * x / l).cos());
        assert!(gx.sub(&expect).l2_norm() < 1e-12 * expect.l2_norm());
        assert!(gy.l2_norm() < 1e-13);
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let grid = Grid::new(16, 1.0);
        let mut f = SpectralField::zeros(&grid);
        f.set_zero_mode(Complex64::new(2.5, 0.0));
        let (gx, gy) = gradient(&f);
        assert!(gx.l2_norm() == 0.0 && gy.l2_norm() == 0.0);
    }

    #[test]
    fn gradient_matches_interpolated_directional_difference() {
        // Fourier-interpolate f at off-grid points x +- h e and compare the
        // centered difference with the spectral gradient evaluated the same way.
        let grid = Grid::new(64, 32.0 * PI);
        let f = smooth_field(&grid, 23, 4.0);
        let (gx, _) = gradient(&f);
        let eval = |field: &SpectralField, x: f64, y: f64| -> f64 {
            field
                .coeffs()
                .iter()
                .enumerate()
                .map(|(idx, c)| {
                    let (kx, ky) = grid.k_pair(idx);
                    (c * Complex64::new(0.0, kx * x + ky * y).exp()).re
                })
                .sum()
        };
        let h = 5e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            let x = rng.gen_range(0.0..grid.box_length());
            let y = rng.gen_range(0.0..grid.box_length());
            let fd = (eval(&f, x + h, y) - eval(&f, x - h, y)) / (2.0 * h);
            let sp = eval(&gx, x, y);
            assert!((fd - sp).abs() < 1e-8, "at ({x:.3},{y:.3}): {fd} vs {sp}");
        }
    }

    #[test]
    fn perp_gradient_is_divergence_free() {
        let grid = Grid::new(64, 7.0);
        let psi = smooth_field(&grid, 17, 8.0);
        let (px, py) = gradient(&psi);
        let v = VectorField { x: py.scaled(-1.0), y: px };
        assert!(divergence(&v).l2_norm() <= 1e-12 * psi.l2_norm().max(1.0));
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let grid = Grid::new(64, 7.0);
        let psi = smooth_field(&grid, 18, 8.0);
        let (px, py) = gradient(&psi);
        let div = divergence(&VectorField { x: px, y: py });
        let lap = apply_multiplier(&psi, 2.0).unwrap().scaled(-1.0);
        assert!(div.sub(&lap).l2_norm() <= 1e-12 * lap.l2_norm());
    }

    #[test]
    fn divergence_matches_gradient_components() {
        let grid = Grid::new(32, 3.0);
        let v = VectorField { x: smooth_field(&grid, 1, 5.0), y: smooth_field(&grid, 2, 5.0) };
        let d = divergence(&v);
        let (gx, _) = gradient(&v.x);
        let (_, gy) = gradient(&v.y);
        assert!(d.sub(&gx.add(&gy)).l2_norm() <= 1e-13 * d.l2_norm().max(1.0));
    }

    #[test]
    fn deformation_of_single_mode_rotation_analogue() {
        // u = (-sin y, sin x): d12 = (cos x - cos y)/2, d11 = d22 = 0.
        let l = 2.0 * PI;
        let grid = Grid::new(64, l);
        let u = VectorField {
            x: SpectralField::from_fn(&grid, |_, y| -(y.sin())),
            y: SpectralField::from_fn(&grid, |x, _| x.sin()),
        };
        let (d11, d12, d22) = deformation(&u);
        let expect = SpectralField::from_fn(&grid, |x, y| 0.5 * (x.cos() - y.cos()));
        assert!(d11.l2_norm() < 1e-13);
        assert!(d22.l2_norm() < 1e-13);
        assert!(d12.sub(&expect).l2_norm() < 1e-12 * expect.l2_norm());
    }

    #[test]
    fn deformation_of_potential_flow_is_hessian() {
        let grid = Grid::new(64, 5.0);
        let phi = smooth_field(&grid, 31, 6.0);
        let (px, py) = gradient(&phi);
        let (d11, d12, d22) = deformation(&VectorField { x: px.clone(), y: py.clone() });
        let (hxx, hxy) = gradient(&px);
        let (_, hyy) = gradient(&py);
        assert!(d11.sub(&hxx).l2_norm() < 1e-12 * hxx.l2_norm());
        assert!(d12.sub(&hxy).l2_norm() < 1e-12 * hxy.l2_norm().max(1.0));
        assert!(d22.sub(&hyy).l2_norm() < 1e-12 * hyy.l2_norm());
    }

    #[test]
    fn deformation_trace_equals_divergence() {
        let grid = Grid::new(32, 9.0);
        let v = VectorField { x: smooth_field(&grid, 41, 5.0), y: smooth_field(&grid, 42, 5.0) };
        let (d11, _, d22) = deformation(&v);
        let trace = d11.add(&d22);
        let div = divergence(&v);
        assert!(trace.sub(&div).l2_norm() <= 1e-12 * div.l2_norm().max(1.0));
    }

    #[test]
    fn leray_annihilates_gradients() {
        let grid = Grid::new(64, 6.0);
        let psi = smooth_field(&grid, 51, 6.0);
        let (px, py) = gradient(&psi);
        let p = leray_project(&VectorField { x: px, y: py });
        assert!(p.l2_norm() <= 1e-12 * psi.l2_norm());
    }

    #[test]
    fn leray_fixes_divergence_free_fields_and_is_idempotent() {
        let grid = Grid::new(64, 6.0);
        let psi = smooth_field(&grid, 52, 6.0);
        let (px, py) = gradient(&psi);
        let v = VectorField { x: py.scaled(-1.0), y: px };
        let pv = leray_project(&v);
        assert!(pv.sub(&v).l2_norm() <= 1e-12 * v.l2_norm());

        let w = VectorField { x: smooth_field(&grid, 53, 6.0), y: smooth_field(&grid, 54, 6.0) };
        let pw = leray_project(&w);
        let ppw = leray_project(&pw);
        assert!(ppw.sub(&pw).l2_norm() <= 1e-12 * pw.l2_norm());
        assert!(divergence(&pw).l2_norm() <= 1e-12 * w.l2_norm());
    }

    #[test]
    fn leray_residual_is_a_gradient() {
        // Helmholtz decomposition: v - Pv must be curl-free.
        let grid = Grid::new(64, 6.0);
        let v = VectorField { x: smooth_field(&grid, 55, 6.0), y: smooth_field(&grid, 56, 6.0) };
        let pv = leray_project(&v);
        let resid = v.sub(&pv);
        assert!(curl(&resid).l2_norm() <= 1e-10 * v.l2_norm());
    }

    #[test]
    fn leray_is_self_adjoint() {
        let grid = Grid::new(32, 6.0);
        for seed in 0..10 {
            let v = VectorField {
                x: smooth_field(&grid, 100 + seed, 5.0),
                y: smooth_field(&grid, 200 + seed, 5.0),
            };
            let w = VectorField {
                x: smooth_field(&grid, 300 + seed, 5.0),
                y: smooth_field(&grid, 400 + seed, 5.0),
            };
            let pv = leray_project(&v);
            let pw = leray_project(&w);
            let a = pv.x.inner(&w.x).unwrap() + pv.y.inner(&w.y).unwrap();
            let b = v.x.inner(&pw.x).unwrap() + v.y.inner(&pw.y).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn dealias_keeps_low_modes_and_kills_high_ones() {
        let grid = Grid::new(64, 1.0);
        // cutoff is 64/3 = 21
        let low = single_mode(&grid, 10, 5);
        assert!(dealias(&low).sub(&low).l2_norm() == 0.0);
        let high = single_mode(&grid, 30, 0);
        assert!(dealias(&high).l2_norm() == 0.0);
    }

    #[test]
    fn product_aliasing_is_removed() {
        // sin(k1 x) sin(k2 x) = (cos((k1-k2)x) - cos((k1+k2)x))/2. With
        // m1 = m2 = 40 on N = 128 the sum mode 80 aliases to -48, which is
        // above the cutoff 42 and must vanish; the difference mode 0 stays.
        let n = 128;
        let l = 2.0 * PI;
        let grid = Grid::new(n, l);
        let f = SpectralField::from_fn(&grid, |x, _| (40.0 * x).sin());
        let p = product(&f, &f);
        let expect = SpectralField::from_fn(&grid, |_, _| 0.5); // cos(0)/2 term only
        assert!(p.sub(&expect).l2_norm() < 1e-12 * expect.l2_norm());

        // m1 = 30, m2 = 25: sum mode 55 is above cutoff (no aliasing on the
        // grid), difference mode 5 is kept; compare to the exact expansion.
        let a = SpectralField::from_fn(&grid, |x, _| (30.0 * x).sin());
        let b = SpectralField::from_fn(&grid, |x, _| (25.0 * x).sin());
        let p = product(&a, &b);
        let expect = SpectralField::from_fn(&grid, |x, _| 0.5 * (5.0 * x).cos());
        assert!(p.sub(&expect).l2_norm() < 1e-12 * expect.l2_norm());
    }

    #[test]
    fn random_products_are_supported_below_cutoff() {
        let grid = Grid::new(64, 2.0);
        let f = smooth_field(&grid, 61, 10.0);
        let g = smooth_field(&grid, 62, 10.0);
        let p = product(&f, &g);
        for idx in 0..grid.len() {
            if !grid.below_cutoff(idx) {
                assert_eq!(p.coeffs()[idx], Complex64::default());
            }
        }
    }

    #[test]
    fn phys_lp_norm_sanity() {
        let grid = Grid::new(32, 2.0 * PI);
        let f = PhysField::from_fn(&grid, |x, _| x.sin());
        // ||sin||_L2 over [0,2pi]^2 = sqrt(2 pi^2)
        assert!((f.lp_norm(2.0) - (2.0 * PI * PI).sqrt()).abs() < 1e-12);
        assert!((f.lp_norm(f64::INFINITY) - 1.0).abs() < 1e-10);
    }
}
