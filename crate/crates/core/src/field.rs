//! Scalar and vector fields in spectral representation, plus their physical
//! counterparts.
//!
//! A `SpectralField` stores complex Fourier coefficients of a real scalar
//! field on its grid; Hermitian symmetry `c(-k) = conj(c(k))` is an invariant
//! maintained by construction (all physics starts from real data).

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{FbsqError, Result};
use crate::grid::Grid;

/// Fourier coefficients of a real scalar field.
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

/// Point values of a real scalar field on the grid, row-major.
#[derive(Clone)]
pub struct PhysField {
    grid: Arc<Grid>,
    vals: Vec<f64>,
}

/// A two-component vector field (velocity).
#[derive(Clone)]
pub struct VectorField {
    pub x: SpectralField,
    pub y: SpectralField,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid: grid.clone(), coeffs }
    }

    /// Forward-transform a physical field.
    pub fn from_phys(phys: &PhysField) -> Self {
        let grid = phys.grid.clone();
        let mut data: Vec<Complex64> =
            phys.vals.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        grid.fft().forward(&mut data);
        SpectralField { grid, coeffs: data }
    }

    /// Build from a closure over physical coordinates `(x, y)`.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_phys(&PhysField::from_fn(grid, f))
    }

    /// Inverse transform; imaginary residue from round-off is discarded.
    pub fn to_phys(&self) -> PhysField {
        let mut data = self.coeffs.clone();
        self.grid.fft().inverse(&mut data);
        PhysField {
            grid: self.grid.clone(),
            vals: data.iter().map(|c| c.re).collect(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Mean value of the physical field (the zero Fourier coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn set_zero_mode(&mut self, c: Complex64) {
        self.coeffs[0] = c;
    }

    /// Copy with the zero mode removed.
    pub fn zero_mean_part(&self) -> SpectralField {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::default();
        out
    }

    /// L^2 norm over the box via Parseval: `L * sqrt(sum |c_k|^2)`.
    pub fn l2_norm(&self) -> f64 {
        self.grid.box_length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// L^2 inner product `<f, g> = L^2 * Re sum f_k conj(g_k)`.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.check_grid(other)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        Ok(s * self.grid.box_length() * self.grid.box_length())
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.coeffs {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &SpectralField) {
        debug_assert!(self.grid.same_as(&other.grid));
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Largest Hermitian-symmetry defect relative to the coefficient scale.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0_f64;
        for iy in 0..n {
            for ix in 0..n {
                let jx = (n - ix) % n;
                let jy = (n - iy) % n;
                let a = self.coeffs[iy * n + ix];
                let b = self.coeffs[jy * n + jx].conj();
                worst = worst.max((a - b).norm());
            }
        }
        worst / scale
    }

    /// Symmetrize coefficients so the physical field is exactly real.
    pub fn enforce_hermitian(&mut self) {
        let n = self.grid.n();
        for iy in 0..n {
            for ix in 0..n {
                let jx = (n - ix) % n;
                let jy = (n - iy) % n;
                let (i, j) = (iy * n + ix, jy * n + jx);
                if i < j {
                    let avg = 0.5 * (self.coeffs[i] + self.coeffs[j].conj());
                    self.coeffs[i] = avg;
                    self.coeffs[j] = avg.conj();
                } else if i == j {
                    self.coeffs[i] = Complex64::new(self.coeffs[i].re, 0.0);
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(FbsqError::GridMismatch)
        }
    }
}

impl PhysField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        PhysField { grid: grid.clone(), vals: vec![0.0; grid.len()] }
    }

    pub fn from_vals(grid: &Arc<Grid>, vals: Vec<f64>) -> Self {
        assert_eq!(vals.len(), grid.len());
        PhysField { grid: grid.clone(), vals }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let dx = grid.dx();
        let vals = (0..grid.len())
            .map(|idx| f((idx % n) as f64 * dx, (idx / n) as f64 * dx))
            .collect();
        PhysField { grid: grid.clone(), vals }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn vals_mut(&mut self) -> &mut [f64] {
        &mut self.vals
    }

    /// Pointwise product, the nonlinear building block.
    pub fn mul(&self, other: &PhysField) -> PhysField {
        debug_assert!(self.grid.same_as(&other.grid));
        PhysField {
            grid: self.grid.clone(),
            vals: self.vals.iter().zip(&other.vals).map(|(a, b)| a * b).collect(),
        }
    }

    /// Discrete L^p norm by uniform-grid quadrature; `p = inf` is the grid max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        }
        assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
        let w = self.grid.cell_area();
        let s: f64 = self.vals.iter().map(|v| v.abs().powf(p)).sum();
        (s * w).powf(1.0 / p)
    }

    pub fn min(&self) -> f64 {
        self.vals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl VectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        VectorField { x: SpectralField::zeros(grid), y: SpectralField::zeros(grid) }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.x.grid()
    }

    pub fn l2_norm(&self) -> f64 {
        let sx: f64 = self.x.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let sy: f64 = self.y.coeffs().iter().map(|c| c.norm_sqr()).sum();
        self.x.grid().box_length() * (sx + sy).sqrt()
    }

    pub fn axpy(&mut self, c: f64, other: &VectorField) {
        self.x.axpy(c, &other.x);
        self.y.axpy(c, &other.y);
    }

    pub fn scaled(&self, c: f64) -> VectorField {
        VectorField { x: self.x.scaled(c), y: self.y.scaled(c) }
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField { x: self.x.sub(&other.x), y: self.y.sub(&other.y) }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}
