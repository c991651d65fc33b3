//! Periodic N x N grid and its wavenumber bookkeeping.
//!
//! Wavevectors come in two unit systems:
//! * integer "mode units" `m` (multiples of the fundamental `2*pi/L`), used by
//!   the dyadic (Littlewood-Paley) machinery so shell indices are
//!   grid-independent;
//! * physical units `k = m * 2*pi/L`, used by differential operators and
//!   Sobolev norms.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::fft::Fft2;

/// Periodic grid: `n` modes per axis on the box `[0, L]^2`.
pub struct Grid {
    n: usize,
    l: f64,
    /// Signed integer frequency for each FFT index: 0, 1, .., n/2, -n/2+1, .., -1.
    modes: Vec<i32>,
    /// Dealias cutoff in mode units: modes with max(|mx|, |my|) > cutoff are
    /// zeroed by the 2/3 rule.
    dealias_cutoff: i32,
    fft: Fft2,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("l", &self.l)
            .field("dealias_cutoff", &self.dealias_cutoff)
            .finish()
    }
}

impl Grid {
    /// Build a grid with `n` modes per axis (power of two, >= 16) on `[0, L]^2`.
    ///
    /// Panics on invalid sizes; grid construction is configuration, not data.
    pub fn new(n: usize, l: f64) -> Arc<Self> {
        assert!(n >= 16 && n.is_power_of_two(), "N must be a power of two >= 16, got {n}");
        assert!(l > 0.0 && l.is_finite(), "box length must be positive, got {l}");
        let modes = (0..n)
            .map(|i| if i <= n / 2 { i as i32 } else { i as i32 - n as i32 })
            .collect();
        Arc::new(Grid {
            n,
            l,
            modes,
            dealias_cutoff: (n as i32) / 3,
            fft: Fft2::new(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of lattice sites, N^2 (never zero).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn box_length(&self) -> f64 {
        self.l
    }

    /// Grid spacing `L / N`.
    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Fundamental wavenumber `2*pi/L`.
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.l
    }

    /// Quadrature weight of one grid cell, `(L/N)^2`.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    pub fn dealias_cutoff(&self) -> i32 {
        self.dealias_cutoff
    }

    /// Signed integer frequency along one axis for FFT index `i`.
    #[inline]
    pub fn mode(&self, i: usize) -> i32 {
        self.modes[i]
    }

    /// Integer frequency pair for the flat index `idx = iy * n + ix`.
    #[inline]
    pub fn mode_pair(&self, idx: usize) -> (i32, i32) {
        (self.modes[idx % self.n], self.modes[idx / self.n])
    }

    /// Physical wavevector for the flat index.
    #[inline]
    pub fn k_pair(&self, idx: usize) -> (f64, f64) {
        let (mx, my) = self.mode_pair(idx);
        let k0 = self.k0();
        (mx as f64 * k0, my as f64 * k0)
    }

    /// |m| in mode units for the flat index.
    #[inline]
    pub fn mode_abs(&self, idx: usize) -> f64 {
        let (mx, my) = self.mode_pair(idx);
        ((mx as f64) * (mx as f64) + (my as f64) * (my as f64)).sqrt()
    }

    /// |k| in physical units for the flat index.
    #[inline]
    pub fn k_abs(&self, idx: usize) -> f64 {
        self.mode_abs(idx) * self.k0()
    }

    /// Largest surviving |k| (physical) after dealiasing, attained at a corner
    /// of the retained square.
    pub fn k_max(&self) -> f64 {
        let c = self.dealias_cutoff as f64;
        c * std::f64::consts::SQRT_2 * self.k0()
    }

    /// True when the flat index survives the 2/3 dealias rule.
    #[inline]
    pub fn below_cutoff(&self, idx: usize) -> bool {
        let (mx, my) = self.mode_pair(idx);
        mx.abs() <= self.dealias_cutoff && my.abs() <= self.dealias_cutoff
    }

    pub(crate) fn fft(&self) -> &Fft2 {
        &self.fft
    }

    /// Flat index of the mode `(mx, my)` given in signed integer units.
    pub fn index_of_mode(&self, mx: i32, my: i32) -> usize {
        let n = self.n as i32;
        debug_assert!(mx > -n / 2 && mx <= n / 2 && my > -n / 2 && my <= n / 2);
        let ix = mx.rem_euclid(n) as usize;
        let iy = my.rem_euclid(n) as usize;
        iy * self.n + ix
    }

    /// Grids are interchangeable when their parameters match (plans are
    /// internal); used to validate binary operations.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.l == other.l
    }
}
