//! Periodic grids, grid fields, and Sobolev weights.
//!
//! All transforms are unitary: forward and inverse each carry 1/sqrt(N) per
//! axis, so round trips are exact up to rounding and Parseval holds without
//! extra factors. Physical-space norms carry the quadrature weight (L/N)^n.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Uniform periodic grid on [0, L)^n with an even number of points per axis.
///
/// The frequency lattice per axis is {2 pi k / L : k = -N/2 .. N/2-1}, stored
/// in FFT order (0..N/2-1, -N/2..-1). Midpoints (x_j + x_l)/2 live on the
/// doubled grid with spacing L/(2N), and pair midpoints of lattice
/// frequencies (xi + xi')/2 live on the half-step lattice
/// {pi k / L : k = -N .. N-1}, also stored in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicGrid {
    dim: usize,
    points: usize,
    len: f64,
}

impl PeriodicGrid {
    pub fn new(dim: usize, points: usize, len: f64) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidGrid(format!("dim {dim} not in 1..=3")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {points}"
            )));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidGrid(format!("box length {len} not positive")));
        }
        Ok(Self { dim, points, len })
    }

    /// Grid on [0, 2 pi)^n.
    pub fn unit(dim: usize, points: usize) -> Result<Self> {
        Self::new(dim, points, TAU)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn spacing(&self) -> f64 {
        self.len / self.points as f64
    }

    /// Total number of grid nodes.
    pub fn total(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Total number of midpoint nodes ((2N)^n).
    pub fn midpoint_total(&self) -> usize {
        (2 * self.points).pow(self.dim as u32)
    }

    /// Quadrature weight (L/N)^n for physical-space sums.
    pub fn quad_weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Node coordinate along one axis.
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    /// Midpoint-grid coordinate along one axis (spacing L/(2N)).
    pub fn midpoint_x(&self, m: usize) -> f64 {
        m as f64 * self.len / (2.0 * self.points as f64)
    }

    /// Frequency for an FFT-order index along one axis.
    pub fn freq(&self, k: usize) -> f64 {
        let n = self.points;
        let signed = if k < n / 2 { k as isize } else { k as isize - n as isize };
        TAU * signed as f64 / self.len
    }

    /// Largest lattice frequency magnitude per axis (pi N / L).
    pub fn freq_max(&self) -> f64 {
        TAU * (self.points / 2) as f64 / self.len
    }

    /// Per-axis frequency table in FFT order.
    pub fn freq_table(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.freq(k)).collect()
    }

    /// Decode a flat node index into per-axis indices.
    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        decode(flat, self.dim, self.points)
    }

    /// Decode a flat midpoint index into per-axis indices.
    pub fn unflatten_mid(&self, flat: usize) -> Vec<usize> {
        decode(flat, self.dim, 2 * self.points)
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        encode(idx, self.points)
    }

    pub fn flatten_mid(&self, idx: &[usize]) -> usize {
        encode(idx, 2 * self.points)
    }

    /// Node coordinates for a flat index.
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat).iter().map(|&j| self.x(j)).collect()
    }

    /// Midpoint coordinates for a flat midpoint index.
    pub fn midpoint_coords(&self, flat: usize) -> Vec<f64> {
        self.unflatten_mid(flat).iter().map(|&m| self.midpoint_x(m)).collect()
    }

    /// Frequency vector for a flat FFT-order index.
    pub fn freq_coords(&self, flat: usize) -> Vec<f64> {
        decode(flat, self.dim, self.points).iter().map(|&k| self.freq(k)).collect()
    }

    /// |xi|^2 for a flat FFT-order index.
    pub fn freq_norm_sq(&self, flat: usize) -> f64 {
        self.freq_coords(flat).iter().map(|x| x * x).sum()
    }

    /// <xi>^(2s) = (1 + |xi|^2)^s table over the flat frequency lattice.
    pub fn bracket_pow_table(&self, two_s: f64) -> Vec<f64> {
        (0..self.total())
            .map(|k| (1.0 + self.freq_norm_sq(k)).powf(0.5 * two_s))
            .collect()
    }

    /// Number of half-step frequency nodes ((2N)^n, same as midpoint_total).
    pub fn half_freq_total(&self) -> usize {
        self.midpoint_total()
    }

    /// Half-step frequency for an FFT-order index over the doubled lattice:
    /// pi k / L for signed k in [-N, N). Even k recover the integer lattice.
    pub fn half_freq(&self, v: usize) -> f64 {
        let n = self.points;
        let signed = if v < n { v as isize } else { v as isize - 2 * n as isize };
        PI * signed as f64 / self.len
    }

    /// Half-step frequency vector for a flat index over the doubled lattice.
    pub fn half_freq_coords(&self, flat: usize) -> Vec<f64> {
        decode(flat, self.dim, 2 * self.points).iter().map(|&v| self.half_freq(v)).collect()
    }

    /// |xi|^2 on the half-step lattice.
    pub fn half_freq_norm_sq(&self, flat: usize) -> f64 {
        self.half_freq_coords(flat).iter().map(|x| x * x).sum()
    }

    /// Flat half-step index of an integer-lattice frequency. FFT order makes
    /// this per-axis index doubling.
    pub fn double_freq_index(&self, flat: usize) -> usize {
        let idx: Vec<usize> = self.unflatten(flat).iter().map(|&k| 2 * k).collect();
        self.flatten_mid(&idx)
    }
}

fn decode(flat: usize, dim: usize, size: usize) -> Vec<usize> {
    let mut out = vec![0usize; dim];
    let mut rest = flat;
    for d in (0..dim).rev() {
        out[d] = rest % size;
        rest /= size;
    }
    out
}

fn encode(idx: &[usize], size: usize) -> usize {
    idx.iter().fold(0usize, |acc, &i| acc * size + i)
}

/// Complex field sampled on the nodes of a [`PeriodicGrid`] (row-major).
#[derive(Clone, Debug)]
pub struct GridField {
    grid: PeriodicGrid,
    values: Array1<C64>,
}

impl GridField {
    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self { grid: grid.clone(), values: Array1::zeros(grid.total()) }
    }

    pub fn from_values(grid: &PeriodicGrid, values: Array1<C64>) -> Result<Self> {
        if values.len() != grid.total() {
            return Err(Error::GridMismatch(format!(
                "field length {} vs grid size {}",
                values.len(),
                grid.total()
            )));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Sample a function of the node coordinates.
    pub fn from_fn(grid: &PeriodicGrid, mut f: impl FnMut(&[f64]) -> C64) -> Self {
        let values = (0..grid.total()).map(|j| f(&grid.coords(j))).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array1<C64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array1<C64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array1<C64> {
        self.values
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields on different grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { grid: self.grid.clone(), values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { grid: self.grid.clone(), values: &self.values - &other.values })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.mapv(|v| v * c) }
    }

    /// Quadrature inner product (L/N)^n sum u conj(v).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_grid(other)?;
        let s: C64 = self.values.iter().zip(other.values.iter()).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.quad_weight())
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.quad_weight()).sqrt()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_axis(values: &mut [C64], dim: usize, size: usize, axis: usize, forward: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(size)
        } else {
            p.plan_fft_inverse(size)
        }
    });
    // Row-major: stride of `axis` is size^(dim-1-axis).
    let stride = size.pow((dim - 1 - axis) as u32);
    let total = size.pow(dim as u32);
    let mut line = vec![C64::default(); size];
    let blocks = total / (size * stride);
    for b in 0..blocks {
        for off in 0..stride {
            let base = b * size * stride + off;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = values[base + i * stride];
            }
            plan.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                values[base + i * stride] = *v;
            }
        }
    }
}

/// In-place unitary DFT over every axis of a row-major hypercube.
pub(crate) fn fft_nd(values: &mut [C64], dim: usize, size: usize, forward: bool) {
    for axis in 0..dim {
        fft_axis(values, dim, size, axis, forward);
    }
    let scale = (size as f64).powi(dim as i32).sqrt().recip();
    for v in values.iter_mut() {
        *v *= scale;
    }
}

/// Unitary forward transform; coefficients come back in FFT order.
pub fn fourier_forward(field: &GridField) -> GridField {
    let mut values = field.values.to_vec();
    fft_nd(&mut values, field.grid.dim(), field.grid.points(), true);
    GridField { grid: field.grid.clone(), values: Array1::from(values) }
}

/// Unitary inverse transform.
pub fn fourier_inverse(field: &GridField) -> GridField {
    let mut values = field.values.to_vec();
    fft_nd(&mut values, field.grid.dim(), field.grid.points(), false);
    GridField { grid: field.grid.clone(), values: Array1::from(values) }
}

/// Fourier multiplier by <xi>^s = (1 + |xi|^2)^(s/2); physical in, physical out.
pub fn apply_sobolev_weight(field: &GridField, s: f64) -> GridField {
    let mut hat = fourier_forward(field);
    let table = field.grid.bracket_pow_table(s);
    for (v, w) in hat.values.iter_mut().zip(table.iter()) {
        *v *= *w;
    }
    fourier_inverse(&hat)
}

/// H^s norm: (L/N)^(n/2) (sum <xi>^(2s) |u_hat|^2)^(1/2).
pub fn sobolev_norm(field: &GridField, s: f64) -> f64 {
    let hat = fourier_forward(field);
    let table = field.grid.bracket_pow_table(2.0 * s);
    let sum: f64 = hat
        .values
        .iter()
        .zip(table.iter())
        .map(|(v, w)| v.norm_sqr() * w)
        .sum();
    (sum * field.grid.quad_weight()).sqrt()
}

/// Weighted L^2 norm ((L/N)^n sum |u|^2 m)^(1/2); m must be strictly positive.
pub fn weighted_l2_norm(field: &GridField, m: &[f64]) -> Result<f64> {
    if m.len() != field.grid.total() {
        return Err(Error::GridMismatch(format!(
            "weight length {} vs grid size {}",
            m.len(),
            field.grid.total()
        )));
    }
    for (i, &w) in m.iter().enumerate() {
        if !(w > 0.0) {
            return Err(Error::NonPositiveWeight { index: i, value: w });
        }
    }
    let sum: f64 = field
        .values
        .iter()
        .zip(m.iter())
        .map(|(v, w)| v.norm_sqr() * w)
        .sum();
    Ok((sum * field.grid.quad_weight()).sqrt())
}

/// Trigonometric interpolation of a 1-d field at arbitrary points.
pub fn trig_interpolate(field: &GridField, points: &[f64]) -> Result<Vec<C64>> {
    let grid = &field.grid;
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDim { op: "trig_interpolate", dim: grid.dim(), supported: 1 });
    }
    let hat = fourier_forward(field);
    let n = grid.points();
    let scale = (n as f64).sqrt().recip();
    let freqs = grid.freq_table();
    Ok(points
        .iter()
        .map(|&p| {
            let mut acc = C64::default();
            for (k, &xi) in freqs.iter().enumerate() {
                acc += hat.values[k] * C64::from_polar(1.0, xi * p);
            }
            acc * scale
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_shapes() {
        assert!(PeriodicGrid::new(1, 7, TAU).is_err());
        assert!(PeriodicGrid::new(1, 6, TAU).is_err());
        assert!(PeriodicGrid::new(0, 16, TAU).is_err());
        assert!(PeriodicGrid::new(1, 16, -1.0).is_err());
        assert!(PeriodicGrid::new(2, 16, 1.0).is_ok());
    }

    #[test]
    fn frequency_lattice_order() {
        let g = PeriodicGrid::unit(1, 8).unwrap();
        let f: Vec<f64> = g.freq_table();
        assert_eq!(f, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        let g2 = PeriodicGrid::new(1, 8, TAU / 2.0).unwrap();
        assert_eq!(g2.freq(1), 2.0);
    }

    #[test]
    fn half_step_lattice_interleaves_the_frequency_lattice() {
        let g = PeriodicGrid::unit(1, 8).unwrap();
        let f: Vec<f64> = (0..16).map(|v| g.half_freq(v)).collect();
        assert_eq!(
            f,
            vec![
                0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, -4.0, -3.5, -3.0, -2.5, -2.0, -1.5,
                -1.0, -0.5
            ]
        );
        for k in 0..8 {
            assert_eq!(g.half_freq(g.double_freq_index(k)), g.freq(k));
        }
        let g2 = PeriodicGrid::new(2, 8, TAU / 2.0).unwrap();
        let flat = g2.flatten(&[1, 6]);
        assert_eq!(g2.half_freq_coords(g2.double_freq_index(flat)), g2.freq_coords(flat));
    }

    #[test]
    fn forward_of_constant_is_dc_spike() {
        let g = PeriodicGrid::unit(2, 8).unwrap();
        let u = GridField::from_fn(&g, |_| C64::new(1.0, 0.0));
        let hat = fourier_forward(&u);
        assert!((hat.values()[0] - C64::new(8.0, 0.0)).norm() < 1e-12);
        let tail: f64 = hat.values().iter().skip(1).map(|v| v.norm()).sum();
        assert!(tail < 1e-10);
    }

    #[test]
    fn pure_mode_lands_on_its_lattice_site() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let u = GridField::from_fn(&g, |x| C64::from_polar(1.0, 3.0 * x[0]));
        let hat = fourier_forward(&u);
        assert!((hat.values()[3] - C64::new(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sobolev_weight_semigroup() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let u = GridField::from_fn(&g, |x| C64::new((2.0 * x[0]).cos(), x[0].sin()));
        let a = apply_sobolev_weight(&apply_sobolev_weight(&u, 1.25), -0.5);
        let b = apply_sobolev_weight(&u, 0.75);
        let diff = a.sub(&b).unwrap().l2_norm();
        assert!(diff < 1e-12 * u.l2_norm());
    }

    #[test]
    fn weight_zero_is_identity() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let u = GridField::from_fn(&g, |x| C64::new(x[0].cos(), 0.0));
        let w = apply_sobolev_weight(&u, 0.0);
        assert!(w.sub(&u).unwrap().l2_norm() < 1e-13);
    }

    #[test]
    fn sobolev_norm_of_plane_wave() {
        // ||e^{i k x}||_{H^s} = lnag(k)^s sqrt(L) on [0, 2 pi).
        let g = PeriodicGrid::unit(1, 32).unwrap();
        let u = GridField::from_fn(&g, |x| C64::from_polar(1.0, 5.0 * x[0]));
        let s = 1.5;
        let expect = (1.0 + 25.0f64).powf(0.5 * s) * TAU.sqrt();
        assert!((sobolev_norm(&u, s) - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn weighted_norm_rejects_nonpositive() {
        let g = PeriodicGrid::unit(1, 8).unwrap();
        let u = GridField::from_fn(&g, |_| C64::new(1.0, 0.0));
        let mut m = vec![1.0; g.total()];
        m[3] = 0.0;
        assert!(matches!(
            weighted_l2_norm(&u, &m),
            Err(Error::NonPositiveWeight { index: 3, .. })
        ));
        m[3] = 2.0;
        assert!(weighted_l2_norm(&u, &m).is_ok());
    }

    #[test]
    fn interpolation_reproduces_band_limited_values() {
        let g = PeriodicGrid::unit(1, 32).unwrap();
        let f = |x: f64| C64::new((3.0 * x).cos(), (2.0 * x).sin());
        let u = GridField::from_fn(&g, |x| f(x[0]));
        let pts = [0.123, 1.9, 4.56, 6.1];
        let vals = trig_interpolate(&u, &pts).unwrap();
        for (p, v) in pts.iter().zip(vals.iter()) {
            assert!((v - f(*p)).norm() < 1e-12);
        }
    }
}
