//! Quantization of midpoint-sampled symbols.
//!
//! In frequency space the operator has matrix elements
//! A_hat(eta', eta) = c_{eta'-eta}((xi_eta + xi_eta')/2), where c_k(xi) are
//! the x-mode coefficients of the symbol row at xi. Pair midpoints land on
//! the half-step lattice exactly, so the lookup is exact; pairs that would
//! leave the frequency band are dropped rather than wrapped. Truncation makes
//! real symbols exactly self-adjoint and the adjoint exactly the conjugate
//! symbol's operator; the price is that x-only symbols deviate from pointwise
//! multiplication in the outermost frequencies.
//!
//! Normalization: a == 1 is the identity and a = a(xi) the exact Fourier
//! multiplier.
//!
//! Two application routes are kept deliberately independent:
//! - dense: the frequency matrix is materialized entry by entry and
//!   transformed to an x-space kernel,
//! - fft: each retained x-mode acts as one band-masked multiplier followed by
//!   a modulation, never materializing a matrix.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::grid::{fft_nd, fourier_forward, fourier_inverse, GridField, PeriodicGrid};
use crate::symbols::SampledSymbol;
use crate::weyl::LinOp;

/// Relative floor below which x-modes of the symbol are dropped.
pub const MODE_THRESHOLD: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApplyPath {
    Dense,
    Fft,
}

struct Mode {
    /// e^{i k~ . x_j} over grid points, applied to the output.
    phase: Array1<C64>,
    /// c_{k~}(xi_eta + k~/2) over the frequency lattice, zero where eta + k~
    /// leaves the band.
    coeff: Array1<C64>,
}

pub struct QuantizedOperator {
    grid: PeriodicGrid,
    symbol: SampledSymbol,
    path: ApplyPath,
    modes: Vec<Mode>,
    adj_modes: Vec<Mode>,
    kernel: OnceLock<Array2<C64>>,
}

/// Path choice when not forced: dense kernels are affordable in one
/// dimension, higher dimensions go through the mode expansion.
fn default_path(grid: &PeriodicGrid) -> ApplyPath {
    if grid.dim() == 1 {
        ApplyPath::Dense
    } else {
        ApplyPath::Fft
    }
}

pub fn quantize(symbol: &SampledSymbol) -> QuantizedOperator {
    quantize_with_path(symbol, default_path(symbol.grid()))
}

pub fn quantize_with_path(symbol: &SampledSymbol, path: ApplyPath) -> QuantizedOperator {
    let grid = symbol.grid().clone();
    let (modes, adj_modes) = if path == ApplyPath::Fft {
        (build_modes(symbol), build_modes(&symbol.conj()))
    } else {
        (vec![], vec![])
    };
    QuantizedOperator { grid, symbol: symbol.clone(), path, modes, adj_modes, kernel: OnceLock::new() }
}

impl QuantizedOperator {
    pub fn symbol(&self) -> &SampledSymbol {
        &self.symbol
    }

    pub fn path(&self) -> ApplyPath {
        self.path
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn kernel(&self) -> &Array2<C64> {
        self.kernel.get_or_init(|| assemble_kernel(&self.symbol))
    }

    pub fn apply_dense(&self, u: &Array1<C64>) -> Array1<C64> {
        self.kernel().dot(u)
    }

    pub fn apply_fft(&self, u: &Array1<C64>) -> Array1<C64> {
        assert_eq!(
            self.path,
            ApplyPath::Fft,
            "fft application requested on a dense-path operator"
        );
        apply_modes(&self.grid, &self.modes, u)
    }
}

impl LinOp for QuantizedOperator {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        match self.path {
            ApplyPath::Dense => self.apply_dense(u),
            ApplyPath::Fft => apply_modes(&self.grid, &self.modes, u),
        }
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        match self.path {
            ApplyPath::Dense => {
                let k = self.kernel();
                let mut out = Array1::<C64>::default(u.len());
                for (j, row) in k.rows().into_iter().enumerate() {
                    let uj = u[j];
                    for (i, a) in row.iter().enumerate() {
                        out[i] += a.conj() * uj;
                    }
                }
                out
            }
            ApplyPath::Fft => apply_modes(&self.grid, &self.adj_modes, u),
        }
    }

    fn dense(&self) -> Array2<C64> {
        self.kernel().clone()
    }
}

fn signed_of(k: usize, size: usize) -> isize {
    if k < size / 2 {
        k as isize
    } else {
        k as isize - size as isize
    }
}

/// x-mode coefficients of the symbol: a(mu, nu) = sum_{k~} c[(k~, nu)]
/// e^{2 pi i k~.mu/(2N)} with k~ over the doubled lattice in FFT order.
fn midpoint_mode_coeffs(symbol: &SampledSymbol) -> Array2<C64> {
    let grid = symbol.grid();
    let dim = grid.dim();
    let m2 = 2 * grid.points();
    let mtot = grid.midpoint_total();
    let htot = grid.half_freq_total();
    // fft_nd is unitary; the extra 1/(2N)^{n/2} makes these plain Fourier
    // coefficients.
    let scale = (mtot as f64).sqrt().recip();
    let mut cmat = Array2::<C64>::default((mtot, htot));
    let mut col = vec![C64::default(); mtot];
    for f in 0..htot {
        for m in 0..mtot {
            col[m] = symbol.values()[(m, f)];
        }
        fft_nd(&mut col, dim, m2, true);
        for m in 0..mtot {
            cmat[(m, f)] = col[m] * scale;
        }
    }
    cmat
}

/// Frequency matrix A_hat(r, c) = c_{s(r)-s(c)} at the pair midpoint, then
/// K = F^H A_hat F by an inverse transform down each column and a forward
/// transform across each row. Both pair ends sit inside the band, so the
/// midpoint index 2s(c) + (s(r)-s(c)) never leaves the stored lattice.
fn assemble_kernel(symbol: &SampledSymbol) -> Array2<C64> {
    let grid = symbol.grid();
    let dim = grid.dim();
    let n = grid.points();
    let m2 = 2 * n;
    let total = grid.total();
    let cmat = midpoint_mode_coeffs(symbol);
    let signed: Vec<Vec<isize>> = (0..total)
        .map(|f| grid.unflatten(f).iter().map(|&k| signed_of(k, n)).collect())
        .collect();
    let wrap = |v: isize| -> usize {
        if v < 0 {
            (v + m2 as isize) as usize
        } else {
            v as usize
        }
    };
    let mut mat = Array2::<C64>::default((total, total));
    let mut kidx = vec![0usize; dim];
    let mut nidx = vec![0usize; dim];
    for r in 0..total {
        for c in 0..total {
            for d in 0..dim {
                kidx[d] = wrap(signed[r][d] - signed[c][d]);
                nidx[d] = wrap(signed[r][d] + signed[c][d]);
            }
            mat[(r, c)] = cmat[(grid.flatten_mid(&kidx), grid.flatten_mid(&nidx))];
        }
    }
    let mut line = vec![C64::default(); total];
    for c in 0..total {
        for r in 0..total {
            line[r] = mat[(r, c)];
        }
        fft_nd(&mut line, dim, n, false);
        for r in 0..total {
            mat[(r, c)] = line[r];
        }
    }
    for r in 0..total {
        for c in 0..total {
            line[c] = mat[(r, c)];
        }
        fft_nd(&mut line, dim, n, true);
        for c in 0..total {
            mat[(r, c)] = line[c];
        }
    }
    mat
}

/// One multiplier-plus-modulation factor per retained x-mode: mode k~ maps
/// the eta component to c_{k~}(xi_eta + k~/2) at frequency eta + k~, dropped
/// when eta + k~ leaves the band.
fn build_modes(symbol: &SampledSymbol) -> Vec<Mode> {
    let grid = symbol.grid();
    let dim = grid.dim();
    let n = grid.points();
    let m2 = 2 * n;
    let mtot = grid.midpoint_total();
    let total = grid.total();
    let cmat = midpoint_mode_coeffs(symbol);
    let global_max = cmat.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = MODE_THRESHOLD * global_max;
    let half = (n / 2) as isize;
    let signed: Vec<Vec<isize>> = (0..total)
        .map(|f| grid.unflatten(f).iter().map(|&k| signed_of(k, n)).collect())
        .collect();
    let mut modes = vec![];
    let mut nidx = vec![0usize; dim];
    for kt in 0..mtot {
        let row_max = cmat.row(kt).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if row_max <= floor {
            continue;
        }
        let kvec: Vec<isize> =
            grid.unflatten_mid(kt).iter().map(|&i| signed_of(i, m2)).collect();
        let mut coeff = Array1::<C64>::default(total);
        'freq: for (eta, slot) in coeff.iter_mut().enumerate() {
            for d in 0..dim {
                let s_out = signed[eta][d] + kvec[d];
                if s_out < -half || s_out >= half {
                    continue 'freq;
                }
                let nu = 2 * signed[eta][d] + kvec[d];
                nidx[d] = if nu < 0 { (nu + m2 as isize) as usize } else { nu as usize };
            }
            *slot = cmat[(kt, grid.flatten_mid(&nidx))];
        }
        let phase = Array1::from_shape_fn(total, |j| {
            let jd = grid.unflatten(j);
            let arg: f64 = kvec
                .iter()
                .zip(jd.iter())
                .map(|(&k, &ji)| TAU * k as f64 * ji as f64 / n as f64)
                .sum();
            C64::from_polar(1.0, arg)
        });
        modes.push(Mode { phase, coeff });
    }
    modes
}

fn apply_modes(grid: &PeriodicGrid, modes: &[Mode], u: &Array1<C64>) -> Array1<C64> {
    let uf = GridField::from_values(grid, u.clone()).expect("length matches grid");
    let uhat = fourier_forward(&uf);
    let mut acc = Array1::<C64>::default(u.len());
    for mode in modes {
        let vhat = uhat.values() * &mode.coeff;
        let vf = GridField::from_values(grid, vhat).expect("length matches grid");
        let w = fourier_inverse(&vf);
        acc = acc + &(w.into_values() * &mode.phase);
    }
    acc
}

/// Left quantization a(x_j, xi): K(j,l) = (1/N^n) sum_xi a(x_j,xi)
/// e^{i(x_j-x_l).xi} over the integer lattice. Consumes the same
/// midpoint-sampled symbol, reading the even midpoint rows (mu = 2j) and the
/// even frequency columns (nu = 2 eta).
pub struct LeftQuantizedOperator {
    grid: PeriodicGrid,
    /// a(x_j, xi) over (grid point, frequency).
    rows: Array2<C64>,
    kernel: OnceLock<Array2<C64>>,
}

pub fn quantize_left(symbol: &SampledSymbol) -> LeftQuantizedOperator {
    let grid = symbol.grid().clone();
    let total = grid.total();
    let rows = Array2::from_shape_fn((total, total), |(j, k)| {
        let jd = grid.unflatten(j);
        let even: Vec<usize> = jd.iter().map(|&v| 2 * v).collect();
        symbol.values()[(grid.flatten_mid(&even), grid.double_freq_index(k))]
    });
    LeftQuantizedOperator { grid, rows, kernel: OnceLock::new() }
}

impl LeftQuantizedOperator {
    pub fn kernel(&self) -> &Array2<C64> {
        self.kernel.get_or_init(|| {
            let grid = &self.grid;
            let dim = grid.dim();
            let n = grid.points();
            let total = grid.total();
            let scale = (total as f64).sqrt().recip();
            let digits: Vec<Vec<usize>> = (0..total).map(|f| grid.unflatten(f)).collect();
            let mut kernel = Array2::<C64>::default((total, total));
            let mut row = vec![C64::default(); total];
            let mut didx = vec![0usize; dim];
            for j in 0..total {
                for (k, slot) in row.iter_mut().enumerate() {
                    *slot = self.rows[(j, k)];
                }
                fft_nd(&mut row, dim, n, false);
                for l in 0..total {
                    for d in 0..dim {
                        didx[d] = (digits[j][d] + n - digits[l][d]) % n;
                    }
                    kernel[(j, l)] = row[grid.flatten(&didx)] * scale;
                }
            }
            kernel
        })
    }
}

impl LinOp for LeftQuantizedOperator {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// (Au)(j) = row_j . (u_hat weights): one FFT then a diagonal extraction
    /// of per-point multiplier actions.
    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        let grid = &self.grid;
        let total = grid.total();
        let uf = GridField::from_values(grid, u.clone()).expect("length matches grid");
        let uhat = fourier_forward(&uf).into_values();
        let scale = (total as f64).sqrt().recip();
        let mut out = Array1::<C64>::default(total);
        for j in 0..total {
            let x = grid.coords(j);
            let mut acc = C64::default();
            for k in 0..total {
                let xi = grid.freq_coords(k);
                let arg: f64 = x.iter().zip(xi.iter()).map(|(&a, &b)| a * b).sum();
                acc += self.rows[(j, k)] * uhat[k] * C64::from_polar(1.0, arg);
            }
            out[j] = acc * scale;
        }
        out
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        let k = self.kernel();
        let mut out = Array1::<C64>::default(u.len());
        for (j, row) in k.rows().into_iter().enumerate() {
            let uj = u[j];
            for (i, a) in row.iter().enumerate() {
                out[i] += a.conj() * uj;
            }
        }
        out
    }

    fn dense(&self) -> Array2<C64> {
        self.kernel().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{sample, SymbolFunction, TrigTerm};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random_vec(n: usize, seed: u64) -> Array1<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array1::from_shape_fn(n, |_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    /// Random vector with the outermost `margin` frequencies on each side of
    /// the band removed.
    fn random_vec_interior(grid: &PeriodicGrid, seed: u64, margin: usize) -> Array1<C64> {
        let n = grid.points();
        let u = GridField::from_values(grid, random_vec(grid.total(), seed)).unwrap();
        let mut hat = fourier_forward(&u);
        for (k, v) in hat.values_mut().iter_mut().enumerate() {
            let s = signed_of(k, n);
            if s >= (n / 2 - margin) as isize || s < -((n / 2 - margin) as isize) {
                *v = C64::default();
            }
        }
        fourier_inverse(&hat).into_values()
    }

    fn curved(grid: &PeriodicGrid) -> SampledSymbol {
        let q = SymbolFunction::trig_poly(
            2.0,
            vec![
                TrigTerm::new(C64::new(1.0, 0.0), vec![0], vec![2]),
                TrigTerm::new(C64::new(0.25, 0.0), vec![1], vec![2]),
                TrigTerm::new(C64::new(0.25, 0.0), vec![-1], vec![2]),
                TrigTerm::new(C64::new(0.5, 0.0), vec![1], vec![1]),
                TrigTerm::new(C64::new(-0.5, 0.0), vec![-1], vec![1]),
            ],
        );
        sample(&q, 0.0, grid).unwrap()
    }

    #[test]
    fn constant_symbol_is_identity() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let one = SampledSymbol::from_fn(&g, |_, _| C64::new(1.0, 0.0));
        for path in [ApplyPath::Dense, ApplyPath::Fft] {
            let op = quantize_with_path(&one, path);
            let u = random_vec(16, 5);
            let v = op.apply_vec(&u);
            for (a, b) in u.iter().zip(v.iter()) {
                assert!((a - b).norm() < 1e-12, "{path:?}");
            }
        }
    }

    #[test]
    fn multiplier_symbol_acts_diagonally_in_fourier() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = SampledSymbol::from_fn(&g, |_, xi| C64::new((-0.3 * xi[0] * xi[0]).exp(), 0.0));
        for path in [ApplyPath::Dense, ApplyPath::Fft] {
            let op = quantize_with_path(&s, path);
            // Mode e^{i 3 x}.
            let u = Array1::from_shape_fn(16, |j| C64::from_polar(1.0, 3.0 * g.x(j)));
            let v = op.apply_vec(&u);
            let want = (-0.3f64 * 9.0).exp();
            for (j, vj) in v.iter().enumerate() {
                assert!((vj - u[j] * want).norm() < 1e-12, "{path:?} at {j}");
            }
        }
    }

    #[test]
    fn x_only_symbol_multiplies_pointwise_inside_the_band() {
        // Truncation touches only frequencies within one wave number of the
        // band edge; off those, multiplication by a(x) is exact.
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = SampledSymbol::from_fn(&g, |x, _| C64::new(1.0 + 0.5 * x[0].sin(), 0.0));
        let op = quantize(&s);
        let u = random_vec_interior(&g, 7, 1);
        let v = op.apply_vec(&u);
        for j in 0..16 {
            let want = u[j] * (1.0 + 0.5 * g.x(j).sin());
            assert!((v[j] - want).norm() < 1e-11);
        }
    }

    #[test]
    fn plane_wave_symbol_shifts_frequency_and_samples_the_midpoint() {
        // a = e^{i x} xi sends e^{i eta x} to (eta + 1/2) e^{i (eta+1) x}.
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = SampledSymbol::from_fn(&g, |x, xi| C64::from_polar(1.0, x[0]) * xi[0]);
        for path in [ApplyPath::Dense, ApplyPath::Fft] {
            let op = quantize_with_path(&s, path);
            for eta in [-5i32, 0, 3] {
                let u = Array1::from_shape_fn(16, |j| C64::from_polar(1.0, eta as f64 * g.x(j)));
                let v = op.apply_vec(&u);
                let want = Array1::from_shape_fn(16, |j| {
                    C64::from_polar(1.0, (eta as f64 + 1.0) * g.x(j)) * (eta as f64 + 0.5)
                });
                for (a, b) in v.iter().zip(want.iter()) {
                    assert!((a - b).norm() < 1e-11, "{path:?} eta {eta}");
                }
            }
        }
    }

    #[test]
    fn plane_wave_composition_matches_the_twisted_product() {
        // (e^{ix} xi) o (e^{ix}) = quantize(e^{2ix} (xi + 1/2)) away from the
        // band edge: composing shifts the second factor's argument by half a
        // wave number.
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let a = SampledSymbol::from_fn(&g, |x, xi| C64::from_polar(1.0, x[0]) * xi[0]);
        let b = SampledSymbol::from_fn(&g, |x, _| C64::from_polar(1.0, x[0]));
        let ab = SampledSymbol::from_fn(&g, |x, xi| {
            C64::from_polar(1.0, 2.0 * x[0]) * (xi[0] + 0.5)
        });
        let op_a = quantize(&a);
        let op_b = quantize(&b);
        let op_ab = quantize(&ab);
        for eta in [-4i32, -1, 0, 2, 5] {
            let u = Array1::from_shape_fn(16, |j| C64::from_polar(1.0, eta as f64 * g.x(j)));
            let composed = op_a.apply_vec(&op_b.apply_vec(&u));
            let direct = op_ab.apply_vec(&u);
            for (x, y) in composed.iter().zip(direct.iter()) {
                assert!((x - y).norm() < 1e-11, "eta {eta}");
            }
        }
    }

    #[test]
    fn dense_and_fft_paths_agree() {
        for n in [8usize, 16, 32] {
            let g = PeriodicGrid::unit(1, n).unwrap();
            let s = curved(&g);
            let dense = quantize_with_path(&s, ApplyPath::Dense);
            let fft = quantize_with_path(&s, ApplyPath::Fft);
            let u = random_vec(n, 11);
            let a = dense.apply_vec(&u);
            let b = fft.apply_vec(&u);
            let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).norm() < 1e-10 * scale.max(1.0), "n={n}");
            }
            let aa = dense.adjoint_apply_vec(&u);
            let ab = fft.adjoint_apply_vec(&u);
            for (x, y) in aa.iter().zip(ab.iter()) {
                assert!((x - y).norm() < 1e-10 * scale.max(1.0), "adjoint n={n}");
            }
        }
    }

    #[test]
    fn paths_agree_in_two_dimensions() {
        let g = PeriodicGrid::unit(2, 8).unwrap();
        let sym = SymbolFunction::trig_poly(
            2.0,
            vec![
                TrigTerm::new(C64::new(1.0, 0.0), vec![0, 0], vec![2, 0]),
                TrigTerm::new(C64::new(1.0, 0.0), vec![0, 0], vec![0, 2]),
                TrigTerm::new(C64::new(0.3, 0.1), vec![1, -1], vec![1, 1]),
                TrigTerm::new(C64::new(0.3, -0.1), vec![-1, 1], vec![1, 1]),
            ],
        );
        let s = sample(&sym, 0.0, &g).unwrap();
        let dense = quantize_with_path(&s, ApplyPath::Dense);
        let fft = quantize_with_path(&s, ApplyPath::Fft);
        let u = random_vec(64, 13);
        let a = dense.apply_vec(&u);
        let b = fft.apply_vec(&u);
        let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() < 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn real_symbol_gives_hermitian_kernel() {
        let g = PeriodicGrid::unit(1, 32).unwrap();
        let s = SampledSymbol::from_fn(&g, |x, xi| {
            C64::new((1.0 + 0.5 * x[0].cos()) * xi[0] * xi[0] + x[0].sin(), 0.0)
        });
        let op = quantize(&s);
        let k = op.kernel();
        let scale = k.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for i in 0..32 {
            for j in 0..32 {
                assert!((k[(i, j)] - k[(j, i)].conj()).norm() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn adjoint_equals_conjugate_symbol_quantization() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = curved(&g);
        let op = quantize_with_path(&s, ApplyPath::Fft);
        let conj_op = quantize_with_path(&s.conj(), ApplyPath::Fft);
        let u = random_vec(16, 17);
        let a = op.adjoint_apply_vec(&u);
        let b = conj_op.apply_vec(&u);
        let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() < 1e-11 * scale.max(1.0));
        }
    }

    #[test]
    fn inner_product_adjoint_identity() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = curved(&g);
        let op = quantize(&s);
        let u = GridField::from_values(&g, random_vec(16, 19)).unwrap();
        let v = GridField::from_values(&g, random_vec(16, 23)).unwrap();
        let au = op.apply(&u).unwrap();
        let atv = op.adjoint_apply(&v).unwrap();
        let lhs = au.inner(&v).unwrap();
        let rhs = u.inner(&atv).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn left_quantization_of_x_symbol_is_pointwise() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = SampledSymbol::from_fn(&g, |x, _| C64::new(0.3 + x[0].cos(), 0.0));
        let op = quantize_left(&s);
        let u = random_vec(16, 29);
        let v = op.apply_vec(&u);
        for j in 0..16 {
            let want = u[j] * (0.3 + g.x(j).cos());
            assert!((v[j] - want).norm() < 1e-11);
        }
    }

    #[test]
    fn left_quantization_coefficient_times_derivative() {
        // a(x, xi) = c(x) xi^2 acts as c(x) * (spectral second derivative).
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = SampledSymbol::from_fn(&g, |x, xi| {
            C64::new((1.0 + 0.5 * x[0].cos()) * xi[0] * xi[0], 0.0)
        });
        let op = quantize_left(&s);
        // u = e^{i 2 x}: D^2 u = 4 u.
        let u = Array1::from_shape_fn(16, |j| C64::from_polar(1.0, 2.0 * g.x(j)));
        let v = op.apply_vec(&u);
        for j in 0..16 {
            let want = u[j] * 4.0 * (1.0 + 0.5 * g.x(j).cos());
            assert!((v[j] - want).norm() < 1e-11);
        }
        // Direct apply agrees with kernel matvec.
        let w = random_vec(16, 31);
        let k = op.dense();
        let via_kernel = k.dot(&w);
        let direct = op.apply_vec(&w);
        for (x, y) in via_kernel.iter().zip(direct.iter()) {
            assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn composed_quantized_chain_applies() {
        let g = PeriodicGrid::unit(1, 16).unwrap();
        let s = curved(&g);
        let op: Arc<dyn LinOp> = Arc::new(quantize(&s));
        let chain = crate::weyl::ComposedOp::new(vec![op.clone(), op]).unwrap();
        let u = random_vec(16, 37);
        let once = quantize(&s).apply_vec(&quantize(&s).apply_vec(&u));
        let twice = chain.apply_vec(&u);
        for (x, y) in once.iter().zip(twice.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
