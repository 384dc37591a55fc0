//! Truncated Weyl composition and amplitude-to-Weyl conversion.
//!
//! a # b = sum_j (1/j!)(i/2)^j Lambda^j (a tensor b)|_diag with
//! Lambda = <d_x, d_eta> - <d_xi, d_y>. The j = 1 term is (1/2i){a, b}.

use ndarray::{Array2, Array3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{fft_nd, PeriodicGrid};
use crate::symbols::{fd4_line, SampledSymbol};

/// Composition truncated after the j = terms term (terms <= 3).
pub fn moyal_compose(a: &SampledSymbol, b: &SampledSymbol, terms: usize) -> Result<SampledSymbol> {
    if terms > 3 {
        return Err(Error::Invalid(format!("composition truncation j = {terms} exceeds 3")));
    }
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch("composition of symbols on different grids".into()));
    }
    let mut acc = a.mul(b)?;
    let mut fact = 1.0;
    for j in 1..=terms {
        fact *= j as f64;
        let half_i = C64::new(0.0, 0.5).powu(j as u32);
        let power = symplectic_power(a, b, j)?;
        acc = acc.add(&power.scale(half_i / fact))?;
    }
    Ok(acc)
}

/// Lambda^j (a tensor b)|_diag expanded over words (A - B)^j, A pairing
/// d_x(a) with d_xi(b), B pairing d_xi(a) with d_x(b); the axis sum runs over
/// the full tuple space so each word with k B-letters contributes the same
/// array, giving binomial weights.
fn symplectic_power(a: &SampledSymbol, b: &SampledSymbol, j: usize) -> Result<SampledSymbol> {
    let dim = a.grid().dim();
    let shape = (a.grid().midpoint_total(), a.grid().half_freq_total());
    let mut acc = SampledSymbol::from_values(a.grid(), Array2::default(shape))?;
    let mut tuple = vec![0usize; j];
    loop {
        for kb in 0..=j {
            let coeff = binom(j, kb) * if kb % 2 == 0 { 1.0 } else { -1.0 };
            let mut da = a.clone();
            let mut db = b.clone();
            for (pos, &axis) in tuple.iter().enumerate() {
                if pos < j - kb {
                    da = da.d_x(axis);
                    db = db.d_xi(axis);
                } else {
                    da = da.d_xi(axis);
                    db = db.d_x(axis);
                }
            }
            acc = acc.add(&da.mul(&db)?.scale(C64::new(coeff, 0.0)))?;
        }
        // Odometer over axis tuples.
        let mut p = 0;
        loop {
            if p == j {
                return Ok(acc);
            }
            tuple[p] += 1;
            if tuple[p] == dim {
                tuple[p] = 0;
                p += 1;
            } else {
                break;
            }
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Amplitude a(x, y, xi) sampled with x, y on the doubled grid and xi on the
/// half-step lattice. One-dimensional only; the cube is dense.
pub struct SampledAmplitude {
    grid: PeriodicGrid,
    values: Array3<C64>,
}

impl SampledAmplitude {
    pub fn from_fn(
        grid: &PeriodicGrid,
        mut f: impl FnMut(f64, f64, f64) -> C64,
    ) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::UnsupportedDim {
                op: "amplitude conversion",
                dim: grid.dim(),
                supported: 1,
            });
        }
        let m2 = grid.midpoint_total();
        let htot = grid.half_freq_total();
        let values = Array3::from_shape_fn((m2, m2, htot), |(i, j, k)| {
            f(grid.midpoint_x(i), grid.midpoint_x(j), grid.half_freq(k))
        });
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array3<C64> {
        &self.values
    }

    /// Spectral derivative along x (axis 0) or y (axis 1).
    fn d_space(&self, axis: usize) -> Self {
        let m2 = self.grid.midpoint_total();
        let ftot = self.grid.half_freq_total();
        let kappa: Vec<f64> = (0..m2)
            .map(|k| {
                let signed = if k < m2 / 2 { k as isize } else { k as isize - m2 as isize };
                std::f64::consts::TAU * signed as f64 / self.grid.len()
            })
            .collect();
        let mut out = self.values.clone();
        let mut line = vec![C64::default(); m2];
        for other in 0..m2 {
            for k in 0..ftot {
                for p in 0..m2 {
                    line[p] = match axis {
                        0 => self.values[(p, other, k)],
                        _ => self.values[(other, p, k)],
                    };
                }
                fft_nd(&mut line, 1, m2, true);
                for (p, v) in line.iter_mut().enumerate() {
                    *v *= C64::new(0.0, kappa[p]);
                }
                fft_nd(&mut line, 1, m2, false);
                for p in 0..m2 {
                    match axis {
                        0 => out[(p, other, k)] = line[p],
                        _ => out[(other, p, k)] = line[p],
                    }
                }
            }
        }
        Self { grid: self.grid.clone(), values: out }
    }

    /// Finite-difference derivative along xi (axis 2), monotone ordering.
    fn d_xi(&self) -> Self {
        let m2 = self.grid.midpoint_total();
        let n = 2 * self.grid.points();
        let dxi = std::f64::consts::PI / self.grid.len();
        let fft_of_pos: Vec<usize> = (0..n).map(|p| (p + n / 2) % n).collect();
        let mut out = self.values.clone();
        let mut line = vec![C64::default(); n];
        let mut dline = vec![C64::default(); n];
        for i in 0..m2 {
            for j in 0..m2 {
                for p in 0..n {
                    line[p] = self.values[(i, j, fft_of_pos[p])];
                }
                fd4_line(&line, &mut dline, dxi);
                for p in 0..n {
                    out[(i, j, fft_of_pos[p])] = dline[p];
                }
            }
        }
        Self { grid: self.grid.clone(), values: out }
    }

    fn diagonal(&self) -> SampledSymbol {
        let m2 = self.grid.midpoint_total();
        let ftot = self.grid.half_freq_total();
        let values = Array2::from_shape_fn((m2, ftot), |(i, k)| self.values[(i, i, k)]);
        SampledSymbol::from_values(&self.grid, values).expect("shape by construction")
    }

    fn sub(&self, other: &Self) -> Self {
        Self { grid: self.grid.clone(), values: &self.values - &other.values }
    }
}

/// Weyl symbol of the amplitude operator, truncated after j = terms
/// (terms <= 2): j=0 is a(x,x,xi), j=1 is (i/2)(d_x - d_y) d_xi a|_{y=x},
/// j=2 is -(1/8)(d_x - d_y)^2 d_xi^2 a|_{y=x}.
pub fn amplitude_to_weyl(amp: &SampledAmplitude, terms: usize) -> Result<SampledSymbol> {
    if terms > 2 {
        return Err(Error::Invalid(format!("amplitude truncation j = {terms} exceeds 2")));
    }
    let mut acc = amp.diagonal();
    if terms >= 1 {
        let diff = amp.d_space(0).sub(&amp.d_space(1)).d_xi();
        acc = acc.add(&diff.diagonal().scale(C64::new(0.0, 0.5)))?;
    }
    if terms >= 2 {
        let d1 = amp.d_space(0).sub(&amp.d_space(1));
        let d2 = d1.d_space(0).sub(&d1.d_space(1)).d_xi().d_xi();
        acc = acc.add(&d2.diagonal().scale(C64::new(-0.125, 0.0)))?;
    }
    Ok(acc)
}
