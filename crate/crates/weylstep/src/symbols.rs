//! Symbol functions, lattice sampling, and symbol-space calculus.
//!
//! A symbol is a closure (t, x, xi) -> C together with metadata: order,
//! optional real/lower-order split, ellipticity constants, time regularity.
//! Sampling places x on the midpoint grid (doubled resolution) and xi on the
//! half-step frequency lattice: quantization pairs grid frequencies and needs
//! the symbol at their midpoints (xi + xi')/2, which land between integer
//! lattice points whenever xi' - xi is odd.

use std::collections::BTreeMap;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{fft_nd, PeriodicGrid};

pub type EvalFn = Arc<dyn Fn(f64, &[f64], &[f64]) -> C64 + Send + Sync>;
pub type RealEvalFn = Arc<dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync>;
/// (alpha, beta, t, x, xi) -> d_x^alpha d_xi^beta a.
pub type DerivFn = Arc<dyn Fn(&[usize], &[usize], f64, &[f64], &[f64]) -> C64 + Send + Sync>;
/// Scalar time profile w(t).
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Affine time structure q(t) = a + w(t) b, kept alongside the evaluator so
/// integrators can reuse two fixed quantizations instead of resampling the
/// family at every stage. Consumers must still verify it on the lattice.
#[derive(Clone)]
pub(crate) struct AffineParts {
    pub a: Arc<SymbolFunction>,
    pub b: Arc<SymbolFunction>,
    pub w: ProfileFn,
}

/// Declared ellipticity: q2 + Re q1 >= c |xi|^2 for |xi| >= theta.
#[derive(Clone, Copy, Debug)]
pub struct Ellipticity {
    pub c: f64,
    pub theta: f64,
}

#[derive(Clone)]
pub struct SymbolFunction {
    eval: EvalFn,
    order: f64,
    q2: Option<RealEvalFn>,
    q1: Option<EvalFn>,
    elliptic: Option<Ellipticity>,
    holder_alpha: Option<f64>,
    deriv: Option<DerivFn>,
    affine: Option<AffineParts>,
}

impl SymbolFunction {
    pub fn new(order: f64, eval: EvalFn) -> Self {
        Self {
            eval,
            order,
            q2: None,
            q1: None,
            elliptic: None,
            holder_alpha: None,
            deriv: None,
            affine: None,
        }
    }

    pub fn with_split(mut self, q2: RealEvalFn, q1: EvalFn) -> Self {
        self.q2 = Some(q2);
        self.q1 = Some(q1);
        self
    }

    pub fn with_ellipticity(mut self, c: f64, theta: f64) -> Self {
        self.elliptic = Some(Ellipticity { c, theta });
        self
    }

    pub fn with_holder(mut self, alpha: f64) -> Self {
        self.holder_alpha = Some(alpha);
        self
    }

    pub fn with_derivatives(mut self, deriv: DerivFn) -> Self {
        self.deriv = Some(deriv);
        self
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn ellipticity(&self) -> Option<Ellipticity> {
        self.elliptic
    }

    pub fn holder_alpha(&self) -> Option<f64> {
        self.holder_alpha
    }

    pub fn has_derivatives(&self) -> bool {
        self.deriv.is_some()
    }

    pub(crate) fn affine_parts(&self) -> Option<&AffineParts> {
        self.affine.as_ref()
    }

    pub fn eval(&self, t: f64, x: &[f64], xi: &[f64]) -> C64 {
        (self.eval)(t, x, xi)
    }

    /// q2 + Re q1 when a split was declared, else Re of the full symbol.
    pub fn real_part(&self, t: f64, x: &[f64], xi: &[f64]) -> f64 {
        match (&self.q2, &self.q1) {
            (Some(q2), Some(q1)) => q2(t, x, xi) + q1(t, x, xi).re,
            _ => self.eval(t, x, xi).re,
        }
    }

    pub fn derivative(&self, alpha: &[usize], beta: &[usize], t: f64, x: &[f64], xi: &[f64]) -> Option<C64> {
        self.deriv.as_ref().map(|d| d(alpha, beta, t, x, xi))
    }

    /// Symbol depending on xi only.
    pub fn multiplier(order: f64, f: impl Fn(&[f64]) -> C64 + Send + Sync + 'static) -> Self {
        Self::new(order, Arc::new(move |_t, _x, xi| f(xi)))
    }

    /// Sum of terms c e^{i k . x} xi^p with exact derivatives.
    pub fn trig_poly(order: f64, terms: Vec<TrigTerm>) -> Self {
        let terms = Arc::new(terms);
        let t_eval = terms.clone();
        let eval: EvalFn = Arc::new(move |_t, x, xi| {
            t_eval.iter().map(|term| term.eval(x, xi)).sum()
        });
        let t_der = terms.clone();
        let deriv: DerivFn = Arc::new(move |alpha, beta, _t, x, xi| {
            t_der.iter().map(|term| term.derivative(alpha, beta, x, xi)).sum()
        });
        Self::new(order, eval).with_derivatives(deriv)
    }

    /// q(t) = a + w(t) b with declared time regularity alpha. Both parts keep
    /// their own splits if present; a's ellipticity carries over.
    pub fn profile_family(a: SymbolFunction, b: SymbolFunction, w: ProfileFn, alpha: f64) -> Self {
        let order = a.order.max(b.order);
        let (ae, be, wf) = (a.eval.clone(), b.eval.clone(), w.clone());
        let eval: EvalFn = Arc::new(move |t, x, xi| ae(t, x, xi) + wf(t) * be(t, x, xi));
        let mut out = Self::new(order, eval).with_holder(alpha);
        if let (Some(a2), Some(b2)) = (a.q2.clone(), b.q2.clone()) {
            let (a1, b1) = (a.q1.clone().unwrap(), b.q1.clone().unwrap());
            let wf = w.clone();
            let q2: RealEvalFn = Arc::new(move |t, x, xi| a2(t, x, xi) + wf(t) * b2(t, x, xi));
            let wf = w.clone();
            let q1: EvalFn = Arc::new(move |t, x, xi| a1(t, x, xi) + wf(t) * b1(t, x, xi));
            out = out.with_split(q2, q1);
        }
        if let (Some(da), Some(db)) = (a.deriv.clone(), b.deriv.clone()) {
            let wf = w.clone();
            let deriv: DerivFn = Arc::new(move |al, be, t, x, xi| {
                da(al, be, t, x, xi) + wf(t) * db(al, be, t, x, xi)
            });
            out = out.with_derivatives(deriv);
        }
        if let Some(e) = a.elliptic {
            out = out.with_ellipticity(e.c, e.theta);
        }
        out.affine = Some(AffineParts { a: Arc::new(a), b: Arc::new(b), w });
        out
    }

    /// q(t) = a + t^alpha b. Both parts keep their own splits if present.
    pub fn holder_family(a: SymbolFunction, b: SymbolFunction, alpha: f64) -> Self {
        Self::profile_family(a, b, Arc::new(move |t: f64| t.powf(alpha)), alpha)
    }

    /// q(t) = a + g(t) b with g a lacunary cosine ladder of Holder class
    /// alpha: g(t) = sum_{j<=levels} c_j cos(2 pi 2^j t / period) with
    /// c_j = 2^(-j alpha), except that the top level carries the closed tail
    /// 2^(-J alpha) / (1 - 2^(-alpha)) of the geometric ladder.
    ///
    /// On the knots of a uniform dyadic subdivision of [0, period] into
    /// 2^m <= 2^levels pieces, every level j >= m is frozen at its value 1
    /// while its true mean vanishes, and levels below m average out exactly,
    /// so a left-endpoint frozen-coefficient stepper sees the coherent bias
    /// period (h / period)^alpha / (1 - 2^(-alpha)): the Holder rate with a
    /// clean constant at every dyadic mesh, not just asymptotically.
    pub fn lacunary_family(
        a: SymbolFunction,
        b: SymbolFunction,
        alpha: f64,
        period: f64,
        levels: u32,
    ) -> Self {
        assert!(
            alpha > 0.0 && period > 0.0 && levels < 53,
            "lacunary ladder needs alpha > 0, period > 0, levels < 53"
        );
        let tail = (1.0 - 2f64.powf(-alpha)).recip();
        let amps: Vec<f64> = (0..=levels)
            .map(|j| {
                let c = 2f64.powf(-(j as f64) * alpha);
                if j == levels {
                    c * tail
                } else {
                    c
                }
            })
            .collect();
        let base = std::f64::consts::TAU / period;
        let g: ProfileFn = Arc::new(move |t: f64| {
            amps.iter()
                .enumerate()
                .map(|(j, &c)| c * (base * (1u64 << j) as f64 * t).cos())
                .sum()
        });
        Self::profile_family(a, b, g, alpha)
    }
}

/// One term c e^{i k . x} prod_d xi_d^{p_d}.
#[derive(Clone, Debug)]
pub struct TrigTerm {
    pub coeff: C64,
    pub wave: Vec<i64>,
    pub xi_pow: Vec<u32>,
}

impl TrigTerm {
    pub fn new(coeff: C64, wave: Vec<i64>, xi_pow: Vec<u32>) -> Self {
        Self { coeff, wave, xi_pow }
    }

    fn phase(&self, x: &[f64]) -> C64 {
        let arg: f64 = self.wave.iter().zip(x.iter()).map(|(&k, &xv)| k as f64 * xv).sum();
        C64::from_polar(1.0, arg)
    }

    fn eval(&self, x: &[f64], xi: &[f64]) -> C64 {
        let mono: f64 = self
            .xi_pow
            .iter()
            .zip(xi.iter())
            .map(|(&p, &v)| v.powi(p as i32))
            .product();
        self.coeff * self.phase(x) * mono
    }

    fn derivative(&self, alpha: &[usize], beta: &[usize], x: &[f64], xi: &[f64]) -> C64 {
        let mut c = self.coeff;
        for (d, &a) in alpha.iter().enumerate() {
            let ik = C64::new(0.0, self.wave[d] as f64);
            for _ in 0..a {
                c *= ik;
            }
        }
        let mut mono = C64::new(1.0, 0.0);
        for (d, &b) in beta.iter().enumerate() {
            let p = self.xi_pow[d] as i64;
            if (b as i64) > p {
                return C64::default();
            }
            let mut fall = 1.0;
            for j in 0..b as i64 {
                fall *= (p - j) as f64;
            }
            mono *= fall * xi[d].powi((p - b as i64) as i32);
        }
        c * self.phase(x) * mono
    }
}

/// Symbol samples on (midpoint grid) x (half-step frequency lattice, FFT
/// order).
#[derive(Clone, Debug)]
pub struct SampledSymbol {
    grid: PeriodicGrid,
    values: Array2<C64>,
}

impl SampledSymbol {
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<C64> {
        &self.values
    }

    pub fn from_values(grid: &PeriodicGrid, values: Array2<C64>) -> Result<Self> {
        if values.shape() != [grid.midpoint_total(), grid.half_freq_total()] {
            return Err(Error::GridMismatch(format!(
                "symbol array {:?} vs expected [{}, {}]",
                values.shape(),
                grid.midpoint_total(),
                grid.half_freq_total()
            )));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Sample f(mid_coords, half_freq_coords) over the lattice.
    pub fn from_fn(grid: &PeriodicGrid, mut f: impl FnMut(&[f64], &[f64]) -> C64) -> Self {
        let mids: Vec<Vec<f64>> =
            (0..grid.midpoint_total()).map(|i| grid.midpoint_coords(i)).collect();
        let freqs: Vec<Vec<f64>> =
            (0..grid.half_freq_total()).map(|k| grid.half_freq_coords(k)).collect();
        let values = Array2::from_shape_fn((mids.len(), freqs.len()), |(i, k)| {
            f(&mids[i], &freqs[k])
        });
        Self { grid: grid.clone(), values }
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("sampled symbols on different grids".into()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { grid: self.grid.clone(), values: &self.values * &other.values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { grid: self.grid.clone(), values: &self.values + &other.values })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self { grid: self.grid.clone(), values: &self.values - &other.values })
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.mapv(|v| v.conj()) }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.mapv(|v| v * c) }
    }

    pub fn abs_sq(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.mapv(|v| C64::new(v.norm_sqr(), 0.0)) }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiply by a function of xi alone (e.g. <xi>^(2s)) given over the
    /// half-step lattice.
    pub fn mul_freq(&self, w: &[f64]) -> Result<Self> {
        if w.len() != self.grid.half_freq_total() {
            return Err(Error::GridMismatch("frequency weight length".into()));
        }
        let mut values = self.values.clone();
        for mut row in values.rows_mut() {
            for (v, &wk) in row.iter_mut().zip(w.iter()) {
                *v *= wk;
            }
        }
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// Spectral derivative along a midpoint axis.
    pub fn d_x(&self, axis: usize) -> Self {
        let grid = &self.grid;
        let dim = grid.dim();
        assert!(axis < dim, "axis out of range");
        let m2 = 2 * grid.points();
        let mtot = grid.midpoint_total();
        let ftot = grid.half_freq_total();
        // Doubled-grid frequencies in FFT order.
        let kappa: Vec<f64> = (0..m2)
            .map(|k| {
                let signed = if k < m2 / 2 { k as isize } else { k as isize - m2 as isize };
                std::f64::consts::TAU * signed as f64 / grid.len()
            })
            .collect();
        let mut out = self.values.clone();
        // Transform each frequency column over the midpoint hypercube.
        let mut col = vec![C64::default(); mtot];
        for f in 0..ftot {
            for i in 0..mtot {
                col[i] = out[(i, f)];
            }
            fft_nd(&mut col, dim, m2, true);
            for (i, v) in col.iter_mut().enumerate() {
                let idx = decode_axis(i, dim, m2, axis);
                *v *= C64::new(0.0, kappa[idx]);
            }
            fft_nd(&mut col, dim, m2, false);
            for i in 0..mtot {
                out[(i, f)] = col[i];
            }
        }
        Self { grid: grid.clone(), values: out }
    }

    /// Finite-difference derivative along a frequency axis: fourth-order
    /// centered stencil, one-sided at the lattice edges.
    pub fn d_xi(&self, axis: usize) -> Self {
        let grid = &self.grid;
        let dim = grid.dim();
        assert!(axis < dim, "axis out of range");
        let n = 2 * grid.points();
        let dxi = std::f64::consts::PI / grid.len();
        let mtot = grid.midpoint_total();
        let mut out = self.values.clone();
        // Monotone ordering along the axis: position p <-> fft index (p + N) mod 2N.
        let fft_of_pos: Vec<usize> = (0..n).map(|p| (p + n / 2) % n).collect();
        let stride = n.pow((dim - 1 - axis) as u32);
        let blocks = grid.half_freq_total() / (n * stride);
        let mut line = vec![C64::default(); n];
        let mut dline = vec![C64::default(); n];
        for i in 0..mtot {
            for b in 0..blocks {
                for off in 0..stride {
                    let base = b * n * stride + off;
                    for p in 0..n {
                        line[p] = self.values[(i, base + fft_of_pos[p] * stride)];
                    }
                    fd4_line(&line, &mut dline, dxi);
                    for p in 0..n {
                        out[(i, base + fft_of_pos[p] * stride)] = dline[p];
                    }
                }
            }
        }
        Self { grid: grid.clone(), values: out }
    }
}

fn decode_axis(flat: usize, dim: usize, size: usize, axis: usize) -> usize {
    let mut rest = flat;
    let mut idx = 0;
    for d in (0..dim).rev() {
        let v = rest % size;
        rest /= size;
        if d == axis {
            idx = v;
        }
    }
    idx
}

/// Fourth-order first derivative on a uniform line; one-sided at both ends.
pub(crate) fn fd4_line(f: &[C64], out: &mut [C64], h: f64) {
    let n = f.len();
    assert!(n >= 6);
    let c = 1.0 / (12.0 * h);
    for p in 2..n - 2 {
        out[p] = (f[p - 2] - f[p + 2]) * c + (f[p + 1] - f[p - 1]) * (8.0 * c);
    }
    let e = 1.0 / (12.0 * h);
    // 5-point one-sided fourth-order stencils.
    let fwd = [-25.0, 48.0, -36.0, 16.0, -3.0];
    for p in 0..2 {
        let mut acc = C64::default();
        for (j, w) in fwd.iter().enumerate() {
            acc += f[p + j] * *w;
        }
        out[p] = acc * e;
    }
    for p in n - 2..n {
        let mut acc = C64::default();
        for (j, w) in fwd.iter().enumerate() {
            acc += f[p - j] * *w;
        }
        out[p] = -acc * e;
    }
}

/// Sample a symbol at time t over (midpoints) x (half-step lattice).
/// Errors name the first non-finite point.
pub fn sample(sym: &SymbolFunction, t: f64, grid: &PeriodicGrid) -> Result<SampledSymbol> {
    let mids: Vec<Vec<f64>> =
        (0..grid.midpoint_total()).map(|i| grid.midpoint_coords(i)).collect();
    let freqs: Vec<Vec<f64>> =
        (0..grid.half_freq_total()).map(|k| grid.half_freq_coords(k)).collect();
    let mut values = Array2::default((mids.len(), freqs.len()));
    for (i, x) in mids.iter().enumerate() {
        for (k, xi) in freqs.iter().enumerate() {
            let v = sym.eval(t, x, xi);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteSample { t, x: x.clone(), xi: xi.clone() });
            }
            values[(i, k)] = v;
        }
    }
    Ok(SampledSymbol { grid: grid.clone(), values })
}

/// Sample d_x^alpha d_xi^beta of a symbol: analytic closure when present,
/// spectral-x / finite-difference-xi fallback otherwise.
pub fn sample_derivative(
    sym: &SymbolFunction,
    t: f64,
    grid: &PeriodicGrid,
    alpha: &[usize],
    beta: &[usize],
) -> Result<SampledSymbol> {
    if sym.has_derivatives() {
        let mids: Vec<Vec<f64>> =
            (0..grid.midpoint_total()).map(|i| grid.midpoint_coords(i)).collect();
        let freqs: Vec<Vec<f64>> =
            (0..grid.half_freq_total()).map(|k| grid.half_freq_coords(k)).collect();
        let mut values = Array2::default((mids.len(), freqs.len()));
        for (i, x) in mids.iter().enumerate() {
            for (k, xi) in freqs.iter().enumerate() {
                values[(i, k)] = sym.derivative(alpha, beta, t, x, xi).unwrap();
            }
        }
        return Ok(SampledSymbol { grid: grid.clone(), values });
    }
    let mut cur = sample(sym, t, grid)?;
    for (axis, &a) in alpha.iter().enumerate() {
        for _ in 0..a {
            cur = cur.d_x(axis);
        }
    }
    for (axis, &b) in beta.iter().enumerate() {
        for _ in 0..b {
            cur = cur.d_xi(axis);
        }
    }
    Ok(cur)
}

#[derive(Clone, Copy, Debug)]
pub struct EllipticityReport {
    /// min over sampled points with |xi| >= theta of (q2 + Re q1)/|xi|^2.
    pub margin: f64,
    pub required: f64,
    pub theta: f64,
    pub ok: bool,
}

/// Check the declared lower bound on the real part over the sampled lattice.
pub fn verify_ellipticity(sym: &SymbolFunction, t: f64, grid: &PeriodicGrid) -> Result<EllipticityReport> {
    let Ellipticity { c, theta } = sym
        .ellipticity()
        .ok_or_else(|| Error::Invalid("symbol declares no ellipticity constants".into()))?;
    let mut margin = f64::INFINITY;
    let mut seen = false;
    for k in 0..grid.half_freq_total() {
        let xi = grid.half_freq_coords(k);
        let n2: f64 = xi.iter().map(|v| v * v).sum();
        if n2.sqrt() < theta {
            continue;
        }
        seen = true;
        for i in 0..grid.midpoint_total() {
            let x = grid.midpoint_coords(i);
            let q = sym.real_part(t, &x, &xi);
            margin = margin.min(q / n2);
        }
    }
    if !seen {
        return Err(Error::EmptyEllipticityRegion { threshold: theta });
    }
    Ok(EllipticityReport { margin, required: c, theta, ok: margin >= c })
}

/// Largest negative exponent representable before e^z underflows to zero.
pub const EXP_CLIP: f64 = -745.0;

/// e^{-h q(t)} sampled on the lattice; exponents below the clip go to zero.
pub fn exp_symbol(sym: &SymbolFunction, t: f64, h: f64, grid: &PeriodicGrid) -> Result<SampledSymbol> {
    let q = sample(sym, t, grid)?;
    Ok(exp_of_sampled(&q, h))
}

/// e^{-h q} for already-sampled q.
pub fn exp_of_sampled(q: &SampledSymbol, h: f64) -> SampledSymbol {
    let values = q.values.mapv(|v| {
        let z = -h * v;
        if z.re < EXP_CLIP {
            C64::default()
        } else {
            z.exp()
        }
    });
    SampledSymbol { grid: q.grid.clone(), values }
}

/// {a, b} = sum_d (d_xi_d a)(d_x_d b) - (d_x_d a)(d_xi_d b).
/// Antisymmetry is exact: swapping arguments negates every entry bitwise.
pub fn poisson_bracket(a: &SampledSymbol, b: &SampledSymbol) -> Result<SampledSymbol> {
    a.check_same_grid(b)?;
    let dim = a.grid.dim();
    let mut acc = Array2::<C64>::default(a.values.raw_dim());
    for d in 0..dim {
        let a_xi = a.d_xi(d);
        let b_x = b.d_x(d);
        let a_x = a.d_x(d);
        let b_xi = b.d_xi(d);
        acc = acc + &(&a_xi.values * &b_x.values) - &(&a_x.values * &b_xi.values);
    }
    Ok(SampledSymbol { grid: a.grid.clone(), values: acc })
}

/// Seminorm table p_ab = sup <xi>^(|b| - m) |d_x^a d_xi^b a| over the lattice.
#[derive(Clone, Debug)]
pub struct SeminormReport {
    pub order: f64,
    pub entries: BTreeMap<(Vec<usize>, Vec<usize>), f64>,
}

impl SeminormReport {
    pub fn get(&self, alpha: &[usize], beta: &[usize]) -> Option<f64> {
        self.entries.get(&(alpha.to_vec(), beta.to_vec())).copied()
    }

    pub fn max(&self) -> f64 {
        self.entries.values().fold(0.0, |a, &b| a.max(b))
    }
}

fn multi_indices(dim: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut idx = vec![0usize; dim];
    loop {
        if idx.iter().sum::<usize>() <= max_total {
            out.push(idx.clone());
        }
        // Odometer over [0, max_total]^dim.
        let mut d = 0;
        loop {
            if d == dim {
                return out;
            }
            idx[d] += 1;
            if idx[d] > max_total {
                idx[d] = 0;
                d += 1;
            } else {
                break;
            }
        }
    }
}

/// Compute seminorms for all |alpha| <= max_order, |beta| <= max_order (<= 4).
pub fn seminorms(
    sym: &SymbolFunction,
    t: f64,
    grid: &PeriodicGrid,
    m: f64,
    max_order: usize,
) -> Result<SeminormReport> {
    if max_order > 4 {
        return Err(Error::Invalid(format!("seminorm order {max_order} exceeds 4")));
    }
    let dim = grid.dim();
    let weights: Vec<Vec<f64>> = (0..=max_order)
        .map(|btot| {
            (0..grid.half_freq_total())
                .map(|k| (1.0 + grid.half_freq_norm_sq(k)).powf(0.5 * (btot as f64 - m)))
                .collect()
        })
        .collect();
    let alphas = multi_indices(dim, max_order);
    let betas = multi_indices(dim, max_order);
    let mut entries = BTreeMap::new();
    for alpha in &alphas {
        for beta in &betas {
            let btot: usize = beta.iter().sum();
            let arr = sample_derivative(sym, t, grid, alpha, beta)?;
            let w = &weights[btot];
            let mut sup = 0.0f64;
            for row in arr.values.rows() {
                for (v, &wk) in row.iter().zip(w.iter()) {
                    sup = sup.max(v.norm() * wk);
                }
            }
            entries.insert((alpha.clone(), beta.clone()), sup);
        }
    }
    Ok(SeminormReport { order: m, entries })
}
