//! Metric fields, the Laplace-Beltrami generator, and its glued form.
//!
//! With metric g(t,x) dx^2 on the circle, A = -g^{-1/2} d/dx (g^{-1/2} d/dx)
//! has coefficients c2 = -1/g, c1 = g'/(2 g^2), c0 = 0. Conjugating A by a
//! squared partition of unity costs a zeroth-order term: with s = sum phi_i'^2,
//!
//!   sum_i phi_i A (phi_i u) = A u - c2 s u,
//!
//! because sum phi_i phi_i' = 0 and hence sum phi_i phi_i'' = -s. So
//! Q = A + c2 s satisfies sum_i phi_i Q phi_i = A exactly, pointwise; the
//! probe check below only measures rounding.

use std::f64::consts::TAU;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{fourier_forward, fourier_inverse, GridField, PeriodicGrid};
use crate::jet::Jet;
use crate::symbols::{DerivFn, EvalFn, ProfileFn, RealEvalFn, SymbolFunction};

use super::atlas::{Chart, ChartAtlas, SmoothFn};

/// Differential-operator coefficient: (t, x) -> 4-jet in x.
pub type CoeffFn = Arc<dyn Fn(f64, f64) -> Jet + Send + Sync>;

/// Jet of f' from the jet of f; the top entry is padding, so one meaningful
/// order is lost per application.
pub(crate) fn djet(j: &Jet) -> Jet {
    Jet { d: [j.d[1], j.d[2], j.d[3], j.d[4], 0.0] }
}

/// Riemannian metric g(t, x) dx^2 on the circle, verified positive on the
/// midpoint lattice at the given times. `holder` declares time regularity;
/// the t = 0 slice serves as the reference density for weighted norms.
pub struct MetricField {
    g: CoeffFn,
    holder: f64,
    lower: f64,
    upper: f64,
}

impl MetricField {
    pub fn new(g: CoeffFn, holder: f64, grid: &PeriodicGrid, t_samples: &[f64]) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::UnsupportedDim { op: "MetricField", dim: grid.dim(), supported: 1 });
        }
        let times: &[f64] = if t_samples.is_empty() { &[0.0] } else { t_samples };
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for &t in times {
            for m in 0..grid.midpoint_total() {
                let v = g(t, grid.midpoint_x(m)).val();
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::Invalid(format!(
                        "metric value {v} at t={t}, x={:.6}",
                        grid.midpoint_x(m)
                    )));
                }
                lower = lower.min(v);
                upper = upper.max(v);
            }
        }
        Ok(Self { g, holder, lower, upper })
    }

    pub fn flat(grid: &PeriodicGrid) -> Result<Self> {
        Self::new(Arc::new(|_t, _x| Jet::constant(1.0)), 1.0, grid, &[0.0])
    }

    /// Time-independent metric from a smooth profile.
    pub fn from_profile(profile: SmoothFn, grid: &PeriodicGrid) -> Result<Self> {
        Self::new(Arc::new(move |_t, x| profile.jet(x)), 1.0, grid, &[0.0])
    }

    /// g(t, x) = base(x) + w(t) swell(x); `holder` is the exponent of w.
    pub fn modulated(
        base: SmoothFn,
        swell: SmoothFn,
        w: ProfileFn,
        holder: f64,
        grid: &PeriodicGrid,
        t_samples: &[f64],
    ) -> Result<Self> {
        let g: CoeffFn = Arc::new(move |t, x| base.jet(x).add(&swell.jet(x).scale(w(t))));
        Self::new(g, holder, grid, t_samples)
    }

    pub fn jet(&self, t: f64, x: f64) -> Jet {
        (self.g)(t, x)
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        (self.g)(t, x).val()
    }

    pub fn holder(&self) -> f64 {
        self.holder
    }

    /// Verified (min, max) over the sampled lattice.
    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// sqrt(g(0, x)): density of the reference volume measure.
    pub fn reference_weight(&self, x: f64) -> f64 {
        self.value(0.0, x).sqrt()
    }
}

/// c2(x) d^2 + c1(x) d + c0(x) with jet-valued coefficients.
#[derive(Clone)]
pub struct DiffCoeffs {
    pub c2: CoeffFn,
    pub c1: CoeffFn,
    pub c0: CoeffFn,
}

impl DiffCoeffs {
    /// Apply with spectral derivatives and pointwise coefficients.
    pub fn apply(&self, t: f64, u: &GridField) -> Result<GridField> {
        let g = u.grid();
        if g.dim() != 1 {
            return Err(Error::UnsupportedDim { op: "DiffCoeffs::apply", dim: g.dim(), supported: 1 });
        }
        let du = spectral_derivative(u, 1);
        let d2u = spectral_derivative(u, 2);
        let mut out = GridField::zeros(g);
        for j in 0..g.points() {
            let x = g.x(j);
            out.values_mut()[j] = (self.c2)(t, x).val() * d2u.values()[j]
                + (self.c1)(t, x).val() * du.values()[j]
                + (self.c0)(t, x).val() * u.values()[j];
        }
        Ok(out)
    }

    /// Dense matrix of `apply` by columns.
    pub fn dense(&self, t: f64, grid: &PeriodicGrid) -> Result<Array2<C64>> {
        let n = grid.total();
        let mut m = Array2::zeros((n, n));
        for col in 0..n {
            let mut e = GridField::zeros(grid);
            e.values_mut()[col] = C64::new(1.0, 0.0);
            let ae = self.apply(t, &e)?;
            for row in 0..n {
                m[[row, col]] = ae.values()[row];
            }
        }
        Ok(m)
    }

    /// Pointwise action on a 4-jet: c2 w'' + c1 w' + c0 w at the jet's point.
    pub fn apply_jet(&self, t: f64, x: f64, w: &Jet) -> f64 {
        (self.c2)(t, x).val() * w.d[2] + (self.c1)(t, x).val() * w.d[1]
            + (self.c0)(t, x).val() * w.d[0]
    }
}

fn spectral_derivative(u: &GridField, order: u32) -> GridField {
    let g = u.grid().clone();
    let mut hat = fourier_forward(u);
    for (k, v) in hat.values_mut().iter_mut().enumerate() {
        *v *= C64::new(0.0, g.freq(k)).powu(order);
    }
    fourier_inverse(&hat)
}

/// Coefficients of -g^{-1/2} d (g^{-1/2} d .), the positive Laplace-Beltrami
/// operator of the metric.
pub fn build_laplace_beltrami(metric: &Arc<MetricField>) -> DiffCoeffs {
    let m2 = metric.clone();
    let c2: CoeffFn = Arc::new(move |t, x| m2.jet(t, x).recip().neg());
    let m1 = metric.clone();
    let c1: CoeffFn = Arc::new(move |t, x| {
        let g = m1.jet(t, x);
        djet(&g).div(&g.mul(&g).scale(2.0))
    });
    let c0: CoeffFn = Arc::new(|_t, _x| Jet::constant(0.0));
    DiffCoeffs { c2, c1, c0 }
}

/// The generator localized by a squared partition: Q = A + c2 sum phi_i'^2,
/// built so that sum_i phi_i Q phi_i reproduces A exactly.
pub struct GluedGenerator {
    atlas: Arc<ChartAtlas>,
    metric: Arc<MetricField>,
    base: DiffCoeffs,
    correction: CoeffFn,
    total: DiffCoeffs,
    recon_defect: f64,
}

const IDENTITY_TOL: f64 = 1e-8;

pub fn build_q(atlas: &Arc<ChartAtlas>, metric: &Arc<MetricField>) -> Result<GluedGenerator> {
    let base = build_laplace_beltrami(metric);
    let at = atlas.clone();
    let c2 = base.c2.clone();
    let correction: CoeffFn = Arc::new(move |t, x| {
        let mut s = Jet::constant(0.0);
        for i in 0..at.chart_count() {
            let dp = djet(&at.partition(i).jet(x));
            s = s.add(&dp.mul(&dp));
        }
        c2(t, x).mul(&s)
    });
    let b0 = base.c0.clone();
    let corr = correction.clone();
    let total = DiffCoeffs {
        c2: base.c2.clone(),
        c1: base.c1.clone(),
        c0: Arc::new(move |t, x| b0(t, x).add(&corr(t, x))),
    };
    let gen = GluedGenerator {
        atlas: atlas.clone(),
        metric: metric.clone(),
        base,
        correction,
        total,
        recon_defect: 0.0,
    };
    let defect = gen.verify_identity(0.0)?;
    Ok(GluedGenerator { recon_defect: defect, ..gen })
}

impl GluedGenerator {
    pub fn atlas(&self) -> &Arc<ChartAtlas> {
        &self.atlas
    }

    pub fn metric(&self) -> &Arc<MetricField> {
        &self.metric
    }

    pub fn base(&self) -> &DiffCoeffs {
        &self.base
    }

    pub fn total(&self) -> &DiffCoeffs {
        &self.total
    }

    pub fn correction_at(&self, t: f64, x: f64) -> f64 {
        (self.correction)(t, x).val()
    }

    /// Worst probe defect measured at construction (t = 0).
    pub fn recon_defect(&self) -> f64 {
        self.recon_defect
    }

    /// Max over the lattice and 16 trig probes of degree <= 8 of
    /// |sum_i phi_i Q(phi_i u) - A u|, all derivatives taken through jets.
    pub fn verify_identity(&self, t: f64) -> Result<f64> {
        let g = self.atlas.grid();
        let n = self.atlas.chart_count();
        let mut worst = 0.0f64;
        for j in 0..g.points() {
            let x = g.x(j);
            for m in 1..=8 {
                let arg = Jet::var(x).scale(m as f64);
                for u in [arg.cos(), arg.sin()] {
                    let au = self.base.apply_jet(t, x, &u);
                    let mut glued = 0.0;
                    for i in 0..n {
                        let p = self.atlas.partition(i).jet(x);
                        glued += p.val() * self.total.apply_jet(t, x, &p.mul(&u));
                    }
                    worst = worst.max((glued - au).abs());
                }
            }
        }
        if worst > IDENTITY_TOL {
            return Err(Error::Invalid(format!(
                "glued generator misses its reconstruction identity by {worst:.3e} at t={t}"
            )));
        }
        Ok(worst)
    }

    /// Pushforward symbol of Q on fine chart i, with the metric's time
    /// regularity attached.
    pub fn chart_symbol(&self, i: usize) -> Result<SymbolFunction> {
        let sym = chart_symbol(&self.atlas.charts()[i], &self.total)?;
        Ok(sym.with_holder(self.metric.holder()))
    }

    /// Pushforward symbol of Q on coarse chart k.
    pub fn coarse_symbol(&self, k: usize) -> Result<SymbolFunction> {
        let coarse = self
            .atlas
            .coarse()
            .ok_or_else(|| Error::Atlas("no coarse atlas attached".into()))?;
        let sym = chart_symbol(&coarse.charts()[k], &self.total)?;
        Ok(sym.with_holder(self.metric.holder()))
    }
}

/// The three pushforward coefficient jets (in the chart coordinate) at box
/// coordinate y: ct2 = c2 psi'^2, ct1 = c2 psi'' + c1 psi', ct0 = c0, all at
/// x = psi^{-1}(y). Outside the chart's certified window the jets freeze to
/// the edge value, making the operator constant-coefficient in the padding.
fn pushforward_jets(chart: &Chart, coeffs: &DiffCoeffs, t: f64, y_box: f64) -> (Jet, Jet, Jet) {
    let yp = chart.box_origin() + y_box;
    if chart.is_full_circle() {
        let x = yp.rem_euclid(TAU);
        return ((coeffs.c2)(t, x), (coeffs.c1)(t, x), (coeffs.c0)(t, x));
    }
    let (wlo, whi) = chart.coeff_window();
    let yc = yp.clamp(wlo, whi);
    let xj = chart.inv_jet(yc);
    let x0 = xj.val();
    let psi = chart.map_jet(x0);
    let psip = djet(&psi);
    let psipp = djet(&psip);
    let ct2_x = (coeffs.c2)(t, x0).mul(&psip.mul(&psip));
    let ct1_x = (coeffs.c2)(t, x0).mul(&psipp).add(&(coeffs.c1)(t, x0).mul(&psip));
    let ct0_x = (coeffs.c0)(t, x0);
    let ct2 = Jet::compose(&ct2_x, &xj);
    let ct1 = Jet::compose(&ct1_x, &xj);
    let ct0 = Jet::compose(&ct0_x, &xj);
    if yc != yp {
        (Jet::constant(ct2.val()), Jet::constant(ct1.val()), Jet::constant(ct0.val()))
    } else {
        (ct2, ct1, ct0)
    }
}

/// d_y^a d_xi^b of the symbol assembled from coefficient jets. Orders a <= 1
/// come out of the jets exactly; the jet depth is spent after that.
fn symbol_derivative(ct2: &Jet, ct1: &Jet, ct0: &Jet, xi: f64, a: usize, b: usize) -> C64 {
    // xi-coefficients of q = A xi^2 + i B xi + C, differentiated a times in y.
    let aa = -ct2.d[a];
    let bb = ct1.d[a] - ct2.d[a + 1];
    let cc = ct2.d[a + 2] / 4.0 - ct1.d[a + 1] / 2.0 + ct0.d[a];
    match b {
        0 => C64::new(aa * xi * xi + cc, bb * xi),
        1 => C64::new(2.0 * aa * xi, bb),
        2 => C64::new(2.0 * aa, 0.0),
        _ => C64::new(0.0, 0.0),
    }
}

/// Weyl symbol of the pushforward of `coeffs` to the chart's padded box:
///
///   q(y, xi) = -ct2 xi^2 + i (ct1 - ct2') xi + (ct2''/4 - ct1'/2 + ct0).
///
/// The correction terms make the quantization of q agree with the
/// differential operator exactly on symbols and data below the frequency
/// cutoff. Declares the real split and a measured ellipticity certificate.
pub fn chart_symbol(chart: &Chart, coeffs: &DiffCoeffs) -> Result<SymbolFunction> {
    let (ch, co) = (chart.clone(), coeffs.clone());
    let eval: EvalFn = Arc::new(move |t, x, xi| {
        let (ct2, ct1, ct0) = pushforward_jets(&ch, &co, t, x[0]);
        symbol_derivative(&ct2, &ct1, &ct0, xi[0], 0, 0)
    });
    let (ch2, co2) = (chart.clone(), coeffs.clone());
    let q2: RealEvalFn = Arc::new(move |t, x, xi| {
        let (ct2, _, _) = pushforward_jets(&ch2, &co2, t, x[0]);
        -ct2.val() * xi[0] * xi[0]
    });
    let (ch1, co1) = (chart.clone(), coeffs.clone());
    let q1: EvalFn = Arc::new(move |t, x, xi| {
        let (ct2, ct1, ct0) = pushforward_jets(&ch1, &co1, t, x[0]);
        let full = symbol_derivative(&ct2, &ct1, &ct0, xi[0], 0, 0);
        full + ct2.val() * xi[0] * xi[0]
    });
    let (chd, cod) = (chart.clone(), coeffs.clone());
    let deriv: DerivFn = Arc::new(move |alpha, beta, t, x, xi| {
        derivative_rec(&chd, &cod, alpha[0], beta[0], t, x[0], xi[0])
    });

    // Measured ellipticity: q2 + Re q1 = -ct2 xi^2 + (ct2''/4 - ct1'/2 + ct0)
    // over the box lattice at t = 0.
    let g = chart.local_grid();
    let mut prin = f64::INFINITY;
    let mut rest = f64::INFINITY;
    for m in 0..g.midpoint_total() {
        let (ct2, ct1, ct0) = pushforward_jets(chart, coeffs, 0.0, g.midpoint_x(m));
        let p = -ct2.val();
        let r = ct2.d[2] / 4.0 - ct1.d1() / 2.0 + ct0.val();
        if !p.is_finite() || !r.is_finite() {
            return Err(Error::Invalid(format!(
                "non-finite pushforward coefficients on chart {} at y={:.6}",
                chart.index(),
                g.midpoint_x(m)
            )));
        }
        prin = prin.min(p);
        rest = rest.min(r);
    }
    if prin <= 0.0 {
        return Err(Error::Invalid(format!(
            "chart {} pushforward loses ellipticity: min principal {prin:.3e}",
            chart.index()
        )));
    }
    let (c_ell, theta) = if rest >= 0.0 {
        (prin, 0.0)
    } else {
        (0.5 * prin, (-2.0 * rest / prin).sqrt())
    };

    Ok(SymbolFunction::new(2.0, eval)
        .with_split(q2, q1)
        .with_derivatives(deriv)
        .with_ellipticity(c_ell, theta))
}

fn derivative_rec(chart: &Chart, coeffs: &DiffCoeffs, a: usize, b: usize, t: f64, y: f64, xi: f64) -> C64 {
    if a <= 1 {
        let (ct2, ct1, ct0) = pushforward_jets(chart, coeffs, t, y);
        return symbol_derivative(&ct2, &ct1, &ct0, xi, a, b);
    }
    // Beyond the exact jet depth: central difference of the next order down.
    let h = 1e-4 * chart.local_grid().spacing().max(1e-3);
    let hi = derivative_rec(chart, coeffs, a - 1, b, t, y + h, xi);
    let lo = derivative_rec(chart, coeffs, a - 1, b, t, y - h, xi);
    (hi - lo) / (2.0 * h)
}
