//! Time stepping for du/dt = -q^w(t) u: the frozen-coefficient exponential
//! step, the multi-product propagator over a subdivision, certified reference
//! solutions, and the measurement sweeps built on top of them.

mod reference;
mod sweeps;

use std::sync::OnceLock;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::dense::identity;
use crate::error::{Error, Result};
use crate::grid::{GridField, PeriodicGrid};
use crate::symbols::{exp_symbol, SymbolFunction};
use crate::weyl::{quantize, LinOp, QuantizedOperator};

pub use reference::{
    fine_multiproduct, reference_path, reference_solve, ReferenceOptions, ReferenceSolution,
    ReferenceSolver,
};
pub use sweeps::{
    consistency_sweep, convergence_sweep, convergence_sweep_multi, sharp_norm_sweep,
    stability_sweep, ConsistencyRow, ConsistencySweep, ConvergenceOptions, ConvergenceRow,
    ConvergenceSweep, SharpNormRow, SharpNormSweep, StabilityRow, StabilitySweep,
};

/// Partition 0 = t_0 < t_1 < ... < t_N of a time interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Subdivision {
    knots: Vec<f64>,
}

impl Subdivision {
    /// Knots must start at exactly 0 and increase strictly.
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Invalid(
                "subdivision needs at least one step".into(),
            ));
        }
        if knots[0] != 0.0 {
            return Err(Error::Invalid(format!(
                "subdivision must start at 0, got {}",
                knots[0]
            )));
        }
        for w in knots.windows(2) {
            if !(w[1].is_finite() && w[1] > w[0]) {
                return Err(Error::Invalid(format!(
                    "subdivision knots must increase strictly: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { knots })
    }

    /// N equal steps on [0, t_final]. Knots are computed as
    /// t_final * (k/N), so doubling N reproduces the old knots bitwise.
    pub fn uniform(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::Invalid(format!(
                "final time must be positive, got {t_final}"
            )));
        }
        if steps == 0 {
            return Err(Error::Invalid("subdivision needs at least one step".into()));
        }
        let knots = (0..=steps)
            .map(|k| t_final * (k as f64 / steps as f64))
            .collect();
        Self::new(knots)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn steps(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn t_final(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Largest step length.
    pub fn mesh(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index of the last knot <= t.
    pub fn locate(&self, t: f64) -> Result<usize> {
        let lo = self.knots[0];
        let hi = self.t_final();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutsideRange { t, lo, hi });
        }
        Ok(self.knots.partition_point(|&k| k <= t) - 1)
    }
}

/// One propagator step: the Weyl quantization of exp(-(t' - t) q(t, .)),
/// the symbol frozen at the interval's left endpoint.
pub fn step(
    sym: &SymbolFunction,
    t: f64,
    t_prime: f64,
    grid: &PeriodicGrid,
) -> Result<QuantizedOperator> {
    if t_prime < t {
        return Err(Error::TimeOrder { t0: t, t1: t_prime });
    }
    Ok(quantize(&exp_symbol(sym, t, t_prime - t, grid)?))
}

/// Multi-product propagator over a fixed subdivision: the ordered product of
/// one-step operators, with a partial step from the last knot below t when t
/// falls strictly inside an interval.
///
/// Step operators are built on first use and cached per knot; concurrent
/// callers may race to build the same step but always observe one value.
pub struct MultiProduct {
    symbol: SymbolFunction,
    subdivision: Subdivision,
    grid: PeriodicGrid,
    steps: Vec<OnceLock<QuantizedOperator>>,
}

impl MultiProduct {
    pub fn new(symbol: &SymbolFunction, subdivision: Subdivision, grid: &PeriodicGrid) -> Self {
        let n = subdivision.steps();
        Self {
            symbol: symbol.clone(),
            subdivision,
            grid: grid.clone(),
            steps: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn subdivision(&self) -> &Subdivision {
        &self.subdivision
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// The cached operator for step i, covering [t_i, t_{i+1}].
    pub fn step_op(&self, i: usize) -> Result<&QuantizedOperator> {
        if self.steps[i].get().is_none() {
            let k = self.subdivision.knots();
            let op = step(&self.symbol, k[i], k[i + 1], &self.grid)?;
            let _ = self.steps[i].set(op);
        }
        Ok(self.steps[i].get().unwrap())
    }

    /// Apply the propagator at time t to u0. At a knot this is exactly the
    /// fold of the cached step operators, with no partial step appended.
    pub fn apply(&self, t: f64, u0: &GridField) -> Result<GridField> {
        if u0.grid() != &self.grid {
            return Err(Error::GridMismatch(
                "field grid does not match propagator grid".into(),
            ));
        }
        let k = self.subdivision.locate(t)?;
        let mut v = u0.values().clone();
        for i in 0..k {
            v = self.step_op(i)?.apply_vec(&v);
        }
        let t_k = self.subdivision.knots()[k];
        if t > t_k {
            v = step(&self.symbol, t_k, t, &self.grid)?.apply_vec(&v);
        }
        GridField::from_values(&self.grid, v)
    }

    /// Dense matrix of the propagator at time t.
    pub fn dense(&self, t: f64) -> Result<Array2<C64>> {
        let k = self.subdivision.locate(t)?;
        let mut m = identity(self.grid.total());
        for i in 0..k {
            m = self.step_op(i)?.kernel().dot(&m);
        }
        let t_k = self.subdivision.knots()[k];
        if t > t_k {
            m = step(&self.symbol, t_k, t, &self.grid)?.kernel().dot(&m);
        }
        Ok(m)
    }

    /// March u0 through every knot, returning the state at t_0 = 0 up to t_N.
    pub fn knot_states(&self, u0: &GridField) -> Result<Vec<GridField>> {
        if u0.grid() != &self.grid {
            return Err(Error::GridMismatch(
                "field grid does not match propagator grid".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.subdivision.steps() + 1);
        out.push(u0.clone());
        let mut v = u0.values().clone();
        for i in 0..self.subdivision.steps() {
            v = self.step_op(i)?.apply_vec(&v);
            out.push(GridField::from_values(&self.grid, v.clone())?);
        }
        Ok(out)
    }
}

fn l2_distance(a: &Array1<C64>, b: &Array1<C64>, grid: &PeriodicGrid) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += (x - y).norm_sqr();
    }
    (acc * grid.quad_weight()).sqrt()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::{fourier_forward, fourier_inverse};
    use crate::symbols::TrigTerm;

    fn heat_symbol() -> SymbolFunction {
        SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0))
    }

    fn curved() -> SymbolFunction {
        // (1 + cos(x)/2) xi^2 + i xi sin(x)
        let terms = vec![
            TrigTerm::new(C64::new(1.0, 0.0), vec![0], vec![2]),
            TrigTerm::new(C64::new(0.25, 0.0), vec![1], vec![2]),
            TrigTerm::new(C64::new(0.25, 0.0), vec![-1], vec![2]),
            TrigTerm::new(C64::new(0.5, 0.0), vec![1], vec![1]),
            TrigTerm::new(C64::new(-0.5, 0.0), vec![-1], vec![1]),
        ];
        SymbolFunction::trig_poly(2.0, terms).with_ellipticity(0.45, 1.0)
    }

    fn gaussian_like(grid: &PeriodicGrid) -> GridField {
        GridField::from_fn(grid, |x| {
            C64::new((x[0].cos() * 1.3).exp(), (2.0 * x[0]).sin() * 0.2)
        })
    }

    fn heat_exact(u0: &GridField, t: f64) -> GridField {
        let hat = fourier_forward(u0);
        let grid = u0.grid().clone();
        let mut vals = hat.values().clone();
        for (k, v) in vals.iter_mut().enumerate() {
            let xi = grid.freq_coords(k);
            *v *= (-t * xi[0] * xi[0]).exp();
        }
        fourier_inverse(&GridField::from_values(&grid, vals).unwrap())
    }

    #[test]
    fn subdivision_rejects_bad_knot_lists() {
        assert!(Subdivision::new(vec![0.0]).is_err());
        assert!(Subdivision::new(vec![0.1, 0.2]).is_err());
        assert!(Subdivision::new(vec![0.0, 0.2, 0.2]).is_err());
        assert!(Subdivision::new(vec![0.0, 0.3, 0.2]).is_err());
        assert!(Subdivision::new(vec![0.0, f64::NAN]).is_err());
        assert!(Subdivision::uniform(0.0, 4).is_err());
        assert!(Subdivision::uniform(1.0, 0).is_err());
    }

    #[test]
    fn uniform_knots_nest_bitwise_under_doubling() {
        let coarse = Subdivision::uniform(0.7, 6).unwrap();
        let fine = Subdivision::uniform(0.7, 12).unwrap();
        for (k, &t) in coarse.knots().iter().enumerate() {
            assert_eq!(t.to_bits(), fine.knots()[2 * k].to_bits());
        }
        assert_eq!(coarse.steps(), 6);
        assert!((coarse.mesh() - 0.7 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn locate_brackets_and_rejects_outside() {
        let sub = Subdivision::uniform(1.0, 4).unwrap();
        assert_eq!(sub.locate(0.0).unwrap(), 0);
        assert_eq!(sub.locate(0.25).unwrap(), 1);
        assert_eq!(sub.locate(0.3).unwrap(), 1);
        assert_eq!(sub.locate(1.0).unwrap(), 4);
        assert!(matches!(
            sub.locate(-0.1),
            Err(Error::OutsideRange { .. })
        ));
        assert!(matches!(sub.locate(1.1), Err(Error::OutsideRange { .. })));
        assert!(sub.locate(f64::NAN).is_err());
    }

    #[test]
    fn step_rejects_reversed_interval_and_freezes_at_identity() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        assert!(matches!(
            step(&curved(), 0.5, 0.2, &grid),
            Err(Error::TimeOrder { .. })
        ));
        let id = step(&curved(), 0.3, 0.3, &grid).unwrap();
        let u = gaussian_like(&grid);
        let v = id.apply(&u).unwrap();
        assert!(v.sub(&u).unwrap().l2_norm() < 1e-12 * u.l2_norm());
    }

    #[test]
    fn multiplier_multiproduct_is_exact_for_every_subdivision() {
        let grid = PeriodicGrid::unit(1, 32).unwrap();
        let u0 = gaussian_like(&grid);
        let t_final = 0.5;
        let want = heat_exact(&u0, t_final);
        for steps in [1usize, 3, 8] {
            let sub = Subdivision::uniform(t_final, steps).unwrap();
            let mp = MultiProduct::new(&heat_symbol(), sub, &grid);
            let got = mp.apply(t_final, &u0).unwrap();
            let err = got.sub(&want).unwrap().l2_norm();
            assert!(err < 1e-11, "steps {steps}: error {err:.3e}");
        }
    }

    #[test]
    fn time_dependent_multiplier_steps_at_first_order() {
        // q = (1 + t) xi^2: exact solution is the multiplier
        // exp(-(T + T^2/2) xi^2); each frozen step commits an O(h) error.
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let sym = SymbolFunction::new(
            2.0,
            Arc::new(|t, _x, xi| C64::new((1.0 + t) * xi[0] * xi[0], 0.0)),
        )
        .with_holder(1.0);
        let u0 = gaussian_like(&grid);
        let t_final = 0.5;
        let hat = fourier_forward(&u0);
        let mut vals = hat.values().clone();
        for (k, v) in vals.iter_mut().enumerate() {
            let xi = grid.freq_coords(k);
            *v *= (-(t_final + t_final * t_final / 2.0) * xi[0] * xi[0]).exp();
        }
        let want = fourier_inverse(&GridField::from_values(&grid, vals).unwrap());

        let mut errs = Vec::new();
        let mut meshes = Vec::new();
        for steps in [4usize, 8, 16, 32] {
            let sub = Subdivision::uniform(t_final, steps).unwrap();
            let mp = MultiProduct::new(&sym, sub, &grid);
            let got = mp.apply(t_final, &u0).unwrap();
            errs.push(got.sub(&want).unwrap().l2_norm());
            meshes.push(t_final / steps as f64);
        }
        let fit = crate::rates::fit_rate(&meshes, &errs).unwrap();
        assert!(
            (fit.slope - 1.0).abs() < 0.2,
            "slope {:.3} errs {errs:?}",
            fit.slope
        );
    }

    #[test]
    fn apply_at_knots_telescopes_bitwise() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let sub = Subdivision::new(vec![0.0, 0.05, 0.125, 0.3, 0.31, 0.5]).unwrap();
        let mp = MultiProduct::new(&curved(), sub, &grid);
        let u0 = gaussian_like(&grid);

        let mut v = u0.values().clone();
        for (i, &t_k) in mp.subdivision().knots().iter().enumerate().skip(1) {
            v = mp.step_op(i - 1).unwrap().apply_vec(&v);
            let direct = mp.apply(t_k, &u0).unwrap();
            for (a, b) in direct.values().iter().zip(v.iter()) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn apply_matches_dense_product_including_partial_step() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let sub = Subdivision::uniform(0.4, 4).unwrap();
        let mp = MultiProduct::new(&curved(), sub, &grid);
        let u0 = gaussian_like(&grid);
        for t in [0.0, 0.1, 0.17, 0.25, 0.33, 0.4] {
            let via_apply = mp.apply(t, &u0).unwrap();
            let m = mp.dense(t).unwrap();
            let via_dense = m.dot(u0.values());
            let err = l2_distance(via_apply.values(), &via_dense, &grid);
            assert!(err < 1e-10, "t {t}: gap {err:.3e}");
        }
    }

    #[test]
    fn apply_rejects_times_outside_the_subdivision() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let sub = Subdivision::uniform(0.4, 4).unwrap();
        let mp = MultiProduct::new(&curved(), sub, &grid);
        let u0 = gaussian_like(&grid);
        assert!(matches!(
            mp.apply(-0.01, &u0),
            Err(Error::OutsideRange { .. })
        ));
        assert!(matches!(
            mp.apply(0.41, &u0),
            Err(Error::OutsideRange { .. })
        ));
    }

    #[test]
    fn knot_states_match_pointwise_application() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let sub = Subdivision::uniform(0.3, 3).unwrap();
        let mp = MultiProduct::new(&curved(), sub, &grid);
        let u0 = gaussian_like(&grid);
        let states = mp.knot_states(&u0).unwrap();
        assert_eq!(states.len(), 4);
        for (k, &t_k) in mp.subdivision().knots().iter().enumerate() {
            let direct = mp.apply(t_k, &u0).unwrap();
            let gap = states[k].sub(&direct).unwrap().l2_norm();
            assert!(gap == 0.0, "knot {k}: gap {gap:.3e}");
        }
    }
}
