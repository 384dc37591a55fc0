//! Certified reference solutions of du/dt = -q^w(t) u.
//!
//! Symbols with no x-dependence on the lattice are solved exactly as Fourier
//! multipliers with adaptive quadrature of the exponent. Everything else runs
//! classical RK4 on the quantized system, step-halved until the output stops
//! moving below the requested tolerance. Cross-validation against an
//! independent integrator (a fourth-order Magnus stepper built on the dense
//! matrix exponential) is on by default and failing it is an error, never a
//! warning.
//!
//! Families q = a + t^alpha b with alpha < 1 have unbounded time derivatives
//! at t = 0; all integrators here run in the substituted variable t = tau^2,
//! which makes the right-hand side smooth again.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::dense::{expm, identity, max_abs_diff};
use crate::error::{Error, Result};
use crate::grid::{fourier_forward, fourier_inverse, GridField, PeriodicGrid};
use crate::symbols::{sample, ProfileFn, SymbolFunction, EXP_CLIP};
use crate::weyl::{quantize, LinOp, QuantizedOperator};

use super::{l2_distance, step, Subdivision};

/// Loosest self-convergence target accepted by the reference solvers.
pub const MIN_REFERENCE_TOL: f64 = 1e-11;

/// RK4 step-size budget per unit of generator magnitude. The real stability
/// interval reaches 2.785; stay inside it.
const RK4_STABLE_STEP: f64 = 2.0;

const MIN_REF_STEPS: usize = 16;
const MAX_REF_STEPS: usize = 1 << 22;

/// Which method produced a reference solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceSolver {
    ExactMultiplier,
    FineMultiproduct,
    MethodOfLines,
}

/// A reference value plus the evidence it was solved accurately.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceSolution {
    pub solver: ReferenceSolver,
    /// Measured self-convergence: how much the output moved under the last
    /// refinement of the solver's own discretization.
    pub tolerance: f64,
    /// Time steps (quadrature evaluations for the multiplier solver) in the
    /// accepted run.
    pub steps: usize,
    /// L2 disagreement with the independent cross-check solver, when it ran.
    pub cross_error: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct ReferenceOptions {
    /// Requested accuracy; self-convergence must reach tol/10 and the
    /// cross-check must agree to 10 tol.
    pub tol: f64,
    pub cross_validate: bool,
    pub max_halvings: usize,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self { tol: 1e-9, cross_validate: true, max_halvings: 20 }
    }
}

impl ReferenceOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn without_cross_validation(mut self) -> Self {
        self.cross_validate = false;
        self
    }
}

/// Integration clock t = tau^m. m = 2 turns t^(1/2) time dependence into a
/// polynomial in tau, restoring full integrator order near t = 0.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Clock {
    m: u32,
}

impl Clock {
    pub(crate) fn for_symbol(sym: &SymbolFunction) -> Self {
        match sym.holder_alpha() {
            Some(a) if a < 1.0 => Self { m: 2 },
            _ => Self { m: 1 },
        }
    }

    fn tau_of(&self, t: f64) -> f64 {
        if self.m == 2 { t.sqrt() } else { t }
    }

    fn t_of(&self, tau: f64) -> f64 {
        if self.m == 2 { tau * tau } else { tau }
    }

    /// dt/dtau.
    fn weight(&self, tau: f64) -> f64 {
        if self.m == 2 { 2.0 * tau } else { 1.0 }
    }
}

/// The generator q^w(t) with the cheapest re-evaluation the symbol structure
/// allows. Classification is verified on the lattice, never assumed from
/// metadata alone.
pub(crate) enum Generator {
    /// Lattice values do not change over [0, t_final].
    Static(QuantizedOperator),
    /// q(t) = a + w(t) b holds on the lattice.
    Affine {
        a: QuantizedOperator,
        b: QuantizedOperator,
        w: ProfileFn,
    },
    /// Requantize at every requested time.
    General { sym: SymbolFunction, grid: PeriodicGrid },
}

impl Generator {
    pub(crate) fn new(sym: &SymbolFunction, grid: &PeriodicGrid, t_final: f64) -> Result<Self> {
        let checks = [0.37 * t_final, 0.71 * t_final];
        let s0 = sample(sym, 0.0, grid)?;
        let s1 = sample(sym, t_final, grid)?;
        let scale = s0.max_abs().max(s1.max_abs()).max(1.0);
        let mid: Vec<_> = checks
            .iter()
            .map(|&t| sample(sym, t, grid))
            .collect::<Result<_>>()?;
        let is_static = s1.sub(&s0)?.max_abs() <= 1e-13 * scale
            && mid
                .iter()
                .map(|s| s.sub(&s0).map(|d| d.max_abs()))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .all(|&d| d <= 1e-13 * scale);
        if is_static {
            return Ok(Self::Static(quantize(&s0)));
        }
        if let Some(parts) = sym.affine_parts() {
            let a_s = sample(&parts.a, 0.0, grid)?;
            let b_s = sample(&parts.b, 0.0, grid)?;
            let times = [0.0, checks[0], checks[1], t_final];
            let sampled = [&s0, &mid[0], &mid[1], &s1];
            let mut verified = true;
            for (&tc, &sc) in times.iter().zip(sampled.iter()) {
                let want = a_s.add(&b_s.scale(C64::new((parts.w)(tc), 0.0)))?;
                if want.sub(sc)?.max_abs() > 1e-11 * scale {
                    verified = false;
                    break;
                }
            }
            if verified {
                return Ok(Self::Affine {
                    a: quantize(&a_s),
                    b: quantize(&b_s),
                    w: parts.w.clone(),
                });
            }
        }
        Ok(Self::General { sym: sym.clone(), grid: grid.clone() })
    }

    pub(crate) fn grid(&self) -> &PeriodicGrid {
        match self {
            Self::Static(op) => op.grid(),
            Self::Affine { a, .. } => a.grid(),
            Self::General { grid, .. } => grid,
        }
    }

    /// q^w(t) u.
    fn apply(&self, t: f64, u: &Array1<C64>) -> Result<Array1<C64>> {
        match self {
            Self::Static(op) => Ok(op.apply_vec(u)),
            Self::Affine { a, b, w } => {
                let c = w(t);
                let mut out = a.apply_vec(u);
                out.zip_mut_with(&b.apply_vec(u), |o, &v| *o += c * v);
                Ok(out)
            }
            Self::General { sym, grid } => Ok(quantize(&sample(sym, t, grid)?).apply_vec(u)),
        }
    }

    /// Dense matrix of q^w(t).
    fn dense_at(&self, t: f64) -> Result<Array2<C64>> {
        match self {
            Self::Static(op) => Ok(op.kernel().clone()),
            Self::Affine { a, b, w } => {
                let c = w(t);
                let mut m = a.kernel().clone();
                m.zip_mut_with(b.kernel(), |o, &v| *o += c * v);
                Ok(m)
            }
            Self::General { sym, grid } => Ok(quantize(&sample(sym, t, grid)?).kernel().clone()),
        }
    }

    /// Upper bound for the lattice magnitude of q(t).
    fn magnitude_at(&self, t: f64) -> Result<f64> {
        match self {
            Self::Static(op) => Ok(op.symbol().max_abs()),
            Self::Affine { a, b, w } => {
                Ok(a.symbol().max_abs() + w(t).abs() * b.symbol().max_abs())
            }
            Self::General { sym, grid } => Ok(sample(sym, t, grid)?.max_abs()),
        }
    }
}

fn scaled_add(u: &Array1<C64>, c: f64, v: &Array1<C64>) -> Array1<C64> {
    let mut out = u.clone();
    out.zip_mut_with(v, |o, &w| *o += c * w);
    out
}

fn rk4_step(
    gen: &Generator,
    clock: &Clock,
    tau: f64,
    h: f64,
    u: &Array1<C64>,
) -> Result<Array1<C64>> {
    let rhs = |tq: f64, v: &Array1<C64>| -> Result<Array1<C64>> {
        let w = clock.weight(tq);
        Ok(gen.apply(clock.t_of(tq), v)?.mapv_into(|z| z * (-w)))
    };
    let k1 = rhs(tau, u)?;
    let k2 = rhs(tau + 0.5 * h, &scaled_add(u, 0.5 * h, &k1))?;
    let k3 = rhs(tau + 0.5 * h, &scaled_add(u, 0.5 * h, &k2))?;
    let k4 = rhs(tau + h, &scaled_add(u, h, &k3))?;
    let mut out = u.clone();
    out.zip_mut_with(&k1, |o, &v| *o += (h / 6.0) * v);
    out.zip_mut_with(&k2, |o, &v| *o += (h / 3.0) * v);
    out.zip_mut_with(&k3, |o, &v| *o += (h / 3.0) * v);
    out.zip_mut_with(&k4, |o, &v| *o += (h / 6.0) * v);
    Ok(out)
}

/// Step count keeping weight(tau) |q| inside the RK4 stability interval.
fn cfl_steps(gen: &Generator, clock: &Clock, tau_end: f64) -> Result<usize> {
    let mut top = 0.0f64;
    for i in 0..=4 {
        let tau = tau_end * i as f64 / 4.0;
        top = top.max(clock.weight(tau) * gen.magnitude_at(clock.t_of(tau))?);
    }
    let n = (tau_end * top / RK4_STABLE_STEP).ceil();
    if !(n.is_finite() && n < MAX_REF_STEPS as f64) {
        return Err(Error::Reference(format!(
            "generator magnitude {top:.3e} needs more than {MAX_REF_STEPS} stable steps"
        )));
    }
    Ok((n as usize).max(MIN_REF_STEPS))
}

/// One RK4 transit of [0, tau_end] recording the state at each requested tau.
/// n sets the total step budget; each segment gets its proportional share,
/// at least one step.
fn rk4_path_once(
    gen: &Generator,
    clock: &Clock,
    tau_times: &[f64],
    u0: &Array1<C64>,
    n: usize,
) -> Result<Vec<Array1<C64>>> {
    let tau_end = *tau_times.last().unwrap();
    let mut out = Vec::with_capacity(tau_times.len());
    let mut u = u0.clone();
    let mut tau_prev = 0.0;
    for &tau_k in tau_times {
        let seg = tau_k - tau_prev;
        if seg > 0.0 {
            let m = ((n as f64 * seg / tau_end).ceil() as usize).max(1);
            let h = seg / m as f64;
            for i in 0..m {
                u = rk4_step(gen, clock, tau_prev + i as f64 * h, h, &u)?;
            }
        }
        out.push(u.clone());
        tau_prev = tau_k;
    }
    Ok(out)
}

fn path_gap(a: &[Array1<C64>], b: &[Array1<C64>], grid: &PeriodicGrid) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| l2_distance(x, y, grid))
        .fold(0.0, f64::max)
}

/// Step-halved RK4 with a measured self-convergence certificate: the accepted
/// run differs from its half-step predecessor by less than tol/10 in L2 at
/// every requested time.
fn rk4_certified(
    gen: &Generator,
    clock: &Clock,
    tau_times: &[f64],
    u0: &Array1<C64>,
    tol: f64,
    max_halvings: usize,
) -> Result<(Vec<Array1<C64>>, usize, f64)> {
    let grid = gen.grid();
    let tau_end = *tau_times.last().unwrap();
    let mut n = cfl_steps(gen, clock, tau_end)?;
    let mut prev = rk4_path_once(gen, clock, tau_times, u0, n)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_halvings {
        if n * 2 > MAX_REF_STEPS {
            return Err(Error::Reference(format!(
                "step count {n} exhausted before self-convergence (last change {change:.3e})"
            )));
        }
        n *= 2;
        let next = rk4_path_once(gen, clock, tau_times, u0, n)?;
        change = path_gap(&prev, &next, grid);
        if !change.is_finite() {
            return Err(Error::Reference(
                "reference solution lost finiteness during step halving".into(),
            ));
        }
        if change < tol / 10.0 {
            return Ok((next, n, change));
        }
        prev = next;
    }
    Err(Error::Reference(format!(
        "step halving stalled at change {change:.3e} after {max_halvings} halvings (target {:.3e})",
        tol / 10.0
    )))
}

fn simpson_recurse(
    f: &dyn Fn(f64) -> C64,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<C64> {
    let m = 0.5 * (a + b);
    let lm = f(0.5 * (a + m));
    let rm = f(0.5 * (m + b));
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Reference(
            "exponent quadrature exhausted its recursion depth".into(),
        ));
    }
    Ok(simpson_recurse(f, a, m, fa, lm, fm, left, 0.5 * tol, depth - 1, evals)?
        + simpson_recurse(f, m, b, fm, rm, fb, right, 0.5 * tol, depth - 1, evals)?)
}

fn simpson_adaptive(
    f: &dyn Fn(f64) -> C64,
    a: f64,
    b: f64,
    tol: f64,
    evals: &mut usize,
) -> Result<C64> {
    if b <= a {
        return Ok(C64::default());
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    *evals += 3;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 40, evals)
}

/// True when the sampled symbol has no x-variation anywhere on the lattice,
/// checked at four times across [0, t_final].
pub(crate) fn x_independent_on_lattice(
    sym: &SymbolFunction,
    grid: &PeriodicGrid,
    t_final: f64,
) -> Result<bool> {
    for frac in [0.0, 0.37, 0.71, 1.0] {
        let s = sample(sym, frac * t_final, grid)?;
        let vals = s.values();
        let scale = s.max_abs().max(1.0);
        for k in 0..vals.ncols() {
            let v0 = vals[(0, k)];
            for j in 1..grid.midpoint_total() {
                if (vals[(j, k)] - v0).norm() > 1e-12 * scale {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Exact multiplier solve: u_hat(t, xi) = u0_hat(xi) exp(-I(t, xi)) with the
/// exponent integral done by adaptive Simpson in the clock variable. Returns
/// the path, the evaluation count, and the measured change under a tolerance
/// refinement.
fn multiplier_path(
    sym: &SymbolFunction,
    grid: &PeriodicGrid,
    clock: &Clock,
    times: &[f64],
    u0: &GridField,
    tol: f64,
) -> Result<(Vec<GridField>, usize, f64)> {
    let hat0 = fourier_forward(u0);
    let x0 = grid.midpoint_coords(0);
    let mut evals = 0usize;
    let run = |tol_i: f64, evals: &mut usize| -> Result<Vec<GridField>> {
        let mut acc: Vec<C64> = vec![C64::default(); grid.total()];
        let mut out = Vec::with_capacity(times.len());
        let mut tau_prev = 0.0;
        for &t_k in times {
            let tau_k = clock.tau_of(t_k);
            if tau_k > tau_prev {
                for (k, a) in acc.iter_mut().enumerate() {
                    let xi = grid.freq_coords(k);
                    let f = |tau: f64| -> C64 {
                        clock.weight(tau) * sym.eval(clock.t_of(tau), &x0, &xi)
                    };
                    *a += simpson_adaptive(&f, tau_prev, tau_k, tol_i, evals)?;
                }
            }
            let mut hat = hat0.values().clone();
            for (v, a) in hat.iter_mut().zip(acc.iter()) {
                let z = -*a;
                *v = if z.re < EXP_CLIP { C64::default() } else { *v * z.exp() };
            }
            out.push(fourier_inverse(&GridField::from_values(grid, hat)?));
            tau_prev = tau_k;
        }
        Ok(out)
    };
    let coarse = run(tol / 10.0, &mut evals)?;
    let fine = run(tol / 100.0, &mut evals)?;
    let mut change = 0.0f64;
    for (a, b) in coarse.iter().zip(fine.iter()) {
        change = change.max(a.sub(b)?.l2_norm());
    }
    if !(change < tol / 10.0) {
        return Err(Error::Reference(format!(
            "exponent quadrature refinement moved the output by {change:.3e} (target {:.3e})",
            tol / 10.0
        )));
    }
    Ok((fine, evals, change))
}

/// Dense transit matrix of an x-independent evolution: diagonal in Fourier
/// with entries exp(-I(t_final, xi)), the exponent integrals done by the same
/// certified two-run quadrature as the multiplier path. Returned in physical
/// coordinates so it composes with the other transit producers.
pub(crate) fn multiplier_transit(
    sym: &SymbolFunction,
    grid: &PeriodicGrid,
    clock: &Clock,
    t_final: f64,
    tol: f64,
) -> Result<(Array2<C64>, usize, f64)> {
    let x0 = grid.midpoint_coords(0);
    let tau_end = clock.tau_of(t_final);
    let mut evals = 0usize;
    let mut run = |tol_i: f64| -> Result<Vec<C64>> {
        (0..grid.total())
            .map(|k| {
                let xi = grid.freq_coords(k);
                let f = |tau: f64| -> C64 {
                    clock.weight(tau) * sym.eval(clock.t_of(tau), &x0, &xi)
                };
                let a = simpson_adaptive(&f, 0.0, tau_end, tol_i, &mut evals)?;
                Ok(if -a.re < EXP_CLIP { C64::default() } else { (-a).exp() })
            })
            .collect()
    };
    let coarse = run(tol / 10.0)?;
    let fine = run(tol / 100.0)?;
    let change = coarse
        .iter()
        .zip(fine.iter())
        .map(|(c, f)| (c - f).norm())
        .fold(0.0, f64::max);
    if !(change < tol / 10.0) {
        return Err(Error::Reference(format!(
            "exponent quadrature refinement moved the transit by {change:.3e} (target {:.3e})",
            tol / 10.0
        )));
    }
    let n = grid.total();
    let mut m = Array2::<C64>::zeros((n, n));
    for col in 0..n {
        let mut delta = Array1::<C64>::zeros(n);
        delta[col] = C64::new(1.0, 0.0);
        let mut hat = fourier_forward(&GridField::from_values(grid, delta)?);
        for (v, d) in hat.values_mut().iter_mut().zip(fine.iter()) {
            *v *= d;
        }
        let out = fourier_inverse(&hat);
        m.column_mut(col).assign(out.values());
    }
    Ok((m, evals, change))
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// One transit of a fourth-order Magnus integrator with n substeps: per
/// substep, Omega from two Gauss nodes plus the leading commutator
/// correction, then the dense exponential.
fn magnus_once(gen: &Generator, clock: &Clock, tau_end: f64, n: usize) -> Result<Array2<C64>> {
    let size = gen.grid().total();
    let mut u = identity(size);
    let h = tau_end / n as f64;
    let (c1, c2) = (0.5 - SQRT3 / 6.0, 0.5 + SQRT3 / 6.0);
    for i in 0..n {
        let s = i as f64 * h;
        let (tau1, tau2) = (s + c1 * h, s + c2 * h);
        let m1 = gen
            .dense_at(clock.t_of(tau1))?
            .mapv_into(|z| z * clock.weight(tau1));
        let m2 = gen
            .dense_at(clock.t_of(tau2))?
            .mapv_into(|z| z * clock.weight(tau2));
        // A(tau) = -M(tau); Omega = (h/2)(A1 + A2) + (sqrt3 h^2/12)[A2, A1].
        let mut omega = (&m1 + &m2).mapv_into(|z| z * (-0.5 * h));
        let comm = m2.dot(&m1) - m1.dot(&m2);
        omega.zip_mut_with(&comm, |o, &c| *o += (SQRT3 * h * h / 12.0) * c);
        u = expm(&omega)?.dot(&u);
    }
    Ok(u)
}

/// Substep-halved Magnus transit matrix for [0, t_final] with a measured
/// self-convergence certificate (entrywise change below tol/10).
pub(crate) fn magnus_certified(
    gen: &Generator,
    clock: &Clock,
    t_final: f64,
    tol: f64,
    max_halvings: usize,
) -> Result<(Array2<C64>, usize, f64)> {
    let tau_end = clock.tau_of(t_final);
    let mut n = 32usize;
    let mut prev = magnus_once(gen, clock, tau_end, n)?;
    let mut change = f64::INFINITY;
    for _ in 0..max_halvings {
        if n * 2 > MAX_REF_STEPS {
            return Err(Error::Reference(format!(
                "Magnus substep count {n} exhausted before self-convergence"
            )));
        }
        n *= 2;
        let next = magnus_once(gen, clock, tau_end, n)?;
        change = max_abs_diff(&prev, &next);
        if !change.is_finite() {
            return Err(Error::Reference(
                "Magnus transit lost finiteness during substep halving".into(),
            ));
        }
        if change < tol / 10.0 {
            return Ok((next, n, change));
        }
        prev = next;
    }
    Err(Error::Reference(format!(
        "Magnus substep halving stalled at change {change:.3e} (target {:.3e})",
        tol / 10.0
    )))
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Invalid("reference needs at least one output time".into()));
    }
    if !(times[0].is_finite() && times[0] >= 0.0) {
        return Err(Error::Invalid(format!("output times must be >= 0, got {}", times[0])));
    }
    for w in times.windows(2) {
        if !(w[1].is_finite() && w[1] > w[0]) {
            return Err(Error::Invalid(format!(
                "output times must increase strictly: {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Reference values of the evolution at each requested time (strictly
/// increasing, all >= 0). Picks the exact multiplier solver when the symbol
/// is x-independent on the lattice, the method of lines otherwise; both are
/// self-certified, and cross-validated against an independent integrator
/// unless opts turns that off.
pub fn reference_path(
    sym: &SymbolFunction,
    times: &[f64],
    u0: &GridField,
    opts: &ReferenceOptions,
) -> Result<(Vec<GridField>, ReferenceSolution)> {
    validate_times(times)?;
    if opts.tol < MIN_REFERENCE_TOL {
        return Err(Error::Invalid(format!(
            "reference tolerance {:.3e} below the certification floor {MIN_REFERENCE_TOL:.0e}",
            opts.tol
        )));
    }
    let grid = u0.grid().clone();
    let t_final = *times.last().unwrap();
    if t_final == 0.0 {
        let sol = ReferenceSolution {
            solver: ReferenceSolver::ExactMultiplier,
            tolerance: 0.0,
            steps: 0,
            cross_error: None,
        };
        return Ok((vec![u0.clone(); times.len()], sol));
    }
    let clock = Clock::for_symbol(sym);
    let cross_bound = 10.0 * opts.tol;

    if x_independent_on_lattice(sym, &grid, t_final)? {
        let (path, evals, self_err) =
            multiplier_path(sym, &grid, &clock, times, u0, opts.tol)?;
        let cross_error = if opts.cross_validate {
            let gen = Generator::new(sym, &grid, t_final)?;
            let tau_final = [clock.tau_of(t_final)];
            let (rk4, _, _) = rk4_certified(
                &gen,
                &clock,
                &tau_final,
                u0.values(),
                cross_bound,
                opts.max_halvings,
            )?;
            let gap = l2_distance(path.last().unwrap().values(), &rk4[0], &grid);
            if gap > cross_bound {
                return Err(Error::Reference(format!(
                    "multiplier and method-of-lines references disagree by {gap:.3e} (allowed {cross_bound:.3e})"
                )));
            }
            Some(gap)
        } else {
            None
        };
        let sol = ReferenceSolution {
            solver: ReferenceSolver::ExactMultiplier,
            tolerance: self_err,
            steps: evals,
            cross_error,
        };
        return Ok((path, sol));
    }

    let gen = Generator::new(sym, &grid, t_final)?;
    let tau_times: Vec<f64> = times.iter().map(|&t| clock.tau_of(t)).collect();
    let (vals, steps, self_err) = rk4_certified(
        &gen,
        &clock,
        &tau_times,
        u0.values(),
        opts.tol,
        opts.max_halvings,
    )?;
    let cross_error = if opts.cross_validate {
        let (m, _, _) = magnus_certified(&gen, &clock, t_final, cross_bound, opts.max_halvings)?;
        let gap = l2_distance(vals.last().unwrap(), &m.dot(u0.values()), &grid);
        if gap > cross_bound {
            return Err(Error::Reference(format!(
                "method-of-lines and Magnus references disagree by {gap:.3e} (allowed {cross_bound:.3e})"
            )));
        }
        Some(gap)
    } else {
        None
    };
    let path = vals
        .into_iter()
        .map(|v| GridField::from_values(&grid, v))
        .collect::<Result<Vec<_>>>()?;
    let sol = ReferenceSolution {
        solver: ReferenceSolver::MethodOfLines,
        tolerance: self_err,
        steps,
        cross_error,
    };
    Ok((path, sol))
}

/// Reference value at a single final time.
pub fn reference_solve(
    sym: &SymbolFunction,
    t_final: f64,
    u0: &GridField,
    opts: &ReferenceOptions,
) -> Result<(GridField, ReferenceSolution)> {
    let (mut path, sol) = reference_path(sym, &[t_final], u0, opts)?;
    Ok((path.pop().unwrap(), sol))
}

/// Reference by brute multi-product: n_ref uniform frozen-coefficient steps,
/// folded streaming so nothing is cached. First-order accurate; the returned
/// tolerance is the measured gap to the n_ref/2 run, which is the honest size
/// of what this solver leaves unresolved.
pub fn fine_multiproduct(
    sym: &SymbolFunction,
    t_final: f64,
    u0: &GridField,
    n_ref: usize,
) -> Result<(GridField, ReferenceSolution)> {
    if n_ref < 2 {
        return Err(Error::Invalid(format!(
            "fine multi-product needs at least 2 steps, got {n_ref}"
        )));
    }
    if t_final == 0.0 {
        let sol = ReferenceSolution {
            solver: ReferenceSolver::FineMultiproduct,
            tolerance: 0.0,
            steps: 0,
            cross_error: None,
        };
        return Ok((u0.clone(), sol));
    }
    let grid = u0.grid();
    let run = |n: usize| -> Result<GridField> {
        let sub = Subdivision::uniform(t_final, n)?;
        let knots = sub.knots().to_vec();
        let mut v = u0.values().clone();
        for i in 0..n {
            v = step(sym, knots[i], knots[i + 1], grid)?.apply_vec(&v);
        }
        GridField::from_values(grid, v)
    };
    let half = run(n_ref / 2)?;
    let full = run(n_ref)?;
    let change = full.sub(&half)?.l2_norm();
    let sol = ReferenceSolution {
        solver: ReferenceSolver::FineMultiproduct,
        tolerance: change,
        steps: n_ref,
        cross_error: None,
    };
    Ok((full, sol))
}
