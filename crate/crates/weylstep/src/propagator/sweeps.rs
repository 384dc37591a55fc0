//! Measurement sweeps over the propagator: per-step sharp norm constants,
//! multi-product stability, one-step consistency defects, and convergence
//! rates against certified references.
//!
//! Sweep points run in parallel; every sweep collects its rows in input
//! order, so output is deterministic for a fixed seed.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dense::{adjoint, identity};
use crate::error::{Error, Result};
use crate::grid::{fourier_inverse, sobolev_norm, GridField, PeriodicGrid};
use crate::rates::{fit_rate, spearman, RateFit};
use crate::symbols::{exp_of_sampled, exp_symbol, sample, verify_ellipticity, SymbolFunction};
use crate::weyl::{
    norm_estimate_lenient, operator_norm, quantize, weight_vec, ComposedOp, DenseOp, DiffOp,
    LinOp, NormOptions,
};

use super::reference::{magnus_certified, multiplier_transit, reference_path,
    x_independent_on_lattice, Clock, Generator, ReferenceOptions, ReferenceSolution};
use super::{l2_distance, MultiProduct, Subdivision};

#[derive(Clone, Copy, Debug)]
pub struct SharpNormRow {
    pub h: f64,
    /// (H^s, H^s) norm of the one-step operator.
    pub norm: f64,
    /// (norm - 1) / h.
    pub ratio: f64,
    pub iterations: usize,
}

/// Per-step norms over a list of step lengths, and the growth constant they
/// support: norm <= 1 + c_fit h for every sampled h.
#[derive(Clone, Debug)]
pub struct SharpNormSweep {
    /// Rows in decreasing h order.
    pub rows: Vec<SharpNormRow>,
    /// max over rows of (norm - 1)/h, floored at zero.
    pub c_fit: f64,
    /// Running max of the ratio along decreasing h.
    pub running_max: Vec<f64>,
}

impl SharpNormSweep {
    /// Relative spread of the running max over the `window` finest steps;
    /// small values mean the fitted constant has saturated.
    pub fn tail_variation(&self, window: usize) -> f64 {
        let tail = &self.running_max[self.running_max.len().saturating_sub(window.max(1))..];
        let hi = tail.iter().cloned().fold(f64::MIN, f64::max);
        let lo = tail.iter().cloned().fold(f64::MAX, f64::min);
        if hi <= 0.0 {
            0.0
        } else {
            (hi - lo) / hi
        }
    }

    pub fn bound_holds(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.norm <= 1.0 + self.c_fit * r.h + 1e-12)
    }
}

/// Norms of exp(-h q(t))^w over h_list in (H^s, H^s). The symbol must carry
/// a valid ellipticity certificate at time t; norm estimation failures
/// propagate.
pub fn sharp_norm_sweep(
    sym: &SymbolFunction,
    t: f64,
    s: f64,
    h_list: &[f64],
    grid: &PeriodicGrid,
    opts: &NormOptions,
) -> Result<SharpNormSweep> {
    if h_list.is_empty() {
        return Err(Error::Invalid("sharp norm sweep needs at least one step".into()));
    }
    for &h in h_list {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Invalid(format!("step lengths must be positive, got {h}")));
        }
    }
    let report = verify_ellipticity(sym, t, grid)?;
    if !report.ok {
        return Err(Error::Invalid(format!(
            "ellipticity margin {:.3e} below declared constant {:.3e}",
            report.margin, report.required
        )));
    }
    let mut hs = h_list.to_vec();
    hs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rows = hs
        .par_iter()
        .map(|&h| -> Result<SharpNormRow> {
            let p = exp_symbol(sym, t, h, grid)?;
            let est = operator_norm(&quantize(&p), s, s, opts)?;
            Ok(SharpNormRow {
                h,
                norm: est.value,
                ratio: (est.value - 1.0) / h,
                iterations: est.iterations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut c = 0.0f64;
    let running_max = rows
        .iter()
        .map(|r| {
            c = c.max(r.ratio.max(0.0));
            c
        })
        .collect();
    Ok(SharpNormSweep { rows, c_fit: c, running_max })
}

#[derive(Clone, Debug)]
pub struct StabilityRow {
    pub n_steps: usize,
    /// (H^s, H^s) norm of the partial product at each knot t_1 .. t_N.
    pub knot_norms: Vec<f64>,
    pub sup_norm: f64,
    /// Every knot norm estimate reached the residual target.
    pub converged: bool,
}

/// Multi-product norms over uniform subdivisions, checked against the
/// exponential bound certified by a sharp norm sweep.
#[derive(Clone, Debug)]
pub struct StabilitySweep {
    pub rows: Vec<StabilityRow>,
    pub sup: f64,
    /// exp(c_fit t_final).
    pub bound: f64,
    pub within_bound: bool,
    /// Spearman correlation of growth beyond the unit level against step
    /// count. Sups at or below 1 + GROWTH_FLOOR count as non-growing and
    /// enter as exact ties, so dissipative families report 0 even though
    /// their sups creep toward 1 under refinement; a single subdivision also
    /// reports 0.
    pub trend: f64,
}

/// Growth below this margin above the unit level is treated as none; the
/// margin absorbs the norm estimator's residual tolerance.
pub const GROWTH_FLOOR: f64 = 1e-6;

/// Top singular value of b by power iteration on b^H b, warm-started from v.
/// v is left holding the final iterate so consecutive calls on slowly varying
/// matrices converge fast.
fn top_singular_warm(b: &Array2<C64>, v: &mut Array1<C64>, opts: &NormOptions) -> (f64, bool) {
    let bh = adjoint(b);
    let norm_of = |u: &Array1<C64>| u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = norm_of(v);
    if !(nv > 0.0) {
        v.fill(C64::new(1.0, 0.0));
    } else {
        v.mapv_inplace(|z| z / nv);
    }
    let mut rho = 0.0f64;
    for _ in 0..opts.max_iters {
        let bv = b.dot(&*v);
        let w = bh.dot(&bv);
        rho = v.iter().zip(w.iter()).map(|(a, c)| (a.conj() * c).re).sum();
        let nw = norm_of(&w);
        if nw == 0.0 {
            return (0.0, true);
        }
        let mut res = 0.0;
        for (wi, vi) in w.iter().zip(v.iter()) {
            res += (wi - rho * vi).norm_sqr();
        }
        let res_rel = res.sqrt() / rho.max(f64::MIN_POSITIVE);
        v.zip_mut_with(&w, |slot, &wi| *slot = wi / nw);
        if res_rel <= opts.tol {
            return (rho.max(0.0).sqrt(), true);
        }
    }
    (rho.max(0.0).sqrt(), false)
}

/// Dense matrix of the Sobolev weight <D>^s.
fn weight_matrix(grid: &PeriodicGrid, s: f64) -> Array2<C64> {
    let n = grid.total();
    let mut m = Array2::default((n, n));
    let mut e = Array1::default(n);
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        let col = weight_vec(grid, &e, s);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
        e[j] = C64::default();
    }
    m
}

fn seeded_vector(n: usize, seed: u64) -> Array1<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array1::from_shape_fn(n, |_| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// Norms of the multi-product at every knot, for each uniform subdivision in
/// n_list, against the bound exp(c_fit t_final). Norm estimates that hit the
/// iteration cap are kept (they are lower bounds) and flagged per row.
pub fn stability_sweep(
    sym: &SymbolFunction,
    t_final: f64,
    s: f64,
    n_list: &[usize],
    c_fit: f64,
    grid: &PeriodicGrid,
    opts: &NormOptions,
) -> Result<StabilitySweep> {
    if n_list.is_empty() {
        return Err(Error::Invalid("stability sweep needs at least one subdivision".into()));
    }
    if !(c_fit.is_finite() && c_fit >= 0.0) {
        return Err(Error::Invalid(format!("growth constant must be finite and >= 0, got {c_fit}")));
    }
    let weights = if s == 0.0 {
        None
    } else {
        Some((weight_matrix(grid, s), weight_matrix(grid, -s)))
    };
    let rows = n_list
        .par_iter()
        .map(|&n| -> Result<StabilityRow> {
            let mp = MultiProduct::new(sym, Subdivision::uniform(t_final, n)?, grid);
            let mut m = identity(grid.total());
            let mut v = seeded_vector(grid.total(), opts.seed);
            let mut knot_norms = Vec::with_capacity(n);
            let mut converged = true;
            for i in 0..n {
                m = mp.step_op(i)?.kernel().dot(&m);
                let weighted;
                let b = match &weights {
                    None => &m,
                    Some((wp, wm)) => {
                        weighted = wp.dot(&m).dot(wm);
                        &weighted
                    }
                };
                let (val, conv) = top_singular_warm(b, &mut v, opts);
                knot_norms.push(val);
                converged &= conv;
            }
            let sup_norm = knot_norms.iter().cloned().fold(0.0, f64::max);
            Ok(StabilityRow { n_steps: n, knot_norms, sup_norm, converged })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = rows.iter().map(|r| r.sup_norm).fold(0.0, f64::max);
    let bound = (c_fit * t_final).exp();
    let trend = if rows.len() < 2 {
        0.0
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| r.n_steps as f64).collect();
        let ys: Vec<f64> =
            rows.iter().map(|r| r.sup_norm.max(1.0 + GROWTH_FLOOR)).collect();
        spearman(&xs, &ys)?
    };
    Ok(StabilitySweep {
        rows,
        sup,
        bound,
        within_bound: sup <= bound * (1.0 + 1e-9),
        trend,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct ConsistencyRow {
    pub h: f64,
    /// (H^s, H^{s-2}) norm of the one-step defect.
    pub defect: f64,
    pub converged: bool,
}

/// Defect decay of the frozen-coefficient step against the generator sampled
/// at the far end of the interval. The fitted slope tracks the time
/// regularity of the symbol: 1 for smooth dependence, alpha for Holder
/// families.
#[derive(Clone, Debug)]
pub struct ConsistencySweep {
    pub rows: Vec<ConsistencyRow>,
    pub fit: RateFit,
    pub all_converged: bool,
}

/// Norms of D_h = q(t+h)^w p_h^w - (q(t) p_h)^w in (H^s, H^{s-2}) over
/// h_list, where p_h = exp(-h q(t)). Needs at least four step lengths for
/// the rate fit.
///
/// The window must stop where exp(-h q) is still resolved at the band edge:
/// once h * q(xi_max) drops to O(1) the truncated tail of p_h dominates the
/// defect and the measured rate flattens. On an N-point grid with q ~ xi^2
/// that floor sits near h = N^-2 up to the ellipticity constants.
pub fn consistency_sweep(
    sym: &SymbolFunction,
    t: f64,
    s: f64,
    h_list: &[f64],
    grid: &PeriodicGrid,
    opts: &NormOptions,
) -> Result<ConsistencySweep> {
    if h_list.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, got: h_list.len() });
    }
    for &h in h_list {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Invalid(format!("step lengths must be positive, got {h}")));
        }
    }
    let mut hs = h_list.to_vec();
    hs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rows = hs
        .par_iter()
        .map(|&h| -> Result<ConsistencyRow> {
            let q_now = sample(sym, t, grid)?;
            let q_next = sample(sym, t + h, grid)?;
            let p = exp_of_sampled(&q_now, h);
            let stepped: Vec<Arc<dyn LinOp>> =
                vec![Arc::new(quantize(&q_next)), Arc::new(quantize(&p))];
            let left = ComposedOp::new(stepped)?;
            let right = quantize(&q_now.mul(&p)?);
            let defect = DiffOp::new(Arc::new(left), Arc::new(right))?;
            let (val, converged) = norm_estimate_lenient(&defect, s, s - 2.0, opts);
            Ok(ConsistencyRow { h, defect: val, converged })
        })
        .collect::<Result<Vec<_>>>()?;
    let scales: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let defects: Vec<f64> = rows.iter().map(|r| r.defect).collect();
    let fit = fit_rate(&scales, &defects)?;
    let all_converged = rows.iter().all(|r| r.converged);
    Ok(ConsistencySweep { rows, fit, all_converged })
}

#[derive(Clone, Copy, Debug)]
pub struct ConvergenceOptions {
    /// Reference solver tolerance; cross-checks must agree to 10 tol.
    pub tol: f64,
    /// Power iteration settings for the dense difference norms.
    pub norm: NormOptions,
    pub probe_seed: u64,
    /// How many of the largest subdivisions also get a dense
    /// difference-operator norm under metric (the probe max alone is only a
    /// lower bound).
    pub dense_rows: usize,
    pub max_halvings: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            norm: NormOptions::default().with_max_iters(20_000),
            probe_seed: 0xA55A_5AA5,
            dense_rows: 2,
            max_halvings: 20,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n_steps: usize,
    /// Largest step of the subdivision.
    pub mesh: f64,
    /// Operator-gap surrogate: worst probe ratio
    /// ||(W - U) u||_{H^{s-1+r}} / ||u||_{H^s}, sharpened by a dense
    /// difference norm on the flagged rows.
    pub err_op: f64,
    /// sqrt(sum over knots of ||(W - U) u0||_{H^s}^2 dt).
    pub err_time: f64,
    /// ||(W - U) u0||_{H^{s-1+r}} at t_final.
    pub err_final: f64,
    pub dense_checked: bool,
    pub converged: bool,
}

/// Convergence of the multi-product toward the certified reference over a
/// family of uniform subdivisions, measured three ways per row.
#[derive(Clone, Debug)]
pub struct ConvergenceSweep {
    pub s: f64,
    pub r: f64,
    pub rows: Vec<ConvergenceRow>,
    /// log-log fits over mesh; None when the errors are too degenerate to
    /// fit (all at the solver floor).
    pub fit_op: Option<RateFit>,
    pub fit_time: Option<RateFit>,
    pub fit_final: Option<RateFit>,
    pub reference: ReferenceSolution,
}

/// Deterministic probe fields: random Fourier data decaying like
/// <xi>^-(|s|+2), normalized in H^s.
fn probe_basis(grid: &PeriodicGrid, s: f64, seed: u64, count: usize) -> Vec<GridField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let hat = Array1::from_shape_fn(grid.total(), |k| {
                let w = (1.0 + grid.freq_norm_sq(k)).powf(-0.5 * (s.abs() + 2.0));
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * w
            });
            let f = fourier_inverse(&GridField::from_values(grid, hat).unwrap());
            let nrm = sobolev_norm(&f, s);
            f.scale(C64::new(1.0 / nrm, 0.0))
        })
        .collect()
}

struct RowBundle {
    n_steps: usize,
    mesh: f64,
    err_time: f64,
    /// Per requested r: (probe max, final error).
    per_r: Vec<(f64, f64)>,
    /// Per requested r: dense difference norm, when computed.
    dense: Option<Vec<(f64, bool)>>,
}

/// One sweep per requested Sobolev transfer r, sharing the reference work.
/// The reference for u0 is the certified path solver; probe references come
/// from the dense Magnus transit matrix, which is itself cross-checked
/// against the path solver on u0.
pub fn convergence_sweep_multi(
    sym: &SymbolFunction,
    t_final: f64,
    s: f64,
    rs: &[f64],
    n_list: &[usize],
    u0: Option<&GridField>,
    grid: &PeriodicGrid,
    opts: &ConvergenceOptions,
) -> Result<Vec<ConvergenceSweep>> {
    if rs.is_empty() {
        return Err(Error::Invalid("convergence sweep needs at least one r".into()));
    }
    for &r in rs {
        if !(r.is_finite() && (0.0..1.0).contains(&r)) {
            return Err(Error::Invalid(format!("transfer order r must lie in [0, 1), got {r}")));
        }
    }
    if n_list.is_empty() {
        return Err(Error::Invalid("convergence sweep needs at least one subdivision".into()));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::Invalid(format!("final time must be positive, got {t_final}")));
    }
    if let Some(u) = u0 {
        if u.grid() != grid {
            return Err(Error::GridMismatch("initial state grid does not match sweep grid".into()));
        }
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();

    let probes = probe_basis(grid, s, opts.probe_seed, 8);
    let u0 = u0.cloned().unwrap_or_else(|| probes[0].clone());

    let subs = ns
        .iter()
        .map(|&n| Subdivision::uniform(t_final, n))
        .collect::<Result<Vec<_>>>()?;
    let mut union: Vec<f64> = subs
        .iter()
        .flat_map(|sub| sub.knots()[1..].iter().cloned())
        .collect();
    union.sort_by(|a, b| a.partial_cmp(b).unwrap());
    union.dedup();
    let knot_index = |t: f64| -> Result<usize> {
        union
            .binary_search_by(|k| k.partial_cmp(&t).unwrap())
            .map_err(|_| Error::Invalid(format!("knot {t} missing from reference path")))
    };

    let ref_opts = ReferenceOptions {
        tol: opts.tol,
        cross_validate: true,
        max_halvings: opts.max_halvings,
    };
    let (ref_states, mut reference) = reference_path(sym, &union, &u0, &ref_opts)?;

    let clock = Clock::for_symbol(sym);
    let cross_bound = 10.0 * opts.tol;
    // Transit matrix behind the probe references and the dense difference
    // norms. Multiplier evolutions get the certified diagonal (the path
    // reference has already been cross-checked against the method of lines);
    // everything else gets the Magnus transit as an independent integrator.
    let m_ref = if x_independent_on_lattice(sym, grid, t_final)? {
        let (m, _, _) = multiplier_transit(sym, grid, &clock, t_final, opts.tol)?;
        m
    } else {
        let gen = Generator::new(sym, grid, t_final)?;
        let (m, _, _) = magnus_certified(&gen, &clock, t_final, cross_bound, opts.max_halvings)?;
        m
    };
    let transit_gap = l2_distance(
        ref_states.last().unwrap().values(),
        &m_ref.dot(u0.values()),
        grid,
    );
    if transit_gap > cross_bound {
        return Err(Error::Reference(format!(
            "path and transit references disagree by {transit_gap:.3e} (allowed {cross_bound:.3e})"
        )));
    }
    reference.cross_error =
        Some(reference.cross_error.map_or(transit_gap, |c| c.max(transit_gap)));

    let probe_refs: Vec<Array1<C64>> = probes.iter().map(|p| m_ref.dot(p.values())).collect();
    let dense_from = ns.len().saturating_sub(opts.dense_rows);

    let bundles = subs
        .par_iter()
        .enumerate()
        .map(|(row, sub)| -> Result<RowBundle> {
            let n = sub.steps();
            let knots = sub.knots().to_vec();
            let mp = MultiProduct::new(sym, sub.clone(), grid);
            let mut vu = u0.values().clone();
            let mut vps: Vec<Array1<C64>> = probes.iter().map(|p| p.values().clone()).collect();
            let mut time_acc = 0.0;
            for i in 0..n {
                let op = mp.step_op(i)?;
                vu = op.apply_vec(&vu);
                for vp in &mut vps {
                    *vp = op.apply_vec(vp);
                }
                let t_k = knots[i + 1];
                let diff = GridField::from_values(grid, &vu - ref_states[knot_index(t_k)?].values())?;
                let dn = sobolev_norm(&diff, s);
                time_acc += dn * dn * (t_k - knots[i]);
            }
            let final_diff = GridField::from_values(
                grid,
                &vu - ref_states[knot_index(t_final)?].values(),
            )?;
            let probe_diffs: Vec<GridField> = vps
                .iter()
                .zip(probe_refs.iter())
                .map(|(vp, pr)| GridField::from_values(grid, vp - pr))
                .collect::<Result<_>>()?;
            let per_r = rs
                .iter()
                .map(|&r| {
                    let level = s - 1.0 + r;
                    let probe_max = probe_diffs
                        .iter()
                        .map(|d| sobolev_norm(d, level))
                        .fold(0.0, f64::max);
                    (probe_max, sobolev_norm(&final_diff, level))
                })
                .collect();
            let dense = if row >= dense_from {
                let w_dense = mp.dense(t_final)?;
                let d_op = DenseOp::new(grid, w_dense - &m_ref)?;
                Some(
                    rs.iter()
                        .map(|&r| norm_estimate_lenient(&d_op, s, s - 1.0 + r, &opts.norm))
                        .collect(),
                )
            } else {
                None
            };
            Ok(RowBundle {
                n_steps: n,
                mesh: sub.mesh(),
                err_time: time_acc.sqrt(),
                per_r,
                dense,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let meshes: Vec<f64> = bundles.iter().map(|b| b.mesh).collect();
    let times: Vec<f64> = bundles.iter().map(|b| b.err_time).collect();
    let fit_time = fit_rate(&meshes, &times).ok();
    Ok(rs
        .iter()
        .enumerate()
        .map(|(ri, &r)| {
            let rows: Vec<ConvergenceRow> = bundles
                .iter()
                .map(|b| {
                    let (probe_max, err_final) = b.per_r[ri];
                    let (err_op, dense_checked, converged) = match &b.dense {
                        Some(d) => (probe_max.max(d[ri].0), true, d[ri].1),
                        None => (probe_max, false, true),
                    };
                    ConvergenceRow {
                        n_steps: b.n_steps,
                        mesh: b.mesh,
                        err_op,
                        err_time: b.err_time,
                        err_final,
                        dense_checked,
                        converged,
                    }
                })
                .collect();
            let ops: Vec<f64> = rows.iter().map(|row| row.err_op).collect();
            let finals: Vec<f64> = rows.iter().map(|row| row.err_final).collect();
            ConvergenceSweep {
                s,
                r,
                rows,
                fit_op: fit_rate(&meshes, &ops).ok(),
                fit_time: fit_time.clone(),
                fit_final: fit_rate(&meshes, &finals).ok(),
                reference,
            }
        })
        .collect())
}

/// Single-r convenience wrapper over convergence_sweep_multi.
pub fn convergence_sweep(
    sym: &SymbolFunction,
    t_final: f64,
    s: f64,
    r: f64,
    n_list: &[usize],
    u0: Option<&GridField>,
    grid: &PeriodicGrid,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceSweep> {
    Ok(convergence_sweep_multi(sym, t_final, s, &[r], n_list, u0, grid, opts)?
        .pop()
        .unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::TrigTerm;

    fn heat() -> SymbolFunction {
        SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0))
            .with_ellipticity(0.9, 1.0)
    }

    fn curved() -> SymbolFunction {
        let terms = vec![
            TrigTerm::new(C64::new(1.0, 0.0), vec![0], vec![2]),
            TrigTerm::new(C64::new(0.25, 0.0), vec![1], vec![2]),
            TrigTerm::new(C64::new(0.25, 0.0), vec![-1], vec![2]),
            TrigTerm::new(C64::new(0.5, 0.0), vec![1], vec![1]),
            TrigTerm::new(C64::new(-0.5, 0.0), vec![-1], vec![1]),
        ];
        SymbolFunction::trig_poly(2.0, terms).with_ellipticity(0.45, 1.0)
    }

    fn norm_opts() -> NormOptions {
        NormOptions::default().with_max_iters(30_000)
    }

    #[test]
    fn multiplier_step_norms_stay_at_one() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let hs = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];
        let sweep = sharp_norm_sweep(&heat(), 0.0, 0.0, &hs, &grid, &norm_opts()).unwrap();
        for row in &sweep.rows {
            assert!((row.norm - 1.0).abs() < 1e-6, "h {}: norm {}", row.h, row.norm);
        }
        assert!(sweep.c_fit < 1e-4);
        assert!(sweep.bound_holds());
        assert!(sweep.tail_variation(3) <= 0.25);
    }

    #[test]
    fn sharp_norm_requires_a_valid_ellipticity_certificate() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let undeclared = SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0));
        assert!(sharp_norm_sweep(&undeclared, 0.0, 0.0, &[0.1], &grid, &norm_opts()).is_err());
        let overdeclared = SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0))
            .with_ellipticity(2.0, 1.0);
        assert!(matches!(
            sharp_norm_sweep(&overdeclared, 0.0, 0.0, &[0.1], &grid, &norm_opts()),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn curved_step_norms_admit_a_finite_constant() {
        let grid = PeriodicGrid::unit(1, 32).unwrap();
        let hs: Vec<f64> = (4..=8).map(|k| 0.5f64.powi(k)).collect();
        let sweep = sharp_norm_sweep(&curved(), 0.0, 0.0, &hs, &grid, &norm_opts()).unwrap();
        assert!(sweep.c_fit.is_finite());
        assert!(sweep.c_fit < 100.0, "c_fit {}", sweep.c_fit);
        assert!(sweep.bound_holds());
        // Rows come back sorted by decreasing h.
        for w in sweep.rows.windows(2) {
            assert!(w[0].h > w[1].h);
        }
    }

    #[test]
    fn multiplier_stability_never_exceeds_one() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let sweep =
            stability_sweep(&heat(), 0.5, 0.0, &[1, 2, 4], 0.0, &grid, &norm_opts()).unwrap();
        assert!(sweep.sup <= 1.0 + 1e-8, "sup {}", sweep.sup);
        assert!(sweep.within_bound);
        assert!(sweep.trend <= 0.5);
        assert!(sweep.rows.iter().all(|r| r.converged));
    }

    #[test]
    fn single_step_stability_matches_the_direct_norm() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let t_final = 0.25;
        let sweep =
            stability_sweep(&curved(), t_final, 1.0, &[1], 10.0, &grid, &norm_opts()).unwrap();
        let p = exp_symbol(&curved(), 0.0, t_final, &grid).unwrap();
        let direct = operator_norm(&quantize(&p), 1.0, 1.0, &norm_opts()).unwrap();
        let gap = (sweep.rows[0].sup_norm - direct.value).abs();
        assert!(gap < 1e-6 * direct.value, "gap {gap:.3e}");
    }

    #[test]
    fn curved_stability_obeys_the_sharp_norm_bound() {
        let grid = PeriodicGrid::unit(1, 32).unwrap();
        let t_final = 0.25;
        // The window covers every step length the stability sweep will use.
        let hs: Vec<f64> = (3..=7).map(|k| 0.5f64.powi(k)).collect();
        let sharp = sharp_norm_sweep(&curved(), 0.0, 0.0, &hs, &grid, &norm_opts()).unwrap();
        let sweep = stability_sweep(
            &curved(),
            t_final,
            0.0,
            &[2, 4, 8, 16],
            sharp.c_fit,
            &grid,
            &norm_opts(),
        )
        .unwrap();
        assert!(
            sweep.within_bound,
            "sup {} exceeds bound {}",
            sweep.sup, sweep.bound
        );
        assert!(sweep.trend <= 0.5, "trend {}", sweep.trend);
    }

    #[test]
    fn consistency_needs_four_step_lengths() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let hs = [0.1, 0.05, 0.025];
        assert!(matches!(
            consistency_sweep(&curved(), 0.0, 0.0, &hs, &grid, &norm_opts()),
            Err(Error::TooFewPoints { need: 4, .. })
        ));
    }

    #[test]
    fn consistency_slope_is_one_for_smooth_time_dependence() {
        // Window floor: below h = 2^-5 on this grid, exp(-h q) is no longer
        // resolved at the band edge and the defect turns upward.
        let grid = PeriodicGrid::unit(1, 32).unwrap();
        let hs: Vec<f64> = (1..=4).map(|k| 0.5f64.powi(k)).collect();
        let sweep = consistency_sweep(&curved(), 0.3, 0.0, &hs, &grid, &norm_opts()).unwrap();
        assert!(sweep.all_converged);
        assert!(
            (sweep.fit.slope - 1.0).abs() < 0.2,
            "slope {}",
            sweep.fit.slope
        );
    }

    #[test]
    fn consistency_slope_tracks_the_holder_exponent() {
        // Multiplier a plus constant b: the Moyal part of the defect cancels
        // exactly, leaving h^alpha (b p)^w and nothing else.
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let a = SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0));
        let b = SymbolFunction::multiplier(0.0, |_| C64::new(2.5, 0.0));
        let sym = SymbolFunction::holder_family(a, b, 0.5);
        let hs: Vec<f64> = (4..=7).map(|k| 0.5f64.powi(k)).collect();
        let sweep = consistency_sweep(&sym, 0.0, 0.0, &hs, &grid, &norm_opts()).unwrap();
        assert!(sweep.all_converged);
        assert!(
            (sweep.fit.slope - 0.5).abs() < 0.05,
            "slope {}",
            sweep.fit.slope
        );
    }

    #[test]
    fn convergence_is_exact_for_static_multipliers() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let opts = ConvergenceOptions { tol: 1e-10, ..Default::default() };
        let sweep =
            convergence_sweep(&heat(), 0.5, 0.0, 0.0, &[2, 4, 8], None, &grid, &opts).unwrap();
        use super::super::reference::ReferenceSolver;
        assert_eq!(sweep.reference.solver, ReferenceSolver::ExactMultiplier);
        for row in &sweep.rows {
            assert!(row.err_op < 1e-8, "n {}: err_op {:.3e}", row.n_steps, row.err_op);
            assert!(row.err_time < 1e-8, "n {}: err_time {:.3e}", row.n_steps, row.err_time);
            assert!(row.err_final < 1e-8, "n {}: err_final {:.3e}", row.n_steps, row.err_final);
        }
    }

    #[test]
    fn convergence_rate_is_first_order_for_lipschitz_time_dependence() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let a = SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0))
            .with_ellipticity(0.9, 1.0);
        let b = SymbolFunction::trig_poly(
            1.0,
            vec![
                TrigTerm::new(C64::new(0.3, 0.0), vec![1], vec![1]),
                TrigTerm::new(C64::new(0.3, 0.0), vec![-1], vec![1]),
            ],
        );
        let sym = SymbolFunction::holder_family(a, b, 1.0);
        let opts = ConvergenceOptions { tol: 1e-9, ..Default::default() };
        let sweep = convergence_sweep(
            &sym,
            0.5,
            0.0,
            0.0,
            &[2, 4, 8, 16, 32],
            None,
            &grid,
            &opts,
        )
        .unwrap();
        let fit_time = sweep.fit_time.as_ref().expect("time fit");
        assert!(
            (fit_time.slope - 1.0).abs() < 0.25,
            "time slope {}",
            fit_time.slope
        );
        let fit_op = sweep.fit_op.as_ref().expect("op fit");
        assert!(
            (fit_op.slope - 1.0).abs() < 0.25,
            "op slope {}",
            fit_op.slope
        );
        assert!(sweep.reference.cross_error.unwrap() <= 1e-8);
    }

    #[test]
    fn convergence_rate_halves_for_holder_half_time_dependence() {
        // t^alpha families are rough only at t = 0 and measure first order
        // over most windows; the lacunary ladder is alpha-rough at every
        // dyadic mesh, so the fitted rates have to track alpha itself.
        let grid = PeriodicGrid::unit(1, 32).unwrap();
        let a = SymbolFunction::multiplier(2.0, |xi| C64::new(xi[0] * xi[0], 0.0))
            .with_ellipticity(0.9, 1.0);
        let b = SymbolFunction::multiplier(0.0, |_| C64::new(0.25, 0.0));
        let sym = SymbolFunction::lacunary_family(a, b, 0.5, 0.5, 6);
        let opts = ConvergenceOptions { tol: 1e-7, dense_rows: 4, ..Default::default() };
        let sweeps = convergence_sweep_multi(
            &sym,
            0.5,
            0.0,
            &[0.0, 0.5],
            &[4, 8, 16, 32],
            None,
            &grid,
            &opts,
        )
        .unwrap();
        let fit_time = sweeps[0].fit_time.as_ref().expect("time fit");
        assert!(
            (fit_time.slope - 0.5).abs() < 0.15,
            "time slope {}",
            fit_time.slope
        );
        let s0 = sweeps[0].fit_op.as_ref().expect("op fit r=0").slope;
        assert!((s0 - 0.5).abs() < 0.15, "op slope {s0}");
        // The weaker target norm at r = 1/2 can only slow the measured decay.
        let s5 = sweeps[1].fit_op.as_ref().expect("op fit r=1/2").slope;
        assert!(s5 <= s0 + 0.2, "slopes r=0 {s0} vs r=1/2 {s5}");
    }

    #[test]
    fn convergence_validates_its_inputs() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let opts = ConvergenceOptions::default();
        assert!(convergence_sweep(&heat(), 0.5, 0.0, 1.0, &[2, 4], None, &grid, &opts).is_err());
        assert!(convergence_sweep(&heat(), 0.5, 0.0, 0.0, &[], None, &grid, &opts).is_err());
        assert!(convergence_sweep(&heat(), -0.5, 0.0, 0.0, &[2], None, &grid, &opts).is_err());
    }

    #[test]
    fn probe_basis_is_deterministic_and_normalized() {
        let grid = PeriodicGrid::unit(1, 16).unwrap();
        let a = probe_basis(&grid, 1.0, 7, 3);
        let b = probe_basis(&grid, 1.0, 7, 3);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.sub(y).unwrap().l2_norm(), 0.0);
            assert!((sobolev_norm(x, 1.0) - 1.0).abs() < 1e-12);
        }
    }
}
