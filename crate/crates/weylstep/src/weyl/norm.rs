//! Operator norms between Sobolev levels by power iteration on T*T.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::weyl::{weight_vec, LinOp};

#[derive(Clone, Copy, Debug)]
pub struct NormOptions {
    pub max_iters: usize,
    /// Relative Rayleigh residual at which the estimate is accepted.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { max_iters: 500, tol: 1e-8, seed: 0x9e37_79b9 }
    }
}

impl NormOptions {
    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OperatorNormEstimate {
    pub value: f64,
    pub s_in: f64,
    pub s_out: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// || op ||_{(H^{s_in}, H^{s_out})} via power iteration on B*B with
/// B = <D>^{s_out} o op o <D>^{-s_in}. Deterministic start vector from the
/// seeded generator. Non-convergence carries the best estimate.
pub fn operator_norm(
    op: &dyn LinOp,
    s_in: f64,
    s_out: f64,
    opts: &NormOptions,
) -> Result<OperatorNormEstimate> {
    let grid = op.grid().clone();
    let n = grid.total();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = Array1::from_shape_fn(n, |_| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let nv = l2(&v);
    v.mapv_inplace(|z| z / nv);

    let b_apply = |u: &Array1<C64>| -> Array1<C64> {
        let w = weight_vec(&grid, u, -s_in);
        let w = op.apply_vec(&w);
        weight_vec(&grid, &w, s_out)
    };
    let b_adjoint = |u: &Array1<C64>| -> Array1<C64> {
        let w = weight_vec(&grid, u, s_out);
        let w = op.adjoint_apply_vec(&w);
        weight_vec(&grid, &w, -s_in)
    };

    let mut rho = 0.0;
    let mut res_rel = f64::INFINITY;
    for it in 1..=opts.max_iters {
        let bv = b_apply(&v);
        let w = b_adjoint(&bv);
        // v is unit, so rho = <v, B*Bv> = ||Bv||^2 >= 0.
        rho = v.iter().zip(w.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        let mut resid = w.clone();
        for (r, vv) in resid.iter_mut().zip(v.iter()) {
            *r -= rho * vv;
        }
        let res = l2(&resid);
        let nw = l2(&w);
        if nw == 0.0 {
            return Ok(OperatorNormEstimate { value: 0.0, s_in, s_out, iterations: it, residual: 0.0 });
        }
        res_rel = res / rho.max(f64::MIN_POSITIVE);
        if res_rel <= opts.tol {
            return Ok(OperatorNormEstimate {
                value: rho.max(0.0).sqrt(),
                s_in,
                s_out,
                iterations: it,
                residual: res_rel,
            });
        }
        v = w.mapv(|z| z / nw);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iters,
        estimate: rho.max(0.0).sqrt(),
        residual: res_rel,
    })
}

/// Convenience: unwrap the non-convergence payload when the caller wants the
/// best available estimate regardless (monotone lower bound for T*T iteration).
pub fn norm_estimate_lenient(
    op: &dyn LinOp,
    s_in: f64,
    s_out: f64,
    opts: &NormOptions,
) -> (f64, bool) {
    match operator_norm(op, s_in, s_out, opts) {
        Ok(e) => (e.value, true),
        Err(Error::NonConvergence { estimate, .. }) => (estimate, false),
        Err(_) => (f64::NAN, false),
    }
}

fn l2(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
