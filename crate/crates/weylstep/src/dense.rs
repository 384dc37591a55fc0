//! Dense complex linear algebra: products, LU solves, matrix exponential.
//!
//! Everything here is small-matrix territory (a few hundred rows at most, from
//! collapsed operator chains), so we keep plain O(n^3) routines in-crate.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b)
}

pub fn matvec(a: &Array2<C64>, v: &Array1<C64>) -> Array1<C64> {
    a.dot(v)
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    let (r, c) = a.dim();
    Array2::from_shape_fn((c, r), |(i, j)| a[(j, i)].conj())
}

pub fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|v| v.norm()).sum();
        best = best.max(s);
    }
    best
}

pub fn frobenius_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Solve A X = B by partial-pivot LU. A must be square and nonsingular.
pub fn solve(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::Invalid(format!(
            "solve shapes {:?} / {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = x.ncols();
    for k in 0..n {
        let mut piv = k;
        let mut best = lu[(k, k)].norm();
        for r in k + 1..n {
            let v = lu[(r, k)].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return Err(Error::Invalid("singular matrix in solve".into()));
        }
        if piv != k {
            for c in 0..n {
                lu.swap((k, c), (piv, c));
            }
            for c in 0..m {
                x.swap((k, c), (piv, c));
            }
        }
        let d = lu[(k, k)];
        for r in k + 1..n {
            let f = lu[(r, k)] / d;
            lu[(r, k)] = f;
            for c in k + 1..n {
                let t = lu[(k, c)];
                lu[(r, c)] -= f * t;
            }
            for c in 0..m {
                let t = x[(k, c)];
                x[(r, c)] -= f * t;
            }
        }
    }
    for k in (0..n).rev() {
        let d = lu[(k, k)];
        for c in 0..m {
            let mut acc = x[(k, c)];
            for j in k + 1..n {
                acc -= lu[(k, j)] * x[(j, c)];
            }
            x[(k, c)] = acc / d;
        }
    }
    Ok(x)
}

/// Matrix exponential by Pade(13) with scaling and squaring.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Invalid(format!("expm needs square input, got {:?}", a.shape())));
    }
    const THETA13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.mapv(|v| v / 2f64.powi(s as i32));
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let id = identity(n);
    let u_inner = &a6 * B[13] + &a4 * B[11] + &a2 * B[9];
    let u_poly = a6.dot(&u_inner) + &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &id * B[1];
    let u = scaled.dot(&u_poly);
    let v_inner = &a6 * B[12] + &a4 * B[10] + &a2 * B[8];
    let v = a6.dot(&v_inner) + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &id * B[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&q, &p)?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}
