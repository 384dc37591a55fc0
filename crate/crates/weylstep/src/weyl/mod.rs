//! Quantized operators, operator algebra, and Sobolev operator norms.

mod moyal;
mod norm;
mod quantize;

pub use moyal::{amplitude_to_weyl, moyal_compose, SampledAmplitude};
pub use norm::{norm_estimate_lenient, operator_norm, NormOptions, OperatorNormEstimate};
pub use quantize::{quantize, quantize_left, quantize_with_path, ApplyPath, LeftQuantizedOperator, QuantizedOperator};

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{apply_sobolev_weight, GridField, PeriodicGrid};

/// Linear operator on grid value vectors (length N^n, no quadrature factor).
pub trait LinOp: Send + Sync {
    fn grid(&self) -> &PeriodicGrid;

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64>;

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64>;

    /// Materialize the matrix by applying to basis vectors. Implementations
    /// with a cheaper dense form override this.
    fn dense(&self) -> Array2<C64> {
        let n = self.grid().total();
        let mut m = Array2::<C64>::default((n, n));
        let mut e = Array1::<C64>::default(n);
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.apply_vec(&e);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
            e[j] = C64::default();
        }
        m
    }

    fn apply(&self, u: &GridField) -> Result<GridField>
    where
        Self: Sized,
    {
        check_field(self.grid(), u)?;
        GridField::from_values(self.grid(), self.apply_vec(u.values()))
    }

    fn adjoint_apply(&self, u: &GridField) -> Result<GridField>
    where
        Self: Sized,
    {
        check_field(self.grid(), u)?;
        GridField::from_values(self.grid(), self.adjoint_apply_vec(u.values()))
    }
}

fn check_field(grid: &PeriodicGrid, u: &GridField) -> Result<()> {
    if u.grid() != grid {
        return Err(Error::GridMismatch("field grid differs from operator grid".into()));
    }
    Ok(())
}

pub(crate) fn weight_vec(grid: &PeriodicGrid, u: &Array1<C64>, s: f64) -> Array1<C64> {
    if s == 0.0 {
        return u.clone();
    }
    let f = GridField::from_values(grid, u.clone()).expect("length checked by caller");
    apply_sobolev_weight(&f, s).into_values()
}

pub struct IdentityOp {
    grid: PeriodicGrid,
}

impl IdentityOp {
    pub fn new(grid: &PeriodicGrid) -> Self {
        Self { grid: grid.clone() }
    }
}

impl LinOp for IdentityOp {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        u.clone()
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        u.clone()
    }

    fn dense(&self) -> Array2<C64> {
        crate::dense::identity(self.grid.total())
    }
}

/// Fourier multiplier <xi>^s; self-adjoint, invertible by negating s.
pub struct SobolevWeightOp {
    grid: PeriodicGrid,
    s: f64,
}

impl SobolevWeightOp {
    pub fn new(grid: &PeriodicGrid, s: f64) -> Self {
        Self { grid: grid.clone(), s }
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }
}

impl LinOp for SobolevWeightOp {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        weight_vec(&self.grid, u, self.s)
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        weight_vec(&self.grid, u, self.s)
    }
}

/// Pointwise multiplication by a fixed grid function.
pub struct DiagonalOp {
    grid: PeriodicGrid,
    diag: Array1<C64>,
}

impl DiagonalOp {
    pub fn new(grid: &PeriodicGrid, diag: Array1<C64>) -> Result<Self> {
        if diag.len() != grid.total() {
            return Err(Error::GridMismatch("diagonal length".into()));
        }
        Ok(Self { grid: grid.clone(), diag })
    }

    pub fn from_fn(grid: &PeriodicGrid, mut f: impl FnMut(&[f64]) -> C64) -> Self {
        let diag = Array1::from_shape_fn(grid.total(), |j| f(&grid.coords(j)));
        Self { grid: grid.clone(), diag }
    }

    pub fn diag(&self) -> &Array1<C64> {
        &self.diag
    }
}

impl LinOp for DiagonalOp {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        u * &self.diag
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        let conj = self.diag.mapv(|v| v.conj());
        u * &conj
    }

    fn dense(&self) -> Array2<C64> {
        Array2::from_diag(&self.diag)
    }
}

/// Explicit matrix operator.
pub struct DenseOp {
    grid: PeriodicGrid,
    mat: Array2<C64>,
}

impl DenseOp {
    pub fn new(grid: &PeriodicGrid, mat: Array2<C64>) -> Result<Self> {
        let n = grid.total();
        if mat.shape() != [n, n] {
            return Err(Error::GridMismatch(format!(
                "matrix {:?} vs grid size {n}",
                mat.shape()
            )));
        }
        Ok(Self { grid: grid.clone(), mat })
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.mat
    }
}

impl LinOp for DenseOp {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        self.mat.dot(u)
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        // (A^H u)_i = sum_j conj(A_ji) u_j, computed without materializing A^H.
        let mut out = Array1::<C64>::default(u.len());
        for (j, row) in self.mat.rows().into_iter().enumerate() {
            let uj = u[j];
            for (i, a) in row.iter().enumerate() {
                out[i] += a.conj() * uj;
            }
        }
        out
    }

    fn dense(&self) -> Array2<C64> {
        self.mat.clone()
    }
}

/// Composition factors[0] o factors[1] o ... (rightmost acts first).
pub struct ComposedOp {
    grid: PeriodicGrid,
    factors: Vec<Arc<dyn LinOp>>,
}

impl ComposedOp {
    pub fn new(factors: Vec<Arc<dyn LinOp>>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::Invalid("empty operator chain".into()))?;
        let grid = first.grid().clone();
        for f in &factors {
            if *f.grid() != grid {
                return Err(Error::GridMismatch("chain factors on different grids".into()));
            }
        }
        Ok(Self { grid, factors })
    }

    pub fn factors(&self) -> &[Arc<dyn LinOp>] {
        &self.factors
    }
}

impl LinOp for ComposedOp {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        let mut v = u.clone();
        for f in self.factors.iter().rev() {
            v = f.apply_vec(&v);
        }
        v
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        let mut v = u.clone();
        for f in self.factors.iter() {
            v = f.adjoint_apply_vec(&v);
        }
        v
    }

    fn dense(&self) -> Array2<C64> {
        let mut m = self.factors[0].dense();
        for f in &self.factors[1..] {
            m = m.dot(&f.dense());
        }
        m
    }
}

/// a - b, for defect operators.
pub struct DiffOp {
    a: Arc<dyn LinOp>,
    b: Arc<dyn LinOp>,
}

impl DiffOp {
    pub fn new(a: Arc<dyn LinOp>, b: Arc<dyn LinOp>) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(Error::GridMismatch("difference of operators on different grids".into()));
        }
        Ok(Self { a, b })
    }
}

impl LinOp for DiffOp {
    fn grid(&self) -> &PeriodicGrid {
        self.a.grid()
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        self.a.apply_vec(u) - self.b.apply_vec(u)
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        self.a.adjoint_apply_vec(u) - self.b.adjoint_apply_vec(u)
    }

    fn dense(&self) -> Array2<C64> {
        self.a.dense() - self.b.dense()
    }
}

/// c * op.
pub struct ScaledOp {
    op: Arc<dyn LinOp>,
    c: C64,
}

impl ScaledOp {
    pub fn new(op: Arc<dyn LinOp>, c: C64) -> Self {
        Self { op, c }
    }
}

impl LinOp for ScaledOp {
    fn grid(&self) -> &PeriodicGrid {
        self.op.grid()
    }

    fn apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        self.op.apply_vec(u).mapv_into(|v| v * self.c)
    }

    fn adjoint_apply_vec(&self, u: &Array1<C64>) -> Array1<C64> {
        let cc = self.c.conj();
        self.op.adjoint_apply_vec(u).mapv_into(|v| v * cc)
    }

    fn dense(&self) -> Array2<C64> {
        self.op.dense().mapv_into(|v| v * self.c)
    }
}
