//! Sparse direct factorization with equilibration and iterative refinement.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{invalid, Error, Result};
use crate::sparse::{norm2, Csr};

pub const SOLVE_TOL: f64 = 1e-10;

/// Systems below this size are factored densely.
pub const DENSE_LIMIT: usize = 2000;

enum Factor {
    Sparse(Lu<usize, f64>),
    Dense(PartialPivLu<f64>),
}

/// LU factorization of a square sparse matrix, reusable across right-hand sides.
pub struct SparseLu {
    a: Csr,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    lu: Factor,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.a.nrows).field("nnz", &self.a.nnz()).finish()
    }
}

// Ruiz scaling towards unit row and column maxima.
fn equilibrate(a: &Csr) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.nrows;
    let mut r = vec![1.0; n];
    let mut c = vec![1.0; n];
    for _ in 0..8 {
        let mut rmax = vec![0.0f64; n];
        let mut cmax = vec![0.0f64; n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                let s = (v * r[i] * c[j]).abs();
                rmax[i] = rmax[i].max(s);
                cmax[j] = cmax[j].max(s);
            }
        }
        if let Some(i) = rmax.iter().position(|&m| m == 0.0) {
            return Err(Error::Singular { pivot: i });
        }
        if let Some(j) = cmax.iter().position(|&m| m == 0.0) {
            return Err(Error::Singular { pivot: j });
        }
        let done = rmax.iter().chain(&cmax).all(|m| (m - 1.0).abs() < 1e-3);
        for i in 0..n {
            r[i] /= rmax[i].sqrt();
            c[i] /= cmax[i].sqrt();
        }
        if done {
            break;
        }
    }
    Ok((r, c))
}

impl SparseLu {
    pub fn factor(a: &Csr) -> Result<Self> {
        Self::build(a, a.nrows < DENSE_LIMIT)
    }

    /// Always uses the sparse factorization, whatever the size.
    pub fn factor_sparse(a: &Csr) -> Result<Self> {
        Self::build(a, false)
    }

    fn build(a: &Csr, dense: bool) -> Result<Self> {
        if a.nrows != a.ncols {
            return Err(invalid(format!(
                "matrix must be square, got {}x{}",
                a.nrows, a.ncols
            )));
        }
        if a.data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        let n = a.nrows;
        let (row_scale, col_scale) = equilibrate(a)?;
        let lu = if dense {
            let mut m = Mat::<f64>::zeros(n, n);
            for i in 0..n {
                for (j, v) in a.row(i) {
                    m[(i, j)] += v * row_scale[i] * col_scale[j];
                }
            }
            Factor::Dense(m.partial_piv_lu())
        } else {
            let mut trip = Vec::with_capacity(a.nnz());
            for i in 0..n {
                for (j, v) in a.row(i) {
                    trip.push(Triplet::new(i, j, v * row_scale[i] * col_scale[j]));
                }
            }
            let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
                .map_err(|e| invalid(format!("sparse matrix build failed: {e:?}")))?;
            Factor::Sparse(m.sp_lu().map_err(|e| match e {
                LuError::SymbolicSingular { index } => Error::Singular { pivot: index },
                LuError::Generic(g) => invalid(format!("sparse factorization failed: {g:?}")),
            })?)
        };
        let out = SparseLu {
            a: a.clone(),
            row_scale,
            col_scale,
            lu,
        };
        // probe for numerical breakdown
        let probe: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
        let x = out.apply(&probe);
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::Singular { pivot: i });
        }
        let r = residual(a, &x, &probe);
        if norm2(&r) > 1e-6 * norm2(&probe) {
            return Err(Error::Singular {
                pivot: worst_index(&r),
            });
        }
        Ok(out)
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.lu, Factor::Dense(_))
    }

    pub fn dim(&self) -> usize {
        self.a.nrows
    }

    fn apply(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i] * self.row_scale[i]);
        match &self.lu {
            Factor::Sparse(lu) => lu.solve_in_place(rhs.as_mut()),
            Factor::Dense(lu) => lu.solve_in_place(rhs.as_mut()),
        }
        (0..n).map(|i| rhs[(i, 0)] * self.col_scale[i]).collect()
    }

    /// Solves `A x = b` to relative residual below `SOLVE_TOL`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim() {
            return Err(invalid(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.dim()
            )));
        }
        let bn = norm2(b);
        if bn == 0.0 {
            return Ok(vec![0.0; b.len()]);
        }
        let mut x = self.apply(b);
        let mut r = residual(&self.a, &x, b);
        let mut rn = norm2(&r);
        for _ in 0..6 {
            if rn <= 1e-14 * bn {
                break;
            }
            let dx = self.apply(&r);
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let tr = residual(&self.a, &trial, b);
            let tn = norm2(&tr);
            if !(tn < rn) {
                break;
            }
            x = trial;
            r = tr;
            rn = tn;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular { pivot: worst_index(&x) });
        }
        if rn > SOLVE_TOL * bn {
            return Err(Error::NotConverged { residual: rn / bn });
        }
        Ok(x)
    }
}

pub fn residual(a: &Csr, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.matvec(x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}

fn worst_index(v: &[f64]) -> usize {
    let mut best = 0;
    let mut m = -1.0;
    for (i, x) in v.iter().enumerate() {
        let a = if x.is_finite() { x.abs() } else { f64::INFINITY };
        if a > m {
            m = a;
            best = i;
        }
    }
    best
}

/// One-shot factor and solve.
pub fn sparse_lu_solve(a: &Csr, b: &[f64]) -> Result<Vec<f64>> {
    SparseLu::factor(a)?.solve(b)
}
