//! Scalar kernels `k(z, w) = sum a_mn z^m conj(w)^n` truncated to order `N`.
//!
//! All moments are factorial-normalized: `a_mn` is
//! `(1 / (m! n!)) d^(m+n) k / dz^m dconj(w)^n (0, 0)`, never the raw
//! derivative. With `K_n = d^n k / dconj(w)^n (., 0) / n!`, the Gram matrix
//! of `K_0, ..., K_(N-1)` is the coefficient matrix itself:
//! `<K_n, K_m> = a_mn`.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::linalg::{self, re, CMatrix, C64};
use crate::seq::{Asymptotics, SequenceSpec};

const HERMITIAN_TOL: f64 = 1e-12;
const DIAGONAL_IMAG_TOL: f64 = 1e-12;
/// Relative eigenvalue floor for the Cholesky gate (applied to the
/// unit-diagonal rescaling of the Gram matrix).
pub const PD_RATIO: f64 = 1e-12;
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Truncated Hermitian coefficient array of a scalar kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    a: CMatrix,
    diagonal: bool,
    asymptotics: Option<Asymptotics>,
}

impl CoefficientMatrix {
    /// Validates a user-supplied matrix: square, finite, Hermitian to 1e-12.
    pub fn from_matrix(a: CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        let n = a.nrows();
        for i in 0..n {
            for j in 0..n {
                if !(a[(i, j)].re.is_finite() && a[(i, j)].im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        let residual = linalg::hermitian_defect(&a) / linalg::norm_inf(&a).max(1.0);
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let diagonal = linalg::is_diagonal(&a);
        Ok(Self {
            a,
            diagonal,
            asymptotics: None,
        })
    }

    /// Crate constructors build exactly Hermitian arrays; this only mirrors
    /// the lower triangle to make that bit-exact.
    pub(crate) fn from_lower(mut a: CMatrix, asymptotics: Option<Asymptotics>) -> Self {
        let n = a.nrows();
        for i in 0..n {
            a[(i, i)].im = 0.0;
            for j in 0..i {
                a[(j, i)] = a[(i, j)].conj();
            }
        }
        let diagonal = linalg::is_diagonal(&a);
        Self {
            a,
            diagonal,
            asymptotics,
        }
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.a[(m, n)]
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// Exact limit metadata of the diagonal, present only for diagonal
    /// kernels built from a named weight family.
    pub fn asymptotics(&self) -> Option<Asymptotics> {
        self.asymptotics
    }

    pub fn hermitian_residual(&self) -> f64 {
        linalg::hermitian_defect(&self.a) / linalg::norm_inf(&self.a).max(f64::MIN_POSITIVE)
    }

    /// Leading `n x n` section.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.order());
        Self {
            a: self.a.view((0, 0), (n, n)).into_owned(),
            diagonal: self.diagonal,
            asymptotics: self.asymptotics,
        }
    }
}

/// `a_nn = beta_n^2`, zero off the diagonal.
pub fn diagonal_coefficients(beta: &SequenceSpec, order: usize) -> Result<CoefficientMatrix> {
    let mut a = CMatrix::zeros(order, order);
    for n in 0..order {
        let b = crate::seq::eval_sequence(beta, n as u64)?;
        if b <= 0.0 {
            return Err(Error::BadWeight {
                name: "beta",
                index: n,
                value: b,
            });
        }
        a[(n, n)] = re(beta.eval_squared(n as u64)?);
    }
    Ok(CoefficientMatrix {
        a,
        diagonal: true,
        asymptotics: beta.asymptotics(),
    })
}

/// The diagonal `a_nn` as a real sequence, with its limit metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDiagonal {
    pub values: Vec<f64>,
    pub asymptotics: Option<Asymptotics>,
}

impl NormalizedDiagonal {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            asymptotics: None,
        }
    }
}

pub fn normalized_diagonal(a: &CoefficientMatrix) -> Result<NormalizedDiagonal> {
    let values = (0..a.order())
        .map(|n| {
            let z = a.get(n, n);
            if z.im.abs() > DIAGONAL_IMAG_TOL {
                Err(Error::NonRealDiagonal { index: n, imag: z.im })
            } else {
                Ok(z.re)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalizedDiagonal {
        values,
        asymptotics: a.asymptotics,
    })
}

/// `(1 / (n! m!)) d^(n+m) k / dz^n dconj(w)^m (0, 0)`, i.e. `a_nm`.
pub fn derivative_moment(a: &CoefficientMatrix, n: usize, m: usize) -> Result<C64> {
    let order = a.order();
    if n >= order || m >= order {
        return Err(Error::IndexOutOfRange {
            row: n,
            col: m,
            order,
        });
    }
    Ok(a.get(n, m))
}

/// Gram matrix of the normalized derivative kernels and its Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct GramData {
    /// `G[m][n] = <K_n, K_m> = a_mn`
    pub g: CMatrix,
    /// Upper triangular, `G = U^H U`.
    pub u: CMatrix,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `lambda_min / lambda_max` of `D^(-1/2) G D^(-1/2)`, `D = diag(G)`.
    pub scaled_ratio: f64,
}

impl GramData {
    pub fn order(&self) -> usize {
        self.g.nrows()
    }

    /// `||U^H U - G||_F / ||G||_F`.
    pub fn reconstruction_error(&self) -> f64 {
        linalg::frobenius(&(self.u.adjoint() * &self.u - &self.g)) / linalg::frobenius(&self.g)
    }
}

pub fn gram(a: &CoefficientMatrix) -> Result<GramData> {
    let residual = linalg::hermitian_defect(&a.a) / linalg::norm_inf(&a.a).max(1.0);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let n = a.order();
    let g = a.a.clone();
    if a.diagonal {
        let d: Vec<f64> = (0..n).map(|i| g[(i, i)].re).collect();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if n == 0 || min <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: if n == 0 { 0.0 } else { min },
                scaled_ratio: 0.0,
            });
        }
        let u = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            d.iter().map(|x| re(x.sqrt())),
        ));
        return Ok(GramData {
            g,
            u,
            min_eigenvalue: min,
            max_eigenvalue: max,
            scaled_ratio: 1.0,
        });
    }

    let ev = linalg::hermitian_eigenvalues(&g);
    let (min_eigenvalue, max_eigenvalue) = match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    };
    let not_pd = |scaled_ratio| Error::NotPositiveDefinite {
        min_eigenvalue,
        scaled_ratio,
    };
    let diag: Vec<f64> = (0..n).map(|i| g[(i, i)].re).collect();
    if n == 0 || diag.iter().any(|&x| x <= 0.0) {
        return Err(not_pd(0.0));
    }
    let mut scaled = g.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] /= (diag[i] * diag[j]).sqrt();
        }
    }
    let sev = linalg::hermitian_eigenvalues(&scaled);
    let scaled_ratio = sev[0] / sev[n - 1];
    if !(scaled_ratio > PD_RATIO) {
        return Err(not_pd(scaled_ratio));
    }
    let chol = Cholesky::new(g.clone()).ok_or_else(|| not_pd(scaled_ratio))?;
    let u = chol.l().adjoint();
    Ok(GramData {
        g,
        u,
        min_eigenvalue,
        max_eigenvalue,
        scaled_ratio,
    })
}

fn check_disc(z: C64) -> Result<()> {
    let modulus = z.norm();
    if modulus < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc { modulus })
    }
}

/// Truncated double sum `sum_(m,n<N) a_mn z^m conj(w)^n`.
pub fn evaluate_kernel(a: &CoefficientMatrix, z: C64, w: C64) -> Result<C64> {
    check_disc(z)?;
    check_disc(w)?;
    let wb = w.conj();
    let n = a.order();
    let mut acc = C64::new(0.0, 0.0);
    for m in (0..n).rev() {
        let mut row = C64::new(0.0, 0.0);
        for k in (0..n).rev() {
            row = row * wb + a.a[(m, k)];
        }
        acc = acc * z + row;
    }
    Ok(acc)
}

/// `||k(., w)|| = k(w, w)^(1/2)`.
pub fn kernel_norm_at(a: &CoefficientMatrix, w: C64) -> Result<f64> {
    let v = evaluate_kernel(a, w, w)?;
    if v.re < -1e-12 {
        return Err(Error::NegativeKernelValue { value: v.re });
    }
    Ok(v.re.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// `lambda_min(A) >= -tol * max(1, lambda_max(A))`.
pub fn psd_check(a: &CoefficientMatrix, tol: f64) -> PsdReport {
    let ev = if a.diagonal {
        let mut d: Vec<f64> = (0..a.order()).map(|i| a.a[(i, i)].re).collect();
        d.sort_by(f64::total_cmp);
        d
    } else {
        linalg::hermitian_eigenvalues(&a.a)
    };
    let min = ev.first().copied().unwrap_or(0.0);
    let max = ev.last().copied().unwrap_or(0.0);
    PsdReport {
        psd: min >= -tol * max.max(1.0),
        min_eigenvalue: min,
        max_eigenvalue: max,
    }
}
