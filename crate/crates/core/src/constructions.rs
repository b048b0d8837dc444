//! Concrete kernel families: tridiagonal kernels generated by
//! `e_n(z) = mu_n z^n + nu_n z^(n+1)`, conjugation of a kernel by a power
//! series or polynomial, and operator-valued (block) kernels.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::kernel::{diagonal_coefficients, CoefficientMatrix};
use crate::linalg::{self, c, re, CMatrix, C64};
use crate::seq::{eval_sequence, Asymptotics, SequenceSpec};

const INJECTIVITY_FLOOR: f64 = 1e-12;
pub const MAX_BLOCK_DIM: usize = 64;

/// Tridiagonal kernel data. Complex weights are given as a real modulus
/// sequence times an optional phase sequence (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSpec {
    pub mu: SequenceSpec,
    pub nu: SequenceSpec,
    pub mu_phase: Option<SequenceSpec>,
    pub nu_phase: Option<SequenceSpec>,
    pub order: usize,
}

fn weight(
    name: &'static str,
    modulus: &SequenceSpec,
    phase: Option<&SequenceSpec>,
    n: usize,
) -> Result<C64> {
    let m = eval_sequence(modulus, n as u64)?;
    if m == 0.0 {
        return Err(Error::BadWeight {
            name,
            index: n,
            value: m,
        });
    }
    Ok(match phase {
        Some(p) => C64::from_polar(m, eval_sequence(p, n as u64)?),
        None => re(m),
    })
}

impl TridiagonalSpec {
    pub fn real(mu: SequenceSpec, nu: SequenceSpec, order: usize) -> Self {
        Self {
            mu,
            nu,
            mu_phase: None,
            nu_phase: None,
            order,
        }
    }

    pub fn mu(&self, n: usize) -> Result<C64> {
        weight("mu", &self.mu, self.mu_phase.as_ref(), n)
    }

    pub fn nu(&self, n: usize) -> Result<C64> {
        weight("nu", &self.nu, self.nu_phase.as_ref(), n)
    }

    /// `a_nn = |mu_n|^2 + |nu_(n-1)|^2` (just `|mu_0|^2` at `n = 0`).
    pub fn diagonal_value(&self, n: usize) -> Result<f64> {
        let mu = self.mu(n)?.norm_sqr();
        if n == 0 {
            Ok(mu)
        } else {
            Ok(mu + self.nu(n - 1)?.norm_sqr())
        }
    }
}

pub fn tridiagonal_coefficients(t: &TridiagonalSpec) -> Result<CoefficientMatrix> {
    let n = t.order;
    let mu = (0..n).map(|k| t.mu(k)).collect::<Result<Vec<_>>>()?;
    let nu = (0..n).map(|k| t.nu(k)).collect::<Result<Vec<_>>>()?;
    let mut a = CMatrix::zeros(n, n);
    for k in 0..n {
        let mut d = mu[k].norm_sqr();
        if k > 0 {
            d += nu[k - 1].norm_sqr();
        }
        a[(k, k)] = re(d);
        if k + 1 < n {
            a[(k + 1, k)] = mu[k].conj() * nu[k];
        }
    }
    Ok(CoefficientMatrix::from_lower(a, None))
}

/// Window evidence for `sup |mu_n / mu_(n+1)| < inf` and
/// `sup |nu_n / mu_(n+1)| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TridiagonalBoundedness {
    pub window: usize,
    pub sup_mu_ratio: f64,
    pub sup_mu_ratio_index: usize,
    pub sup_nu_ratio: f64,
    pub sup_nu_ratio_index: usize,
    /// `sup_mu_ratio` is the exact supremum of a named family.
    pub mu_ratio_analytic: bool,
    pub holds: bool,
}

pub fn tridiagonal_boundedness(t: &TridiagonalSpec, window: usize) -> Result<TridiagonalBoundedness> {
    let mut sup_mu = (f64::NEG_INFINITY, 0);
    let mut sup_nu = (f64::NEG_INFINITY, 0);
    let mut next_mu = t.mu(0)?;
    for n in 0..window {
        let mu = next_mu;
        next_mu = t.mu(n + 1)?;
        let r_mu = mu.norm() / next_mu.norm();
        let r_nu = t.nu(n)?.norm() / next_mu.norm();
        if r_mu > sup_mu.0 {
            sup_mu = (r_mu, n);
        }
        if r_nu > sup_nu.0 {
            sup_nu = (r_nu, n);
        }
    }
    let mut mu_ratio_analytic = false;
    if t.mu_phase.is_none() {
        if let Some(r) = t.mu.shift_ratios() {
            sup_mu.0 = r.sup_down;
            mu_ratio_analytic = true;
        }
    }
    Ok(TridiagonalBoundedness {
        window,
        sup_mu_ratio: sup_mu.0,
        sup_mu_ratio_index: sup_mu.1,
        sup_nu_ratio: sup_nu.0,
        sup_nu_ratio_index: sup_nu.1,
        mu_ratio_analytic,
        holds: sup_mu.0.is_finite() && sup_nu.0 < 1.0,
    })
}

/// Coefficients `alpha_j` of `z^n f` in the basis `e_j`, where
/// `f = k(., 0) = a + b z`, for `j < order`.
pub fn expand_znf_in_basis(t: &TridiagonalSpec, n: usize) -> Result<Vec<C64>> {
    let order = t.order;
    if n + 1 >= order {
        return Err(Error::Capacity {
            needed: n + 2,
            order,
        });
    }
    let mu0 = t.mu(0)?;
    let a = re(mu0.norm_sqr());
    let b = mu0 * t.nu(0)?.conj();
    let mut alpha = vec![c(0.0, 0.0); order];
    alpha[n] = a / t.mu(n)?;
    alpha[n + 1] = (b - alpha[n] * t.nu(n)?) / t.mu(n + 1)?;
    for j in n + 2..order {
        alpha[j] = -(t.nu(j - 1)? / t.mu(j)?) * alpha[j - 1];
    }
    Ok(alpha)
}

/// `||z^n f||^2` against the estimate `C / |mu_n|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZnfNormBound {
    /// `sum_(j<N) |alpha_j|^2`
    pub norm_sq: f64,
    /// Geometric bound on the dropped terms, `|alpha_(N-1)|^2 R^2 / (1 - R^2)`.
    pub tail_bound: f64,
    /// `C / |mu_n|^2`
    pub bound: f64,
    pub constant: f64,
    /// `max(a, |b|)`
    pub m: f64,
    /// `sup |mu_k / mu_(k+1)|` on the window
    pub r: f64,
    /// `sup |nu_k / mu_(k+1)|` on the window
    pub big_r: f64,
}

impl ZnfNormBound {
    pub fn holds(&self) -> bool {
        self.norm_sq + self.tail_bound <= self.bound
    }
}

pub fn znf_norm_bound(t: &TridiagonalSpec, n: usize) -> Result<ZnfNormBound> {
    let gate = tridiagonal_boundedness(t, t.order.saturating_sub(1))?;
    let big_r = gate.sup_nu_ratio;
    if !(big_r < 1.0) {
        return Err(Error::ShiftRatioTooLarge { ratio: big_r });
    }
    let r = gate.sup_mu_ratio;
    let alpha = expand_znf_in_basis(t, n)?;
    let norm_sq: f64 = alpha.iter().map(|z| z.norm_sqr()).sum();
    let last = alpha[t.order - 1].norm_sqr();
    let r2 = big_r * big_r;
    let tail_bound = last * r2 / (1.0 - r2);
    let mu0 = t.mu(0)?;
    let m = mu0.norm_sqr().max((mu0 * t.nu(0)?.conj()).norm());
    // sum_(k>=1) R^(2k)
    let geometric = r2 / (1.0 - r2);
    let constant = m * m * (1.0 + (r + 1.0).powi(2) * geometric);
    let bound = constant / t.mu(n)?.norm_sqr();
    Ok(ZnfNormBound {
        norm_sq,
        tail_bound,
        bound,
        constant,
        m,
        r,
        big_r,
    })
}

/// `L A L^H` where `L` is lower-triangular Toeplitz with first column `p`.
///
/// Entries below order `N` only involve `p[0..N]`, so the truncation is exact.
pub fn conjugate_by_series(a: &CoefficientMatrix, p: &[C64]) -> Result<CoefficientMatrix> {
    match p.first() {
        Some(p0) if *p0 != c(0.0, 0.0) => {}
        _ => return Err(Error::ZeroLeadingCoefficient),
    }
    let n = a.order();
    let taps: Vec<(usize, C64)> = p
        .iter()
        .copied()
        .enumerate()
        .take(n)
        .filter(|(_, v)| *v != c(0.0, 0.0))
        .collect();
    let src = a.matrix();
    let mut la = CMatrix::zeros(n, n);
    for i in 0..n {
        for &(t, pt) in taps.iter().take_while(|(t, _)| *t <= i) {
            for j in 0..n {
                la[(i, j)] += pt * src[(i - t, j)];
            }
        }
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = c(0.0, 0.0);
            for &(t, pt) in taps.iter().take_while(|(t, _)| *t <= j) {
                acc += la[(i, j - t)] * pt.conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(CoefficientMatrix::from_lower(out, None))
}

/// Taylor coefficients of `1 / (1 - z)`.
pub fn geometric_series_coeffs(n: usize) -> Vec<C64> {
    vec![re(1.0); n]
}

/// Conjugating polynomial `P(z) = sum_j A_j z^j`.
#[derive(Debug, Clone, PartialEq)]
pub enum PolynomialSpec {
    Scalar(Vec<C64>),
    Block(Vec<CMatrix>),
}

impl PolynomialSpec {
    pub fn degree(&self) -> usize {
        match self {
            PolynomialSpec::Scalar(a) => a.len().saturating_sub(1),
            PolynomialSpec::Block(a) => a.len().saturating_sub(1),
        }
    }

    /// Coefficients as `d x d` blocks (`1 x 1` for scalars).
    pub fn blocks(&self) -> Vec<CMatrix> {
        match self {
            PolynomialSpec::Scalar(a) => a.iter().map(|&v| CMatrix::from_element(1, 1, v)).collect(),
            PolynomialSpec::Block(a) => a.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PolynomialSpec::Scalar(a) => {
                if a.iter().all(|v| *v == c(0.0, 0.0)) {
                    return Err(Error::InvalidArgument("polynomial is identically zero".into()));
                }
                Ok(())
            }
            PolynomialSpec::Block(a) => {
                let first = a
                    .first()
                    .ok_or_else(|| Error::InvalidArgument("polynomial has no coefficients".into()))?;
                let d = first.nrows();
                if d == 0 || d > MAX_BLOCK_DIM {
                    return Err(Error::DimensionMismatch(format!(
                        "block dimension {d} outside 1..={MAX_BLOCK_DIM}"
                    )));
                }
                if a.iter().any(|m| m.nrows() != d || m.ncols() != d) {
                    return Err(Error::DimensionMismatch(format!(
                        "all coefficients must be {d}x{d}"
                    )));
                }
                let s = linalg::smallest_singular_value(first);
                if !(s > INJECTIVITY_FLOOR) {
                    return Err(Error::NotInjective {
                        smallest_singular_value: s,
                    });
                }
                Ok(())
            }
        }
    }
}

/// Truncated array of `d x d` normalized block moments of an operator-valued
/// kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoefficientKernel {
    order: usize,
    dim: usize,
    blocks: Vec<CMatrix>,
    asymptotics: Option<Asymptotics>,
}

impl BlockCoefficientKernel {
    /// Builds from row-major `order x order` blocks and checks
    /// block-Hermitian symmetry.
    pub fn new(order: usize, dim: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != order * order {
            return Err(Error::DimensionMismatch(format!(
                "expected {} blocks, got {}",
                order * order,
                blocks.len()
            )));
        }
        if blocks.iter().any(|b| b.nrows() != dim || b.ncols() != dim) {
            return Err(Error::DimensionMismatch(format!("blocks must be {dim}x{dim}")));
        }
        let k = Self {
            order,
            dim,
            blocks,
            asymptotics: None,
        };
        let residual = k.hermitian_residual();
        if residual > 1e-12 {
            return Err(Error::NotHermitian { residual });
        }
        Ok(k)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, m: usize, n: usize) -> &CMatrix {
        &self.blocks[m * self.order + n]
    }

    /// Limit metadata of `||B[n][n]||`, inherited from a named base weight.
    pub fn asymptotics(&self) -> Option<Asymptotics> {
        self.asymptotics
    }

    /// `max_(m,n) ||B[m][n] - B[n][m]^H||_inf`, relative to the largest block.
    pub fn hermitian_residual(&self) -> f64 {
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for m in 0..self.order {
            for n in 0..self.order {
                let b = self.block(m, n);
                scale = scale.max(linalg::norm_inf(b));
                defect = defect.max(linalg::norm_inf(&(b - self.block(n, m).adjoint())));
            }
        }
        defect / scale.max(1.0)
    }

    /// Smallest eigenvalue over all diagonal blocks.
    pub fn min_diagonal_eigenvalue(&self) -> f64 {
        (0..self.order)
            .map(|n| {
                linalg::hermitian_eigenvalues(self.block(n, n))
                    .first()
                    .copied()
                    .unwrap_or(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `||B[n][n]||` for every `n` (operator norm of a PSD block).
    pub fn diagonal_norms(&self) -> Vec<f64> {
        (0..self.order)
            .map(|n| {
                linalg::hermitian_eigenvalues(self.block(n, n))
                    .last()
                    .copied()
                    .unwrap_or(0.0)
                    .max(0.0)
            })
            .collect()
    }

    /// `<B[m][n] eta, eta>`.
    pub fn quadratic_form(&self, m: usize, n: usize, eta: &DVector<C64>) -> C64 {
        eta.dotc(&(self.block(m, n) * eta))
    }
}

/// `K(z, w) = k(z, w) I_d`.
pub fn quasi_scalar(a: &CoefficientMatrix, d: usize) -> Result<BlockCoefficientKernel> {
    if d == 0 || d > MAX_BLOCK_DIM {
        return Err(Error::DimensionMismatch(format!(
            "block dimension {d} outside 1..={MAX_BLOCK_DIM}"
        )));
    }
    let n = a.order();
    let eye = CMatrix::identity(d, d);
    let blocks = (0..n * n)
        .map(|k| &eye * a.get(k / n, k % n))
        .collect();
    Ok(BlockCoefficientKernel {
        order: n,
        dim: d,
        blocks,
        asymptotics: a.asymptotics(),
    })
}

/// Block moments of `P(z) (sum_k beta_k^2 z^k conj(w)^k) I P(w)^*`:
/// `B[m][n] = sum_(i + k = m, j + k = n) A_i A_j^H beta_k^2`.
pub fn block_polynomial_conjugate(
    beta: &SequenceSpec,
    p: &PolynomialSpec,
    order: usize,
) -> Result<BlockCoefficientKernel> {
    let p = match p {
        PolynomialSpec::Scalar(_) => PolynomialSpec::Block(p.blocks()),
        PolynomialSpec::Block(_) => p.clone(),
    };
    p.validate()?;
    let coeffs = p.blocks();
    let d = coeffs[0].nrows();
    let deg = p.degree();
    let base = diagonal_coefficients(beta, order)?;
    let w: Vec<f64> = (0..order).map(|k| base.get(k, k).re).collect();

    let mut blocks = vec![CMatrix::zeros(d, d); order * order];
    for m in 0..order {
        for n in 0..=m {
            let mut acc = CMatrix::zeros(d, d);
            for (i, ai) in coeffs.iter().enumerate().take(deg.min(m) + 1) {
                let k = m - i;
                if k > n || n - k > deg {
                    continue;
                }
                let aj = &coeffs[n - k];
                acc += (ai * aj.adjoint()) * re(w[k]);
            }
            if m == n {
                // exact Hermitian diagonal
                let h = (&acc + acc.adjoint()) * re(0.5);
                blocks[m * order + n] = h;
            } else {
                blocks[n * order + m] = acc.adjoint();
                blocks[m * order + n] = acc;
            }
        }
    }
    Ok(BlockCoefficientKernel {
        order,
        dim: d,
        blocks,
        asymptotics: beta.asymptotics(),
    })
}
