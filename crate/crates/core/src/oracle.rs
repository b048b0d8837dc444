//! Brute-force reference computations, written independently of the fast
//! paths so they can be compared against them.
//!
//! Bivariate series are dense `N x N` arrays `s[m][n]` holding the
//! coefficient of `z^m conj(w)^n`.

use crate::linalg::{CMatrix, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

fn zeros(n: usize) -> Vec<Vec<C64>> {
    vec![vec![ZERO; n]; n]
}

/// Coefficients of `sum_(k<N) e_k(z) conj(e_k(w))` with
/// `e_k(z) = mu_k z^k + nu_k z^(k+1)`, truncated to order `N`.
pub fn tridiagonal_expansion(mu: &[C64], nu: &[C64], order: usize) -> Vec<Vec<C64>> {
    let mut s = zeros(order);
    for k in 0..order {
        let e = [(k, mu[k]), (k + 1, nu[k])];
        for &(i, a) in &e {
            for &(j, b) in &e {
                if i < order && j < order {
                    s[i][j] += a * b.conj();
                }
            }
        }
    }
    s
}

/// Coefficients of `theta(z) k(z, w) conj(theta(w))`, by the quadruple sum
/// over all index splits.
pub fn triple_product(theta: &[C64], k: &[Vec<C64>], order: usize) -> Vec<Vec<C64>> {
    let mut s = zeros(order);
    let th = |i: usize| theta.get(i).copied().unwrap_or(ZERO);
    for m in 0..order {
        for n in 0..order {
            let mut acc = ZERO;
            for i in 0..=m {
                for j in 0..=n {
                    acc += th(i) * k[m - i][n - j] * th(j).conj();
                }
            }
            s[m][n] = acc;
        }
    }
    s
}

/// Diagonal kernel `sum beta_k^2 z^k conj(w)^k` as a dense series.
pub fn diagonal_series(beta_sq: &[f64]) -> Vec<Vec<C64>> {
    let n = beta_sq.len();
    let mut s = zeros(n);
    for k in 0..n {
        s[k][k] = C64::new(beta_sq[k], 0.0);
    }
    s
}

/// Block coefficients of `P(z) (sum_k beta_k^2 z^k conj(w)^k) P(w)^*` by
/// direct expansion over `(i, j, k)`.
pub fn block_triple_product(coeffs: &[CMatrix], beta_sq: &[f64], order: usize) -> Vec<Vec<CMatrix>> {
    let d = coeffs[0].nrows();
    let mut s = vec![vec![CMatrix::zeros(d, d); order]; order];
    for (i, ai) in coeffs.iter().enumerate() {
        for (j, aj) in coeffs.iter().enumerate() {
            for (k, &b) in beta_sq.iter().enumerate() {
                let (m, n) = (i + k, j + k);
                if m < order && n < order {
                    s[m][n] += ai * aj.adjoint() * C64::new(b, 0.0);
                }
            }
        }
    }
    s
}

/// Solves `sum_j alpha_j e_j = z^shift (a + b z)` for `alpha` by forward
/// substitution on the monomial coefficient system.
pub fn solve_znf(mu: &[C64], nu: &[C64], shift: usize, a: C64, b: C64, order: usize) -> Vec<C64> {
    // row r: coefficient of z^r; column j: e_j
    let mut sys = CMatrix::zeros(order, order);
    for j in 0..order {
        sys[(j, j)] = mu[j];
        if j + 1 < order {
            sys[(j + 1, j)] = nu[j];
        }
    }
    let mut rhs = vec![ZERO; order];
    if shift < order {
        rhs[shift] = a;
    }
    if shift + 1 < order {
        rhs[shift + 1] = b;
    }
    let mut x = vec![ZERO; order];
    for r in 0..order {
        let mut acc = rhs[r];
        for c in 0..r {
            acc -= sys[(r, c)] * x[c];
        }
        x[r] = acc / sys[(r, r)];
    }
    x
}

/// Inner products `<f_n, f_m>` in `H^2(beta)`, where column `n` of `columns`
/// holds the monomial coefficients of `f_n`:
/// `sum_k f_n[k] conj(f_m[k]) / beta_k^2`, returned as `G[m][n]`.
pub fn weighted_inner_products(columns: &CMatrix, beta_sq: &[f64]) -> CMatrix {
    let n = columns.ncols();
    let mut g = CMatrix::zeros(n, n);
    for m in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for (k, &b) in beta_sq.iter().enumerate() {
                acc += columns[(k, j)] * columns[(k, m)].conj() / b;
            }
            g[(m, j)] = acc;
        }
    }
    g
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &[Vec<C64>], b: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (m, row) in a.iter().enumerate() {
        for (n, v) in row.iter().enumerate() {
            worst = worst.max((v - b[(m, n)]).norm());
        }
    }
    worst
}
