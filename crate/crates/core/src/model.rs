//! Exact finite restriction of `M_z^*` to `span{K_0, ..., K_(N-1)}`.
//!
//! Vectors are stored by their coordinates in the normalized derivative
//! kernels `K_n`, where `M_z^*` is the plain backward shift `K_n -> K_(n-1)`,
//! `K_0 -> 0`. Norms go through the Gram factor `G = U^H U`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{gram, CoefficientMatrix, GramData};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::seq::Asymptotics;

const ZERO: C64 = C64::new(0.0, 0.0);
/// Relative slack on bounds that are equalities in exact arithmetic.
const BOUND_SLACK: f64 = 1e-12;
/// Window summability gate: tail over the last half vs. the whole sum.
const TAIL_FRACTION: f64 = 0.1;

/// `sum_j c_j K_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorInD {
    pub coords: Vec<C64>,
}

impl VectorInD {
    pub fn new(coords: Vec<C64>) -> Self {
        Self { coords }
    }

    pub fn zero(len: usize) -> Self {
        Self {
            coords: vec![ZERO; len],
        }
    }

    /// `K_index`, padded to `len`.
    pub fn basis(index: usize, len: usize) -> Self {
        let mut v = Self::zero(len.max(index + 1));
        v.coords[index] = c(1.0, 0.0);
        v
    }

    /// One past the last nonzero coordinate.
    pub fn support(&self) -> usize {
        self.coords.iter().rposition(|z| *z != ZERO).map_or(0, |i| i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.support() == 0
    }

    fn padded(&self, n: usize) -> Vec<C64> {
        let mut c = self.coords.clone();
        c.resize(n.max(c.len()), ZERO);
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedModel {
    gram: GramData,
    /// `U S U^(-1)`: `M_z^*` in the orthonormal basis.
    on_matrix: CMatrix,
    diagonal: Vec<f64>,
    asymptotics: Option<Asymptotics>,
}

pub fn build_model(a: &CoefficientMatrix) -> Result<TruncatedModel> {
    let g = gram(a)?;
    let n = g.order();
    // U S: column j of U moved to column j + 1
    let mut us = CMatrix::zeros(n, n);
    for j in 1..n {
        us.set_column(j, &g.u.column(j - 1));
    }
    // X U = U S  <=>  U^T X^T = (U S)^T
    let on_matrix = g
        .u
        .transpose()
        .solve_lower_triangular(&us.transpose())
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: g.min_eigenvalue,
            scaled_ratio: g.scaled_ratio,
        })?
        .transpose();
    let diagonal = (0..n).map(|i| g.g[(i, i)].re).collect();
    Ok(TruncatedModel {
        gram: g,
        on_matrix,
        diagonal,
        asymptotics: a.asymptotics(),
    })
}

impl TruncatedModel {
    pub fn order(&self) -> usize {
        self.gram.order()
    }

    pub fn gram(&self) -> &GramData {
        &self.gram
    }

    pub fn on_matrix(&self) -> &CMatrix {
        &self.on_matrix
    }

    /// `||K_n|| = a_nn^(1/2)`.
    pub fn basis_norm(&self, n: usize) -> f64 {
        self.diagonal[n].sqrt()
    }

    fn check(&self, v: &VectorInD) -> Result<()> {
        if v.support() > self.order() {
            return Err(Error::Capacity {
                needed: v.support(),
                order: self.order(),
            });
        }
        Ok(())
    }

    fn column(&self, v: &VectorInD) -> CVector {
        let n = self.order();
        CVector::from_iterator(n, (0..n).map(|i| v.coords.get(i).copied().unwrap_or(ZERO)))
    }

    /// Coordinates in the orthonormal basis, `U c`.
    pub fn to_orthonormal(&self, v: &VectorInD) -> Result<CVector> {
        self.check(v)?;
        Ok(&self.gram.u * self.column(v))
    }

    /// `||U c||_2`.
    pub fn norm(&self, v: &VectorInD) -> Result<f64> {
        Ok(self.to_orthonormal(v)?.norm())
    }

    /// `(c^H G c)^(1/2)`, computed without the factor.
    pub fn gram_norm(&self, v: &VectorInD) -> Result<f64> {
        self.check(v)?;
        let c = self.column(v);
        Ok(c.dotc(&(&self.gram.g * &c)).re.max(0.0).sqrt())
    }

    /// `||on_matrix U c - U S c||_2`, the disagreement of the two ways of
    /// applying `M_z^*`.
    pub fn conjugation_defect(&self, v: &VectorInD) -> Result<f64> {
        let lhs = &self.on_matrix * self.to_orthonormal(v)?;
        let rhs = self.to_orthonormal(&apply_adjoint(self, v)?)?;
        Ok((lhs - rhs).norm())
    }
}

/// `c'_j = c_(j+1)`; the length is kept.
pub fn apply_adjoint(model: &TruncatedModel, v: &VectorInD) -> Result<VectorInD> {
    model.check(v)?;
    let mut coords = v.coords.clone();
    if !coords.is_empty() {
        coords.remove(0);
        coords.push(ZERO);
    }
    Ok(VectorInD { coords })
}

/// `(M_z^*)^k v`.
pub fn apply_adjoint_power(model: &TruncatedModel, v: &VectorInD, k: usize) -> Result<VectorInD> {
    model.check(v)?;
    let len = v.coords.len();
    let mut coords: Vec<C64> = v.coords.iter().skip(k).copied().collect();
    coords.resize(len, ZERO);
    Ok(VectorInD { coords })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorCheck {
    #[serde(with = "crate::float")]
    pub residual: f64,
    /// `|w|^(N-1) (1 + |w|) ||K_(N-1)||`
    #[serde(with = "crate::float")]
    pub bound: f64,
}

impl EigenvectorCheck {
    pub fn holds(&self) -> bool {
        self.residual <= self.bound
    }
}

/// `||M_z^* k_w - conj(w) k_w||` for `k_w = sum_(n<N) conj(w)^n K_n`.
pub fn eigenvector_check(model: &TruncatedModel, w: C64) -> Result<EigenvectorCheck> {
    let modulus = w.norm();
    if modulus >= 1.0 {
        return Err(Error::OutsideDisc { modulus });
    }
    let n = model.order();
    let wb = w.conj();
    let mut coords = Vec::with_capacity(n);
    let mut p = c(1.0, 0.0);
    for _ in 0..n {
        coords.push(p);
        p *= wb;
    }
    let v = VectorInD::new(coords);
    let shifted = apply_adjoint(model, &v)?;
    let diff = VectorInD::new(
        shifted
            .coords
            .iter()
            .zip(&v.coords)
            .map(|(s, x)| s - wb * x)
            .collect(),
    );
    let residual = model.norm(&diff)?;
    let bound = if n == 0 {
        0.0
    } else {
        modulus.powi(n as i32 - 1) * (1.0 + modulus) * model.basis_norm(n - 1)
    };
    Ok(EigenvectorCheck { residual, bound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    /// `||(M_z^*)^j v||` for `j = 0..=steps`.
    pub norms: Vec<f64>,
    pub states: Vec<VectorInD>,
}

pub fn orbit(model: &TruncatedModel, v: &VectorInD, steps: usize) -> Result<Orbit> {
    model.check(v)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    let mut x = VectorInD::new(v.padded(model.order()));
    for j in 0..=steps {
        norms.push(model.norm(&x)?);
        states.push(x.clone());
        if j < steps {
            x = apply_adjoint(model, &x)?;
        }
    }
    Ok(Orbit { norms, states })
}

/// `g_k`: `f` moved up by `k`, so that `(M_z^*)^k g_k = f`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionWitness {
    pub g: VectorInD,
    pub norm: f64,
    /// `(M_z^*)^k g_k` reproduced `f` coordinate for coordinate.
    pub exact: bool,
}

pub fn criterion_witness(model: &TruncatedModel, f: &VectorInD, k: usize) -> Result<CriterionWitness> {
    let n = model.order();
    let m = f.support();
    if m + k > n {
        return Err(Error::Capacity { needed: m + k, order: n });
    }
    let mut coords = vec![ZERO; n];
    coords[k..k + m].copy_from_slice(&f.coords[..m]);
    let g = VectorInD::new(coords);
    let back = apply_adjoint_power(model, &g, k)?;
    let exact = back.coords == f.padded(n)[..n];
    Ok(CriterionWitness {
        norm: model.norm(&g)?,
        g,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPoint {
    pub x_p: VectorInD,
    /// `||(M_z^*)^p x_p - x_p||`
    pub residual: f64,
    /// `sum_(j >= N-p) |x_p[j]| ||K_j||`, the dropped boundary terms.
    pub bound: f64,
    /// `||x_p - x||`
    pub distance_to_x: f64,
}

/// Checks that `a_nn` is summable: exactly for named families, otherwise the
/// last half must be non-increasing and carry a small share of the total.
pub fn summability_gate(model: &TruncatedModel) -> Result<()> {
    if let Some(a) = model.asymptotics {
        return if a.square_summable {
            Ok(())
        } else {
            Err(Error::NotSummable("diagonal family is not summable".into()))
        };
    }
    let d = &model.diagonal;
    let half = d.len() / 2;
    if d[half..].windows(2).any(|p| p[1] > p[0] * (1.0 + BOUND_SLACK)) {
        return Err(Error::NotSummable("a_nn increases on the last half of the window".into()));
    }
    let total: f64 = d.iter().sum();
    let tail: f64 = d[half..].iter().sum();
    if !(tail <= TAIL_FRACTION * total) {
        return Err(Error::NotSummable(format!(
            "last-half tail {tail:e} exceeds {TAIL_FRACTION} of the total {total:e}"
        )));
    }
    Ok(())
}

/// `x_p = sum_(n>=1) T^(np) x + x + sum_(n>=1) u_(np)` with `T = M_z^*` and
/// `u_k` the `k`-fold forward shift of `x`, truncated below `N`.
pub fn periodic_point(model: &TruncatedModel, x: &VectorInD, p: usize) -> Result<PeriodicPoint> {
    if p == 0 {
        return Err(Error::InvalidArgument("period must be positive".into()));
    }
    model.check(x)?;
    summability_gate(model)?;
    let n = model.order();
    let m = x.support();
    let src = x.padded(n);
    let mut coords = vec![ZERO; n];
    for (j, slot) in coords.iter_mut().enumerate() {
        // indices j + t p inside the support, t in Z
        let mut i = j % p;
        while i < m {
            *slot += src[i];
            i += p;
        }
    }
    let x_p = VectorInD::new(coords);
    let shifted = apply_adjoint_power(model, &x_p, p)?;
    let diff = VectorInD::new(shifted.coords.iter().zip(&x_p.coords).map(|(a, b)| a - b).collect());
    let residual = model.norm(&diff)?;
    let bound = (n.saturating_sub(p)..n)
        .map(|j| x_p.coords[j].norm() * model.basis_norm(j))
        .sum::<f64>()
        * (1.0 + BOUND_SLACK);
    let delta = VectorInD::new(x_p.coords.iter().zip(&src).map(|(a, b)| a - b).collect());
    let distance_to_x = model.norm(&delta)?;
    Ok(PeriodicPoint {
        x_p,
        residual,
        bound,
        distance_to_x,
    })
}

/// Spectral norm of the compression of `M_z` to the window, a lower bound
/// for `||M_z||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionNorm {
    #[serde(with = "crate::float")]
    pub norm: f64,
    /// Same quantity at order `N / 2`.
    #[serde(with = "crate::float")]
    pub half_order_norm: f64,
    /// Doubling the order more than doubled the norm.
    pub likely_unbounded: bool,
}

pub fn compression_norm(model: &TruncatedModel) -> CompressionNorm {
    let n = model.order();
    let norm = linalg::spectral_norm(&model.on_matrix);
    let h = n / 2;
    let half_order_norm = linalg::spectral_norm(&model.on_matrix.view((0, 0), (h, h)).into_owned());
    CompressionNorm {
        norm,
        half_order_norm,
        likely_unbounded: !norm.is_finite() || norm > 2.0 * half_order_norm,
    }
}
