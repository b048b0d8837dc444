//! Built-in verification suites over a fixed set of kernels.

use std::fmt;

use clap::ValueEnum;
use kernel_dynamics::constructions::{
    block_polynomial_conjugate, expand_znf_in_basis, quasi_scalar, PolynomialSpec,
};
use kernel_dynamics::criteria::{self, Classification, CriteriaConfig, DynamicsReport, TestSet};
use kernel_dynamics::kernel::{evaluate_kernel, kernel_norm_at};
use kernel_dynamics::linalg::{c, CMatrix, C64};
use kernel_dynamics::model::{
    build_model, compression_norm, criterion_witness, eigenvector_check, periodic_point, VectorInD,
};
use kernel_dynamics::oracle;
use kernel_dynamics::seq::{NamedFamily, SequenceSpec};

use crate::analyze::{analyze, probe_vectors, ReplaySource, EIGEN_POINTS};
use crate::spec::{KernelKind, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Structural,
    Oracles,
    CriteriaConsistency,
    Dynamics,
    All,
}

impl Suite {
    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Structural, Suite::Oracles, Suite::CriteriaConsistency, Suite::Dynamics],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Structural => "structural",
            Suite::Oracles => "oracles",
            Suite::CriteriaConsistency => "criteria-consistency",
            Suite::Dynamics => "dynamics",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{}: {}", self.suite, self.name, self.detail)
    }
}

struct Recorder {
    suite: &'static str,
    out: Vec<CheckResult>,
}

impl Recorder {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.out.push(CheckResult {
            suite: self.suite,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Records an error as a failed check.
    fn attempt<T>(&mut self, name: &str, r: Result<T, impl fmt::Display>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(name, false, format!("error: {e}"));
                None
            }
        }
    }
}

fn named(f: NamedFamily) -> SequenceSpec {
    SequenceSpec::named(f)
}

fn expr(text: &str) -> SequenceSpec {
    SequenceSpec::expr(text).expect("built-in expression parses")
}

/// `beta_n^2 = 2^-n`.
pub fn geometric_half() -> SequenceSpec {
    named(NamedFamily::Geometric {
        r: std::f64::consts::FRAC_1_SQRT_2,
    })
}

pub fn tridiagonal_example() -> KernelKind {
    KernelKind::Tridiagonal {
        mu: expr("1/(n+1)"),
        nu: expr("1/(2*(n+2))"),
        mu_phase: None,
        nu_phase: None,
    }
}

/// The six kernels every suite runs on.
pub fn builtin_kernels() -> Vec<(&'static str, KernelKind)> {
    vec![
        ("hardy", KernelKind::Diagonal { beta: named(NamedFamily::Hardy) }),
        ("bergman", KernelKind::Diagonal { beta: named(NamedFamily::Bergman) }),
        ("dirichlet", KernelKind::Diagonal { beta: named(NamedFamily::Dirichlet) }),
        ("geometric", KernelKind::Diagonal { beta: geometric_half() }),
        (
            "theta_power",
            KernelKind::ThetaConjugated {
                beta: named(NamedFamily::Power { s: -1.0 }),
                theta: None,
            },
        ),
        ("tridiagonal", tridiagonal_example()),
    ]
}

/// The named families with closed-form asymptotics.
pub fn named_families() -> Vec<NamedFamily> {
    vec![
        NamedFamily::Hardy,
        NamedFamily::Bergman,
        NamedFamily::Dirichlet,
        NamedFamily::Geometric { r: 0.5 },
        NamedFamily::Power { s: -1.0 },
    ]
}

pub fn run(suite: Suite) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for s in suite.members() {
        let mut r = Recorder {
            suite: s.name(),
            out: Vec::new(),
        };
        match s {
            Suite::Structural => structural(&mut r),
            Suite::Oracles => oracles(&mut r),
            Suite::CriteriaConsistency => consistency(&mut r),
            Suite::Dynamics => dynamics(&mut r),
            Suite::All => unreachable!("expanded by members()"),
        }
        out.extend(r.out);
    }
    out
}

fn structural(r: &mut Recorder) {
    for (name, kind) in builtin_kernels() {
        let spec = KernelSpec::new(kind.clone(), Some(64));
        let Some(report) = r.attempt(name, analyze(&spec, None)) else {
            continue;
        };
        for s in &report.structural {
            r.check(
                format!("{name}/{}", s.name),
                s.passed,
                format!("value {:e}, tolerance {:e}", s.value, s.tolerance),
            );
        }
        let ann = report.diagnostics.annihilation.as_ref();
        r.check(
            format!("{name}/annihilation"),
            ann.is_some_and(|a| a.annihilated),
            format!("(M_z^*)^64 residual {:e}", ann.map_or(f64::NAN, |a| a.max_residual_norm)),
        );

        let Some(a) = r.attempt(name, kind.build_scalar(64)) else {
            continue;
        };
        let Some(model) = r.attempt(name, build_model(&a)) else {
            continue;
        };
        let mut worst: f64 = 0.0;
        for v in probe_vectors(64, 8) {
            let (Ok(x), Ok(y)) = (model.norm(&v), model.gram_norm(&v)) else {
                worst = f64::INFINITY;
                continue;
            };
            worst = worst.max((x - y).abs() / y.max(f64::MIN_POSITIVE));
        }
        r.check(format!("{name}/norm_paths"), worst <= 1e-12, format!("relative gap {worst:e}"));

        let mut sym: f64 = 0.0;
        let mut diag: f64 = 0.0;
        for k in 0..10 {
            let t = k as f64;
            let z = c(0.6 * (1.3 * t).cos(), 0.6 * (0.7 * t).sin());
            let w = c(0.5 * (0.4 * t).sin(), -0.5 * (1.1 * t).cos());
            match (evaluate_kernel(&a, z, w), evaluate_kernel(&a, w, z)) {
                (Ok(p), Ok(q)) => sym = sym.max((p - q.conj()).norm() / p.norm().max(1.0)),
                _ => sym = f64::INFINITY,
            }
            match (kernel_norm_at(&a, w), evaluate_kernel(&a, w, w)) {
                (Ok(nrm), Ok(kw)) => diag = diag.max((nrm * nrm - kw.re).abs() / kw.re.max(1.0)),
                _ => diag = f64::INFINITY,
            }
        }
        r.check(format!("{name}/conjugate_symmetry"), sym <= 1e-12, format!("max defect {sym:e}"));
        r.check(format!("{name}/norm_at_point"), diag <= 1e-12, format!("max defect {diag:e}"));

        for order in [16, 32, 64] {
            let Some(model) = r.attempt(name, build_model(&a.truncate(order))) else {
                continue;
            };
            for &(x, y) in &EIGEN_POINTS {
                let label = format!("{name}/eigenvector/N{order}/w=({x},{y})");
                if let Some(chk) = r.attempt(&label, eigenvector_check(&model, c(x, y))) {
                    let ok = chk.holds() && (x != 0.0 || y != 0.0 || chk.residual == 0.0);
                    r.check(label, ok, format!("residual {:e} <= bound {:e}", chk.residual, chk.bound));
                }
            }
        }
    }
}

fn oracles(r: &mut Recorder) {
    const N: usize = 32;
    let mu: Vec<C64> = (0..=N).map(|n| c(1.0 / (n as f64 + 1.0), 0.0)).collect();
    let nu: Vec<C64> = (0..=N).map(|n| c(1.0 / (2.0 * (n as f64 + 2.0)), 0.0)).collect();
    if let Some(a) = r.attempt("tridiagonal", tridiagonal_example().build_scalar(N)) {
        let err = oracle::max_abs_diff(&oracle::tridiagonal_expansion(&mu, &nu, N), a.matrix());
        r.check("tridiagonal_expansion", err <= 1e-14, format!("max entry error {err:e}"));
    }
    if let Some(t) = tridiagonal_example().tridiagonal(N) {
        let (a0, b0) = (mu[0] * mu[0].conj(), mu[0] * nu[0].conj());
        for n in [0, 1, 3, 8] {
            let label = format!("znf_expansion/n{n}");
            if let Some(alpha) = r.attempt(&label, expand_znf_in_basis(&t, n)) {
                let solved = oracle::solve_znf(&mu, &nu, n, a0, b0, alpha.len());
                let err = alpha.iter().zip(&solved).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                r.check(label, err <= 1e-12, format!("max coefficient error {err:e}"));
            }
        }
    }

    let beta = named(NamedFamily::Power { s: -1.0 });
    let beta_sq: Vec<f64> = (0..N as u64).map(|n| beta.eval_squared(n).unwrap_or(f64::NAN)).collect();
    let base = oracle::diagonal_series(&beta_sq);
    let conjugated = [
        ("theta_conjugation", vec![c(1.0, 0.0); N], None),
        (
            "polynomial_conjugation",
            vec![c(1.0, 0.0), c(0.5, -0.25), c(0.0, 0.3)],
            Some(vec![c(1.0, 0.0), c(0.5, -0.25), c(0.0, 0.3)]),
        ),
    ];
    for (label, p, poly) in conjugated {
        let kind = match poly {
            None => KernelKind::ThetaConjugated {
                beta: beta.clone(),
                theta: None,
            },
            Some(q) => KernelKind::PolynomialConjugated {
                beta: beta.clone(),
                poly: q.iter().map(|z| crate::spec::ComplexValue::Pair([z.re, z.im])).collect(),
            },
        };
        if let Some(a) = r.attempt(label, kind.build_scalar(N)) {
            let brute = oracle::triple_product(&p, &base, N);
            let err = oracle::max_abs_diff(&brute, a.matrix()) / kernel_dynamics::linalg::norm_inf(a.matrix());
            r.check(label, err <= 1e-12, format!("relative error {err:e}"));
        }
    }

    for f in named_families() {
        let s = named(f);
        let label = format!("gram_inner_products/{f}");
        let Some(a) = r.attempt(&label, KernelKind::Diagonal { beta: s.clone() }.build_scalar(N)) else {
            continue;
        };
        let bsq: Vec<f64> = (0..N as u64).map(|n| s.eval_squared(n).unwrap_or(f64::NAN)).collect();
        let g = oracle::weighted_inner_products(a.matrix(), &bsq);
        let err = (g - a.matrix()).norm() / a.matrix().norm();
        r.check(label, err <= 1e-12, format!("relative error {err:e}"));
    }
    if let Some(a) = r.attempt(
        "gram_inner_products/theta",
        KernelKind::ThetaConjugated {
            beta: beta.clone(),
            theta: None,
        }
        .build_scalar(N),
    ) {
        // columns D L^H: monomial coefficients of the conjugated reproducing vectors
        let l = CMatrix::from_fn(N, N, |i, j| if i >= j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let d = CMatrix::from_fn(N, N, |i, j| if i == j { c(beta_sq[i], 0.0) } else { c(0.0, 0.0) });
        let g = oracle::weighted_inner_products(&(d * l.adjoint()), &beta_sq);
        let err = (g - a.matrix()).norm() / a.matrix().norm();
        r.check("gram_inner_products/theta", err <= 1e-10, format!("relative error {err:e}"));
    }

    let blocks = vec![
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.0), c(0.8, 0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(0.3, -0.2), c(0.0, 0.0), c(0.5, 0.0), c(-0.1, 0.4)]),
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.1), c(0.25, 0.0), c(0.0, 0.0), c(0.2, 0.0)]),
    ];
    let label = "block_polynomial_conjugation";
    if let Some(k) = r.attempt(
        label,
        block_polynomial_conjugate(&beta, &PolynomialSpec::Block(blocks.clone()), N),
    ) {
        let brute = oracle::block_triple_product(&blocks, &beta_sq, N);
        let mut err: f64 = 0.0;
        for (m, row) in brute.iter().enumerate() {
            for (n, b) in row.iter().enumerate() {
                err = err.max((k.block(m, n) - b).norm());
            }
        }
        r.check(label, err <= 1e-12, format!("max block error {err:e}"));
    }
}

fn outcome_text(c: Classification) -> &'static str {
    c.token()
}

fn consistency(r: &mut Recorder) {
    const N: usize = 256;
    let cfg = CriteriaConfig::default();
    for f in named_families() {
        let spec = KernelSpec::new(KernelKind::Diagonal { beta: named(f) }, Some(N));
        let Some(report) = r.attempt(&f.to_string(), analyze(&spec, None)) else {
            continue;
        };
        let pairs = [
            (criteria::HYPERCYCLIC_SUFFICIENT, criteria::SALAS),
            (criteria::MIXING_SUFFICIENT, criteria::COSTAKIS_SAMBARINO),
            (criteria::CHAOS_SUFFICIENT, criteria::GROSSE_ERDMANN),
        ];
        for (sufficient, exact) in pairs {
            let (Some(s), Some(e)) = (report.verdict(sufficient), report.verdict(exact)) else {
                r.check(format!("{f}/{sufficient}"), false, "verdict missing");
                continue;
            };
            let agree = s.classification.outcome().is_some() && s.classification.outcome() == e.classification.outcome();
            r.check(
                format!("{f}/{sufficient}_vs_{exact}"),
                agree,
                format!(
                    "{} vs {}",
                    outcome_text(s.classification),
                    outcome_text(e.classification)
                ),
            );
        }

        let Some(a) = r.attempt(&f.to_string(), KernelKind::Diagonal { beta: named(f) }.build_scalar(64)) else {
            continue;
        };
        let Some(scalar) = r.attempt(&f.to_string(), DynamicsReport::scalar(&a, &cfg)) else {
            continue;
        };
        for d in [2, 3] {
            let label = format!("{f}/quasi_scalar_d{d}");
            let Some(k) = r.attempt(&label, quasi_scalar(&a, d)) else {
                continue;
            };
            if let Some(block) = r.attempt(&label, DynamicsReport::block(&k, &TestSet::Canonical, &cfg)) {
                let same = scalar
                    .verdicts()
                    .iter()
                    .zip(block.verdicts())
                    .all(|(x, y)| x.classification == y.classification);
                r.check(label, same, "block verdicts equal scalar verdicts");
            }
        }
    }

    for (name, kind) in builtin_kernels() {
        let spec = KernelSpec::new(kind, Some(N));
        let Some(report) = r.attempt(name, analyze(&spec, None)) else {
            continue;
        };
        let sat = |id: &str| report.verdict(id).is_some_and(|v| v.classification.is_satisfied());
        let chain = (!sat(criteria::CHAOS_SUFFICIENT) || sat(criteria::MIXING_SUFFICIENT))
            && (!sat(criteria::MIXING_SUFFICIENT) || sat(criteria::HYPERCYCLIC_SUFFICIENT));
        r.check(format!("{name}/implications"), chain, "chaos => mixing => hypercyclic");
        let Some(src) = r.attempt(name, ReplaySource::new(&spec, N)) else {
            continue;
        };
        for v in &report.verdicts {
            r.check(
                format!("{name}/replay/{}", v.condition_id),
                src.replays(v),
                format!("{} witnesses", v.evidence.witness_indices.len()),
            );
        }
        if name == "theta_power" {
            let ok = sat(criteria::SALAS)
                && report
                    .verdict(criteria::HYPERCYCLIC_SUFFICIENT)
                    .is_some_and(|v| v.classification.is_violated());
            r.check(
                "theta_power/sufficient_not_necessary",
                ok,
                "base hypercyclic while the diagonal condition fails",
            );
        }
        if name == "tridiagonal" {
            let ok = sat(criteria::TRIDIAGONAL_HYPERCYCLIC) && sat(criteria::TRIDIAGONAL_MIXING);
            r.check("tridiagonal/characterization", ok, "hypercyclic and mixing");
            let gate = report.diagnostics.tridiagonal_gate.as_ref();
            let exact = gate.is_some_and(|g| g.sup_mu_ratio == 2.0 && g.sup_nu_ratio == 0.5);
            r.check("tridiagonal/gate_values", exact, "sup ratios 2 and 1/2");
        }
    }
}

fn dynamics(r: &mut Recorder) {
    const N: usize = 64;
    let build = |kind: KernelKind| kind.build_scalar(N).and_then(|a| build_model(&a));

    if let Some(model) = r.attempt("dirichlet", build(KernelKind::Diagonal { beta: named(NamedFamily::Dirichlet) })) {
        let f = VectorInD::basis(0, N);
        let mut worst: f64 = 0.0;
        let mut exact = true;
        for k in 0..=60 {
            match criterion_witness(&model, &f, k) {
                Ok(w) => {
                    exact &= w.exact;
                    worst = worst.max((w.norm * w.norm - 1.0 / (k as f64 + 1.0)).abs() * (k as f64 + 1.0));
                }
                Err(_) => exact = false,
            }
        }
        r.check("dirichlet/witness_norms", worst <= 1e-12, format!("relative error {worst:e}"));
        r.check("dirichlet/witness_exact", exact, "(M_z^*)^k g_k = f for k <= 60");
    }
    if let Some(model) = r.attempt("hardy", build(KernelKind::Diagonal { beta: named(NamedFamily::Hardy) })) {
        let f = VectorInD::basis(0, N);
        let ok = (0..=60).all(|k| criterion_witness(&model, &f, k).is_ok_and(|w| w.norm == 1.0));
        r.check("hardy/witness_norms", ok, "||g_k|| = 1");
        if let Some(o) = r.attempt("hardy/orbit", kernel_dynamics::model::orbit(&model, &VectorInD::basis(5, N), 8)) {
            r.check(
                "hardy/orbit",
                o.norms == [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0],
                format!("{:?}", o.norms),
            );
        }
        let cn = compression_norm(&model);
        r.check("hardy/compression_norm", (cn.norm - 1.0).abs() <= 1e-12, format!("{}", cn.norm));
    }
    if let Some(model) = r.attempt("geometric", build(KernelKind::Diagonal { beta: geometric_half() })) {
        let x = VectorInD::basis(0, N);
        let mut last = f64::INFINITY;
        for p in [1, 2, 4, 8, 16] {
            let label = format!("geometric/periodic/p{p}");
            if let Some(pp) = r.attempt(&label, periodic_point(&model, &x, p)) {
                r.check(
                    format!("{label}/bound"),
                    pp.residual <= pp.bound,
                    format!("residual {:e} <= bound {:e}", pp.residual, pp.bound),
                );
                r.check(
                    format!("{label}/distance"),
                    pp.distance_to_x <= last,
                    format!("distance {:e}", pp.distance_to_x),
                );
                last = pp.distance_to_x;
            }
        }
    }
    if let Some(model) = r.attempt("dirichlet", build(KernelKind::Diagonal { beta: named(NamedFamily::Dirichlet) })) {
        let cn = compression_norm(&model);
        let ok = (cn.norm - std::f64::consts::SQRT_2).abs() <= 1e-12 && !cn.likely_unbounded;
        r.check("dirichlet/compression_norm", ok, format!("{}", cn.norm));
    }
    if let Some(model) = r.attempt("bergman", build(KernelKind::Diagonal { beta: named(NamedFamily::Bergman) })) {
        let cn = compression_norm(&model);
        r.check("bergman/compression_norm", cn.norm < 1.0, format!("{}", cn.norm));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_build() {
        for (name, kind) in builtin_kernels() {
            kind.build_scalar(16).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn dynamics_suite_passes() {
        let failed: Vec<_> = run(Suite::Dynamics).into_iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
