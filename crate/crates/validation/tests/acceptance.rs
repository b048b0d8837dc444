//! One test per acceptance criterion.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use kernel_dynamics::constructions::{
    block_polynomial_conjugate, conjugate_by_series, expand_znf_in_basis, geometric_series_coeffs,
    tridiagonal_boundedness, tridiagonal_coefficients, znf_norm_bound, PolynomialSpec, TridiagonalSpec,
};
use kernel_dynamics::criteria::{absolute_tails, Classification, CriteriaConfig};
use kernel_dynamics::kernel::{diagonal_coefficients, gram, CoefficientMatrix};
use kernel_dynamics::linalg::{c, re, CMatrix, C64};
use kernel_dynamics::model::{
    apply_adjoint, apply_adjoint_power, build_model, criterion_witness, eigenvector_check, periodic_point,
    TruncatedModel, VectorInD,
};
use kernel_dynamics::oracle;
use kernel_dynamics::seq::SequenceSpec;
use kernel_dynamics_cli::analyze::{analyze, probe_vectors, AnalysisReport, ReplaySource, EIGEN_POINTS};
use kernel_dynamics_cli::demo::counterexample;
use kernel_dynamics_cli::spec::{parse_spec, KernelSpec};
use kernel_dynamics_cli::verify::builtin_kernels;
use kernel_dynamics_validation::{criterion, ensure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const GRAM_DIAGONAL_REL_TOL: f64 = 1e-12;
const GRAM_THETA_TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-12;
const PERIODIC_RESIDUAL_TOL: f64 = 1e-9;
const PERIODIC_DISTANCE_REL_TOL: f64 = 0.10;
const ZNF_CONSTANT: f64 = 4.0;

const NAMED_FAMILIES: [&str; 5] = ["hardy", "bergman", "dirichlet", "geometric(0.5)", "power(-1)"];
const POLYNOMIAL_FAMILIES: [&str; 4] = ["hardy", "bergman", "dirichlet", "power(-1)"];
const SATISFIED: [Classification; 2] = [Classification::SatisfiedAnalytic, Classification::SatisfiedOnWindow];

fn seq(s: &str) -> SequenceSpec {
    s.parse().unwrap()
}

fn spec(value: serde_json::Value) -> KernelSpec {
    KernelSpec::from_value(value).unwrap()
}

fn diagonal_spec(beta: &str, order: usize) -> KernelSpec {
    parse_spec(&format!(r#"{{"kind":"diagonal","beta":{{"named":"{beta}"}},"order":{order}}}"#)).unwrap()
}

fn run(s: &KernelSpec) -> AnalysisReport {
    analyze(s, None).unwrap()
}

fn classification(r: &AnalysisReport, id: &str) -> Classification {
    r.verdict(id).unwrap_or_else(|| panic!("missing verdict {id}")).classification
}

fn builtin_scalar(order: usize) -> Vec<(&'static str, CoefficientMatrix)> {
    builtin_kernels()
        .into_iter()
        .map(|(name, kind)| (name, kind.build_scalar(order).unwrap()))
        .collect()
}

fn model(a: &CoefficientMatrix) -> TruncatedModel {
    build_model(a).unwrap()
}

fn geometric_sqrt_half() -> SequenceSpec {
    seq("2^(-n/2)")
}

fn tridiagonal_example(order: usize) -> TridiagonalSpec {
    TridiagonalSpec::real(seq("1/(n+1)"), seq("1/(2*(n+2))"), order)
}

#[test]
fn backward_shift_exactness() {
    criterion(1, "backward_shift_exactness", || {
        const N: usize = 64;
        for (name, a) in builtin_scalar(N) {
            let m = model(&a);
            for n in 0..N {
                let image = apply_adjoint(&m, &VectorInD::basis(n, N)).map_err(|e| e.to_string())?;
                let expected = if n == 0 { VectorInD::zero(N) } else { VectorInD::basis(n - 1, N) };
                ensure(image.coords == expected.coords, || format!("{name}: M_z^* K_{n} is not K_{}", n.wrapping_sub(1)))?;
            }
            for v in probe_vectors(N, 8) {
                let r = apply_adjoint_power(&m, &v, N).map_err(|e| e.to_string())?;
                ensure(r.is_zero(), || format!("{name}: (M_z^*)^{N} leaves a nonzero vector"))?;
            }
        }
        Ok(format!("{} kernels, N = {N}, zero error", builtin_kernels().len()))
    });
}

#[test]
fn gram_identity() {
    criterion(2, "gram_identity", || {
        const N: usize = 64;
        let mut worst_rel: f64 = 0.0;
        for family in NAMED_FAMILIES {
            let beta = seq(family);
            let a = diagonal_coefficients(&beta, N).unwrap();
            let g = gram(&a).map_err(|e| e.to_string())?;
            let beta_sq = beta.squared_values(N).unwrap();
            let inner = oracle::weighted_inner_products(a.matrix(), &beta_sq);
            for m in 0..N {
                for n in 0..N {
                    let scale = g.g[(m, m)].norm().max(g.g[(n, n)].norm());
                    worst_rel = worst_rel.max((inner[(m, n)] - g.g[(m, n)]).norm() / scale);
                }
            }
        }
        ensure(worst_rel <= GRAM_DIAGONAL_REL_TOL, || format!("diagonal relative error {worst_rel:e}"))?;

        // L D L^H is numerically singular for geometric weights at this order
        let mut worst_theta: f64 = 0.0;
        for family in POLYNOMIAL_FAMILIES {
            let beta = seq(family);
            let k = conjugate_by_series(&diagonal_coefficients(&beta, N).unwrap(), &geometric_series_coeffs(N)).unwrap();
            let g = gram(&k).map_err(|e| e.to_string())?;
            let brute = oracle::triple_product(
                &geometric_series_coeffs(N),
                &oracle::diagonal_series(&beta.squared_values(N).unwrap()),
                N,
            );
            worst_theta = worst_theta.max(oracle::max_abs_diff(&brute, &g.g));
        }
        ensure(worst_theta <= GRAM_THETA_TOL, || format!("theta-conjugated error {worst_theta:e}"))?;
        Ok(format!("diagonal rel {worst_rel:.1e}, theta {worst_theta:.1e}"))
    });
}

#[test]
fn eigenvector_relation() {
    criterion(3, "eigenvector_relation", || {
        let mut checked = 0;
        for n in [16, 32, 64] {
            for (name, a) in builtin_scalar(n) {
                let m = model(&a);
                for (x, y) in EIGEN_POINTS {
                    let w = c(x, y);
                    let e = eigenvector_check(&m, w).map_err(|e| e.to_string())?;
                    ensure(e.holds(), || format!("{name} N={n} w={w}: {:e} > {:e}", e.residual, e.bound))?;
                    if w == re(0.0) {
                        ensure(e.residual == 0.0, || format!("{name} N={n}: residual at 0 is {:e}", e.residual))?;
                    }
                    checked += 1;
                }
            }
        }
        Ok(format!("{checked} (kernel, N, w) cases within the dropped-term bound"))
    });
}

#[test]
fn sufficient_and_exact_agree() {
    criterion(4, "sufficient_and_exact_agree", || {
        let pairs = [
            ("hypercyclic_sufficient", "salas_hypercyclic"),
            ("mixing_sufficient", "costakis_sambarino_mixing"),
            ("chaos_sufficient", "grosse_erdmann_chaos"),
        ];
        for family in NAMED_FAMILIES {
            let r = run(&diagonal_spec(family, 256));
            for (sufficient, exact) in pairs {
                let (s, e) = (classification(&r, sufficient), classification(&r, exact));
                ensure(s.outcome().is_some() && s.outcome() == e.outcome(), || {
                    format!("{family}: {sufficient} = {s} but {exact} = {e}")
                })?;
            }
        }
        Ok(format!("{} families x {} pairs agree", NAMED_FAMILIES.len(), pairs.len()))
    });
}

#[test]
fn dirichlet_mixing() {
    criterion(5, "dirichlet_mixing", || {
        let scalar = run(&diagonal_spec("dirichlet", 256));
        for id in ["mixing_sufficient", "costakis_sambarino_mixing"] {
            let got = classification(&scalar, id);
            ensure(got == Classification::SatisfiedAnalytic, || format!("dirichlet {id} = {got}"))?;
        }
        let pairs = [
            ("block_hypercyclic_sufficient", "hypercyclic_sufficient"),
            ("block_mixing_sufficient", "mixing_sufficient"),
            ("block_chaos_sufficient", "chaos_sufficient"),
        ];
        for dim in [2, 3] {
            let q = run(&spec(json!({
                "kind": "quasi_scalar",
                "base": {"kind": "diagonal", "beta": {"named": "dirichlet"}},
                "dim": dim,
                "order": 256
            })));
            for (block, sc) in pairs {
                let (b, s) = (classification(&q, block), classification(&scalar, sc));
                ensure(b == s, || format!("d={dim}: {block} = {b}, scalar {sc} = {s}"))?;
            }
        }
        Ok("mixing SATISFIED_ANALYTIC; d = 2, 3 block verdicts equal scalar".into())
    });
}

#[test]
fn counterexample_reproduction() {
    criterion(6, "counterexample_reproduction", || {
        const N: usize = 256;
        let r = counterexample(&seq("1/(n+1)"), N, &CriteriaConfig::default()).map_err(|e| e.to_string())?;
        ensure(r.base_hypercyclic.classification.is_satisfied(), || {
            format!("base salas = {}", r.base_hypercyclic.classification)
        })?;
        ensure(r.conjugated_sufficient.classification == Classification::ViolatedOnWindow, || {
            format!("conjugated sufficient = {}", r.conjugated_sufficient.classification)
        })?;
        let mut partial = 0.0;
        let mut err: f64 = 0.0;
        for (n, v) in r.conjugated_diagonal.iter().enumerate() {
            partial += 1.0 / ((n + 1) as f64).powi(2);
            err = err.max((v - partial).abs());
        }
        ensure(r.conjugated_diagonal.len() == N, || format!("{} diagonal values", r.conjugated_diagonal.len()))?;
        ensure(err <= CLOSED_FORM_TOL, || format!("partial-sum error {err:e}"))?;
        Ok(format!("base SATISFIED, conjugated VIOLATED_ON_WINDOW, partial sums to {err:.1e}"))
    });
}

#[test]
fn tridiagonal_suite() {
    criterion(7, "tridiagonal_suite", || {
        let t = tridiagonal_example(32);
        let gate = tridiagonal_boundedness(&t, 31).map_err(|e| e.to_string())?;
        ensure(gate.sup_mu_ratio == 2.0 && gate.sup_nu_ratio == 0.5 && gate.holds, || {
            format!("gate sup ratios {} and {}", gate.sup_mu_ratio, gate.sup_nu_ratio)
        })?;

        // a_00 = |mu_0|^2; the closed form covers n >= 1
        let mu: Vec<C64> = (0..32).map(|n| t.mu(n).unwrap()).collect();
        let nu: Vec<C64> = (0..32).map(|n| t.nu(n).unwrap()).collect();
        let expansion = oracle::tridiagonal_expansion(&mu, &nu, 32);
        let a = tridiagonal_coefficients(&t).map_err(|e| e.to_string())?;
        for n in 1..32 {
            let closed = 1.25 / ((n + 1) as f64).powi(2);
            let (got, brute) = (a.get(n, n).re, expansion[n][n].re);
            ensure((got - closed).abs() <= CLOSED_FORM_TOL && (brute - closed).abs() <= CLOSED_FORM_TOL, || {
                format!("a_{n}{n} = {got}, expansion {brute}, closed form {closed}")
            })?;
        }

        let alpha = expand_znf_in_basis(&t, 1).map_err(|e| e.to_string())?;
        let solved = oracle::solve_znf(&mu, &nu, 1, re(mu[0].norm_sqr()), mu[0] * nu[0].conj(), 32);
        for (j, expected) in [(1, 2.0), (2, -0.25), (3, 0.125)] {
            ensure((alpha[j] - re(expected)).norm() <= CLOSED_FORM_TOL, || format!("alpha_{j} = {}", alpha[j]))?;
            ensure((alpha[j] - solved[j]).norm() <= CLOSED_FORM_TOL, || format!("alpha_{j} vs solve {}", solved[j]))?;
        }

        for n in 0..=24 {
            let b = znf_norm_bound(&t, n).map_err(|e| e.to_string())?;
            let limit = ZNF_CONSTANT / t.mu(n).unwrap().norm_sqr();
            ensure(b.norm_sq + b.tail_bound <= limit, || {
                format!("n={n}: ||z^n f||^2 <= {:e} exceeds {limit:e}", b.norm_sq + b.tail_bound)
            })?;
        }

        let r = run(&spec(json!({
            "kind": "tridiagonal",
            "mu": {"expr": "1/(n+1)"},
            "nu": {"expr": "1/(2*(n+2))"},
            "order": 128
        })));
        for id in ["tridiagonal_hypercyclic", "tridiagonal_mixing"] {
            let got = classification(&r, id);
            ensure(SATISFIED.contains(&got), || format!("{id} = {got}"))?;
        }
        Ok("gate (2, 1/2), diagonal, alpha, C = 4 bound, hypercyclic and mixing".into())
    });
}

fn random_blocks(rng: &mut ChaCha8Rng, dim: usize, degree: usize) -> Vec<CMatrix> {
    (0..=degree)
        .map(|j| {
            let mut m = CMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            if j == 0 {
                m += CMatrix::identity(dim, dim) * re(dim as f64 + 1.0);
            }
            m
        })
        .collect()
}

fn blocks_json(blocks: &[CMatrix]) -> serde_json::Value {
    blocks
        .iter()
        .map(|b| {
            (0..b.nrows())
                .map(|i| (0..b.ncols()).map(|j| json!([b[(i, j)].re, b[(i, j)].im])).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn block_polynomial_conjugation() {
    criterion(8, "block_polynomial_conjugation", || {
        const N: usize = 32;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let beta = seq("1/sqrt(n+1)");
        let beta_sq = beta.squared_values(N).unwrap();
        let mut worst: f64 = 0.0;
        for dim in 1..=4 {
            for degree in 0..=3 {
                let coeffs = random_blocks(&mut rng, dim, degree);
                let k = block_polynomial_conjugate(&beta, &PolynomialSpec::Block(coeffs.clone()), N)
                    .map_err(|e| e.to_string())?;
                for n in 0..N {
                    let mut formula = CMatrix::zeros(dim, dim);
                    for (j, aj) in coeffs.iter().enumerate().take(degree.min(n) + 1) {
                        formula += aj * aj.adjoint() * re(beta_sq[n - j]);
                    }
                    worst = worst.max((k.block(n, n) - formula).iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
            }
        }
        ensure(worst <= CLOSED_FORM_TOL, || format!("C_nn formula error {worst:e}"))?;

        for trial in 0..5 {
            let family = NAMED_FAMILIES[rng.gen_range(0..NAMED_FAMILIES.len())];
            let dim = rng.gen_range(1..=4);
            let degree = rng.gen_range(0..=3);
            let blocks = random_blocks(&mut rng, dim, degree);
            let r = run(&spec(json!({
                "kind": "block_polynomial",
                "beta": {"named": family},
                "blocks": blocks_json(&blocks),
                "order": 128
            })));
            let (b, s) = (
                classification(&r, "block_hypercyclic_sufficient"),
                classification(&r, "salas_hypercyclic"),
            );
            ensure(b.outcome().is_some() && b.outcome() == s.outcome(), || {
                format!("trial {trial} ({family}, d={dim}, deg={degree}): block {b}, base {s}")
            })?;
        }
        Ok(format!("C_nn formula to {worst:.1e}; 5 randomized verdicts track the base"))
    });
}

#[test]
fn periodic_points() {
    criterion(9, "periodic_points", || {
        const N: usize = 64;
        let m = model(&diagonal_coefficients(&geometric_sqrt_half(), N).unwrap());
        let x = VectorInD::basis(0, 1);
        let mut previous = f64::INFINITY;
        let mut failures = Vec::new();
        let mut last = None;
        for p in [1, 2, 4, 8, 16] {
            let pp = periodic_point(&m, &x, p).map_err(|e| e.to_string())?;
            if pp.residual > PERIODIC_RESIDUAL_TOL {
                failures.push(format!("p={p} residual {:.2e} > {PERIODIC_RESIDUAL_TOL:e}", pp.residual));
            }
            if !(pp.distance_to_x < previous) {
                failures.push(format!("p={p} distance {:e} not below {previous:e}", pp.distance_to_x));
            }
            previous = pp.distance_to_x;
            last = Some(pp);
        }
        let d16 = last.unwrap().distance_to_x.powi(2);
        // sum_(j>=1) 2^(-16 j)
        let closed = 2f64.powi(-16) / (1.0 - 2f64.powi(-16));
        let rel = (d16 - closed).abs() / closed;
        if rel > PERIODIC_DISTANCE_REL_TOL {
            failures.push(format!("distance^2 at p=16 is {d16:e}, closed form {closed:e}"));
        }
        if failures.is_empty() {
            Ok(format!("residuals within {PERIODIC_RESIDUAL_TOL:e}, distance^2(16) within {rel:.1e}"))
        } else {
            Err(failures.join("; "))
        }
    });
}

#[test]
fn criterion_witnesses() {
    criterion(10, "criterion_witnesses", || {
        const N: usize = 64;
        let f = VectorInD::basis(0, 1);
        let dirichlet = model(&diagonal_coefficients(&seq("dirichlet"), N).unwrap());
        let hardy = model(&diagonal_coefficients(&seq("hardy"), N).unwrap());
        for k in 0..=60 {
            let w = criterion_witness(&dirichlet, &f, k).map_err(|e| e.to_string())?;
            let expected = 1.0 / (k + 1) as f64;
            ensure((w.norm * w.norm - expected).abs() <= CLOSED_FORM_TOL && w.exact, || {
                format!("dirichlet k={k}: norm^2 {} exact {}", w.norm * w.norm, w.exact)
            })?;
            let h = criterion_witness(&hardy, &f, k).map_err(|e| e.to_string())?;
            ensure((h.norm - 1.0).abs() <= CLOSED_FORM_TOL && h.exact, || format!("hardy k={k}: norm {}", h.norm))?;
        }
        Ok("dirichlet ||g_k||^2 = 1/(k+1), hardy ||g_k|| = 1, k <= 60".into())
    });
}

#[test]
fn chaos_tail_test() {
    criterion(11, "chaos_tail_test", || {
        const N: usize = 64;
        let a = diagonal_coefficients(&geometric_sqrt_half(), N).unwrap();
        for (n, t) in absolute_tails(&a, N).iter().enumerate() {
            // tails of the window: 2^(1-n) - 2^(1-N)
            let closed = 2f64.powi(1 - n as i32);
            ensure((t - closed).abs() <= CLOSED_FORM_TOL, || format!("tail {n} = {t:e}, closed form {closed:e}"))?;
        }
        let geometric = run(&spec(json!({"kind": "diagonal", "beta": {"expr": "2^(-n/2)"}, "order": 256})));
        let g = classification(&geometric, "chaos_sufficient");
        ensure(SATISFIED.contains(&g), || format!("geometric chaos = {g}"))?;
        let hardy = run(&diagonal_spec("hardy", 256));
        let h = classification(&hardy, "chaos_sufficient");
        ensure(h == Classification::ViolatedOnWindow, || format!("hardy chaos = {h}"))?;
        Ok(format!("tails 2^(1-N'), geometric {g}, hardy {h}"))
    });
}

fn acceptance_specs() -> Vec<KernelSpec> {
    let mut specs: Vec<KernelSpec> = NAMED_FAMILIES.iter().map(|f| diagonal_spec(f, 256)).collect();
    specs.extend(builtin_kernels().into_iter().map(|(_, k)| KernelSpec::new(k, Some(128))));
    specs.push(spec(json!({"kind": "diagonal", "beta": {"expr": "2^(-n/2)"}, "order": 256})));
    for dim in [2, 3] {
        specs.push(spec(json!({
            "kind": "quasi_scalar",
            "base": {"kind": "diagonal", "beta": {"named": "dirichlet"}},
            "dim": dim,
            "order": 256
        })));
    }
    specs.push(spec(json!({
        "kind": "block_polynomial",
        "beta": {"named": "power(-1)"},
        "blocks": [[[2, 0], [0, 2]], [[1, [0, 1]], [0, 0.5]]],
        "order": 128
    })));
    specs.push(spec(json!({"kind": "polynomial_conjugated", "beta": {"named": "bergman"}, "poly": [1, -0.5], "order": 64})));
    specs.push(spec(json!({"kind": "explicit_matrix", "matrix": [[2, [0.5, 0.5]], [[0.5, -0.5], 1]]})));
    specs
}

#[test]
fn determinism_and_replay() {
    criterion(12, "determinism_and_replay", || {
        let specs = acceptance_specs();
        let mut replayed = 0;
        for s in &specs {
            let first = run(s).without_timestamp().to_json();
            let second = run(s).without_timestamp().to_json();
            let kind = s.kernel.name();
            ensure(first == second, || format!("{kind}: reports differ between runs"))?;
            let report = AnalysisReport::from_json(&first).map_err(|e| e.to_string())?;
            let source = ReplaySource::new(s, report.provenance.order).map_err(|e| e.to_string())?;
            for v in &report.verdicts {
                ensure(source.replays(v), || format!("{kind}: {} witnesses do not replay", v.condition_id))?;
                replayed += 1;
            }
        }
        Ok(format!("{} specs byte-identical, {replayed} verdicts replay", specs.len()))
    });
}
