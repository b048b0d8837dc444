use kernel_dynamics::constructions::{
    block_polynomial_conjugate, conjugate_by_series, geometric_series_coeffs, quasi_scalar, tridiagonal_coefficients,
    znf_norm_bound, PolynomialSpec, TridiagonalSpec,
};
use kernel_dynamics::criteria::{
    self, chaos_sufficient, costakis_sambarino, grosse_erdmann_chaos, hypercyclicity_sufficient, mixing_sufficient,
    salas_characterization, sequences, Classification, CriteriaConfig, DynamicsReport, TestSet,
};
use kernel_dynamics::kernel::{diagonal_coefficients, normalized_diagonal, CoefficientMatrix};
use kernel_dynamics::linalg::{c, re, CMatrix, C64};
use kernel_dynamics::model::{
    apply_adjoint, apply_adjoint_power, build_model, criterion_witness, eigenvector_check, periodic_point, VectorInD,
};
use kernel_dynamics::seq::SequenceSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAMILIES: [&str; 5] = ["hardy", "bergman", "dirichlet", "geometric(0.5)", "power(-1)"];

fn spec(s: &str) -> SequenceSpec {
    s.parse().unwrap()
}

fn diag(s: &str, n: usize) -> CoefficientMatrix {
    diagonal_coefficients(&spec(s), n).unwrap()
}

fn theta(s: &str, n: usize) -> CoefficientMatrix {
    conjugate_by_series(&diag(s, n), &geometric_series_coeffs(n)).unwrap()
}

#[test]
fn shift_never_leaves_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for a in [diag("dirichlet", 32), theta("power(-1)", 32)] {
        let m = build_model(&a).unwrap();
        for _ in 0..20 {
            let v = VectorInD::new((0..32).map(|_| c(rng.gen(), rng.gen())).collect());
            let s = apply_adjoint(&m, &v).unwrap();
            assert_eq!(s.coords.len(), 32);
            assert_eq!(s.coords[31], re(0.0));
            assert!(apply_adjoint_power(&m, &v, 32).unwrap().is_zero());
        }
    }
}

#[test]
fn eigenvector_bound_all_radii() {
    for a in [diag("hardy", 64), diag("dirichlet", 64), theta("power(-1)", 64)] {
        for n in [16, 32, 64] {
            let m = build_model(&kernel_dynamics::kernel::CoefficientMatrix::from_matrix(
                a.matrix().view((0, 0), (n, n)).into_owned(),
            )
            .unwrap())
            .unwrap();
            for k in 0..=9 {
                for phase in [0.0, 1.0, 2.5] {
                    let w = C64::from_polar(k as f64 / 10.0, phase);
                    let e = eigenvector_check(&m, w).unwrap();
                    assert!(e.holds(), "N={n} w={w}: {} > {}", e.residual, e.bound);
                }
            }
        }
    }
}

#[test]
fn eigenvector_residual_scaling() {
    let h16 = build_model(&diag("hardy", 16)).unwrap();
    let h32 = build_model(&diag("hardy", 32)).unwrap();
    let w = re(0.5);
    let r16 = eigenvector_check(&h16, w).unwrap().residual;
    let r32 = eigenvector_check(&h32, w).unwrap().residual;
    assert!((r32 / r16 - 0.5f64.powi(16)).abs() < 1e-12);
}

#[test]
fn witness_decay_matches_hypercyclicity_verdict() {
    let cfg = CriteriaConfig::default();
    for family in FAMILIES {
        let a = diag(family, 64);
        let m = build_model(&a).unwrap();
        let v = hypercyclicity_sufficient(&normalized_diagonal(&a).unwrap(), &cfg).unwrap();
        let norms: Vec<f64> = v
            .evidence
            .witness_indices
            .iter()
            .map(|&k| {
                let w = criterion_witness(&m, &VectorInD::basis(0, 1), k).unwrap();
                assert!(w.exact);
                w.norm * w.norm
            })
            .collect();
        let decays = norms.len() > 1
            && norms.windows(2).all(|p| p[1] < p[0])
            && norms[norms.len() - 1] < 0.1 * norms[0];
        assert_eq!(decays, v.classification.is_satisfied(), "{family}");
    }
}

#[test]
fn periodic_points_converge() {
    for family in ["geometric(0.7071067811865476)", "power(-1)"] {
        let m = build_model(&diag(family, 64)).unwrap();
        let mut previous = f64::INFINITY;
        for p in 1..=20 {
            let pp = periodic_point(&m, &VectorInD::new(vec![re(1.0), c(0.5, -0.5)]), p).unwrap();
            assert!(pp.residual <= pp.bound, "{family} p={p}");
            assert!(pp.distance_to_x <= previous * (1.0 + 1e-12), "{family} p={p}");
            previous = pp.distance_to_x;
        }
    }
}

#[test]
fn sufficient_and_exact_agree_on_named_families() {
    let cfg = CriteriaConfig::default();
    for family in FAMILIES {
        let beta = spec(family);
        let a = diag(family, 256);
        let d = normalized_diagonal(&a).unwrap();
        let pairs = [
            (hypercyclicity_sufficient(&d, &cfg).unwrap(), salas_characterization(&beta, &cfg).unwrap()),
            (mixing_sufficient(&d, &cfg).unwrap(), costakis_sambarino(&beta, &cfg).unwrap()),
            (chaos_sufficient(&a, &cfg).unwrap(), grosse_erdmann_chaos(&beta, &cfg).unwrap()),
        ];
        for (sufficient, exact) in pairs {
            assert_eq!(sufficient.classification, exact.classification, "{family} {}", exact.condition_id);
        }
    }
}

#[test]
fn chaos_implies_mixing() {
    let cfg = CriteriaConfig::default();
    for family in FAMILIES {
        let a = diag(family, 256);
        let r = DynamicsReport::scalar(&a, &cfg).unwrap();
        if r.chaotic_sufficient.classification == Classification::SatisfiedAnalytic {
            assert!(r.mixing_sufficient.classification.is_satisfied(), "{family}");
            assert!(r.hypercyclic_sufficient.classification.is_satisfied(), "{family}");
        }
    }
}

#[test]
fn conjugation_counterexample_pairs() {
    let cfg = CriteriaConfig::default();
    for family in ["power(-1)", "geometric(0.5)", "dirichlet", "power(-2)"] {
        let beta = spec(family);
        let k = theta(family, 256);
        let v = hypercyclicity_sufficient(&normalized_diagonal(&k).unwrap(), &cfg).unwrap();
        assert!(salas_characterization(&beta, &cfg).unwrap().classification.is_satisfied());
        if family == "dirichlet" {
            // partial sums of the harmonic series diverge: not a counterexample
            assert_ne!(v.classification, Classification::SatisfiedOnWindow);
        } else {
            assert_eq!(v.classification, Classification::ViolatedOnWindow, "{family}");
        }
    }
}

#[test]
fn quasi_scalar_verdicts_match_scalar() {
    let cfg = CriteriaConfig::default();
    let mut kernels: Vec<CoefficientMatrix> = FAMILIES.iter().map(|f| diag(f, 128)).collect();
    kernels.push(diag("1/(n+1)^3", 128));
    kernels.push(theta("power(-1)", 128));
    for a in &kernels {
        let scalar = DynamicsReport::scalar(a, &cfg).unwrap();
        for d in 1..=3 {
            let q = quasi_scalar(a, d).unwrap();
            for tests in [TestSet::Canonical, TestSet::OperatorNorm] {
                let block = DynamicsReport::block(&q, &tests, &cfg).unwrap();
                assert_eq!(block.hypercyclic_sufficient.classification, scalar.hypercyclic_sufficient.classification);
                assert_eq!(block.mixing_sufficient.classification, scalar.mixing_sufficient.classification);
                assert_eq!(block.chaotic_sufficient.classification, scalar.chaotic_sufficient.classification);
            }
        }
    }
}

#[test]
fn block_polynomial_verdict_tracks_base() {
    let cfg = CriteriaConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for family in FAMILIES {
        let d = 2;
        let coeffs: Vec<CMatrix> = (0..3)
            .map(|j| {
                let mut m = CMatrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                if j == 0 {
                    m += CMatrix::identity(d, d) * re(3.0);
                }
                m
            })
            .collect();
        let beta = spec(family);
        let k = block_polynomial_conjugate(&beta, &PolynomialSpec::Block(coeffs), 64).unwrap();
        let v = criteria::block_hypercyclicity_sufficient(&k, &TestSet::OperatorNorm, &cfg).unwrap();
        let base = salas_characterization(&beta, &cfg).unwrap();
        assert_eq!(v.classification.outcome(), base.classification.outcome(), "{family}");
    }
}

#[test]
fn znf_bound_holds_for_random_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..10 {
        let order = 40;
        let mu: Vec<f64> = (0..=order).map(|_| rng.gen_range(0.5..1.5)).collect();
        let nu: Vec<f64> = (0..=order)
            .map(|n| rng.gen_range(0.01..0.8) * mu[(n + 1).min(order)])
            .collect();
        let t = TridiagonalSpec::real(
            SequenceSpec::List { values: mu, tail: None },
            SequenceSpec::List { values: nu, tail: None },
            order,
        );
        tridiagonal_coefficients(&t).unwrap();
        for n in 0..30 {
            let b = znf_norm_bound(&t, n).unwrap();
            assert!(b.holds(), "n={n}: {} + {} > {}", b.norm_sq, b.tail_bound, b.bound);
        }
    }
}

#[test]
fn verdict_witnesses_replay() {
    let cfg = CriteriaConfig::default();
    for family in FAMILIES {
        let a = diag(family, 256);
        let d = normalized_diagonal(&a).unwrap().values;
        let tails = criteria::absolute_tails(&a, 256);
        let report = DynamicsReport::scalar(&a, &cfg).unwrap();
        for v in report.verdicts() {
            assert!(
                v.replay(|s, i| match s {
                    sequences::DIAGONAL => d.get(i).copied(),
                    sequences::ABS_TAIL => tails.get(i).copied(),
                    _ => None,
                }),
                "{family} {}",
                v.condition_id
            );
        }
    }
}
