//! Analysis reports: verdicts, structural checks and model diagnostics for
//! one kernel spec.

use std::collections::BTreeMap;

use kernel_dynamics::constructions::{BlockCoefficientKernel, TridiagonalBoundedness};
use kernel_dynamics::criteria::{
    self, costakis_sambarino, grosse_erdmann_chaos, mz_boundedness_diag, salas_characterization,
    sequences, tridiagonal_characterization, Classification, CriteriaConfig, DiagBoundedness,
    DynamicsReport, Evidence, EvidenceBasis, Verdict,
};
use kernel_dynamics::kernel::{gram, normalized_diagonal, psd_check, CoefficientMatrix, DEFAULT_PSD_TOL, PD_RATIO};
use kernel_dynamics::linalg::{c, C64};
use kernel_dynamics::model::{
    apply_adjoint, apply_adjoint_power, build_model, compression_norm, eigenvector_check, TruncatedModel,
    VectorInD,
};
use kernel_dynamics::seq::SequenceSpec;
use kernel_dynamics::{float, Error};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::spec::{BuiltKernel, KernelSpec};

pub const DEFAULT_ANALYSIS_ORDER: usize = 256;
pub const TOOL_NAME: &str = "kdyn";

const HERMITIAN_TOL: f64 = 1e-14;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const CONJUGATION_TOL: f64 = 1e-10;
const SUFFICIENT_NOT_NECESSARY: &str = "sufficient_not_necessary";

/// Eigenvector points; the largest modulus stays inside the disc.
pub const EIGEN_POINTS: [(f64, f64); 4] = [(0.0, 0.0), (0.3, 0.0), (0.5, 0.2), (0.9, 0.0)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuralCheck {
    pub name: String,
    pub passed: bool,
    #[serde(with = "float")]
    pub value: f64,
    #[serde(with = "float")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl StructuralCheck {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
            note: None,
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompressionDiagnostic {
    #[serde(with = "float")]
    pub norm: f64,
    #[serde(with = "float")]
    pub half_order_norm: f64,
    pub likely_unbounded: bool,
    /// Always true: the compression only bounds `||M_z||` from below.
    pub lower_bound_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnihilationDiagnostic {
    pub power: usize,
    pub vectors_checked: usize,
    #[serde(with = "float")]
    pub max_residual_norm: f64,
    pub annihilated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateDiagnostic {
    pub window: usize,
    #[serde(with = "float")]
    pub sup_mu_ratio: f64,
    pub sup_mu_ratio_index: usize,
    #[serde(with = "float")]
    pub sup_nu_ratio: f64,
    pub sup_nu_ratio_index: usize,
    pub mu_ratio_analytic: bool,
    pub holds: bool,
}

impl From<&TridiagonalBoundedness> for GateDiagnostic {
    fn from(g: &TridiagonalBoundedness) -> Self {
        Self {
            window: g.window,
            sup_mu_ratio: g.sup_mu_ratio,
            sup_mu_ratio_index: g.sup_mu_ratio_index,
            sup_nu_ratio: g.sup_nu_ratio,
            sup_nu_ratio_index: g.sup_nu_ratio_index,
            mu_ratio_analytic: g.mu_ratio_analytic,
            holds: g.holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub kind: String,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_dim: Option<usize>,
    /// Leading normalized diagonal values (`max` over the test set for block kernels).
    #[serde(with = "float::vec")]
    pub diagonal_head: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compression_norm: Option<CompressionDiagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annihilation: Option<AnnihilationDiagnostic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundedness: Option<DiagBoundedness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tridiagonal_gate: Option<GateDiagnostic>,
    /// Named flags such as `sufficient_not_necessary`.
    pub flags: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub order: usize,
    pub criteria: CriteriaConfig,
    /// Excluded from the determinism contract.
    pub generated_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub spec: Value,
    pub verdicts: Vec<Verdict>,
    pub structural: Vec<StructuralCheck>,
    pub diagnostics: Diagnostics,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn verdict(&self, condition_id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.condition_id == condition_id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// The report with the timestamp blanked, for determinism comparisons.
    pub fn without_timestamp(&self) -> Self {
        let mut r = self.clone();
        r.provenance.generated_at.clear();
        r
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Spec(#[from] crate::spec::SpecError),
    #[error("{context}: {source}")]
    Kernel {
        context: String,
        #[source]
        source: Error,
    },
}

trait Context<T> {
    fn context(self, what: &str) -> Result<T, AnalyzeError>;
}

impl<T> Context<T> for kernel_dynamics::Result<T> {
    fn context(self, what: &str) -> Result<T, AnalyzeError> {
        self.map_err(|source| AnalyzeError::Kernel {
            context: what.into(),
            source,
        })
    }
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Runs every applicable criterion and structural check.
pub fn analyze(spec: &KernelSpec, order: Option<usize>) -> Result<AnalysisReport, AnalyzeError> {
    let n = spec.resolve_order(order, DEFAULT_ANALYSIS_ORDER)?;
    let cfg = spec.criteria_config();
    let built = spec.build(n).context("building kernel")?;

    let mut diagnostics = Diagnostics {
        kind: spec.kernel.name().into(),
        order: n,
        block_dim: None,
        diagonal_head: Vec::new(),
        compression_norm: None,
        annihilation: None,
        model_error: None,
        boundedness: None,
        tridiagonal_gate: None,
        flags: BTreeMap::new(),
    };
    let (mut dynamics, structural) = match &built {
        BuiltKernel::Scalar(a) => {
            let d = normalized_diagonal(a).context("reading the diagonal")?;
            diagnostics.diagonal_head = d.values.iter().take(8).copied().collect();
            let report = DynamicsReport::scalar(a, &cfg).context("evaluating sufficient conditions")?;
            (report, scalar_structural(a, &mut diagnostics))
        }
        BuiltKernel::Block { kernel, tests } => {
            diagnostics.block_dim = Some(kernel.dim());
            let values = criteria::block_test_values(kernel, tests).context("evaluating test vectors")?;
            diagnostics.diagonal_head = values.iter().take(8).copied().collect();
            let report =
                DynamicsReport::block(kernel, tests, &cfg).context("evaluating block sufficient conditions")?;
            (report, block_structural(kernel))
        }
    };

    if let Some(beta) = spec.kernel.base_beta() {
        dynamics.exact_characterization = vec![
            salas_characterization(beta, &cfg).context("hypercyclicity characterization")?,
            costakis_sambarino(beta, &cfg).context("mixing characterization")?,
            grosse_erdmann_chaos(beta, &cfg).context("chaos characterization")?,
        ];
        let b = mz_boundedness_diag(beta, cfg.sequence_window).context("boundedness of M_z")?;
        dynamics.boundedness = Some(b.bounded_verdict());
        dynamics.analyticity = Some(b.analytic_verdict());
        diagnostics.boundedness = Some(b);
    }
    if let Some(t) = spec.kernel.tridiagonal(n) {
        let tv = tridiagonal_characterization(&t, &cfg).context("tridiagonal characterization")?;
        dynamics.boundedness = Some(gate_verdict(&tv.gate));
        diagnostics.tridiagonal_gate = Some(GateDiagnostic::from(&tv.gate));
        dynamics.exact_characterization = vec![tv.hypercyclic, tv.mixing];
    }

    if !dynamics.exact_characterization.is_empty() {
        let exact_hc = dynamics.exact_characterization[0].classification;
        let flag = exact_hc.is_satisfied() && dynamics.hypercyclic_sufficient.classification.is_violated();
        diagnostics.flags.insert(SUFFICIENT_NOT_NECESSARY.into(), flag);
    }

    Ok(AnalysisReport {
        spec: spec.to_value(),
        verdicts: dynamics.verdicts().into_iter().cloned().collect(),
        structural,
        diagnostics,
        provenance: Provenance {
            tool: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            order: n,
            criteria: cfg,
            generated_at: timestamp(),
        },
    })
}

fn gate_verdict(g: &TridiagonalBoundedness) -> Verdict {
    let classification = if g.holds {
        Classification::SatisfiedOnWindow
    } else {
        Classification::ViolatedOnWindow
    };
    Verdict {
        condition_id: criteria::MZ_BOUNDED.into(),
        classification,
        exact: false,
        evidence: Evidence {
            basis: EvidenceBasis::Gate,
            window: g.window,
            sequence: sequences::NU_OVER_NEXT_MU.into(),
            witness_indices: vec![g.sup_nu_ratio_index],
            witness_values: vec![g.sup_nu_ratio],
            extremal: vec![],
            note: Some("sufficient: sup |mu_n / mu_(n+1)| < inf and sup |nu_n / mu_(n+1)| < 1".into()),
        },
    }
}

/// Deterministic test vectors with full support.
pub fn probe_vectors(n: usize, count: usize) -> Vec<VectorInD> {
    (0..count)
        .map(|k| {
            VectorInD::new(
                (0..n)
                    .map(|j| {
                        let t = (j * (k + 2) + k) as f64;
                        c(t.cos(), (0.5 * t).sin()) / (1.0 + j as f64)
                    })
                    .collect(),
            )
        })
        .collect()
}

fn scalar_structural(a: &CoefficientMatrix, diagnostics: &mut Diagnostics) -> Vec<StructuralCheck> {
    let mut out = vec![StructuralCheck::at_most(
        "hermitian_residual",
        a.hermitian_residual(),
        HERMITIAN_TOL,
    )];
    let psd = psd_check(a, DEFAULT_PSD_TOL);
    out.push(StructuralCheck {
        name: "coefficient_psd".into(),
        passed: psd.psd,
        value: psd.min_eigenvalue,
        tolerance: -DEFAULT_PSD_TOL * psd.max_eigenvalue.max(1.0),
        note: Some(format!("largest eigenvalue {:e}", psd.max_eigenvalue)),
    });
    match gram(a) {
        Ok(g) => {
            out.push(StructuralCheck {
                name: "gram_positive_definite".into(),
                passed: true,
                value: g.scaled_ratio,
                tolerance: PD_RATIO,
                note: None,
            });
            out.push(StructuralCheck::at_most(
                "gram_reconstruction",
                g.reconstruction_error(),
                RECONSTRUCTION_TOL,
            ));
        }
        Err(e) => {
            let value = match e {
                Error::NotPositiveDefinite { scaled_ratio, .. } => scaled_ratio,
                _ => f64::NAN,
            };
            out.push(StructuralCheck {
                name: "gram_positive_definite".into(),
                passed: false,
                value,
                tolerance: PD_RATIO,
                note: Some(e.to_string()),
            });
        }
    }
    match build_model(a) {
        Ok(model) => out.extend(model_checks(&model, diagnostics)),
        Err(e) => diagnostics.model_error = Some(e.to_string()),
    }
    out
}

fn model_checks(model: &TruncatedModel, diagnostics: &mut Diagnostics) -> Vec<StructuralCheck> {
    let n = model.order();
    let mut out = Vec::new();

    let mut shift_defect = 0.0f64;
    for k in 0..n {
        let image = apply_adjoint(model, &VectorInD::basis(k, n));
        let expected = if k == 0 {
            VectorInD::zero(n)
        } else {
            VectorInD::basis(k - 1, n)
        };
        shift_defect = match image {
            Ok(v) => v
                .coords
                .iter()
                .zip(&expected.coords)
                .map(|(x, y)| (x - y).norm())
                .fold(shift_defect, f64::max),
            Err(_) => f64::INFINITY,
        };
    }
    out.push(
        StructuralCheck {
            name: "backward_shift_exact".into(),
            passed: shift_defect == 0.0,
            value: shift_defect,
            tolerance: 0.0,
            note: None,
        }
        .note("M_z^* maps each basis vector K_n to K_(n-1), K_0 to 0"),
    );

    let probes = probe_vectors(n, 4);
    let mut worst_annihilation = 0.0f64;
    let mut worst_conjugation = 0.0f64;
    for v in &probes {
        worst_annihilation = match apply_adjoint_power(model, v, n).and_then(|w| model.norm(&w)) {
            Ok(r) => worst_annihilation.max(r),
            Err(_) => f64::INFINITY,
        };
        worst_conjugation = match model.conjugation_defect(v) {
            Ok(r) => worst_conjugation.max(r),
            Err(_) => f64::INFINITY,
        };
    }
    diagnostics.annihilation = Some(AnnihilationDiagnostic {
        power: n,
        vectors_checked: probes.len(),
        max_residual_norm: worst_annihilation,
        annihilated: worst_annihilation == 0.0,
    });
    out.push(StructuralCheck::at_most(
        "shift_conjugation",
        worst_conjugation,
        CONJUGATION_TOL,
    ));

    let mut excess = f64::NEG_INFINITY;
    let mut all_hold = true;
    for &(x, y) in &EIGEN_POINTS {
        match eigenvector_check(model, C64::new(x, y)) {
            Ok(chk) => {
                all_hold &= chk.holds();
                excess = excess.max(chk.residual - chk.bound);
            }
            Err(_) => {
                all_hold = false;
                excess = f64::INFINITY;
            }
        }
    }
    out.push(
        StructuralCheck {
            name: "eigenvector_residual_bound".into(),
            passed: all_hold,
            value: excess,
            tolerance: 0.0,
            note: None,
        }
        .note("max over w of residual minus dropped-term bound"),
    );

    let cn = compression_norm(model);
    diagnostics.compression_norm = Some(CompressionDiagnostic {
        norm: cn.norm,
        half_order_norm: cn.half_order_norm,
        likely_unbounded: cn.likely_unbounded,
        lower_bound_only: true,
    });
    out
}

fn block_structural(k: &BlockCoefficientKernel) -> Vec<StructuralCheck> {
    let min_eig = k.min_diagonal_eigenvalue();
    vec![
        StructuralCheck::at_most("hermitian_residual", k.hermitian_residual(), HERMITIAN_TOL),
        StructuralCheck {
            name: "diagonal_blocks_psd".into(),
            passed: min_eig >= -DEFAULT_PSD_TOL,
            value: min_eig,
            tolerance: -DEFAULT_PSD_TOL,
            note: None,
        },
    ]
}

/// Recomputes the labelled sequences that evidence refers to, so recorded
/// witnesses can be checked against a fresh evaluation.
pub struct ReplaySource {
    series: BTreeMap<&'static str, Vec<f64>>,
}

impl ReplaySource {
    pub fn new(spec: &KernelSpec, order: usize) -> kernel_dynamics::Result<Self> {
        let cfg = spec.criteria_config();
        let mut series = BTreeMap::new();
        match spec.build(order)? {
            BuiltKernel::Scalar(a) => {
                series.insert(sequences::DIAGONAL, normalized_diagonal(&a)?.values);
                series.insert(sequences::ABS_TAIL, criteria::absolute_tails(&a, cfg.window));
            }
            BuiltKernel::Block { kernel, tests } => {
                series.insert(sequences::BLOCK_DIAGONAL, criteria::block_test_values(&kernel, &tests)?);
                series.insert(
                    sequences::BLOCK_ABS_TAIL,
                    criteria::block_absolute_tails(&kernel, cfg.window),
                );
            }
        }
        if let Some(beta) = spec.kernel.base_beta() {
            insert_beta_series(&mut series, beta, &cfg)?;
        }
        if let Some(t) = spec.kernel.tridiagonal(order) {
            let w = cfg.sequence_window;
            series.insert(
                sequences::TRIDIAGONAL_DIAGONAL,
                (0..w).map(|n| t.diagonal_value(n)).collect::<Result<_, _>>()?,
            );
            series.insert(
                sequences::NU_OVER_NEXT_MU,
                (0..w)
                    .map(|n| Ok((t.nu(n)? / t.mu(n + 1)?).norm()))
                    .collect::<kernel_dynamics::Result<_>>()?,
            );
        }
        Ok(Self { series })
    }

    pub fn value(&self, label: &str, index: usize) -> Option<f64> {
        self.series.get(label).and_then(|s| s.get(index)).copied()
    }

    /// True iff every witness and extremal of `v` matches bit for bit.
    pub fn replays(&self, v: &Verdict) -> bool {
        v.replay(|label, i| self.value(label, i))
    }
}

fn insert_beta_series(
    series: &mut BTreeMap<&'static str, Vec<f64>>,
    beta: &SequenceSpec,
    cfg: &CriteriaConfig,
) -> kernel_dynamics::Result<()> {
    let w = beta.len().map_or(cfg.sequence_window, |l| l.min(cfg.sequence_window));
    let values = beta.values(w + 1)?;
    let squares = beta.squared_values(w)?;
    series.insert(sequences::RATIO_DOWN, values.windows(2).map(|p| p[0] / p[1]).collect());
    series.insert(sequences::RATIO_UP, values.windows(2).map(|p| p[1] / p[0]).collect());
    series.insert(sequences::BETA_SQUARED_TAIL, criteria::suffix_sums(&squares));
    series.insert(sequences::BETA_SQUARED, squares);
    series.insert(sequences::BETA, values[..w].to_vec());
    Ok(())
}
