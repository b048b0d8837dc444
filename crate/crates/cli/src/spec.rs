//! Kernel specification files.
//!
//! A spec is a JSON object with a `kind` tag, the kind's parameters, an
//! optional `order` and optional `criteria` overrides. Sequences use the
//! `{"named": ..}`, `{"expr": ..}` or `{"list": .., "tail": ..}` forms;
//! complex numbers are either a bare number or a `[re, im]` pair.

use std::fs;
use std::path::Path;

use kernel_dynamics::constructions::{
    block_polynomial_conjugate, conjugate_by_series, geometric_series_coeffs, quasi_scalar,
    tridiagonal_coefficients, BlockCoefficientKernel, PolynomialSpec, TridiagonalSpec, MAX_BLOCK_DIM,
};
use kernel_dynamics::criteria::{CriteriaConfig, TestSet};
use kernel_dynamics::kernel::{diagonal_coefficients, CoefficientMatrix};
use kernel_dynamics::linalg::{c, CMatrix, CVector, C64};
use kernel_dynamics::seq::SequenceSpec;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const MAX_ORDER: usize = 4096;

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

/// A complex number: `1.5` or `[1.5, -0.5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> C64 {
        match self {
            ComplexValue::Real(x) => c(x, 0.0),
            ComplexValue::Pair([x, y]) => c(x, y),
        }
    }

    fn is_finite(self) -> bool {
        let v = self.value();
        v.re.is_finite() && v.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestSetKeyword {
    Canonical,
    OperatorNorm,
}

/// `"canonical"`, `"operator_norm"` or `{"vectors": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TestSetSpec {
    Keyword(TestSetKeyword),
    Vectors { vectors: Vec<Vec<ComplexValue>> },
}

impl TestSetSpec {
    fn to_test_set(&self) -> TestSet {
        match self {
            TestSetSpec::Keyword(TestSetKeyword::Canonical) => TestSet::Canonical,
            TestSetSpec::Keyword(TestSetKeyword::OperatorNorm) => TestSet::OperatorNorm,
            TestSetSpec::Vectors { vectors } => TestSet::Vectors(
                vectors
                    .iter()
                    .map(|v| CVector::from_iterator(v.len(), v.iter().map(|x| x.value())))
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelKind {
    /// `sum beta_n^2 z^n conj(w)^n`
    Diagonal { beta: SequenceSpec },
    /// Generated by the orthonormal family `mu_n z^n + nu_n z^(n+1)`.
    Tridiagonal {
        mu: SequenceSpec,
        nu: SequenceSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu_phase: Option<SequenceSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nu_phase: Option<SequenceSpec>,
    },
    /// `theta(z) k_beta(z, w) conj(theta(w))`; `theta` defaults to `1 / (1 - z)`.
    ThetaConjugated {
        beta: SequenceSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta: Option<Vec<ComplexValue>>,
    },
    /// `P(z) k_beta(z, w) conj(P(w))` for a scalar polynomial.
    PolynomialConjugated { beta: SequenceSpec, poly: Vec<ComplexValue> },
    /// `k(z, w) I` on a `dim`-dimensional coefficient space.
    QuasiScalar {
        base: Box<KernelKind>,
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        test_set: Option<TestSetSpec>,
    },
    /// `P(z) k_beta(z, w) P(w)^*` with `d x d` coefficient blocks.
    BlockPolynomial {
        beta: SequenceSpec,
        blocks: Vec<Vec<Vec<ComplexValue>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        test_set: Option<TestSetSpec>,
    },
    /// Normalized moments `a_mn` given directly, row-major.
    ExplicitMatrix { matrix: Vec<Vec<ComplexValue>> },
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Diagonal { .. } => "diagonal",
            KernelKind::Tridiagonal { .. } => "tridiagonal",
            KernelKind::ThetaConjugated { .. } => "theta_conjugated",
            KernelKind::PolynomialConjugated { .. } => "polynomial_conjugated",
            KernelKind::QuasiScalar { .. } => "quasi_scalar",
            KernelKind::BlockPolynomial { .. } => "block_polynomial",
            KernelKind::ExplicitMatrix { .. } => "explicit_matrix",
        }
    }

    pub fn is_block(&self) -> bool {
        matches!(self, KernelKind::QuasiScalar { .. } | KernelKind::BlockPolynomial { .. })
    }

    /// Weight sequence of the diagonal kernel this one is unitarily
    /// conjugated from, if any.
    pub fn base_beta(&self) -> Option<&SequenceSpec> {
        match self {
            KernelKind::Diagonal { beta }
            | KernelKind::ThetaConjugated { beta, .. }
            | KernelKind::PolynomialConjugated { beta, .. }
            | KernelKind::BlockPolynomial { beta, .. } => Some(beta),
            KernelKind::QuasiScalar { base, .. } => base.base_beta(),
            KernelKind::Tridiagonal { .. } | KernelKind::ExplicitMatrix { .. } => None,
        }
    }

    fn validate(&self, order: usize, path: &str) -> Result<(), SpecError> {
        let at = |f: &str| format!("{path}{f}");
        match self {
            KernelKind::ThetaConjugated { theta: Some(t), .. } => {
                if t.first().is_none_or(|v| v.value() == c(0.0, 0.0)) {
                    return Err(schema(at("theta"), "leading coefficient must be nonzero"));
                }
                finite(t, &at("theta"))
            }
            KernelKind::PolynomialConjugated { poly, .. } => {
                if poly.is_empty() {
                    return Err(schema(at("poly"), "at least one coefficient is required"));
                }
                if poly[0].value() == c(0.0, 0.0) {
                    return Err(schema(at("poly"), "constant term must be nonzero"));
                }
                finite(poly, &at("poly"))
            }
            KernelKind::QuasiScalar { base, dim, test_set } => {
                if base.is_block() {
                    return Err(schema(at("base.kind"), "base kernel must be scalar-valued"));
                }
                if *dim == 0 || *dim > MAX_BLOCK_DIM {
                    return Err(schema(at("dim"), format!("must lie in 1..={MAX_BLOCK_DIM}")));
                }
                base.validate(order, &at("base."))?;
                validate_test_set(test_set.as_ref(), *dim, &at("test_set"))
            }
            KernelKind::BlockPolynomial { blocks, test_set, .. } => {
                let d = blocks
                    .first()
                    .map(|b| b.len())
                    .ok_or_else(|| schema(at("blocks"), "at least one coefficient block is required"))?;
                if d == 0 || d > MAX_BLOCK_DIM {
                    return Err(schema(at("blocks"), format!("block dimension must lie in 1..={MAX_BLOCK_DIM}")));
                }
                for (j, b) in blocks.iter().enumerate() {
                    if b.len() != d || b.iter().any(|row| row.len() != d) {
                        return Err(schema(format!("{path}blocks[{j}]"), format!("must be {d}x{d}")));
                    }
                    for row in b {
                        finite(row, &format!("{path}blocks[{j}]"))?;
                    }
                }
                validate_test_set(test_set.as_ref(), d, &at("test_set"))
            }
            KernelKind::ExplicitMatrix { matrix } => {
                if matrix.len() != order {
                    return Err(schema(
                        at("matrix"),
                        format!("has {} rows, order is {order}", matrix.len()),
                    ));
                }
                for (i, row) in matrix.iter().enumerate() {
                    if row.len() != order {
                        return Err(schema(format!("{path}matrix[{i}]"), format!("must have {order} entries")));
                    }
                    finite(row, &format!("{path}matrix[{i}]"))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Coefficient matrix of a scalar kind.
    pub fn build_scalar(&self, order: usize) -> kernel_dynamics::Result<CoefficientMatrix> {
        match self {
            KernelKind::Diagonal { beta } => diagonal_coefficients(beta, order),
            KernelKind::Tridiagonal {
                mu,
                nu,
                mu_phase,
                nu_phase,
            } => tridiagonal_coefficients(&TridiagonalSpec {
                mu: mu.clone(),
                nu: nu.clone(),
                mu_phase: mu_phase.clone(),
                nu_phase: nu_phase.clone(),
                order,
            }),
            KernelKind::ThetaConjugated { beta, theta } => {
                let p = match theta {
                    Some(t) => t.iter().map(|v| v.value()).collect(),
                    None => geometric_series_coeffs(order),
                };
                conjugate_by_series(&diagonal_coefficients(beta, order)?, &p)
            }
            KernelKind::PolynomialConjugated { beta, poly } => {
                let p: Vec<C64> = poly.iter().map(|v| v.value()).collect();
                conjugate_by_series(&diagonal_coefficients(beta, order)?, &p)
            }
            KernelKind::ExplicitMatrix { matrix } => {
                CoefficientMatrix::from_matrix(CMatrix::from_fn(order, order, |i, j| matrix[i][j].value()))
            }
            KernelKind::QuasiScalar { .. } | KernelKind::BlockPolynomial { .. } => {
                Err(kernel_dynamics::Error::InvalidArgument(format!(
                    "`{}` is operator-valued",
                    self.name()
                )))
            }
        }
    }

    pub fn tridiagonal(&self, order: usize) -> Option<TridiagonalSpec> {
        match self {
            KernelKind::Tridiagonal {
                mu,
                nu,
                mu_phase,
                nu_phase,
            } => Some(TridiagonalSpec {
                mu: mu.clone(),
                nu: nu.clone(),
                mu_phase: mu_phase.clone(),
                nu_phase: nu_phase.clone(),
                order,
            }),
            _ => None,
        }
    }
}

fn finite(values: &[ComplexValue], field: &str) -> Result<(), SpecError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(schema(format!("{field}[{i}]"), "must be finite")),
        None => Ok(()),
    }
}

fn validate_test_set(t: Option<&TestSetSpec>, dim: usize, field: &str) -> Result<(), SpecError> {
    if let Some(TestSetSpec::Vectors { vectors }) = t {
        if vectors.is_empty() {
            return Err(schema(format!("{field}.vectors"), "at least one vector is required"));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(schema(format!("{field}.vectors[{i}]"), format!("must have {dim} entries")));
            }
            finite(v, &format!("{field}.vectors[{i}]"))?;
        }
    }
    Ok(())
}

/// The built kernel, scalar- or operator-valued.
#[derive(Debug, Clone)]
pub enum BuiltKernel {
    Scalar(CoefficientMatrix),
    Block {
        kernel: BlockCoefficientKernel,
        tests: TestSet,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub kernel: KernelKind,
    pub order: Option<usize>,
    pub criteria: Option<CriteriaConfig>,
}

impl KernelSpec {
    pub fn new(kernel: KernelKind, order: Option<usize>) -> Self {
        Self {
            kernel,
            order,
            criteria: None,
        }
    }

    pub fn criteria_config(&self) -> CriteriaConfig {
        self.criteria.unwrap_or_default()
    }

    /// Explicit override, else the spec's own order, else `default`.
    pub fn resolve_order(&self, explicit: Option<usize>, default: usize) -> Result<usize, SpecError> {
        let n = explicit
            .or(self.order)
            .or(Some(explicit_order(&self.kernel)).filter(|&m| m > 0))
            .unwrap_or(default);
        check_order(n)?;
        if let KernelKind::ExplicitMatrix { matrix } = &self.kernel {
            if matrix.len() != n {
                return Err(schema("order", format!("explicit matrix has order {}", matrix.len())));
            }
        }
        Ok(n)
    }

    pub fn build(&self, order: usize) -> kernel_dynamics::Result<BuiltKernel> {
        match &self.kernel {
            KernelKind::QuasiScalar { base, dim, test_set } => Ok(BuiltKernel::Block {
                kernel: quasi_scalar(&base.build_scalar(order)?, *dim)?,
                tests: test_set.as_ref().map_or(TestSet::Canonical, TestSetSpec::to_test_set),
            }),
            KernelKind::BlockPolynomial { beta, blocks, test_set } => {
                let d = blocks[0].len();
                let p = PolynomialSpec::Block(
                    blocks
                        .iter()
                        .map(|b| CMatrix::from_fn(d, d, |i, j| b[i][j].value()))
                        .collect(),
                );
                Ok(BuiltKernel::Block {
                    kernel: block_polynomial_conjugate(beta, &p, order)?,
                    tests: test_set.as_ref().map_or(TestSet::OperatorNorm, TestSetSpec::to_test_set),
                })
            }
            k => Ok(BuiltKernel::Scalar(k.build_scalar(order)?)),
        }
    }

    pub fn to_value(&self) -> Value {
        let mut obj = match serde_json::to_value(&self.kernel) {
            Ok(Value::Object(m)) => m,
            _ => Map::new(),
        };
        if let Some(n) = self.order {
            obj.insert("order".into(), Value::from(n));
        }
        if let Some(cfg) = &self.criteria {
            obj.insert("criteria".into(), serde_json::to_value(cfg).unwrap_or(Value::Null));
        }
        Value::Object(obj)
    }

    pub fn from_value(value: Value) -> Result<Self, SpecError> {
        let Value::Object(mut obj) = value else {
            return Err(schema("$", "a kernel spec must be a JSON object"));
        };
        if !obj.contains_key("kind") {
            return Err(schema("kind", "missing field"));
        }
        let order = match obj.remove("order") {
            None => None,
            Some(v) => {
                let n = v
                    .as_u64()
                    .ok_or_else(|| schema("order", "must be a positive integer"))?;
                let n = usize::try_from(n).map_err(|_| schema("order", "too large"))?;
                check_order(n)?;
                Some(n)
            }
        };
        let criteria = match obj.remove("criteria") {
            None => None,
            Some(v) => {
                let cfg: CriteriaConfig = deserialize_at(v, "criteria.")?;
                cfg.validate().map_err(|e| schema("criteria", e.to_string()))?;
                Some(cfg)
            }
        };
        let kernel = deserialize_kind(Value::Object(obj), "")?;
        kernel.validate(order.unwrap_or(0).max(explicit_order(&kernel)), "")?;
        Ok(Self {
            kernel,
            order,
            criteria,
        })
    }
}

fn explicit_order(k: &KernelKind) -> usize {
    match k {
        KernelKind::ExplicitMatrix { matrix } => matrix.len(),
        _ => 0,
    }
}

fn check_order(n: usize) -> Result<(), SpecError> {
    if !(2..=MAX_ORDER).contains(&n) {
        return Err(schema("order", format!("must lie in 2..={MAX_ORDER}, got {n}")));
    }
    Ok(())
}

const SEQUENCE_FIELDS: [&str; 5] = ["beta", "mu", "nu", "mu_phase", "nu_phase"];

/// Tagged enums buffer their input and lose error paths, so sequence fields
/// and nested kernels are checked on their own first.
fn deserialize_kind(v: Value, prefix: &str) -> Result<KernelKind, SpecError> {
    if let Value::Object(obj) = &v {
        for f in SEQUENCE_FIELDS {
            if let Some(s) = obj.get(f) {
                deserialize_at::<SequenceSpec>(s.clone(), &format!("{prefix}{f}."))?;
            }
        }
        if let Some(base) = obj.get("base") {
            if !base.get("kind").is_some_and(Value::is_string) {
                return Err(schema(format!("{prefix}base.kind"), "missing field"));
            }
            deserialize_kind(base.clone(), &format!("{prefix}base."))?;
        }
    }
    deserialize_at(v, prefix)
}

fn deserialize_at<T: serde::de::DeserializeOwned>(v: Value, prefix: &str) -> Result<T, SpecError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        let mut field = if path == "." { String::new() } else { path };
        // name the missing field itself rather than its parent
        if let Some(rest) = message.strip_prefix("missing field `") {
            if let Some(name) = rest.split('`').next() {
                if !field.is_empty() {
                    field.push('.');
                }
                field.push_str(name);
            }
        }
        let field = format!("{prefix}{field}");
        let field = field.trim_end_matches('.');
        schema(if field.is_empty() { "$" } else { field }, message)
    })
}

pub fn parse_spec(text: &str) -> Result<KernelSpec, SpecError> {
    let value: Value = serde_json::from_str(text).map_err(|e| SpecError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    KernelSpec::from_value(value)
}

pub fn load_spec(path: &Path) -> Result<KernelSpec, SpecError> {
    let text = fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_named() {
        let s = parse_spec(r#"{"kind":"diagonal","beta":{"named":"dirichlet"},"order":256}"#).unwrap();
        assert_eq!(s.order, Some(256));
        assert!(matches!(s.kernel, KernelKind::Diagonal { .. }));
    }

    #[test]
    fn tridiagonal_expressions() {
        let s = parse_spec(
            r#"{"kind":"tridiagonal","mu":{"expr":"1/(n+1)"},"nu":{"expr":"1/(2*(n+2))"},"order":128}"#,
        )
        .unwrap();
        let a = s.kernel.build_scalar(8).unwrap();
        assert!((a.get(1, 1).re - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn missing_beta_names_field() {
        let err = parse_spec(r#"{"kind":"diagonal","order":4}"#).unwrap_err();
        match err {
            SpecError::Schema { field, .. } => assert_eq!(field, "beta"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_field_rejected() {
        let err = parse_spec(r#"{"kind":"diagonal","beta":{"named":"hardy"},"gamma":1}"#).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }

    #[test]
    fn syntax_error_has_location() {
        match parse_spec("{\n \"kind\": }").unwrap_err() {
            SpecError::Syntax { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn bad_expression_is_reported_at_field() {
        let err = parse_spec(r#"{"kind":"diagonal","beta":{"expr":"1/(n+"}}"#).unwrap_err();
        match err {
            SpecError::Schema { field, .. } => assert_eq!(field, "beta"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn order_bounds() {
        assert!(parse_spec(r#"{"kind":"diagonal","beta":{"named":"hardy"},"order":1}"#).is_err());
        assert!(parse_spec(r#"{"kind":"diagonal","beta":{"named":"hardy"},"order":-3}"#).is_err());
    }

    #[test]
    fn nested_quasi_scalar_and_test_set() {
        let s = parse_spec(
            r#"{"kind":"quasi_scalar","dim":2,"base":{"kind":"diagonal","beta":{"named":"dirichlet"}},
                "test_set":{"vectors":[[1,0],[0,[0,1]]]}}"#,
        )
        .unwrap();
        match s.build(16).unwrap() {
            BuiltKernel::Block { kernel, tests } => {
                assert_eq!(kernel.dim(), 2);
                assert!(matches!(tests, TestSet::Vectors(v) if v.len() == 2));
            }
            _ => panic!("expected block kernel"),
        }
        let err = parse_spec(r#"{"kind":"quasi_scalar","dim":2,"base":{"kind":"diagonal"}}"#).unwrap_err();
        assert!(err.to_string().contains("base.beta"), "{err}");
    }

    #[test]
    fn explicit_matrix_shape() {
        let err = parse_spec(r#"{"kind":"explicit_matrix","matrix":[[1,0],[0]],"order":2}"#).unwrap_err();
        assert!(err.to_string().contains("matrix[1]"), "{err}");
        let s = parse_spec(r#"{"kind":"explicit_matrix","matrix":[[1,[0.5,0.5]],[[0.5,-0.5],1]]}"#).unwrap();
        assert_eq!(s.resolve_order(None, 256).unwrap(), 2);
    }

    #[test]
    fn value_round_trip() {
        let text = r#"{"kind":"block_polynomial","beta":{"named":"power(-1)"},"blocks":[[[1,0],[0,1]],[[0.5,0],[0,[0,0.5]]]],"order":16,"criteria":{"window":64}}"#;
        let s = parse_spec(text).unwrap();
        let again = KernelSpec::from_value(s.to_value()).unwrap();
        assert_eq!(s, again);
        assert_eq!(again.criteria_config().window, 64);
    }
}
