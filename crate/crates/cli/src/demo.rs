//! Conjugating a hypercyclic weighted shift by `1 / (1 - z)`: the operator
//! stays hypercyclic but the diagonal of the new kernel becomes the partial
//! sums of `beta_n^2`, so the diagonal sufficient condition fails.

use kernel_dynamics::constructions::{conjugate_by_series, geometric_series_coeffs};
use kernel_dynamics::criteria::{
    grosse_erdmann_chaos, hypercyclicity_sufficient, salas_characterization, CriteriaConfig, Verdict,
};
use kernel_dynamics::kernel::{diagonal_coefficients, normalized_diagonal};
use kernel_dynamics::seq::SequenceSpec;
use kernel_dynamics::{float, Error};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DEMO_ORDER: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("base weight sequence `{beta}` is not certified hypercyclic ({classification}); the contrast needs a hypercyclic base")]
    BaseNotHypercyclic { beta: String, classification: String },
    #[error("conjugated diagonal decreases at n = {index}")]
    NotMonotone { index: usize },
    #[error(transparent)]
    Kernel(#[from] Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleReport {
    pub beta: String,
    pub order: usize,
    pub base_hypercyclic: Verdict,
    pub base_chaotic: Verdict,
    pub conjugated_sufficient: Verdict,
    /// `a_nn` of the conjugated kernel.
    #[serde(with = "float::vec")]
    pub conjugated_diagonal: Vec<f64>,
    /// `max_n |a_nn - sum_(k<=n) beta_k^2|`.
    #[serde(with = "float")]
    pub partial_sum_max_error: f64,
    pub diagonal_non_decreasing: bool,
    /// `beta_0^2`, a lower bound for every `a_nn`.
    #[serde(with = "float")]
    pub diagonal_lower_bound: f64,
}

pub fn counterexample(beta: &SequenceSpec, order: usize, cfg: &CriteriaConfig) -> Result<CounterexampleReport, DemoError> {
    if order < 2 {
        return Err(Error::InvalidArgument("order must be at least 2".into()).into());
    }
    let base_hypercyclic = salas_characterization(beta, cfg)?;
    if !base_hypercyclic.classification.is_satisfied() {
        return Err(DemoError::BaseNotHypercyclic {
            beta: beta.to_string(),
            classification: base_hypercyclic.classification.to_string(),
        });
    }
    let base_chaotic = grosse_erdmann_chaos(beta, cfg)?;

    let conjugated = conjugate_by_series(&diagonal_coefficients(beta, order)?, &geometric_series_coeffs(order))?;
    let d = normalized_diagonal(&conjugated)?;
    let conjugated_sufficient = hypercyclicity_sufficient(&d, cfg)?;

    let squares = beta.squared_values(order).map_err(Error::from)?;
    let mut acc = 0.0;
    let mut err: f64 = 0.0;
    for (a, s) in d.values.iter().zip(&squares) {
        acc += s;
        err = err.max((a - acc).abs());
    }
    if let Some(i) = d.values.windows(2).position(|p| p[1] < p[0]) {
        return Err(DemoError::NotMonotone { index: i + 1 });
    }
    Ok(CounterexampleReport {
        beta: beta.to_string(),
        order,
        base_hypercyclic,
        base_chaotic,
        conjugated_sufficient,
        conjugated_diagonal: d.values,
        partial_sum_max_error: err,
        diagonal_non_decreasing: true,
        diagonal_lower_bound: squares[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use kernel_dynamics::criteria::Classification;

    #[test]
    fn harmonic_weights() {
        let beta = SequenceSpec::expr("1/(n+1)").unwrap();
        let r = counterexample(&beta, 64, &CriteriaConfig::default()).unwrap();
        assert!(r.base_hypercyclic.classification.is_satisfied());
        assert_eq!(r.conjugated_sufficient.classification, Classification::ViolatedOnWindow);
        let head = [1.0, 1.25, 1.3611111111111112, 1.4236111111111112];
        for (a, b) in r.conjugated_diagonal.iter().zip(head) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(r.partial_sum_max_error < 1e-12);
    }

    #[test]
    fn geometric_weights_chaotic_base() {
        let beta = SequenceSpec::expr("2^(-n)").unwrap();
        let r = counterexample(&beta, 64, &CriteriaConfig::default()).unwrap();
        assert!(r.base_chaotic.classification.is_satisfied());
        assert!((r.conjugated_diagonal[63] - 4.0 / 3.0).abs() < 1e-12);
        assert!(r.conjugated_sufficient.classification.is_violated());
    }

    #[test]
    fn hardy_refused() {
        let beta: SequenceSpec = "hardy".parse().unwrap();
        assert!(matches!(
            counterexample(&beta, 32, &CriteriaConfig::default()),
            Err(DemoError::BaseNotHypercyclic { .. })
        ));
    }
}
