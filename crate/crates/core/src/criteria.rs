//! Window-based verdicts for the dynamics of `M_z^*`.
//!
//! Asymptotic conditions (liminf, limit, summability) are judged on a finite
//! window of the relevant sequence, with the verdict taken from the last half
//! of the window. Named sequence families carry exact limit metadata, which
//! overrides the window reading.

use serde::{Deserialize, Serialize};

use crate::constructions::{tridiagonal_boundedness, BlockCoefficientKernel, TridiagonalBoundedness, TridiagonalSpec};
use crate::error::{Error, Result};
use crate::kernel::{normalized_diagonal, CoefficientMatrix, NormalizedDiagonal};
use crate::linalg::{self, CVector};
use crate::seq::{Asymptotics, LimitClass, SequenceSpec};

pub const HYPERCYCLIC_SUFFICIENT: &str = "hypercyclic_sufficient";
pub const MIXING_SUFFICIENT: &str = "mixing_sufficient";
pub const CHAOS_SUFFICIENT: &str = "chaos_sufficient";
pub const SALAS: &str = "salas_hypercyclic";
pub const COSTAKIS_SAMBARINO: &str = "costakis_sambarino_mixing";
pub const GROSSE_ERDMANN: &str = "grosse_erdmann_chaos";
pub const MZ_BOUNDED: &str = "mz_bounded";
pub const MZ_ANALYTIC: &str = "mz_analytic_on_disc";
pub const TRIDIAGONAL_HYPERCYCLIC: &str = "tridiagonal_hypercyclic";
pub const TRIDIAGONAL_MIXING: &str = "tridiagonal_mixing";
pub const BLOCK_HYPERCYCLIC_SUFFICIENT: &str = "block_hypercyclic_sufficient";
pub const BLOCK_MIXING_SUFFICIENT: &str = "block_mixing_sufficient";
pub const BLOCK_CHAOS_SUFFICIENT: &str = "block_chaos_sufficient";

/// Sequence labels used in evidence, so witnesses can be replayed.
pub mod sequences {
    /// `a_nn`
    pub const DIAGONAL: &str = "a_nn";
    /// `sum_(n,m >= N', n,m < window) |a_nm|`
    pub const ABS_TAIL: &str = "abs_tail";
    pub const BETA: &str = "beta";
    pub const BETA_SQUARED: &str = "beta_squared";
    /// `sum_(N' <= n < window) beta_n^2`
    pub const BETA_SQUARED_TAIL: &str = "beta_squared_tail";
    /// `beta_n / beta_(n+1)`
    pub const RATIO_DOWN: &str = "beta_ratio_down";
    /// `beta_(n+1) / beta_n`
    pub const RATIO_UP: &str = "beta_ratio_up";
    /// `|mu_n|^2 + |nu_(n-1)|^2` from the generating sequences
    pub const TRIDIAGONAL_DIAGONAL: &str = "tridiagonal_diagonal";
    /// `|nu_n / mu_(n+1)|`
    pub const NU_OVER_NEXT_MU: &str = "nu_over_next_mu";
    /// `max` over the test set of `<B[n][n] eta, eta>`
    pub const BLOCK_DIAGONAL: &str = "block_diagonal";
    /// `sum_(n,m >= N', n,m < window) ||B[n][m]||`
    pub const BLOCK_ABS_TAIL: &str = "block_abs_tail";
}

const NEGATIVE_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-10;
/// Slack on `limsup beta_(n+1) / beta_n <= 1` read off a finite window.
const ANALYTIC_SLACK: f64 = 1e-2;
/// A window reading counts as "not decaying" when the later extreme keeps at
/// least this fraction of the earlier one.
const PERSISTENCE_RATIO: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "SATISFIED_ANALYTIC")]
    SatisfiedAnalytic,
    #[serde(rename = "SATISFIED_ON_WINDOW")]
    SatisfiedOnWindow,
    #[serde(rename = "VIOLATED_ON_WINDOW")]
    ViolatedOnWindow,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Classification {
    pub fn token(self) -> &'static str {
        match self {
            Classification::SatisfiedAnalytic => "SATISFIED_ANALYTIC",
            Classification::SatisfiedOnWindow => "SATISFIED_ON_WINDOW",
            Classification::ViolatedOnWindow => "VIOLATED_ON_WINDOW",
            Classification::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn is_satisfied(self) -> bool {
        matches!(
            self,
            Classification::SatisfiedAnalytic | Classification::SatisfiedOnWindow
        )
    }

    pub fn is_violated(self) -> bool {
        self == Classification::ViolatedOnWindow
    }

    /// Satisfied / violated / inconclusive, ignoring how it was decided.
    pub fn outcome(self) -> Option<bool> {
        match self {
            Classification::SatisfiedAnalytic | Classification::SatisfiedOnWindow => Some(true),
            Classification::ViolatedOnWindow => Some(false),
            Classification::Inconclusive => None,
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceBasis {
    /// Decided by exact limit metadata of a named family.
    Analytic,
    /// Read off the window.
    Window,
    /// Hypotheses of the characterization failed on the window.
    Gate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremal {
    pub label: String,
    pub sequence: String,
    pub index: usize,
    #[serde(with = "crate::float")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub basis: EvidenceBasis,
    pub window: usize,
    /// Label of the sequence the witness indices refer to.
    pub sequence: String,
    pub witness_indices: Vec<usize>,
    #[serde(with = "crate::float::vec")]
    pub witness_values: Vec<f64>,
    pub extremal: Vec<Extremal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub condition_id: String,
    pub classification: Classification,
    /// The condition is an if-and-only-if characterization, not merely sufficient.
    pub exact: bool,
    pub evidence: Evidence,
}

impl Verdict {
    /// Re-evaluates every recorded witness and extremal through `eval(label, index)`
    /// and checks the values bit for bit.
    pub fn replay(&self, eval: impl Fn(&str, usize) -> Option<f64>) -> bool {
        let ev = &self.evidence;
        ev.witness_indices.len() == ev.witness_values.len()
            && ev
                .witness_indices
                .iter()
                .zip(&ev.witness_values)
                .all(|(&i, v)| same(eval(&ev.sequence, i), *v))
            && ev
                .extremal
                .iter()
                .all(|x| same(eval(&x.sequence, x.index), x.value))
    }
}

fn same(a: Option<f64>, b: f64) -> bool {
    a.is_some_and(|a| a.to_bits() == b.to_bits())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaConfig {
    /// Window for conditions read off the coefficient matrix (capped at its order).
    pub window: usize,
    /// Window for conditions read off a closed-form weight sequence.
    pub sequence_window: usize,
    #[serde(with = "crate::float")]
    pub tol: f64,
    #[serde(with = "crate::float")]
    pub floor: f64,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        Self {
            window: 512,
            sequence_window: 4096,
            tol: 1e-6,
            floor: 1e-3,
        }
    }
}

impl CriteriaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 || self.sequence_window < 2 {
            return Err(Error::InvalidArgument("criteria windows must be at least 2".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite() && self.floor.is_finite() && self.tol <= self.floor) {
            return Err(Error::InvalidArgument(
                "criteria thresholds must satisfy 0 < tol <= floor < inf".into(),
            ));
        }
        Ok(())
    }

    /// Thresholds for `beta_n` equivalent to these thresholds on `beta_n^2`.
    fn on_root(&self) -> Rule {
        Rule {
            tol: self.tol.sqrt(),
            floor: self.floor.sqrt(),
            persistence: PERSISTENCE_RATIO.sqrt(),
        }
    }

    fn rule(&self) -> Rule {
        Rule {
            tol: self.tol,
            floor: self.floor,
            persistence: PERSISTENCE_RATIO,
        }
    }
}

#[derive(Clone, Copy)]
struct Rule {
    tol: f64,
    floor: f64,
    persistence: f64,
}

enum Kind {
    Liminf,
    Limit,
}

/// First index attaining the minimum (or maximum) over `range`.
fn arg_extreme(values: &[f64], range: std::ops::Range<usize>, max: bool) -> (usize, f64) {
    let mut best = (range.start, values[range.start]);
    for i in range {
        let v = values[i];
        if (max && v > best.1) || (!max && v < best.1) {
            best = (i, v);
        }
    }
    best
}

/// Index 0 and every later index setting a strictly new running minimum.
fn running_minima(values: &[f64]) -> Vec<usize> {
    let Some(&first) = values.first() else {
        return Vec::new();
    };
    let mut out = vec![0];
    let mut m = first;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < m {
            m = v;
            out.push(i);
        }
    }
    out
}

fn extremal(label: &str, sequence: &str, (index, value): (usize, f64)) -> Extremal {
    Extremal {
        label: label.into(),
        sequence: sequence.into(),
        index,
        value,
    }
}

fn too_short(id: &str, exact: bool, seq: &str, w: usize) -> Verdict {
    Verdict {
        condition_id: id.into(),
        classification: Classification::Inconclusive,
        exact,
        evidence: Evidence {
            basis: EvidenceBasis::Window,
            window: w,
            sequence: seq.into(),
            witness_indices: vec![],
            witness_values: vec![],
            extremal: vec![],
            note: Some("window too short".into()),
        },
    }
}

fn apply_analytic(v: &mut Verdict, decided: Option<bool>) {
    if let Some(holds) = decided {
        v.classification = if holds {
            Classification::SatisfiedAnalytic
        } else {
            Classification::ViolatedOnWindow
        };
        v.evidence.basis = EvidenceBasis::Analytic;
    }
}

fn window_verdict(
    id: &str,
    exact: bool,
    seq: &str,
    values: &[f64],
    window: usize,
    rule: Rule,
    kind: Kind,
) -> Verdict {
    let w = window.min(values.len());
    if w < 2 {
        return too_short(id, exact, seq, w);
    }
    let v = &values[..w];
    let half = w / 2;
    let (classification, witnesses, extremals) = match kind {
        Kind::Liminf => {
            let min_last = arg_extreme(v, half..w, false);
            let min_first = arg_extreme(v, 0..half, false);
            let class = if min_last.1 < rule.tol {
                Classification::SatisfiedOnWindow
            } else if min_last.1 >= rule.floor && min_last.1 >= rule.persistence * min_first.1 {
                Classification::ViolatedOnWindow
            } else {
                Classification::Inconclusive
            };
            let mut witnesses = running_minima(v);
            if witnesses.last() != Some(&min_last.0) {
                witnesses.push(min_last.0);
            }
            (
                class,
                witnesses,
                vec![
                    extremal("min_last_half", seq, min_last),
                    extremal("min_first_half", seq, min_first),
                ],
            )
        }
        Kind::Limit => {
            let max_last = arg_extreme(v, half..w, true);
            let max_quarter = arg_extreme(v, w - (w / 4).max(1)..w, true);
            let class = if max_last.1 < rule.tol {
                Classification::SatisfiedOnWindow
            } else if max_quarter.1 >= rule.floor && max_quarter.1 >= rule.persistence * max_last.1 {
                Classification::ViolatedOnWindow
            } else {
                Classification::Inconclusive
            };
            (
                class,
                vec![max_last.0],
                vec![
                    extremal("max_last_half", seq, max_last),
                    extremal("max_last_quarter", seq, max_quarter),
                ],
            )
        }
    };
    Verdict {
        condition_id: id.into(),
        classification,
        exact,
        evidence: Evidence {
            basis: EvidenceBasis::Window,
            window: w,
            sequence: seq.into(),
            witness_values: witnesses.iter().map(|&i| v[i]).collect(),
            witness_indices: witnesses,
            extremal: extremals,
            note: None,
        },
    }
}

/// Summability read off tails: satisfied when the tail from the middle of the
/// window is below `tol`, violated when the terms themselves stay above
/// `floor` on the last half.
#[allow(clippy::too_many_arguments)]
fn tail_verdict(
    id: &str,
    exact: bool,
    tail_seq: &str,
    tails: &[f64],
    term_seq: &str,
    terms: &[f64],
    rule: Rule,
    note: &str,
) -> Verdict {
    let w = tails.len().min(terms.len());
    if w < 2 {
        return too_short(id, exact, tail_seq, w);
    }
    let half = w / 2;
    let tail_half = (half, tails[half]);
    let min_term = arg_extreme(terms, half..w, false);
    let classification = if tail_half.1 < rule.tol {
        Classification::SatisfiedOnWindow
    } else if min_term.1 >= rule.floor {
        Classification::ViolatedOnWindow
    } else {
        Classification::Inconclusive
    };
    Verdict {
        condition_id: id.into(),
        classification,
        exact,
        evidence: Evidence {
            basis: EvidenceBasis::Window,
            window: w,
            sequence: tail_seq.into(),
            witness_indices: vec![half],
            witness_values: vec![tail_half.1],
            extremal: vec![
                extremal("tail_at_half", tail_seq, tail_half),
                extremal("min_term_last_half", term_seq, min_term),
            ],
            note: Some(note.into()),
        },
    }
}

fn liminf_zero(a: Option<Asymptotics>) -> Option<bool> {
    a.map(|a| a.liminf == LimitClass::Zero)
}

fn limit_zero(a: Option<Asymptotics>) -> Option<bool> {
    a.map(|a| a.limsup == LimitClass::Zero)
}

fn summable(a: Option<Asymptotics>) -> Option<bool> {
    a.map(|a| a.square_summable)
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if value < -NEGATIVE_TOL {
            return Err(Error::NegativeDiagonal { index, value });
        }
    }
    Ok(())
}

/// `liminf a_nn = 0`.
pub fn hypercyclicity_sufficient(d: &NormalizedDiagonal, cfg: &CriteriaConfig) -> Result<Verdict> {
    check_nonnegative(&d.values)?;
    let mut v = window_verdict(
        HYPERCYCLIC_SUFFICIENT,
        false,
        sequences::DIAGONAL,
        &d.values,
        cfg.window,
        cfg.rule(),
        Kind::Liminf,
    );
    apply_analytic(&mut v, liminf_zero(d.asymptotics));
    Ok(v)
}

/// `lim a_nn = 0`.
pub fn mixing_sufficient(d: &NormalizedDiagonal, cfg: &CriteriaConfig) -> Result<Verdict> {
    check_nonnegative(&d.values)?;
    let mut v = window_verdict(
        MIXING_SUFFICIENT,
        false,
        sequences::DIAGONAL,
        &d.values,
        cfg.window,
        cfg.rule(),
        Kind::Limit,
    );
    apply_analytic(&mut v, limit_zero(d.asymptotics));
    Ok(v)
}

/// `s(N') = sum_(N' <= n, m < window) |a_nm|` for `N' < window`.
pub fn absolute_tails(a: &CoefficientMatrix, window: usize) -> Vec<f64> {
    let w = window.min(a.order());
    let mut tails = vec![0.0; w + 1];
    for n in (0..w).rev() {
        let mut row = a.get(n, n).norm();
        for m in n + 1..w {
            row += 2.0 * a.get(n, m).norm();
        }
        tails[n] = tails[n + 1] + row;
    }
    tails.truncate(w);
    tails
}

/// Absolute summability of the coefficient tails, a sufficient proxy for
/// F-summability.
pub fn chaos_sufficient(a: &CoefficientMatrix, cfg: &CriteriaConfig) -> Result<Verdict> {
    let d = normalized_diagonal(a)?;
    check_nonnegative(&d.values)?;
    let w = cfg.window.min(a.order());
    let tails = absolute_tails(a, w);
    let mut v = tail_verdict(
        CHAOS_SUFFICIENT,
        false,
        sequences::ABS_TAIL,
        &tails,
        sequences::DIAGONAL,
        &d.values[..w],
        cfg.rule(),
        "absolute tail summability (sufficient proxy)",
    );
    apply_analytic(&mut v, summable(d.asymptotics));
    Ok(v)
}

/// Terms of `s` available for a window of `window` (lists without a tail are
/// cut at their length).
fn window_values(s: &SequenceSpec, window: usize) -> Result<Vec<f64>> {
    let n = s.len().map_or(window, |l| l.min(window));
    Ok(s.values(n)?)
}

/// `M_z^*` on `H^2(beta)` is hypercyclic iff `liminf beta_n = 0`.
pub fn salas_characterization(beta: &SequenceSpec, cfg: &CriteriaConfig) -> Result<Verdict> {
    let values = window_values(beta, cfg.sequence_window)?;
    let mut v = window_verdict(
        SALAS,
        true,
        sequences::BETA,
        &values,
        cfg.sequence_window,
        cfg.on_root(),
        Kind::Liminf,
    );
    apply_analytic(&mut v, liminf_zero(beta.asymptotics()));
    Ok(v)
}

/// `M_z^*` on `H^2(beta)` is mixing iff `lim beta_n = 0`.
pub fn costakis_sambarino(beta: &SequenceSpec, cfg: &CriteriaConfig) -> Result<Verdict> {
    let values = window_values(beta, cfg.sequence_window)?;
    let mut v = window_verdict(
        COSTAKIS_SAMBARINO,
        true,
        sequences::BETA,
        &values,
        cfg.sequence_window,
        cfg.on_root(),
        Kind::Limit,
    );
    apply_analytic(&mut v, limit_zero(beta.asymptotics()));
    Ok(v)
}

/// `sum_(N' <= n < len) x_n` for every `N'`.
pub fn suffix_sums(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let mut acc = 0.0;
    for n in (0..x.len()).rev() {
        acc += x[n];
        out[n] = acc;
    }
    out
}

/// `M_z^*` on `H^2(beta)` is chaotic iff `sum beta_n^2 < inf`.
pub fn grosse_erdmann_chaos(beta: &SequenceSpec, cfg: &CriteriaConfig) -> Result<Verdict> {
    let n = beta.len().map_or(cfg.sequence_window, |l| l.min(cfg.sequence_window));
    let squares = beta.squared_values(n)?;
    let tails = suffix_sums(&squares);
    let mut v = tail_verdict(
        GROSSE_ERDMANN,
        true,
        sequences::BETA_SQUARED_TAIL,
        &tails,
        sequences::BETA_SQUARED,
        &squares,
        cfg.rule(),
        "partial sums of beta_n^2",
    );
    apply_analytic(&mut v, summable(beta.asymptotics()));
    Ok(v)
}

/// Boundedness of `M_z` (`sup beta_n / beta_(n+1) < inf`) and analyticity of
/// `H^2(beta)` on the disc (`limsup beta_(n+1) / beta_n <= 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagBoundedness {
    pub window: usize,
    pub basis: EvidenceBasis,
    /// Exact for named families, the window supremum otherwise.
    #[serde(with = "crate::float")]
    pub sup_down: f64,
    /// Exact for named families, the last-half maximum otherwise.
    #[serde(with = "crate::float")]
    pub limsup_up: f64,
    pub window_sup_down_index: usize,
    #[serde(with = "crate::float")]
    pub window_sup_down: f64,
    pub window_limsup_up_index: usize,
    #[serde(with = "crate::float")]
    pub window_limsup_up: f64,
    pub bounded: bool,
    pub analytic_on_disc: bool,
}

impl DiagBoundedness {
    fn verdict(&self, id: &str, holds: bool, seq: &str, index: usize, value: f64) -> Verdict {
        let classification = match (holds, self.basis) {
            (true, EvidenceBasis::Analytic) => Classification::SatisfiedAnalytic,
            (true, _) => Classification::SatisfiedOnWindow,
            (false, _) => Classification::ViolatedOnWindow,
        };
        Verdict {
            condition_id: id.into(),
            classification,
            exact: true,
            evidence: Evidence {
                basis: self.basis,
                window: self.window,
                sequence: seq.into(),
                witness_indices: vec![index],
                witness_values: vec![value],
                extremal: vec![],
                note: None,
            },
        }
    }

    pub fn bounded_verdict(&self) -> Verdict {
        self.verdict(
            MZ_BOUNDED,
            self.bounded,
            sequences::RATIO_DOWN,
            self.window_sup_down_index,
            self.window_sup_down,
        )
    }

    pub fn analytic_verdict(&self) -> Verdict {
        self.verdict(
            MZ_ANALYTIC,
            self.analytic_on_disc,
            sequences::RATIO_UP,
            self.window_limsup_up_index,
            self.window_limsup_up,
        )
    }
}

pub fn mz_boundedness_diag(beta: &SequenceSpec, window: usize) -> Result<DiagBoundedness> {
    let mut values = window_values(beta, window.saturating_add(1))?;
    // ratios only on the prefix where beta is a positive normal float
    let normal = values.iter().position(|b| !(*b >= f64::MIN_POSITIVE)).unwrap_or(values.len());
    values.truncate(normal);
    if values.len() < 3 {
        return Err(Error::InvalidArgument("need at least three terms of beta".into()));
    }
    let down: Vec<f64> = values.windows(2).map(|p| p[0] / p[1]).collect();
    let up: Vec<f64> = values.windows(2).map(|p| p[1] / p[0]).collect();
    let w = down.len();
    let half = w / 2;
    let sup_all = arg_extreme(&down, 0..w, true);
    let sup_first = arg_extreme(&down, 0..half.max(1), true);
    let sup_last = arg_extreme(&down, half..w, true);
    let up_last = arg_extreme(&up, half..w, true);
    let finite = down.iter().all(|r| r.is_finite());
    let window_bounded = finite && sup_last.1 <= 2.0 * sup_first.1.max(1.0);
    let window_analytic = up_last.1 <= 1.0 + ANALYTIC_SLACK;

    let mut report = DiagBoundedness {
        window: w,
        basis: EvidenceBasis::Window,
        sup_down: sup_all.1,
        limsup_up: up_last.1,
        window_sup_down_index: sup_all.0,
        window_sup_down: sup_all.1,
        window_limsup_up_index: up_last.0,
        window_limsup_up: up_last.1,
        bounded: window_bounded,
        analytic_on_disc: window_analytic,
    };
    if let Some(r) = beta.shift_ratios() {
        report.basis = EvidenceBasis::Analytic;
        report.sup_down = r.sup_down;
        report.limsup_up = r.limsup_up;
        report.bounded = r.sup_down.is_finite();
        report.analytic_on_disc = r.limsup_up <= 1.0;
    }
    Ok(report)
}

/// Exact hypercyclicity and mixing verdicts on a tridiagonal space, gated by
/// `sup |mu_n / mu_(n+1)| < inf` and `sup |nu_n / mu_(n+1)| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalVerdicts {
    pub gate: TridiagonalBoundedness,
    pub hypercyclic: Verdict,
    pub mixing: Verdict,
}

pub fn tridiagonal_characterization(t: &TridiagonalSpec, cfg: &CriteriaConfig) -> Result<TridiagonalVerdicts> {
    let mut w = cfg.sequence_window;
    if let Some(l) = t.mu.len() {
        w = w.min(l.saturating_sub(1));
    }
    if let Some(l) = t.nu.len() {
        w = w.min(l);
    }
    let gate = tridiagonal_boundedness(t, w)?;
    if !gate.holds {
        let gated = |id: &str| Verdict {
            condition_id: id.into(),
            classification: Classification::Inconclusive,
            exact: true,
            evidence: Evidence {
                basis: EvidenceBasis::Gate,
                window: w,
                sequence: sequences::NU_OVER_NEXT_MU.into(),
                witness_indices: vec![gate.sup_nu_ratio_index],
                witness_values: vec![gate.sup_nu_ratio],
                extremal: vec![],
                note: Some("boundedness gate fails on the window".into()),
            },
        };
        return Ok(TridiagonalVerdicts {
            hypercyclic: gated(TRIDIAGONAL_HYPERCYCLIC),
            mixing: gated(TRIDIAGONAL_MIXING),
            gate,
        });
    }
    let d = (0..w).map(|n| t.diagonal_value(n)).collect::<Result<Vec<_>>>()?;
    Ok(TridiagonalVerdicts {
        gate,
        hypercyclic: window_verdict(
            TRIDIAGONAL_HYPERCYCLIC,
            true,
            sequences::TRIDIAGONAL_DIAGONAL,
            &d,
            w,
            cfg.rule(),
            Kind::Liminf,
        ),
        mixing: window_verdict(
            TRIDIAGONAL_MIXING,
            true,
            sequences::TRIDIAGONAL_DIAGONAL,
            &d,
            w,
            cfg.rule(),
            Kind::Limit,
        ),
    })
}

/// Test vectors for uniform conditions on operator-valued kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum TestSet {
    /// The standard basis of the coefficient space.
    Canonical,
    /// User-supplied unit vectors, intended to form a total set.
    Vectors(Vec<CVector>),
    /// All unit vectors, i.e. the operator norm of each (PSD) block.
    OperatorNorm,
}

/// `max_eta <B[n][n] eta, eta>` over the test set, for every `n`.
pub fn block_test_values(k: &BlockCoefficientKernel, tests: &TestSet) -> Result<Vec<f64>> {
    let d = k.dim();
    match tests {
        TestSet::OperatorNorm => Ok(k.diagonal_norms()),
        TestSet::Canonical => Ok((0..k.order())
            .map(|n| {
                let b = k.block(n, n);
                (0..d).map(|i| b[(i, i)].re).fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()),
        TestSet::Vectors(vs) => {
            if vs.is_empty() {
                return Err(Error::EmptyTestSet);
            }
            for (index, v) in vs.iter().enumerate() {
                if v.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "test vector {index} has length {}, expected {d}",
                        v.len()
                    )));
                }
                let norm = v.norm();
                if (norm - 1.0).abs() > UNIT_TOL {
                    return Err(Error::NonUnitTestVector { index, norm });
                }
            }
            Ok((0..k.order())
                .map(|n| {
                    vs.iter()
                        .map(|v| k.quadratic_form(n, n, v).re)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect())
        }
    }
}

/// Uniform `liminf <B[n][n] eta, eta> = 0`: one index subsequence along
/// which the maximum over the test set decays.
pub fn block_hypercyclicity_sufficient(
    k: &BlockCoefficientKernel,
    tests: &TestSet,
    cfg: &CriteriaConfig,
) -> Result<Verdict> {
    let values = block_test_values(k, tests)?;
    check_nonnegative(&values)?;
    let mut v = window_verdict(
        BLOCK_HYPERCYCLIC_SUFFICIENT,
        false,
        sequences::BLOCK_DIAGONAL,
        &values,
        cfg.window,
        cfg.rule(),
        Kind::Liminf,
    );
    apply_analytic(&mut v, liminf_zero(k.asymptotics()));
    Ok(v)
}

pub fn block_mixing_sufficient(
    k: &BlockCoefficientKernel,
    tests: &TestSet,
    cfg: &CriteriaConfig,
) -> Result<Verdict> {
    let values = block_test_values(k, tests)?;
    check_nonnegative(&values)?;
    let mut v = window_verdict(
        BLOCK_MIXING_SUFFICIENT,
        false,
        sequences::BLOCK_DIAGONAL,
        &values,
        cfg.window,
        cfg.rule(),
        Kind::Limit,
    );
    apply_analytic(&mut v, limit_zero(k.asymptotics()));
    Ok(v)
}

/// `sum_(N' <= n, m < window) ||B[n][m]||` (operator norms) for `N' < window`.
pub fn block_absolute_tails(k: &BlockCoefficientKernel, window: usize) -> Vec<f64> {
    let w = window.min(k.order());
    let mut tails = vec![0.0; w + 1];
    for n in (0..w).rev() {
        let mut row = linalg::spectral_norm(k.block(n, n));
        for m in n + 1..w {
            row += 2.0 * linalg::spectral_norm(k.block(n, m));
        }
        tails[n] = tails[n + 1] + row;
    }
    tails.truncate(w);
    tails
}

pub fn block_chaos_sufficient(
    k: &BlockCoefficientKernel,
    tests: &TestSet,
    cfg: &CriteriaConfig,
) -> Result<Verdict> {
    let w = cfg.window.min(k.order());
    let values = block_test_values(k, tests)?;
    let tails = block_absolute_tails(k, w);
    let mut v = tail_verdict(
        BLOCK_CHAOS_SUFFICIENT,
        false,
        sequences::BLOCK_ABS_TAIL,
        &tails,
        sequences::BLOCK_DIAGONAL,
        &values[..w],
        cfg.rule(),
        "absolute tail summability (sufficient proxy)",
    );
    apply_analytic(&mut v, summable(k.asymptotics()));
    Ok(v)
}

/// All verdicts for one kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub hypercyclic_sufficient: Verdict,
    pub mixing_sufficient: Verdict,
    pub chaotic_sufficient: Verdict,
    /// If-and-only-if characterizations, for kernel classes that have them.
    pub exact_characterization: Vec<Verdict>,
    pub boundedness: Option<Verdict>,
    pub analyticity: Option<Verdict>,
}

impl DynamicsReport {
    /// Sufficient conditions for a scalar kernel; characterizations and gates
    /// are added by the caller.
    pub fn scalar(a: &CoefficientMatrix, cfg: &CriteriaConfig) -> Result<Self> {
        let d = normalized_diagonal(a)?;
        Ok(Self {
            hypercyclic_sufficient: hypercyclicity_sufficient(&d, cfg)?,
            mixing_sufficient: mixing_sufficient(&d, cfg)?,
            chaotic_sufficient: chaos_sufficient(a, cfg)?,
            exact_characterization: Vec::new(),
            boundedness: None,
            analyticity: None,
        })
    }

    pub fn block(k: &BlockCoefficientKernel, tests: &TestSet, cfg: &CriteriaConfig) -> Result<Self> {
        Ok(Self {
            hypercyclic_sufficient: block_hypercyclicity_sufficient(k, tests, cfg)?,
            mixing_sufficient: block_mixing_sufficient(k, tests, cfg)?,
            chaotic_sufficient: block_chaos_sufficient(k, tests, cfg)?,
            exact_characterization: Vec::new(),
            boundedness: None,
            analyticity: None,
        })
    }

    pub fn verdicts(&self) -> Vec<&Verdict> {
        let mut out = vec![
            &self.hypercyclic_sufficient,
            &self.mixing_sufficient,
            &self.chaotic_sufficient,
        ];
        out.extend(&self.exact_characterization);
        out.extend(self.boundedness.as_ref());
        out.extend(self.analyticity.as_ref());
        out
    }
}
