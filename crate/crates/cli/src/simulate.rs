//! Orbit traces and periodic-point tables as CSV.

use std::str::FromStr;

use kernel_dynamics::linalg::{c, C64};
use kernel_dynamics::model::{build_model, orbit, periodic_point, Orbit, PeriodicPoint, VectorInD};

use crate::analyze::AnalyzeError;
use crate::spec::{KernelSpec, SpecError};

pub const DEFAULT_SIMULATION_ORDER: usize = 64;
/// Coordinates written per orbit row.
pub const CSV_COORDS: usize = 8;

/// Starting vector: a basis index `K_n`, or coordinates in the `K_n` basis.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorArg {
    Index(usize),
    Coords(Vec<C64>),
}

impl FromStr for VectorArg {
    type Err = String;

    /// `5`, `1,0.5,-2` or `1:0.5,0:-1` (real:imaginary pairs).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if !s.contains([',', ':']) {
            if let Ok(i) = s.parse::<usize>() {
                return Ok(VectorArg::Index(i));
            }
        }
        let coords = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                let (re, im) = part.split_once(':').unwrap_or((part, "0"));
                let re: f64 = re.trim().parse().map_err(|_| format!("bad coordinate `{part}`"))?;
                let im: f64 = im.trim().parse().map_err(|_| format!("bad coordinate `{part}`"))?;
                if re.is_finite() && im.is_finite() {
                    Ok(c(re, im))
                } else {
                    Err(format!("coordinate `{part}` is not finite"))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VectorArg::Coords(coords))
    }
}

impl VectorArg {
    fn to_vector(&self, n: usize) -> Result<VectorInD, AnalyzeError> {
        let capacity = |needed| AnalyzeError::Kernel {
            context: "starting vector".into(),
            source: kernel_dynamics::Error::Capacity { needed, order: n },
        };
        match self {
            VectorArg::Index(i) if *i < n => Ok(VectorInD::basis(*i, n)),
            VectorArg::Index(i) => Err(capacity(i + 1)),
            VectorArg::Coords(v) if v.len() <= n => {
                let mut coords = v.clone();
                coords.resize(n, c(0.0, 0.0));
                Ok(VectorInD::new(coords))
            }
            VectorArg::Coords(v) => Err(capacity(v.len())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub vector: VectorArg,
    pub steps: usize,
    pub periods: Vec<usize>,
    pub order: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub order: usize,
    pub orbit: Orbit,
    pub periodic: Vec<(usize, PeriodicPoint)>,
}

pub fn simulate(spec: &KernelSpec, sim: &SimConfig) -> Result<Simulation, AnalyzeError> {
    if spec.kernel.is_block() {
        return Err(SpecError::Schema {
            field: "kind".into(),
            message: "simulation needs a scalar-valued kernel".into(),
        }
        .into());
    }
    let n = spec.resolve_order(sim.order, DEFAULT_SIMULATION_ORDER)?;
    let wrap = |context: &str| {
        let context = context.to_string();
        move |source| AnalyzeError::Kernel { context, source }
    };
    let a = spec.kernel.build_scalar(n).map_err(wrap("building kernel"))?;
    let model = build_model(&a).map_err(wrap("building the truncated model"))?;
    let x = sim.vector.to_vector(n)?;
    let orbit = orbit(&model, &x, sim.steps).map_err(wrap("computing the orbit"))?;
    let periodic = sim
        .periods
        .iter()
        .map(|&p| Ok((p, periodic_point(&model, &x, p).map_err(wrap("building periodic points"))?)))
        .collect::<Result<Vec<_>, AnalyzeError>>()?;
    Ok(Simulation { order: n, orbit, periodic })
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn orbit_header() -> Vec<String> {
    let mut h = vec!["step".to_string(), "norm".to_string()];
    for k in 0..CSV_COORDS {
        h.push(format!("coord_{k}_re"));
        h.push(format!("coord_{k}_im"));
    }
    h
}

pub fn orbit_csv(orbit: &Orbit) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(orbit_header())?;
    for (step, (norm, state)) in orbit.norms.iter().zip(&orbit.states).enumerate() {
        let mut row = vec![step.to_string(), fmt_f64(*norm)];
        for k in 0..CSV_COORDS {
            let z = state.coords.get(k).copied().unwrap_or(c(0.0, 0.0));
            row.push(fmt_f64(z.re));
            row.push(fmt_f64(z.im));
        }
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn periodic_csv(rows: &[(usize, PeriodicPoint)]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["p", "residual", "bound", "distance_to_x"])?;
    for (p, pp) in rows {
        w.write_record([
            p.to_string(),
            fmt_f64(pp.residual),
            fmt_f64(pp.bound),
            fmt_f64(pp.distance_to_x),
        ])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> csv::Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}
