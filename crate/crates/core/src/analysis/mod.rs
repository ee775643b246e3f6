//! Static, transient, harmonic and eigenfrequency analyses.
//!
//! Every analysis starts from a [`Problem`]: the assembled mass and
//! stiffness matrices on the full node numbering plus the boundary data.
//! Dirichlet nodes are eliminated symmetrically; the reduced systems only
//! ever contain free unknowns.

mod eigen;
mod harmonic;
mod problem;
mod static_;
mod transient;

use thiserror::Error;

use crate::config::{EvalError, Expression};
use crate::fe::FeError;
use crate::integrators::AssemblyError;
use crate::sparse::SolverError;

pub use eigen::{run_eigenfrequency, solve_eigenfrequency, EigenMode};
pub use harmonic::run_harmonic;
pub use problem::{apply_dirichlet, partition, Blocks, Problem, ReducedSystem};
pub use static_::{run_static, solve_static};
pub use transient::{run_transient_newmark, TransientOutput};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Fe(#[from] FeError),
    #[error("{context}: {source}")]
    Solver {
        context: String,
        #[source]
        source: SolverError,
    },
    #[error("step {step} (t = {time}): {source}")]
    TimeStep {
        step: usize,
        time: f64,
        #[source]
        source: SolverError,
    },
    #[error("frequency {frequency} Hz: {source}")]
    Frequency {
        frequency: f64,
        #[source]
        source: SolverError,
    },
    #[error("region `{region}`: {source}")]
    Evaluation {
        region: String,
        #[source]
        source: EvalError,
    },
    #[error("static analysis requires Dirichlet data")]
    StaticWithoutDirichlet,
    #[error("{count} node(s) are not part of any PDE region (first: node id {first})")]
    UncoveredNodes { count: usize, first: usize },
    #[error("invalid analysis parameters: {0}")]
    InvalidSpec(String),
    #[error("initial state has {found} values but the mesh has {expected} nodes")]
    InitialStateLength { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientSpec {
    pub dt: f64,
    pub n_steps: usize,
    pub beta: f64,
    pub gamma: f64,
}

impl TransientSpec {
    /// Average-acceleration Newmark (`β = 1/4`, `γ = 1/2`).
    pub fn new(dt: f64, n_steps: usize) -> Self {
        TransientSpec {
            dt,
            n_steps,
            beta: 0.25,
            gamma: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisSpec {
    Static,
    Transient(TransientSpec),
    Harmonic { frequencies: Vec<f64> },
    Eigenfrequency { modes: usize, shift: Option<f64> },
}

impl AnalysisSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            AnalysisSpec::Static => "static",
            AnalysisSpec::Transient(_) => "transient",
            AnalysisSpec::Harmonic { .. } => "harmonic",
            AnalysisSpec::Eigenfrequency { .. } => "eigenFrequency",
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |m: String| Err(AnalysisError::InvalidSpec(m));
        match self {
            AnalysisSpec::Static => Ok(()),
            AnalysisSpec::Transient(t) => {
                if !(t.dt > 0.0) || !t.dt.is_finite() {
                    return bad(format!("time step must be positive, got {}", t.dt));
                }
                if t.n_steps == 0 {
                    return bad("number of time steps must be at least 1".into());
                }
                if !(0.0..=0.5).contains(&t.beta) {
                    return bad(format!("beta must lie in [0, 0.5], got {}", t.beta));
                }
                if !(0.0..=1.0).contains(&t.gamma) {
                    return bad(format!("gamma must lie in [0, 1], got {}", t.gamma));
                }
                Ok(())
            }
            AnalysisSpec::Harmonic { frequencies } => {
                if frequencies.is_empty() {
                    return bad("harmonic analysis needs at least one frequency".into());
                }
                if let Some(f) = frequencies.iter().find(|f| !(**f > 0.0) || !f.is_finite()) {
                    return bad(format!("frequencies must be positive, got {f}"));
                }
                if frequencies.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("frequencies must be strictly increasing".into());
                }
                Ok(())
            }
            AnalysisSpec::Eigenfrequency { modes, shift } => {
                if *modes == 0 {
                    return bad("number of modes must be at least 1".into());
                }
                if let Some(s) = shift {
                    if !s.is_finite() {
                        return bad(format!("shift must be finite, got {s}"));
                    }
                }
                Ok(())
            }
        }
    }
}

/// An expression bound to a mesh region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionValue {
    pub region: String,
    pub value: Expression,
}

impl RegionValue {
    pub fn new(region: impl Into<String>, value: Expression) -> Self {
        RegionValue {
            region: region.into(),
            value,
        }
    }
}

/// Boundary conditions and loads. Dirichlet entries listed first win where
/// regions share nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BcSet {
    pub dirichlet: Vec<RegionValue>,
    pub neumann: Vec<RegionValue>,
    pub sources: Vec<RegionValue>,
}

/// Initial pressure or its rate.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialValue {
    /// Interpolated at the nodes.
    Expression(Expression),
    /// Nodal values, e.g. the result of an earlier step.
    Nodal(Vec<f64>),
}

impl Default for InitialValue {
    fn default() -> Self {
        InitialValue::Expression(Expression::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialConditions {
    pub p0: InitialValue,
    pub dp0: InitialValue,
}

/// Nodal field on the full mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultField {
    pub name: String,
    /// Time in seconds or frequency in Hz; 0 for static results.
    pub time_or_freq: f64,
    pub values: Vec<f64>,
}

impl ResultField {
    pub fn pressure(time_or_freq: f64, values: Vec<f64>) -> Self {
        ResultField {
            name: "acouPressure".into(),
            time_or_freq,
            values,
        }
    }
}
