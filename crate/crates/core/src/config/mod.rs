//! Simulation and material configuration.
//!
//! Both files are XML and are read in strict mode: unknown elements,
//! unknown attributes and stray text are errors that carry the element path
//! and line/column. Attributes in a foreign namespace (`xsi:schemaLocation`)
//! are ignored and no schema is fetched.

pub mod expr;
mod material;
mod simulation;
mod write;
mod xml;

pub use expr::{evaluate_expression, parse_expression, EvalError, ExprError, Expression, Variables};
pub use material::{parse_material_file, read_material_file, Material};
pub use simulation::{
    parse_simulation_file, read_simulation_file, AcousticPde, Geometry, InitialSpec, MeshSource, NodeResult,
    OutputSpec, RegionMaterial, SequenceStep, SimulationConfig, ANALYSIS_KINDS, PRESSURE_RESULT,
};
pub use write::write_simulation;
pub use xml::{ConfigError, Location};
