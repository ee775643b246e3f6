//! Finite element solver for the scalar acoustic wave equation.
//!
//! [`mesh`] loads or generates meshes, [`fe`] holds shape functions and
//! quadrature, [`integrators`] element matrices and assembly, [`sparse`] the
//! linear and eigen solvers, [`analysis`] the four analysis kinds. [`config`] reads simulation files, [`results`] writes
//! VTK and CSV, and [`driver`] runs a whole simulation file.

pub mod analysis;
pub mod config;
pub mod driver;
pub mod fe;
pub mod integrators;
pub mod mesh;
pub mod results;
pub mod sparse;

// Guide chapters, so their Rust snippets run under `cargo test`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    struct Intro;
    #[doc = include_str!("../../../book/src/configuration.md")]
    struct Configuration;
    #[doc = include_str!("../../../book/src/expressions.md")]
    struct Expressions;
    #[doc = include_str!("../../../book/src/analyses.md")]
    struct Analyses;
    #[doc = include_str!("../../../book/src/outputs.md")]
    struct Outputs;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
