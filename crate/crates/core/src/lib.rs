//! Spectra of Laplacians on fractals built as projective limits of
//! product-and-glue constructions.
//!
//! Each finite level `F_i` is a weighted metric graph (or, for the gasket
//! family, a weighted combinatorial graph). Levels are discretized at a
//! common pitch so that the pullback from one level to the next is an exact
//! intertwiner of the discrete Laplacians; level spectra are then nested and
//! split into pullback and new (fiber-mean-zero) parts.
//!
//! * [`metric_graph`]: graphs, meshes, the pencil `(A, M)` and fiber operators.
//! * [`eigensolve`]: dense and Lanczos solvers, clustering, nesting and
//!   comparison reports.
//! * [`laakso`], [`pate_a_choux`], [`fractal_string`]: builders and closed
//!   forms for the three example families.
//! * [`cli`]: the file-based pipelines behind the `fracspec` binary.

pub mod cli;
pub mod eigensolve;
mod error;
pub mod fractal_string;
pub mod laakso;
pub mod metric_graph;
pub mod pate_a_choux;
mod rational;
pub mod sparse;

pub use eigensolve::{EigenPairs, SpectrumEntry, SpectrumList, Tag, Target};
pub use error::{Error, ErrorKind, Result};
pub use metric_graph::{Boundary, DiscreteOperator, FiberStructure, Mesh, MetricGraph, Tower};
pub use rational::{approximate, Rational};
