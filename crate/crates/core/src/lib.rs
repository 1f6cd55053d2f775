//! Exact Laplacian eigenstructure and control-node selection for threshold
//! graphs and cographs.
//!
//! The network model is `x' = -L x + B u` with `L` the graph Laplacian.
//! [`threshold`] works from a binary construction sequence, [`cograph`] from
//! a cotree expression, and [`oracle`] independently decides controllability
//! of any `(L, B)` pair with exact integer arithmetic.

pub mod cograph;
pub mod graph;
pub mod matrix;
pub mod oracle;
pub mod threshold;

pub use cograph::{CographEigen, CographError, Cotree, MinimalInput};
pub use graph::{DegreeSequence, Graph, GraphError};
pub use matrix::{IntMatrix, MatrixError};
pub use oracle::{EigenGroup, OracleError, Verdict, Witness};
pub use threshold::{
    ConstructionSequence, ControlSelection, DegreeCells, EigenStructure, ThresholdError,
};
