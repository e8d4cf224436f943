//! Analytic test functions and their uniform-grid samples.

mod expr;
mod function;
mod grid;

pub use expr::{Expr, Func};
pub use function::{FunctionKind, FunctionSpec};
pub use grid::{grid_coordinate, GridFunction};
