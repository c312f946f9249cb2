//! Numeric building blocks: bracketed root finding, adaptive quadrature,
//! slope fitting, and sampling grids.

pub mod fit;
pub mod grid;
pub mod minimize;
pub mod quadrature;
pub mod roots;

pub use fit::least_squares_slope;
pub use grid::{log_grid, product_grid};
pub use minimize::golden_section_min;
pub use quadrature::{adaptive_simpson, log_singular_integral};
pub use roots::{bracket_increasing, solve_bracketed};
