//! Linearized tension operator, its indicial roots, Jacobi-field solves and exponent fits.

mod banded;
mod fit;
mod indicial;
mod operator;

pub use banded::{BandedLu, BandedMatrix};
pub use fit::{asymptotic_fit, AsymptoticFit, FitOptions};
pub use indicial::{indicial_polynomial, indicial_residual, indicial_roots, IndicialData, IndicialPolynomial};
pub use operator::{
    inner_residual, jacobi_solve, linearized_tension, InnerCondition, JacobiSolution, LinearizedOperator,
    LinearizedTension,
};
