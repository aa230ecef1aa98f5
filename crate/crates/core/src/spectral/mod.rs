//! Exact solutions of the Dirichlet problem from the disc to the standard cone.
//!
//! In the unit sector coordinate `ζ = z^α` the cone is a Euclidean wedge of opening `2πα`
//! with its rays glued, and harmonic maps are sums of twisted monomials
//! `ζ^{1+j/α}` (j ≥ 0) and `ζ̄^{−1−j/α}` (j < 0).

mod dirichlet;
mod pi_cone;
mod series;

pub use dirichlet::{
    solve_augmented_dirichlet, solve_dirichlet, AdmissibilityReport, AugmentedConfig, AugmentedSolution,
    DirichletConfig, DirichletSolution,
};
pub(crate) use dirichlet::solve2;
pub use pi_cone::{pi_cone_pushforward, pi_cone_residue, PiConeLift, PiConeResidue};
pub use series::{
    analyze_boundary, recentre, residue_from_series, synthesize, synthesize_polar, BoundaryAnalysis,
    BoundaryTrace, TwistedSeries,
};
