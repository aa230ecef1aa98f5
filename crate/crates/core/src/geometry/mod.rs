//! Cone angles, conic metrics, log-polar grids and weighted b-norms.

mod cone;
mod grid;
mod metric;
mod norm;
pub mod stencil;

pub use cone::{arg_2pi, polar_pow, unwedge, wedge, AngleClass, ConeAngle};
pub use grid::{BGrid, Field};
pub use metric::{
    gauss_curvature, gauss_curvature_from_samples, round_cone_metric, ConicMetric, DomainMetric, MuProfile,
    MuTerm,
};
pub use norm::{weighted_b_norm, WeightedNormSpec};
pub use stencil::Stencils;
