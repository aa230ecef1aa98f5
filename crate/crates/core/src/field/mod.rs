//! Evaluators on map samples: energy, tension, Hopf differential, residues, Bochner checks,
//! the pullback split and the residue formulas for the energy variations.

mod bochner;
mod energy;
mod hopf;
mod split;
mod tension;
mod variation;

pub use bochner::{bochner_check, BochnerReport};
pub use energy::{collar_energy, energy_density, h_l_jacobian, leading_coefficient, total_energy, HLJ};
pub use hopf::{contour_residue, hopf, hopf_with, linearized_hopf, row_residues, ContourResidue, HopfField};
pub use split::{pullback_split, SplitReport};
pub use tension::{tension, TensionField};
pub use variation::{
    energy_gradient_flux, energy_gradient_residue, energy_hessian_flux, energy_hessian_residue,
};

use crate::geometry::stencil::Jet;
use crate::geometry::{BGrid, ConicMetric, DomainMetric, Field, Stencils};
use crate::prelude::*;
use crate::{Error, Result};

/// Near-cone normal form `u = λz + v` with `v ∈ r^{1+ε}C^{2,γ}_b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FormFit {
    pub lambda: C64,
    pub epsilon: f64,
    pub v_norm: f64,
}

/// Map samples in the target's conformal coordinate, together with both metrics.
#[derive(Clone, Debug)]
pub struct MapField {
    pub grid: BGrid,
    pub samples: Field<C64>,
    pub target: ConicMetric,
    pub domain: DomainMetric,
    pub form_fit: Option<FormFit>,
}

impl MapField {
    pub fn new(grid: BGrid, samples: Field<C64>, target: ConicMetric, domain: DomainMetric) -> Result<Self> {
        if !samples.matches(&grid) {
            return Err(Error::InvalidGrid("samples do not match grid"));
        }
        Ok(MapField { grid, samples, target, domain, form_fit: None })
    }

    pub fn from_fn(grid: BGrid, target: ConicMetric, domain: DomainMetric, f: impl Fn(C64) -> C64) -> Self {
        let samples = Field::from_fn(&grid, |i, k| f(grid.z(i, k)));
        MapField { grid, samples, target, domain, form_fit: None }
    }

    pub fn with_samples(&self, samples: Field<C64>) -> Self {
        MapField { samples, form_fit: None, ..self.clone() }
    }

    /// Values on the outer circle `r = 1`.
    pub fn boundary(&self) -> &[C64] {
        self.samples.row(self.grid.n_t() - 1)
    }

    pub fn jet(&self, st: &Stencils) -> Jet {
        Jet::new(st, &self.samples)
    }

    pub(crate) fn check_puncture(&self) -> Result<()> {
        for i in 0..self.grid.n_t() {
            for k in 0..self.grid.n_theta() {
                if self.samples[(i, k)] == ZERO {
                    return Err(Error::TargetPunctureHit { row: i, col: k });
                }
            }
        }
        Ok(())
    }
}
