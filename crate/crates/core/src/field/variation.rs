use crate::prelude::*;

/// `Re(2πi Σ w_i Res_i φ)`, the first variation of energy as a residue pairing.
pub fn energy_gradient_residue(w: &[C64], residues: &[C64]) -> f64 {
    (2.0 * PI * I * pairing(w, residues)).re
}

/// `Re(2πi Σ w_i Res_i φ(J))` with `φ(J)` the derivative of the Hopf coefficient along the path.
pub fn energy_hessian_residue(w: &[C64], residues_of_derivative: &[C64]) -> f64 {
    (2.0 * PI * I * pairing(w, residues_of_derivative)).re
}

/// `Re(2π Σ w_i Res_i φ)`: the same pairing without the factor `i`, which is what the
/// flux of the energy-momentum tensor through a small circle gives for the recentring path
/// `u ∘ m_{tw}^{-1}`.
pub fn energy_gradient_flux(w: &[C64], residues: &[C64]) -> f64 {
    (2.0 * PI * pairing(w, residues)).re
}

pub fn energy_hessian_flux(w: &[C64], residues_of_derivative: &[C64]) -> f64 {
    (2.0 * PI * pairing(w, residues_of_derivative)).re
}

fn pairing(w: &[C64], res: &[C64]) -> C64 {
    assert_eq!(w.len(), res.len(), "one direction per cone point");
    w.iter().zip(res).map(|(a, b)| a * b).sum()
}
