use super::SolverConfig;
use crate::field::{h_l_jacobian, tension, MapField};
use crate::geometry::{Field, Stencils};
use crate::linearization::{inner_residual, LinearizedOperator};
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct NewtonResult {
    pub map: MapField,
    /// Residual before the first step and after each accepted step.
    pub history: Vec<f64>,
    pub iterations: usize,
    /// Accepted steps that needed at least one halving.
    pub damped_steps: usize,
}

/// Residual field: inner condition on row 0, normalized tension on interior rows, zero on `r = 1`.
pub fn newton_residual(u: &MapField, st: &Stencils, cfg: &SolverConfig) -> Result<(Field<C64>, f64)> {
    let g = &u.grid;
    let mut f = tension(u)?.normalized;
    let ir = inner_residual(g, st, &u.samples, cfg.inner, u.target.alpha());
    f.row_mut(0).copy_from_slice(&ir);
    for v in f.row_mut(g.n_t() - 1) {
        *v = ZERO;
    }
    let sup = f.sup_norm();
    Ok((f, sup))
}

fn check_orientation(u: &MapField) -> Result<()> {
    let hlj = h_l_jacobian(u)?;
    let bad = hlj.jac.as_slice().iter().filter(|&&j| j <= 0.0).count();
    let fraction = bad as f64 / hlj.jac.as_slice().len() as f64;
    if fraction > 0.01 {
        return Err(Error::DegenerateJacobian { fraction });
    }
    Ok(())
}

/// Damped Newton for the tension field with Dirichlet data `boundary` on `r = 1`.
pub fn newton_relax(u_init: &MapField, boundary: &[C64], cfg: &SolverConfig) -> Result<NewtonResult> {
    let g = u_init.grid;
    if boundary.len() != g.n_theta() {
        return Err(Error::InvalidGrid("boundary data does not match grid"));
    }
    let st = Stencils::new(&g);
    let mut u = u_init.clone();
    u.form_fit = None;
    u.samples.row_mut(g.n_t() - 1).copy_from_slice(boundary);
    let (mut f, mut res) = newton_residual(&u, &st, cfg)?;
    let mut history = vec![res];
    let mut damped_steps = 0;
    let mut it = 0;
    while res >= cfg.newton_tol {
        if it == cfg.max_newton {
            return Err(Error::NoConvergence { iterations: it, history, best_w: None });
        }
        it += 1;
        let op = LinearizedOperator::new(&u)?;
        let rhs = f.map(|v| -v);
        let delta = op.solve(cfg.inner, &rhs, &vec![ZERO; g.n_theta()])?;
        let mut step = 1.0;
        let mut accepted = None;
        for halving in 0..=cfg.damping {
            let trial = u.with_samples(u.samples.zip_map(&delta, |a, d| a + d * step));
            if let Ok((tf, tr)) = newton_residual(&trial, &st, cfg) {
                if tr < res {
                    if halving > 0 {
                        damped_steps += 1;
                    }
                    accepted = Some((trial, tf, tr));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((nu, nf, nr)) => {
                u = nu;
                f = nf;
                res = nr;
                history.push(res);
            }
            None => return Err(Error::NoConvergence { iterations: it, history, best_w: None }),
        }
    }
    check_orientation(&u)?;
    Ok(NewtonResult { map: u, history, iterations: it, damped_steps })
}
