use conelab_core::diagnostics::{
    admissible_supersolution, cone_classification_check, form_fit, harnack_check, subsolution_check,
};
use conelab_core::field::{bochner_check, contour_residue, h_l_jacobian, hopf_with, row_residues, tension, MapField};
use conelab_core::geometry::{BGrid, ConicMetric, DomainMetric, Field, MuProfile};
use conelab_core::linearization::{indicial_residual, indicial_roots};
use conelab_core::solver::{
    continue_path, convergence_orders, energy_minimality_probe, full_energy, move_cone_point, newton_relax,
    ContinuationPath, NewtonResult,
};
use conelab_core::spectral::{
    residue_from_series, solve_augmented_dirichlet, solve_dirichlet, AugmentedConfig, BoundaryTrace,
    DirichletConfig, TwistedSeries,
};
use conelab_core::{Complex64 as C64, Error as CoreError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{complex, RunDir};
use crate::CheckFailed;

/// Contour radii at a quarter, half and three quarters of the way out in `t`.
fn contour_radii(grid: &BGrid) -> [f64; 3] {
    let t = grid.t_min();
    [(0.75 * t).exp(), (0.5 * t).exp(), (0.25 * t).exp()]
}

fn series_json(s: &TwistedSeries) -> Value {
    let coeffs: Vec<Value> = s
        .modes()
        .filter(|(_, a)| a.norm() > 0.0)
        .map(|(j, a)| json!({ "j": j, "re": a.re, "im": a.im }))
        .collect();
    json!({ "alpha": s.alpha(), "J": s.order(), "coeffs": coeffs })
}

fn boundary_samples(series: &TwistedSeries, grid: &BGrid) -> anyhow::Result<Vec<C64>> {
    Ok((0..grid.n_theta()).map(|k| series.cone_boundary(grid.theta(k))).collect::<Result<_, _>>()?)
}

fn hopf_summary(u: &MapField, dir: &RunDir) -> anyhow::Result<Value> {
    let hf = hopf_with(u, 0.0)?;
    let cr = contour_residue(&u.grid, &hf.phi, &contour_radii(&u.grid), f64::INFINITY)?;
    dir.write_complex_field("hopf.csv", &u.grid, &hf.phi)?;
    let rows: Vec<(f64, f64, f64)> =
        row_residues(&u.grid, &hf.phi).iter().enumerate().map(|(i, r)| (u.grid.t(i), r.re, r.im)).collect();
    dir.write_table("row_residues.csv", &["t", "re", "im"], &rows)?;
    Ok(json!({
        "residue": complex(hf.residue_at_origin),
        "residue_deviation": hf.residue_deviation,
        "contour_radii": contour_radii(&u.grid),
        "contour_residues": cr.per_radius.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
        "contour_deviation": cr.max_deviation,
        "dbar_residual": hf.dbar_residual,
    }))
}

fn newton_json(r: &NewtonResult) -> Value {
    json!({
        "iterations": r.iterations,
        "damped_steps": r.damped_steps,
        "history": r.history,
        "orders": convergence_orders(&r.history, 1e-12),
    })
}

/// A harmonic map for the configured data: the synthesized series when the target is the
/// round cone and nothing else is requested, a Newton solve otherwise. Checks that need a
/// discrete solution force the Newton polish.
struct Solved {
    map: MapField,
    series: TwistedSeries,
    method: &'static str,
    newton: Option<NewtonResult>,
    cone_point: Option<Value>,
}

fn obtain(cfg: &RunConfig, force_newton: bool) -> anyhow::Result<Solved> {
    let series = cfg.series()?;
    let grid = cfg.grid()?;
    let target = cfg.target()?;
    let init = MapField::new(grid, series.map_on_grid(&grid)?, target, DomainMetric::Flat)?;
    if !force_newton && cfg.mu().is_zero() && !cfg.residue_free {
        return Ok(Solved { map: init, series, method: "spectral", newton: None, cone_point: None });
    }
    let boundary = boundary_samples(&series, &grid)?;
    let solver = cfg.solver();
    let nr = newton_relax(&init, &boundary, &solver)?;
    let mut map = nr.map.clone();
    let mut cone_point = None;
    if cfg.residue_free {
        let cp = move_cone_point(&map, &solver)?;
        cone_point = Some(json!({
            "w": complex(cp.w),
            "residue": complex(cp.residue),
            "iterations": cp.iterations,
            "history": cp.history,
        }));
        map = cp.map;
    }
    Ok(Solved { map, series, method: "newton", newton: Some(nr), cone_point })
}

pub fn cone_dirichlet(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let series = cfg.series()?;
    let grid = cfg.grid()?;
    let trace = BoundaryTrace::from_series(&series, cfg.trace_samples);
    let dc = DirichletConfig { order: series.order(), threshold: cfg.threshold, ..DirichletConfig::default() };
    let sol = solve_dirichlet(&trace, &grid, &dc)?;
    let rep = &sol.report;
    dir.write_json("series.json", &series_json(&sol.series))?;
    let mut out = json!({
        "class": format!("{:?}", rep.class),
        "requires_translation": rep.requires_translation,
        "distance_to_identity": rep.distance_to_identity,
        "threshold": rep.threshold,
        "residue": complex(rep.residue),
        "truncation_tail": rep.truncation_tail,
        "reconstruction_error": rep.reconstruction_error,
        "energy": sol.series.energy(),
    });
    if let Some(samples) = sol.map {
        dir.write_complex_field("map.csv", &grid, &samples)?;
        let u = MapField::new(grid, samples, cfg.target()?, DomainMetric::Flat)?;
        out["hopf"] = hopf_summary(&u, dir)?;
    }
    Ok(out)
}

pub fn cone_augmented(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let series = cfg.series()?;
    let grid = cfg.grid()?;
    let ac = AugmentedConfig {
        tol: cfg.tol_outer,
        trust_radius: cfg.trust_radius,
        order: cfg.order.max(series.order()),
        samples: cfg.trace_samples,
        max_iter: cfg.max_outer,
        ..AugmentedConfig::default()
    };
    let sol = solve_augmented_dirichlet(&series, &ac)?;
    dir.write_json("series.json", &series_json(&sol.series))?;
    let samples = sol.map_on_grid(&grid)?;
    dir.write_complex_field("map.csv", &grid, &samples)?;
    let rows: Vec<(usize, f64)> = sol.history.iter().copied().enumerate().collect();
    dir.write_table("history.csv", &["step", "residual"], &rows)?;
    Ok(json!({
        "w": complex(sol.w),
        "iterations": sol.iterations,
        "history": sol.history,
        "a_minus_one": complex(sol.series.coeff(-1)),
        "residue": complex(residue_from_series(&sol.series)),
        "residue_before": complex(residue_from_series(&series)),
        "energy": sol.series.energy(),
    }))
}

pub fn solve(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let s = obtain(cfg, true)?;
    let u = &s.map;
    let tf = tension(u)?;
    dir.write_complex_field("map.csv", &u.grid, &u.samples)?;
    dir.write_complex_field("tension.csv", &u.grid, &tf.normalized)?;
    dir.write_real_field("energy_density.csv", &u.grid, &h_l_jacobian(u)?.e)?;
    let nr = s.newton.as_ref().expect("newton path");
    let rows: Vec<(usize, f64)> = nr.history.iter().copied().enumerate().collect();
    dir.write_table("history.csv", &["iteration", "residual"], &rows)?;
    let fit = form_fit(u).ok();
    Ok(json!({
        "newton": newton_json(nr),
        "cone_point": s.cone_point,
        "tension_residual": tf.sup_normalized,
        "energy": full_energy(u)?,
        "hopf": hopf_summary(u, dir)?,
        "form_fit": fit.map(|f| json!({
            "lambda": complex(f.fit.lambda),
            "epsilon": f.fit.epsilon,
            "goodness": f.goodness,
        })),
    }))
}

pub fn continuation(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let series = cfg.series()?;
    let grid = cfg.grid()?;
    let angle = cfg.angle()?;
    let end = boundary_samples(&series, &grid)?;
    let start: Vec<C64> = (0..grid.n_theta()).map(|k| C64::from_polar(1.0, grid.theta(k))).collect();
    cfg.target()?;
    let mu = cfg.mu();
    let c = cfg.c;
    let path = ContinuationPath {
        boundary: Box::new(|t: f64| start.iter().zip(&end).map(|(a, b)| a + (b - a) * t).collect()),
        target: Box::new(move |t: f64| {
            ConicMetric::new(angle, c, mu.scaled(t)).expect("scaled profile keeps its rate")
        }),
        initial: MapField::from_fn(grid, ConicMetric::new(angle, c, MuProfile::zero())?, DomainMetric::Flat, |z| z),
        residue_free: cfg.residue_free,
    };
    let steps = continue_path(&path, &cfg.solver())?;
    let mut rows = Vec::with_capacity(steps.len());
    for (n, s) in steps.iter().enumerate() {
        dir.write_complex_field(&format!("map_step_{n:03}.csv"), &grid, &s.map.samples)?;
        let w = s.w.unwrap_or_default();
        let (lam, eps) = s.form_fit.map_or((C64::new(f64::NAN, f64::NAN), f64::NAN), |f| (f.lambda, f.epsilon));
        rows.push((s.t, s.energy, s.residue.re, s.residue.im, s.tension_residual, w.re, w.im, lam.re, lam.im, eps));
    }
    dir.write_table(
        "steps.csv",
        &["t", "energy", "residue_re", "residue_im", "tension", "w_re", "w_im", "lambda_re", "lambda_im", "epsilon"],
        &rows,
    )?;
    let last = steps.last().expect("path has steps");
    dir.write_complex_field("map.csv", &grid, &last.map.samples)?;
    Ok(json!({
        "steps": steps.len(),
        "t": steps.iter().map(|s| s.t).collect::<Vec<_>>(),
        "energy": steps.iter().map(|s| s.energy).collect::<Vec<_>>(),
        "residue_abs": steps.iter().map(|s| s.residue.norm()).collect::<Vec<_>>(),
        "final": {
            "energy": last.energy,
            "residue": complex(last.residue),
            "tension_residual": last.tension_residual,
            "w": last.w.map(complex),
        },
    }))
}

pub fn indicial(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let angle = cfg.angle()?;
    let grid = cfg.grid()?;
    let data = indicial_roots(angle, cfg.window);
    println!("alpha = {}, window = {}", data.alpha, data.window);
    println!("{:>4}  {:>22}  {:>22}", "j", "s = j", "s = 2 - 2 alpha - j");
    let mut modes = Vec::new();
    let mut residual_max: f64 = 0.0;
    for p in &data.per_mode {
        println!("{:>4}  {:>22}  {:>22}", p.j, p.roots.0, p.roots.1);
        let mut res = Vec::new();
        for s in [p.roots.0, p.roots.1] {
            let r = indicial_residual(angle, s, p.j, &grid)?;
            residual_max = residual_max.max(r);
            res.push(r);
        }
        modes.push(json!({ "j": p.j, "coefficients": p.coefficients, "roots": [p.roots.0, p.roots.1], "residuals": res }));
    }
    let list: Vec<String> = data.roots.iter().map(|r| r.to_string()).collect();
    println!("roots ({}): {}", data.roots.len(), list.join(" "));
    let out = json!({
        "alpha": data.alpha,
        "window": data.window,
        "roots": data.roots,
        "per_mode": modes,
        "first_above_one": data.first_above_one,
        "first_above_zero": data.first_above_zero,
        "max_discrete_residual": residual_max,
    });
    dir.write_json("indicial.json", &out)?;
    let rows: Vec<(usize, f64)> = data.roots.iter().copied().enumerate().collect();
    dir.write_table("roots.csv", &["index", "root"], &rows)?;
    Ok(out)
}

pub fn hopf_analyze(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let s = obtain(cfg, false)?;
    dir.write_complex_field("map.csv", &s.map.grid, &s.map.samples)?;
    let mut out = hopf_summary(&s.map, dir)?;
    out["method"] = json!(s.method);
    out["tension_residual"] = json!(tension(&s.map)?.sup_normalized);
    if s.method == "spectral" {
        out["residue_from_series"] = json!(complex(residue_from_series(&s.series)));
    }
    if let Some(nr) = &s.newton {
        out["newton"] = newton_json(nr);
    }
    out["cone_point"] = json!(s.cone_point);
    Ok(out)
}

fn check<T>(r: conelab_core::Result<T>, f: impl FnOnce(T) -> (bool, Value)) -> (bool, Value) {
    match r {
        Ok(v) => f(v),
        Err(e) => (false, json!({ "passed": false, "error": e.to_string() })),
    }
}

pub fn diagnostics(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let s = obtain(cfg, true)?;
    let u = &s.map;
    let g = u.grid;
    let tol = cfg.tol_diagnostic.max(g.h_t().powi(2));
    let hlj = h_l_jacobian(u)?;
    dir.write_real_field("energy_density.csv", &g, &hlj.e)?;
    dir.write_real_field("jacobian.csv", &g, &hlj.jac)?;
    let mut checks = serde_json::Map::new();
    let mut all = true;
    let mut put = |name: &str, (ok, v): (bool, Value)| {
        all &= ok;
        checks.insert(name.to_string(), v);
    };

    let sub = subsolution_check(&g, &hlj.e, tol, cfg.seed);
    put(
        "subsolution",
        (
            sub.passed(),
            json!({ "passed": sub.passed(), "min_laplacian": sub.min_laplacian, "max_weak": sub.max_weak, "tolerance": sub.tolerance }),
        ),
    );
    put(
        "bochner",
        check(bochner_check(u, cfg.tol_diagnostic, 1e-3), |b| {
            let ok = b.energy_violation <= tol;
            (ok, json!({
                "passed": ok,
                "energy_violation": b.energy_violation,
                "energy_violation_linear_j": b.energy_violation_linear_j,
                "identity_residual": b.identity_residual,
                "nodes_checked": b.nodes_checked,
            }))
        }),
    );
    put(
        "form",
        check(form_fit(u), |f| {
            (true, json!({
                "passed": true,
                "lambda": complex(f.fit.lambda),
                "epsilon": f.fit.epsilon,
                "exponent": f.exponent,
                "goodness": f.goodness,
                "double_cover": f.double_cover.map(|(a, b)| json!({ "a": complex(a), "b": complex(b) })),
            }))
        }),
    );
    put(
        "classification",
        check(cone_classification_check(u, 1e-2, cfg.tol_diagnostic), |c| {
            (true, json!({
                "passed": true,
                "is_dilation_rotation": c.passed,
                "lambda": complex(c.lambda),
                "verdict": c.verdict,
                "harmonic": c.harmonic,
                "bounded_density": c.bounded_density,
                "density_ratio": c.density_ratio,
            }))
        }),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut harnack = Vec::new();
    let mut harnack_ok = true;
    for _ in 0..cfg.harnack_samples {
        let coef: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15))).collect();
        let b: Vec<f64> = (0..g.n_theta())
            .map(|k| {
                let th = g.theta(k);
                1.0 + coef.iter().enumerate().map(|(m, (a, c))| {
                    let m = (m + 1) as f64;
                    a * (m * th).cos() + c * (m * th).sin()
                }).sum::<f64>()
            })
            .collect();
        let r = admissible_supersolution(&g, cfg.alpha, cfg.harnack_sigma, &b)
            .and_then(|f| harnack_check(&g, &f, cfg.alpha, cfg.harnack_sigma, tol));
        let (ok, v) = check(r, |h| {
            (h.passed, json!({ "passed": h.passed, "limit": h.limit, "bound": h.bound, "slack": h.slack }))
        });
        harnack_ok &= ok;
        harnack.push(v);
    }
    put("harnack", (harnack_ok, json!({ "passed": harnack_ok, "samples": harnack })));

    let identity = hlj
        .e
        .as_slice()
        .iter()
        .zip(hlj.h.as_slice().iter().zip(hlj.l.as_slice()))
        .map(|(e, (h, l))| (e - h - l).abs())
        .fold(0.0, f64::max);
    put("h_plus_l", (identity <= 1e-12, json!({ "passed": identity <= 1e-12, "max_defect": identity })));

    let report = json!({
        "method": s.method,
        "tension_residual": tension(u)?.sup_normalized,
        "tolerance": tol,
        "checks": Value::Object(checks),
        "all_passed": all,
    });
    dir.write_json("report.json", &report)?;
    if !all {
        return Err(CheckFailed("one or more diagnostics failed".into()).into());
    }
    Ok(report)
}

pub fn probe_minimality(cfg: &RunConfig, dir: &RunDir) -> anyhow::Result<Value> {
    let s = obtain(cfg, true)?;
    let u = &s.map;
    dir.write_complex_field("map.csv", &u.grid, &u.samples)?;
    match energy_minimality_probe(u, cfg.probe_samples, cfg.probe_amplitude, cfg.seed) {
        Ok(rep) => {
            let rows: Vec<(usize, f64)> = rep.margins.iter().copied().enumerate().collect();
            dir.write_table("margins.csv", &["sample", "margin"], &rows)?;
            Ok(json!({
                "method": s.method,
                "base_energy": rep.base_energy,
                "samples": rep.margins.len(),
                "min_margin": rep.min_margin,
                "violated": false,
            }))
        }
        Err(CoreError::MinimalityViolated { margin, sample, witness }) => {
            if let Ok(f) = Field::from_vec(&u.grid, witness) {
                dir.write_complex_field("witness.csv", &u.grid, &f)?;
            }
            dir.write_json("report.json", &json!({ "violated": true, "margin": margin, "sample": sample }))?;
            Err(CheckFailed(format!("energy decreased by {:.3e} for sample {sample}", -margin)).into())
        }
        Err(e) => Err(e.into()),
    }
}
