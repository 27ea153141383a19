use std::time::Instant;

use rayon::prelude::*;

use crate::differences::{
    modulus, p_mean_modulus, total_modulus, total_p_mean_modulus, ModulusRequest,
};
use crate::functions::{Evaluate, FunctionSpec};
use crate::geometry::{
    lp_norm, whitney_lower_constant, Exponent, MultiIndex, Parallelepiped, StepVector, SubsetMask,
};
use crate::polyapprox::{best_approx, taylor_poly, taylor_remainder_bound};
use crate::smoother::{k_functional_bracket, k_functional_sweep, step_bounds, subdivision_check};

use super::config::ExperimentConfig;
use super::rows::{ratio, Quantity, ResultRow, RowContext};

/// Tolerance of the exact Whitney lower bound, relative to `1 + Omega`.
pub const MARGIN_TOL: f64 = 1e-6;
/// Tolerance of `lower <= upper`, relative to `1 + upper`.
pub const BRACKET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Whitney,
    Johnen,
    Taylor,
    Lemma21,
    Modulus,
    Bestapprox,
    Kfunc,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Whitney => "whitney",
            Suite::Johnen => "johnen",
            Suite::Taylor => "taylor",
            Suite::Lemma21 => "lemma21",
            Suite::Modulus => "modulus",
            Suite::Bestapprox => "bestapprox",
            Suite::Kfunc => "kfunc",
        }
    }
}

/// Rows in enumeration order plus any hard-assertion failures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteOutput {
    pub rows: Vec<ResultRow>,
    pub violations: Vec<String>,
}

#[derive(Default)]
struct TaskOutput {
    rows: Vec<ResultRow>,
    violations: Vec<String>,
}

type Task = (FunctionSpec, MultiIndex, Exponent, Parallelepiped);

fn enumerate(cfg: &ExperimentConfig, filter: impl Fn(&FunctionSpec) -> bool) -> Vec<Task> {
    let mut tasks = Vec::new();
    for f in cfg.functions().into_iter().filter(|f| filter(f)) {
        let Some(q) = cfg.base_box(f.dim()) else {
            continue;
        };
        for r in cfg.orders_for(f.dim()) {
            for &p in &cfg.p_values {
                tasks.push((f.clone(), r.clone(), p, q.clone()));
            }
        }
    }
    tasks
}

fn run_tasks<T: Sync>(tasks: &[T], record: bool, job: impl Fn(&T) -> TaskOutput + Sync) -> SuiteOutput {
    let parts: Vec<TaskOutput> = tasks
        .par_iter()
        .map(|task| {
            let start = Instant::now();
            let mut out = job(task);
            if record {
                let ms = start.elapsed().as_millis() as u64;
                for row in &mut out.rows {
                    row.runtime_ms = ms;
                }
            }
            out
        })
        .collect();
    let mut output = SuiteOutput::default();
    for part in parts {
        output.rows.extend(part.rows);
        output.violations.extend(part.violations);
    }
    output
}

fn norm_of(f: &dyn Evaluate, q: &Parallelepiped, p: Exponent, cfg: &ExperimentConfig) -> f64 {
    lp_norm(|x| f.eval(x), q, p, &cfg.quad())
}

fn request<'a>(
    f: &'a FunctionSpec,
    r: &'a MultiIndex,
    t: &'a StepVector,
    p: Exponent,
    q: &'a Parallelepiped,
    quad: &'a crate::geometry::QuadratureSpec,
    cfg: &ExperimentConfig,
) -> ModulusRequest<'a> {
    ModulusRequest::new(f, r, SubsetMask::full(q.dim()), t, p, q, quad)
        .with_h_grid(cfg.resolutions.h_grid)
        .with_mean_nodes(cfg.resolutions.mean_nodes)
}

fn subset_tag(e: SubsetMask) -> String {
    let parts: Vec<String> = e.members().map(|i| (i + 1).to_string()).collect();
    format!("e{}", parts.join("+"))
}

fn shrink(q: &Parallelepiped, level: usize) -> Parallelepiped {
    q.shrink_from_lower(0.5f64.powi(level as i32))
}

pub fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> SuiteOutput {
    match suite {
        Suite::Whitney => run_whitney(cfg),
        Suite::Johnen => run_johnen(cfg),
        Suite::Taylor => run_taylor(cfg),
        Suite::Lemma21 => run_lemma21(cfg),
        Suite::Modulus => run_modulus(cfg),
        Suite::Bestapprox => run_bestapprox(cfg),
        Suite::Kfunc => run_kfunc(cfg),
    }
}

/// `E_r`, `Omega_r`, `W_r` at `t = delta(Q_k)` over the shrink levels, with the
/// exact lower-bound margin `Omega - prod(1 + 2^{r_i}) E`.
pub fn run_whitney(cfg: &ExperimentConfig) -> SuiteOutput {
    let tasks: Vec<(Task, usize)> = enumerate(cfg, |_| true)
        .into_iter()
        .flat_map(|task| (0..=cfg.shrink_levels).map(move |k| (task.clone(), k)))
        .collect();
    let quad = cfg.quad();
    let fit = cfg.fit_config();
    run_tasks(&tasks, cfg.record_runtime, |((f, r, p, q), level)| {
        let qk = shrink(q, *level);
        let delta = qk.size();
        let ctx = RowContext::new(f.id(), r, *p, &qk);
        let mut out = TaskOutput::default();
        let result = (|| -> Result<(), String> {
            let e = best_approx(f, r, *p, &qk, &fit).map_err(|e| e.to_string())?.error;
            let req = request(f, r, &delta, *p, &qk, &quad, cfg);
            let omega = total_modulus(&req).map_err(|e| e.to_string())?;
            let w = total_p_mean_modulus(&req).map_err(|e| e.to_string())?;
            let margin = omega - whitney_lower_constant(r) * e;
            if margin > MARGIN_TOL * (1.0 + omega) {
                out.violations.push(format!(
                    "whitney lower bound violated: {} r={r} p={p} box={qk}: margin {margin}",
                    f.id()
                ));
            }
            let scale = norm_of(f, &qk, *p, cfg);
            out.rows.extend([
                ctx.row("whitney", &delta, Quantity::BestError, Some(e)),
                ctx.row("whitney", &delta, Quantity::TotalModulus, Some(omega)),
                ctx.row("whitney", &delta, Quantity::TotalMeanModulus, Some(w)),
                ctx.row("whitney", &delta, Quantity::Margin, Some(margin)),
                ctx.row("whitney.E_over_Omega", &delta, Quantity::Ratio, ratio(e, omega, scale)),
                ctx.row("whitney.E_over_W", &delta, Quantity::Ratio, ratio(e, w, scale)),
                ctx.row("whitney.W_over_Omega", &delta, Quantity::Ratio, ratio(w, omega, scale)),
            ]);
            Ok(())
        })();
        if let Err(msg) = result {
            out.rows.push(ctx.error("whitney", &delta, &msg));
        }
        out
    })
}

/// Log-spaced steps from `t_bar` down to `t_span * t_bar`.
pub fn t_sweep(t_bar: &StepVector, count: usize, span: f64) -> Vec<StepVector> {
    (0..count)
        .map(|j| {
            let frac = if count == 1 { 0.0 } else { j as f64 / (count - 1) as f64 };
            t_bar.scale(span.powf(frac))
        })
        .collect()
}

/// K-functional brackets and `Omega_r` over a log-spaced `t` sweep below `t_bar`.
pub fn run_johnen(cfg: &ExperimentConfig) -> SuiteOutput {
    let tasks = enumerate(cfg, |_| true);
    run_tasks(&tasks, cfg.record_runtime, |(f, r, p, q)| {
        let ctx = RowContext::new(f.id(), r, *p, q);
        let mut out = TaskOutput::default();
        let sweep = t_sweep(&step_bounds(q, r), cfg.t_sweep, cfg.t_span);
        let brackets = match k_functional_sweep(f, r, &sweep, *p, q, |t| cfg.k_config_near(f, t)) {
            Ok(b) => b,
            Err(e) => {
                out.rows.push(ctx.error("johnen", &sweep[0], &e.to_string()));
                return out;
            }
        };
        let scale = norm_of(f, q, *p, cfg);
        for (t, b) in sweep.iter().zip(&brackets) {
            if b.lower > b.upper + BRACKET_TOL * (1.0 + b.upper) {
                out.violations.push(format!(
                    "K bracket inverted: {} r={r} p={p} t={t}: lower {} > upper {}",
                    f.id(),
                    b.lower,
                    b.upper
                ));
            }
            out.rows.extend([
                ctx.row("johnen", t, Quantity::KLower, Some(b.lower)),
                ctx.row("johnen", t, Quantity::KUpper, Some(b.upper)),
                ctx.row("johnen", t, Quantity::TotalModulus, Some(b.omega)),
                ctx.row("johnen.upper_over_Omega", t, Quantity::Ratio, ratio(b.upper, b.omega, scale)),
                ctx.row(
                    "johnen.lower_check",
                    t,
                    Quantity::Ratio,
                    ratio(b.lower * whitney_lower_constant(r), b.omega, scale),
                ),
            ]);
            if !b.subdomains.is_empty() {
                let residual: f64 = b.subdomains.iter().map(|s| s.residual).sum();
                out.rows.push(ctx.row(
                    "johnen.residual_over_Omega",
                    t,
                    Quantity::Ratio,
                    ratio(residual, b.omega, scale),
                ));
                for (e, omega_e) in &b.omega_terms {
                    let weighted: f64 = b
                        .subdomains
                        .iter()
                        .flat_map(|s| s.derivatives.iter())
                        .filter(|(e2, _)| e2 == e)
                        .map(|(_, v)| v)
                        .sum();
                    out.rows.push(ctx.row(
                        &format!("johnen.derivative_over_omega.{}", subset_tag(*e)),
                        t,
                        Quantity::Ratio,
                        ratio(weighted, *omega_e, scale),
                    ));
                }
            }
        }
        out
    })
}

/// `||f - T_r f||` against the remainder bound over the shrink levels, for
/// Sobolev entries; the Taylor anchor is the lower corner of each box.
pub fn run_taylor(cfg: &ExperimentConfig) -> SuiteOutput {
    let tasks: Vec<(Task, usize)> = enumerate(cfg, FunctionSpec::is_sobolev)
        .into_iter()
        .flat_map(|task| (0..=cfg.shrink_levels).map(move |k| (task.clone(), k)))
        .collect();
    let quad = cfg.quad();
    run_tasks(&tasks, cfg.record_runtime, |((f, r, p, q), level)| {
        let qk = shrink(q, *level);
        let delta = qk.size();
        let ctx = RowContext::new(f.id(), r, *p, &qk);
        let mut out = TaskOutput::default();
        let result = (|| -> Result<(), String> {
            let tp = taylor_poly(f, r, qk.lower(), &qk).map_err(|e| e.to_string())?;
            let err = lp_norm(|x| f.eval(x) - tp.evaluate(x), &qk, *p, &quad);
            let bound = taylor_remainder_bound(f, r, *p, &qk, &quad).map_err(|e| e.to_string())?;
            let scale = norm_of(f, &qk, *p, cfg);
            out.rows.extend([
                ctx.row("taylor", &delta, Quantity::TaylorError, Some(err)),
                ctx.row("taylor", &delta, Quantity::TaylorBound, Some(bound)),
                ctx.row("taylor.err_over_bound", &delta, Quantity::Ratio, ratio(err, bound, scale)),
            ]);
            Ok(())
        })();
        if let Err(msg) = result {
            out.rows.push(ctx.error("taylor", &delta, &msg));
        }
        out
    })
}

/// Derivative-inequality ratios for `d = 1` Sobolev entries with
/// `t = delta / 2^j`, followed by subdivision ratios with `t = delta / 2^{j+1}`.
pub fn run_lemma21(cfg: &ExperimentConfig) -> SuiteOutput {
    let levels = cfg.shrink_levels;
    let derivative_tasks: Vec<(Task, usize)> =
        enumerate(cfg, |f| f.dim() == 1 && f.is_sobolev())
            .into_iter()
            .flat_map(|task| (0..=levels).map(move |j| (task.clone(), j)))
            .collect();
    let quad = cfg.quad();
    let mut output = run_tasks(&derivative_tasks, cfg.record_runtime, |((f, r, p, q), j)| {
        let delta = q.size();
        let t = delta.scale(0.5f64.powi(*j as i32));
        let ctx = RowContext::new(f.id(), r, *p, q);
        let mut out = TaskOutput::default();
        let result = (|| -> Result<(), String> {
            let k_top = r.get(0);
            let top = f.derivative_fn(r).map_err(|e| e.to_string())?;
            let tv = t.get(0);
            let denom = norm_of(f, q, *p, cfg) + tv.powi(k_top as i32) * norm_of(&top, q, *p, cfg);
            for k in 0..k_top {
                let dk = f
                    .derivative_fn(&MultiIndex::new(vec![k]))
                    .map_err(|e| e.to_string())?;
                let norm_p = norm_of(&dk, q, *p, cfg);
                let norm_inf = lp_norm(|x| dk.eval(x), q, Exponent::INFINITY, &quad);
                let first = tv.powi(k as i32) * norm_p;
                let second = tv.powf(k as f64 + p.reciprocal()) * norm_inf;
                out.rows.extend([
                    ctx.row(&format!("lemma21.first.k{k}"), &t, Quantity::Ratio, ratio(first, denom, 0.0)),
                    ctx.row(&format!("lemma21.second.k{k}"), &t, Quantity::Ratio, ratio(second, denom, 0.0)),
                ]);
            }
            Ok(())
        })();
        if let Err(msg) = result {
            out.rows.push(ctx.error("lemma21", &t, &msg));
        }
        out
    });

    let subdivision_tasks: Vec<(Task, usize)> = enumerate(cfg, |_| true)
        .into_iter()
        .flat_map(|task| (0..=levels).map(move |j| (task.clone(), j)))
        .collect();
    let sub = run_tasks(&subdivision_tasks, cfg.record_runtime, |((f, r, p, q), j)| {
        let t = q.size().scale(0.5f64.powi(*j as i32 + 1));
        let kcfg = cfg.k_config_near(f, &t);
        let ctx = RowContext::new(f.id(), r, *p, q);
        let mut out = TaskOutput::default();
        match subdivision_check(f, r, &t, *p, q, &kcfg) {
            Ok(rep) => {
                for (_, b) in std::iter::once(&(SubsetMask::full(q.dim()), rep.whole.clone())).chain(rep.parts.iter()) {
                    if b.lower > b.upper + BRACKET_TOL * (1.0 + b.upper) {
                        out.violations.push(format!(
                            "K bracket inverted: {} r={r} p={p} t={t}: lower {} > upper {}",
                            f.id(),
                            b.lower,
                            b.upper
                        ));
                    }
                }
                out.rows.push(ctx.row("lemma31.whole_over_parts", &t, Quantity::Ratio, rep.ratio));
            }
            Err(e) => out.rows.push(ctx.error("lemma31", &t, &e.to_string())),
        }
        out
    });
    output.rows.extend(sub.rows);
    output.violations.extend(sub.violations);
    output
}

/// `omega`, `w` per subset and `Omega`, `W` at `t` (default `delta(Q)`).
pub fn run_modulus(cfg: &ExperimentConfig) -> SuiteOutput {
    let tasks = enumerate(cfg, |_| true);
    run_tasks(&tasks, cfg.record_runtime, |(f, r, p, q)| {
        let t = cfg.step_or(q.size());
        let quad = cfg.quad_near(f, &t);
        let ctx = RowContext::new(f.id(), r, *p, q);
        let mut out = TaskOutput::default();
        let result = (|| -> Result<(), String> {
            let req = request(f, r, &t, *p, q, &quad, cfg);
            for e in SubsetMask::nonempty(q.dim()) {
                let sub = req.with_subset(e);
                let name = format!("modulus.{}", subset_tag(e));
                let om = modulus(&sub).map_err(|e| e.to_string())?;
                let w = p_mean_modulus(&sub).map_err(|e| e.to_string())?;
                out.rows.push(ctx.row(&name, &t, Quantity::Modulus, Some(om)));
                out.rows.push(ctx.row(&name, &t, Quantity::MeanModulus, Some(w)));
            }
            let omega = total_modulus(&req).map_err(|e| e.to_string())?;
            let w = total_p_mean_modulus(&req).map_err(|e| e.to_string())?;
            out.rows.push(ctx.row("modulus", &t, Quantity::TotalModulus, Some(omega)));
            out.rows.push(ctx.row("modulus", &t, Quantity::TotalMeanModulus, Some(w)));
            Ok(())
        })();
        if let Err(msg) = result {
            out.rows.push(ctx.error("modulus", &t, &msg));
        }
        out
    })
}

/// `E_r(f)_{p,Q}` on the base box.
pub fn run_bestapprox(cfg: &ExperimentConfig) -> SuiteOutput {
    let tasks = enumerate(cfg, |_| true);
    let fit = cfg.fit_config();
    run_tasks(&tasks, cfg.record_runtime, |(f, r, p, q)| {
        let delta = q.size();
        let ctx = RowContext::new(f.id(), r, *p, q);
        let row = match best_approx(f, r, *p, q, &fit) {
            Ok(b) => ctx.row("bestapprox", &delta, Quantity::BestError, Some(b.error)),
            Err(e) => ctx.error("bestapprox", &delta, &e.to_string()),
        };
        TaskOutput {
            rows: vec![row],
            violations: Vec::new(),
        }
    })
}

/// One K-functional bracket at `t` (default `t_bar`).
pub fn run_kfunc(cfg: &ExperimentConfig) -> SuiteOutput {
    let tasks = enumerate(cfg, |_| true);
    run_tasks(&tasks, cfg.record_runtime, |(f, r, p, q)| {
        let t = cfg.step_or(step_bounds(q, r));
        let kcfg = cfg.k_config_near(f, &t);
        let ctx = RowContext::new(f.id(), r, *p, q);
        let mut out = TaskOutput::default();
        match k_functional_bracket(f, r, &t, *p, q, &kcfg) {
            Ok(b) => {
                if b.lower > b.upper + BRACKET_TOL * (1.0 + b.upper) {
                    out.violations.push(format!(
                        "K bracket inverted: {} r={r} p={p} t={t}: lower {} > upper {}",
                        f.id(),
                        b.lower,
                        b.upper
                    ));
                }
                let name = format!("kfunc.{}", b.witness);
                out.rows.extend([
                    ctx.row(&name, &t, Quantity::KLower, Some(b.lower)),
                    ctx.row(&name, &t, Quantity::KUpper, Some(b.upper)),
                    ctx.row(&name, &t, Quantity::TotalModulus, Some(b.omega)),
                ]);
            }
            Err(e) => out.rows.push(ctx.error("kfunc", &t, &e.to_string())),
        }
        out
    })
}
