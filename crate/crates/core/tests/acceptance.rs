//! Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use whitney_lab::differences::{modulus, p_mean_modulus, total_modulus, total_p_mean_modulus, ModulusRequest};
use whitney_lab::functions::{corpus, Evaluate, FunctionSpec};
use whitney_lab::geometry::{Exponent, MultiIndex, Parallelepiped, QuadratureSpec, StepVector, SubsetMask};
use whitney_lab::harness::{
    run_johnen, run_lemma21, run_taylor, run_whitney, ExperimentConfig, Quantity, ResultRow, SuiteOutput,
};
use whitney_lab::polyapprox::{best_approx, equioscillation_count, FitConfig};
use whitney_lab::smoother::{
    smooth_mixed_oriented, smooth_univariate, smoothed_derivative_oriented, step_bounds, Orientation,
    SmootherConfig,
};

const PS: [Exponent; 3] = [Exponent::ONE, Exponent::TWO, Exponent::INFINITY];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).expect("acceptance config is valid")
}

fn orders(d: usize) -> Vec<MultiIndex> {
    match d {
        1 => (1..=3).map(|k| MultiIndex::new(vec![k])).collect(),
        _ => (1..=3)
            .flat_map(|a| (1..=3).map(move |b| MultiIndex::new(vec![a, b])))
            .collect(),
    }
}

fn error_rows(rows: &[ResultRow]) -> usize {
    rows.iter().filter(|r| r.quantity == Quantity::Error).count()
}

type SeriesKey = (String, String, String, String);

/// Values of one experiment grouped per (experiment, f, r, p), in row order.
fn series(rows: &[ResultRow], keep: impl Fn(&ResultRow) -> bool) -> BTreeMap<SeriesKey, Vec<Option<f64>>> {
    let mut out: BTreeMap<SeriesKey, Vec<Option<f64>>> = BTreeMap::new();
    for row in rows.iter().filter(|r| keep(r)) {
        out.entry((row.experiment.clone(), row.function_id.clone(), row.r.clone(), row.p.clone()))
            .or_default()
            .push(row.value);
    }
    out
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn key_label(k: &SeriesKey) -> String {
    format!("{} r={} p={}", k.1, k.2, k.3)
}

// Criterion 1: Omega <= prod(1 + 2^{r_i}) E + 1e-6 (1 + Omega).
fn whitney_margin(runs: &[SuiteOutput]) -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let mut errors = 0;
    for run in runs {
        errors += error_rows(&run.rows);
        let omegas = series(&run.rows, |r| r.experiment == "whitney" && r.quantity == Quantity::TotalModulus);
        let margins = series(&run.rows, |r| r.experiment == "whitney" && r.quantity == Quantity::Margin);
        for (key, m) in &margins {
            let o = &omegas[key];
            for (m, o) in m.iter().zip(o) {
                let (m, o) = (m.unwrap_or(f64::NAN), o.unwrap_or(f64::NAN));
                checked += 1;
                let rel = m / (1.0 + o);
                worst = worst.max(rel);
                if !(rel <= 1e-6) {
                    bad.push(key_label(key));
                }
            }
        }
    }
    bad.dedup();
    verdict(
        bad.is_empty() && errors == 0 && checked > 0,
        format!(
            "{checked} (f, r, p, level) rows, {} violations, {errors} error rows, max margin/(1+Omega) {worst:.3e}{}",
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(" [{}]", bad.join("; ")) }
        ),
    )
}

// Criterion 2: E_r, Omega_r and W_r vanish on P_r.
fn annihilation() -> Verdict {
    let quad = QuadratureSpec::uniform(16, 33).unwrap();
    let fit = FitConfig::new(quad.clone());
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut worst_e: f64 = 0.0;
    let mut worst_m: f64 = 0.0;
    for f in corpus().iter().filter(|f| f.polynomial_extents().is_some()) {
        let d = f.dim();
        let boxes = [Parallelepiped::unit(d), Parallelepiped::cube(d, -0.75, 0.5).unwrap()];
        for r in orders(d).iter().filter(|r| f.is_in_polynomial_space(r)) {
            for q in &boxes {
                let t = q.size();
                for p in PS {
                    let e = match best_approx(f, r, p, q, &fit) {
                        Ok(b) => b.error,
                        Err(err) => {
                            bad.push(format!("{} r={r} p={p}: {err}", f.id()));
                            continue;
                        }
                    };
                    let req = ModulusRequest::new(f, r, SubsetMask::full(d), &t, p, q, &quad).with_h_grid(9);
                    let om = total_modulus(&req).unwrap_or(f64::NAN);
                    let w = total_p_mean_modulus(&req).unwrap_or(f64::NAN);
                    let e_tol = if p == Exponent::TWO { 1e-10 } else { 1e-8 };
                    checked += 1;
                    worst_e = worst_e.max(e);
                    worst_m = worst_m.max(om).max(w);
                    if !(e <= e_tol && om <= 1e-10 && w <= 1e-10) {
                        bad.push(format!("{} r={r} p={p} box={q}: E={e:e} Omega={om:e} W={w:e}", f.id()));
                    }
                }
            }
        }
    }
    verdict(
        bad.is_empty() && checked > 0,
        format!(
            "{checked} cases, max E {worst_e:.1e}, max Omega/W {worst_m:.1e}{}",
            if bad.is_empty() { String::new() } else { format!(" [{}]", bad.join("; ")) }
        ),
    )
}

// Criterion 3: closed-form cases to 1e-4.
fn analytic_oracles() -> Verdict {
    let quad = QuadratureSpec::default();
    let fit = FitConfig::new(quad.clone());
    let x = FunctionSpec::monomial(&[1]);
    let r1 = MultiIndex::new(vec![1]);
    let unit = Parallelepiped::unit(1);
    let one = StepVector::new(vec![1.0]);
    let mut results: Vec<(&str, f64, f64)> = Vec::new();

    let e_inf = best_approx(&x, &r1, Exponent::INFINITY, &unit, &fit).unwrap().error;
    results.push(("E(x, r=1, inf)", e_inf, 0.5));
    let req = ModulusRequest::new(&x, &r1, SubsetMask::full(1), &one, Exponent::INFINITY, &unit, &quad);
    results.push(("omega(x, 1, inf)", modulus(&req).unwrap(), 1.0));
    let e_two = best_approx(&x, &r1, Exponent::TWO, &unit, &fit).unwrap().error;
    results.push(("E(x, r=1, 2)", e_two, (1.0f64 / 12.0).sqrt()));
    let req = ModulusRequest::new(&x, &r1, SubsetMask::full(1), &one, Exponent::ONE, &unit, &quad);
    results.push(("w(x, 1, 1)", p_mean_modulus(&req).unwrap(), 1.0 / 3.0));

    let sq = FunctionSpec::monomial(&[2]);
    let sym = Parallelepiped::new(vec![-1.0], vec![1.0]).unwrap();
    let b = best_approx(&sq, &MultiIndex::new(vec![2]), Exponent::INFINITY, &sym, &fit).unwrap();
    results.push(("E(x^2, r=2, inf)", b.error, 0.5));
    let level = b.discrete_error.unwrap_or(b.error);
    let alternations = equioscillation_count(&sq, &b.poly, &sym, level, 1e-6, 2001);

    let xy = FunctionSpec::monomial(&[1, 1]);
    let r11 = MultiIndex::splat(2, 1);
    let sq2 = Parallelepiped::unit(2);
    let t11 = StepVector::splat(2, 1.0);
    let req = ModulusRequest::new(&xy, &r11, SubsetMask::full(2), &t11, Exponent::INFINITY, &sq2, &quad);
    results.push(("Omega(x1 x2, (1,1), inf)", total_modulus(&req).unwrap(), 3.0));

    let worst = results.iter().map(|(_, got, want)| (got - want).abs()).fold(0.0, f64::max);
    let misses: Vec<String> = results
        .iter()
        .filter(|(_, got, want)| !((got - want).abs() <= 1e-4))
        .map(|(name, got, want)| format!("{name} = {got} (want {want})"))
        .collect();
    let pass = misses.is_empty() && alternations >= 3;
    verdict(
        pass,
        format!(
            "{} values, max abs error {worst:.1e}, x^2 equioscillation points {alternations}{}",
            results.len(),
            if misses.is_empty() { String::new() } else { format!(" [{}]", misses.join("; ")) }
        ),
    )
}

/// Fornberg weights for the `m`-th derivative at 0 on `offsets`.
fn fd_weights(m: usize, offsets: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Tensor finite-difference derivative of order `k` with 13-point stencils.
fn fd_derivative(g: &dyn Evaluate, k: &MultiIndex, x: &[f64], h: f64) -> f64 {
    let offs: Vec<f64> = (-6..=6).map(|j| j as f64).collect();
    let axes: Vec<Vec<(f64, f64)>> = (0..k.dim())
        .map(|i| {
            if k.get(i) == 0 {
                vec![(0.0, 1.0)]
            } else {
                let scale = h.powi(k.get(i) as i32);
                offs.iter()
                    .zip(fd_weights(k.get(i), &offs))
                    .map(|(o, w)| (o * h, w / scale))
                    .collect()
            }
        })
        .collect();
    let mut acc = 0.0;
    let mut idx = vec![0usize; axes.len()];
    let mut y = vec![0.0; x.len()];
    loop {
        let mut w = 1.0;
        for (i, a) in axes.iter().enumerate() {
            y[i] = x[i] + a[idx[i]].0;
            w *= a[idx[i]].1;
        }
        acc += w * g.eval(&y);
        let mut axis = axes.len();
        loop {
            if axis == 0 {
                return acc;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                break;
            }
            idx[axis] = 0;
        }
    }
}

fn orientations(d: usize) -> Vec<Vec<Orientation>> {
    (0..1usize << d)
        .map(|bits| {
            (0..d)
                .map(|i| if bits >> i & 1 == 1 { Orientation::Backward } else { Orientation::Forward })
                .collect()
        })
        .collect()
}

// Criterion 4: reproduction, derivative identity and the k = 1 linear case.
fn smoother_correctness() -> Verdict {
    let cfg = SmootherConfig::default();
    let mut problems = Vec::new();
    let mut worst_repro: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    let mut worst_linear: f64 = 0.0;

    for d in [1usize, 2] {
        let q = match d {
            1 => Parallelepiped::new(vec![-1.0], vec![1.0]).unwrap(),
            _ => Parallelepiped::new(vec![-1.0, 0.5], vec![1.0, 2.0]).unwrap(),
        };
        for r in orders(d) {
            let coeffs: Vec<f64> = (0..r.box_volume()).map(|j| 1.0 - 0.3 * j as f64).collect();
            let phi = FunctionSpec::tensor_polynomial("phi", r.clone(), coeffs);
            let t = step_bounds(&q, &r);
            for orient in orientations(d) {
                let g = smooth_mixed_oriented(&phi, &r, &t, &q, &orient, &cfg).unwrap();
                QuadratureSpec::uniform(4, 9).unwrap().sup_grid(g.valid_domain()).for_each(|x, _| {
                    worst_repro = worst_repro.max((g.eval(x) - phi.eval(x)).abs());
                });
            }
        }
    }
    if !(worst_repro <= 1e-9) {
        problems.push(format!("reproduction error {worst_repro:e}"));
    }

    // side 2 keeps t_bar large enough that the identity's cancellation stays
    // far below the tolerance
    for d in [1usize, 2] {
        let q = Parallelepiped::cube(d, 0.0, 2.0).unwrap();
        let funcs: Vec<FunctionSpec> = corpus()
            .into_iter()
            .filter(|f| f.dim() == d && (f.id().starts_with("exp") || f.id().starts_with("sin")))
            .collect();
        for f in &funcs {
            for r in orders(d) {
                let t = step_bounds(&q, &r);
                for orient in [vec![Orientation::Forward; d], vec![Orientation::Backward; d]] {
                    let g = smooth_mixed_oriented(f, &r, &t, &q, &orient, &cfg).unwrap();
                    let dom = g.valid_domain().clone();
                    for e in SubsetMask::nonempty(d) {
                        let k = e.project(&r);
                        let dg = smoothed_derivative_oriented(f, &r, &t, e, &q, &orient, &cfg).unwrap();
                        for s in 0..10 {
                            let u = [0.2 + 0.06 * s as f64, 0.75 - 0.05 * s as f64];
                            let x = dom.from_unit(&u[..d]);
                            let exact = dg.eval(&x);
                            let approx = fd_derivative(&g, &k, &x, 0.08);
                            let rel = (exact - approx).abs() / exact.abs().max(1e-3);
                            worst_fd = worst_fd.max(rel);
                            if !(rel <= 1e-5) {
                                problems.push(format!("{} r={r} e={e}: fd mismatch {rel:e}", f.id()));
                            }
                        }
                    }
                }
            }
        }
    }

    let line = FunctionSpec::monomial(&[1]);
    let unit = Parallelepiped::unit(1);
    for t in [0.01, 0.1, 0.25] {
        let g = smooth_univariate(&line, 1, t, 0, &unit, &cfg).unwrap();
        for i in 0..=10 {
            let x = 0.075 * i as f64;
            worst_linear = worst_linear.max((g.eval(&[x]) - (x + t / 2.0)).abs());
        }
    }
    if !(worst_linear <= 1e-10) {
        problems.push(format!("P^1_t x differs from x + t/2 by {worst_linear:e}"));
    }
    problems.dedup();
    verdict(
        problems.is_empty(),
        format!(
            "reproduction {worst_repro:.1e}, derivative vs finite differences {worst_fd:.1e} relative, P^1_t x {worst_linear:.1e}{}",
            if problems.is_empty() { String::new() } else { format!(" [{}]", problems.join("; ")) }
        ),
    )
}

// Criterion 5: lower <= upper everywhere and upper/Omega max/min <= 10 per (f, r, p).
fn johnen_stability(runs: &[SuiteOutput]) -> Verdict {
    let mut inverted = 0;
    let mut errors = 0;
    let mut checked = 0;
    let mut not_applicable = 0;
    let mut failing = Vec::new();
    let mut worst = (0.0f64, String::new());
    for run in runs {
        inverted += run.violations.len();
        errors += error_rows(&run.rows);
        let lowers = series(&run.rows, |r| r.experiment == "johnen" && r.quantity == Quantity::KLower);
        let uppers = series(&run.rows, |r| r.experiment == "johnen" && r.quantity == Quantity::KUpper);
        for (key, lo) in &lowers {
            for (l, u) in lo.iter().zip(&uppers[key]) {
                let (l, u) = (l.unwrap_or(f64::NAN), u.unwrap_or(f64::NAN));
                if !(l <= u + 1e-9 * (1.0 + u)) {
                    inverted += 1;
                }
            }
        }
        for (key, vals) in series(&run.rows, |r| r.experiment == "johnen.upper_over_Omega") {
            let v: Vec<f64> = vals.iter().flatten().copied().collect();
            if v.is_empty() {
                not_applicable += 1;
                continue;
            }
            checked += 1;
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let spread = max / min;
            if spread > worst.0 || spread.is_nan() {
                worst = (spread, key_label(&key));
            }
            if !(spread <= 10.0) {
                failing.push(format!("{} max/min {spread:.2}", key_label(&key)));
            }
        }
    }
    verdict(
        inverted == 0 && errors == 0 && failing.is_empty() && checked > 0,
        format!(
            "{inverted} inverted brackets, {errors} error rows; {checked} (f, r, p) sweeps ({not_applicable} not applicable), \
             {} with max/min > 10, worst {:.2} at {}{}",
            failing.len(),
            worst.0,
            worst.1,
            if failing.is_empty() { String::new() } else { format!(" [{}]", failing.join("; ")) }
        ),
    )
}

// Criterion 6: Taylor ratio within 20% of its median; e^x reference ratio.
fn taylor_stability(run: &SuiteOutput) -> Verdict {
    let errors = error_rows(&run.rows);
    let mut checked = 0;
    let mut failing = Vec::new();
    let mut worst = (0.0f64, String::new());
    for (key, vals) in series(&run.rows, |r| r.experiment == "taylor.err_over_bound") {
        let v: Vec<f64> = vals.iter().flatten().copied().collect();
        if v.is_empty() {
            continue;
        }
        checked += 1;
        let m = median(&v);
        let dev = if v.len() < vals.len() {
            f64::INFINITY
        } else {
            v.iter().map(|x| (x / m - 1.0).abs()).fold(0.0, f64::max)
        };
        if dev > worst.0 {
            worst = (dev, key_label(&key));
        }
        if !(dev <= 0.2) {
            failing.push(key_label(&key));
        }
    }
    let reference = (std::f64::consts::E - 2.0) / std::f64::consts::E;
    let exp_ratio = run
        .rows
        .iter()
        .find(|r| {
            r.experiment == "taylor.err_over_bound" && r.function_id == "exp_d1" && r.r == "2" && r.p == "inf"
        })
        .and_then(|r| r.value)
        .unwrap_or(f64::NAN);
    let exp_ok = (exp_ratio - reference).abs() <= 1e-3;
    verdict(
        failing.is_empty() && exp_ok && errors == 0 && checked > 0,
        format!(
            "{checked} Sobolev (f, r, p) sweeps, {} outside +-20% of their median (worst {:.1}% at {}); \
             e^x r=(2) p=inf ratio {exp_ratio:.6} vs (e-2)/e = {reference:.6} {}",
            failing.len(),
            100.0 * worst.0,
            worst.1,
            if exp_ok { "ok" } else { "MISMATCH" }
        ),
    )
}

// Criterion 7: W <= Omega + 1e-8 for all p; |W - Omega| <= 1e-6 (1 + Omega) at p = inf.
fn w_against_omega(runs: &[SuiteOutput]) -> Verdict {
    let mut above: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut worst_ratio: f64 = 0.0;
    let mut inf_mismatch = 0;
    for run in runs {
        let omegas = series(&run.rows, |r| r.experiment == "whitney" && r.quantity == Quantity::TotalModulus);
        let ws = series(&run.rows, |r| r.experiment == "whitney" && r.quantity == Quantity::TotalMeanModulus);
        for (key, om) in &omegas {
            for (o, w) in om.iter().zip(&ws[key]) {
                let (o, w) = (o.unwrap_or(f64::NAN), w.unwrap_or(f64::NAN));
                let entry = above.entry(key.3.clone()).or_default();
                entry.1 += 1;
                if !(w <= o + 1e-8) {
                    entry.0 += 1;
                    if o > 1e-8 {
                        worst_ratio = worst_ratio.max(w / o);
                    }
                }
                if key.3 == "inf" && !((w - o).abs() <= 1e-6 * (1.0 + o)) {
                    inf_mismatch += 1;
                }
            }
        }
    }
    let violations: usize = above.values().map(|v| v.0).sum();
    let per_p: Vec<String> = above
        .iter()
        .map(|(p, (bad, n))| format!("p={p}: {bad}/{n} rows with W > Omega"))
        .collect();
    verdict(
        violations == 0 && inf_mismatch == 0 && !above.is_empty(),
        format!(
            "{}; worst W/Omega {worst_ratio:.3}; p=inf coincidence mismatches {inf_mismatch}",
            per_p.join(", ")
        ),
    )
}

// Criterion 8: derivative-inequality and subdivision ratios finite, last level <= 2x median.
fn lemma_constants(run: &SuiteOutput) -> Verdict {
    let errors = error_rows(&run.rows);
    let mut checked = 0;
    let mut failing = Vec::new();
    for (key, vals) in series(&run.rows, |r| r.quantity == Quantity::Ratio) {
        let v: Vec<f64> = vals.iter().flatten().copied().collect();
        if v.is_empty() {
            continue;
        }
        checked += 1;
        let m = median(&v);
        let last = vals.last().copied().flatten().unwrap_or(f64::NAN);
        let finite = v.iter().all(|x| x.is_finite()) && v.len() == vals.len();
        if !(finite && last <= 2.0 * m) {
            failing.push(format!("{} {}: last {last:.4} vs median {m:.4}", key.0, key_label(&key)));
        }
    }
    verdict(
        failing.is_empty() && errors == 0 && run.violations.is_empty() && checked > 0,
        format!(
            "{checked} ratio sweeps, {} with last > 2x median, {errors} error rows, {} inverted brackets{}",
            failing.len(),
            run.violations.len(),
            if failing.is_empty() { String::new() } else { format!(" [{}]", failing.join("; ")) }
        ),
    )
}

// Criterion 9: identical config gives byte-identical CSV across two runs.
fn determinism() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg_path = dir.path().join("config.json");
    std::fs::write(
        &cfg_path,
        r#"{"function_ids": ["exp_d1", "abspow_d1", "runge_d2", "abspow_d2"],
            "orders": [[2], [1, 2]], "p_values": [1, 2, "inf"], "shrink_levels": 2, "t_sweep": 4,
            "resolutions": {"h_grid": 9, "quad_nodes": 12, "linf_points": 17, "mean_nodes": 6,
                            "knot_nodes": 4, "graded_panel_nodes": 4}}"#,
    )
    .unwrap();
    let exe = env!("CARGO_BIN_EXE_whitney-lab");
    let mut compared = 0;
    let mut different = Vec::new();
    for sub in ["whitney", "johnen", "taylor"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{sub}-{run}.csv"));
            let status = Command::new(exe)
                .args([sub, "--config"])
                .arg(&cfg_path)
                .arg("--out")
                .arg(&out)
                .status()
                .expect("run the binary");
            outputs.push((status.code(), std::fs::read(&out).unwrap_or_default()));
        }
        compared += outputs[0].1.len();
        if outputs[0] != outputs[1] || outputs[0].1.is_empty() {
            different.push(sub);
        }
    }
    verdict(
        different.is_empty(),
        format!(
            "whitney, johnen and taylor CSV compared twice ({compared} bytes){}",
            if different.is_empty() { String::new() } else { format!(" [differs: {}]", different.join(", ")) }
        ),
    )
}

fn report(id: usize, title: &str, start: Instant, v: &Verdict) {
    println!(
        "criterion {id} {}: {title}: {} ({:.1}s)",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail,
        start.elapsed().as_secs_f64()
    );
    std::io::stdout().flush().ok();
}

fn main() {
    let mut passed = 0;
    let mut tally = |id: usize, title: &str, start: Instant, v: Verdict| {
        report(id, title, start, &v);
        if v.pass {
            passed += 1;
        }
    };

    let start = Instant::now();
    let whitney = [
        run_whitney(&config(
            r#"{"dimensions": [1], "orders": [[1], [2], [3]], "p_values": [1, 2, "inf"], "shrink_levels": 4,
                "resolutions": {"h_grid": 17, "quad_nodes": 16, "linf_points": 33, "mean_nodes": 8}}"#,
        )),
        run_whitney(&config(
            r#"{"dimensions": [2], "orders": [[1,1],[1,2],[1,3],[2,1],[2,2],[2,3],[3,1],[3,2],[3,3]],
                "p_values": [1, 2, "inf"], "shrink_levels": 4,
                "resolutions": {"h_grid": 9, "quad_nodes": 16, "linf_points": 17, "mean_nodes": 6}}"#,
        )),
    ];
    tally(1, "exact lower Whitney bound", start, whitney_margin(&whitney));

    let start = Instant::now();
    tally(2, "annihilation of P_r", start, annihilation());

    let start = Instant::now();
    tally(3, "analytic oracle cases", start, analytic_oracles());

    let start = Instant::now();
    tally(4, "smoother correctness", start, smoother_correctness());

    let start = Instant::now();
    let johnen = [
        run_johnen(&config(
            r#"{"dimensions": [1], "orders": [[1], [2], [3]], "p_values": [1, 2, "inf"], "t_sweep": 12,
                "resolutions": {"h_grid": 17, "quad_nodes": 16, "linf_points": 33, "mean_nodes": 8,
                                "knot_nodes": 4, "graded_panel_nodes": 8}}"#,
        )),
        run_johnen(&config(
            r#"{"dimensions": [2], "orders": [[1,1],[1,2],[1,3],[2,1],[2,2],[2,3],[3,1],[3,2],[3,3]],
                "p_values": [1, 2, "inf"], "t_sweep": 12,
                "resolutions": {"h_grid": 9, "quad_nodes": 12, "linf_points": 17, "mean_nodes": 6,
                                "knot_nodes": 4, "graded_panel_nodes": 4}}"#,
        )),
    ];
    tally(5, "K-functional bracket and stability", start, johnen_stability(&johnen));

    let start = Instant::now();
    let taylor = run_taylor(&config(
        r#"{"orders": [[1],[2],[3],[1,1],[1,2],[1,3],[2,1],[2,2],[2,3],[3,1],[3,2],[3,3]],
            "p_values": [1, 2, "inf"], "shrink_levels": 6,
            "resolutions": {"quad_nodes": 16, "linf_points": 33}}"#,
    ));
    tally(6, "Taylor remainder ratio", start, taylor_stability(&taylor));

    let start = Instant::now();
    tally(7, "W against Omega", start, w_against_omega(&whitney));

    let start = Instant::now();
    let lemma = run_lemma21(&config(
        r#"{"orders": [[1],[2],[3],[1,1],[2,2],[3,3]], "p_values": [1, 2, "inf"], "shrink_levels": 6,
            "resolutions": {"h_grid": 9, "quad_nodes": 12, "linf_points": 17, "mean_nodes": 6,
                            "knot_nodes": 4, "graded_panel_nodes": 4}}"#,
    ));
    tally(8, "derivative-inequality and subdivision constants", start, lemma_constants(&lemma));

    let start = Instant::now();
    tally(9, "determinism", start, determinism());

    println!("{passed} of 9 criteria passed");
    if passed != 9 {
        std::process::exit(1);
    }
}
