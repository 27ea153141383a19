//! Dense two-phase tableau simplex for small linear programs.
//!
//! Solves `min c.x` subject to `A x = b`, `x >= 0`. Pivoting is Dantzig's
//! rule; after a run of degenerate pivots it switches to Bland's rule until
//! the objective moves again.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    /// Constraint rows, each of length `cost.len()`.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Equality multipliers `y` with `A^T y <= c` at optimality.
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SimplexError {
    #[error("malformed linear program: {0}")]
    Malformed(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex did not converge within {limit} pivots")]
    IterationLimit {
        limit: usize,
        incumbent: Box<LpSolution>,
    },
}

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-11;
const DEGENERATE_RUN: usize = 32;

struct Tableau {
    m: usize,
    width: usize,
    /// `m` constraint rows then the objective row; last column is the rhs.
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may never enter (artificials during phase two).
    barred: Vec<bool>,
    /// Largest cost magnitude of the loaded objective.
    cost_scale: f64,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn obj_row(&self) -> usize {
        self.m
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for j in 0..w {
            self.data[row * w + j] /= p;
        }
        self.data[row * w + col] = 1.0;
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let factor = self.data[i * w + col];
            if factor == 0.0 {
                continue;
            }
            let target = &mut self.data[i * w..(i + 1) * w];
            for (t, pr) in target.iter_mut().zip(&pivot_row) {
                *t -= factor * pr;
            }
            target[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Loads the objective row `z_j = c_j - c_B^T T_j` for `cost`.
    fn set_objective(&mut self, cost: &[f64]) {
        self.cost_scale = cost.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
        let w = self.width;
        let obj = self.obj_row();
        for j in 0..w {
            self.data[obj * w + j] = if j < cost.len() { cost[j] } else { 0.0 };
        }
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..w {
                self.data[obj * w + j] -= cb * self.data[i * w + j];
            }
        }
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let obj = self.obj_row();
        let ncols = self.width - 1;
        let tol = COST_TOL * self.cost_scale;
        if bland {
            (0..ncols).find(|&j| !self.barred[j] && self.at(obj, j) < -tol)
        } else {
            let mut best = None;
            let mut best_val = -tol;
            for j in 0..ncols {
                let v = self.at(obj, j);
                if !self.barred[j] && v < best_val {
                    best_val = v;
                    best = Some(j);
                }
            }
            best
        }
    }

    /// Ratio test. Ties go to the largest pivot element, or to the lowest
    /// basis index under Bland's rule.
    fn leaving(&self, col: usize, bland: bool) -> Option<usize> {
        let col_max = (0..self.m).map(|i| self.at(i, col).abs()).fold(0.0, f64::max);
        let tol = PIVOT_TOL * col_max.max(1.0);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, col);
            if a <= tol {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                    let better = if tie {
                        if bland {
                            self.basis[i] < self.basis[bi]
                        } else {
                            a > self.at(bi, col)
                        }
                    } else {
                        ratio < br
                    };
                    if better {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn objective_value(&self) -> f64 {
        -self.rhs(self.obj_row())
    }

    /// Runs simplex iterations on the loaded objective.
    fn optimise(&mut self, used: &mut usize, limit: usize) -> Result<(), PhaseStop> {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let Some(col) = self.entering(bland) else {
                return Ok(());
            };
            let Some(row) = self.leaving(col, bland) else {
                return Err(PhaseStop::Unbounded);
            };
            if *used >= limit {
                return Err(PhaseStop::Limit);
            }
            let before = self.objective_value();
            self.pivot(row, col);
            *used += 1;
            if (self.objective_value() - before).abs() <= 1e-14 * (1.0 + before.abs()) {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
        }
    }
}

enum PhaseStop {
    Unbounded,
    Limit,
}

/// Solves `min cost.x` subject to `rows x = rhs`, `x >= 0`.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, SimplexError> {
    let n = lp.cost.len();
    let m = lp.rows.len();
    if lp.rhs.len() != m {
        return Err(SimplexError::Malformed(format!(
            "{m} rows but {} right-hand sides",
            lp.rhs.len()
        )));
    }
    if let Some(bad) = lp.rows.iter().position(|r| r.len() != n) {
        return Err(SimplexError::Malformed(format!(
            "row {bad} has {} entries, expected {n}",
            lp.rows[bad].len()
        )));
    }
    let finite = lp.cost.iter().chain(&lp.rhs).chain(lp.rows.iter().flatten()).all(|v| v.is_finite());
    if !finite {
        return Err(SimplexError::Malformed("non-finite coefficient".into()));
    }

    // flip rows so that b >= 0
    let sign: Vec<f64> = lp.rhs.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();

    // reuse unit columns with a +1 in a single row as the starting basis
    let mut start: Vec<Option<usize>> = vec![None; m];
    for j in 0..n {
        let mut row_hit = None;
        let mut ok = true;
        for i in 0..m {
            let v = sign[i] * lp.rows[i][j];
            if v == 0.0 {
                continue;
            }
            if v == 1.0 && row_hit.is_none() {
                row_hit = Some(i);
            } else {
                ok = false;
                break;
            }
        }
        if let (true, Some(i)) = (ok, row_hit) {
            if start[i].is_none() {
                start[i] = Some(j);
            }
        }
    }
    let artificial_rows: Vec<usize> = (0..m).filter(|&i| start[i].is_none()).collect();
    let n_art = artificial_rows.len();
    let ncols = n + n_art;
    let width = ncols + 1;
    let mut data = vec![0.0; (m + 1) * width];
    for i in 0..m {
        for j in 0..n {
            data[i * width + j] = sign[i] * lp.rows[i][j];
        }
        data[i * width + width - 1] = sign[i] * lp.rhs[i];
    }
    let mut basis = vec![0usize; m];
    for (k, &i) in artificial_rows.iter().enumerate() {
        data[i * width + n + k] = 1.0;
        basis[i] = n + k;
    }
    for i in 0..m {
        if let Some(j) = start[i] {
            basis[i] = j;
        }
    }
    // column that held the identity for each row, for reading off duals
    let identity_col = basis.clone();

    let mut tab = Tableau {
        m,
        width,
        data,
        basis,
        barred: vec![false; ncols],
        cost_scale: 1.0,
    };
    let limit = 50 * (n + m).max(1);
    let mut used = 0usize;

    let extract = |tab: &Tableau, used: usize| -> LpSolution {
        let mut x = vec![0.0; n];
        for i in 0..m {
            if tab.basis[i] < n {
                x[tab.basis[i]] = tab.rhs(i).max(0.0);
            }
        }
        let dual = (0..m)
            .map(|i| {
                let col = identity_col[i];
                let y: f64 = (0..m)
                    .map(|k| {
                        let b = tab.basis[k];
                        let cb = if b < n { lp.cost[b] } else { 0.0 };
                        cb * tab.at(k, col)
                    })
                    .sum();
                sign[i] * y
            })
            .collect();
        let objective = x.iter().zip(&lp.cost).map(|(a, c)| a * c).sum();
        LpSolution {
            x,
            dual,
            objective,
            iterations: used,
        }
    };

    if n_art > 0 {
        let mut phase1 = vec![0.0; ncols];
        for c in phase1.iter_mut().skip(n) {
            *c = 1.0;
        }
        tab.set_objective(&phase1);
        match tab.optimise(&mut used, limit) {
            Ok(()) => {}
            Err(PhaseStop::Unbounded) => {
                return Err(SimplexError::Malformed("phase one reported unbounded".into()))
            }
            Err(PhaseStop::Limit) => {
                return Err(SimplexError::IterationLimit {
                    limit,
                    incumbent: Box::new(extract(&tab, used)),
                })
            }
        }
        let scale = 1.0 + lp.rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if tab.objective_value() > 1e-9 * scale {
            return Err(SimplexError::Infeasible);
        }
        // drive remaining zero-level artificials out of the basis
        for i in 0..m {
            if tab.basis[i] < n {
                continue;
            }
            if let Some(j) = (0..n).find(|&j| tab.at(i, j).abs() > 1e-9) {
                tab.pivot(i, j);
            }
        }
        for b in tab.barred.iter_mut().skip(n) {
            *b = true;
        }
    }

    let mut cost = lp.cost.clone();
    cost.resize(ncols, 0.0);
    tab.set_objective(&cost);
    match tab.optimise(&mut used, limit) {
        Ok(()) => Ok(extract(&tab, used)),
        Err(PhaseStop::Unbounded) => Err(SimplexError::Unbounded),
        Err(PhaseStop::Limit) => Err(SimplexError::IterationLimit {
            limit,
            incumbent: Box::new(extract(&tab, used)),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn check_optimality(lp: &LinearProgram, sol: &LpSolution) {
        for (i, row) in lp.rows.iter().enumerate() {
            let ax: f64 = row.iter().zip(&sol.x).map(|(a, x)| a * x).sum();
            assert_abs_diff_eq!(ax, lp.rhs[i], epsilon = 1e-9);
        }
        // dual feasibility and strong duality
        for j in 0..lp.cost.len() {
            let aty: f64 = (0..lp.rows.len()).map(|i| lp.rows[i][j] * sol.dual[i]).sum();
            assert!(aty <= lp.cost[j] + 1e-9, "column {j}: {aty} > {}", lp.cost[j]);
        }
        let by: f64 = lp.rhs.iter().zip(&sol.dual).map(|(b, y)| b * y).sum();
        assert_abs_diff_eq!(by, sol.objective, epsilon = 1e-9);
    }

    #[test]
    fn textbook_problem_with_slacks() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
        let lp = LinearProgram {
            cost: vec![-3.0, -5.0, 0.0, 0.0, 0.0],
            rows: vec![
                vec![1.0, 0.0, 1.0, 0.0, 0.0],
                vec![0.0, 2.0, 0.0, 1.0, 0.0],
                vec![3.0, 2.0, 0.0, 0.0, 1.0],
            ],
            rhs: vec![4.0, 12.0, 18.0],
        };
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.objective, -36.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.x[1], 6.0, epsilon = 1e-10);
        check_optimality(&lp, &sol);
    }

    #[test]
    fn equality_constraints_need_phase_one() {
        // min x + 2y + 3z, x + y + z = 1, x - y = 0.2 (negative rhs row too)
        let lp = LinearProgram {
            cost: vec![1.0, 2.0, 3.0],
            rows: vec![vec![1.0, 1.0, 1.0], vec![-1.0, 1.0, 0.0]],
            rhs: vec![1.0, -0.2],
        };
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.x[0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.x[1], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, 1.4, epsilon = 1e-12);
        check_optimality(&lp, &sol);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let infeasible = LinearProgram {
            cost: vec![1.0, 1.0],
            rows: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            rhs: vec![1.0, 2.0],
        };
        assert_eq!(solve(&infeasible), Err(SimplexError::Infeasible));
        let unbounded = LinearProgram {
            cost: vec![-1.0, 0.0],
            rows: vec![vec![1.0, -1.0]],
            rhs: vec![1.0],
        };
        assert_eq!(solve(&unbounded), Err(SimplexError::Unbounded));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let lp = LinearProgram {
            cost: vec![2.0, 1.0],
            rows: vec![vec![1.0, 1.0], vec![2.0, 2.0]],
            rhs: vec![1.0, 2.0],
        };
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.objective, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's example cycles under the textbook rule without anti-cycling
        let lp = LinearProgram {
            cost: vec![-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0],
            rows: vec![
                vec![0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
                vec![0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            ],
            rhs: vec![0.0, 0.0, 1.0],
        };
        let sol = solve(&lp).unwrap();
        assert_abs_diff_eq!(sol.objective, -0.05, epsilon = 1e-10);
        check_optimality(&lp, &sol);
    }

    #[test]
    fn malformed_input_is_rejected() {
        let lp = LinearProgram {
            cost: vec![1.0],
            rows: vec![vec![1.0, 2.0]],
            rhs: vec![1.0],
        };
        assert!(matches!(solve(&lp), Err(SimplexError::Malformed(_))));
    }
}
