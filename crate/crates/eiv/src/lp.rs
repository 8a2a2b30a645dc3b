//! Dense two-phase simplex for the small linear programs behind the cone
//! predicates.
//!
//! Problems here are tiny (a handful of free variables, at most a few dozen
//! constraints), so a plain tableau with Bland's pivoting rule is the right
//! tool: no cycling, no sparse machinery, and easy to audit. Free variables
//! are split into positive and negative parts internally.

use thiserror::Error;

/// Pivoting is capped; tiny well-conditioned problems converge in far fewer
/// steps, so hitting the cap signals a numerical problem rather than size.
const MAX_PIVOTS: usize = 20_000;

/// Feasibility tolerance for phase-1 residuals and ratio tests.
const FEAS_TOL: f64 = 1e-9;

/// Reduced-cost tolerance: smaller improvements are treated as optimal.
const COST_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("simplex did not converge within {MAX_PIVOTS} pivots")]
    IterationLimit,
    #[error("constraint row has non-finite coefficients")]
    BadInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

/// One row `coeffs . x (<=|=) rhs` over free variables.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn le(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint { coeffs, rel: Relation::Le, rhs }
    }

    pub fn eq(coeffs: Vec<f64>, rhs: f64) -> Self {
        Constraint { coeffs, rel: Relation::Eq, rhs }
    }
}

/// Maximize `objective . x` subject to the constraints; `x` is free.
#[derive(Debug, Clone)]
pub struct Program {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl Outcome {
    pub fn optimal_value(&self) -> Option<f64> {
        match self {
            Outcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Tableau state shared by both phases.
struct Tableau {
    rows: usize,
    cols: usize, // structural + slack + artificial columns
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col];
        for j in 0..self.cols {
            self.a[row][j] /= piv;
        }
        self.b[row] /= piv;
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let factor = self.a[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..self.cols {
                self.a[i][j] -= factor * self.a[row][j];
            }
            self.b[i] -= factor * self.b[row];
        }
        self.basis[row] = col;
    }

    /// Bland's rule simplex on the current basis for objective `c`
    /// (maximization). Returns the objective row (reduced costs) implicitly by
    /// recomputation each step; fine at this scale.
    fn run(&mut self, c: &[f64], allowed: &[bool]) -> Result<bool, LpError> {
        for _ in 0..MAX_PIVOTS {
            // reduced costs: c_j - c_B . B^-1 A_j
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut red = c[j];
                for (i, &bi) in self.basis.iter().enumerate() {
                    red -= c[bi] * self.a[i][j];
                }
                if red > COST_TOL {
                    entering = Some(j);
                    break; // Bland: smallest index
                }
            }
            let Some(col) = entering else {
                return Ok(true); // optimal
            };
            // ratio test, Bland ties by smallest basis index
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                if self.a[i][col] > FEAS_TOL {
                    let ratio = self.b[i] / self.a[i][col];
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - FEAS_TOL
                                || ((ratio - lr).abs() <= FEAS_TOL && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false); // unbounded direction
            };
            self.pivot(row, col);
        }
        Err(LpError::IterationLimit)
    }

    fn objective_value(&self, c: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, &bi)| c[bi] * self.b[i])
            .sum()
    }
}

/// Solve the program with a textbook two-phase dense simplex.
pub fn solve(p: &Program) -> Result<Outcome, LpError> {
    let n = p.n_vars;
    let m = p.constraints.len();
    for c in &p.constraints {
        if c.coeffs.len() != n || !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(LpError::BadInput);
        }
    }
    if p.objective.len() != n || p.objective.iter().any(|v| !v.is_finite()) {
        return Err(LpError::BadInput);
    }

    // Split x = x+ - x-, then append one slack/surplus per inequality and one
    // artificial per row that needs it.
    let n_split = 2 * n;
    let mut need_artificial = vec![false; m];
    let mut slack_col = vec![usize::MAX; m];
    let mut cols = n_split;
    for (i, c) in p.constraints.iter().enumerate() {
        let flip = c.rhs < 0.0;
        match (c.rel, flip) {
            (Relation::Le, false) => {
                slack_col[i] = cols;
                cols += 1;
            }
            (Relation::Le, true) => {
                // becomes >= with positive rhs: surplus + artificial
                slack_col[i] = cols;
                cols += 1;
                need_artificial[i] = true;
            }
            (Relation::Eq, _) => {
                need_artificial[i] = true;
            }
        }
    }
    let first_artificial = cols;
    let n_art: usize = need_artificial.iter().filter(|&&x| x).count();
    cols += n_art;

    let mut a = vec![vec![0.0; cols]; m];
    let mut b = vec![0.0; m];
    let mut basis = vec![usize::MAX; m];
    let mut art = first_artificial;
    for (i, c) in p.constraints.iter().enumerate() {
        let sign = if c.rhs < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            a[i][j] = sign * c.coeffs[j];
            a[i][n + j] = -sign * c.coeffs[j];
        }
        b[i] = sign * c.rhs;
        if slack_col[i] != usize::MAX {
            // flipped Le rows carry a surplus (-1), plain ones a slack (+1)
            a[i][slack_col[i]] = if sign < 0.0 && c.rel == Relation::Le { -1.0 } else { 1.0 };
        }
        if need_artificial[i] {
            a[i][art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = slack_col[i];
        }
    }

    let mut t = Tableau { rows: m, cols, a, b, basis };

    // Phase 1: drive artificials to zero.
    if n_art > 0 {
        let mut c1 = vec![0.0; cols];
        for c in c1.iter_mut().skip(first_artificial) {
            *c = -1.0;
        }
        let allowed = vec![true; cols];
        let optimal = t.run(&c1, &allowed)?;
        debug_assert!(optimal, "phase 1 is always bounded");
        if t.objective_value(&c1) < -FEAS_TOL {
            return Ok(Outcome::Infeasible);
        }
        // Pivot remaining artificials out of the basis when possible.
        for i in 0..t.rows {
            if t.basis[i] >= first_artificial {
                if let Some(j) = (0..first_artificial)
                    .find(|&j| t.a[i][j].abs() > FEAS_TOL)
                {
                    t.pivot(i, j);
                }
                // A row whose only support is artificial is redundant; its
                // basic value is ~0, so it stays harmlessly in the basis.
            }
        }
    }

    // Phase 2 over structural + slack columns only.
    let mut c2 = vec![0.0; cols];
    for j in 0..n {
        c2[j] = p.objective[j];
        c2[n + j] = -p.objective[j];
    }
    let mut allowed = vec![true; cols];
    for a in allowed.iter_mut().skip(first_artificial) {
        *a = false;
    }
    let optimal = t.run(&c2, &allowed)?;
    if !optimal {
        return Ok(Outcome::Unbounded);
    }

    let mut point = vec![0.0; n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            point[bi] += t.b[i];
        } else if bi < 2 * n {
            point[bi - n] -= t.b[i];
        }
    }
    Ok(Outcome::Optimal { value: t.objective_value(&c2), point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }

    #[test]
    fn bounded_triangle() {
        // max x + y st x <= 1, y <= 1, x + y <= 1.5
        let p = Program {
            n_vars: 2,
            objective: vec![1.0, 1.0],
            constraints: vec![
                Constraint::le(vec![1.0, 0.0], 1.0),
                Constraint::le(vec![0.0, 1.0], 1.0),
                Constraint::le(vec![1.0, 1.0], 1.5),
            ],
        };
        match solve(&p).unwrap() {
            Outcome::Optimal { value, .. } => assert_close(value, 1.5),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn free_variables_negative_optimum() {
        // max -x st x >= 2  (written as -x <= -2); optimum -2 at x = 2
        let p = Program {
            n_vars: 1,
            objective: vec![-1.0],
            constraints: vec![Constraint::le(vec![-1.0], -2.0)],
        };
        match solve(&p).unwrap() {
            Outcome::Optimal { value, point } => {
                assert_close(value, -2.0);
                assert_close(point[0], 2.0);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn equality_constraint() {
        // max x + 2y st x + y = 1, x <= 0.25, y <= 1
        let p = Program {
            n_vars: 2,
            objective: vec![1.0, 2.0],
            constraints: vec![
                Constraint::eq(vec![1.0, 1.0], 1.0),
                Constraint::le(vec![1.0, 0.0], 0.25),
                Constraint::le(vec![0.0, 1.0], 1.0),
            ],
        };
        match solve(&p).unwrap() {
            Outcome::Optimal { value, point } => {
                assert_close(value, 2.0);
                assert_close(point[0] + point[1], 1.0);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let p = Program {
            n_vars: 1,
            objective: vec![0.0],
            constraints: vec![
                Constraint::le(vec![1.0], 0.0),
                Constraint::le(vec![-1.0], -1.0), // x >= 1
            ],
        };
        assert!(matches!(solve(&p).unwrap(), Outcome::Infeasible));
    }

    #[test]
    fn unbounded_detected() {
        let p = Program {
            n_vars: 1,
            objective: vec![1.0],
            constraints: vec![Constraint::le(vec![-1.0], 0.0)],
        };
        assert!(matches!(solve(&p).unwrap(), Outcome::Unbounded));
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Three constraints through the same vertex; Bland must not cycle.
        let p = Program {
            n_vars: 2,
            objective: vec![1.0, 0.0],
            constraints: vec![
                Constraint::le(vec![1.0, 1.0], 1.0),
                Constraint::le(vec![1.0, -1.0], 1.0),
                Constraint::le(vec![1.0, 0.0], 1.0),
                Constraint::le(vec![-1.0, 0.0], 0.0),
                Constraint::le(vec![0.0, 1.0], 2.0),
                Constraint::le(vec![0.0, -1.0], 2.0),
            ],
        };
        match solve(&p).unwrap() {
            Outcome::Optimal { value, .. } => assert_close(value, 1.0),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    /// Brute-force 2D oracle: enumerate pairwise boundary intersections,
    /// keep the feasible ones, and take the best objective among them.
    fn vertex_oracle(p: &Program) -> Option<f64> {
        let cs = &p.constraints;
        let feasible = |x: f64, y: f64| {
            cs.iter().all(|c| {
                let lhs = c.coeffs[0] * x + c.coeffs[1] * y;
                match c.rel {
                    Relation::Le => lhs <= c.rhs + 1e-7,
                    Relation::Eq => (lhs - c.rhs).abs() <= 1e-7,
                }
            })
        };
        let mut best: Option<f64> = None;
        for i in 0..cs.len() {
            for j in (i + 1)..cs.len() {
                let (a1, b1, c1) = (cs[i].coeffs[0], cs[i].coeffs[1], cs[i].rhs);
                let (a2, b2, c2) = (cs[j].coeffs[0], cs[j].coeffs[1], cs[j].rhs);
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                if feasible(x, y) {
                    let v = p.objective[0] * x + p.objective[1] * y;
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
        }
        best
    }

    #[test]
    fn random_boxed_programs_match_vertex_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        for trial in 0..200 {
            let mut constraints = vec![
                Constraint::le(vec![1.0, 0.0], 1.0),
                Constraint::le(vec![-1.0, 0.0], 1.0),
                Constraint::le(vec![0.0, 1.0], 1.0),
                Constraint::le(vec![0.0, -1.0], 1.0),
            ];
            for _ in 0..rng.random_range(1..6) {
                let a = rng.random_range(-1.0..1.0);
                let b = rng.random_range(-1.0..1.0);
                let r = rng.random_range(-0.5..1.0);
                constraints.push(Constraint::le(vec![a, b], r));
            }
            let p = Program {
                n_vars: 2,
                objective: vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
                constraints,
            };
            let got = solve(&p).unwrap();
            match (got, vertex_oracle(&p)) {
                (Outcome::Optimal { value, .. }, Some(expect)) => {
                    assert!(
                        (value - expect).abs() < 1e-6,
                        "trial {trial}: simplex {value} vs oracle {expect}"
                    );
                }
                (Outcome::Infeasible, None) => {}
                (got, oracle) => panic!("trial {trial}: {got:?} vs oracle {oracle:?}"),
            }
        }
    }
}
