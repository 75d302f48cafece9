//! Feasibility of linear constraints over stochastic matrices.
//!
//! Everything here reduces to `{A x = b, x >= l}`, decided by a dense
//! phase-one simplex with Bland's rule. Problems are small (a few hundred
//! variables at most), so the tableau is kept dense.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{Dist, StochMatrix};

/// Residual tolerance for declaring a problem feasible.
pub const FEAS_TOL: f64 = 1e-9;
/// Partition tolerance for deterministic maps.
pub const DETERMINISTIC_TOL: f64 = 1e-10;
/// Largest domain searched by [`exists_deterministic_map`].
pub const MAX_DETERMINISTIC_DOMAIN: usize = 12;

const PIVOT_EPS: f64 = 1e-12;

/// Equality constraints `row · x = rhs` over variables bounded below.
#[derive(Debug, Clone, PartialEq)]
pub struct LpFeasibility {
    variables: usize,
    equalities: Vec<(Vec<f64>, f64)>,
    lower_bounds: Vec<f64>,
}

impl LpFeasibility {
    /// A problem over `variables` non-negative variables with no constraints yet.
    pub fn new(variables: usize) -> Self {
        LpFeasibility {
            variables,
            equalities: Vec::new(),
            lower_bounds: vec![0.0; variables],
        }
    }

    pub fn with_lower_bounds(mut self, bounds: Vec<f64>) -> Result<Self> {
        if bounds.len() != self.variables {
            return Err(Error::Dimension {
                expected: self.variables,
                got: bounds.len(),
            });
        }
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(Error::Input("lower bounds must be finite".into()));
        }
        self.lower_bounds = bounds;
        Ok(self)
    }

    pub fn add_equality(&mut self, row: Vec<f64>, rhs: f64) -> Result<()> {
        if row.len() != self.variables {
            return Err(Error::Dimension {
                expected: self.variables,
                got: row.len(),
            });
        }
        if !rhs.is_finite() || row.iter().any(|a| !a.is_finite()) {
            return Err(Error::Input("constraint coefficients must be finite".into()));
        }
        self.equalities.push((row, rhs));
        Ok(())
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn constraints(&self) -> usize {
        self.equalities.len()
    }

    /// Largest absolute constraint residual or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let eq = self
            .equalities
            .iter()
            .map(|(row, rhs)| (row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - rhs).abs());
        let bounds = self
            .lower_bounds
            .iter()
            .zip(x)
            .map(|(l, v)| (l - v).max(0.0));
        eq.chain(bounds).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeasStatus {
    Feasible,
    Infeasible,
}

/// Outcome of a feasibility question, with a witness when feasible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasResult<W = Vec<f64>> {
    pub status: FeasStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<W>,
}

impl<W> FeasResult<W> {
    pub fn feasible(witness: W) -> Self {
        FeasResult {
            status: FeasStatus::Feasible,
            witness: Some(witness),
        }
    }

    pub fn infeasible() -> Self {
        FeasResult {
            status: FeasStatus::Infeasible,
            witness: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == FeasStatus::Feasible
    }
}

struct Tableau {
    // m constraint rows followed by the phase-one objective row; last column is the rhs
    cells: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.width;
        let p = self.cells[row][col];
        for v in self.cells[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.cells[row].clone();
        for (r, cells) in self.cells.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = cells[col];
            if factor == 0.0 {
                continue;
            }
            for c in 0..width {
                cells[c] -= factor * pivot_row[c];
            }
            cells[col] = 0.0;
        }
        self.basis[row] = col;
    }
}

/// Phase-one simplex: minimizes the sum of artificial variables and reports
/// feasibility when that sum reaches zero.
pub fn solve_feasibility(problem: &LpFeasibility) -> Result<FeasResult> {
    let n = problem.variables;
    let m = problem.equalities.len();
    if m == 0 {
        return Ok(FeasResult::feasible(problem.lower_bounds.clone()));
    }

    // shift x = l + y so that y >= 0, then flip rows to make every rhs non-negative
    let width = n + m + 1;
    let mut cells = Vec::with_capacity(m + 1);
    for (i, (row, rhs)) in problem.equalities.iter().enumerate() {
        let shift: f64 = row.iter().zip(&problem.lower_bounds).map(|(a, l)| a * l).sum();
        let b = rhs - shift;
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut cells_row = vec![0.0; width];
        for (c, a) in row.iter().enumerate() {
            cells_row[c] = sign * a;
        }
        cells_row[n + i] = 1.0;
        cells_row[width - 1] = sign * b;
        cells.push(cells_row);
    }
    let mut objective = vec![0.0; width];
    for row in &cells {
        for c in 0..n {
            objective[c] -= row[c];
        }
        objective[width - 1] -= row[width - 1];
    }
    cells.push(objective);

    let mut tab = Tableau {
        cells,
        basis: (n..n + m).collect(),
        width,
    };
    let rhs = tab.rhs_col();
    let max_iterations = 50 * (n + m).max(10) * (m + 1);

    let mut iterations = 0;
    // Bland: lowest-index column with negative reduced cost enters
    while let Some(col) = (0..n + m).find(|&c| tab.cells[m][c] < -PIVOT_EPS) {
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = tab.cells[r][col];
            if a <= PIVOT_EPS {
                continue;
            }
            let ratio = tab.cells[r][rhs] / a;
            leave = match leave {
                None => Some((r, ratio)),
                Some((best, best_ratio)) => {
                    let tie = (ratio - best_ratio).abs() <= PIVOT_EPS;
                    if ratio < best_ratio - PIVOT_EPS || (tie && tab.basis[r] < tab.basis[best]) {
                        Some((r, ratio))
                    } else {
                        Some((best, best_ratio))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            return Err(Error::Numerical("phase-one objective unbounded".into()));
        };
        tab.pivot(row, col);
        iterations += 1;
        if iterations > max_iterations {
            return Err(Error::Numerical(format!(
                "simplex did not terminate in {max_iterations} pivots"
            )));
        }
    }

    let artificial_mass = -tab.cells[m][rhs];
    if artificial_mass > FEAS_TOL {
        return Ok(FeasResult::infeasible());
    }
    let mut x = problem.lower_bounds.clone();
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] += tab.cells[r][rhs].max(0.0);
        }
    }
    let violation = problem.max_violation(&x);
    if violation > FEAS_TOL {
        return Err(Error::Numerical(format!(
            "phase one ended feasible but the witness violates constraints by {violation:e}"
        )));
    }
    Ok(FeasResult::feasible(x))
}

// variables M[x][y] at index x * cols + y
fn stochastic_rows(rows: usize, cols: usize) -> Result<LpFeasibility> {
    let mut lp = LpFeasibility::new(rows * cols);
    for x in 0..rows {
        let mut row = vec![0.0; rows * cols];
        row[x * cols..(x + 1) * cols].fill(1.0);
        lp.add_equality(row, 1.0)?;
    }
    Ok(lp)
}

fn add_push_forward(lp: &mut LpFeasibility, p: &Dist, q: &Dist) -> Result<()> {
    let (rows, cols) = (p.len(), q.len());
    for y in 0..cols {
        let mut row = vec![0.0; rows * cols];
        for (x, &w) in p.weights().iter().enumerate() {
            row[x * cols + y] = w;
        }
        lp.add_equality(row, q.weights()[y])?;
    }
    Ok(())
}

fn witness_matrix(x: Vec<f64>, rows: usize, cols: usize) -> Result<StochMatrix> {
    let rows_vec = x.chunks(cols).take(rows).map(<[f64]>::to_vec).collect();
    StochMatrix::from_rows_normalized(rows_vec, FEAS_TOL)
}

/// Is there a uniform matrix `U` (columns summing to `|X|/|Y|`) with `pU = q`?
pub fn exists_uniform_map(p: &Dist, q: &Dist) -> Result<FeasResult<StochMatrix>> {
    let (rows, cols) = (p.len(), q.len());
    let mut lp = stochastic_rows(rows, cols)?;
    let col_sum = rows as f64 / cols as f64;
    for y in 0..cols {
        let mut row = vec![0.0; rows * cols];
        for x in 0..rows {
            row[x * cols + y] = 1.0;
        }
        lp.add_equality(row, col_sum)?;
    }
    add_push_forward(&mut lp, p, q)?;
    let res = solve_feasibility(&lp)?;
    match res.witness {
        Some(x) => Ok(FeasResult::feasible(witness_matrix(x, rows, cols)?)),
        None => Ok(FeasResult::infeasible()),
    }
}

/// Is there one stochastic `M` with `pM = p'` and `qM = q'`?
pub fn exists_joint_stochastic_map(
    pair: (&Dist, &Dist),
    target: (&Dist, &Dist),
) -> Result<FeasResult<StochMatrix>> {
    let (p, q) = pair;
    let (p2, q2) = target;
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            got: q.len(),
        });
    }
    if p2.len() != q2.len() {
        return Err(Error::Dimension {
            expected: p2.len(),
            got: q2.len(),
        });
    }
    let (rows, cols) = (p.len(), p2.len());
    let mut lp = stochastic_rows(rows, cols)?;
    add_push_forward(&mut lp, p, p2)?;
    add_push_forward(&mut lp, q, q2)?;
    let res = solve_feasibility(&lp)?;
    match res.witness {
        Some(x) => Ok(FeasResult::feasible(witness_matrix(x, rows, cols)?)),
        None => Ok(FeasResult::infeasible()),
    }
}

/// Is there a function `f: X -> Y` whose push-forward of `p` is `q`?
///
/// Backtracking over partial sums. Outcomes with zero target mass get empty
/// preimages; zero-mass source outcomes are parked on the first supported
/// target without branching.
pub fn exists_deterministic_map(p: &Dist, q: &Dist) -> Result<FeasResult<StochMatrix>> {
    if p.len() > MAX_DETERMINISTIC_DOMAIN {
        return Err(Error::SizeLimit {
            what: "deterministic-map domain",
            size: p.len(),
            limit: MAX_DETERMINISTIC_DOMAIN,
        });
    }
    let target = q.weights();
    let supported: Vec<usize> = (0..target.len())
        .filter(|&y| target[y] > DETERMINISTIC_TOL)
        .collect();

    let mut order: Vec<usize> = (0..p.len()).filter(|&x| p.weights()[x] > 0.0).collect();
    order.sort_by(|&a, &b| p.weights()[b].total_cmp(&p.weights()[a]));

    let mut search = PartitionSearch {
        mass: p.weights(),
        target,
        supported: &supported,
        order: &order,
        load: vec![0.0; target.len()],
        assignment: vec![usize::MAX; p.len()],
    };
    if !search.run(0) {
        return Ok(FeasResult::infeasible());
    }
    let mut f = search.assignment;
    let park = supported[0];
    for y in f.iter_mut().filter(|y| **y == usize::MAX) {
        *y = park;
    }
    Ok(FeasResult::feasible(StochMatrix::from_function(&f, target.len())))
}

struct PartitionSearch<'a> {
    mass: &'a [f64],
    target: &'a [f64],
    supported: &'a [usize],
    order: &'a [usize],
    load: Vec<f64>,
    assignment: Vec<usize>,
}

impl PartitionSearch<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return self
                .load
                .iter()
                .zip(self.target)
                .all(|(l, t)| (l - t).abs() <= DETERMINISTIC_TOL);
        }
        let x = self.order[depth];
        let w = self.mass[x];
        let mut tried_slack: Vec<f64> = Vec::new();
        for &y in self.supported {
            let slack = self.target[y] - self.load[y];
            if w > slack + DETERMINISTIC_TOL {
                continue;
            }
            // bins with identical remaining capacity are interchangeable
            if tried_slack.iter().any(|s| (s - slack).abs() <= DETERMINISTIC_TOL * 1e-2) {
                continue;
            }
            tried_slack.push(slack);
            self.load[y] += w;
            self.assignment[x] = y;
            if self.run(depth + 1) {
                return true;
            }
            self.load[y] -= w;
            self.assignment[x] = usize::MAX;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{apply, is_deterministic, is_uniform_matrix};

    fn d(w: &[f64]) -> Dist {
        Dist::new(w.to_vec()).unwrap()
    }

    #[test]
    fn single_variable_equalities() {
        let mut lp = LpFeasibility::new(1);
        lp.add_equality(vec![1.0], 1.0).unwrap();
        let res = solve_feasibility(&lp).unwrap();
        assert!(res.is_feasible());
        assert!((res.witness.unwrap()[0] - 1.0).abs() < 1e-12);

        let mut lp = LpFeasibility::new(1);
        lp.add_equality(vec![1.0], -1.0).unwrap();
        assert_eq!(solve_feasibility(&lp).unwrap(), FeasResult::infeasible());
    }

    #[test]
    fn two_by_two_system() {
        let mut lp = LpFeasibility::new(2);
        lp.add_equality(vec![1.0, 1.0], 1.0).unwrap();
        lp.add_equality(vec![1.0, -1.0], 0.0).unwrap();
        let w = solve_feasibility(&lp).unwrap().witness.unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lower_bounds_are_respected() {
        let mut lp = LpFeasibility::new(2).with_lower_bounds(vec![0.4, 0.0]).unwrap();
        lp.add_equality(vec![1.0, 1.0], 0.5).unwrap();
        let w = solve_feasibility(&lp).unwrap().witness.unwrap();
        assert!(w[0] >= 0.4 - 1e-12);
        assert!(lp.max_violation(&w) < 1e-12);

        let mut lp = LpFeasibility::new(1).with_lower_bounds(vec![2.0]).unwrap();
        lp.add_equality(vec![1.0], 1.0).unwrap();
        assert!(!solve_feasibility(&lp).unwrap().is_feasible());
    }

    #[test]
    fn redundant_and_degenerate_rows() {
        // duplicated constraint and a zero row with zero rhs
        let mut lp = LpFeasibility::new(3);
        lp.add_equality(vec![1.0, 1.0, 1.0], 1.0).unwrap();
        lp.add_equality(vec![1.0, 1.0, 1.0], 1.0).unwrap();
        lp.add_equality(vec![0.0, 0.0, 0.0], 0.0).unwrap();
        lp.add_equality(vec![1.0, 0.0, -1.0], 0.0).unwrap();
        let w = solve_feasibility(&lp).unwrap().witness.unwrap();
        assert!(lp.max_violation(&w) < 1e-12);
    }

    #[test]
    fn constraint_shape_checked() {
        let mut lp = LpFeasibility::new(2);
        assert!(lp.add_equality(vec![1.0], 1.0).is_err());
        assert!(lp.add_equality(vec![1.0, f64::NAN], 1.0).is_err());
    }

    #[test]
    fn uniform_map_examples() {
        let p = d(&[0.2, 0.3, 0.5]);
        let res = exists_uniform_map(&p, &p).unwrap();
        let w = res.witness.expect("identity is admissible");
        assert!(is_uniform_matrix(&w));
        assert!(apply(&p, &w).unwrap().approx_eq(&p, 1e-9));

        assert!(exists_uniform_map(&d(&[0.7, 0.3]), &d(&[0.5, 0.5])).unwrap().is_feasible());
        assert!(!exists_uniform_map(&d(&[0.5, 0.5]), &d(&[0.7, 0.3])).unwrap().is_feasible());
    }

    #[test]
    fn uniform_map_across_dimensions() {
        // coarse-graining 4 -> 2 pairs is uniform
        let p = d(&[0.4, 0.1, 0.3, 0.2]);
        let res = exists_uniform_map(&p, &d(&[0.5, 0.5])).unwrap();
        assert!(res.is_feasible());
        assert!(is_uniform_matrix(res.witness.as_ref().unwrap()));
        // a uniform 2 -> 4 map sends a point mass to something with at most half mass per outcome
        assert!(!exists_uniform_map(&d(&[1.0, 0.0]), &d(&[1.0, 0.0, 0.0, 0.0])).unwrap().is_feasible());
        assert!(exists_uniform_map(&d(&[1.0, 0.0]), &d(&[0.5, 0.5, 0.0, 0.0])).unwrap().is_feasible());
    }

    #[test]
    fn joint_map_examples() {
        let p = d(&[0.9, 0.1]);
        let q = d(&[0.1, 0.9]);
        assert!(exists_joint_stochastic_map((&p, &q), (&p, &q)).unwrap().is_feasible());

        let u = Dist::uniform(3);
        let res = exists_joint_stochastic_map((&p, &q), (&u, &u)).unwrap();
        let w = res.witness.unwrap();
        assert!(apply(&p, &w).unwrap().approx_eq(&u, 1e-9));
        assert!(apply(&q, &w).unwrap().approx_eq(&u, 1e-9));

        let res = exists_joint_stochastic_map((&p, &q), (&d(&[1.0, 0.0]), &d(&[0.0, 1.0]))).unwrap();
        assert!(!res.is_feasible());
    }

    #[test]
    fn joint_map_shape_errors() {
        let a = d(&[0.5, 0.5]);
        let b = d(&[1.0]);
        assert!(exists_joint_stochastic_map((&a, &b), (&a, &a)).is_err());
        assert!(exists_joint_stochastic_map((&a, &a), (&a, &b)).is_err());
    }

    #[test]
    fn deterministic_map_examples() {
        let p = d(&[0.1, 0.2, 0.3, 0.4]);
        let res = exists_deterministic_map(&p, &d(&[1.0])).unwrap();
        assert!(res.is_feasible());

        let half = d(&[0.5, 0.5]);
        let w = exists_deterministic_map(&half, &half).unwrap().witness.unwrap();
        assert!(is_deterministic(&w));
        assert!(apply(&half, &w).unwrap().approx_eq(&half, 1e-12));

        assert!(!exists_deterministic_map(&half, &d(&[0.7, 0.3])).unwrap().is_feasible());
    }

    #[test]
    fn deterministic_map_zero_targets_get_empty_preimages() {
        let p = d(&[0.5, 0.5, 0.0]);
        let q = d(&[0.0, 1.0, 0.0]);
        let w = exists_deterministic_map(&p, &q).unwrap().witness.unwrap();
        assert_eq!(w.column_sums(), vec![0.0, 3.0, 0.0]);

        let p = d(&[0.3, 0.3, 0.4]);
        let w = exists_deterministic_map(&p, &d(&[0.6, 0.0, 0.4])).unwrap().witness.unwrap();
        assert!(apply(&p, &w).unwrap().approx_eq(&d(&[0.6, 0.0, 0.4]), 1e-12));
    }

    #[test]
    fn deterministic_map_size_guard() {
        let p = Dist::uniform(13);
        assert!(matches!(
            exists_deterministic_map(&p, &d(&[1.0])),
            Err(Error::SizeLimit { .. })
        ));
        let p = Dist::uniform(12);
        let q = Dist::uniform(6);
        assert!(exists_deterministic_map(&p, &q).unwrap().is_feasible());
        assert!(!exists_deterministic_map(&p, &Dist::uniform(5)).unwrap().is_feasible());
    }

    #[test]
    fn feas_result_json() {
        let r: FeasResult<StochMatrix> = FeasResult::feasible(StochMatrix::identity(2));
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"status":"feasible","witness":[[1.0,0.0],[0.0,1.0]]}"#
        );
        let r: FeasResult<StochMatrix> = FeasResult::infeasible();
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"status":"infeasible"}"#);
    }
}
