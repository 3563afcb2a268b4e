//! Reference linear-programming solver for tests.
//!
//! A dense two-phase tableau simplex with Bland's rule. It knows nothing about
//! transportation structure: callers hand it `min c·x  s.t.  A x = b, x >= 0`.
//! Slow and simple on purpose, so it can check the production solver.

const EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// Solves `min c·x` subject to `a x = b`, `x >= 0`.
///
/// `a` is row-major with `b.len()` rows and `c.len()` columns.
pub fn solve_equality_lp(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpResult {
    let rows = b.len();
    let cols = c.len();
    assert_eq!(a.len(), rows);
    assert!(a.iter().all(|r| r.len() == cols));

    // Tableau columns: original vars, one artificial per row, then rhs.
    let width = cols + rows + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; rows];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..cols {
            t[i][j] = sign * a[i][j];
        }
        t[i][cols + i] = 1.0;
        t[i][rhs] = sign * b[i];
    }
    let mut basis: Vec<usize> = (0..rows).map(|i| cols + i).collect();

    // Phase 1: minimise the sum of artificials.
    let mut phase1 = vec![0.0; cols + rows];
    for v in phase1.iter_mut().skip(cols) {
        *v = 1.0;
    }
    if run_simplex(&mut t, &mut basis, &phase1, cols + rows).is_err() {
        return LpResult::Unbounded;
    }
    let infeasibility: f64 = basis
        .iter()
        .zip(&t)
        .filter(|(&bv, _)| bv >= cols)
        .map(|(_, row)| row[rhs])
        .sum();
    if infeasibility > 1e-9 {
        return LpResult::Infeasible;
    }

    // Drive zero-level artificials out of the basis, dropping redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= cols {
            match (0..cols).find(|&j| t[i][j].abs() > EPS) {
                Some(j) => {
                    pivot(&mut t, i, j);
                    basis[i] = j;
                    i += 1;
                }
                None => {
                    t.remove(i);
                    basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // Phase 2 over the original columns only.
    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, rows));
    if run_simplex(&mut t, &mut basis, &phase2, cols).is_err() {
        return LpResult::Unbounded;
    }

    let mut x = vec![0.0; cols];
    for (row, &bv) in t.iter().zip(&basis) {
        if bv < cols {
            x[bv] = row[rhs];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpResult::Optimal { objective, x }
}

struct Unbounded;

/// Bland's rule: lowest-index improving column, lowest-index basic variable on ties.
fn run_simplex(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    enter_limit: usize,
) -> Result<(), Unbounded> {
    let rhs = t.first().map_or(0, |r| r.len() - 1);
    loop {
        let entering = (0..enter_limit).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let reduced = cost[j]
                - basis
                    .iter()
                    .zip(t.iter())
                    .map(|(&bv, row)| cost[bv] * row[j])
                    .sum::<f64>();
            reduced < -EPS
        });
        let Some(j) = entering else {
            return Ok(());
        };

        let mut leave: Option<(usize, f64)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[j] > EPS {
                let ratio = row[rhs] / row[j];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS || (ratio <= lr + EPS && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((i, _)) = leave else {
            return Err(Unbounded);
        };
        pivot(t, i, j);
        basis[i] = j;
    }
}

fn pivot(t: &mut [Vec<f64>], pr: usize, pc: usize) {
    let p = t[pr][pc];
    for v in t[pr].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[pr].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == pr {
            continue;
        }
        let f = row[pc];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
}

/// Balanced transportation problem as a plain LP: `cost` is row-major `m x n`.
///
/// The last column constraint is omitted because it is implied by the others.
pub fn transport_cost(supply: &[f64], demand: &[f64], cost: &[f64]) -> f64 {
    let m = supply.len();
    let n = demand.len();
    assert_eq!(cost.len(), m * n);
    let mut a = Vec::with_capacity(m + n - 1);
    let mut b = Vec::with_capacity(m + n - 1);
    for (i, &s) in supply.iter().enumerate() {
        let mut row = vec![0.0; m * n];
        for j in 0..n {
            row[i * n + j] = 1.0;
        }
        a.push(row);
        b.push(s);
    }
    for (j, &d) in demand.iter().enumerate().take(n - 1) {
        let mut row = vec![0.0; m * n];
        for i in 0..m {
            row[i * n + j] = 1.0;
        }
        a.push(row);
        b.push(d);
    }
    match solve_equality_lp(cost, &a, &b) {
        LpResult::Optimal { objective, .. } => objective,
        other => panic!("transportation LP must be feasible and bounded, got {other:?}"),
    }
}
