//! Transportation simplex on a bipartite spanning-tree basis.
//!
//! Supplies and demands must be strictly positive and sum to (nearly) the
//! same total. The basis always holds `m + n - 1` cells forming a spanning
//! tree over the `m` row nodes and `n` column nodes; degenerate cells carry
//! zero flow. Pricing is Dantzig's rule, switching to Bland's rule while
//! pivots are degenerate so the method cannot cycle.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
struct Cell {
    row: usize,
    col: usize,
    flow: f64,
}

const MAX_PIVOTS: usize = 200_000;

/// Returns the optimal basic flows as `(row, col, mass)` with `mass > 0`.
pub(crate) fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Vec<(usize, usize, f64)> {
    let m = supply.len();
    let n = demand.len();
    debug_assert_eq!(cost.len(), m * n);
    if m == 0 || n == 0 {
        return Vec::new();
    }

    let mut basis = northwest_corner(supply, demand);
    let mut in_basis = vec![false; m * n];
    for c in &basis {
        in_basis[c.row * n + c.col] = true;
    }

    let scale = cost.iter().fold(0.0f64, |acc, &c| acc.max(c.abs()));
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let mut bland = false;
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];

    for _ in 0..MAX_PIVOTS {
        let adjacency = tree_adjacency(&basis, m, n);
        potentials(&basis, &adjacency, cost, m, n, &mut u, &mut v);

        let Some((row, col)) = entering_cell(&in_basis, cost, &u, &v, n, tol, bland) else {
            break;
        };

        let path = tree_path(&adjacency, row, m + col);
        // Walking back from the column node, cells alternate -, +, -, ...
        let (leaving, theta) = path
            .iter()
            .step_by(2)
            .map(|&k| (k, basis[k].flow))
            .min_by(|&(a, fa), &(b, fb)| {
                let key = |k: usize| basis[k].row * n + basis[k].col;
                fa.total_cmp(&fb).then(key(a).cmp(&key(b)))
            })
            .expect("entering cell closes a cycle");
        for (pos, &k) in path.iter().enumerate() {
            let c = &mut basis[k];
            if pos % 2 == 0 {
                c.flow = (c.flow - theta).max(0.0);
            } else {
                c.flow += theta;
            }
        }
        let old = basis[leaving];
        in_basis[old.row * n + old.col] = false;
        in_basis[row * n + col] = true;
        basis[leaving] = Cell { row, col, flow: theta };
        bland = theta == 0.0;
    }

    basis
        .into_iter()
        .filter(|c| c.flow > 0.0)
        .map(|c| (c.row, c.col, c.flow))
        .collect()
}

fn northwest_corner(supply: &[f64], demand: &[f64]) -> Vec<Cell> {
    let (m, n) = (supply.len(), demand.len());
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let mut basis = Vec::with_capacity(m + n - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let flow = s[i].min(d[j]).max(0.0);
        basis.push(Cell { row: i, col: j, flow });
        s[i] -= flow;
        d[j] -= flow;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i == m - 1 {
            j += 1;
        } else if j == n - 1 || s[i] <= d[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    basis
}

/// Node ids: rows `0..m`, columns `m..m+n`. Each entry is `(neighbour, cell index)`.
fn tree_adjacency(basis: &[Cell], m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); m + n];
    for (k, c) in basis.iter().enumerate() {
        adj[c.row].push((m + c.col, k));
        adj[m + c.col].push((c.row, k));
    }
    adj
}

fn potentials(
    basis: &[Cell],
    adj: &[Vec<(usize, usize)>],
    cost: &[f64],
    m: usize,
    n: usize,
    u: &mut [f64],
    v: &mut [f64],
) {
    let mut seen = vec![false; m + n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    u[0] = 0.0;
    while let Some(node) = queue.pop_front() {
        for &(next, k) in &adj[node] {
            if seen[next] {
                continue;
            }
            seen[next] = true;
            let c = basis[k];
            let cij = cost[c.row * n + c.col];
            if next >= m {
                v[next - m] = cij - u[c.row];
            } else {
                u[next] = cij - v[c.col];
            }
            queue.push_back(next);
        }
    }
    debug_assert!(seen.iter().all(|&s| s), "basis is not a spanning tree");
}

fn entering_cell(
    in_basis: &[bool],
    cost: &[f64],
    u: &[f64],
    v: &[f64],
    n: usize,
    tol: f64,
    bland: bool,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, &ui) in u.iter().enumerate() {
        for (j, &vj) in v.iter().enumerate() {
            let key = i * n + j;
            if in_basis[key] {
                continue;
            }
            let reduced = cost[key] - ui - vj;
            if reduced < -tol {
                if bland {
                    return Some((i, j));
                }
                if best.is_none_or(|(_, _, r)| reduced < r) {
                    best = Some((i, j, reduced));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Basis cells on the tree path from `from` to `to`, listed from the `to` end.
fn tree_path(adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        for &(next, k) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, k));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = to;
    while node != from {
        let (prev, k) = parent[node].expect("tree is connected");
        path.push(k);
        node = prev;
    }
    path
}
