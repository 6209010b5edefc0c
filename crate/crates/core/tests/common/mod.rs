#![allow(dead_code)]

use epschain::chain::step_integral;
use epschain::space::{Metric, PointCloudSpace};
use proptest::prelude::*;
use rand::Rng;

/// Points on the lattice `(c mod 8, c div 8) / 8`.
pub fn space_from_cells(cells: &[usize], masses: Vec<f64>) -> PointCloudSpace {
    let coords = cells.iter().map(|&c| vec![(c % 8) as f64 / 8.0, (c / 8) as f64 / 8.0]).collect();
    PointCloudSpace::from_coords(coords, masses).unwrap()
}

/// Spaces of `2..=max_n` distinct lattice points with masses in `[0.25, 2]`.
pub fn arb_space(max_n: usize) -> impl Strategy<Value = PointCloudSpace> {
    (2..=max_n)
        .prop_flat_map(|n| {
            (
                proptest::sample::subsequence((0..64).collect::<Vec<usize>>(), n).prop_shuffle(),
                proptest::collection::vec(1u32..=8, n),
            )
        })
        .prop_map(|(cells, m)| space_from_cells(&cells, m.into_iter().map(|k| k as f64 / 4.0).collect()))
}

pub fn random_space(rng: &mut impl Rng, n: usize) -> PointCloudSpace {
    let mut cells: Vec<usize> = Vec::with_capacity(n);
    while cells.len() < n {
        let c = rng.gen_range(0..64);
        if !cells.contains(&c) {
            cells.push(c);
        }
    }
    let masses = (0..n).map(|_| rng.gen_range(1..=8) as f64 / 4.0).collect();
    space_from_cells(&cells, masses)
}

/// Eps that keeps the lattice space connected: the bottleneck of its minimum spanning tree.
pub fn connecting_eps(space: &PointCloudSpace) -> f64 {
    let n = space.len();
    let mut best = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    best[0] = 0.0;
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let i = (0..n).filter(|&i| !done[i]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        done[i] = true;
        worst = worst.max(best[i]);
        for j in 0..n {
            if !done[j] {
                best[j] = best[j].min(space.dist(i, j));
            }
        }
    }
    worst
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn combinations(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), f);
}

/// `min c·x` s.t. `a·x >= r` per row and `x >= 0`, by enumerating basic
/// feasible solutions. `None` when infeasible.
pub fn lp_vertex_min(c: &[f64], rows: &[(Vec<f64>, f64)]) -> Option<f64> {
    let n = c.len();
    let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        all.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    combinations(all.len(), n, &mut |pick| {
        let a: Vec<Vec<f64>> = pick.iter().map(|&i| all[i].0.clone()).collect();
        let b: Vec<f64> = pick.iter().map(|&i| all[i].1).collect();
        let Some(x) = solve_square(a, b) else { return };
        let feasible = all.iter().all(|(a, r)| {
            let lhs: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            lhs >= r - 1e-9 * r.abs().max(1.0)
        });
        if feasible {
            let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    });
    best
}

/// `min Σ w x^2` s.t. `a·x >= r`, `x >= 0` (all `w > 0`), by Hildreth dual
/// coordinate ascent over the rows and the bounds.
pub fn hildreth_qp(w: &[f64], rows: &[(Vec<f64>, f64)], sweeps: usize) -> Vec<f64> {
    let n = w.len();
    let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        all.push((e, 0.0));
    }
    // x = W^{-1} A^T y / 2
    let mut y = vec![0.0; all.len()];
    let mut x = vec![0.0; n];
    let norms: Vec<f64> = all.iter().map(|(a, _)| a.iter().zip(w).map(|(p, q)| p * p / (2.0 * q)).sum()).collect();
    for _ in 0..sweeps {
        for (k, (a, r)) in all.iter().enumerate() {
            if norms[k] == 0.0 {
                continue;
            }
            let lhs: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            let step = ((r - lhs) / norms[k]).max(-y[k]);
            y[k] += step;
            for i in 0..n {
                x[i] += step * a[i] / (2.0 * w[i]);
            }
        }
    }
    x
}

/// Visits every chain from `start` with `1..=max_steps` steps of length in `(0, eps]`.
pub fn for_each_chain(space: &PointCloudSpace, eps: f64, start: usize, max_steps: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(space: &PointCloudSpace, eps: f64, max_steps: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() > 1 {
            f(cur);
        }
        if cur.len() > max_steps {
            return;
        }
        let last = *cur.last().unwrap();
        for j in 0..space.len() {
            let d = space.dist(last, j);
            if d > 0.0 && d <= eps {
                cur.push(j);
                rec(space, eps, max_steps, cur, f);
                cur.pop();
            }
        }
    }
    rec(space, eps, max_steps, &mut vec![start], f);
}

/// Left-to-right λ-integral, accumulated in chain order.
pub fn chain_cost(space: &PointCloudSpace, g: &[f64], lambda: f64, chain: &[usize]) -> f64 {
    let mut c = 0.0;
    for w in chain.windows(2) {
        c += step_integral(g[w[0]], g[w[1]], lambda, space.dist(w[0], w[1]));
    }
    c
}

pub fn chain_length(space: &PointCloudSpace, chain: &[usize]) -> f64 {
    let mut l = 0.0;
    for w in chain.windows(2) {
        l += space.dist(w[0], w[1]);
    }
    l
}

/// Two-point rows of the two-sided λ = 1/2 gradient program, built from scratch.
pub fn gradient_rows(space: &PointCloudSpace, u: &[f64], eps: f64) -> Vec<(Vec<f64>, f64)> {
    let n = space.len();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(i, j);
            if d <= eps {
                let mut a = vec![0.0; n];
                a[i] = 0.5;
                a[j] = 0.5;
                rows.push((a, (u[j] - u[i]).abs() / d));
            }
        }
    }
    rows
}
