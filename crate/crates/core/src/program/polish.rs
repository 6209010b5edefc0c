//! Active-set Newton refinement of an interior-point solution (`p > 1`).

use nalgebra::{DMatrix, DVector};

use super::{kkt_residual, Reduced};

/// Dense Schur complements are formed only below this many active rows.
const MAX_ACTIVE_ROWS: usize = 2500;

/// Returns a refined `(x, y)` when it is feasible and strictly improves the
/// KKT residual; `None` otherwise.
pub(super) fn polish(red: &Reduced, p: f64, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let xmax = x.iter().copied().fold(0.0, f64::max);
    let ymax = y.iter().copied().fold(0.0, f64::max);
    if !(xmax > 0.0 && ymax > 0.0) {
        return None;
    }
    let before = kkt_residual(red, p, x, y);
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for &cut in &[1e-6, 1e-4, 1e-8] {
        let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > cut * xmax).collect();
        let active: Vec<usize> = (0..y.len()).filter(|&j| y[j] > cut * ymax).collect();
        if active.is_empty() || active.len() > MAX_ACTIVE_ROWS || support.iter().any(|&i| red.weights[i] == 0.0) {
            continue;
        }
        if let Some((xn, yn)) = newton(red, p, x, y, &support, &active) {
            let feasible = red.rows.iter().all(|r| r.lhs(&xn) >= r.rhs - 1e-13 * r.rhs.abs().max(1.0));
            if !feasible {
                continue;
            }
            let after = kkt_residual(red, p, &xn, &yn);
            if after < before && best.as_ref().is_none_or(|b| after < b.0) {
                best = Some((after, xn, yn));
            }
        }
    }
    best.map(|(_, xn, yn)| (xn, yn))
}

fn newton(
    red: &Reduced,
    p: f64,
    x0: &[f64],
    y0: &[f64],
    support: &[usize],
    active: &[usize],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let k = x0.len();
    let mut pos = vec![usize::MAX; k];
    for (s, &i) in support.iter().enumerate() {
        pos[i] = s;
    }
    // Active rows restricted to the support, as (support slot, coefficient).
    let rows: Vec<Vec<(usize, f64)>> = active
        .iter()
        .map(|&j| red.rows[j].coeffs.iter().filter(|&&(i, _)| pos[i] != usize::MAX).map(|&(i, a)| (pos[i], a)).collect())
        .collect();
    let rhs: Vec<f64> = active.iter().map(|&j| red.rows[j].rhs).collect();
    let w: Vec<f64> = support.iter().map(|&i| red.weights[i]).collect();
    let mut xs: Vec<f64> = support.iter().map(|&i| x0[i]).collect();
    let mut ys: Vec<f64> = active.iter().map(|&j| y0[j]).collect();
    let (ns, na) = (xs.len(), ys.len());

    for _ in 0..40 {
        let grad: Vec<f64> = (0..ns).map(|s| p * w[s] * xs[s].powf(p - 1.0)).collect();
        let hess: Vec<f64> = (0..ns).map(|s| p * (p - 1.0) * w[s] * xs[s].powf(p - 2.0)).collect();
        let mut rd = grad.clone();
        for (r, row) in rows.iter().enumerate() {
            for &(s, a) in row {
                rd[s] -= a * ys[r];
            }
        }
        let rp: Vec<f64> = rows.iter().zip(&rhs).map(|(row, &b)| row.iter().map(|&(s, a)| a * xs[s]).sum::<f64>() - b).collect();
        let scale = grad.iter().chain(&rhs).fold(1.0f64, |m, v| m.max(v.abs()));
        let res = rd.iter().chain(&rp).fold(0.0f64, |m, v| m.max(v.abs()));
        if res <= 1e-15 * scale {
            break;
        }
        // (A H^-1 Aᵀ) dy = -rp + A H^-1 rd ;  dx = H^-1 (Aᵀ dy - rd)
        let mut m = DMatrix::<f64>::zeros(na, na);
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ns];
        for (r, row) in rows.iter().enumerate() {
            for &(s, a) in row {
                cols[s].push((r, a));
            }
        }
        for (s, col) in cols.iter().enumerate() {
            let hinv = 1.0 / hess[s];
            for &(r1, a1) in col {
                for &(r2, a2) in col {
                    m[(r1, r2)] += a1 * a2 * hinv;
                }
            }
        }
        let diag_max = (0..na).map(|r| m[(r, r)]).fold(0.0f64, f64::max);
        for r in 0..na {
            m[(r, r)] += 1e-14 * diag_max.max(1e-300);
        }
        let mut b = DVector::<f64>::zeros(na);
        for (r, row) in rows.iter().enumerate() {
            b[r] = -rp[r] + row.iter().map(|&(s, a)| a * rd[s] / hess[s]).sum::<f64>();
        }
        let dy = m.clone().cholesky().map(|c| c.solve(&b)).or_else(|| m.lu().solve(&b))?;
        let mut aty = vec![0.0; ns];
        for (r, row) in rows.iter().enumerate() {
            for &(s, a) in row {
                aty[s] += a * dy[r];
            }
        }
        let dx: Vec<f64> = (0..ns).map(|s| (aty[s] - rd[s]) / hess[s]).collect();
        // Fraction to the boundary keeps the support strictly positive.
        let mut step: f64 = 1.0;
        for s in 0..ns {
            if dx[s] < 0.0 {
                step = step.min(0.99 * xs[s] / -dx[s]);
            }
        }
        for s in 0..ns {
            xs[s] += step * dx[s];
        }
        for r in 0..na {
            ys[r] += step * dy[r];
        }
        if !xs.iter().chain(&ys).all(|v| v.is_finite()) {
            return None;
        }
    }
    if ys.iter().any(|&v| v < 0.0) {
        return None;
    }
    let mut x = vec![0.0; k];
    for (s, &i) in support.iter().enumerate() {
        x[i] = xs[s];
    }
    let mut y = vec![0.0; red.rows.len()];
    for (r, &j) in active.iter().enumerate() {
        y[j] = ys[r];
    }
    Some((x, y))
}
