use crate::chain::step_integral;
use crate::error::{check_lambda, Error, Result};

/// Shifted λ-Riemann sum of `f` over `[0, ell]` on the partition
/// `0 <= ell t/n < ell (t+1)/n < ... < ell (t+n-1)/n <= ell`.
pub fn riemann_sum(f: impl Fn(f64) -> f64, ell: f64, t: f64, n: usize, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidArgument(format!("interval length must be positive, got {ell}")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("shift t must lie in [0, 1], got {t}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let (f0, fl) = (f(0.0), f(ell));
    if !f0.is_finite() || !fl.is_finite() {
        return Err(Error::InvalidArgument("f must be finite at both ends".into()));
    }
    let nf = n as f64;
    let node = |i: usize| ell * (t + i as f64) / nf;
    let mut prev = f(node(0));
    let mut sum = step_integral(f0, prev, lambda, ell * t / nf);
    for i in 0..n - 1 {
        let next = f(node(i + 1));
        sum += step_integral(prev, next, lambda, ell / nf);
        prev = next;
    }
    sum += step_integral(prev, fl, lambda, ell * (1.0 - t) / nf);
    Ok(sum)
}
