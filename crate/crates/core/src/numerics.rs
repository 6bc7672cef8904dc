//! Small numerical kernels shared across the crate: bracketed root finding,
//! damped complex Newton iteration, adaptive quadrature, and least-squares
//! line fitting.
//!
//! These are deliberately minimal, domain-tuned implementations; they favor
//! predictable behavior on the well-conditioned problems this crate produces
//! over generality.

use num_complex::Complex64;

use crate::Error;

/// Root of `f` on `[a, b]` by bisection. Requires a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64, Error> {
    let (mut lo, mut hi) = (a, b);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerics(format!(
            "bisect: no sign change on [{lo:e}, {hi:e}] (f = {flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Safeguarded scalar Newton iteration with a bisection fallback whenever the
/// Newton step leaves the bracket. `f` must be monotone on `[a, b]`.
pub fn newton_bracketed<F: Fn(f64) -> (f64, f64)>(
    f: F,
    a: f64,
    b: f64,
    x0: f64,
    ftol: f64,
) -> Result<f64, Error> {
    let (mut lo, mut hi) = (a, b);
    let mut x = x0.clamp(lo, hi);
    for _ in 0..100 {
        let (fx, dfx) = f(x);
        if fx.abs() < ftol {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = if dfx != 0.0 { fx / dfx } else { f64::NAN };
        let xn = x - step;
        x = if xn.is_finite() && xn > lo && xn < hi {
            xn
        } else {
            0.5 * (lo + hi)
        };
    }
    let (fx, _) = f(x);
    if fx.abs() < ftol * 1e3 {
        Ok(x)
    } else {
        Err(Error::Numerics(format!(
            "newton_bracketed: no convergence (residual {fx:e})"
        )))
    }
}

/// Result of a damped complex Newton search.
pub struct NewtonTrace {
    pub root: Complex64,
    pub converged: bool,
    pub iterations: usize,
    /// Iterates visited, kept for diagnostics on non-convergence.
    pub trajectory: Vec<Complex64>,
}

/// Damped Newton iteration in the complex plane. `f` returns `(F(s), F'(s))`.
/// The step is halved until the residual decreases (up to 40 halvings).
pub fn newton_damped_complex<F: Fn(Complex64) -> (Complex64, Complex64)>(
    f: F,
    seed: Complex64,
    rtol: f64,
    max_iter: usize,
) -> NewtonTrace {
    let mut s = seed;
    let mut trajectory = vec![s];
    for it in 0..max_iter {
        let (fs, dfs) = f(s);
        if fs.norm() < rtol * s.norm().max(1.0) {
            return NewtonTrace {
                root: s,
                converged: true,
                iterations: it,
                trajectory,
            };
        }
        let mut step = fs / dfs;
        let mut s_next = s - step;
        for _ in 0..40 {
            if f(s_next).0.norm() < fs.norm() {
                break;
            }
            step *= 0.5;
            s_next = s - step;
        }
        s = s_next;
        trajectory.push(s);
    }
    let converged = f(s).0.norm() < rtol * s.norm().max(1.0);
    NewtonTrace {
        root: s,
        converged,
        iterations: max_iter,
        trajectory,
    }
}

/// Adaptive Simpson quadrature for a complex-valued integrand on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<Complex64, Error> {
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + fm * 4.0 + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        abs_tol: f64,
        depth: usize,
    ) -> Result<Complex64, Error> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.norm() <= 15.0 * abs_tol || (b - a) < 1e-14 * (b.abs() + a.abs() + 1.0) {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Numerics("adaptive_simpson: max depth reached".into()));
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)?;
        Ok(l + r)
    }

    // Coarse L1 estimate to turn the relative tolerance into an absolute
    // one; the L1 norm is immune to cancellation in oscillatory integrands.
    let n0 = 64usize;
    let h = (b - a) / n0 as f64;
    let mut l1 = 0.0;
    for i in 0..n0 {
        l1 += f(a + (i as f64 + 0.5) * h).norm() * h;
    }
    let scale = l1.max(1e-300);
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, 48)
}

/// Least-squares straight line through `(x, y)` pairs; returns `(slope, intercept)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), Error> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Numerics("linear_fit: need at least two points".into()));
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::Numerics("linear_fit: degenerate abscissae".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok((slope, intercept))
}

/// Trapezoid sum over uniformly spaced samples.
pub fn trapezoid_uniform(ys: &[f64], dx: f64) -> f64 {
    if ys.len() < 2 {
        return 0.0;
    }
    let inner: f64 = ys[1..ys.len() - 1].iter().sum();
    dx * (0.5 * (ys[0] + ys[ys.len() - 1]) + inner)
}
