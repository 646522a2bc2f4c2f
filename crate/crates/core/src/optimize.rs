//! One-dimensional root finding and minimization.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Brent's bracketed root search (bisection, secant and inverse quadratic
/// steps). Requires `f(lo)` and `f(hi)` of opposite sign. Stops when
/// `|f| < ftol` or the bracket is narrower than `xtol`.
pub fn brent_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    ftol: f64,
    xtol: f64,
    max_iter: usize,
) -> Root {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
        let (x, fx) = if fa.abs() <= fb.abs() {
            (a, fa)
        } else {
            (b, fb)
        };
        return Root {
            x,
            fx,
            iterations: 0,
            converged: fx == 0.0,
        };
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 0.5 * xtol;
        let half = 0.5 * (c - b);
        if fb.abs() < ftol || half.abs() <= tol {
            return Root {
                x: b,
                fx: fb,
                iterations: iter,
                converged: true,
            };
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
    }
    Root {
        x: b,
        fx: fb,
        iterations: max_iter,
        converged: fb.abs() < ftol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Brent's minimizer (golden section with parabolic steps) on `[a, b]`,
/// started from the interior point `start`. The returned value never
/// exceeds `f(start)`.
pub fn brent_min<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    start: f64,
    xtol: f64,
    max_iter: usize,
) -> Minimum {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = start.clamp(a, b);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for iter in 1..=max_iter {
        let mid = 0.5 * (a + b);
        let tol1 = 0.5 * xtol + 1e-3 * f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            return Minimum {
                x,
                fx,
                iterations: iter,
                converged: true,
            };
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(mid - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum {
        x,
        fx,
        iterations: max_iter,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_of_cubic() {
        let r = brent_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 1e-15, 200);
        assert!(r.converged);
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn root_without_sign_change_reports_best_end() {
        let r = brent_root(|x| x * x + 1.0, -1.0, 2.0, 1e-12, 1e-14, 50);
        assert!(!r.converged);
        assert_eq!(r.x, -1.0);
    }

    #[test]
    fn minimum_of_shifted_quadratic() {
        let m = brent_min(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 0.5, 1e-10, 200);
        assert!(m.converged);
        assert!((m.x - 0.3).abs() < 1e-8);
        assert!((m.fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn minimum_never_worse_than_start() {
        let f = |x: f64| (10.0 * x).sin() + x;
        for start in [0.1, 0.45, 0.8] {
            let m = brent_min(f, 0.0, 1.0, start, 1e-10, 200);
            assert!(m.fx <= f(start));
        }
    }

    #[test]
    fn minimum_at_boundary() {
        let m = brent_min(|x| x, 0.0, 1.0, 0.5, 1e-10, 500);
        assert!(m.x < 1e-9);
    }
}
