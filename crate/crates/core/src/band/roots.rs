//! Brent's method on a bracket with a sign change.

/// Returns `x` in `[a, b]` with `f(x)` crossing zero, to absolute width
/// `xtol` or until `max_iter` iterations. `f(a)` and `f(b)` must differ in sign.
pub(crate) fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
    max_iter: usize,
) -> (f64, f64, usize) {
    debug_assert!(fa * fb <= 0.0);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 0..max_iter {
        if fb == 0.0 {
            return (b, fb, iter);
        }
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol {
            return (b, fb, iter);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    (b, fb, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let f = |x: f64| x * x * x - 2.0;
        let (x, _, it) = brent(f, 0.0, 2.0, -2.0, 6.0, 1e-15, 100);
        assert!((x - 2.0_f64.cbrt()).abs() < 1e-14);
        assert!(it < 20);
    }

    #[test]
    fn handles_flat_then_steep() {
        let f = |x: f64| (x - 0.3).exp() - 1.0;
        let (x, _, _) = brent(f, -50.0, 10.0, f(-50.0), f(10.0), 1e-14, 200);
        assert!((x - 0.3).abs() < 1e-13);
    }
}
