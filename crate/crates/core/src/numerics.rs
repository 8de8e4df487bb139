//! Shared numerical kernels: quadrature, splines, finite differences.

use alloc::vec;
use alloc::vec::Vec;

/// Fourth-order central difference for the first derivative.
pub fn central_diff1(f: &dyn Fn(f64) -> f64, u: f64, h: f64) -> f64 {
    (-f(u + 2.0 * h) + 8.0 * f(u + h) - 8.0 * f(u - h) + f(u - 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central difference for the second derivative.
pub fn central_diff2(f: &dyn Fn(f64) -> f64, u: f64, h: f64) -> f64 {
    (-f(u + 2.0 * h) + 16.0 * f(u + h) - 30.0 * f(u) + 16.0 * f(u - h) - f(u - 2.0 * h))
        / (12.0 * h * h)
}

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = adaptive_simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)?;
    let r = adaptive_simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Returns `None` when the requested tolerance cannot be reached within the
/// recursion budget.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    if a == b {
        return Some(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    adaptive_simpson_rec(f, a, fa, b, fb, fm, whole, tol, 48)
}

/// Composite trapezoid of samples `y` at abscissae `x`, cumulative from `x[0]`.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        if i > 0 {
            acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Clamped cubic spline through `(x, y)` with prescribed end slopes.
///
/// Nodes must be strictly increasing. The clamped boundary keeps fourth-order
/// accuracy up to the ends, which the arc-length reparametrization relies on.
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn clamped(x: Vec<f64>, y: Vec<f64>, d0: f64, dn: f64) -> Option<CubicSpline> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return None;
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return None;
            }
        }
        // Tridiagonal system for the second derivatives (natural ordering).
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut lower = vec![0.0; n];

        let h0 = x[1] - x[0];
        diag[0] = 2.0 * h0;
        upper[0] = h0;
        rhs[0] = 6.0 * ((y[1] - y[0]) / h0 - d0);
        for i in 1..n - 1 {
            let hm = x[i] - x[i - 1];
            let hp = x[i + 1] - x[i];
            lower[i] = hm;
            diag[i] = 2.0 * (hm + hp);
            upper[i] = hp;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hp - (y[i] - y[i - 1]) / hm);
        }
        let hn = x[n - 1] - x[n - 2];
        lower[n - 1] = hn;
        diag[n - 1] = 2.0 * hn;
        rhs[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / hn);

        // Thomas algorithm.
        for i in 1..n {
            let w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        }
        Some(CubicSpline { x, y, m })
    }

    /// Natural spline (zero second derivative at the ends).
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Option<CubicSpline> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return None;
        }
        // Use finite-difference end slopes; for interior evaluation the
        // difference from a true natural spline is confined to the end panels.
        let d0 = (y[1] - y[0]) / (x[1] - x[0]);
        let dn = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
        CubicSpline::clamped(x, y, d0, dn)
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        if t <= self.x[0] {
            return 0;
        }
        if t >= self.x[n - 1] {
            return n - 2;
        }
        // Binary search for the panel containing t.
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }
}

/// Monotone cubic interpolant (Fritsch–Carlson limited slopes).
///
/// Used for arc-length resampling of polygonal curves: the limiter keeps the
/// interpolant free of overshoot between vertices.
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Option<MonotoneCubic> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return None;
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return None;
            }
        }
        let mut slopes = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            slopes.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
        }
        let mut d = vec![0.0; n];
        d[0] = slopes[0];
        d[n - 1] = slopes[n - 2];
        for i in 1..n - 1 {
            if slopes[i - 1] * slopes[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                d[i] = (w1 + w2) / (w1 / slopes[i - 1] + w2 / slopes[i]);
            }
        }
        Some(MonotoneCubic { x, y, d })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = if t <= self.x[0] {
            0
        } else if t >= self.x[n - 1] {
            n - 2
        } else {
            let mut lo = 0;
            let mut hi = n - 1;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.x[mid] <= t {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// Solve `g(u) = target` for strictly increasing `g` by safeguarded Newton.
///
/// `bracket` must contain the root; `dg` is the derivative of `g`.
pub fn invert_increasing(
    g: &dyn Fn(f64) -> f64,
    dg: &dyn Fn(f64) -> f64,
    target: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Option<f64> {
    let (mut lo, mut hi) = bracket;
    if !(g(lo) - target <= 0.0 && g(hi) - target >= 0.0) {
        return None;
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let r = g(u) - target;
        if r.abs() <= tol {
            return Some(u);
        }
        if r > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let slope = dg(u);
        let newton = if slope > 0.0 { u - r / slope } else { f64::NAN };
        u = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * (1.0 + u.abs()) {
            return Some(u);
        }
    }
    Some(u)
}

/// Wrap an angle difference into `(-pi, pi]` (period `p`, default callers use 2*pi).
pub fn wrap_signed(delta: f64, period: f64) -> f64 {
    let mut d = delta % period;
    if d > 0.5 * period {
        d -= period;
    } else if d <= -0.5 * period {
        d += period;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn simpson_integrates_cosine() {
        let v = adaptive_simpson(&libm::cos, 0.0, PI / 2.0, 1e-13).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clamped_spline_reproduces_cubic() {
        // An exact cubic must be reproduced by the clamped spline at the
        // machine level away from conditioning noise.
        let f = |t: f64| t * t * t - 2.0 * t;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let x: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let sp = CubicSpline::clamped(x, y, df(0.0), df(2.0)).unwrap();
        for i in 0..=100 {
            let t = i as f64 * 0.02;
            assert!((sp.eval(t) - f(t)).abs() < 1e-12);
            assert!((sp.deriv(t) - df(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_cubic_no_overshoot() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![0.0, 0.0, 1.0, 1.0];
        let mc = MonotoneCubic::new(x, y).unwrap();
        for i in 0..=300 {
            let t = i as f64 * 0.01;
            let v = mc.eval(t);
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "overshoot at {t}: {v}");
        }
    }

    #[test]
    fn inversion_of_monotone_function() {
        let g = |u: f64| u + libm::sin(u);
        let dg = |u: f64| 1.0 + libm::cos(u);
        let u = invert_increasing(&g, &dg, 1.3, (0.0, 3.0), 1e-14).unwrap();
        assert!((g(u) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn wrap_lands_in_half_open_interval() {
        assert!((wrap_signed(3.0 * PI, 2.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_signed(-3.0 * PI, 2.0 * PI) - PI).abs() < 1e-12);
        assert!(wrap_signed(0.3, 2.0 * PI) == 0.3);
    }
}
