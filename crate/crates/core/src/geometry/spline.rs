//! Chord-length parametrised cubic splines used for arclength resampling.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::Vec2;

/// Five-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Piecewise cubic interpolant through the curve nodes, one segment per
/// chord, parametrised on `[0, chord_i]` within segment `i`.
pub(crate) struct CubicSpline {
    points: Vec<Vec2>,
    /// Second derivatives with respect to the chord parameter at each knot.
    second: Vec<Vec2>,
    chords: Vec<f64>,
    closed: bool,
}

impl CubicSpline {
    pub(crate) fn new(points: &[Vec2], closed: bool) -> Self {
        let n = points.len();
        let seg = if closed { n } else { n - 1 };
        let chords: Vec<f64> = (0..seg)
            .map(|i| points[(i + 1) % n].dist(points[i]))
            .collect();
        let second = if closed {
            periodic_second_derivatives(points, &chords)
        } else {
            natural_second_derivatives(points, &chords)
        };
        Self {
            points: points.to_vec(),
            second,
            chords,
            closed,
        }
    }

    pub(crate) fn segments(&self) -> usize {
        self.chords.len()
    }

    fn knot(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.points.len();
        let j = if self.closed { i % n } else { i };
        (self.points[j], self.second[j])
    }

    pub(crate) fn eval(&self, seg: usize, t: f64) -> Vec2 {
        let h = self.chords[seg];
        let (p0, m0) = self.knot(seg);
        let (p1, m1) = self.knot(seg + 1);
        let a = (h - t) / h;
        let b = t / h;
        p0 * a + p1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / 6.0)
    }

    pub(crate) fn deriv(&self, seg: usize, t: f64) -> Vec2 {
        let h = self.chords[seg];
        let (p0, m0) = self.knot(seg);
        let (p1, m1) = self.knot(seg + 1);
        let a = (h - t) / h;
        let b = t / h;
        (p1 - p0) / h + (m1 * (3.0 * b * b - 1.0) - m0 * (3.0 * a * a - 1.0)) * (h / 6.0)
    }

    /// Arclength of segment `seg` between parameters `0` and `t`.
    pub(crate) fn arclength(&self, seg: usize, t: f64) -> f64 {
        let half = 0.5 * t;
        let mut acc = 0.0;
        for k in 0..5 {
            let tau = half * (GAUSS_NODES[k] + 1.0);
            acc += GAUSS_WEIGHTS[k] * self.deriv(seg, tau).norm();
        }
        acc * half
    }

    pub(crate) fn segment_length(&self, seg: usize) -> f64 {
        // Two panels keep the quadrature error well below the O(h^4) interpolation error.
        let h = self.chords[seg];
        let mid = 0.5 * h;
        let first = self.arclength(seg, mid);
        let mut acc = 0.0;
        for k in 0..5 {
            let tau = mid + 0.5 * mid * (GAUSS_NODES[k] + 1.0);
            acc += GAUSS_WEIGHTS[k] * self.deriv(seg, tau).norm();
        }
        first + acc * 0.5 * mid
    }

    /// Parameter in segment `seg` at which the arclength from the segment
    /// start equals `target`.
    pub(crate) fn invert(&self, seg: usize, target: f64, seg_len: f64) -> f64 {
        let h = self.chords[seg];
        let mut t = (target / seg_len * h).clamp(0.0, h);
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..40 {
            let f = self.arclength(seg, t) - target;
            if f.abs() < 1e-15 * seg_len.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let speed = self.deriv(seg, t).norm();
            let next = t - f / speed;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        t
    }
}

fn natural_second_derivatives(p: &[Vec2], h: &[f64]) -> Vec<Vec2> {
    let n = p.len();
    let mut m = vec![Vec2::ZERO; n];
    if n < 3 {
        return m;
    }
    // Interior equations i = 1..n-2.
    let k = n - 2;
    let mut lower = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rx = vec![0.0; k];
    let mut ry = vec![0.0; k];
    for r in 0..k {
        let i = r + 1;
        lower[r] = h[i - 1];
        diag[r] = 2.0 * (h[i - 1] + h[i]);
        upper[r] = h[i];
        let d = (p[i + 1] - p[i]) / h[i] - (p[i] - p[i - 1]) / h[i - 1];
        rx[r] = 6.0 * d.x;
        ry[r] = 6.0 * d.y;
    }
    let sx = crate::math::solve_tridiagonal(&lower, &diag, &upper, &rx).unwrap_or_else(|| vec![0.0; k]);
    let sy = crate::math::solve_tridiagonal(&lower, &diag, &upper, &ry).unwrap_or_else(|| vec![0.0; k]);
    for r in 0..k {
        m[r + 1] = Vec2::new(sx[r], sy[r]);
    }
    m
}

fn periodic_second_derivatives(p: &[Vec2], h: &[f64]) -> Vec<Vec2> {
    let n = p.len();
    // Cyclic tridiagonal system, solved by Sherman–Morrison.
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rx = vec![0.0; n];
    let mut ry = vec![0.0; n];
    for i in 0..n {
        let hp = h[(i + n - 1) % n];
        let hn = h[i];
        lower[i] = hp;
        diag[i] = 2.0 * (hp + hn);
        upper[i] = hn;
        let d = (p[(i + 1) % n] - p[i]) / hn - (p[i] - p[(i + n - 1) % n]) / hp;
        rx[i] = 6.0 * d.x;
        ry[i] = 6.0 * d.y;
    }
    let sx = solve_cyclic(&lower, &diag, &upper, &rx);
    let sy = solve_cyclic(&lower, &diag, &upper, &ry);
    (0..n).map(|i| Vec2::new(sx[i], sy[i])).collect()
}

fn solve_cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    let x = crate::math::solve_tridiagonal(lower, &b, upper, rhs).unwrap_or_else(|| vec![0.0; n]);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = crate::math::solve_tridiagonal(lower, &b, upper, &u).unwrap_or_else(|| vec![0.0; n]);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}
