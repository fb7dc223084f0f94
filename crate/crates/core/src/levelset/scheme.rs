use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::grid::{BoundaryPolicy, GridField, GridSpec};
use super::LevelSetError;
use crate::math::Real;

/// Explicit time stepping parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolveOptions {
    /// `Δt = cfl·h²`.
    pub cfl: f64,
    /// Steps between fast-marching redistancing passes.
    pub reinit_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { cfl: 0.2, reinit_every: 50 }
    }
}

/// Evolves `field` by the level set equation
/// `u_t = |∇u|_ε div(∇u/|∇u|_ε)` with `ε = h`, returning one field per
/// entry of `times` (increasing, all after `field.t`).
pub fn evolve_level_set(field: &GridField, times: &[f64], opts: EvolveOptions) -> Result<Vec<GridField>, LevelSetError> {
    if !(opts.cfl > 0.0 && opts.cfl <= 0.25) {
        return Err(LevelSetError::InvalidParameter { name: "cfl", value: opts.cfl });
    }
    if opts.reinit_every == 0 {
        return Err(LevelSetError::InvalidParameter { name: "reinit_every", value: 0.0 });
    }
    let mut prev = field.t;
    for &t in times {
        if !(t > prev) || !t.is_finite() {
            return Err(LevelSetError::TimesNotIncreasing);
        }
        prev = t;
    }
    let spec = field.spec;
    let n = spec.n;
    let h = spec.spacing();
    let band = field.band;
    let dt_max = opts.cfl * h * h;
    let eps2 = h * h;
    let ring: Vec<(usize, f64)> = (0..n)
        .flat_map(|k| [spec.index(k, 0), spec.index(k, n - 1), spec.index(0, k), spec.index(n - 1, k)])
        .map(|k| (k, field.values[k]))
        .collect();
    let mut u = field.values.clone();
    let mut next = u.clone();
    let mut active = active_cells(&u, n, band);
    let mut t = field.t;
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(times.len());
    let (inv_h2, inv_4h2, inv_2h) = (1.0 / (h * h), 0.25 / (h * h), 0.5 / h);
    for &t_out in times {
        while t < t_out {
            let dt = if t + dt_max >= t_out { t_out - t } else { dt_max };
            for &k in &active {
                let c = u[k];
                let (e, w, nn, s) = (u[k + 1], u[k - 1], u[k + n], u[k - n]);
                let ux = (e - w) * inv_2h;
                let uy = (nn - s) * inv_2h;
                let uxx = (e - 2.0 * c + w) * inv_h2;
                let uyy = (nn - 2.0 * c + s) * inv_h2;
                let uxy = (u[k + n + 1] - u[k - n + 1] - u[k + n - 1] + u[k - n - 1]) * inv_4h2;
                let (px, py) = (ux * ux, uy * uy);
                let rate = ((py + eps2) * uxx - 2.0 * ux * uy * uxy + (px + eps2) * uyy) / (px + py + eps2);
                next[k] = (c + dt * rate).clamp(-band, band);
            }
            for &k in &active {
                u[k] = next[k];
            }
            t = if dt == dt_max { t + dt } else { t_out };
            steps += 1;
            if steps.is_multiple_of(opts.reinit_every) {
                reinitialize(&mut u, &spec, band);
                for &(k, v) in &ring {
                    u[k] = v;
                }
                next.copy_from_slice(&u);
                active = active_cells(&u, n, band);
                if field.boundary == BoundaryPolicy::Buffered {
                    monitor_buffer(&u, &spec, band, t)?;
                }
            }
        }
        if field.boundary == BoundaryPolicy::Buffered {
            monitor_buffer(&u, &spec, band, t)?;
        }
        out.push(GridField { values: u.clone(), t: t_out, ..field.clone() });
    }
    Ok(out)
}

/// Interior cells strictly inside the band.
fn active_cells(u: &[f64], n: usize, band: f64) -> Vec<usize> {
    let mut out = Vec::new();
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = j * n + i;
            if u[k].abs() < band {
                out.push(k);
            }
        }
    }
    out
}

/// Fails once the front comes within the band plus four cells of the edge.
fn monitor_buffer(u: &[f64], spec: &GridSpec, band: f64, t: f64) -> Result<(), LevelSetError> {
    let n = spec.n;
    let h = spec.spacing();
    let cells = ((band / h).ceil() as usize + 4).min(n / 2);
    for j in 0..n {
        for i in 0..n {
            let edge = i.min(j).min(n - 1 - i).min(n - 1 - j);
            if edge < cells && u[spec.index(i, j)].abs() < 2.0 * h {
                return Err(LevelSetError::FrontAtBoundary { t });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
struct Trial(f64, usize);

impl Eq for Trial {}

impl PartialOrd for Trial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Trial {
    // Reversed so the max-heap pops the smallest distance.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Cells within this many spacings of the front keep their values during
/// redistancing. The curvature stencils of the cells next to the front then
/// never see first-order fast-marching values, which would otherwise shift
/// the front by `O(h²)` per pass.
pub const KEEP_CELLS: f64 = 3.0;

/// Fast-marching redistancing within `band`: cells with `|u| < KEEP_CELLS·h`
/// keep their values, the rest solve `|∇d| = 1` outward from them.
/// Signs are kept; values beyond the band are clamped.
pub fn reinitialize(u: &mut [f64], spec: &GridSpec, band: f64) {
    let n = spec.n;
    let h = spec.spacing();
    let mut dist = alloc::vec![f64::INFINITY; u.len()];
    let mut accepted = alloc::vec![false; u.len()];
    let mut heap = BinaryHeap::new();
    for j in 0..n {
        for i in 0..n {
            let k = j * n + i;
            let c = u[k];
            if c == 0.0 {
                dist[k] = 0.0;
                heap.push(Trial(0.0, k));
                continue;
            }
            if c.abs() >= KEEP_CELLS * h {
                continue;
            }
            // Fields far from a distance function are rescaled first.
            let (i0, i1, j0, j1) = (i.saturating_sub(1), (i + 1).min(n - 1), j.saturating_sub(1), (j + 1).min(n - 1));
            let gx = (u[j * n + i1] - u[j * n + i0]) / ((i1 - i0) as f64 * h);
            let gy = (u[j1 * n + i] - u[j0 * n + i]) / ((j1 - j0) as f64 * h);
            let g = (gx * gx + gy * gy).sqrt();
            let d = if (0.5..=2.0).contains(&g) { c.abs() } else { c.abs() / g.max(1e-12) };
            dist[k] = d;
            heap.push(Trial(d, k));
        }
    }
    while let Some(Trial(d, k)) = heap.pop() {
        if accepted[k] || d > dist[k] {
            continue;
        }
        accepted[k] = true;
        if d > band {
            break;
        }
        let (i, j) = (k % n, k / n);
        let nbrs = [(i > 0, k.wrapping_sub(1)), (i + 1 < n, k + 1), (j > 0, k.wrapping_sub(n)), (j + 1 < n, k + n)];
        for (ok, m) in nbrs {
            if !ok || accepted[m] {
                continue;
            }
            let (mi, mj) = (m % n, m / n);
            let pick = |a: bool, x: usize| if a && accepted[x] { dist[x] } else { f64::INFINITY };
            let a = pick(mi > 0, m.wrapping_sub(1)).min(pick(mi + 1 < n, m + 1));
            let b = pick(mj > 0, m.wrapping_sub(n)).min(pick(mj + 1 < n, m + n));
            let cand = if (a - b).abs() >= h || !a.is_finite() || !b.is_finite() {
                a.min(b) + h
            } else {
                0.5 * (a + b + (2.0 * h * h - (a - b) * (a - b)).sqrt())
            };
            if cand < dist[m] {
                dist[m] = cand;
                heap.push(Trial(cand, m));
            }
        }
    }
    for (k, v) in u.iter_mut().enumerate() {
        let d = dist[k].min(band);
        *v = if *v < 0.0 { -d } else { d };
    }
}
