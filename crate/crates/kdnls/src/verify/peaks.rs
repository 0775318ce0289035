use super::VerifyError;
use crate::numerics::ComplexField2D;
use serde::{Deserialize, Serialize};

/// Default ratio of peak height to background.
pub const THRESHOLD_RATIO: f64 = 4.0;
/// A single peak this many times taller than every other one makes the
/// pattern Fundamental.
pub const DOMINANCE_RATIO: f64 = 2.0;
/// Finest spacing accepted by [`peak_analysis`].
pub const MAX_SPACING: f64 = 0.1;
/// Minimum topographic prominence, in units of the background, for a local
/// maximum to count as a hump. Removes the chains of strict maxima a narrow
/// ridge leaves on a grid that is not aligned with it.
pub const MIN_PROMINENCE: f64 = 1.0;
/// Prominence floor relative to the tallest value, for vanishing backgrounds.
pub const RELATIVE_PROMINENCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Fundamental,
    Triangular,
    Ring,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub ix: usize,
    pub it: usize,
    /// Node coordinates.
    pub x: f64,
    pub t: f64,
    /// Sub-node location from a parabola through the neighbours.
    pub x_fit: f64,
    pub t_fit: f64,
    pub height: f64,
    /// Height above the highest saddle connecting to taller ground.
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub background: f64,
    pub threshold_ratio: f64,
    pub classification: Classification,
    /// Peaks on the ring when classified Ring.
    pub ring_size: usize,
}

/// Strict 8-neighbour maxima of `intensity` (real part holds |Q|²) above
/// `4 × background`, with background the median over the outer frame.
pub fn peak_analysis(
    intensity: &ComplexField2D,
    background_window: f64,
) -> Result<PeakSet, VerifyError> {
    peak_analysis_with(intensity, background_window, THRESHOLD_RATIO)
}

pub fn peak_analysis_with(
    intensity: &ComplexField2D,
    background_window: f64,
    threshold_ratio: f64,
) -> Result<PeakSet, VerifyError> {
    let g = intensity.grid;
    for spacing in [g.hx(), g.ht()] {
        if spacing > MAX_SPACING * (1.0 + 1e-9) {
            return Err(VerifyError::ResolutionTooCoarse {
                spacing,
                limit: MAX_SPACING,
            });
        }
    }
    if !(background_window > 0.0 && background_window < 0.5) {
        return Err(VerifyError::InvalidWindow(background_window));
    }
    let v = |i: usize, j: usize| {
        let k = g.index(i, j);
        if intensity.flagged[k] {
            f64::NAN
        } else {
            intensity.values[k].re
        }
    };
    let bx = ((g.nx as f64 * background_window).ceil() as usize).max(1);
    let bt = ((g.nt as f64 * background_window).ceil() as usize).max(1);
    let mut frame = Vec::new();
    for j in 0..g.nt {
        for i in 0..g.nx {
            if i < bx || i >= g.nx - bx || j < bt || j >= g.nt - bt {
                let z = v(i, j);
                if z.is_finite() {
                    frame.push(z);
                }
            }
        }
    }
    if frame.is_empty() {
        return Err(VerifyError::AllNodesExcluded);
    }
    frame.sort_by(|a, b| a.total_cmp(b));
    let mid = frame.len() / 2;
    let background = if frame.len() % 2 == 1 {
        frame[mid]
    } else {
        0.5 * (frame[mid - 1] + frame[mid])
    };
    let threshold = background * threshold_ratio;
    let prominence = prominences(intensity);
    let top = (0..g.len())
        .map(|k| v(k % g.nx, k / g.nx))
        .filter(|z| z.is_finite())
        .fold(0.0f64, f64::max);
    let min_prominence = (MIN_PROMINENCE * background).max(RELATIVE_PROMINENCE * top);
    let mut peaks = Vec::new();
    for j in 1..g.nt - 1 {
        for i in 1..g.nx - 1 {
            let c = v(i, j);
            if !(c.is_finite() && c >= threshold) {
                continue;
            }
            let mut strict = true;
            for dj in 0..3 {
                for di in 0..3 {
                    if di == 1 && dj == 1 {
                        continue;
                    }
                    let n = v(i + di - 1, j + dj - 1);
                    if n.partial_cmp(&c) != Some(std::cmp::Ordering::Less) {
                        strict = false;
                    }
                }
            }
            let prom = prominence[g.index(i, j)];
            if strict && prom >= min_prominence {
                let dx = vertex(v(i - 1, j), c, v(i + 1, j));
                let dt = vertex(v(i, j - 1), c, v(i, j + 1));
                peaks.push(Peak {
                    ix: i,
                    it: j,
                    x: g.x(i),
                    t: g.t(j),
                    x_fit: g.x(i) + dx * g.hx(),
                    t_fit: g.t(j) + dt * g.ht(),
                    height: c,
                    prominence: prom,
                });
            }
        }
    }
    peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
    let (classification, ring_size) = classify(&peaks);
    Ok(PeakSet {
        peaks,
        background,
        threshold_ratio,
        classification,
        ring_size,
    })
}

/// Prominence of every node that seeds a flooding component (zero elsewhere),
/// by descending union-find flooding over the 8-neighbour graph.
fn prominences(field: &ComplexField2D) -> Vec<f64> {
    let g = field.grid;
    let n = g.len();
    let val = |k: usize| {
        if field.flagged[k] {
            f64::NAN
        } else {
            field.values[k].re
        }
    };
    let mut order: Vec<usize> = (0..n).filter(|&k| val(k).is_finite()).collect();
    order.sort_by(|&a, &b| val(b).total_cmp(&val(a)));
    let floor = order.last().map(|&k| val(k)).unwrap_or(0.0);
    let mut parent = vec![usize::MAX; n];
    // component root -> node holding the component's maximum
    let mut summit = vec![usize::MAX; n];
    let mut prom = vec![0.0; n];
    fn find(parent: &mut [usize], mut k: usize) -> usize {
        while parent[k] != k {
            parent[k] = parent[parent[k]];
            k = parent[k];
        }
        k
    }
    for &k in &order {
        let (i, j) = (k % g.nx, k / g.nx);
        let level = val(k);
        let mut roots: Vec<usize> = Vec::with_capacity(8);
        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if (di == 0 && dj == 0)
                    || ii < 0
                    || jj < 0
                    || ii >= g.nx as i64
                    || jj >= g.nt as i64
                {
                    continue;
                }
                let m = g.index(ii as usize, jj as usize);
                if parent[m] != usize::MAX {
                    let r = find(&mut parent, m);
                    if !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        if roots.is_empty() {
            parent[k] = k;
            summit[k] = k;
            continue;
        }
        roots.sort_by(|&a, &b| val(summit[b]).total_cmp(&val(summit[a])));
        let main = roots[0];
        parent[k] = main;
        for &r in &roots[1..] {
            let s = summit[r];
            prom[s] = val(s) - level;
            parent[r] = main;
        }
    }
    for &k in &order {
        if parent[k] == k {
            prom[summit[k]] = val(summit[k]) - floor;
        }
    }
    prom
}

fn vertex(l: f64, c: f64, r: f64) -> f64 {
    let d = l - 2.0 * c + r;
    if d < 0.0 {
        (0.5 * (l - r) / d).clamp(-0.5, 0.5)
    } else {
        0.0
    }
}

fn classify(peaks: &[Peak]) -> (Classification, usize) {
    match peaks.len() {
        0 => return (Classification::Unclassified, 0),
        1 => return (Classification::Fundamental, 0),
        _ => {}
    }
    if peaks[0].height >= DOMINANCE_RATIO * peaks[1].height {
        return (Classification::Fundamental, 0);
    }
    if let Some(n) = ring(peaks) {
        return (Classification::Ring, n);
    }
    let pts: Vec<(f64, f64)> = peaks.iter().map(|p| (p.x_fit, p.t_fit)).collect();
    if matches!(peaks.len(), 3 | 6 | 10) && !collinear(&pts) {
        return (Classification::Triangular, 0);
    }
    (Classification::Unclassified, 0)
}

fn centroid(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (sx, st) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    (sx / n, st / n)
}

fn collinear(pts: &[(f64, f64)]) -> bool {
    let mut span = 0.0f64;
    for a in pts {
        for b in pts {
            span = span.max((a.0 - b.0).hypot(a.1 - b.1));
        }
    }
    if span == 0.0 {
        return true;
    }
    let mut area = 0.0f64;
    for a in pts {
        for b in pts {
            for c in pts {
                let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
                area = area.max(cross.abs() * 0.5);
            }
        }
    }
    area < 0.05 * span * span
}

/// Ring size when the outer peaks sit at near-uniform radius (spread ≤ 15%)
/// and angular spacing (gap spread ≤ 20%) about their centroid.
fn ring(peaks: &[Peak]) -> Option<usize> {
    if peaks.len() < 5 {
        return None;
    }
    let mut pts: Vec<(f64, f64)> = peaks.iter().map(|p| (p.x_fit, p.t_fit)).collect();
    if pts.len() >= 6 {
        let c = centroid(&pts);
        let d: Vec<f64> = pts.iter().map(|p| (p.0 - c.0).hypot(p.1 - c.1)).collect();
        let (k, dmin) =
            d.iter().enumerate().fold(
                (0, f64::INFINITY),
                |m, (k, &v)| if v < m.1 { (k, v) } else { m },
            );
        let mut sorted = d.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        if dmin < 0.35 * sorted[sorted.len() / 2] {
            pts.remove(k);
        }
    }
    if pts.len() < 5 {
        return None;
    }
    let c = centroid(&pts);
    let radii: Vec<f64> = pts.iter().map(|p| (p.0 - c.0).hypot(p.1 - c.1)).collect();
    let mean_r = radii.iter().sum::<f64>() / radii.len() as f64;
    let (rmin, rmax) = radii
        .iter()
        .fold((f64::INFINITY, 0.0f64), |m, &r| (m.0.min(r), m.1.max(r)));
    if mean_r == 0.0 || (rmax - rmin) / mean_r > 0.15 {
        return None;
    }
    let mut ang: Vec<f64> = pts.iter().map(|p| (p.1 - c.1).atan2(p.0 - c.0)).collect();
    ang.sort_by(|a, b| a.total_cmp(b));
    let mut gaps: Vec<f64> = ang.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(ang[0] + 2.0 * std::f64::consts::PI - ang[ang.len() - 1]);
    let mean_g = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let (gmin, gmax) = gaps
        .iter()
        .fold((f64::INFINITY, 0.0f64), |m, &g| (m.0.min(g), m.1.max(g)));
    if (gmax - gmin) / mean_g > 0.20 {
        return None;
    }
    Some(pts.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{sample, Grid2D};
    use num_complex::Complex64;

    fn bumps(centres: &[(f64, f64, f64)]) -> impl Fn(f64, f64) -> Complex64 + Sync + '_ {
        move |x, t| {
            let v = 1.0
                + centres
                    .iter()
                    .map(|&(cx, ct, h)| {
                        (h - 1.0) * (-((x - cx).powi(2) + (t - ct).powi(2)) * 2.0).exp()
                    })
                    .sum::<f64>();
            Complex64::new(v, 0.0)
        }
    }

    #[test]
    fn single_bump_is_fundamental() {
        let g = Grid2D::new(-5.0, 5.0, -5.0, 5.0, 201, 201).unwrap();
        let f = sample(bumps(&[(0.0, 0.0, 9.0)]), &g);
        let p = peak_analysis(&f, 0.1).unwrap();
        assert_eq!(p.peaks.len(), 1);
        assert_eq!(p.classification, Classification::Fundamental);
        assert!((p.background - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pentagon_is_ring() {
        let mut c = vec![(0.0, 0.0, 9.0)];
        for k in 0..5 {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0 + 0.3;
            c.push((4.0 * a.cos(), 4.0 * a.sin(), 8.0));
        }
        let g = Grid2D::new(-8.0, 8.0, -8.0, 8.0, 321, 321).unwrap();
        let p = peak_analysis(&sample(bumps(&c), &g), 0.1).unwrap();
        assert_eq!(p.peaks.len(), 6);
        assert_eq!(p.classification, Classification::Ring);
        assert_eq!(p.ring_size, 5);
    }

    #[test]
    fn three_bumps_are_triangular() {
        let c = [(0.0, 3.0, 8.0), (2.5, -2.0, 8.5), (-3.0, -1.0, 8.2)];
        let g = Grid2D::new(-6.0, 6.0, -6.0, 6.0, 241, 241).unwrap();
        let p = peak_analysis(&sample(bumps(&c), &g), 0.1).unwrap();
        assert_eq!(p.classification, Classification::Triangular);
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = Grid2D::new(-10.0, 10.0, -10.0, 10.0, 51, 51).unwrap();
        let f = sample(|_, _| Complex64::new(1.0, 0.0), &g);
        assert!(matches!(
            peak_analysis(&f, 0.1),
            Err(VerifyError::ResolutionTooCoarse { .. })
        ));
    }

    #[test]
    fn translation_equivariance() {
        let g = Grid2D::new(-6.0, 6.0, -6.0, 6.0, 241, 241).unwrap();
        let c = [(0.3, 1.1, 8.0), (-2.0, -1.7, 6.0)];
        let base = peak_analysis(&sample(bumps(&c), &g), 0.1).unwrap();
        let (si, sj) = (7usize, -4isize);
        let shifted = [
            (
                c[0].0 + si as f64 * g.hx(),
                c[0].1 + sj as f64 * g.ht(),
                c[0].2,
            ),
            (
                c[1].0 + si as f64 * g.hx(),
                c[1].1 + sj as f64 * g.ht(),
                c[1].2,
            ),
        ];
        let moved = peak_analysis(&sample(bumps(&shifted), &g), 0.1).unwrap();
        assert_eq!(base.peaks.len(), moved.peaks.len());
        for (a, b) in base.peaks.iter().zip(&moved.peaks) {
            assert_eq!(b.ix, a.ix + si);
            assert_eq!(b.it as isize, a.it as isize + sj);
        }
    }
}
