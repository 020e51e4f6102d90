//! Greedy maximal packings of geodesic balls by grid points.

use serde::{Deserialize, Serialize};

use crate::manifold::{QuadratureGrid, BALL_EPS};
use crate::model_space::packing_number_bounds;
use crate::{Error, Result};

/// Above this many centers the pairwise minimum uses a cell hash.
const BRUTE_FORCE_PAIRS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPacking {
    pub radius: f64,
    /// Grid indices of the ball centers, in insertion order.
    pub centers: Vec<usize>,
    /// `None` for a single ball.
    pub min_pairwise_distance: Option<f64>,
}

impl BallPacking {
    pub fn count(&self) -> usize {
        self.centers.len()
    }
}

/// Scans grid points cyclically from `start` and keeps every point at
/// distance at least `2r` from all kept centers. The open `r`-balls around
/// the result are disjoint and the `2r`-balls cover the grid.
pub fn maximal_packing(grid: &QuadratureGrid, r: f64, start: usize) -> Result<BallPacking> {
    let m = grid.manifold();
    if !(r > 0.0 && r < m.inj) {
        return Err(Error::RadiusTooLarge { r, inj: m.inj });
    }
    if grid.spacing() >= r / 8.0 {
        return Err(Error::GridTooCoarse(format!(
            "spacing {} is not below r/8 = {}",
            grid.spacing(),
            r / 8.0
        )));
    }
    let n = grid.n_points();
    if start >= n {
        return Err(Error::invalid(
            "start",
            format!("index {start} out of range"),
        ));
    }
    let sep = 2.0 * r * (1.0 - BALL_EPS);
    let mut centers = Vec::new();
    if let Some(st) = grid.stencil(2.0 * r) {
        let mut blocked = vec![0u64; n.div_ceil(64)];
        for step in 0..n {
            let i = (start + step) % n;
            if blocked[i / 64] >> (i % 64) & 1 == 1 {
                continue;
            }
            centers.push(i);
            for o in &st.offsets {
                let j = grid.shifted(i, o);
                blocked[j / 64] |= 1 << (j % 64);
            }
        }
    } else {
        for step in 0..n {
            let i = (start + step) % n;
            if centers.iter().all(|&c| grid.distance(c, i) >= sep) {
                centers.push(i);
            }
        }
    }
    let min_pairwise_distance = min_pairwise_distance(grid, &centers, r);
    Ok(BallPacking {
        radius: r,
        centers,
        min_pairwise_distance,
    })
}

fn min_pairwise_distance(grid: &QuadratureGrid, centers: &[usize], r: f64) -> Option<f64> {
    if centers.len() < 2 {
        return None;
    }
    let d = grid.manifold().d;
    let side = 4.0 * r + 2.0 * grid.spacing();
    let cells = grid
        .lattice_resolution()
        .map(|_| (grid.manifold().scale / side).floor() as usize)
        .unwrap_or(0);
    if centers.len() <= BRUTE_FORCE_PAIRS || cells < 3 {
        let mut best = f64::INFINITY;
        for (a, &i) in centers.iter().enumerate() {
            for &j in &centers[a + 1..] {
                best = best.min(grid.distance(i, j));
            }
        }
        return Some(best);
    }
    // In a maximal packing every center has a neighbour within 4r + h, so
    // scanning adjacent hash cells of side ≥ 4r + 2h finds the minimum.
    let res = grid.lattice_resolution().expect("lattice");
    let cell_of = |i: usize| {
        let c = grid.coords(i);
        let mut key = [0usize; 3];
        for j in 0..d {
            key[j] = (c[j] * cells / res).min(cells - 1);
        }
        key
    };
    let flat = |k: &[usize; 3]| k[0] + cells * (k[1] + cells * k[2]);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cells.pow(d as u32)];
    for &c in centers {
        buckets[flat(&cell_of(c))].push(c);
    }
    let mut best = f64::INFINITY;
    let span = |j: usize| if j < d { -1i64..=1 } else { 0..=0 };
    for &c in centers {
        let k = cell_of(c);
        for o2 in span(2) {
            for o1 in span(1) {
                for o0 in span(0) {
                    let mut nk = [0usize; 3];
                    for (j, o) in [o0, o1, o2].into_iter().enumerate().take(d) {
                        nk[j] = (k[j] as i64 + o).rem_euclid(cells as i64) as usize;
                    }
                    for &other in &buckets[flat(&nk)] {
                        if other != c {
                            best = best.min(grid.distance(c, other));
                        }
                    }
                }
            }
        }
    }
    Some(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingDiagnostics {
    pub radius: f64,
    pub count: usize,
    pub disjoint: bool,
    pub min_pairwise_distance: Option<f64>,
    pub covered_fraction_at_2r: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub bounds_ok: bool,
}

/// Re-checks disjointness, `2r`-coverage and the volume-comparison bounds on
/// the packing number.
pub fn verify_packing(grid: &QuadratureGrid, packing: &BallPacking) -> Result<PackingDiagnostics> {
    let r = packing.radius;
    let (lower_bound, upper_bound) = packing_number_bounds(grid.manifold(), r)?;
    let recomputed = min_pairwise_distance(grid, &packing.centers, r);
    let disjoint = recomputed.is_none_or(|m| m >= 2.0 * r * (1.0 - 1e-9));
    let n = grid.n_points();
    let covered = if let Some(st) = grid.stencil(2.0 * r) {
        let mut hit = vec![false; n];
        for &c in &packing.centers {
            for o in &st.offsets {
                hit[grid.shifted(c, o)] = true;
            }
        }
        hit.iter().filter(|&&h| h).count()
    } else {
        let sep = 2.0 * r * (1.0 - BALL_EPS);
        (0..n)
            .filter(|&i| packing.centers.iter().any(|&c| grid.distance(c, i) < sep))
            .count()
    };
    let count = packing.count();
    Ok(PackingDiagnostics {
        radius: r,
        count,
        disjoint,
        min_pairwise_distance: recomputed,
        covered_fraction_at_2r: covered as f64 / n as f64,
        lower_bound,
        upper_bound,
        bounds_ok: lower_bound <= count as f64 && count as f64 <= upper_bound,
    })
}
