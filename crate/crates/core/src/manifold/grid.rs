use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{angle_between, ManifoldKind, ManifoldSpec, Point, BALL_EPS};
use crate::{Error, Result};

/// JSON description of a manifold together with its grid resolution:
/// points per axis on a torus, total points on a sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: ManifoldKind,
    pub d: usize,
    pub scale: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub resolution: usize,
}

impl GridSpec {
    pub fn manifold(&self) -> Result<ManifoldSpec> {
        ManifoldSpec::new(self.kind, self.d, self.scale, self.k)
    }

    pub fn build(&self) -> Result<QuadratureGrid> {
        QuadratureGrid::new(self.manifold()?, self.resolution)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// Uniform lattice on the torus; points are implicit.
    Lattice { res: usize, spacing: f64 },
    /// Equal-area Fibonacci spiral on the sphere.
    Fibonacci { points: Vec<Point> },
}

/// Lattice offsets lying strictly inside a ball of fixed radius, shared by
/// every lattice center.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub radius: f64,
    pub offsets: Vec<[i64; 3]>,
    pub distances: Vec<f64>,
}

impl Stencil {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Equal-weight quadrature nodes for `dvol`: a uniform lattice on tori and a
/// Fibonacci lattice on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    manifold: ManifoldSpec,
    layout: Layout,
    n_points: usize,
    weight: f64,
}

impl QuadratureGrid {
    pub fn new(manifold: ManifoldSpec, resolution: usize) -> Result<Self> {
        match manifold.kind {
            ManifoldKind::Torus => {
                if resolution < 8 {
                    return Err(Error::GridTooCoarse(format!(
                        "torus resolution {resolution} below 8 points per axis"
                    )));
                }
                let n_points = resolution
                    .checked_pow(manifold.d as u32)
                    .ok_or_else(|| Error::invalid("resolution", "point count overflows"))?;
                Ok(Self {
                    manifold,
                    layout: Layout::Lattice {
                        res: resolution,
                        spacing: manifold.scale / resolution as f64,
                    },
                    n_points,
                    weight: manifold.vol / n_points as f64,
                })
            }
            ManifoldKind::Sphere => {
                if resolution < 256 {
                    return Err(Error::GridTooCoarse(format!(
                        "sphere grid of {resolution} points, need at least 256"
                    )));
                }
                Ok(Self {
                    manifold,
                    layout: Layout::Fibonacci {
                        points: fibonacci_points(resolution, manifold.scale),
                    },
                    n_points: resolution,
                    weight: manifold.vol / resolution as f64,
                })
            }
        }
    }

    pub fn manifold(&self) -> &ManifoldSpec {
        &self.manifold
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Per-point volume weight; every node carries the same weight.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn total_weight(&self) -> f64 {
        self.weight * self.n_points as f64
    }

    /// Lattice spacing, or the mean node spacing `sqrt(vol/N)` on the sphere.
    pub fn spacing(&self) -> f64 {
        match &self.layout {
            Layout::Lattice { spacing, .. } => *spacing,
            Layout::Fibonacci { .. } => (self.manifold.vol / self.n_points as f64).sqrt(),
        }
    }

    pub fn lattice_resolution(&self) -> Option<usize> {
        match self.layout {
            Layout::Lattice { res, .. } => Some(res),
            Layout::Fibonacci { .. } => None,
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self.layout, Layout::Lattice { .. })
    }

    pub(crate) fn coords(&self, i: usize) -> [usize; 3] {
        let res = self.lattice_resolution().expect("lattice grid");
        let mut c = [0usize; 3];
        let mut rest = i;
        for slot in c.iter_mut().take(self.manifold.d) {
            *slot = rest % res;
            rest /= res;
        }
        c
    }

    pub(crate) fn index_of(&self, c: &[usize; 3]) -> usize {
        let res = self.lattice_resolution().expect("lattice grid");
        let mut i = 0;
        for j in (0..self.manifold.d).rev() {
            i = i * res + c[j];
        }
        i
    }

    /// Lattice index reached from `i` by an integer offset, wrapping around.
    pub(crate) fn shifted(&self, i: usize, offset: &[i64; 3]) -> usize {
        let res = self.lattice_resolution().expect("lattice grid") as i64;
        let mut c = self.coords(i);
        for j in 0..self.manifold.d {
            c[j] = (c[j] as i64 + offset[j]).rem_euclid(res) as usize;
        }
        self.index_of(&c)
    }

    pub fn point(&self, i: usize) -> Point {
        match &self.layout {
            Layout::Lattice { spacing, .. } => {
                let c = self.coords(i);
                let mut p = [0.0; 3];
                for j in 0..self.manifold.d {
                    p[j] = c[j] as f64 * spacing;
                }
                p
            }
            Layout::Fibonacci { points } => points[i],
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match &self.layout {
            Layout::Lattice { res, spacing } => {
                let (a, b) = (self.coords(i), self.coords(j));
                let mut s = 0u64;
                for k in 0..self.manifold.d {
                    let t = a[k].abs_diff(b[k]);
                    let t = t.min(res - t) as u64;
                    s += t * t;
                }
                spacing * (s as f64).sqrt()
            }
            Layout::Fibonacci { points } => {
                self.manifold.scale * angle_between(&points[i], &points[j])
            }
        }
    }

    pub fn distance_to(&self, i: usize, x: &Point) -> f64 {
        self.manifold.distance(&self.point(i), x)
    }

    /// Offsets strictly inside `radius`, available on lattices when the
    /// radius does not exceed half the side.
    pub fn stencil(&self, radius: f64) -> Option<Stencil> {
        let Layout::Lattice { res, spacing } = self.layout else {
            return None;
        };
        if radius > self.manifold.scale / 2.0 {
            return None;
        }
        let d = self.manifold.d;
        let cut = radius * (1.0 - BALL_EPS);
        let reach = (radius / spacing).floor() as i64;
        let reach = reach.min(res as i64 / 2);
        let span = |j: usize| if j < d { -reach..=reach } else { 0..=0 };
        let mut offsets = Vec::new();
        let mut distances = Vec::new();
        for o2 in span(2) {
            for o1 in span(1) {
                for o0 in span(0) {
                    let s = (o0 * o0 + o1 * o1 + o2 * o2) as f64;
                    let dist = spacing * s.sqrt();
                    if dist < cut {
                        offsets.push([o0, o1, o2]);
                        distances.push(dist);
                    }
                }
            }
        }
        Some(Stencil {
            radius,
            offsets,
            distances,
        })
    }

    /// Grid points strictly inside the geodesic ball around point `center`,
    /// with their distances.
    pub fn ball(&self, center: usize, radius: f64) -> Vec<(usize, f64)> {
        if let Some(st) = self.stencil(radius) {
            return st
                .offsets
                .iter()
                .zip(&st.distances)
                .map(|(o, &dist)| (self.shifted(center, o), dist))
                .collect();
        }
        let cut = radius * (1.0 - BALL_EPS);
        (0..self.n_points)
            .filter_map(|j| {
                let dist = self.distance(center, j);
                (dist < cut).then_some((j, dist))
            })
            .collect()
    }

    /// Quadrature volume of the open ball of `radius` around point `center`.
    pub fn ball_volume(&self, center: usize, radius: f64) -> f64 {
        if let Some(st) = self.stencil(radius) {
            return st.len() as f64 * self.weight;
        }
        self.ball(center, radius).len() as f64 * self.weight
    }
}

/// Fibonacci spiral with `z_i = 1 − (2i+1)/N` and golden-angle longitudes,
/// scaled to radius `r`.
fn fibonacci_points(n: usize, r: f64) -> Vec<Point> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * rho * phi.cos(), r * rho * phi.sin(), r * z]
        })
        .collect()
}
