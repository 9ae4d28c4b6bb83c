//! Centers, oversampled grids, domains and the restriction/extension pair.
//!
//! Oversampled grids are stored in two orders. The natural order is the
//! increasing sequence `-T + i·2T/L`. The block order groups the `L = sN`
//! points into `s` shifted copies of the center grid, block `i` holding
//! `-T + i·h_L + k·h_N` for `k = 0..N`. Every fast operator in this crate
//! indexes oversampled grids in block order; 2D grids use the row-major
//! (x outer, y inner) product of the two block-ordered axes.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Equispaced grid on `[-T, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    half_period: f64,
    points: Vec<f64>,
}

impl Grid1D {
    fn equispaced(count: usize, half_period: f64) -> Result<Self> {
        if !(half_period > 0.0 && half_period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half-period must be positive, got {half_period}"
            )));
        }
        let h = 2.0 * half_period / count as f64;
        let points = (0..count).map(|i| -half_period + i as f64 * h).collect();
        Ok(Self {
            half_period,
            points,
        })
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.points.len() as f64
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// The same points regrouped into `count / block_size` shifted copies of
    /// a grid with `block_size` points.
    pub fn block_order(&self, block_size: usize) -> Result<Vec<f64>> {
        let len = self.points.len();
        if block_size == 0 || len % block_size != 0 {
            return Err(Error::InvalidParameter(format!(
                "block size {block_size} does not divide grid size {len}"
            )));
        }
        let s = len / block_size;
        Ok((0..s)
            .flat_map(|i| (0..block_size).map(move |k| k * s + i))
            .map(|idx| self.points[idx])
            .collect())
    }
}

/// `N` equispaced centers `c_j = -T + j·2T/N`.
pub fn centers_1d(n: usize, half_period: f64) -> Result<Grid1D> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "at least two centers are required, got {n}"
        )));
    }
    Grid1D::equispaced(n, half_period)
}

/// Grid of `L = sN` equispaced points on `[-T, T)`, the union of `s` shifted
/// center grids.
pub fn oversampled_grid_1d(n: usize, s: usize, half_period: f64) -> Result<Grid1D> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "at least two centers are required, got {n}"
        )));
    }
    if s < 1 {
        return Err(Error::InvalidParameter(
            "oversampling factor must be at least 1".into(),
        ));
    }
    Grid1D::equispaced(s * n, half_period)
}

/// A closed curve bounding (part of) a 2D domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub x: f64,
    pub y: f64,
    /// Outward unit normal of the domain at the point.
    pub normal: (f64, f64),
    /// Index of the boundary component the point lies on.
    pub component: usize,
}

/// Approximation domain embedded in a bounding box.
///
/// Membership is closed: a point belongs to the domain when its level
/// function is `<= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Closed interval `[lo, hi]`.
    Interval { lo: f64, hi: f64 },
    /// Axis-aligned ellipse `(x/a)² + (y/b)² <= 1`.
    Ellipse { a: f64, b: f64 },
    /// Axis-aligned rectangle `|x| <= hx, |y| <= hy`.
    Rectangle { hx: f64, hy: f64 },
    /// Star-shaped flower `r <= 0.8 + 0.1 cos 5θ` with the disk
    /// `r < 0.1` removed. Component 0 is the outer curve, 1 the hole.
    Flower,
}

const FLOWER_BASE: f64 = 0.8;
const FLOWER_AMPLITUDE: f64 = 0.1;
const FLOWER_PETALS: f64 = 5.0;
const FLOWER_HOLE: f64 = 0.1;

impl Domain {
    pub fn unit_interval() -> Self {
        Domain::Interval { lo: -1.0, hi: 1.0 }
    }

    pub fn circle(radius: f64) -> Self {
        Domain::Ellipse {
            a: radius,
            b: radius,
        }
    }

    /// Resolve a builtin domain by its identifier.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "interval" => Ok(Self::unit_interval()),
            "circle" => Ok(Self::circle(1.0)),
            "ellipse" => Ok(Domain::Ellipse { a: 1.0, b: 0.5 }),
            "flower" => Ok(Domain::Flower),
            other => Err(Error::InvalidParameter(format!(
                "unknown domain '{other}' (expected interval, circle, ellipse or flower)"
            ))),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Signed level function `g`: negative inside, zero on the boundary.
    pub fn level(&self, x: f64, y: f64) -> f64 {
        match *self {
            Domain::Interval { lo, hi } => (lo - x).max(x - hi),
            Domain::Ellipse { a, b } => (x / a).powi(2) + (y / b).powi(2) - 1.0,
            Domain::Rectangle { hx, hy } => (x.abs() / hx).max(y.abs() / hy) - 1.0,
            Domain::Flower => {
                let r = x.hypot(y);
                let theta = y.atan2(x);
                let outer = r - flower_radius(theta);
                outer.max(FLOWER_HOLE - r)
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.level(x, y) <= 0.0
    }

    /// Half-widths of the smallest centered box containing the domain.
    pub fn extent(&self) -> (f64, f64) {
        match *self {
            Domain::Interval { lo, hi } => (lo.abs().max(hi.abs()), 0.0),
            Domain::Ellipse { a, b } => (a, b),
            Domain::Rectangle { hx, hy } => (hx, hy),
            Domain::Flower => {
                let r = FLOWER_BASE + FLOWER_AMPLITUDE;
                (r, r)
            }
        }
    }

    /// Area (2D) or length (1D) of the domain.
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { lo, hi } => hi - lo,
            Domain::Ellipse { a, b } => PI * a * b,
            Domain::Rectangle { hx, hy } => 4.0 * hx * hy,
            // ½∫(0.8 + 0.1 cos 5θ)² dθ - π·0.1²
            Domain::Flower => {
                PI * (FLOWER_BASE.powi(2) + 0.5 * FLOWER_AMPLITUDE.powi(2))
                    - PI * FLOWER_HOLE.powi(2)
            }
        }
    }

    /// Number of closed boundary curves.
    pub fn boundary_components(&self) -> usize {
        match self {
            Domain::Interval { .. } => 0,
            Domain::Flower => 2,
            _ => 1,
        }
    }

    /// Relative share of boundary points assigned to each component.
    fn component_weights(&self) -> Vec<usize> {
        match self {
            Domain::Flower => vec![2, 1],
            Domain::Interval { .. } => vec![],
            _ => vec![1],
        }
    }

    /// Boundary point at parameter `theta ∈ [0, 2π)` on `component`.
    pub fn boundary_point(&self, component: usize, theta: f64) -> Result<BoundaryPoint> {
        let (x, y, dx, dy, inward_hole) = match (*self, component) {
            (Domain::Ellipse { a, b }, 0) => (
                a * theta.cos(),
                b * theta.sin(),
                -a * theta.sin(),
                b * theta.cos(),
                false,
            ),
            (Domain::Rectangle { hx, hy }, 0) => {
                let (x, y, dx, dy) = rectangle_point(hx, hy, theta);
                (x, y, dx, dy, false)
            }
            (Domain::Flower, 0) => {
                let r = flower_radius(theta);
                let dr = -FLOWER_AMPLITUDE * FLOWER_PETALS * (FLOWER_PETALS * theta).sin();
                let (s, c) = theta.sin_cos();
                (r * c, r * s, dr * c - r * s, dr * s + r * c, false)
            }
            (Domain::Flower, 1) => {
                let (s, c) = theta.sin_cos();
                (
                    FLOWER_HOLE * c,
                    FLOWER_HOLE * s,
                    -FLOWER_HOLE * s,
                    FLOWER_HOLE * c,
                    true,
                )
            }
            (Domain::Interval { .. }, _) => {
                return Err(Error::Unsupported(
                    "interval boundaries are the fixed endpoints {lo, hi}".into(),
                ))
            }
            (_, c) => {
                return Err(Error::InvalidParameter(format!(
                    "domain has no boundary component {c}"
                )))
            }
        };
        // Counter-clockwise tangent (dx, dy): (dy, -dx) points away from the
        // enclosed region. Holes have the domain on the outside.
        let len = dx.hypot(dy);
        let sign = if inward_hole { -1.0 } else { 1.0 };
        Ok(BoundaryPoint {
            x,
            y,
            normal: (sign * dy / len, -sign * dx / len),
            component,
        })
    }
}

fn flower_radius(theta: f64) -> f64 {
    FLOWER_BASE + FLOWER_AMPLITUDE * (FLOWER_PETALS * theta).cos()
}

/// Perimeter parameterization of a rectangle, counter-clockwise from (hx, 0).
fn rectangle_point(hx: f64, hy: f64, theta: f64) -> (f64, f64, f64, f64) {
    let perimeter = 4.0 * (hx + hy);
    let mut t = (theta / (2.0 * PI)).rem_euclid(1.0) * perimeter;
    // Sides: right upper half, top, left, bottom, right lower half.
    let sides = [
        (hy, (hx, 0.0), (0.0, 1.0)),
        (2.0 * hx, (hx, hy), (-1.0, 0.0)),
        (2.0 * hy, (-hx, hy), (0.0, -1.0)),
        (2.0 * hx, (-hx, -hy), (1.0, 0.0)),
        (hy, (hx, -hy), (0.0, 1.0)),
    ];
    for (len, (x0, y0), (dx, dy)) in sides {
        if t <= len {
            return (x0 + t * dx, y0 + t * dy, dx, dy);
        }
        t -= len;
    }
    (hx, 0.0, 0.0, 1.0)
}

/// Sorted subset of a full grid: the restriction `R` and its pseudo-inverse,
/// extension by zero padding `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSelection {
    full_size: usize,
    kept: Vec<usize>,
}

impl IndexSelection {
    pub fn new(full_size: usize, mut kept: Vec<usize>) -> Result<Self> {
        kept.sort_unstable();
        kept.dedup();
        if let Some(&last) = kept.last() {
            if last >= full_size {
                return Err(Error::InvalidParameter(format!(
                    "index {last} outside grid of size {full_size}"
                )));
            }
        }
        Ok(Self { full_size, kept })
    }

    pub fn all(full_size: usize) -> Self {
        Self {
            full_size,
            kept: (0..full_size).collect(),
        }
    }

    pub fn full_size(&self) -> usize {
        self.full_size
    }

    /// Number of kept rows `M`.
    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn restrict<T: Copy>(&self, full: &[T]) -> Vec<T> {
        debug_assert_eq!(full.len(), self.full_size);
        self.kept.iter().map(|&i| full[i]).collect()
    }

    pub fn extend(&self, kept_values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(kept_values.len(), self.kept.len());
        let mut full = vec![0.0; self.full_size];
        for (&i, &v) in self.kept.iter().zip(kept_values) {
            full[i] = v;
        }
        full
    }
}

/// Indices of the points of a 1D grid lying in the closed domain.
pub fn interior_selection_1d(points: &[f64], domain: &Domain) -> Result<IndexSelection> {
    if domain.dimension() != 1 {
        return Err(Error::InvalidParameter(
            "a 1D grid needs an interval domain".into(),
        ));
    }
    let kept = points
        .iter()
        .enumerate()
        .filter(|(_, &x)| domain.contains(x, 0.0))
        .map(|(i, _)| i)
        .collect();
    IndexSelection::new(points.len(), kept)
}

/// Indices of the points of the product grid `xs × ys` lying in the closed
/// domain, with row-major (x outer, y inner) numbering.
pub fn interior_selection_2d(xs: &[f64], ys: &[f64], domain: &Domain) -> Result<IndexSelection> {
    if domain.dimension() != 2 {
        return Err(Error::InvalidParameter(
            "a product grid needs a two-dimensional domain".into(),
        ));
    }
    let ny = ys.len();
    let kept = xs
        .iter()
        .enumerate()
        .flat_map(|(p, &x)| {
            ys.iter()
                .enumerate()
                .filter(move |(_, &y)| domain.contains(x, y))
                .map(move |(q, _)| p * ny + q)
        })
        .collect();
    IndexSelection::new(xs.len() * ny, kept)
}

/// `mb` boundary points at equispaced parameter values.
///
/// Multi-component domains split the points between components in fixed
/// proportions (the flower puts two thirds on the outer curve).
pub fn boundary_points(domain: &Domain, mb: usize) -> Result<Vec<BoundaryPoint>> {
    if domain.dimension() == 1 {
        return Err(Error::Unsupported(
            "interval boundaries are the fixed endpoints {lo, hi}".into(),
        ));
    }
    if mb == 0 {
        return Err(Error::InvalidParameter(
            "at least one boundary point is required".into(),
        ));
    }
    let weights = domain.component_weights();
    let total: usize = weights.iter().sum();
    let mut counts: Vec<usize> = weights.iter().map(|w| mb * w / total).collect();
    let assigned: usize = counts.iter().sum();
    counts[0] += mb - assigned;
    boundary_points_split(domain, &counts)
}

/// Boundary points with an explicit count per component.
pub fn boundary_points_split(domain: &Domain, counts: &[usize]) -> Result<Vec<BoundaryPoint>> {
    if counts.len() != domain.boundary_components() {
        return Err(Error::InvalidParameter(format!(
            "domain has {} boundary components, got {} counts",
            domain.boundary_components(),
            counts.len()
        )));
    }
    let mut out = Vec::with_capacity(counts.iter().sum());
    for (component, &count) in counts.iter().enumerate() {
        for k in 0..count {
            let theta = 2.0 * PI * k as f64 / count as f64;
            out.push(domain.boundary_point(component, theta)?);
        }
    }
    Ok(out)
}
