//! Spline-bounded planar elements, ball unions, Halton points and bounding
//! boxes.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::functional::BoundingBox;
use crate::moments::{DiscreteMeasure, PointWeighting};
use crate::points::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndCondition {
    Natural,
    #[default]
    Periodic,
}

impl fmt::Display for EndCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndCondition::Natural => "natural",
            EndCondition::Periodic => "periodic",
        })
    }
}

impl FromStr for EndCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(EndCondition::Natural),
            "periodic" => Ok(EndCondition::Periodic),
            other => Err(Error::InvalidArgument(format!(
                "unknown end condition `{other}`"
            ))),
        }
    }
}

/// One parametric piece `s -> (x(s), y(s))`, `s in [0, 1]`, with monomial
/// coefficients `c[0] + c[1] s + c[2] s^2 + c[3] s^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplinePiece {
    pub x: [f64; 4],
    pub y: [f64; 4],
}

fn horner(c: &[f64; 4], s: f64) -> f64 {
    ((c[3] * s + c[2]) * s + c[1]) * s + c[0]
}

fn horner_d(c: &[f64; 4], s: f64) -> f64 {
    (3.0 * c[3] * s + 2.0 * c[2]) * s + c[1]
}

/// Coefficients of `p(1 - s)`.
fn flip(c: &[f64; 4]) -> [f64; 4] {
    [
        c[0] + c[1] + c[2] + c[3],
        -c[1] - 2.0 * c[2] - 3.0 * c[3],
        c[2] + 3.0 * c[3],
        -c[3],
    ]
}

/// Parameter values in `[0, 1]` where a cubic attains its extrema.
fn critical_params(c: &[f64; 4]) -> Vec<f64> {
    let (a, b, cc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    let mut out = vec![0.0, 1.0];
    let scale = a.abs().max(b.abs()).max(cc.abs());
    if scale == 0.0 {
        return out;
    }
    if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            out.push(-cc / b);
        }
    } else {
        let disc = b * b - 4.0 * a * cc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (b + b.signum() * sq);
            if q != 0.0 {
                out.push(q / a);
                out.push(cc / q);
            } else {
                out.push(0.0);
            }
        }
    }
    out.retain(|s| (0.0..=1.0).contains(s));
    out
}

impl SplinePiece {
    pub fn eval(&self, s: f64) -> [f64; 2] {
        [horner(&self.x, s), horner(&self.y, s)]
    }

    pub fn derivative(&self, s: f64) -> [f64; 2] {
        [horner_d(&self.x, s), horner_d(&self.y, s)]
    }

    pub fn second_derivative(&self, s: f64) -> [f64; 2] {
        [
            2.0 * self.x[2] + 6.0 * self.x[3] * s,
            2.0 * self.y[2] + 6.0 * self.y[3] * s,
        ]
    }

    pub fn reversed(&self) -> Self {
        Self {
            x: flip(&self.x),
            y: flip(&self.y),
        }
    }

    /// `int_0^1 x(s) y'(s) ds`, exact.
    fn x_dy(&self) -> f64 {
        let dy = [self.y[1], 2.0 * self.y[2], 3.0 * self.y[3]];
        let mut acc = 0.0;
        for (p, a) in self.x.iter().enumerate() {
            for (q, b) in dy.iter().enumerate() {
                acc += a * b / (p + q + 1) as f64;
            }
        }
        acc
    }

    fn extent(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (axis, c) in [&self.x, &self.y].into_iter().enumerate() {
            for s in critical_params(c) {
                let v = horner(c, s);
                lo[axis] = lo[axis].min(v);
                hi[axis] = hi[axis].max(v);
            }
        }
        (lo, hi)
    }
}

/// Piecewise cubic (or linear) parametrization of a planar curve, one piece
/// per vertex interval with uniform parameter spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineBoundary {
    pub pieces: Vec<SplinePiece>,
    pub closed: bool,
    pub vertices_x: Vec<f64>,
    pub vertices_y: Vec<f64>,
    pub order: usize,
    pub end_condition: EndCondition,
}

impl SplineBoundary {
    /// Point at global parameter `t in [0, pieces]`.
    pub fn eval(&self, t: f64) -> [f64; 2] {
        let last = self.pieces.len() - 1;
        let i = (t.floor().max(0.0) as usize).min(last);
        self.pieces[i].eval(t - i as f64)
    }

    /// Signed enclosed area `oint x dy` (positive when counterclockwise).
    pub fn signed_area(&self) -> f64 {
        self.pieces.iter().map(SplinePiece::x_dy).sum()
    }

    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.pieces = self
            .pieces
            .iter()
            .rev()
            .map(SplinePiece::reversed)
            .collect();
        out.vertices_x.reverse();
        out.vertices_y.reverse();
        out
    }

    /// Whether the last piece ends where the first begins.
    pub fn is_closed_curve(&self) -> bool {
        let (Some(first), Some(last)) = (self.pieces.first(), self.pieces.last()) else {
            return false;
        };
        let a = first.eval(0.0);
        let b = last.eval(1.0);
        let scale = a[0].abs().max(a[1].abs()).max(1.0);
        (a[0] - b[0]).abs() <= 1e-12 * scale && (a[1] - b[1]).abs() <= 1e-12 * scale
    }

    /// Dense samples along the curve, `per_piece` per piece.
    pub fn sample(&self, per_piece: usize) -> PointSet {
        let mut out = PointSet::with_capacity(2, per_piece * self.pieces.len());
        for piece in &self.pieces {
            for k in 0..per_piece {
                let s = k as f64 / per_piece as f64;
                out.push(&piece.eval(s)).unwrap();
            }
        }
        out
    }
}

/// Second derivatives of the uniform-parameter interpolating cubic.
fn spline_second_derivatives(values: &[f64], periodic: bool) -> Result<Vec<f64>> {
    let m = values.len();
    if periodic {
        let mut a = DMatrix::zeros(m, m);
        let mut rhs = DVector::zeros(m);
        for i in 0..m {
            let prev = (i + m - 1) % m;
            let next = (i + 1) % m;
            a[(i, prev)] += 1.0;
            a[(i, i)] += 4.0;
            a[(i, next)] += 1.0;
            rhs[i] = 6.0 * (values[next] - 2.0 * values[i] + values[prev]);
        }
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Geometry("singular periodic spline system".into()))?;
        Ok(sol.as_slice().to_vec())
    } else {
        let mut out = vec![0.0; m];
        if m <= 2 {
            return Ok(out);
        }
        let k = m - 2;
        let mut a = DMatrix::zeros(k, k);
        let mut rhs = DVector::zeros(k);
        for r in 0..k {
            let i = r + 1;
            a[(r, r)] = 4.0;
            if r > 0 {
                a[(r, r - 1)] = 1.0;
            }
            if r + 1 < k {
                a[(r, r + 1)] = 1.0;
            }
            rhs[r] = 6.0 * (values[i + 1] - 2.0 * values[i] + values[i - 1]);
        }
        let sol = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Geometry("singular natural spline system".into()))?;
        out[1..m - 1].copy_from_slice(sol.as_slice());
        Ok(out)
    }
}

fn cubic_pieces(values: &[f64], second: &[f64], periodic: bool) -> Vec<[f64; 4]> {
    let m = values.len();
    let count = if periodic { m } else { m - 1 };
    (0..count)
        .map(|i| {
            let j = (i + 1) % m;
            let (y0, y1, m0, m1) = (values[i], values[j], second[i], second[j]);
            [
                y0,
                (y1 - y0) - (2.0 * m0 + m1) / 6.0,
                0.5 * m0,
                (m1 - m0) / 6.0,
            ]
        })
        .collect()
}

/// Interpolating spline through the vertices `(xv[i], yv[i])`.
///
/// `order` 2 gives a polygon, 4 a cubic spline. The curve is closed when the
/// end condition is periodic or when the first and last vertices coincide.
pub fn spline_boundary_build(
    xv: &[f64],
    yv: &[f64],
    order: usize,
    end_condition: EndCondition,
) -> Result<SplineBoundary> {
    if xv.len() != yv.len() {
        return Err(Error::LengthMismatch {
            expected: xv.len(),
            found: yv.len(),
        });
    }
    if order != 2 && order != 4 {
        return Err(Error::InvalidArgument(format!(
            "unsupported spline order {order}: use 2 (linear) or 4 (cubic)"
        )));
    }
    let repeated = xv.len() > 1 && xv[0] == xv[xv.len() - 1] && yv[0] == yv[yv.len() - 1];
    let periodic = end_condition == EndCondition::Periodic;
    let closed = periodic || repeated;
    let distinct = if repeated { xv.len() - 1 } else { xv.len() };
    if closed && distinct < 3 {
        return Err(Error::Geometry(format!(
            "a closed boundary needs at least 3 distinct vertices, got {distinct}"
        )));
    }
    if distinct < 2 {
        return Err(Error::Geometry(
            "a boundary needs at least 2 vertices".into(),
        ));
    }

    // periodic works on the cycle of distinct vertices; natural on the list as given
    let (px, py): (Vec<f64>, Vec<f64>) = if periodic {
        (xv[..distinct].to_vec(), yv[..distinct].to_vec())
    } else {
        (xv.to_vec(), yv.to_vec())
    };

    let pieces = if order == 2 {
        let m = px.len();
        let count = if periodic { m } else { m - 1 };
        (0..count)
            .map(|i| {
                let j = (i + 1) % m;
                SplinePiece {
                    x: [px[i], px[j] - px[i], 0.0, 0.0],
                    y: [py[i], py[j] - py[i], 0.0, 0.0],
                }
            })
            .collect()
    } else {
        let mx = spline_second_derivatives(&px, periodic)?;
        let my = spline_second_derivatives(&py, periodic)?;
        cubic_pieces(&px, &mx, periodic)
            .into_iter()
            .zip(cubic_pieces(&py, &my, periodic))
            .map(|(x, y)| SplinePiece { x, y })
            .collect()
    };

    Ok(SplineBoundary {
        pieces,
        closed,
        vertices_x: xv.to_vec(),
        vertices_y: yv.to_vec(),
        order,
        end_condition,
    })
}

/// Union of closed balls.
#[derive(Debug, Clone, PartialEq)]
pub struct BallUnion {
    pub centers: PointSet,
    pub radii: Vec<f64>,
}

impl BallUnion {
    pub fn new(centers: PointSet, radii: Vec<f64>) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::LengthMismatch {
                expected: centers.len(),
                found: radii.len(),
            });
        }
        if radii.is_empty() {
            return Err(Error::Empty("ball union"));
        }
        if let Some(r) = radii.iter().find(|r| r.is_nan() || **r <= 0.0) {
            return Err(Error::Geometry(format!(
                "ball radius must be positive, got {r}"
            )));
        }
        Ok(Self { centers, radii })
    }

    pub fn dim(&self) -> usize {
        self.centers.dim()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.centers.iter().zip(&self.radii).any(|(c, &r)| {
            let d2: f64 = c.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() - r <= 0.0
        })
    }
}

/// In-domain mask for a ball union.
pub fn indomain_balls(points: &PointSet, balls: &BallUnion) -> Result<Vec<bool>> {
    if points.dim() != balls.dim() {
        return Err(Error::DimensionMismatch {
            expected: balls.dim(),
            found: points.dim(),
        });
    }
    Ok(points.iter().map(|p| balls.contains(p)).collect())
}

const PRIMES: [u64; 3] = [2, 3, 5];

/// Van der Corput radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while index > 0 {
        x += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    x
}

/// Halton points in `[0,1]^d` for indices `start, start + 1, ...` in the
/// bases 2, 3, 5.
pub fn halton(d: usize, count: usize, start: u64) -> Result<PointSet> {
    if d == 0 || d > PRIMES.len() {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut out = PointSet::with_capacity(d, count);
    let mut p = [0.0; 3];
    for i in 0..count as u64 {
        for (c, &base) in PRIMES[..d].iter().enumerate() {
            p[c] = radical_inverse(start + i, base);
        }
        out.push(&p[..d])?;
    }
    Ok(out)
}

/// Halton points mapped affinely into a box.
pub fn halton_in_box(bbox: &BoundingBox, count: usize, start: u64) -> Result<PointSet> {
    let unit = halton(bbox.dim(), count, start)?;
    let (lo, hi) = (bbox.lo(), bbox.hi());
    Ok(unit.map(|h, p| {
        for k in 0..h.len() {
            p[k] = lo[k] + (hi[k] - lo[k]) * h[k];
        }
    }))
}

/// QMC rule on a ball union: the first `l` Halton points of the bounding box
/// that fall in the union, each weighted `vol(B) / l`.
pub fn qmc_union_balls(balls: &BallUnion, l: usize) -> Result<(DiscreteMeasure, BoundingBox)> {
    let bbox = bounding_box(balls, 0.0)?;
    let cloud = halton_in_box(&bbox, l, 1)?;
    let mask = indomain_balls(&cloud, balls)?;
    let points = cloud.select(&mask);
    let weight = bbox.volume() / l as f64;
    let measure = DiscreteMeasure::new(points, PointWeighting::Uniform(weight))?;
    Ok((measure, bbox))
}

/// Sources with a computable tight axis-aligned bounding box.
pub trait Bounded {
    fn extent(&self) -> Result<(Vec<f64>, Vec<f64>)>;
}

impl Bounded for SplineBoundary {
    fn extent(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.pieces.is_empty() {
            return Err(Error::Empty("spline boundary"));
        }
        let mut lo = vec![f64::INFINITY; 2];
        let mut hi = vec![f64::NEG_INFINITY; 2];
        for piece in &self.pieces {
            let (plo, phi) = piece.extent();
            for k in 0..2 {
                lo[k] = lo[k].min(plo[k]);
                hi[k] = hi[k].max(phi[k]);
            }
        }
        Ok((lo, hi))
    }
}

impl Bounded for BallUnion {
    fn extent(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for (c, &r) in self.centers.iter().zip(&self.radii) {
            for k in 0..d {
                lo[k] = lo[k].min(c[k] - r);
                hi[k] = hi[k].max(c[k] + r);
            }
        }
        Ok((lo, hi))
    }
}

impl Bounded for PointSet {
    fn extent(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.is_empty() {
            return Err(Error::Empty("point set"));
        }
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in self.iter() {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Ok((lo, hi))
    }
}

/// Smallest box containing the source, grown by `inflation` times each side
/// length on both ends.
pub fn bounding_box<S: Bounded + ?Sized>(source: &S, inflation: f64) -> Result<BoundingBox> {
    let (lo, hi) = source.extent()?;
    Ok(BoundingBox::new(lo, hi)?.inflated(inflation))
}
