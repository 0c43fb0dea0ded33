//! Moment vectors for the three functional families: area integrals over
//! spline-bounded planar elements, discrete (QMC) sums, and pointwise partial
//! derivatives.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::{
    basis_row, chebyshev_primitive, chebyshev_values, diff_moments_ref_into, orthonormal_values,
    DerivativeOrder, IndexBasis,
};
use crate::error::{Error, Result};
use crate::functional::{BoundingBox, MomentVector, PointWeights, CONTAINMENT_TOL};
use crate::geometry::{Bounded, SplineBoundary};
use crate::points::PointSet;
use crate::quadrature::gauss_legendre;
use crate::rules::StartupBundle;

#[derive(Debug, Clone, PartialEq)]
pub enum PointWeighting {
    /// The same weight on every point, e.g. `vol(B) / L` for QMC.
    Uniform(f64),
    PerPoint(Vec<f64>),
}

/// A weighted point cloud `sum_k omega_k f(P_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub points: PointSet,
    pub weighting: PointWeighting,
}

impl DiscreteMeasure {
    pub fn new(points: PointSet, weighting: PointWeighting) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("discrete measure"));
        }
        if let PointWeighting::PerPoint(w) = &weighting {
            if w.len() != points.len() {
                return Err(Error::LengthMismatch {
                    expected: points.len(),
                    found: w.len(),
                });
            }
        }
        Ok(Self { points, weighting })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self, k: usize) -> f64 {
        match &self.weighting {
            PointWeighting::Uniform(w) => *w,
            PointWeighting::PerPoint(w) => w[k],
        }
    }

    /// Direct evaluation of the sum, with the same chunked summation order as
    /// the moment computation.
    pub fn apply<F: Fn(&[f64]) -> f64 + Sync>(&self, f: F) -> f64 {
        let partial: Vec<f64> = chunk_ranges(self.len())
            .into_par_iter()
            .map(|(a, b)| (a..b).map(|k| self.weight(k) * f(self.points.row(k))).sum())
            .collect();
        partial.into_iter().sum()
    }
}

const CHUNK: usize = 2048;

fn chunk_ranges(len: usize) -> Vec<(usize, usize)> {
    (0..len.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(len)))
        .collect()
}

/// Gauss-Legendre nodes per cubic piece making the boundary integral exact:
/// the integrand has degree `3(n + 1) + 2` in the piece parameter.
pub fn spline_nodes_per_piece(n: usize) -> usize {
    (3 * n + 6).div_ceil(2)
}

/// Lebesgue-measure moments `int_Omega psi_j(Lambda^{-1}(P - C)) dP` of the
/// element enclosed by a closed spline boundary, through Green's theorem with
/// the primitive of each basis element in the first variable.
pub fn spline_cheb_moments(
    boundary: &SplineBoundary,
    bbox: &BoundingBox,
    basis: &IndexBasis,
) -> Result<MomentVector> {
    spline_cheb_moments_with_nodes(
        boundary,
        bbox,
        basis,
        spline_nodes_per_piece(basis.degree()),
    )
}

/// As [`spline_cheb_moments`] with an explicit per-piece node count.
pub fn spline_cheb_moments_with_nodes(
    boundary: &SplineBoundary,
    bbox: &BoundingBox,
    basis: &IndexBasis,
    nodes_per_piece: usize,
) -> Result<MomentVector> {
    if basis.dim() != 2 || bbox.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: basis.dim().max(bbox.dim()),
        });
    }
    if !boundary.closed || !boundary.is_closed_curve() {
        return Err(Error::Geometry("spline boundary is not closed".into()));
    }
    let (lo, hi) = boundary.extent()?;
    if !bbox.contains(&lo, CONTAINMENT_TOL) || !bbox.contains(&hi, CONTAINMENT_TOL) {
        return Err(Error::Geometry(
            "spline boundary leaves the bounding box".into(),
        ));
    }
    let oriented;
    let boundary = if boundary.signed_area() < 0.0 {
        log::warn!("clockwise spline boundary reversed to counterclockwise");
        oriented = boundary.reversed();
        &oriented
    } else {
        boundary
    };

    let n = basis.degree();
    let lam = bbox.half_lengths();
    let ctr = bbox.center();
    let primitives: Vec<_> = (0..=n).map(chebyshev_primitive).collect();
    let norm: Vec<f64> = (0..=n)
        .map(|s| {
            if s == 0 {
                (1.0 / PI).sqrt()
            } else {
                (2.0 / PI).sqrt()
            }
        })
        .collect();

    let (gx, gw) = gauss_legendre(nodes_per_piece);
    let mut cheb = vec![0.0; n + 2];
    let mut prim = vec![0.0; n + 1];
    let mut second = vec![0.0; n + 1];
    let mut values = vec![0.0; basis.len()];
    for piece in &boundary.pieces {
        for (&g, &w) in gx.iter().zip(&gw) {
            let s = 0.5 * (g + 1.0);
            let [x, y] = piece.eval(s);
            let dy = piece.derivative(s)[1];
            let t1 = (x - ctr[0]) / lam[0];
            let t2 = (y - ctr[1]) / lam[1];
            chebyshev_values(t1, &mut cheb);
            for h in 0..=n {
                prim[h] = norm[h] * primitives[h].eval_with(&cheb);
            }
            orthonormal_values(t2, &mut second);
            // d/dx of Psi(t1(x), t2) is psi / lambda_1, hence the lambda_1 factor
            let scale = 0.5 * w * dy * lam[0];
            for (v, ix) in values.iter_mut().zip(basis.indices()) {
                *v += scale * prim[ix[0]] * second[ix[1]];
            }
        }
    }
    MomentVector::new(values, basis.clone(), bbox.clone(), "spline-area")
}

/// Moments `m_j = sum_k omega_k psi_j(Lambda^{-1}(P_k - C))` of a discrete
/// measure.
pub fn discrete_moments(
    measure: &DiscreteMeasure,
    bbox: &BoundingBox,
    basis: &IndexBasis,
) -> Result<MomentVector> {
    if measure.is_empty() {
        return Err(Error::Empty("discrete measure"));
    }
    if measure.points.dim() != basis.dim() || bbox.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: measure.points.dim(),
        });
    }
    if let Some(p) = measure
        .points
        .iter()
        .find(|p| !bbox.contains(p, CONTAINMENT_TOL))
    {
        return Err(Error::Geometry(format!(
            "measure point {p:?} lies outside the bounding box"
        )));
    }
    let nb = basis.len();
    let d = basis.dim();
    // fixed chunks summed in order keep the result independent of scheduling
    let partial: Vec<Vec<f64>> = chunk_ranges(measure.len())
        .into_par_iter()
        .map(|(a, b)| {
            let mut acc = vec![0.0; nb];
            let mut row = vec![0.0; nb];
            let mut q = vec![0.0; d];
            for k in a..b {
                bbox.to_reference(measure.points.row(k), &mut q);
                basis_row(basis, &q, &mut row);
                let w = measure.weight(k);
                for (s, r) in acc.iter_mut().zip(&row) {
                    *s += w * r;
                }
            }
            acc
        })
        .collect();
    let mut values = vec![0.0; nb];
    for acc in partial {
        for (v, a) in values.iter_mut().zip(acc) {
            *v += a;
        }
    }
    MomentVector::new(values, basis.clone(), bbox.clone(), "discrete")
}

fn check_point(bundle: &StartupBundle, bbox: &BoundingBox, dim: usize) -> Result<()> {
    if bundle.dim() != bbox.dim() {
        return Err(Error::DimensionMismatch {
            expected: bundle.dim(),
            found: bbox.dim(),
        });
    }
    if dim != bbox.dim() {
        return Err(Error::DimensionMismatch {
            expected: bbox.dim(),
            found: dim,
        });
    }
    Ok(())
}

/// Differential cubature weights: `sum_i w_i f(P_i) = d^alpha f(p)` for every
/// `f` in `P_n`.
pub fn diff_weights(
    bundle: &StartupBundle,
    bbox: &BoundingBox,
    p: &[f64],
    alpha: &DerivativeOrder,
) -> Result<PointWeights> {
    check_point(bundle, bbox, p.len())?;
    let mut q = vec![0.0; p.len()];
    bbox.to_reference(p, &mut q);
    let mut m0 = vec![0.0; bundle.basis.len()];
    diff_moments_ref_into(&q, alpha, &bundle.basis, &mut m0)?;
    let scale = alpha.scaling(&bbox.half_lengths());
    let w = (&bundle.weighted_vandermonde * DVector::from_vec(m0)) * scale;
    Ok(PointWeights {
        weights: w.as_slice().to_vec(),
        outside_box: !bbox.contains(p, CONTAINMENT_TOL),
    })
}

/// Weights for many evaluation points at once: column `k` of the `M x P`
/// result is the weight vector at `points[k]`.
pub fn diff_weights_batch(
    bundle: &StartupBundle,
    bbox: &BoundingBox,
    points: &PointSet,
    alpha: &DerivativeOrder,
) -> Result<DMatrix<f64>> {
    check_point(bundle, bbox, points.dim())?;
    let nb = bundle.basis.len();
    let mut m0 = DMatrix::zeros(nb, points.len());
    let mut q = vec![0.0; points.dim()];
    let mut col = vec![0.0; nb];
    for (k, p) in points.iter().enumerate() {
        bbox.to_reference(p, &mut q);
        diff_moments_ref_into(&q, alpha, &bundle.basis, &mut col)?;
        m0.column_mut(k).copy_from_slice(&col);
    }
    let scale = alpha.scaling(&bbox.half_lengths());
    Ok((&bundle.weighted_vandermonde * m0) * scale)
}

/// First-order differentiation matrix along `axis` (0-based): row `i` holds
/// the weights of `d/dx_axis` at node `P_i`, so `D f` samples the derivative
/// of the hyperinterpolant at the nodes.
pub fn differentiation_matrix(
    bundle: &StartupBundle,
    bbox: &BoundingBox,
    axis: usize,
) -> Result<DMatrix<f64>> {
    let alpha = DerivativeOrder::first(bundle.dim(), axis)?;
    let (nodes, _) = crate::functional::map_rule(bundle, bbox)?;
    Ok(diff_weights_batch(bundle, bbox, &nodes, &alpha)?.transpose())
}
