//! Weight synthesis for a linear functional on a bounding box.
//!
//! With `P = Lambda Q + C` mapping the reference cube onto the box, the
//! weights of the exact rule on the mapped nodes are
//!
//! ```text
//! w = diag(z) V m,   m_j = L(psi_j(Lambda^{-1}(. - C)))
//! ```
//!
//! where `diag(z) V` is the precomputed matrix of the startup bundle. Moments
//! are stored against the unscaled reference basis, so the determinant
//! factors of the scaled orthonormal basis cancel and nothing else is
//! multiplied in.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::basis::{basis_row, IndexBasis};
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::rules::StartupBundle;

/// Axis-aligned box `prod_k [a_k, b_k]` with `b_k > a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        for (axis, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() || b <= a {
                return Err(Error::DegenerateBox { axis, lo: a, hi: b });
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[-1, 1]^d`.
    pub fn reference(dim: usize) -> Self {
        Self {
            lo: vec![-1.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn half_lengths(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (b - a))
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// `det Lambda`.
    pub fn scaling_det(&self) -> f64 {
        self.half_lengths().iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// `Lambda^{-1} (p - C)`.
    pub fn to_reference(&self, p: &[f64], q: &mut [f64]) {
        for k in 0..self.lo.len() {
            let lam = 0.5 * (self.hi[k] - self.lo[k]);
            let c = 0.5 * (self.hi[k] + self.lo[k]);
            q[k] = (p[k] - c) / lam;
        }
    }

    /// `Lambda q + C`.
    pub fn from_reference(&self, q: &[f64], p: &mut [f64]) {
        for k in 0..self.lo.len() {
            let lam = 0.5 * (self.hi[k] - self.lo[k]);
            let c = 0.5 * (self.hi[k] + self.lo[k]);
            p[k] = lam * q[k] + c;
        }
    }

    /// Containment with a relative slack of `tol` times the side length.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&x, (&a, &b))| {
                let slack = tol * (b - a);
                x >= a - slack && x <= b + slack
            })
    }

    /// Grows every side by `factor` times its length on both ends.
    pub fn inflated(&self, factor: f64) -> Self {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| {
                let pad = factor * (b - a);
                (a - pad, b + pad)
            })
            .unzip();
        Self { lo, hi }
    }
}

/// Containment slack for points that land on the box faces up to roundoff.
pub(crate) const CONTAINMENT_TOL: f64 = 1e-12;

/// Moments `m_j = L(psi_j(Lambda^{-1}(. - C)))` of a functional.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub values: Vec<f64>,
    pub basis: IndexBasis,
    pub bbox: BoundingBox,
    pub functional_tag: String,
}

impl MomentVector {
    pub fn new(
        values: Vec<f64>,
        basis: IndexBasis,
        bbox: BoundingBox,
        functional_tag: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                found: values.len(),
            });
        }
        if bbox.dim() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: bbox.dim(),
            });
        }
        Ok(Self {
            values,
            basis,
            bbox,
            functional_tag: functional_tag.into(),
        })
    }

    /// Moments against the scaled orthonormal basis of the box,
    /// `sqrt(det Lambda^{-1}) m`.
    pub fn scaled(&self) -> Vec<f64> {
        let s = self.bbox.scaling_det().sqrt().recip();
        self.values.iter().map(|m| s * m).collect()
    }

    /// `a * self + b * other` over the same basis and box.
    pub fn combine(&self, a: f64, other: &MomentVector, b: f64) -> Result<MomentVector> {
        if self.basis != other.basis || self.bbox != other.bbox {
            return Err(Error::BasisMismatch(
                "linear combination of moments over different bases or boxes".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(MomentVector {
            values,
            basis: self.basis.clone(),
            bbox: self.bbox.clone(),
            functional_tag: format!(
                "{a}*({}) + {b}*({})",
                self.functional_tag, other.functional_tag
            ),
        })
    }
}

/// Nodes `X` in `B` with signed weights exact on `P_n` for one functional.
#[derive(Debug, Clone, PartialEq)]
pub struct CubatureRule {
    pub nodes: PointSet,
    pub weights: Vec<f64>,
    pub degree: usize,
    pub bbox: BoundingBox,
    pub functional_tag: String,
}

impl CubatureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// Applies the rule to a closure evaluated at every node.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// Weights at evaluation points, with a flag set when the point lies outside
/// the box (the result is then a polynomial extrapolation).
#[derive(Debug, Clone, PartialEq)]
pub struct PointWeights {
    pub weights: Vec<f64>,
    pub outside_box: bool,
}

fn check_bundle_box(bundle: &StartupBundle, bbox: &BoundingBox) -> Result<()> {
    if bundle.dim() != bbox.dim() {
        return Err(Error::DimensionMismatch {
            expected: bundle.dim(),
            found: bbox.dim(),
        });
    }
    Ok(())
}

/// Maps the reference rule into the box: `P_i = Lambda Q_i + C`,
/// `u = det(Lambda) z`.
pub fn map_rule(bundle: &StartupBundle, bbox: &BoundingBox) -> Result<(PointSet, Vec<f64>)> {
    check_bundle_box(bundle, bbox)?;
    let nodes = bundle.rule.nodes.map(|q, p| bbox.from_reference(q, p));
    let det = bbox.scaling_det();
    let u = bundle.rule.weights.iter().map(|z| det * z).collect();
    Ok((nodes, u))
}

/// Moments of integration against the Chebyshev measure carried onto the
/// box, `det(Lambda) pi^{d/2} delta_{j,0}`. The synthesized weights are then
/// the mapped positive weights `u`.
pub fn chebyshev_measure_moments(basis: &IndexBasis, bbox: &BoundingBox) -> MomentVector {
    let mut values = vec![0.0; basis.len()];
    values[0] = bbox.scaling_det() * PI.powf(basis.dim() as f64 / 2.0);
    MomentVector {
        values,
        basis: basis.clone(),
        bbox: bbox.clone(),
        functional_tag: "chebyshev-measure".into(),
    }
}

/// ORTHOCUB weights `w = diag(z) V m` on the mapped nodes.
pub fn orthocub_weights(
    bundle: &StartupBundle,
    bbox: &BoundingBox,
    moments: &MomentVector,
) -> Result<CubatureRule> {
    check_bundle_box(bundle, bbox)?;
    if moments.basis.dim() != bundle.basis.dim() || moments.basis.degree() != bundle.basis.degree()
    {
        return Err(Error::BasisMismatch(format!(
            "moments are for d = {}, n = {}, bundle is d = {}, n = {}",
            moments.basis.dim(),
            moments.basis.degree(),
            bundle.basis.dim(),
            bundle.basis.degree()
        )));
    }
    if moments.values.len() != bundle.basis.len() {
        return Err(Error::LengthMismatch {
            expected: bundle.basis.len(),
            found: moments.values.len(),
        });
    }
    if &moments.bbox != bbox {
        return Err(Error::BasisMismatch(
            "moments were computed for a different bounding box".into(),
        ));
    }
    let m = DVector::from_column_slice(&moments.values);
    let w = &bundle.weighted_vandermonde * m;
    let (nodes, _) = map_rule(bundle, bbox)?;
    Ok(CubatureRule {
        nodes,
        weights: w.as_slice().to_vec(),
        degree: bundle.degree(),
        bbox: bbox.clone(),
        functional_tag: moments.functional_tag.clone(),
    })
}

/// `sum_i w_i f(P_i)` for samples taken at the rule nodes in order.
pub fn apply_rule(rule: &CubatureRule, samples: &[f64]) -> Result<f64> {
    if samples.len() != rule.weights.len() {
        return Err(Error::LengthMismatch {
            expected: rule.weights.len(),
            found: samples.len(),
        });
    }
    Ok(rule.weights.iter().zip(samples).map(|(w, f)| w * f).sum())
}

/// Hyperinterpolation weights at `p`: `sum_i w_i(p) f(P_i)` is the discrete
/// orthogonal projection of `f` onto `P_n`, evaluated at `p`.
pub fn hyperinterp_weights(
    bundle: &StartupBundle,
    bbox: &BoundingBox,
    p: &[f64],
) -> Result<PointWeights> {
    check_bundle_box(bundle, bbox)?;
    if p.len() != bbox.dim() {
        return Err(Error::DimensionMismatch {
            expected: bbox.dim(),
            found: p.len(),
        });
    }
    let mut q = vec![0.0; p.len()];
    bbox.to_reference(p, &mut q);
    let mut row = vec![0.0; bundle.basis.len()];
    basis_row(&bundle.basis, &q, &mut row);
    let w = &bundle.weighted_vandermonde * DVector::from_vec(row);
    Ok(PointWeights {
        weights: w.as_slice().to_vec(),
        outside_box: !bbox.contains(p, CONTAINMENT_TOL),
    })
}
