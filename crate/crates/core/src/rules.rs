//! Positive cubature rules of exactness `2n` for the product Chebyshev measure
//! `prod_k (1 - t_k^2)^{-1/2} dt` on `[-1,1]^d`, and the startup bundle built on
//! top of them.
//!
//! The near-minimal rules are subsets of the tensor Chebyshev-Lobatto grid
//! `cos(i pi / q)`, `q = n + 1`, selected by index parity. On the full grid,
//! multiplying the sampled values by `(-1)^i` along one axis maps `T_a` to
//! `T_{q-a}`, so the grid sum against a parity character only sees
//! products of total degree `>= 2q`. Restricting to one coset of the
//! characters `(-1)^{i+j}` (square) or `(-1)^{i+j}, (-1)^{j+k}` (cube) and
//! scaling the Lobatto weights by 2 or 4 keeps exactness up to degree
//! `2q - 1 = 2n + 1`. On the square the smallest coset gives `(n+2)^2 / 2`
//! nodes (`(n+1)(n+3)/2` for odd `n`). On the cube the coset `i = j = k
//! (mod 2)` is the only one invariant under coordinate permutations; it has
//! `(n+2)^3 / 4` nodes for even `n` and `((n+3)/2)^3 + ((n+1)/2)^3` for odd `n`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::basis::{check_dim, grlex_indices, vandermonde_chebyshev, IndexBasis};
use crate::error::{Error, Result};
use crate::points::PointSet;

pub const MEASURE_TAG: &str = "chebyshev-product-1st-kind";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleKind {
    /// Parity-filtered Chebyshev-Lobatto grids (Morrow-Patterson-Xu type).
    #[default]
    NearMinimal,
    /// Tensor product of `(n+1)`-point Gauss-Chebyshev rules.
    Tensorial,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::NearMinimal => "mpx",
            RuleKind::Tensorial => "tensor",
        })
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mpx" | "near-minimal" => Ok(RuleKind::NearMinimal),
            "tensor" | "tensorial" => Ok(RuleKind::Tensorial),
            other => Err(Error::InvalidArgument(format!(
                "unknown rule kind `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRule {
    pub dim: usize,
    /// Polynomial degree `n`; the rule is exact up to degree `2n`.
    pub degree: usize,
    pub kind: RuleKind,
    pub nodes: PointSet,
    pub weights: Vec<f64>,
}

impl ReferenceRule {
    pub fn ade(&self) -> usize {
        2 * self.degree
    }

    pub fn measure_tag(&self) -> &'static str {
        MEASURE_TAG
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `cos(i pi / q)` for `i = 0..=q`, written as a sine so the grid is exactly
/// antisymmetric with an exact zero in the middle.
fn lobatto_nodes(q: usize) -> Vec<f64> {
    (0..=q)
        .map(|i| (PI * (q as f64 - 2.0 * i as f64) / (2.0 * q as f64)).sin())
        .collect()
}

fn lobatto_weights(q: usize) -> Vec<f64> {
    let mut w = vec![PI / q as f64; q + 1];
    w[0] *= 0.5;
    w[q] *= 0.5;
    w
}

/// Near-minimal rule on the square.
pub fn mpx_square(n: usize) -> ReferenceRule {
    let q = n + 1;
    let x = lobatto_nodes(q);
    let w = lobatto_weights(q);
    let parity = n % 2;
    let mut nodes = PointSet::with_capacity(2, (q + 1) * (q + 1) / 2 + 1);
    let mut weights = Vec::new();
    for i in 0..=q {
        for j in 0..=q {
            if (i + j) % 2 == parity {
                nodes.push(&[x[i], x[j]]).unwrap();
                weights.push(2.0 * w[i] * w[j]);
            }
        }
    }
    ReferenceRule {
        dim: 2,
        degree: n,
        kind: RuleKind::NearMinimal,
        nodes,
        weights,
    }
}

/// Near-minimal rule on the cube.
pub fn mpx_cube(n: usize) -> ReferenceRule {
    let q = n + 1;
    let x = lobatto_nodes(q);
    let w = lobatto_weights(q);
    let keep = |i: usize, j: usize, k: usize| i % 2 == j % 2 && j % 2 == k % 2;
    let mut nodes = PointSet::new(3);
    let mut weights = Vec::new();
    for i in 0..=q {
        for j in 0..=q {
            for k in 0..=q {
                if keep(i, j, k) {
                    nodes.push(&[x[i], x[j], x[k]]).unwrap();
                    weights.push(4.0 * w[i] * w[j] * w[k]);
                }
            }
        }
    }
    ReferenceRule {
        dim: 3,
        degree: n,
        kind: RuleKind::NearMinimal,
        nodes,
        weights,
    }
}

/// Tensor Gauss-Chebyshev rule with `n + 1` nodes per axis.
pub fn tensor_gauss_chebyshev(d: usize, n: usize) -> Result<ReferenceRule> {
    check_dim(d)?;
    let m = n + 1;
    let x: Vec<f64> = (1..=m)
        .map(|i| (PI * (m as f64 + 1.0 - 2.0 * i as f64) / (2.0 * m as f64)).sin())
        .collect();
    let w1 = PI / m as f64;
    let total = m.pow(d as u32);
    let mut nodes = PointSet::with_capacity(d, total);
    let mut p = vec![0.0; d];
    for flat in 0..total {
        let mut rem = flat;
        for c in (0..d).rev() {
            p[c] = x[rem % m];
            rem /= m;
        }
        nodes.push(&p)?;
    }
    Ok(ReferenceRule {
        dim: d,
        degree: n,
        kind: RuleKind::Tensorial,
        nodes,
        weights: vec![w1.powi(d as i32); total],
    })
}

pub fn reference_rule(d: usize, n: usize, kind: RuleKind) -> Result<ReferenceRule> {
    check_dim(d)?;
    match (kind, d) {
        (RuleKind::NearMinimal, 2) => Ok(mpx_square(n)),
        (RuleKind::NearMinimal, _) => Ok(mpx_cube(n)),
        (RuleKind::Tensorial, _) => tensor_gauss_chebyshev(d, n),
    }
}

/// The functional-independent part of the method for one `(d, n)`: the
/// reference rule, the basis ordering, `V` and `diag(z) V`.
#[derive(Debug, Clone)]
pub struct StartupBundle {
    pub rule: ReferenceRule,
    pub basis: IndexBasis,
    /// `V[(i, j)] = psi_j(Q_i)`.
    pub vandermonde: DMatrix<f64>,
    /// `diag(z) V`.
    pub weighted_vandermonde: DMatrix<f64>,
}

impl StartupBundle {
    /// Builds the matrices for a given reference rule.
    pub fn from_rule(rule: ReferenceRule) -> Result<Self> {
        let basis = grlex_indices(rule.dim, rule.degree)?;
        if rule.nodes.len() != rule.weights.len() {
            return Err(Error::LengthMismatch {
                expected: rule.nodes.len(),
                found: rule.weights.len(),
            });
        }
        if rule.len() < basis.len() {
            return Err(Error::InvalidArgument(format!(
                "rule has {} nodes, fewer than the {} basis elements",
                rule.len(),
                basis.len()
            )));
        }
        let vandermonde = vandermonde_chebyshev(&rule.nodes, &basis)?;
        let mut weighted_vandermonde = vandermonde.clone();
        for (i, &z) in rule.weights.iter().enumerate() {
            weighted_vandermonde.row_mut(i).scale_mut(z);
        }
        Ok(Self {
            rule,
            basis,
            vandermonde,
            weighted_vandermonde,
        })
    }

    pub fn dim(&self) -> usize {
        self.rule.dim
    }

    pub fn degree(&self) -> usize {
        self.rule.degree
    }

    /// `max |(diag(z) V)^T V - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.weighted_vandermonde.transpose() * &self.vandermonde;
        let mut worst: f64 = 0.0;
        for j in 0..g.nrows() {
            for k in 0..g.ncols() {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g[(j, k)] - target).abs());
            }
        }
        worst
    }
}

pub fn startup(d: usize, n: usize, kind: RuleKind) -> Result<StartupBundle> {
    StartupBundle::from_rule(reference_rule(d, n, kind)?)
}
