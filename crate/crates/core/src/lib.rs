//! Weighted-sum representation of linear functionals on total-degree
//! polynomial spaces.
//!
//! A functional (integration over a curved 2D element, a large QMC sum over a
//! 3D domain, a pointwise partial derivative, ...) is reduced to its moments
//! against a product Chebyshev orthonormal basis on a bounding box. The
//! weights of an exact rule on the nodes of a fixed near-minimal Chebyshev
//! cubature are then one matrix-vector product with a matrix that depends only
//! on the dimension and degree:
//!
//! ```
//! use orthocub::{startup, BoundingBox, RuleKind, chebyshev_measure_moments, orthocub_weights};
//!
//! let bundle = startup(2, 10, RuleKind::NearMinimal).unwrap();
//! assert_eq!(bundle.rule.len(), 72);
//!
//! let bbox = BoundingBox::new(vec![0.0, 0.0], vec![1.0, 3.0]).unwrap();
//! let moments = chebyshev_measure_moments(&bundle.basis, &bbox);
//! let rule = orthocub_weights(&bundle, &bbox, &moments).unwrap();
//! let total: f64 = rule.weights.iter().sum();
//! assert!((total - 0.75 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
//! ```
//!
//! No linear system is solved and no factorization computed on the weight
//! path, so there is no conditioning issue in the weights themselves.

pub mod basis;
pub mod diagnostics;
pub mod domains;
mod error;
pub mod functional;
pub mod geometry;
pub mod io;
pub mod moments;
pub mod points;
pub mod quadrature;
pub mod rules;

pub use basis::{
    chebyshev_orthonormal, chebyshev_primitive, diff_moments_ref, gamma_ratio_half, grlex_indices,
    jacobi_eval, pochhammer, vandermonde_chebyshev, ChebSeries, DerivativeOrder, IndexBasis,
};
pub use diagnostics::{
    geometric_mean, growth_fit, lebesgue_constant_estimate, power_law_exponent, random_poly_trial,
    stability_ratio, GrowthFit, TrialKind, TrialStats,
};
pub use error::{Error, Result};
pub use functional::{
    apply_rule, chebyshev_measure_moments, hyperinterp_weights, map_rule, orthocub_weights,
    BoundingBox, CubatureRule, MomentVector, PointWeights,
};
pub use geometry::{
    bounding_box, halton, indomain_balls, qmc_union_balls, spline_boundary_build, BallUnion,
    Bounded, EndCondition, SplineBoundary, SplinePiece,
};
pub use moments::{
    diff_weights, diff_weights_batch, differentiation_matrix, discrete_moments,
    spline_cheb_moments, DiscreteMeasure, PointWeighting,
};
pub use points::PointSet;
pub use rules::{
    mpx_cube, mpx_square, startup, tensor_gauss_chebyshev, ReferenceRule, RuleKind, StartupBundle,
};
