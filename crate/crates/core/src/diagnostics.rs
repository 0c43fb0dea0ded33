//! Stability and accuracy diagnostics: stability ratios, Lebesgue constants
//! of hyperinterpolation and differential cubature, growth fits, and the
//! random-polynomial error harness behind the demos.

use nalgebra::{DMatrix, DVector};
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::DerivativeOrder;
use crate::error::{Error, Result};
use crate::functional::{apply_rule, map_rule, orthocub_weights, BoundingBox, CubatureRule};
use crate::geometry::{bounding_box, halton_in_box, SplineBoundary};
use crate::moments::{
    diff_weights_batch, discrete_moments, spline_cheb_moments, spline_nodes_per_piece,
    DiscreteMeasure,
};
use crate::points::PointSet;
use crate::quadrature::gauss_legendre;
use crate::rules::{startup, RuleKind, StartupBundle};

/// `||w||_1 / |sum w|`; equals 1 exactly when all weights share a sign.
pub fn stability_ratio(rule: &CubatureRule) -> Result<f64> {
    let sum: f64 = rule.weights.iter().sum();
    if sum == 0.0 {
        return Err(Error::ZeroWeightSum);
    }
    Ok(rule.l1_norm() / sum.abs())
}

const PROBE_CHUNK: usize = 256;

/// `max_P ||w(P; d^alpha)||_1` over the probe points.
pub fn lebesgue_constant_estimate(
    bundle: &StartupBundle,
    bbox: &BoundingBox,
    alpha: &DerivativeOrder,
    probes: &PointSet,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::Empty("probe set"));
    }
    let chunks: Vec<PointSet> = probes
        .as_flat()
        .chunks(PROBE_CHUNK * probes.dim())
        .map(|c| PointSet::from_flat(probes.dim(), c.to_vec()))
        .collect::<Result<_>>()?;
    let maxima = chunks
        .par_iter()
        .map(|chunk| {
            let w = diff_weights_batch(bundle, bbox, chunk, alpha)?;
            Ok(w.column_iter()
                .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(maxima.into_iter().fold(0.0, f64::max))
}

/// Least-squares polynomial fit `c_0 + c_1 n + ... + c_p n^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    /// Ascending powers.
    pub coefficients: Vec<f64>,
    /// `||fit - values||_2 / ||values||_2` at the data points.
    pub relative_residual: f64,
}

impl GrowthFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * n + c)
    }
}

pub fn growth_fit(degrees: &[f64], values: &[f64], power: usize) -> Result<GrowthFit> {
    if degrees.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: degrees.len(),
            found: values.len(),
        });
    }
    if degrees.len() < 3 || degrees.len() < power + 1 {
        return Err(Error::InvalidArgument(format!(
            "underdetermined fit: {} points for {} coefficients",
            degrees.len(),
            power + 1
        )));
    }
    let a = DMatrix::from_fn(degrees.len(), power + 1, |i, j| degrees[i].powi(j as i32));
    let b = DVector::from_column_slice(values);
    let coef = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let resid = (&a * &coef - &b).norm() / b.norm().max(f64::MIN_POSITIVE);
    Ok(GrowthFit {
        coefficients: coef.as_slice().to_vec(),
        relative_residual: resid,
    })
}

/// Slope of the least-squares line through `(log n, log value)`.
pub fn power_law_exponent(degrees: &[f64], values: &[f64]) -> Result<f64> {
    if degrees.len() != values.len() || degrees.len() < 2 {
        return Err(Error::InvalidArgument(
            "power-law fit needs at least two matching data points".into(),
        ));
    }
    let xs: Vec<f64> = degrees.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Floor applied to zero errors before taking logarithms.
pub const ERROR_FLOOR: f64 = 1e-17;

pub fn geometric_mean(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return f64::NAN;
    }
    let s: f64 = errors.iter().map(|e| e.max(ERROR_FLOOR).ln()).sum();
    (s / errors.len() as f64).exp()
}

/// Which functional the random-polynomial harness exercises.
#[derive(Debug, Clone, Copy)]
pub enum TrialKind<'a> {
    /// Area integral over a spline element, checked against Green's theorem
    /// applied to the analytic primitive of the test polynomial.
    IntegrateSpline { boundary: &'a SplineBoundary },
    /// Compressed QMC sum, checked against direct summation.
    IntegrateQmc {
        measure: &'a DiscreteMeasure,
        bbox: &'a BoundingBox,
    },
    /// Partial derivative on `[-1,1]^d` at the first `probe_count` Halton
    /// points, checked against the analytic derivative.
    Differentiate {
        alpha: DerivativeOrder,
        probe_count: usize,
    },
}

impl TrialKind<'_> {
    fn dim(&self) -> usize {
        match self {
            TrialKind::IntegrateSpline { .. } => 2,
            TrialKind::IntegrateQmc { measure, .. } => measure.points.dim(),
            TrialKind::Differentiate { alpha, .. } => alpha.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub degree: usize,
    pub errors: Vec<f64>,
    pub geometric_mean: f64,
}

/// Test polynomial `(c_0 + c_1 x_1 + ... + c_d x_d)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPolynomial {
    pub coeffs: Vec<f64>,
    pub degree: usize,
}

impl PowerPolynomial {
    fn linear(&self, p: &[f64]) -> f64 {
        self.coeffs[0]
            + self.coeffs[1..]
                .iter()
                .zip(p)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.linear(p).powi(self.degree as i32)
    }

    /// Analytic `d^alpha` of the power, for total order at most 2.
    pub fn derivative(&self, p: &[f64], alpha: &DerivativeOrder) -> f64 {
        let n = self.degree as i32;
        let order = alpha.order() as i32;
        if order > n {
            return 0.0;
        }
        let falling: f64 = (0..order).map(|k| f64::from(n - k)).product();
        let coef: f64 = alpha
            .components()
            .iter()
            .zip(&self.coeffs[1..])
            .map(|(&a, &c)| c.powi(a as i32))
            .product();
        falling * coef * self.linear(p).powi(n - order)
    }
}

/// Draws `trials` coefficient vectors uniformly in `(0,1)`, in one
/// sequential stream per seed.
pub fn random_power_polynomials(
    dim: usize,
    degree: usize,
    trials: usize,
    seed: u64,
) -> Vec<PowerPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| PowerPolynomial {
            coeffs: (0..=dim).map(|_| rng.sample::<f64, _>(Open01)).collect(),
            degree,
        })
        .collect()
}

/// `int_Omega p dx dy` for a test polynomial via Green's theorem, using the
/// exact primitive in whichever variable has the larger coefficient and
/// Gauss-Legendre on each piece at twice the node count of the moment path.
pub fn green_polynomial_integral(boundary: &SplineBoundary, poly: &PowerPolynomial) -> f64 {
    let boundary = if boundary.signed_area() < 0.0 {
        boundary.reversed()
    } else {
        boundary.clone()
    };
    let n = poly.degree;
    let (gx, gw) = gauss_legendre(2 * spline_nodes_per_piece(n));
    let use_x = poly.coeffs[1] >= poly.coeffs[2];
    let (c, sign) = if use_x {
        (poly.coeffs[1], 1.0)
    } else {
        (poly.coeffs[2], -1.0)
    };
    let denom = (n + 1) as f64 * c;
    let mut acc = 0.0;
    for piece in &boundary.pieces {
        for (&g, &w) in gx.iter().zip(&gw) {
            let s = 0.5 * (g + 1.0);
            let p = piece.eval(s);
            let dp = piece.derivative(s);
            let prim = poly.linear(&p).powi(n as i32 + 1) / denom;
            let dcoord = if use_x { dp[1] } else { dp[0] };
            acc += 0.5 * w * prim * dcoord;
        }
    }
    sign * acc
}

fn relative_error(approx: f64, exact: f64) -> f64 {
    (approx - exact).abs() / exact.abs()
}

/// Runs `trials` random polynomials of degree `n` through one functional
/// family and reports per-trial relative errors with their geometric mean.
pub fn random_poly_trial(
    kind: TrialKind<'_>,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<TrialStats> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let polys = random_power_polynomials(kind.dim(), n, trials, seed);
    let errors = match kind {
        TrialKind::IntegrateSpline { boundary } => {
            let bbox = bounding_box(boundary, 0.0)?;
            let bundle = startup(2, n, RuleKind::NearMinimal)?;
            let m = spline_cheb_moments(boundary, &bbox, &bundle.basis)?;
            let rule = orthocub_weights(&bundle, &bbox, &m)?;
            polys
                .par_iter()
                .map(|p| {
                    let samples: Vec<f64> = rule.nodes.iter().map(|x| p.eval(x)).collect();
                    let approx = apply_rule(&rule, &samples)?;
                    Ok(relative_error(
                        approx,
                        green_polynomial_integral(boundary, p),
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        TrialKind::IntegrateQmc { measure, bbox } => {
            let bundle = startup(measure.points.dim(), n, RuleKind::NearMinimal)?;
            let m = discrete_moments(measure, bbox, &bundle.basis)?;
            let rule = orthocub_weights(&bundle, bbox, &m)?;
            polys
                .iter()
                .map(|p| {
                    let samples: Vec<f64> = rule.nodes.iter().map(|x| p.eval(x)).collect();
                    let approx = apply_rule(&rule, &samples)?;
                    Ok(relative_error(approx, measure.apply(|x| p.eval(x))))
                })
                .collect::<Result<Vec<_>>>()?
        }
        TrialKind::Differentiate { alpha, probe_count } => {
            let dim = alpha.dim();
            let bbox = BoundingBox::reference(dim);
            let bundle = startup(dim, n, RuleKind::NearMinimal)?;
            let probes = halton_in_box(&bbox, probe_count, 1)?;
            let w = diff_weights_batch(&bundle, &bbox, &probes, &alpha)?;
            let (nodes, _) = map_rule(&bundle, &bbox)?;
            polys
                .par_iter()
                .map(|p| {
                    let f = DVector::from_iterator(nodes.len(), nodes.iter().map(|x| p.eval(x)));
                    let approx = w.tr_mul(&f);
                    let exact = DVector::from_iterator(
                        probes.len(),
                        probes.iter().map(|x| p.derivative(x, &alpha)),
                    );
                    Ok((approx - &exact).norm() / exact.norm())
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(TrialStats {
        degree: n,
        geometric_mean: geometric_mean(&errors),
        errors,
    })
}
