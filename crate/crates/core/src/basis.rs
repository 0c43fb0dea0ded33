//! Product Chebyshev orthonormal bases on the reference cube `[-1,1]^d`.
//!
//! The univariate factors are the normalized first-kind Chebyshev polynomials
//! `p_s(t) = sqrt((2 - delta_{s0}) / pi) T_s(t)`, orthonormal for the weight
//! `(1 - t^2)^{-1/2}`. A multivariate basis element is the product of one
//! factor per coordinate, indexed by a multi-index of total degree `<= n`.
//!
//! Basis ordering is graded: total degree ascending, and within one total
//! degree the multi-indices are in descending lexicographic order, so for
//! `d = 2` the degree-`g` block is `(g,0), (g-1,1), ..., (0,g)`. Every matrix
//! and moment vector in the crate shares this column order.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::points::PointSet;

/// Multi-index padded to three entries; entries past `dim` are zero.
pub type MultiIndex = [usize; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBasis {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
}

impl IndexBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Dimension of the polynomial space, `C(n + d, d)`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn index(&self, j: usize) -> &[usize] {
        &self.indices[j][..self.dim]
    }

    pub fn indices(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.indices.iter().map(move |ix| &ix[..self.dim])
    }

    pub fn total_degree(&self, j: usize) -> usize {
        self.indices[j].iter().sum()
    }
}

/// Builds the graded basis ordering for `P_n` in dimension `d`.
pub fn grlex_indices(d: usize, n: usize) -> Result<IndexBasis> {
    let mut indices = Vec::with_capacity(binomial(n + d, d));
    match d {
        2 => {
            for g in 0..=n {
                for h in (0..=g).rev() {
                    indices.push([h, g - h, 0]);
                }
            }
        }
        3 => {
            for g in 0..=n {
                for h in (0..=g).rev() {
                    for k in (0..=g - h).rev() {
                        indices.push([h, k, g - h - k]);
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedDimension(d)),
    }
    Ok(IndexBasis {
        dim: d,
        degree: n,
        indices,
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

#[inline]
fn normalization(s: usize) -> f64 {
    if s == 0 {
        (1.0 / PI).sqrt()
    } else {
        (2.0 / PI).sqrt()
    }
}

/// Fills `out[s] = T_s(t)` for `s < out.len()` by the three-term recurrence.
pub fn chebyshev_values(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = t;
    }
    for s in 2..out.len() {
        out[s] = 2.0 * t * out[s - 1] - out[s - 2];
    }
}

/// Fills `out[s] = p_s(t)`, the orthonormal Chebyshev values.
pub fn orthonormal_values(t: f64, out: &mut [f64]) {
    chebyshev_values(t, out);
    for (s, v) in out.iter_mut().enumerate() {
        *v *= normalization(s);
    }
}

/// Normalized first-kind Chebyshev polynomial `p_s(t)`.
pub fn chebyshev_orthonormal(s: usize, t: f64) -> f64 {
    let mut vals = vec![0.0; s + 1];
    orthonormal_values(t, &mut vals);
    vals[s]
}

/// Fills `out[k] = P_k^{(a,b)}(t)` (normalized so `P_k(1) = C(k + a, k)`).
pub fn jacobi_values(a: f64, b: f64, t: f64, out: &mut [f64]) -> Result<()> {
    if a <= -1.0 || b <= -1.0 || a.is_nan() || b.is_nan() {
        return Err(Error::InvalidJacobiParameters { a, b });
    }
    if out.is_empty() {
        return Ok(());
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 0.5 * ((a + b + 2.0) * t + (a - b));
    }
    let ab = a + b;
    for k in 2..out.len() {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        let denom = 2.0 * kf * (kf + ab) * (c - 2.0);
        let lin = (c - 1.0) * (c * (c - 2.0) * t + a * a - b * b);
        let back = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * c;
        out[k] = (lin * out[k - 1] - back * out[k - 2]) / denom;
    }
    Ok(())
}

/// Jacobi polynomial `P_k^{(a,b)}(t)`; zero for negative `k`.
pub fn jacobi_eval(a: f64, b: f64, k: i64, t: f64) -> Result<f64> {
    if a <= -1.0 || b <= -1.0 || a.is_nan() || b.is_nan() {
        return Err(Error::InvalidJacobiParameters { a, b });
    }
    if k < 0 {
        return Ok(0.0);
    }
    let mut vals = vec![0.0; k as usize + 1];
    jacobi_values(a, b, t, &mut vals)?;
    Ok(vals[k as usize])
}

/// Evaluates every basis element at a reference point `q`.
pub fn basis_row(basis: &IndexBasis, q: &[f64], out: &mut [f64]) {
    let n = basis.degree + 1;
    let mut factors = vec![0.0; basis.dim * n];
    for (c, &t) in q.iter().enumerate() {
        orthonormal_values(t, &mut factors[c * n..(c + 1) * n]);
    }
    fill_products(basis, |c, s| factors[c * n + s], out);
}

fn fill_products<F: Fn(usize, usize) -> f64>(basis: &IndexBasis, factor: F, out: &mut [f64]) {
    for (o, ix) in out.iter_mut().zip(&basis.indices) {
        let mut v = 1.0;
        for (c, &s) in ix[..basis.dim].iter().enumerate() {
            v *= factor(c, s);
        }
        *o = v;
    }
}

/// `M x N` matrix with entry `(i, j) = psi_j(Q_i)` at reference points.
pub fn vandermonde_chebyshev(points: &PointSet, basis: &IndexBasis) -> Result<DMatrix<f64>> {
    if points.dim() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: points.dim(),
        });
    }
    let mut v = DMatrix::zeros(points.len(), basis.len());
    let mut row = vec![0.0; basis.len()];
    for (i, q) in points.iter().enumerate() {
        basis_row(basis, q, &mut row);
        for (j, &x) in row.iter().enumerate() {
            v[(i, j)] = x;
        }
    }
    Ok(v)
}

/// A univariate polynomial in the Chebyshev basis, `sum_k c_k T_k(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn monomial(s: usize) -> Self {
        let mut coeffs = vec![0.0; s + 1];
        coeffs[s] = 1.0;
        Self { coeffs }
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        let c0 = self.coeffs.first().copied().unwrap_or(0.0);
        t * b1 - b2 + c0
    }

    /// Evaluates against precomputed `T_k(t)` values.
    pub fn eval_with(&self, cheb: &[f64]) -> f64 {
        self.coeffs.iter().zip(cheb).map(|(c, t)| c * t).sum()
    }

    pub fn derivative(&self) -> Self {
        let m = self.coeffs.len();
        if m <= 1 {
            return Self { coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; m + 1];
        for k in (1..m).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(m - 1);
        Self { coeffs: d }
    }
}

/// Antiderivative of `T_s` with zero integration constant, in Chebyshev form.
pub fn chebyshev_primitive(s: usize) -> ChebSeries {
    let mut coeffs = vec![0.0; s + 2];
    match s {
        0 => coeffs[1] = 1.0,
        1 => coeffs[2] = 0.25,
        _ => {
            coeffs[s + 1] = 0.5 / (s + 1) as f64;
            coeffs[s - 1] = -0.5 / (s - 1) as f64;
        }
    }
    ChebSeries { coeffs }
}

/// Rising factorial `(u)_v = u (u+1) ... (u+v-1)`.
pub fn pochhammer(u: f64, v: usize) -> f64 {
    (0..v).fold(1.0, |acc, i| acc * (u + i as f64))
}

/// `Gamma(u + 1) / Gamma(u + 1/2)` as the Pochhammer quotient
/// `(1)_u / ((1/2)_u sqrt(pi))`, accumulated factor by factor.
pub fn gamma_ratio_half(u: usize) -> f64 {
    let ratio = (1..=u).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * (i / (i - 0.5))
    });
    ratio / PI.sqrt()
}

/// Partial derivative order `(alpha_1, ..., alpha_d)` with total order at most 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DerivativeOrder {
    dim: usize,
    alpha: [usize; 3],
}

impl DerivativeOrder {
    pub fn new(alpha: &[usize]) -> Result<Self> {
        check_dim(alpha.len())?;
        let order: usize = alpha.iter().sum();
        if order > 2 {
            return Err(Error::UnsupportedDerivativeOrder(order));
        }
        let mut a = [0; 3];
        a[..alpha.len()].copy_from_slice(alpha);
        Ok(Self {
            dim: alpha.len(),
            alpha: a,
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(&vec![0; dim])
    }

    /// Single derivative along `axis` (0-based).
    pub fn first(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for dimension {dim}"
            )));
        }
        let mut a = vec![0; dim];
        a[axis] = 1;
        Self::new(&a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[usize] {
        &self.alpha[..self.dim]
    }

    pub fn order(&self) -> usize {
        self.alpha.iter().sum()
    }

    /// `prod_k lambda_k^{-alpha_k}` for box half-lengths `lambda`.
    pub fn scaling(&self, half_lengths: &[f64]) -> f64 {
        self.components()
            .iter()
            .zip(half_lengths)
            .map(|(&a, &l)| l.powi(-(a as i32)))
            .product()
    }

    pub fn all_first(dim: usize) -> Vec<Self> {
        (0..dim).map(|k| Self::first(dim, k).unwrap()).collect()
    }

    pub fn all_pure_second(dim: usize) -> Vec<Self> {
        (0..dim)
            .map(|k| {
                let mut a = vec![0; dim];
                a[k] = 2;
                Self::new(&a).unwrap()
            })
            .collect()
    }

    pub fn all_mixed(dim: usize) -> Vec<Self> {
        let mut out = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                let mut a = vec![0; dim];
                a[i] = 1;
                a[j] = 1;
                out.push(Self::new(&a).unwrap());
            }
        }
        out
    }

    /// Short label like `dx`, `dyy`, `dxz`, or `id` for the zero order.
    pub fn label(&self) -> String {
        const AXES: [char; 3] = ['x', 'y', 'z'];
        let mut s = String::from("d");
        for (k, &a) in self.components().iter().enumerate() {
            for _ in 0..a {
                s.push(AXES[k]);
            }
        }
        if s.len() == 1 {
            "id".into()
        } else {
            s
        }
    }
}

impl std::str::FromStr for DerivativeOrder {
    type Err = Error;

    /// Parses comma-separated components, e.g. `1,0` or `0,1,1`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad derivative order `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&parts)
    }
}

/// Values `d^a/dt^a p_s(t)` for `s = 0..out.len()`, through the ultraspherical
/// derivative identity for `a >= 1`.
fn orthonormal_derivative_values(a: usize, t: f64, out: &mut [f64]) {
    if a == 0 {
        orthonormal_values(t, out);
        return;
    }
    let n = out.len();
    // Gamma(0)/Gamma(0) = 1 and Gamma(x)/Gamma(0) = 0 make s = 0 vanish for a > 0
    out[0] = 0.0;
    if n <= a {
        out[1..].iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let param = a as f64 - 0.5;
    let mut jac = vec![0.0; n - a];
    jacobi_values(param, param, t, &mut jac).expect("parameter exceeds -1");
    let scale = std::f64::consts::SQRT_2 * 0.5f64.powi(a as i32);
    for s in 1..n {
        out[s] = if s < a {
            0.0
        } else {
            scale * gamma_ratio_half(s) * pochhammer(s as f64, a) * jac[s - a]
        };
    }
}

/// Reference differential moments `{ d^alpha psi_j (Q) }` in basis order.
pub fn diff_moments_ref(
    q: &[f64],
    alpha: &DerivativeOrder,
    basis: &IndexBasis,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; basis.len()];
    diff_moments_ref_into(q, alpha, basis, &mut out)?;
    Ok(out)
}

pub(crate) fn diff_moments_ref_into(
    q: &[f64],
    alpha: &DerivativeOrder,
    basis: &IndexBasis,
    out: &mut [f64],
) -> Result<()> {
    if q.len() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: q.len(),
        });
    }
    if alpha.dim() != basis.dim {
        return Err(Error::DimensionMismatch {
            expected: basis.dim,
            found: alpha.dim(),
        });
    }
    if alpha.order() == 0 {
        basis_row(basis, q, out);
        return Ok(());
    }
    let n = basis.degree + 1;
    let factors: Vec<Vec<f64>> = q
        .iter()
        .zip(alpha.components())
        .map(|(&t, &a)| {
            let mut v = vec![0.0; n];
            orthonormal_derivative_values(a, t, &mut v);
            v
        })
        .collect();
    fill_products(basis, |c, s| factors[c][s], out);
    Ok(())
}
