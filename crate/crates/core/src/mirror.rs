//! Laurent-polynomial mirrors and the integral side of every identity:
//! oscillatory integrals, Hilbert-transform integrals, sublevel-region
//! volumes, fiber integrals and their weighted nef-partition variants.
//!
//! All integrals run in logarithmic coordinates t = log x, where a positive
//! Laurent polynomial is a strictly convex sum of exponentials of linear
//! forms.

use crate::fan::FanData;
use crate::quad::{adaptive_1d, nested_box};
use crate::rational::{rank, rat_int, rref, Rat};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MirrorError {
    #[error("mirror assumptions violated: {0}")]
    Assumptions(String),
    #[error("Newton iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("s = {0} lies on or too near the spectral cut")]
    OnCut(Complex64),
    #[error("integration region is unbounded: {0}")]
    Unbounded(String),
    #[error("region is degenerate at the given levels: {0}")]
    Degenerate(String),
    #[error("requested tolerance {requested:e} not met: achieved {achieved:e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },
    #[error("fiber is non-generic at the given levels: Richardson residual {0:e}")]
    NonGenericFiber(f64),
}

/// A finite sum of real-coefficient monomials with integer exponents.
#[derive(Debug, Clone)]
pub struct LaurentPoly {
    pub terms: Vec<(f64, Vec<i64>)>,
    pub dim: usize,
}

impl LaurentPoly {
    pub fn new(terms: Vec<(f64, Vec<i64>)>) -> Self {
        assert!(!terms.is_empty(), "empty Laurent polynomial");
        let dim = terms[0].1.len();
        assert!(terms.iter().all(|(_, e)| e.len() == dim));
        LaurentPoly { terms, dim }
    }

    /// W(e^t)
    pub fn eval_log(&self, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, a)| {
                let dot: f64 = a.iter().zip(t.iter()).map(|(&ai, &ti)| ai as f64 * ti).sum();
                c * dot.exp()
            })
            .sum()
    }

    /// value, gradient and Hessian of t -> W(e^t)
    pub fn eval_grad_hess(&self, t: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = self.dim;
        let mut f = 0.0;
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for (c, a) in &self.terms {
            let dot: f64 = a.iter().zip(t.iter()).map(|(&ai, &ti)| ai as f64 * ti).sum();
            let w = c * dot.exp();
            f += w;
            for i in 0..n {
                g[i] += w * a[i] as f64;
                for j in 0..n {
                    h[(i, j)] += w * a[i] as f64 * a[j] as f64;
                }
            }
        }
        (f, g, h)
    }
}

/// The toric mirror `W(x) = sum_j e^{-lambda_j} x^{b_j}`.
pub fn build_mirror(fan: &FanData, lambda: &[f64]) -> LaurentPoly {
    assert_eq!(lambda.len(), fan.ray_count());
    LaurentPoly::new(
        fan.rays
            .iter()
            .zip(lambda.iter())
            .map(|(b, &l)| ((-l).exp(), b.clone()))
            .collect(),
    )
}

/// Nef-partition grouping: `parts` lists the ray-index subsets defining
/// W^(1)..W^(c); the remaining rays form W^(0) (None when no rays remain).
pub fn build_mirror_parts(
    fan: &FanData,
    lambda: &[f64],
    parts: &[Vec<usize>],
) -> (Option<LaurentPoly>, Vec<LaurentPoly>) {
    assert_eq!(lambda.len(), fan.ray_count());
    let mut used = vec![false; fan.ray_count()];
    let mut out = Vec::new();
    for part in parts {
        let terms: Vec<(f64, Vec<i64>)> = part
            .iter()
            .map(|&j| {
                assert!(!used[j], "ray {j} used in two parts");
                used[j] = true;
                ((-lambda[j]).exp(), fan.rays[j].clone())
            })
            .collect();
        out.push(LaurentPoly::new(terms));
    }
    let rest: Vec<(f64, Vec<i64>)> = (0..fan.ray_count())
        .filter(|&j| !used[j])
        .map(|j| ((-lambda[j]).exp(), fan.rays[j].clone()))
        .collect();
    let w0 = if rest.is_empty() {
        None
    } else {
        Some(LaurentPoly::new(rest))
    };
    (w0, out)
}

/// Diagnostics for the two mirror assumptions: origin interior to the
/// Newton polytope, and positive coefficients.
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub newton_interior: bool,
    pub positive_coefficients: bool,
    /// strictly positive convex weights on the exponents summing to zero
    pub certificate: Option<Vec<f64>>,
}

impl AssumptionReport {
    pub fn pass(&self) -> bool {
        self.newton_interior && self.positive_coefficients
    }
}

/// Exact feasibility check: the origin is interior to the Newton polytope
/// iff the exponents span R^n and admit a strictly positive convex
/// combination equal to zero. Basic feasible solutions are enumerated over
/// supports of size <= n+1; a strictly positive solution exists iff every
/// exponent appears in the support of some basic solution.
pub fn check_assumptions(w: &LaurentPoly) -> AssumptionReport {
    let positive_coefficients = w.terms.iter().all(|&(c, _)| c > 0.0);
    let n = w.dim;
    let m = w.terms.len();
    let exps: Vec<&Vec<i64>> = w.terms.iter().map(|(_, a)| a).collect();
    let full: Vec<Vec<Rat>> = exps
        .iter()
        .map(|a| a.iter().map(|&x| rat_int(x)).collect())
        .collect();
    if rank(&full) < n {
        return AssumptionReport {
            newton_interior: false,
            positive_coefficients,
            certificate: None,
        };
    }
    let mut cover = vec![false; m];
    let mut cert_sum = vec![Rat::from_integer(0.into()); m];
    let mut cert_count = 0usize;
    let mut subset: Vec<usize> = Vec::new();
    enumerate_subsets(m, n + 1, &mut subset, &mut |t: &[usize]| {
        // solve sum_{j in t} mu_j a_j = 0, sum mu_j = 1 exactly
        let rows = n + 1;
        let mut aug: Vec<Vec<Rat>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rat> = t
                    .iter()
                    .map(|&j| {
                        if r < n {
                            rat_int(exps[j][r])
                        } else {
                            rat_int(1)
                        }
                    })
                    .collect();
                row.push(if r < n { rat_int(0) } else { rat_int(1) });
                row
            })
            .collect();
        let pivots = rref(&mut aug);
        // inconsistent if a pivot lands in the augmented column
        if pivots.iter().any(|&p| p == t.len()) {
            return;
        }
        // require a unique solution on this support
        if pivots.len() != t.len() {
            return;
        }
        let sol: Vec<Rat> = (0..t.len()).map(|i| aug[i][t.len()].clone()).collect();
        if sol.iter().any(|x| x.is_negative()) {
            return;
        }
        for (i, &j) in t.iter().enumerate() {
            if sol[i].is_positive() {
                cover[j] = true;
            }
            cert_sum[j] += &sol[i];
        }
        cert_count += 1;
    });
    let newton_interior = cover.iter().all(|&c| c);
    let certificate = if newton_interior && cert_count > 0 {
        let total: Rat = cert_sum.iter().sum();
        Some(
            cert_sum
                .iter()
                .map(|x| crate::rational::rat_to_f64(&(x / &total)))
                .collect(),
        )
    } else {
        None
    };
    AssumptionReport {
        newton_interior,
        positive_coefficients,
        certificate,
    }
}

fn enumerate_subsets(m: usize, max_len: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn rec(
        m: usize,
        max_len: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if !cur.is_empty() {
            f(cur);
        }
        if cur.len() == max_len {
            return;
        }
        for j in start..m {
            cur.push(j);
            rec(m, max_len, j + 1, cur, f);
            cur.pop();
        }
    }
    rec(m, max_len, 0, cur, f);
}

/// Global minimum of the strictly convex function t -> W(e^t).
#[derive(Debug, Clone)]
pub struct ConvexMinResult {
    pub min_value: f64,
    pub argmin_log: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

/// Damped Newton iteration from t = 0 to gradient norm < 1e-12.
pub fn minimize_log(w: &LaurentPoly) -> Result<ConvexMinResult, MirrorError> {
    let report = check_assumptions(w);
    if !report.pass() {
        return Err(MirrorError::Assumptions(format!(
            "newton_interior={}, positive_coefficients={}",
            report.newton_interior, report.positive_coefficients
        )));
    }
    let n = w.dim;
    let mut t = DVector::zeros(n);
    let max_iter = 200;
    for _ in 0..max_iter {
        let (f, g, h) = w.eval_grad_hess(t.as_slice());
        if g.norm() < 1e-12 {
            return Ok(ConvexMinResult {
                min_value: f,
                argmin_log: t.as_slice().to_vec(),
                hessian: h,
            });
        }
        let chol = h
            .clone()
            .cholesky()
            .ok_or_else(|| MirrorError::Assumptions("Hessian not positive definite".into()))?;
        let dir = chol.solve(&(-&g));
        let slope = g.dot(&dir);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &t + alpha * &dir;
            let fc = w.eval_log(cand.as_slice());
            if fc.is_finite() && fc <= f + 1e-4 * alpha * slope {
                t = cand;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(MirrorError::NoConvergence(max_iter));
        }
    }
    Err(MirrorError::NoConvergence(max_iter))
}

/// Numerical integral value with an honest error estimate.
#[derive(Debug, Clone)]
pub struct IntegralResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: String,
    pub samples_or_nodes: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// quadrature for dim <= 3, Monte Carlo beyond
    Auto,
    Quadrature,
    MonteCarlo,
}

const MC_DEFAULT_SAMPLES: usize = 400_000;
const QUAD_MAX_PANELS: usize = 4000;

/// Bounding box of the polyhedron `{ <a_j, t> <= beta_j }` by brute-force
/// vertex enumeration; returns None when the polyhedron is unbounded or
/// degenerate.
fn polyhedron_box(constraints: &[(Vec<f64>, f64)], dim: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    if dim == 1 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (a, b) in constraints {
            if a[0] > 1e-12 {
                hi = hi.min(b / a[0]);
            } else if a[0] < -1e-12 {
                lo = lo.max(b / a[0]);
            }
        }
        return (lo.is_finite() && hi.is_finite() && lo <= hi).then(|| (vec![lo], vec![hi]));
    }
    let m = constraints.len();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let mut subset: Vec<usize> = Vec::new();
    enumerate_subsets(m, dim, &mut subset, &mut |t: &[usize]| {
        if t.len() != dim {
            return;
        }
        let a = DMatrix::from_fn(dim, dim, |r, c| constraints[t[r]].0[c]);
        let b = DVector::from_fn(dim, |r, _| constraints[t[r]].1);
        let Some(sol) = a.lu().solve(&b) else { return };
        if !sol.iter().all(|x| x.is_finite() && x.abs() < 1e12) {
            return;
        }
        let feasible = constraints.iter().all(|(n_, b_)| {
            let s: f64 = n_.iter().zip(sol.iter()).map(|(x, y)| x * y).sum();
            s <= b_ + 1e-7 * (1.0 + b_.abs())
        });
        if feasible {
            vertices.push(sol.as_slice().to_vec());
        }
    });
    if vertices.is_empty() {
        return None;
    }
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for v in &vertices {
        for i in 0..dim {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    Some((lo, hi))
}

/// Distance from the origin to the boundary of the convex hull of the
/// exponents: the uniform linear growth rate of log W along rays.
fn newton_growth_rate(points: &[Vec<i64>], dim: usize) -> f64 {
    if dim == 1 {
        let max = points.iter().map(|p| p[0]).max().unwrap_or(0);
        let min = points.iter().map(|p| p[0]).min().unwrap_or(0);
        return (max.min(-min)) as f64;
    }
    let m = points.len();
    let mut kappa = f64::INFINITY;
    let mut idx: Vec<usize> = Vec::new();
    enumerate_subsets(m, dim, &mut idx, &mut |t: &[usize]| {
        if t.len() != dim {
            return;
        }
        // affine hyperplane through the chosen points: <h, p> = beta
        let a = DMatrix::from_fn(dim, dim, |r, c| points[t[r]][c] as f64);
        let b = DVector::from_element(dim, 1.0);
        let Some(h) = a.lu().solve(&b) else { return };
        let hn = h.norm();
        if !(hn.is_finite()) || hn < 1e-12 {
            return;
        }
        // facet iff every point lies on the <= 1 side
        let one_side = points.iter().all(|p| {
            let s: f64 = p.iter().zip(h.iter()).map(|(&x, y)| x as f64 * y).sum();
            s <= 1.0 + 1e-9
        });
        if one_side {
            kappa = kappa.min(1.0 / hn);
        }
    });
    if kappa.is_finite() {
        kappa
    } else {
        0.0
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `int_{(R_+)^n} e^{-W/z} dx/x` by recentred tensor quadrature (dim <= 3)
/// or importance-sampled Monte Carlo with a Gaussian proposal (dim >= 4).
pub fn oscillatory_integral(
    w: &LaurentPoly,
    z: f64,
    tol: f64,
    method: Method,
    seed: Option<u64>,
) -> Result<IntegralResult, MirrorError> {
    assert!(z > 0.0 && tol > 0.0);
    let min = minimize_log(w)?;
    let t_star = &min.argmin_log;
    let t_min = min.min_value;
    let n = w.dim;
    let use_quad = match method {
        Method::Auto => n <= 3,
        Method::Quadrature => true,
        Method::MonteCarlo => false,
    };
    // Laplace scale for converting the relative tolerance to absolute
    let det_h = min
        .hessian
        .clone()
        .cholesky()
        .map(|c| c.l().diagonal().iter().map(|x| x * x).product::<f64>())
        .unwrap_or(1.0);
    let laplace_scale = (2.0 * std::f64::consts::PI * z).powf(n as f64 / 2.0) / det_h.sqrt();
    if use_quad {
        // cutoff region {W <= T + z L}: tail < tol/10 of the Laplace scale
        let growth = 10.0 + 3.0 * n as f64 - tol.ln();
        let cutoff = t_min + z * growth;
        let cons: Vec<(Vec<f64>, f64)> = w
            .terms
            .iter()
            .map(|(c, a)| {
                (
                    a.iter().map(|&x| x as f64).collect(),
                    (cutoff / c).ln(),
                )
            })
            .collect();
        let (mut lo, mut hi) = polyhedron_box(&cons, n)
            .ok_or_else(|| MirrorError::Unbounded("oscillatory integrand support".into()))?;
        for i in 0..n {
            lo[i] -= 0.5;
            hi[i] += 0.5;
        }
        let f = |t: &[f64]| Complex64::new((-(w.eval_log(t) - t_min) / z).exp(), 0.0);
        // the shifted integrand integrates to ~laplace_scale; ask for an
        // order more than requested since the GK estimate is conservative
        let quad_tol = tol * laplace_scale.max(1e-280) / 20.0;
        let (v, e, evals) = nested_box(&f, &lo, &hi, quad_tol, QUAD_MAX_PANELS);
        let scale = (-t_min / z).exp();
        let value = v * scale;
        let err = e * scale;
        let achieved = err / value.norm().max(laplace_scale * scale);
        if achieved > tol {
            return Err(MirrorError::ToleranceNotMet {
                requested: tol,
                achieved,
            });
        }
        Ok(IntegralResult {
            value,
            error_estimate: err,
            method: "quadrature".into(),
            samples_or_nodes: evals,
            seed: None,
        })
    } else {
        let samples = MC_DEFAULT_SAMPLES;
        let seed_val = seed.unwrap_or(0x6d67616d6d61);
        let mut rng = ChaCha8Rng::seed_from_u64(seed_val);
        let chol = min
            .hessian
            .clone()
            .cholesky()
            .ok_or_else(|| MirrorError::Assumptions("Hessian not positive definite".into()))?;
        let l_t = chol.l().transpose();
        let norm_const = (2.0 * std::f64::consts::PI).powf(n as f64 / 2.0)
            * z.powf(n as f64 / 2.0)
            / det_h.sqrt();
        let mut sum = 0.0f64;
        let mut sum2 = 0.0f64;
        for _ in 0..samples {
            let xi = DVector::from_fn(n, |_, _| gaussian(&mut rng));
            let y = l_t
                .solve_upper_triangular(&xi)
                .expect("triangular solve succeeds");
            let x: Vec<f64> = t_star
                .iter()
                .zip(y.iter())
                .map(|(&a, &b)| a + z.sqrt() * b)
                .collect();
            let wv = w.eval_log(&x);
            let logw = -(wv - t_min) / z + 0.5 * xi.norm_squared();
            let weight = logw.exp() * norm_const;
            sum += weight;
            sum2 += weight * weight;
        }
        let mean = sum / samples as f64;
        let var = (sum2 / samples as f64 - mean * mean).max(0.0) / samples as f64;
        let scale = (-t_min / z).exp();
        Ok(IntegralResult {
            value: Complex64::new(mean * scale, 0.0),
            error_estimate: var.sqrt() * scale,
            method: "monte-carlo".into(),
            samples_or_nodes: samples,
            seed: Some(seed_val),
        })
    }
}

/// `int (W - s)^{-1} dx/x` for s off the cut [T, infinity).
pub fn hilbert_integral(
    w: &LaurentPoly,
    s: Complex64,
    tol: f64,
) -> Result<IntegralResult, MirrorError> {
    let min = minimize_log(w)?;
    let t_min = min.min_value;
    if s.im == 0.0 && s.re >= t_min - 1e-8 * t_min.abs() {
        return Err(MirrorError::OnCut(s));
    }
    let n = w.dim;
    // uniform bound |1/(W-s)| <= kappa_s / (W+1)
    let mut kappa_s = 0.0f64;
    for k in 0..2000 {
        let u = t_min * (1.0 + 1e-3 * (k as f64 * 0.01).exp());
        let r = (u + 1.0) / (Complex64::new(u, 0.0) - s).norm();
        kappa_s = kappa_s.max(r);
    }
    kappa_s *= 1.2;
    let exps: Vec<Vec<i64>> = w.terms.iter().map(|(_, a)| a.clone()).collect();
    let kappa = newton_growth_rate(&exps, n);
    if kappa <= 0.0 {
        return Err(MirrorError::Unbounded(
            "exponents do not surround the origin".into(),
        ));
    }
    let m0 = w
        .terms
        .iter()
        .map(|(c, a)| {
            let dot: f64 = a
                .iter()
                .zip(min.argmin_log.iter())
                .map(|(&ai, &ti)| ai as f64 * ti)
                .sum();
            c * dot.exp()
        })
        .fold(f64::INFINITY, f64::min);
    // radius with certified exponential tail
    let mut radius = 10.0f64;
    for _ in 0..4 {
        let surface = 2.0 * n as f64 * (2.0 * radius).powf((n - 1) as f64);
        let target = (kappa_s * surface * 10.0 / (m0 * kappa * tol)).max(2.0);
        radius = target.ln() / kappa + 1.0;
    }
    let lo: Vec<f64> = min.argmin_log.iter().map(|t| t - radius).collect();
    let hi: Vec<f64> = min.argmin_log.iter().map(|t| t + radius).collect();
    let f = |t: &[f64]| 1.0 / (Complex64::new(w.eval_log(t), 0.0) - s);
    // two-stage: rough value fixes the absolute tolerance
    let (rough, _, _) = nested_box(&f, &lo, &hi, 1e-3, 600);
    let abs_tol = tol * rough.norm().max(1e-12) / 2.0;
    let (v, e, evals) = nested_box(&f, &lo, &hi, abs_tol, QUAD_MAX_PANELS);
    Ok(IntegralResult {
        value: v,
        error_estimate: e + tol * v.norm() / 10.0,
        method: "quadrature".into(),
        samples_or_nodes: evals,
        seed: None,
    })
}

struct RegionSetup<'a> {
    ws: &'a [&'a LaurentPoly],
    s: &'a [f64],
    weight: Option<(&'a LaurentPoly, f64, f64)>, // (W0, z, T0)
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl RegionSetup<'_> {
    fn violation(&self, t: &[f64]) -> f64 {
        self.ws
            .iter()
            .zip(self.s.iter())
            .map(|(w, &si)| w.eval_log(t) - si)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn weight_at(&self, t: &[f64]) -> f64 {
        match self.weight {
            Some((w0, z, t0)) => (-(w0.eval_log(t) - t0) / z).exp(),
            None => 1.0,
        }
    }
}

/// Interior point of the region, or the sign of its emptiness. Minimizes
/// sum_i W_i/s_i (strictly convex) and refines with a softmax of the
/// constraint violations when that is not conclusive.
fn region_interior_point(
    ws: &[&LaurentPoly],
    s: &[f64],
    dim: usize,
) -> Result<Option<Vec<f64>>, MirrorError> {
    let combined = LaurentPoly::new(
        ws.iter()
            .zip(s.iter())
            .flat_map(|(w, &si)| {
                w.terms
                    .iter()
                    .map(move |(c, a)| (c / si, a.clone()))
                    .collect::<Vec<_>>()
            })
            .collect(),
    );
    let min = minimize_log(&combined)?;
    let mut best = min.argmin_log.clone();
    let viol = |t: &[f64]| -> f64 {
        ws.iter()
            .zip(s.iter())
            .map(|(w, &si)| (w.eval_log(t) - si) / si.max(1.0))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    if viol(&best) < -1e-12 {
        return Ok(Some(best));
    }
    // softmax refinement toward the Chebyshev-like centre
    for &sigma in &[1.0, 0.3, 0.1, 0.03, 0.01] {
        let mut t = DVector::from_vec(best.clone());
        for _ in 0..80 {
            let n = dim;
            let mut grad = DVector::zeros(n);
            let mut hess = DMatrix::zeros(n, n);
            let mut sum_e = 0.0;
            let mut parts: Vec<(f64, DVector<f64>, DMatrix<f64>)> = Vec::new();
            for (w, &si) in ws.iter().zip(s.iter()) {
                let (f, g, h) = w.eval_grad_hess(t.as_slice());
                let e = ((f - si) / (si.max(1.0) * sigma)).exp();
                sum_e += e;
                parts.push((e, g / si.max(1.0), h / si.max(1.0)));
            }
            for (e, g, h) in &parts {
                let p = e / sum_e;
                grad += g * p / sigma;
                hess += h * p / sigma;
                hess += g * g.transpose() * (p / (sigma * sigma));
            }
            // drop the rank-one correction of the log-sum-exp (kept PSD)
            if grad.norm() < 1e-11 {
                break;
            }
            let Some(ch) = hess.clone().cholesky() else { break };
            let dir = ch.solve(&(-&grad));
            let cur = sigma
                * (parts.iter().map(|(e, _, _)| e).sum::<f64>() / parts.len() as f64)
                    .ln();
            let mut alpha = 1.0;
            for _ in 0..40 {
                let cand = &t + alpha * &dir;
                let mut se = 0.0;
                for (w, &si) in ws.iter().zip(s.iter()) {
                    se += ((w.eval_log(cand.as_slice()) - si) / (si.max(1.0) * sigma)).exp();
                }
                let val = sigma * (se / parts.len() as f64).ln();
                if val.is_finite() && val < cur {
                    t = cand;
                    break;
                }
                alpha *= 0.5;
            }
        }
        best = t.as_slice().to_vec();
        if viol(&best) < -1e-12 {
            return Ok(Some(best));
        }
    }
    let v = viol(&best);
    if v.abs() <= 1e-9 {
        return Err(MirrorError::Degenerate(format!(
            "levels touch the minimum (violation {v:e})"
        )));
    }
    Ok(None)
}

fn region_box(
    ws: &[&LaurentPoly],
    s: &[f64],
    weight: Option<(&LaurentPoly, f64)>,
    tol: f64,
    dim: usize,
) -> Result<(Vec<f64>, Vec<f64>, Option<f64>), MirrorError> {
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for (w, &si) in ws.iter().zip(s.iter()) {
        for (c, a) in &w.terms {
            cons.push((
                a.iter().map(|&x| x as f64).collect(),
                (si / c).ln(),
            ));
        }
    }
    let mut t0 = None;
    if let Some((w0, z)) = weight {
        let min0 = minimize_log(w0).or_else(|_| {
            // the weight alone need not satisfy the assumptions; fall back
            // to the joint minimiser for the shift
            let combined = LaurentPoly::new(
                w0.terms
                    .iter()
                    .cloned()
                    .chain(ws.iter().flat_map(|w| w.terms.iter().cloned()))
                    .collect(),
            );
            minimize_log(&combined).map(|m| ConvexMinResult {
                min_value: w0.eval_log(&m.argmin_log),
                argmin_log: m.argmin_log,
                hessian: m.hessian,
            })
        })?;
        let cutoff = min0.min_value + z * (10.0 + 3.0 * dim as f64 - tol.ln());
        for (c, a) in &w0.terms {
            cons.push((
                a.iter().map(|&x| x as f64).collect(),
                (cutoff / c).ln(),
            ));
        }
        t0 = Some(min0.min_value);
    }
    let (mut lo, mut hi) = polyhedron_box(&cons, dim)
        .ok_or_else(|| MirrorError::Unbounded("region of integration".into()))?;
    for i in 0..dim {
        lo[i] -= 0.25;
        hi[i] += 0.25;
    }
    Ok((lo, hi, t0))
}

/// One-dimensional feasible interval of the last coordinate given a prefix,
/// by convex minimization and bisection; returns None when the slice is
/// empty.
fn slice_interval(setup: &RegionSetup, prefix: &[f64]) -> Option<(f64, f64)> {
    let axis = prefix.len();
    let (a, b) = (setup.lo[axis], setup.hi[axis]);
    let h = |u: f64| -> f64 {
        let mut t = prefix.to_vec();
        t.push(u);
        setup.violation(&t)
    };
    // golden-section minimum of the convex section
    let phi = 0.5 * (3.0 - 5.0f64.sqrt());
    let (mut aa, mut bb) = (a, b);
    let (mut x1, mut x2) = (aa + phi * (bb - aa), bb - phi * (bb - aa));
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..100 {
        if f1 <= f2 {
            bb = x2;
            x2 = x1;
            f2 = f1;
            x1 = aa + phi * (bb - aa);
            f1 = h(x1);
        } else {
            aa = x1;
            x1 = x2;
            f1 = f2;
            x2 = bb - phi * (bb - aa);
            f2 = h(x2);
        }
    }
    let (u_min, f_min) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if f_min > 0.0 {
        return None;
    }
    let bisect = |mut neg: f64, mut pos: f64| -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (neg + pos);
            if h(mid) <= 0.0 {
                neg = mid;
            } else {
                pos = mid;
            }
        }
        0.5 * (neg + pos)
    };
    let left = if h(a) <= 0.0 { a } else { bisect(u_min, a) };
    let right = if h(b) <= 0.0 { b } else { bisect(u_min, b) };
    Some((left.min(right), left.max(right)))
}

fn region_quad_rec(setup: &RegionSetup, prefix: &mut Vec<f64>, tol: f64) -> (f64, f64) {
    let dim = setup.lo.len();
    let level = prefix.len();
    if level == dim - 1 {
        let Some((a, b)) = slice_interval(setup, prefix) else {
            return (0.0, 0.0);
        };
        if setup.weight.is_none() {
            return (b - a, 1e-13 * (b - a).abs());
        }
        let mut f = |u: f64| {
            prefix.push(u);
            let v = setup.weight_at(prefix);
            prefix.pop();
            Complex64::new(v, 0.0)
        };
        let (v, e, _) = adaptive_1d(&mut f, a, b, tol, 600);
        (v.re, e)
    } else {
        let width = setup.hi[level] - setup.lo[level];
        let inner_tol = tol / (width * 4.0).max(1.0) / 4.0;
        let mut inner_err_max = 0.0f64;
        let mut f = |u: f64| {
            prefix.push(u);
            let (v, e) = region_quad_rec(setup, prefix, inner_tol);
            prefix.pop();
            inner_err_max = inner_err_max.max(e);
            Complex64::new(v, 0.0)
        };
        let (v, e, _) = adaptive_1d(&mut f, setup.lo[level], setup.hi[level], tol, 1200);
        (v.re, e + inner_err_max * width)
    }
}

/// `int_B weight dt` over `B = { t : W_i(e^t) <= s_i  for all i }`, with
/// optional weight `e^{-W0(e^t)/z}`. Deterministic slice-and-bisect
/// quadrature for dim <= 3, rejection Monte Carlo beyond.
pub fn region_volume(
    ws: &[&LaurentPoly],
    s: &[f64],
    weight: Option<(&LaurentPoly, f64)>,
    tol: f64,
    method: Method,
    seed: Option<u64>,
) -> Result<IntegralResult, MirrorError> {
    assert!(!ws.is_empty());
    assert_eq!(ws.len(), s.len());
    let dim = ws[0].dim;
    match region_interior_point(ws, s, dim) {
        Ok(Some(_)) => {}
        Ok(None) => {
            return Ok(IntegralResult {
                value: Complex64::new(0.0, 0.0),
                error_estimate: 0.0,
                method: "empty-region".into(),
                samples_or_nodes: 0,
                seed: None,
            });
        }
        Err(MirrorError::Degenerate(d)) => return Err(MirrorError::Degenerate(d)),
        Err(e) => return Err(e),
    }
    let (lo, hi, t0) = region_box(ws, s, weight, tol, dim)?;
    let setup = RegionSetup {
        ws,
        s,
        weight: weight.map(|(w0, z)| (w0, z, t0.unwrap_or(0.0))),
        lo: lo.clone(),
        hi: hi.clone(),
    };
    let weight_scale = match setup.weight {
        Some((_, z, t0)) => (-t0 / z).exp(),
        None => 1.0,
    };
    let use_quad = match method {
        Method::Auto => dim <= 3,
        Method::Quadrature => true,
        Method::MonteCarlo => false,
    };
    if use_quad {
        // two-stage tolerance: rough pass sets the absolute target
        let mut prefix = Vec::new();
        let (rough, _) = region_quad_rec(&setup, &mut prefix, 1e-3);
        let abs_tol = tol * rough.abs().max(1e-8) / 2.0;
        let (v, e) = region_quad_rec(&setup, &mut prefix, abs_tol);
        Ok(IntegralResult {
            value: Complex64::new(v * weight_scale, 0.0),
            error_estimate: e * weight_scale,
            method: "slice-quadrature".into(),
            samples_or_nodes: 0,
            seed: None,
        })
    } else {
        let samples = MC_DEFAULT_SAMPLES;
        let seed_val = seed.unwrap_or(0x726567696f6e);
        let mut rng = ChaCha8Rng::seed_from_u64(seed_val);
        let box_vol: f64 = lo.iter().zip(hi.iter()).map(|(a, b)| b - a).product();
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut point = vec![0.0; dim];
        for _ in 0..samples {
            for i in 0..dim {
                point[i] = rng.gen_range(lo[i]..hi[i]);
            }
            let val = if setup.violation(&point) <= 0.0 {
                setup.weight_at(&point)
            } else {
                0.0
            };
            sum += val;
            sum2 += val * val;
        }
        let mean = sum / samples as f64;
        let var = (sum2 / samples as f64 - mean * mean).max(0.0) / samples as f64;
        Ok(IntegralResult {
            value: Complex64::new(mean * box_vol * weight_scale, 0.0),
            error_estimate: var.sqrt() * box_vol * weight_scale,
            method: "rejection-monte-carlo".into(),
            samples_or_nodes: samples,
            seed: Some(seed_val),
        })
    }
}

/// Fiber integral through the coarea identity: the mixed derivative
/// d^c/ds_1..ds_c of the region volume, by central differences with one
/// Richardson extrapolation level.
pub fn fiber_integral(
    ws: &[&LaurentPoly],
    s: &[f64],
    weight: Option<(&LaurentPoly, f64)>,
    tol: f64,
    method: Method,
    seed: Option<u64>,
) -> Result<IntegralResult, MirrorError> {
    let c = ws.len();
    assert_eq!(c, s.len());
    let stencil = |h: &[f64], inner_tol: f64| -> Result<f64, MirrorError> {
        // sum over sign patterns of prod(signs) V(s + sign .* h)
        let mut total = 0.0;
        for mask in 0u32..(1 << c) {
            let mut sp = s.to_vec();
            let mut sign = 1.0;
            for i in 0..c {
                if mask & (1 << i) != 0 {
                    sp[i] += h[i];
                } else {
                    sp[i] -= h[i];
                    sign = -sign;
                }
            }
            let v = region_volume(ws, &sp, weight, inner_tol, method, seed)?;
            total += sign * v.value.re;
        }
        let denom: f64 = h.iter().map(|&x| 2.0 * x).product();
        Ok(total / denom)
    };
    let h: Vec<f64> = s.iter().map(|&si| 1e-3 * si).collect();
    let h2: Vec<f64> = h.iter().map(|&x| x / 2.0).collect();
    let rough_tol = 1e-5;
    let d_rough = stencil(&h, rough_tol)?;
    let inner_tol = (tol * d_rough.abs().max(1e-8) * h.iter().fold(f64::INFINITY, |a, &b| a.min(b))
        * 0.05)
        .max(1e-12);
    // region_volume takes a relative tolerance; convert through the stencil
    let rough_v = region_volume(ws, s, weight, rough_tol, method, seed)?
        .value
        .re;
    let rel_inner = (inner_tol / rough_v.abs().max(1e-8)).min(1e-4).max(1e-11);
    let d1 = stencil(&h, rel_inner)?;
    let d2 = stencil(&h2, rel_inner)?;
    let extrapolated = (4.0 * d2 - d1) / 3.0;
    let residual = (d2 - d1).abs() / extrapolated.abs().max(1e-300);
    if residual > 0.1 {
        return Err(MirrorError::NonGenericFiber(residual));
    }
    Ok(IntegralResult {
        value: Complex64::new(extrapolated, 0.0),
        error_estimate: (d2 - d1).abs() / 3.0 + extrapolated.abs() * rel_inner,
        method: "coarea-finite-difference".into(),
        samples_or_nodes: 0,
        seed,
    })
}

/// `z^c int e^{-W0/z} / prod_i (W_i - s_i) dt` for s_i off [0, infinity).
pub fn multi_hilbert_integral(
    w0: Option<(&LaurentPoly, f64)>,
    ws: &[&LaurentPoly],
    s: &[Complex64],
    z: f64,
    tol: f64,
) -> Result<IntegralResult, MirrorError> {
    let c = ws.len();
    assert_eq!(c, s.len());
    assert!(!ws.is_empty());
    let dim = ws[0].dim;
    for &si in s {
        if si.im == 0.0 && si.re >= 0.0 {
            return Err(MirrorError::OnCut(si));
        }
    }
    // combined exponent set must surround the origin for decay
    let mut exps: Vec<Vec<i64>> = Vec::new();
    let mut all_terms: Vec<(f64, Vec<i64>)> = Vec::new();
    for w in ws {
        for (cf, a) in &w.terms {
            exps.push(a.clone());
            all_terms.push((*cf, a.clone()));
        }
    }
    if let Some((w0p, _)) = w0 {
        for (cf, a) in &w0p.terms {
            exps.push(a.clone());
            all_terms.push((*cf, a.clone()));
        }
    }
    let kappa = newton_growth_rate(&exps, dim);
    if kappa <= 0.0 {
        return Err(MirrorError::Unbounded(
            "combined exponents do not surround the origin".into(),
        ));
    }
    let combined = LaurentPoly::new(all_terms);
    let min = minimize_log(&combined)?;
    let smax = s.iter().map(|x| x.norm()).fold(1.0f64, f64::max);
    let radius = ((smax * 100.0 / tol).ln() / kappa + 8.0).max(10.0);
    let lo: Vec<f64> = min.argmin_log.iter().map(|t| t - radius).collect();
    let hi: Vec<f64> = min.argmin_log.iter().map(|t| t + radius).collect();
    let f = |t: &[f64]| -> Complex64 {
        let mut denom = Complex64::new(1.0, 0.0);
        for (w, &si) in ws.iter().zip(s.iter()) {
            denom *= Complex64::new(w.eval_log(t), 0.0) - si;
        }
        let num = match w0 {
            Some((w0p, zz)) => (-w0p.eval_log(t) / zz).exp(),
            None => 1.0,
        };
        num / denom
    };
    let (rough, _, _) = nested_box(&f, &lo, &hi, 1e-3, 600);
    let abs_tol = tol * rough.norm().max(1e-12) / 2.0;
    let (v, e, evals) = nested_box(&f, &lo, &hi, abs_tol, QUAD_MAX_PANELS);
    let zc = z.powi(c as i32);
    Ok(IntegralResult {
        value: v * zc,
        error_estimate: e * zc + tol * v.norm() * zc / 10.0,
        method: "quadrature".into(),
        samples_or_nodes: evals,
        seed: None,
    })
}
