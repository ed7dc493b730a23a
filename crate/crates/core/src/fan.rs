//! Fan data for smooth toric Fano varieties: parsing, validation, curve
//! class enumeration and moment polytopes with exact rational volumes.

use crate::rational::{
    affine_rank, det_i128, gcd_i64, integer_kernel, rat_int, rref, solve_square, Rat,
};
use num_traits::{Signed, Zero};
use serde::Deserialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FanError {
    #[error("malformed fan file: {0}")]
    Parse(String),
    #[error("ray {index} is not primitive (gcd of entries != 1)")]
    NonPrimitiveRay { index: usize },
    #[error("maximal cone {index} is singular (ray determinant != +-1)")]
    SingularCone { index: usize },
    #[error("fan is not complete: {0}")]
    NotComplete(String),
    #[error("fan is not Fano: {0}")]
    NotFano(String),
    #[error("invalid fan data: {0}")]
    Invalid(String),
}

/// Integer ray generators and maximal cones of a smooth complete Fano fan.
#[derive(Debug, Clone)]
pub struct FanData {
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub dim: usize,
    pub name: String,
}

#[derive(Deserialize)]
struct RawFan {
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    #[serde(default)]
    name: Option<String>,
}

impl FanData {
    /// Parse and validate the structured fan file format.
    pub fn parse(text: &str) -> Result<Self, FanError> {
        let raw: RawFan = serde_json::from_str(text).map_err(|e| FanError::Parse(e.to_string()))?;
        Self::from_parts(raw.rays, raw.max_cones, raw.name.unwrap_or_default())
    }

    pub fn from_parts(
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
        name: String,
    ) -> Result<Self, FanError> {
        if rays.is_empty() {
            return Err(FanError::Invalid("no rays".into()));
        }
        let dim = rays[0].len();
        if dim == 0 {
            return Err(FanError::Invalid("zero-dimensional rays".into()));
        }
        if rays.iter().any(|r| r.len() != dim) {
            return Err(FanError::Invalid("rays of inconsistent dimension".into()));
        }
        for (index, r) in rays.iter().enumerate() {
            let g = r.iter().fold(0i64, |acc, &x| gcd_i64(acc, x));
            if g != 1 {
                return Err(FanError::NonPrimitiveRay { index });
            }
        }
        if max_cones.is_empty() {
            return Err(FanError::Invalid("no maximal cones".into()));
        }
        for (index, c) in max_cones.iter().enumerate() {
            if c.len() != dim {
                return Err(FanError::Invalid(format!(
                    "maximal cone {index} has {} rays, expected {dim}",
                    c.len()
                )));
            }
            if c.iter().any(|&j| j >= rays.len()) {
                return Err(FanError::Invalid(format!(
                    "maximal cone {index} references a ray out of range"
                )));
            }
            let m: Vec<Vec<i64>> = c.iter().map(|&j| rays[j].clone()).collect();
            if det_i128(&m).abs() != 1 {
                return Err(FanError::SingularCone { index });
            }
        }
        let fan = FanData {
            rays,
            max_cones,
            dim,
            name,
        };
        fan.check_complete()?;
        fan.check_fano()?;
        Ok(fan)
    }

    /// Completeness: every wall (codimension-one face) bounds exactly two
    /// maximal cones, every ray is used, and a set of probe directions all
    /// lie in some cone.
    fn check_complete(&self) -> Result<(), FanError> {
        let mut used = vec![false; self.rays.len()];
        let mut wall_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for cone in &self.max_cones {
            for &j in cone {
                used[j] = true;
            }
            for omit in 0..cone.len() {
                let mut wall: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != omit)
                    .map(|(_, &j)| j)
                    .collect();
                wall.sort_unstable();
                *wall_count.entry(wall).or_insert(0) += 1;
            }
        }
        if let Some(j) = used.iter().position(|&u| !u) {
            return Err(FanError::NotComplete(format!(
                "ray {j} is not part of any maximal cone"
            )));
        }
        if let Some((wall, n)) = wall_count.iter().find(|&(_, &n)| n != 2) {
            return Err(FanError::NotComplete(format!(
                "wall {wall:?} bounds {n} maximal cones, expected 2"
            )));
        }
        // probe directions: +-e_i and a fixed pseudo-random sample
        let mut probes: Vec<Vec<Rat>> = Vec::new();
        for i in 0..self.dim {
            for s in [1i64, -1] {
                let mut v = vec![rat_int(0); self.dim];
                v[i] = rat_int(s);
                probes.push(v);
            }
        }
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..8 {
            let v: Vec<Rat> = (0..self.dim)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    rat_int(((state >> 33) as i64 % 19) - 9)
                })
                .collect();
            if v.iter().any(|x| !x.is_zero()) {
                probes.push(v);
            }
        }
        for p in &probes {
            if !self.max_cones.iter().any(|c| self.cone_contains(c, p)) {
                return Err(FanError::NotComplete(format!(
                    "direction {p:?} is not covered by any maximal cone"
                )));
            }
        }
        Ok(())
    }

    fn cone_contains(&self, cone: &[usize], v: &[Rat]) -> bool {
        // solve v = sum alpha_j b_j over the cone basis; contained iff alpha >= 0
        let a: Vec<Vec<Rat>> = (0..self.dim)
            .map(|row| cone.iter().map(|&j| rat_int(self.rays[j][row])).collect())
            .collect();
        match solve_square(&a, v) {
            Some(alpha) => alpha.iter().all(|x| !x.is_negative()),
            None => false,
        }
    }

    /// Fano: the anticanonical support function is strictly convex, i.e. for
    /// each maximal cone the dual vector m with <m, b_j> = 1 on the cone
    /// satisfies <m, b_k> < 1 strictly off the cone.
    fn check_fano(&self) -> Result<(), FanError> {
        for (idx, cone) in self.max_cones.iter().enumerate() {
            let a: Vec<Vec<Rat>> = cone
                .iter()
                .map(|&j| self.rays[j].iter().map(|&x| rat_int(x)).collect())
                .collect();
            let b = vec![rat_int(1); self.dim];
            let m = solve_square(&a, &b)
                .ok_or_else(|| FanError::Invalid(format!("degenerate cone {idx}")))?;
            for (k, ray) in self.rays.iter().enumerate() {
                if cone.contains(&k) {
                    continue;
                }
                let pairing: Rat = ray
                    .iter()
                    .zip(m.iter())
                    .map(|(&x, mi)| rat_int(x) * mi)
                    .sum();
                if pairing >= rat_int(1) {
                    return Err(FanError::NotFano(format!(
                        "anticanonical class is not ample across cone {idx} and ray {k}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of rays (prime toric divisors).
    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    /// All subsets of rays spanning a cone of the fan, as a sorted list of
    /// sorted index sets (the underlying simplicial complex, including the
    /// empty face).
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let c = self.ray_count();
        for mask in 0u32..(1 << c) {
            let set: Vec<usize> = (0..c).filter(|&j| mask & (1 << j) != 0).collect();
            if set.len() > self.dim {
                continue;
            }
            if self.is_face(&set) {
                out.push(set);
            }
        }
        out.sort();
        out
    }

    pub fn is_face(&self, set: &[usize]) -> bool {
        self.max_cones
            .iter()
            .any(|c| set.iter().all(|j| c.contains(j)))
    }
}

/// Effective curve class recorded through its intersections with the prime
/// toric divisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    /// (D_1 . d, ..., D_c . d)
    pub pairing: Vec<i64>,
    /// c_1 . d
    pub degree: i64,
}

/// All curve classes d with 0 <= c_1 . d <= n_max whose summand in the
/// toric hypergeometric series is nonzero: the rays pairing negatively
/// with d must span a cone.
pub fn enumerate_curve_classes(fan: &FanData, n_max: i64) -> Vec<CurveClass> {
    let c = fan.ray_count();
    let n = fan.dim;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..c).map(|j| fan.rays[j][i]).collect())
        .collect();
    let kernel = integer_kernel(&rows);
    let r = kernel.len();
    assert_eq!(r, c - n, "relation lattice rank");
    let mut out = Vec::new();
    if r == 0 {
        return out;
    }
    // bound the coefficient box: pick an invertible r x r submatrix V of the
    // kernel basis (rows indexed by a subset of ray coordinates), then
    // y = V^-1 k with |k_j| <= n_max bounds each |y_i|.
    let cols: Vec<usize> = pick_independent_rows(&kernel, r);
    let v: Vec<Vec<Rat>> = (0..r)
        .map(|a| (0..r).map(|b| rat_int(kernel[b][cols[a]])).collect())
        .collect();
    let mut bounds = vec![0i64; r];
    for i in 0..r {
        // solve V^T x = e_i to get row i of the inverse
        let mut rhs = vec![rat_int(0); r];
        rhs[i] = rat_int(1);
        let vt: Vec<Vec<Rat>> = (0..r).map(|a| (0..r).map(|b| v[b][a].clone()).collect()).collect();
        let row = solve_square(&vt, &rhs).expect("independent rows give invertible matrix");
        let s: Rat = row.iter().map(|x| x.abs()).sum();
        let bound = (s * rat_int(n_max)).ceil();
        bounds[i] = bound.to_integer().try_into().unwrap_or(i64::MAX);
    }
    let mut y = vec![0i64; r];
    enumerate_box(&mut y, 0, &bounds, &mut |y| {
        let pairing: Vec<i64> = (0..c)
            .map(|j| (0..r).map(|i| y[i] * kernel[i][j]).sum())
            .collect();
        let degree: i64 = pairing.iter().sum();
        if degree < 0 || degree > n_max {
            return;
        }
        if pairing.iter().any(|&p| p.abs() > n_max) {
            return;
        }
        let negative: Vec<usize> = (0..c).filter(|&j| pairing[j] < 0).collect();
        if !fan.is_face(&negative) {
            return;
        }
        out.push(CurveClass { pairing, degree });
    });
    out.sort_by(|a, b| (a.degree, &a.pairing).cmp(&(b.degree, &b.pairing)));
    out
}

fn pick_independent_rows(kernel: &[Vec<i64>], r: usize) -> Vec<usize> {
    let c = kernel[0].len();
    let mut chosen: Vec<usize> = Vec::new();
    for j in 0..c {
        if chosen.len() == r {
            break;
        }
        let mut test = chosen.clone();
        test.push(j);
        let m: Vec<Vec<Rat>> = test
            .iter()
            .map(|&col| kernel.iter().map(|k| rat_int(k[col])).collect())
            .collect();
        let mut w = m.clone();
        if rref(&mut w).len() == test.len() {
            chosen = test;
        }
    }
    assert_eq!(chosen.len(), r, "kernel basis has full rank");
    chosen
}

fn enumerate_box(y: &mut Vec<i64>, i: usize, bounds: &[i64], f: &mut impl FnMut(&[i64])) {
    if i == bounds.len() {
        f(y);
        return;
    }
    for v in -bounds[i]..=bounds[i] {
        y[i] = v;
        enumerate_box(y, i + 1, bounds, f);
    }
}

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("lambda is outside the ample range: {0}")]
    NotAmple(String),
}

/// Moment polytope `{ t : <t, b_j> <= lambda_j }` with exact data.
#[derive(Debug, Clone)]
pub struct MomentPolytope {
    pub vertices: Vec<Vec<Rat>>,
    pub volume: Rat,
}

/// Exact vertex enumeration and volume for lambda in the ample range.
pub fn moment_polytope(fan: &FanData, lambda: &[Rat]) -> Result<MomentPolytope, PolytopeError> {
    assert_eq!(lambda.len(), fan.ray_count());
    let mut vertices = Vec::new();
    for (idx, cone) in fan.max_cones.iter().enumerate() {
        let a: Vec<Vec<Rat>> = cone
            .iter()
            .map(|&j| fan.rays[j].iter().map(|&x| rat_int(x)).collect())
            .collect();
        let b: Vec<Rat> = cone.iter().map(|&j| lambda[j].clone()).collect();
        let v = solve_square(&a, &b)
            .ok_or_else(|| PolytopeError::NotAmple(format!("degenerate cone {idx}")))?;
        // the expected combinatorics: all other inequalities strict
        for (k, ray) in fan.rays.iter().enumerate() {
            if cone.contains(&k) {
                continue;
            }
            let p: Rat = ray
                .iter()
                .zip(v.iter())
                .map(|(&x, vi)| rat_int(x) * vi)
                .sum();
            if p >= lambda[k] {
                return Err(PolytopeError::NotAmple(format!(
                    "vertex of cone {idx} violates strictness at ray {k}"
                )));
            }
        }
        if !vertices.contains(&v) {
            vertices.push(v);
        }
    }
    if vertices.len() != fan.max_cones.len() {
        return Err(PolytopeError::NotAmple(
            "vertex count differs from maximal cone count".into(),
        ));
    }
    let normals: Vec<Vec<i64>> = fan.rays.clone();
    let volume = hpolytope_volume(&normals, lambda)?;
    vertices.sort();
    Ok(MomentPolytope { vertices, volume })
}

/// Exact volume of `{ t : <n_k, t> <= b_k }` via triangulation from a
/// vertex: recursive pyramid decomposition over facets, with facet volumes
/// computed in lattice coordinates of the facet hyperplane.
pub fn hpolytope_volume(normals: &[Vec<i64>], offsets: &[Rat]) -> Result<Rat, PolytopeError> {
    let dim = normals.first().map(|n| n.len()).unwrap_or(0);
    // primitivize and dedupe identical constraints
    let mut cons: Vec<(Vec<i64>, Rat)> = Vec::new();
    for (n, b) in normals.iter().zip(offsets.iter()) {
        let g = n.iter().fold(0i64, |acc, &x| gcd_i64(acc, x));
        if g == 0 {
            continue;
        }
        let pn: Vec<i64> = n.iter().map(|&x| x / g).collect();
        let pb = b / rat_int(g);
        if !cons.iter().any(|(cn, cb)| *cn == pn && *cb == pb) {
            cons.push((pn, pb));
        }
    }
    volume_rec(&cons, dim)
}

fn volume_rec(cons: &[(Vec<i64>, Rat)], dim: usize) -> Result<Rat, PolytopeError> {
    if dim == 0 {
        return Ok(rat_int(1));
    }
    if dim == 1 {
        let mut upper: Option<Rat> = None;
        let mut lower: Option<Rat> = None;
        for (n, b) in cons {
            let a = n[0];
            if a > 0 {
                let v = b / rat_int(a);
                if upper.as_ref().map_or(true, |u| v < *u) {
                    upper = Some(v);
                }
            } else if a < 0 {
                let v = b / rat_int(a);
                if lower.as_ref().map_or(true, |l| v > *l) {
                    lower = Some(v);
                }
            }
        }
        return match (lower, upper) {
            (Some(l), Some(u)) => Ok(if u > l { u - l } else { Rat::zero() }),
            _ => Err(PolytopeError::Unbounded),
        };
    }
    let vertices = enumerate_vertices(cons, dim);
    if vertices.is_empty() || affine_rank(&vertices) < dim {
        return Ok(Rat::zero());
    }
    let v0 = vertices
        .iter()
        .min()
        .expect("nonempty vertex list")
        .clone();
    let mut total = Rat::zero();
    for (k, (n, b)) in cons.iter().enumerate() {
        let gap: Rat = b - n
            .iter()
            .zip(v0.iter())
            .map(|(&x, vi)| rat_int(x) * vi)
            .sum::<Rat>();
        if gap.is_zero() || gap.is_negative() {
            continue;
        }
        // base point on the facet hyperplane: a vertex where constraint k is tight
        let Some(p) = vertices.iter().find(|v| {
            let s: Rat = n.iter().zip(v.iter()).map(|(&x, vi)| rat_int(x) * vi).sum();
            s == *b
        }) else {
            continue; // redundant constraint, empty facet
        };
        // lattice basis of the hyperplane <n, .> = 0
        let u = integer_kernel(&[n.clone()]);
        assert_eq!(u.len(), dim - 1);
        let sub: Vec<(Vec<i64>, Rat)> = cons
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, (nj, bj))| {
                let nn: Vec<i64> = u
                    .iter()
                    .map(|uv| uv.iter().zip(nj.iter()).map(|(&a, &b)| a * b).sum())
                    .collect();
                let shift: Rat = nj
                    .iter()
                    .zip(p.iter())
                    .map(|(&x, pi)| rat_int(x) * pi)
                    .sum();
                (nn, bj - shift)
            })
            .collect();
        // re-primitivize sub-constraints
        let mut sub2: Vec<(Vec<i64>, Rat)> = Vec::new();
        for (nj, bj) in sub {
            let g = nj.iter().fold(0i64, |acc, &x| gcd_i64(acc, x));
            if g == 0 {
                if bj.is_negative() {
                    return Ok(Rat::zero()); // infeasible facet system: 0 <= negative
                }
                continue;
            }
            let pn: Vec<i64> = nj.iter().map(|&x| x / g).collect();
            let pb = bj / rat_int(g);
            if !sub2.iter().any(|(cn, cb)| *cn == pn && *cb == pb) {
                sub2.push((pn, pb));
            }
        }
        let facet_vol = volume_rec(&sub2, dim - 1)?;
        total += gap * facet_vol;
    }
    Ok(total / rat_int(dim as i64))
}

fn enumerate_vertices(cons: &[(Vec<i64>, Rat)], dim: usize) -> Vec<Vec<Rat>> {
    let m = cons.len();
    let mut vertices: Vec<Vec<Rat>> = Vec::new();
    let mut subset: Vec<usize> = Vec::new();
    fn rec(
        cons: &[(Vec<i64>, Rat)],
        dim: usize,
        start: usize,
        subset: &mut Vec<usize>,
        vertices: &mut Vec<Vec<Rat>>,
    ) {
        if subset.len() == dim {
            let a: Vec<Vec<Rat>> = subset
                .iter()
                .map(|&k| cons[k].0.iter().map(|&x| rat_int(x)).collect())
                .collect();
            let b: Vec<Rat> = subset.iter().map(|&k| cons[k].1.clone()).collect();
            if let Some(v) = solve_square(&a, &b) {
                let feasible = cons.iter().all(|(n, off)| {
                    let s: Rat = n.iter().zip(v.iter()).map(|(&x, vi)| rat_int(x) * vi).sum();
                    s <= *off
                });
                if feasible && !vertices.contains(&v) {
                    vertices.push(v);
                }
            }
            return;
        }
        for k in start..cons.len() {
            subset.push(k);
            rec(cons, dim, k + 1, subset, vertices);
            subset.pop();
        }
    }
    rec(cons, dim, 0, &mut subset, &mut vertices);
    let _ = m;
    vertices
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    pub fn p1() -> FanData {
        FanData::from_parts(vec![vec![1], vec![-1]], vec![vec![0], vec![1]], "P1".into()).unwrap()
    }

    pub fn p2() -> FanData {
        FanData::from_parts(
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            "P2".into(),
        )
        .unwrap()
    }

    pub fn p1xp1() -> FanData {
        FanData::from_parts(
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            vec![vec![0, 2], vec![2, 1], vec![1, 3], vec![3, 0]],
            "P1xP1".into(),
        )
        .unwrap()
    }

    #[test]
    fn parse_valid_fans() {
        let text = r#"{"name":"P2","rays":[[1,0],[0,1],[-1,-1]],"max_cones":[[0,1],[1,2],[2,0]]}"#;
        let fan = FanData::parse(text).unwrap();
        assert_eq!(fan.dim, 2);
        assert_eq!(fan.ray_count(), 3);
    }

    #[test]
    fn rejects_non_primitive_ray() {
        let r = FanData::from_parts(
            vec![vec![2, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            String::new(),
        );
        assert!(matches!(r, Err(FanError::NonPrimitiveRay { index: 0 })));
    }

    #[test]
    fn rejects_singular_cone() {
        // rays of the quadric cone: dets are 2
        let r = FanData::from_parts(
            vec![vec![1, 0], vec![1, 2], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            String::new(),
        );
        assert!(matches!(r, Err(FanError::SingularCone { .. })));
    }

    #[test]
    fn rejects_incomplete_fan() {
        let r = FanData::from_parts(
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2]],
            String::new(),
        );
        assert!(matches!(r, Err(FanError::NotComplete(_))));
    }

    #[test]
    fn rejects_non_fano() {
        // Hirzebruch surface F_2 is smooth and complete but not Fano
        let r = FanData::from_parts(
            vec![vec![1, 0], vec![0, 1], vec![-1, 2], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
            String::new(),
        );
        assert!(matches!(r, Err(FanError::NotFano(_))));
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(matches!(FanData::parse("not json"), Err(FanError::Parse(_))));
    }

    #[test]
    fn curve_classes_p2() {
        let cs = enumerate_curve_classes(&p2(), 6);
        assert_eq!(cs.len(), 3);
        for (d, c) in cs.iter().enumerate() {
            let d = d as i64;
            assert_eq!(c.pairing, vec![d, d, d]);
            assert_eq!(c.degree, 3 * d);
        }
    }

    #[test]
    fn curve_classes_p1() {
        let cs = enumerate_curve_classes(&p1(), 4);
        assert_eq!(cs.len(), 3);
        for (d, c) in cs.iter().enumerate() {
            let d = d as i64;
            assert_eq!(c.pairing, vec![d, d]);
        }
    }

    #[test]
    fn curve_classes_p1xp1() {
        let cs = enumerate_curve_classes(&p1xp1(), 2);
        // (0,0), (1,0), (0,1) as bidegrees
        assert_eq!(cs.len(), 3);
        assert!(cs.iter().all(|c| c.degree == 0 || c.degree == 2));
        for c in &cs {
            // relation check: sum (D_j . d) b_j = 0
            assert_eq!(c.pairing[0] - c.pairing[1], 0);
            assert_eq!(c.pairing[2] - c.pairing[3], 0);
        }
    }

    #[test]
    fn curve_class_relations_hold() {
        for fan in [p1(), p2(), p1xp1()] {
            for c in enumerate_curve_classes(&fan, 6) {
                for i in 0..fan.dim {
                    let s: i64 = (0..fan.ray_count())
                        .map(|j| c.pairing[j] * fan.rays[j][i])
                        .sum();
                    assert_eq!(s, 0);
                }
            }
        }
    }

    #[test]
    fn moment_polytope_p1() {
        let p = moment_polytope(&p1(), &[rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(p.volume, rat_int(2));
        assert_eq!(p.vertices, vec![vec![rat_int(-1)], vec![rat_int(1)]]);
    }

    #[test]
    fn moment_polytope_p2() {
        let p = moment_polytope(&p2(), &[rat_int(1), rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(p.volume, rat(9, 2));
        assert!(p.vertices.contains(&vec![rat_int(1), rat_int(1)]));
        assert!(p.vertices.contains(&vec![rat_int(1), rat_int(-2)]));
        assert!(p.vertices.contains(&vec![rat_int(-2), rat_int(1)]));
    }

    #[test]
    fn moment_polytope_p1xp1() {
        let p = moment_polytope(
            &p1xp1(),
            &[rat_int(1), rat_int(2), rat_int(1), rat_int(2)],
        )
        .unwrap();
        assert_eq!(p.volume, rat_int(9));
    }

    #[test]
    fn moment_polytope_rejects_non_ample() {
        // lambda = 0 puts every vertex at the origin
        let r = moment_polytope(&p2(), &[rat_int(0), rat_int(0), rat_int(0)]);
        assert!(matches!(r, Err(PolytopeError::NotAmple(_))));
    }
}
