//! Cohomology ring of a smooth toric Fano variety, built by exact row
//! reduction of divisor monomials modulo the linear and Stanley-Reisner
//! relations, with rational multiplication table and integration functional.

use crate::fan::{FanData, FanError};
use crate::rational::{rat_int, rat_to_f64, rref, Rat};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RingError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("graded dimensions {found:?} disagree with the toric Betti numbers {expected:?}")]
    BettiMismatch {
        found: Vec<usize>,
        expected: Vec<usize>,
    },
    #[error("point class reduces to zero")]
    DegeneratePoint,
    #[error("wrong multiset size: got {got}, expected {expected}")]
    WrongMultisetSize { got: usize, expected: usize },
}

/// Finite-dimensional graded ring `H^*(F; Q)` with exact structure constants.
pub struct CohRing {
    fan: FanData,
    /// basis monomials as exponent vectors over the rays, ordered by weight
    basis: Vec<Vec<u8>>,
    /// weight (= cohomological degree / 2) of each basis element
    weight: Vec<usize>,
    /// dimension of each graded piece, weights 0..=n
    dims: Vec<usize>,
    total: usize,
    /// mult[i][j] = coefficient vector of basis_i * basis_j
    mult_rat: Vec<Vec<Vec<Rat>>>,
    pub(crate) mult_f: Vec<Vec<Vec<f64>>>,
    integrate_rat: Vec<Rat>,
    pub(crate) integrate_f: Vec<f64>,
    divisors_rat: Vec<Vec<Rat>>,
    pub(crate) divisors_f: Vec<Vec<f64>>,
    /// ray index represented by each weight-one basis element
    deg2_rays: Vec<usize>,
}

impl CohRing {
    pub fn build(fan: FanData) -> Result<Self, RingError> {
        let n = fan.dim;
        let c = fan.ray_count();
        let min_nonfaces = minimal_nonfaces(&fan);

        // per-weight monomial lists and normal forms
        let mut basis: Vec<Vec<u8>> = vec![vec![0u8; c]];
        let mut weight: Vec<usize> = vec![0];
        let mut dims: Vec<usize> = vec![1];
        // nf[k]: for each monomial of weight k, its coefficients over that
        // weight's basis monomials
        let mut monomials_by_weight: Vec<Vec<Vec<u8>>> = vec![vec![vec![0u8; c]]];
        let mut nf_by_weight: Vec<Vec<Vec<Rat>>> = vec![vec![vec![rat_int(1)]]];

        for k in 1..=n {
            let monos = monomials(c, k);
            let index_of = |m: &[u8]| monos.binary_search_by(|x| x.as_slice().cmp(m)).unwrap();
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for (mi, m) in monos.iter().enumerate() {
                if min_nonfaces
                    .iter()
                    .any(|nf| nf.iter().all(|&j| m[j] > 0))
                {
                    let mut row = vec![Rat::zero(); monos.len()];
                    row[mi] = rat_int(1);
                    rows.push(row);
                }
            }
            for m in &monomials_by_weight[k - 1] {
                for i in 0..n {
                    let mut row = vec![Rat::zero(); monos.len()];
                    let mut nonzero = false;
                    for j in 0..c {
                        let coeff = fan.rays[j][i];
                        if coeff == 0 {
                            continue;
                        }
                        let mut m2 = m.clone();
                        m2[j] += 1;
                        row[index_of(&m2)] += rat_int(coeff);
                        nonzero = true;
                    }
                    if nonzero {
                        rows.push(row);
                    }
                }
            }
            let pivots = rref(&mut rows);
            let pivot_set: Vec<bool> = {
                let mut v = vec![false; monos.len()];
                for &p in &pivots {
                    v[p] = true;
                }
                v
            };
            let basis_cols: Vec<usize> = (0..monos.len()).filter(|&i| !pivot_set[i]).collect();
            let col_to_basis = |col: usize| basis_cols.binary_search(&col).unwrap();
            let mut nf: Vec<Vec<Rat>> = vec![vec![Rat::zero(); basis_cols.len()]; monos.len()];
            for &col in &basis_cols {
                nf[col][col_to_basis(col)] = rat_int(1);
            }
            for (r, &p) in pivots.iter().enumerate() {
                // pivot monomial p satisfies x_p = -sum of non-pivot entries
                for &col in &basis_cols {
                    if !rows[r][col].is_zero() {
                        nf[p][col_to_basis(col)] = -rows[r][col].clone();
                    }
                }
            }
            dims.push(basis_cols.len());
            for &col in &basis_cols {
                basis.push(monos[col].clone());
                weight.push(k);
            }
            monomials_by_weight.push(monos);
            nf_by_weight.push(nf);
        }

        let expected = h_vector(&fan);
        if dims != expected {
            return Err(RingError::BettiMismatch {
                found: dims,
                expected,
            });
        }

        let total = basis.len();
        let offsets: Vec<usize> = {
            let mut o = vec![0usize; n + 2];
            for k in 0..=n {
                o[k + 1] = o[k] + dims[k];
            }
            o
        };

        // global normal form of an arbitrary monomial
        let global_nf = |m: &[u8]| -> Vec<Rat> {
            let k: usize = m.iter().map(|&e| e as usize).sum();
            let mut out = vec![Rat::zero(); total];
            if k > n {
                return out;
            }
            let monos = &monomials_by_weight[k];
            let mi = monos.binary_search_by(|x| x.as_slice().cmp(m)).unwrap();
            for (bi, coeff) in nf_by_weight[k][mi].iter().enumerate() {
                out[offsets[k] + bi] = coeff.clone();
            }
            out
        };

        let mut mult_rat: Vec<Vec<Vec<Rat>>> = vec![vec![Vec::new(); total]; total];
        for i in 0..total {
            for j in 0..total {
                if weight[i] + weight[j] > n {
                    mult_rat[i][j] = vec![Rat::zero(); total];
                    continue;
                }
                let m: Vec<u8> = basis[i]
                    .iter()
                    .zip(basis[j].iter())
                    .map(|(&a, &b)| a + b)
                    .collect();
                mult_rat[i][j] = global_nf(&m);
            }
        }

        // integration: the class of a point (product over any maximal cone)
        // integrates to 1
        let mut pt = vec![0u8; c];
        for &j in &fan.max_cones[0] {
            pt[j] += 1;
        }
        let pt_nf = global_nf(&pt);
        let top = total - 1;
        debug_assert_eq!(dims[n], 1);
        if pt_nf[top].is_zero() {
            return Err(RingError::DegeneratePoint);
        }
        let mut integrate_rat = vec![Rat::zero(); total];
        integrate_rat[top] = pt_nf[top].recip();

        let divisors_rat: Vec<Vec<Rat>> = (0..c)
            .map(|j| {
                let mut m = vec![0u8; c];
                m[j] = 1;
                global_nf(&m)
            })
            .collect();

        let deg2_rays: Vec<usize> = basis[offsets[1]..offsets[2]]
            .iter()
            .map(|m| m.iter().position(|&e| e == 1).expect("degree-2 basis is a divisor"))
            .collect();

        let mult_f: Vec<Vec<Vec<f64>>> = mult_rat
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.iter().map(rat_to_f64).collect())
                    .collect()
            })
            .collect();
        let integrate_f: Vec<f64> = integrate_rat.iter().map(rat_to_f64).collect();
        let divisors_f: Vec<Vec<f64>> = divisors_rat
            .iter()
            .map(|v| v.iter().map(rat_to_f64).collect())
            .collect();

        Ok(CohRing {
            fan,
            basis,
            weight,
            dims,
            total,
            mult_rat,
            mult_f,
            integrate_rat,
            integrate_f,
            divisors_rat,
            divisors_f,
            deg2_rays,
        })
    }

    pub fn fan(&self) -> &FanData {
        &self.fan
    }

    pub fn dim(&self) -> usize {
        self.fan.dim
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn graded_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn basis_weight(&self, i: usize) -> usize {
        self.weight[i]
    }

    pub fn weights(&self) -> &[usize] {
        &self.weight
    }

    /// Ray index carried by each weight-one basis element.
    pub fn deg2_rays(&self) -> &[usize] {
        &self.deg2_rays
    }

    /// Index of the first basis element of the given weight.
    pub fn weight_offset(&self, k: usize) -> usize {
        self.dims[..k].iter().sum()
    }

    pub fn basis_monomial(&self, i: usize) -> &[u8] {
        &self.basis[i]
    }

    // ----- exact rational classes -----

    pub fn zero_rat(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.total]
    }

    pub fn unit_rat(&self) -> Vec<Rat> {
        let mut v = self.zero_rat();
        v[0] = rat_int(1);
        v
    }

    pub fn divisor_rat(&self, j: usize) -> Vec<Rat> {
        self.divisors_rat[j].clone()
    }

    pub fn mul_rat(&self, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut out = self.zero_rat();
        for i in 0..self.total {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..self.total {
                if b[j].is_zero() {
                    continue;
                }
                let f = &a[i] * &b[j];
                for k in 0..self.total {
                    if !self.mult_rat[i][j][k].is_zero() {
                        out[k] += &f * &self.mult_rat[i][j][k];
                    }
                }
            }
        }
        out
    }

    pub fn integrate_rat(&self, a: &[Rat]) -> Rat {
        a.iter()
            .zip(self.integrate_rat.iter())
            .map(|(x, w)| x * w)
            .sum()
    }

    /// Exact intersection number of a multiset of prime divisors.
    pub fn intersection_number(&self, divisor_indices: &[usize]) -> Result<Rat, RingError> {
        if divisor_indices.len() != self.fan.dim {
            return Err(RingError::WrongMultisetSize {
                got: divisor_indices.len(),
                expected: self.fan.dim,
            });
        }
        let mut acc = self.unit_rat();
        for &j in divisor_indices {
            acc = self.mul_rat(&acc, &self.divisors_rat[j]);
        }
        Ok(self.integrate_rat(&acc))
    }

    /// Exact Duistermaat-Heckman pairing: integral of exp(sum lambda_j D_j)
    /// expanded to top degree in the nilpotent ring.
    pub fn dh_pairing(&self, lambda: &[Rat]) -> Rat {
        assert_eq!(lambda.len(), self.fan.ray_count());
        let mut l = self.zero_rat();
        for (j, lam) in lambda.iter().enumerate() {
            for k in 0..self.total {
                let t = lam * &self.divisors_rat[j][k];
                l[k] += t;
            }
        }
        let mut acc = self.unit_rat();
        let mut term = self.unit_rat();
        for k in 1..=self.fan.dim {
            term = self.mul_rat(&term, &l);
            let inv = rat_int(k as i64).recip();
            for x in term.iter_mut() {
                *x *= &inv;
            }
            for i in 0..self.total {
                acc[i] += &term[i];
            }
        }
        self.integrate_rat(&acc)
    }

    /// Poincare pairing matrix on the basis.
    pub fn pairing_matrix(&self) -> Vec<Vec<Rat>> {
        (0..self.total)
            .map(|i| {
                (0..self.total)
                    .map(|j| self.integrate_rat(&self.mult_rat[i][j]))
                    .collect()
            })
            .collect()
    }
}

/// Monomials of total degree k over c variables, lexicographically sorted.
fn monomials(c: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; c];
    fn rec(c: usize, k: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos == c {
            if k == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=k {
            cur[pos] = e as u8;
            rec(c, k - e, pos + 1, cur, out);
        }
        cur[pos] = 0;
    }
    rec(c, k, 0, &mut cur, &mut out);
    out.sort();
    out
}

/// Minimal non-faces of the fan's simplicial complex.
fn minimal_nonfaces(fan: &FanData) -> Vec<Vec<usize>> {
    let c = fan.ray_count();
    let mut nonfaces: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << c) {
        let set: Vec<usize> = (0..c).filter(|&j| mask & (1 << j) != 0).collect();
        if fan.is_face(&set) {
            continue;
        }
        let minimal = (0..set.len()).all(|omit| {
            let sub: Vec<usize> = set
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != omit)
                .map(|(_, &j)| j)
                .collect();
            fan.is_face(&sub)
        });
        if minimal {
            nonfaces.push(set);
        }
    }
    nonfaces
}

/// Graded dimensions predicted by the h-vector of the fan.
fn h_vector(fan: &FanData) -> Vec<usize> {
    let n = fan.dim;
    let mut fc = vec![0i64; n + 1];
    for mask in 0u32..(1 << fan.ray_count()) {
        let set: Vec<usize> = (0..fan.ray_count())
            .filter(|&j| mask & (1 << j) != 0)
            .collect();
        if set.len() <= n && fan.is_face(&set) {
            fc[set.len()] += 1;
        }
    }
    let binom = |n: i64, k: i64| -> i64 {
        if k < 0 || k > n {
            return 0;
        }
        let mut r = 1i64;
        for i in 0..k {
            r = r * (n - i) / (i + 1);
        }
        r
    };
    (0..=n)
        .map(|k| {
            let h: i64 = (0..=k)
                .map(|s| {
                    let sign = if (k - s) % 2 == 0 { 1 } else { -1 };
                    sign * binom((n - s) as i64, (k - s) as i64) * fc[s]
                })
                .sum();
            usize::try_from(h).expect("h-vector entries are nonnegative")
        })
        .collect()
}
