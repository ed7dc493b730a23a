//! Exact rational linear algebra shared by the combinatorial modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Rat = BigRational;

/// Rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Reduced row echelon form in place. Returns the pivot column of each
/// nonzero row, in row order.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Solve a square system `a x = b` exactly. Returns `None` when singular.
pub fn solve_square(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

/// Rank of a rational matrix.
pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut w: Vec<Vec<Rat>> = m.to_vec();
    rref(&mut w).len()
}

/// Dimension of the affine span of a point set.
pub fn affine_rank(points: &[Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(points[0].iter())
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    rank(&diffs)
}

/// Integer kernel basis of an `n x c` integer matrix (columns indexed by c).
///
/// Returns a Z-basis of `{ k in Z^c : M k = 0 }` computed by unimodular
/// column reduction, so the basis generates the full kernel lattice.
pub fn integer_kernel(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    if cols == 0 {
        return Vec::new();
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // u tracks the unimodular column operations, one column per original column
    let mut u: Vec<Vec<i128>> = (0..cols)
        .map(|j| (0..cols).map(|i| i128::from(i == j)).collect())
        .collect();
    let col_swap = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, x: usize, y: usize| {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        u.swap(x, y);
    };
    // subtract q * column x from column y
    let col_axpy = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, q: i128, x: usize, y: usize| {
        for row in a.iter_mut() {
            let t = row[x] * q;
            row[y] -= t;
        }
        for i in 0..u[x].len() {
            let t = u[x][i] * q;
            u[y][i] -= t;
        }
    };
    let mut lead = 0usize;
    for r in 0..rows {
        loop {
            let nonzero: Vec<usize> = (lead..cols).filter(|&j| a[r][j] != 0).collect();
            if nonzero.is_empty() {
                break;
            }
            if nonzero.len() == 1 {
                col_swap(&mut a, &mut u, lead, nonzero[0]);
                lead += 1;
                break;
            }
            // reduce the pair with the two smallest magnitudes
            let mut sorted = nonzero;
            sorted.sort_by_key(|&j| a[r][j].abs());
            let (x, y) = (sorted[0], sorted[1]);
            let q = a[r][y] / a[r][x];
            col_axpy(&mut a, &mut u, q, x, y);
        }
    }
    (lead..cols)
        .map(|j| {
            u[j].iter()
                .map(|&x| i64::try_from(x).expect("kernel basis entry overflow"))
                .collect()
        })
        .collect()
}

/// Scaled float conversion: `(mantissa, e)` with value = mantissa * 2^e.
///
/// Safe for rationals far outside the f64 range.
pub fn rat_to_f64_scaled(r: &Rat) -> (f64, i64) {
    if r.is_zero() {
        return (0.0, 0);
    }
    let num = r.numer();
    let den = r.denom();
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let sn = (nb - 64).max(0);
    let sd = (db - 64).max(0);
    let top = |x: &BigInt, s: i64| -> f64 {
        let shifted: BigInt = x >> (s as usize);
        shifted.to_f64().expect("shifted bigint fits in f64")
    };
    let mant = top(num, sn) / top(den, sd);
    // renormalize so |mantissa| is within [1e-1, 1e1) of 1
    let (m, e) = frexp(mant);
    (m, e + sn - sd)
}

/// Split into mantissa in [0.5, 1) times 2^e (sign preserved).
pub fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let e = x.abs().log2().floor() as i64 + 1;
    (x / exp2i(e), e)
}

/// 2^e as f64, saturating.
pub fn exp2i(e: i64) -> f64 {
    if e > 1500 {
        f64::INFINITY
    } else if e < -1500 {
        0.0
    } else {
        (e as f64).exp2()
    }
}

/// Exact gcd of two i64 magnitudes.
pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Sign-aware conversion used for small exact quantities.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let (m, e) = rat_to_f64_scaled(r);
    m * exp2i(e)
}

/// Integer determinant via fraction-free (Bareiss) elimination.
pub fn det_i128(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rref_identifies_pivots() {
        let mut m = vec![
            vec![rat_int(1), rat_int(2), rat_int(3)],
            vec![rat_int(2), rat_int(4), rat_int(6)],
            vec![rat_int(0), rat_int(1), rat_int(1)],
        ];
        let p = rref(&mut m);
        assert_eq!(p, vec![0, 1]);
    }

    #[test]
    fn kernel_of_p2_rays() {
        // rays of P^2 as columns: kernel generated by (1,1,1)
        let m = vec![vec![1, 0, -1], vec![0, 1, -1]];
        let k = integer_kernel(&m);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!(v == &vec![1, 1, 1] || v == &vec![-1, -1, -1]);
    }

    #[test]
    fn kernel_of_p1xp1_rays() {
        let m = vec![vec![1, -1, 0, 0], vec![0, 0, 1, -1]];
        let k = integer_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v[0] - v[1], 0);
            assert_eq!(v[2] - v[3], 0);
        }
    }

    #[test]
    fn scaled_conversion_handles_huge_values() {
        // 1 / 300!^2 is far below f64 range
        let mut f = Rat::one();
        for k in 1..=300 {
            f *= rat_int(k);
        }
        let r = Rat::one() / (&f * &f);
        let (m, e) = rat_to_f64_scaled(&r);
        assert!(m != 0.0 && m.is_finite());
        // log2(300!^2) ~ 2 * 2074
        assert!(e < -4000 && e > -4300, "e = {e}");
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(det_i128(&[vec![1, 0], vec![0, 1]]), 1);
        assert_eq!(det_i128(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(det_i128(&[vec![2, 1], vec![1, 1]]), 1);
        assert_eq!(det_i128(&[vec![1, 1], vec![2, 2]]), 0);
    }

    #[test]
    fn solve_square_exact() {
        let a = vec![vec![rat_int(2), rat_int(1)], vec![rat_int(1), rat_int(3)]];
        let b = vec![rat_int(5), rat_int(10)];
        let x = solve_square(&a, &b).unwrap();
        assert_eq!(x[0], rat_int(1));
        assert_eq!(x[1], rat_int(3));
    }
}
