//! Adaptive Gauss-Kronrod quadrature, one-dimensional and nested over
//! rectangular boxes.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// 15-point Kronrod abscissae on [-1, 1] (nonnegative half) and weights,
// with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526,
    0.949107912342758524526189684048,
    0.864864423359769072789712788641,
    0.741531185599394439863864773281,
    0.586087235467691130294144838259,
    0.405845151377397166906606412077,
    0.207784955007898467600689403773,
    0.000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008059,
    0.063092092629978553290700663189,
    0.104790010322250183839876322541,
    0.140653259715525918745189590510,
    0.169004726639267902826583426599,
    0.190350578064785409913256402421,
    0.204432940075298892414161999234,
    0.209482141084727828012999174891,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679,
    0.279705391489276667901467771424,
    0.381830050505118944950369775489,
    0.417959183673469387755102040816,
];

/// One G7/K15 panel: returns (kronrod value, |kronrod - gauss|).
fn gk15(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fp, fm) = if x == 0.0 {
            let v = f(c);
            (v, Complex64::new(0.0, 0.0))
        } else {
            (f(c + h * x), f(c - h * x))
        };
        let sum = fp + fm;
        kron += wk * sum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * sum;
        } else if x == 0.0 {
            // center belongs to Kronrod only
        }
    }
    // the center point (i = 7) is odd-indexed in the Gauss rule: x_4 of G7
    // is 0, covered above by i = 7 check
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

struct Panel {
    err: f64,
    a: f64,
    b: f64,
    val: Complex64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive bisection with a worst-panel-first queue until the summed error
/// estimate falls below `tol` (absolute) or the panel budget is exhausted.
/// Returns (value, error estimate, evaluation count).
pub fn adaptive_1d(
    f: &mut impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> (Complex64, f64, usize) {
    let mut evals = 15usize;
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        err: e,
        a,
        b,
        val: v,
    });
    let mut total_err = e;
    while total_err > tol && heap.len() < max_panels {
        let worst = heap.pop().expect("nonempty heap");
        if worst.err <= 0.0 || (worst.b - worst.a) < 1e-14 * (b - a).abs().max(1.0) {
            heap.push(worst);
            break;
        }
        let m = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(f, worst.a, m);
        let (v2, e2) = gk15(f, m, worst.b);
        evals += 30;
        total_err = total_err - worst.err + e1 + e2;
        heap.push(Panel {
            err: e1,
            a: worst.a,
            b: m,
            val: v1,
        });
        heap.push(Panel {
            err: e2,
            a: m,
            b: worst.b,
            val: v2,
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for p in heap.iter() {
        value += p.val;
        err += p.err;
    }
    (value, err, evals)
}

/// Nested adaptive integration of `f` over the box; inner dimensions are
/// resolved to a tolerance proportionally tighter than the outer request.
pub fn nested_box(
    f: &dyn Fn(&[f64]) -> Complex64,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
    max_panels: usize,
) -> (Complex64, f64, usize) {
    let dim = lo.len();
    assert_eq!(dim, hi.len());
    fn rec(
        f: &dyn Fn(&[f64]) -> Complex64,
        lo: &[f64],
        hi: &[f64],
        level: usize,
        prefix: &mut Vec<f64>,
        tol: f64,
        max_panels: usize,
        evals: &mut usize,
    ) -> (Complex64, f64) {
        let dim = lo.len();
        let width = hi[level] - lo[level];
        if level == dim - 1 {
            let mut g = |x: f64| {
                prefix.push(x);
                let v = f(prefix);
                prefix.pop();
                v
            };
            let (v, e, n) = adaptive_1d(&mut g, lo[level], hi[level], tol, max_panels);
            *evals += n;
            (v, e)
        } else {
            let inner_tol = tol / (width * 4.0).max(1.0) / 4.0;
            let mut err_inner_max = 0.0f64;
            let mut g = |x: f64| {
                prefix.push(x);
                let (v, e) = rec(f, lo, hi, level + 1, prefix, inner_tol, max_panels, evals);
                prefix.pop();
                err_inner_max = err_inner_max.max(e);
                v
            };
            let (v, e, _n) = adaptive_1d(&mut g, lo[level], hi[level], tol, max_panels);
            (v, e + err_inner_max * width)
        }
    }
    let mut prefix = Vec::with_capacity(dim);
    let mut evals = 0usize;
    let (v, e) = rec(f, lo, hi, 0, &mut prefix, tol, max_panels, &mut evals);
    (v, e, evals)
}
