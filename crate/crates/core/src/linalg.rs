//! Small dense helpers over `Array2<Complex64>`.
//!
//! The propagator works on matrices of at most a few thousand rows, so
//! everything here is dense. The `*_into` variants write into caller-owned
//! buffers and are what the integrator uses in its inner loop.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView2, ArrayViewMut2, Zip};
use num_complex::Complex64 as C64;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Conjugate transpose, in standard (row-major) layout.
pub fn dagger(a: &ArrayView2<C64>) -> Array2<C64> {
    Array2::from_shape_fn((a.ncols(), a.nrows()), |(i, j)| a[[j, i]].conj())
}

pub fn dagger_into(a: &ArrayView2<C64>, out: &mut ArrayViewMut2<C64>) {
    Zip::from(out).and(a.t()).for_each(|o, &z| *o = z.conj());
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

/// Below this dimension a plain triple loop beats the packed kernel.
const SMALL_DIM: usize = 16;

/// `c = alpha * a b + beta * c`.
pub fn gemm(alpha: C64, a: &ArrayView2<C64>, b: &ArrayView2<C64>, beta: C64, c: &mut Array2<C64>) {
    let n = c.nrows();
    if n > SMALL_DIM {
        general_mat_mul(alpha, a, b, beta, c);
        return;
    }
    let (Some(a), Some(b)) = (a.as_slice(), b.as_slice()) else {
        general_mat_mul(alpha, a, b, beta, c);
        return;
    };
    let c = c.as_slice_mut().expect("workspace matrices are contiguous");
    for i in 0..n {
        let row = &mut c[i * n..(i + 1) * n];
        if beta == ZERO {
            row.fill(ZERO);
        } else if beta != ONE {
            row.iter_mut().for_each(|x| *x *= beta);
        }
        for k in 0..n {
            let aik = alpha * a[i * n + k];
            if aik == ZERO {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            for (x, &bkj) in row.iter_mut().zip(brow) {
                *x += aik * bkj;
            }
        }
    }
}

/// `out += scale * (a b - b a)`.
pub fn add_commutator(scale: C64, a: &ArrayView2<C64>, b: &ArrayView2<C64>, out: &mut Array2<C64>) {
    gemm(scale, a, b, ONE, out);
    gemm(-scale, b, a, ONE, out);
}

/// `out += scale * a b`.
pub fn add_product(scale: C64, a: &ArrayView2<C64>, b: &ArrayView2<C64>, out: &mut Array2<C64>) {
    gemm(scale, a, b, ONE, out);
}

pub fn trace(a: &ArrayView2<C64>) -> C64 {
    a.diag().iter().sum()
}

/// `max |a - a^dagger|` over all entries.
pub fn hermiticity_error(a: &ArrayView2<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for ((i, j), z) in a.indexed_iter() {
        if j < i {
            continue;
        }
        worst = worst.max((*z - a[[j, i]].conj()).norm());
    }
    worst
}

pub fn max_abs_diff(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> f64 {
    Zip::from(a)
        .and(b)
        .fold(0.0_f64, |acc, x, y| acc.max((*x - *y).norm()))
}

pub fn all_finite(a: &ArrayView2<C64>) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
