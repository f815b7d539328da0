//! Dense LU with partial pivoting, enough for the stationary solve.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solve `a x = b` in place; `a` is row-major `dim x dim` and is destroyed.
pub fn lu_solve<T: Real>(a: &mut [T], dim: usize, b: &mut [T]) -> Result<()> {
    assert_eq!(a.len(), dim * dim);
    assert_eq!(b.len(), dim);
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tiny = scale * T::epsilon() * T::from_usize_lossy(dim);
    for k in 0..dim {
        let (mut piv, mut best) = (k, a[k * dim + k].abs());
        for i in k + 1..dim {
            let v = a[i * dim + k].abs();
            if v > best {
                piv = i;
                best = v;
            }
        }
        if !(best > tiny) {
            return Err(Error::Singular {
                column: k,
                pivot: best.to_f64_lossy(),
            });
        }
        if piv != k {
            for j in 0..dim {
                a.swap(k * dim + j, piv * dim + j);
            }
            b.swap(k, piv);
        }
        let (head, tail) = a.split_at_mut((k + 1) * dim);
        let pivot_row = &head[k * dim..];
        let diag = pivot_row[k];
        for (r, row) in tail.chunks_exact_mut(dim).enumerate() {
            let l = row[k] / diag;
            if l == T::zero() {
                continue;
            }
            row[k] = T::zero();
            for j in k + 1..dim {
                row[j] -= l * pivot_row[j];
            }
            let bk = b[k];
            b[k + 1 + r] -= l * bk;
        }
    }
    for k in (0..dim).rev() {
        let mut s = b[k];
        for j in k + 1..dim {
            s -= a[k * dim + j] * b[j];
        }
        b[k] = s / a[k * dim + k];
    }
    Ok(())
}
