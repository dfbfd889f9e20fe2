use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::RealScalar;

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues of a real symmetric matrix, ascending.
///
/// Householder reflections reduce the matrix to tridiagonal form; implicit
/// QL iterations with Wilkinson shifts then deflate the tridiagonal matrix
/// one eigenvalue at a time.
pub fn symmetric_eigenvalues<T: RealScalar>(matrix: &DenseMatrix<T>) -> Result<Vec<T>> {
    if !matrix.is_square() {
        return Err(Error::NotSymmetric);
    }
    let n = matrix.rows();
    let scale = (0..n).flat_map(|j| matrix.column(j).iter().map(|v| v.abs())).fold(T::one(), T::max_of);
    let sym_tol = T::lit(1e-12).max_of(T::epsilon() * T::lit(16.0)) * scale;
    if matrix.asymmetry() > sym_tol {
        return Err(Error::NotSymmetric);
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let mut a = matrix.to_rows();
    let (mut d, mut e) = tridiagonalize(&mut a);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(d)
}

/// Householder reduction; returns the diagonal and the subdiagonal
/// (`e[i]` couples rows `i − 1` and `i`, `e[0] = 0`). Only the lower
/// triangle of `a` is read.
#[allow(clippy::needless_range_loop)]
fn tridiagonalize<T: RealScalar>(a: &mut [Vec<T>]) -> (Vec<T>, Vec<T>) {
    let n = a.len();
    let mut e = vec![T::zero(); n];
    for i in (1..n).rev() {
        let l = i - 1;
        if l == 0 {
            e[i] = a[i][l];
            continue;
        }
        let scale = (0..=l).fold(T::zero(), |acc, k| acc + a[i][k].abs());
        if scale == T::zero() {
            e[i] = a[i][l];
            continue;
        }
        let mut h = T::zero();
        for k in 0..=l {
            a[i][k] = a[i][k] / scale;
            h = h + a[i][k] * a[i][k];
        }
        let f = a[i][l];
        let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h = h - f * g;
        a[i][l] = f - g;
        let mut f = T::zero();
        for j in 0..=l {
            let mut g = T::zero();
            for k in 0..=j {
                g = g + a[j][k] * a[i][k];
            }
            for k in j + 1..=l {
                g = g + a[k][j] * a[i][k];
            }
            e[j] = g / h;
            f = f + e[j] * a[i][j];
        }
        let hh = f / (h + h);
        for j in 0..=l {
            let f = a[i][j];
            let g = e[j] - hh * f;
            e[j] = g;
            for k in 0..=j {
                a[j][k] = a[j][k] - (f * e[k] + g * a[i][k]);
            }
        }
    }
    let d = (0..n).map(|i| a[i][i]).collect();
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix; `d` ends up holding the
/// eigenvalues (unsorted).
fn tridiagonal_ql<T: RealScalar>(d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    e.rotate_left(1);
    e[n - 1] = T::zero();
    let two = T::one() + T::one();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::InvalidMatrix("eigenvalue iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
