//! Dense symmetric eigensolver: Householder tridiagonalization followed by the
//! implicit QL iteration with shifts, accumulating the orthogonal transform so
//! eigenvectors come out directly (the classic tred2/tql2 pair).
//!
//! Contract: ascending eigenvalues with a stable tie order, orthonormal
//! eigenvector columns, and reconstruction ‖M − VΛVᵀ‖∞ below 1e−11·‖M‖∞.

use crate::error::{Error, Result};
use crate::numerics::Mat;

/// Eigendecomposition of a symmetric matrix. Returns `(values, vectors)` with
/// eigenvalues ascending and eigenvectors as the corresponding columns.
///
/// The input must be symmetric to within `1e−10 · max(1, ‖M‖∞)`; it is
/// symmetrized exactly before decomposition to keep roundoff even-handed.
pub fn eigh(m: &Mat) -> Result<(Vec<f64>, Mat)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Precondition(format!(
            "eigh needs a square matrix, got {}×{}",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let tol = 1e-10 * m.max_abs().max(1.0);
    let asym = m.max_asymmetry();
    if asym > tol {
        return Err(Error::Precondition(format!(
            "eigh input asymmetric: max |a_ij − a_ji| = {asym:.3e} (tolerance {tol:.3e})"
        )));
    }

    let mut a = Mat::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut a, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut a)?;

    // Ascending sort; stable so exact ties keep the iteration's order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("non-finite eigenvalue"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| a[(i, order[j])]);
    Ok((values, vectors))
}

/// Householder reduction to tridiagonal form. On exit `d` holds the diagonal,
/// `e[1..]` the subdiagonal, and `a` the accumulated orthogonal matrix Q with
/// A = Q·T·Qᵀ.
fn tred2(a: &mut Mat, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a[(i, k)].abs();
            }
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 0..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                let mut fsum = 0.0;
                for j in 0..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    fsum += e[j] * a[(i, j)];
                }
                let hh = fsum / (h + h);
                for j in 0..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let delta = f * e[k] + g * a[(i, k)];
                        a[(j, k)] -= delta;
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += a[(i, k)] * a[(k, j)];
                }
                for k in 0..i {
                    let delta = g * a[(k, i)];
                    a[(k, j)] -= delta;
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = 1.0;
        for j in 0..i {
            a[(j, i)] = 0.0;
            a[(i, j)] = 0.0;
        }
    }
}

/// Implicit QL with shifts on the tridiagonal (d, e), rotating `z` so its
/// columns become the eigenvectors of the original matrix.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut Mat) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find the first negligible subdiagonal at or beyond l. The
            // float-addition test (|e| + dd == dd) is the standard
            // machine-precision deflation criterion.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                #[allow(clippy::float_cmp)]
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NotConverged {
                    context: format!("QL iteration stalled at eigenvalue {l} of {n}"),
                    residuals: vec![e[l].abs()],
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            // Wilkinson shift; sign chosen to avoid cancellation in g + r.
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflowed = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[(k, i + 1)];
                    z[(k, i + 1)] = s * z[(k, i)] + c * f;
                    z[(k, i)] = c * z[(k, i)] - s * f;
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
