//! Matrix exponential for 4×4 antisymmetric generators, by scaling-and-squaring
//! with a truncated series. exp of an antisymmetric matrix is orthogonal with
//! determinant +1, so the output lands in SO(4) up to roundoff; a 4×4 problem
//! needs no general-purpose Padé machinery.

use crate::error::{Error, Result};
use crate::numerics::mat4::{mat4_identity, mat4_max_abs, mat4_mul, Mat4};

const ANTISYM_TOL: f64 = 1e-12;
const SERIES_TOL: f64 = 1e-15;
const MAX_TERMS: usize = 30;

/// exp(M) for antisymmetric M (‖M + Mᵀ‖∞ ≤ 1e−12 required).
pub fn expm_antisym4(m: &Mat4) -> Result<Mat4> {
    let mut asym = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            asym = asym.max((m[i][j] + m[j][i]).abs());
        }
    }
    if asym > ANTISYM_TOL {
        return Err(Error::Precondition(format!(
            "expm_antisym4 input not antisymmetric: ‖M + Mᵀ‖∞ = {asym:.3e}"
        )));
    }

    // Halve until the scaled norm is small enough for fast series convergence.
    let norm = mat4_max_abs(m);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = m[i][j] * scale;
        }
    }

    // exp(T) = Σ Tᵏ/k!, truncated when the next term is negligible.
    let mut result = mat4_identity();
    let mut term = mat4_identity();
    for k in 1..=MAX_TERMS {
        term = mat4_mul(&term, &t);
        let inv_k = 1.0 / k as f64;
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x *= inv_k;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                result[i][j] += term[i][j];
            }
        }
        if mat4_max_abs(&term) < SERIES_TOL {
            break;
        }
    }

    for _ in 0..squarings {
        result = mat4_mul(&result, &result);
    }
    Ok(result)
}
