//! Fixed-size 4×4 helpers shared by the SO(4) entangler code and the matrix
//! exponential. Kept separate from `Mat` so hot paths stay allocation-free.

pub type Mat4 = [[f64; 4]; 4];

pub fn mat4_identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat4_mul_vec(a: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i] += a[i][j] * v[j];
        }
    }
    out
}

pub fn mat4_transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat4_max_abs(a: &Mat4) -> f64 {
    a.iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Determinant by cofactor expansion along the first row.
pub fn mat4_det(m: &Mat4) -> f64 {
    fn det3(a: [[f64; 3]; 3]) -> f64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }
    let minor = |col: usize| {
        let mut sub = [[0.0; 3]; 3];
        for i in 1..4 {
            let mut jj = 0;
            for j in 0..4 {
                if j == col {
                    continue;
                }
                sub[i - 1][jj] = m[i][j];
                jj += 1;
            }
        }
        det3(sub)
    };
    m[0][0] * minor(0) - m[0][1] * minor(1) + m[0][2] * minor(2) - m[0][3] * minor(3)
}
