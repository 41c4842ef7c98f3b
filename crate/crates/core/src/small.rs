//! Fixed-size dense algebra for per-cell systems of up to three variables.
//!
//! Systems with `l < 3` variables occupy the leading `l x l` corner; the
//! remaining entries are zero and ignored.

pub const MAX_VARS: usize = 3;

pub type Mat = [[f64; MAX_VARS]; MAX_VARS];
pub type Vect = [f64; MAX_VARS];

pub const ZERO: Mat = [[0.0; MAX_VARS]; MAX_VARS];

pub fn identity(l: usize) -> Mat {
    let mut m = ZERO;
    for (k, row) in m.iter_mut().enumerate().take(l) {
        row[k] = 1.0;
    }
    m
}

#[inline]
pub fn matvec(l: usize, a: &Mat, x: &Vect) -> Vect {
    let mut y = [0.0; MAX_VARS];
    for r in 0..l {
        let mut acc = 0.0;
        for c in 0..l {
            acc += a[r][c] * x[c];
        }
        y[r] = acc;
    }
    y
}

pub fn matmul(l: usize, a: &Mat, b: &Mat) -> Mat {
    let mut c = ZERO;
    for r in 0..l {
        for k in 0..l {
            let mut acc = 0.0;
            for j in 0..l {
                acc += a[r][j] * b[j][k];
            }
            c[r][k] = acc;
        }
    }
    c
}

/// `R diag(d) R^{-1}`.
pub fn recompose(l: usize, r: &Mat, d: &Vect, rinv: &Mat) -> Mat {
    let mut rd = ZERO;
    for i in 0..l {
        for k in 0..l {
            rd[i][k] = r[i][k] * d[k];
        }
    }
    matmul(l, &rd, rinv)
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
pub fn invert(l: usize, a: &Mat) -> Option<Mat> {
    let mut m = *a;
    let mut inv = identity(l);
    for col in 0..l {
        let piv = (col..l).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col] == 0.0 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for k in 0..l {
            m[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..l {
            if row != col {
                let f = m[row][col];
                for k in 0..l {
                    m[row][k] -= f * m[col][k];
                    inv[row][k] -= f * inv[col][k];
                }
            }
        }
    }
    Some(inv)
}

/// Max-abs entry of `a - b` over the leading `l x l` block.
pub fn max_abs_diff(l: usize, a: &Mat, b: &Mat) -> f64 {
    let mut m = 0.0f64;
    for r in 0..l {
        for c in 0..l {
            m = m.max((a[r][c] - b[r][c]).abs());
        }
    }
    m
}

/// Reads cell `i` of a variable-major block field.
#[inline]
pub fn gather(l: usize, nx: usize, field: &[f64], i: usize) -> Vect {
    let mut v = [0.0; MAX_VARS];
    for s in 0..l {
        v[s] = field[s * nx + i];
    }
    v
}

#[inline]
pub fn scatter(l: usize, nx: usize, field: &mut [f64], i: usize, v: &Vect) {
    for s in 0..l {
        field[s * nx + i] = v[s];
    }
}
