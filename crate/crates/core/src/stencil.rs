//! Three-point stencils with per-cell coefficients.

use crate::grid::Boundary;

/// `out_i = lower_i u_{i-1} + diag_i u_i + upper_i u_{i+1}`, ghost cells resolved by the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagStencil {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TridiagStencil {
    pub fn zeros(nx: usize) -> Self {
        TridiagStencil {
            lower: vec![0.0; nx],
            diag: vec![0.0; nx],
            upper: vec![0.0; nx],
        }
    }

    pub fn diagonal(d: Vec<f64>) -> Self {
        let nx = d.len();
        TridiagStencil {
            lower: vec![0.0; nx],
            diag: d,
            upper: vec![0.0; nx],
        }
    }

    pub fn nx(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, bc: Boundary, u: &[f64], out: &mut [f64]) {
        let nx = self.nx();
        debug_assert!(u.len() == nx && out.len() == nx);
        for i in 0..nx {
            let im = bc.cell(i as isize - 1, nx);
            let ip = bc.cell(i as isize + 1, nx);
            out[i] = self.lower[i] * u[im] + self.diag[i] * u[i] + self.upper[i] * u[ip];
        }
    }

    /// Accumulating variant: `out += S u`.
    pub fn apply_add(&self, bc: Boundary, u: &[f64], out: &mut [f64]) {
        let nx = self.nx();
        for i in 0..nx {
            let im = bc.cell(i as isize - 1, nx);
            let ip = bc.cell(i as isize + 1, nx);
            out[i] += self.lower[i] * u[im] + self.diag[i] * u[i] + self.upper[i] * u[ip];
        }
    }

    /// Row-major dense matrix, ghost contributions folded into the owning columns.
    pub fn to_dense(&self, bc: Boundary) -> Vec<Vec<f64>> {
        let nx = self.nx();
        let mut a = vec![vec![0.0; nx]; nx];
        for i in 0..nx {
            a[i][bc.cell(i as isize - 1, nx)] += self.lower[i];
            a[i][i] += self.diag[i];
            a[i][bc.cell(i as isize + 1, nx)] += self.upper[i];
        }
        a
    }

    /// Solves `S x = rhs` directly; `None` on a zero pivot.
    pub fn solve(&self, bc: Boundary, rhs: &[f64]) -> Option<Vec<f64>> {
        match bc {
            Boundary::Extrapolate => {
                let mut d = self.diag.clone();
                let n = d.len();
                d[0] += self.lower[0];
                d[n - 1] += self.upper[n - 1];
                thomas(&self.lower, &d, &self.upper, rhs)
            }
            Boundary::Periodic => cyclic(&self.lower, &self.diag, &self.upper, rhs),
        }
    }
}

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return None;
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        if beta == 0.0 || !beta.is_finite() {
            return None;
        }
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i + 1] * x[i + 1];
    }
    Some(x)
}

/// Periodic tridiagonal solve by the Sherman-Morrison correction of a Thomas solve.
fn cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = if diag[0] != 0.0 { -diag[0] } else { 1.0 };
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    let x = thomas(lower, &d, upper, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = thomas(lower, &d, upper, &u)?;
    let denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
    if denom == 0.0 {
        return None;
    }
    let fact = (x[0] + beta * x[n - 1] / gamma) / denom;
    Some(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    fn sample(nx: usize) -> TridiagStencil {
        TridiagStencil {
            lower: (0..nx).map(|i| -0.3 - 0.01 * i as f64).collect(),
            diag: (0..nx).map(|i| 2.0 + 0.1 * (i % 3) as f64).collect(),
            upper: (0..nx).map(|i| -0.7 + 0.02 * i as f64).collect(),
        }
    }

    #[test]
    fn apply_matches_dense() {
        let s = sample(7);
        let u: Vec<f64> = (0..7).map(|i| (i as f64 * 1.3).sin()).collect();
        for bc in [Boundary::Periodic, Boundary::Extrapolate] {
            let mut out = vec![0.0; 7];
            s.apply(bc, &u, &mut out);
            let d = dense_mul(&s.to_dense(bc), &u);
            for (a, b) in out.iter().zip(&d) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn solve_inverts_apply() {
        let s = sample(9);
        let rhs: Vec<f64> = (0..9).map(|i| (i as f64).cos()).collect();
        for bc in [Boundary::Periodic, Boundary::Extrapolate] {
            let x = s.solve(bc, &rhs).unwrap();
            let mut back = vec![0.0; 9];
            s.apply(bc, &x, &mut back);
            for (a, b) in back.iter().zip(&rhs) {
                assert!((a - b).abs() < 1e-13, "{bc:?}");
            }
        }
    }
}
