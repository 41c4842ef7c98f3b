//! Frozen-dissipation linearization of the Roe scheme about a space-time trajectory.

use rayon::prelude::*;

use super::{FluxModel, Model, ENTROPY_DELTA};
use crate::blockprec::CharSystem;
use crate::error::{check_len, Result};
use crate::grid::{SpaceTimeGrid, SpaceTimeVector, StepOperator};
use crate::small::{gather, matvec, scatter, Mat, Vect, MAX_VARS};
use crate::transform::apply_cellwise;

/// Linearization data about one frozen block field `q^n`.
#[derive(Debug, Clone)]
pub struct FrozenLevel {
    nvars: usize,
    jac: Vec<Mat>,
    r: Vec<Mat>,
    rinv: Vec<Mat>,
    /// `lambda[s][i]`: eigenvalue `s` at cell `i`.
    lambda: Vec<Vec<f64>>,
    /// `|A*|` at interface `k`, between cells `k-1` and `k`.
    abs_a: Vec<Mat>,
    /// Entropy-fixed `|lambda*_s|` at interface `k`.
    abs_lambda: Vec<Vec<f64>>,
}

impl FrozenLevel {
    pub fn new<M: FluxModel + ?Sized>(model: &M, grid: &SpaceTimeGrid, q: &[f64]) -> Result<Self> {
        let l = model.nvars();
        let nx = grid.nx();
        check_len("frozen state", l * nx, q.len())?;
        let bc = grid.bc();
        let mut jac = Vec::with_capacity(nx);
        let mut r = Vec::with_capacity(nx);
        let mut rinv = Vec::with_capacity(nx);
        let mut lambda = vec![vec![0.0; nx]; l];
        for i in 0..nx {
            let qi = gather(l, nx, q, i);
            let es = model.eigensystem(&qi).map_err(|e| e.at_cell(i))?;
            jac.push(model.jacobian(&qi));
            r.push(es.r);
            rinv.push(es.rinv);
            for (s, row) in lambda.iter_mut().enumerate() {
                row[i] = es.lambda[s];
            }
        }
        let mut abs_a = Vec::with_capacity(nx + 1);
        let mut abs_lambda = vec![vec![0.0; nx + 1]; l];
        for k in 0..=nx {
            let ql = gather(l, nx, q, bc.cell(k as isize - 1, nx));
            let qr = gather(l, nx, q, bc.cell(k as isize, nx));
            let roe = model.roe(&ql, &qr).map_err(|e| e.at_cell(bc.cell(k as isize, nx)))?;
            abs_a.push(roe.abs_matrix(l, ENTROPY_DELTA));
            let d = roe.abs_eigenvalues(l, ENTROPY_DELTA);
            for (s, row) in abs_lambda.iter_mut().enumerate() {
                row[k] = d[s];
            }
        }
        Ok(FrozenLevel {
            nvars: l,
            jac,
            r,
            rinv,
            lambda,
            abs_a,
            abs_lambda,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn abs_a(&self) -> &[Mat] {
        &self.abs_a
    }

    pub fn lambda(&self, s: usize) -> &[f64] {
        &self.lambda[s]
    }

    pub fn abs_lambda(&self, s: usize) -> &[f64] {
        &self.abs_lambda[s]
    }

    pub fn to_char(&self, v: &[f64], w: &mut [f64]) {
        apply_cellwise(self.nvars, &self.rinv, v, w);
    }

    pub fn from_char(&self, w: &[f64], v: &mut [f64]) {
        apply_cellwise(self.nvars, &self.r, w, v);
    }
}

/// `e_i - (dt/h)(F_{i+1/2} - F_{i-1/2})` with
/// `F = ((A_R e_R + A_L e_L) - |A*| (e_R - e_L)) / 2`.
pub fn linearized_step(level: &FrozenLevel, grid: &SpaceTimeGrid, e: &[f64], out: &mut [f64]) {
    let l = level.nvars;
    let nx = grid.nx();
    let bc = grid.bc();
    let ratio = grid.ratio();
    let mut prev = [0.0; MAX_VARS];
    for k in 0..=nx {
        let il = bc.cell(k as isize - 1, nx);
        let ir = bc.cell(k as isize, nx);
        let el = gather(l, nx, e, il);
        let er = gather(l, nx, e, ir);
        let al = matvec(l, &level.jac[il], &el);
        let ar = matvec(l, &level.jac[ir], &er);
        let mut de = [0.0; MAX_VARS];
        for s in 0..l {
            de[s] = er[s] - el[s];
        }
        let d = matvec(l, &level.abs_a[k], &de);
        let mut f: Vect = [0.0; MAX_VARS];
        for s in 0..l {
            f[s] = 0.5 * (ar[s] + al[s] - d[s]);
        }
        if k > 0 {
            let i = k - 1;
            let ei = gather(l, nx, e, i);
            let mut v = [0.0; MAX_VARS];
            for s in 0..l {
                v[s] = ei[s] - ratio * (f[s] - prev[s]);
            }
            scatter(l, nx, out, i, &v);
        }
        prev = f;
    }
}

/// Roe-like scalar step for one characteristic variable:
/// `g_k = ((lambda_R e_R + lambda_L e_L) - |lambda*_k| (e_R - e_L)) / 2`.
pub fn scalar_char_step(
    grid: &SpaceTimeGrid,
    lambda: &[f64],
    abs_lambda_star: &[f64],
    e: &[f64],
    out: &mut [f64],
) {
    let nx = grid.nx();
    let bc = grid.bc();
    let ratio = grid.ratio();
    debug_assert!(lambda.len() == nx && abs_lambda_star.len() == nx + 1);
    let mut prev = 0.0;
    for k in 0..=nx {
        let il = bc.cell(k as isize - 1, nx);
        let ir = bc.cell(k as isize, nx);
        let g = 0.5 * ((lambda[ir] * e[ir] + lambda[il] * e[il]) - abs_lambda_star[k] * (e[ir] - e[il]));
        if k > 0 {
            out[k - 1] = e[k - 1] - ratio * (g - prev);
        }
        prev = g;
    }
}

/// The linearized all-at-once system about a frozen trajectory.
#[derive(Debug, Clone)]
pub struct LinearizedSystem {
    model: Model,
    grid: SpaceTimeGrid,
    levels: Vec<FrozenLevel>,
}

impl LinearizedSystem {
    pub fn new(model: Model, grid: SpaceTimeGrid, q: &SpaceTimeVector) -> Result<Self> {
        let l = model.nvars();
        check_len("trajectory variables", l, q.nvars())?;
        check_len("trajectory cells", grid.nx(), q.nx())?;
        check_len("trajectory time points", grid.nt(), q.nt())?;
        let levels = (0..q.nt())
            .into_par_iter()
            .map(|n| FrozenLevel::new(&model, &grid, q.at(n)).map_err(|e| e.at_time(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearizedSystem {
            model,
            grid,
            levels,
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn level(&self, n: usize) -> &FrozenLevel {
        &self.levels[n]
    }

    fn compose(&self, n: usize, e_hat: &[f64], out: &mut [f64]) {
        let len = e_hat.len();
        let mut v = vec![0.0; len];
        let mut y = vec![0.0; len];
        self.levels[n].from_char(e_hat, &mut v);
        linearized_step(&self.levels[n], &self.grid, &v, &mut y);
        self.levels[n + 1].to_char(&y, out);
    }
}

impl StepOperator for LinearizedSystem {
    fn block_len(&self) -> usize {
        self.model.nvars() * self.grid.nx()
    }

    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        linearized_step(&self.levels[n], &self.grid, input, output);
        Ok(())
    }
}

impl CharSystem for LinearizedSystem {
    fn nvars(&self) -> usize {
        self.model.nvars()
    }

    fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    fn to_char(&self, n: usize, v: &[f64], w: &mut [f64]) {
        self.levels[n].to_char(v, w);
    }

    fn from_char(&self, n: usize, w: &[f64], v: &mut [f64]) {
        self.levels[n].from_char(w, v);
    }

    fn char_block(&self, n: usize, s: usize, j: usize, e: &[f64], out: &mut [f64]) {
        let nx = self.grid.nx();
        let l = self.nvars();
        let mut full = vec![0.0; l * nx];
        full[j * nx..(j + 1) * nx].copy_from_slice(e);
        let mut res = vec![0.0; l * nx];
        self.compose(n, &full, &mut res);
        out.copy_from_slice(&res[s * nx..(s + 1) * nx]);
    }

    fn char_row_partial(&self, n: usize, s: usize, upto: usize, e: &[f64], out: &mut [f64]) {
        let nx = self.grid.nx();
        let l = self.nvars();
        let mut masked = vec![0.0; l * nx];
        let keep = upto.min(l) * nx;
        masked[..keep].copy_from_slice(&e[..keep]);
        let mut res = vec![0.0; l * nx];
        self.compose(n, &masked, &mut res);
        out.copy_from_slice(&res[s * nx..(s + 1) * nx]);
    }

    fn char_step(&self, n: usize, e: &[f64], out: &mut [f64]) -> Result<()> {
        self.compose(n, e, out);
        Ok(())
    }

    fn approx_block(&self, n: usize, s: usize, e: &[f64], out: &mut [f64]) {
        let lv = &self.levels[n];
        scalar_char_step(&self.grid, &lv.lambda[s], &lv.abs_lambda[s], e, out);
    }

    fn wavespeed(&self, n: usize, s: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.levels[n].lambda[s]);
    }

    fn time_invariant(&self) -> bool {
        false
    }

    fn conservative(&self) -> bool {
        true
    }
}
