use super::{roe_flux, FluxModel, Model};
use crate::error::{check_len, Result};
use crate::grid::{SpaceTimeGrid, StepOperator};
use crate::small::{gather, matvec, scatter, Mat, Vect, MAX_VARS};

/// Conservative one-step scheme with Roe fluxes.
#[derive(Debug, Clone)]
pub struct NonlinearStep {
    model: Model,
    grid: SpaceTimeGrid,
}

impl NonlinearStep {
    pub fn new(model: Model, grid: SpaceTimeGrid) -> Self {
        NonlinearStep { model, grid }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn nvars(&self) -> usize {
        self.model.nvars()
    }

    /// Fails on the first inadmissible input, Roe average or output cell.
    pub fn apply(&self, q: &[f64], out: &mut [f64]) -> Result<()> {
        let l = self.model.nvars();
        let nx = self.grid.nx();
        check_len("nonlinear step input", l * nx, q.len())?;
        check_len("nonlinear step output", l * nx, out.len())?;
        let bc = self.grid.bc();
        let mut fluxes = Vec::with_capacity(nx + 1);
        for k in 0..=nx {
            let il = bc.cell(k as isize - 1, nx);
            let ir = bc.cell(k as isize, nx);
            let ql = gather(l, nx, q, il);
            let qr = gather(l, nx, q, ir);
            let f = roe_flux(&self.model, &ql, &qr).map_err(|e| e.at_cell(ir))?;
            fluxes.push(f);
        }
        update(l, nx, self.grid.ratio(), q, &fluxes, out);
        for i in 0..nx {
            self.model
                .check_admissible(&gather(l, nx, out, i))
                .map_err(|e| e.at_cell(i))?;
        }
        Ok(())
    }
}

fn update(l: usize, nx: usize, ratio: f64, q: &[f64], fluxes: &[Vect], out: &mut [f64]) {
    for i in 0..nx {
        let qi = gather(l, nx, q, i);
        let mut v = [0.0; MAX_VARS];
        for s in 0..l {
            v[s] = qi[s] - ratio * (fluxes[i + 1][s] - fluxes[i][s]);
        }
        scatter(l, nx, out, i, &v);
    }
}

impl StepOperator for NonlinearStep {
    fn block_len(&self) -> usize {
        self.model.nvars() * self.grid.nx()
    }

    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        self.apply(input, output).map_err(|e| e.at_time(n))
    }
}

/// The scheme with the dissipation matrices held fixed: interface `k` uses `abs_a[k]`.
pub fn frozen_dissipation_step<M: FluxModel + ?Sized>(
    model: &M,
    grid: &SpaceTimeGrid,
    abs_a: &[Mat],
    q: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let l = model.nvars();
    let nx = grid.nx();
    check_len("frozen dissipation matrices", nx + 1, abs_a.len())?;
    check_len("frozen step input", l * nx, q.len())?;
    let bc = grid.bc();
    let mut fluxes = Vec::with_capacity(nx + 1);
    for (k, m) in abs_a.iter().enumerate() {
        let ql = gather(l, nx, q, bc.cell(k as isize - 1, nx));
        let qr = gather(l, nx, q, bc.cell(k as isize, nx));
        let fl = model.flux(&ql);
        let fr = model.flux(&qr);
        let mut dq = [0.0; MAX_VARS];
        for s in 0..l {
            dq[s] = qr[s] - ql[s];
        }
        let d = matvec(l, m, &dq);
        let mut f = [0.0; MAX_VARS];
        for s in 0..l {
            f[s] = 0.5 * (fl[s] + fr[s] - d[s]);
        }
        fluxes.push(f);
    }
    update(l, nx, grid.ratio(), q, &fluxes, out);
    Ok(())
}
