//! Multigrid reduction in time for scalar advection-type all-at-once systems.

mod sl;

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

pub use sl::{dissipation_coefficients, semi_lagrangian_step, SlVariant};

use crate::error::{check_len, Result};
use crate::gmres::{gmres, GmresOptions};
use crate::grid::{
    c_point_residual, c_relax_rhs, f_relax_rhs, forward_solve, CfSplitting, SpaceTimeGrid,
    SpaceTimeVector, StepOperator,
};
use crate::stencil::TridiagStencil;

/// Time stepper used on levels below the finest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoarseOperator {
    /// Semi-Lagrangian step followed by the dissipation correction.
    ModifiedSemiLagrangian,
    /// Uncorrected semi-Lagrangian step.
    SemiLagrangian,
    /// `m`-fold product of the next finer operator (makes two-level MGRIT exact).
    ExactPower,
}

/// How `(I - diag(gamma) D2) v = w` is solved in the corrected coarse step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoarseSolve {
    Gmres(GmresOptions),
    /// Tridiagonal direct solve; keeps the V-cycle a linear map.
    Direct,
}

impl Default for CoarseSolve {
    fn default() -> Self {
        CoarseSolve::Gmres(GmresOptions::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgritOptions {
    pub m: usize,
    pub coarse_operator: CoarseOperator,
    pub coarse_solve: CoarseSolve,
    pub variant: SlVariant,
    /// Caps the number of levels (including the finest); `None` coarsens fully.
    pub max_levels: Option<usize>,
}

impl Default for MgritOptions {
    fn default() -> Self {
        MgritOptions {
            m: 8,
            coarse_operator: CoarseOperator::ModifiedSemiLagrangian,
            coarse_solve: CoarseSolve::default(),
            variant: SlVariant::Interpolating,
            max_levels: None,
        }
    }
}

struct CoarseLevel {
    nt: usize,
    /// Averaged wave speed and dissipation coefficients per coarse step (one entry if time invariant).
    speeds: Vec<Vec<f64>>,
    gammas: Vec<Vec<f64>>,
}

/// Level hierarchy for one scalar all-at-once system.
pub struct MgritHierarchy<'a> {
    fine: Box<dyn StepOperator + 'a>,
    grid: SpaceTimeGrid,
    cf: CfSplitting,
    opts: MgritOptions,
    coarse: Vec<CoarseLevel>,
    fallbacks: AtomicUsize,
}

impl<'a> MgritHierarchy<'a> {
    /// `fine` steps a scalar field on `grid`; `speed(n, out)` fills the wave speed of fine step `n`.
    pub fn new(
        fine: impl StepOperator + 'a,
        grid: &SpaceTimeGrid,
        speed: impl Fn(usize, &mut [f64]),
        time_invariant: bool,
        opts: MgritOptions,
    ) -> Result<Self> {
        let cf = CfSplitting::new(opts.m)?;
        let nx = grid.nx();
        check_len("MGRIT fine operator block length", nx, fine.block_len())?;
        let max_levels = opts.max_levels.unwrap_or(usize::MAX).max(1);
        let mut coarse: Vec<CoarseLevel> = Vec::new();
        let mut nt = grid.nt();
        let mut prev_speeds: Vec<Vec<f64>> = if time_invariant {
            let mut c = vec![0.0; nx];
            speed(0, &mut c);
            vec![c]
        } else {
            (0..grid.nt() - 1)
                .map(|n| {
                    let mut c = vec![0.0; nx];
                    speed(n, &mut c);
                    c
                })
                .collect()
        };
        let m = opts.m;
        while nt - 1 >= m && coarse.len() + 1 < max_levels {
            let nt_c = cf.num_c_points(nt);
            let speeds: Vec<Vec<f64>> = if time_invariant {
                prev_speeds.clone()
            } else {
                (0..nt_c - 1)
                    .map(|j| {
                        let mut avg = vec![0.0; nx];
                        for k in 0..m {
                            for (a, c) in avg.iter_mut().zip(&prev_speeds[j * m + k]) {
                                *a += c;
                            }
                        }
                        avg.iter_mut().for_each(|a| *a /= m as f64);
                        avg
                    })
                    .collect()
            };
            let level = coarse.len() as u32 + 1;
            let gammas = speeds
                .iter()
                .map(|c| dissipation_coefficients(c, grid.dt(), grid.h(), m, level))
                .collect();
            prev_speeds = speeds.clone();
            coarse.push(CoarseLevel {
                nt: nt_c,
                speeds,
                gammas,
            });
            nt = nt_c;
        }
        Ok(MgritHierarchy {
            fine: Box::new(fine),
            grid: grid.clone(),
            cf,
            opts,
            coarse,
            fallbacks: AtomicUsize::new(0),
        })
    }

    /// Number of levels including the finest.
    pub fn num_levels(&self) -> usize {
        self.coarse.len() + 1
    }

    pub fn level_nt(&self, level: usize) -> usize {
        if level == 0 {
            self.grid.nt()
        } else {
            self.coarse[level - 1].nt
        }
    }

    pub fn level_dt(&self, level: usize) -> f64 {
        self.grid.dt() * (self.opts.m as f64).powi(level as i32)
    }

    /// Coarse solves that fell back to the uncorrected step after a GMRES breakdown.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks.load(Ordering::Relaxed)
    }

    /// Dissipation coefficients of coarse step `j` on `level >= 1`.
    pub fn gamma(&self, level: usize, j: usize) -> &[f64] {
        let lv = &self.coarse[level - 1];
        &lv.gammas[j.min(lv.gammas.len() - 1)]
    }

    /// The step operator on `level`.
    pub fn level_operator(&self, level: usize) -> LevelOperator<'_, 'a> {
        LevelOperator { h: self, level }
    }

    fn coarse_step(&self, level: usize, j: usize, input: &[f64], out: &mut [f64]) -> Result<()> {
        let nx = self.grid.nx();
        if self.opts.coarse_operator == CoarseOperator::ExactPower {
            let m = self.opts.m;
            let mut a = input.to_vec();
            let mut b = vec![0.0; nx];
            for k in 0..m {
                self.step_on(level - 1, j * m + k, &a, &mut b)?;
                std::mem::swap(&mut a, &mut b);
            }
            out.copy_from_slice(&a);
            return Ok(());
        }
        let lv = &self.coarse[level - 1];
        let idx = j.min(lv.speeds.len() - 1);
        let dt_over_h = self.level_dt(level) / self.grid.h();
        let bc = self.grid.bc();
        let mut w = vec![0.0; nx];
        semi_lagrangian_step(bc, &lv.speeds[idx], dt_over_h, self.opts.variant, input, &mut w);
        let gamma = &lv.gammas[idx];
        if self.opts.coarse_operator == CoarseOperator::SemiLagrangian || gamma.iter().all(|g| *g == 0.0) {
            out.copy_from_slice(&w);
            return Ok(());
        }
        let h2 = self.grid.h() * self.grid.h();
        match self.opts.coarse_solve {
            CoarseSolve::Direct => {
                let mut st = TridiagStencil::zeros(nx);
                for i in 0..nx {
                    let g = gamma[i] / h2;
                    st.lower[i] = -g;
                    st.diag[i] = 1.0 + 2.0 * g;
                    st.upper[i] = -g;
                }
                match st.solve(bc, &w) {
                    Some(v) => out.copy_from_slice(&v),
                    None => {
                        self.fallbacks.fetch_add(1, Ordering::Relaxed);
                        out.copy_from_slice(&w);
                    }
                }
            }
            CoarseSolve::Gmres(g) => {
                let apply = |x: &[f64], y: &mut [f64]| {
                    for i in 0..nx {
                        let xm = x[bc.cell(i as isize - 1, nx)];
                        let xp = x[bc.cell(i as isize + 1, nx)];
                        y[i] = x[i] - gamma[i] / h2 * (xm - 2.0 * x[i] + xp);
                    }
                };
                let res = gmres(apply, &w, &g);
                if res.breakdown {
                    self.fallbacks.fetch_add(1, Ordering::Relaxed);
                    out.copy_from_slice(&w);
                } else {
                    out.copy_from_slice(&res.x);
                }
            }
        }
        Ok(())
    }

    fn step_on(&self, level: usize, n: usize, input: &[f64], out: &mut [f64]) -> Result<()> {
        if level == 0 {
            self.fine.step(n, input, out)
        } else {
            self.coarse_step(level, n, input, out)
        }
    }

    /// One V-cycle on the finest level, updating `u` in place.
    pub fn vcycle(&self, u: &mut SpaceTimeVector, b: &SpaceTimeVector) -> Result<()> {
        check_len("MGRIT iterate time points", self.grid.nt(), u.nt())?;
        check_len("MGRIT iterate block length", self.grid.nx(), u.block_len())?;
        self.cycle(0, u, b)
    }

    /// `cycles` V-cycles starting from the right-hand side.
    pub fn solve(&self, b: &SpaceTimeVector, cycles: usize) -> Result<SpaceTimeVector> {
        let mut u = b.clone();
        for _ in 0..cycles {
            self.vcycle(&mut u, b)?;
        }
        Ok(u)
    }

    fn cycle(&self, level: usize, u: &mut SpaceTimeVector, b: &SpaceTimeVector) -> Result<()> {
        let op = self.level_operator(level);
        if level + 1 == self.num_levels() {
            *u = forward_solve(&op, b)?;
            return Ok(());
        }
        f_relax_rhs(&op, u, b, &self.cf)?;
        if level > 0 {
            c_relax_rhs(&op, u, b, &self.cf)?;
            f_relax_rhs(&op, u, b, &self.cf)?;
        }
        let rc = c_point_residual(&op, u, b, &self.cf)?;
        let mut ec = SpaceTimeVector::zeros(1, self.grid.nx(), rc.nt());
        self.cycle(level + 1, &mut ec, &rc)?;
        let m = self.cf.m();
        for j in 0..rc.nt() {
            for (x, e) in u.at_mut(j * m).iter_mut().zip(ec.at(j)) {
                *x += e;
            }
        }
        f_relax_rhs(&op, u, b, &self.cf)
    }
}

/// [`StepOperator`] view of one level of a hierarchy.
pub struct LevelOperator<'h, 'a> {
    h: &'h MgritHierarchy<'a>,
    level: usize,
}

impl StepOperator for LevelOperator<'_, '_> {
    fn block_len(&self) -> usize {
        self.h.grid.nx()
    }

    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        self.h.step_on(self.level, n, input, output)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{all_at_once_residual, Boundary, FnStep};

    fn upwind(nx: usize, nu: f64) -> impl Fn(usize, &[f64], &mut [f64]) + Sync {
        move |_, u: &[f64], out: &mut [f64]| {
            for i in 0..nx {
                let im = (i + nx - 1) % nx;
                out[i] = u[i] - nu * (u[i] - u[im]);
            }
        }
    }

    #[test]
    fn level_structure() {
        let g = SpaceTimeGrid::new(16, 0.0, 1.0, 129, 0.85 / 16.0, Boundary::Periodic).unwrap();
        let f = FnStep::new(16, upwind(16, 0.85));
        let h = MgritHierarchy::new(&f, &g, |_, c| c.fill(1.0), true, MgritOptions::default()).unwrap();
        assert_eq!(h.num_levels(), 3);
        assert_eq!(h.level_nt(1), 17);
        assert_eq!(h.level_nt(2), 3);
        assert_eq!(h.level_dt(2), 64.0 * g.dt());
    }

    #[test]
    fn exact_power_two_level_is_exact() {
        let nx = 12;
        let g = SpaceTimeGrid::new(nx, 0.0, 1.0, 9, 0.6 / nx as f64, Boundary::Periodic).unwrap();
        let f = FnStep::new(nx, upwind(nx, 0.6));
        let opts = MgritOptions {
            coarse_operator: CoarseOperator::ExactPower,
            ..MgritOptions::default()
        };
        let h = MgritHierarchy::new(&f, &g, |_, c| c.fill(1.0), true, opts).unwrap();
        assert_eq!(h.num_levels(), 2);
        let b = SpaceTimeVector::from_fn(1, nx, 9, |_, i, n| ((i * 7 + n * 3) % 5) as f64 - 2.0);
        let u = h.solve(&b, 1).unwrap();
        let r = all_at_once_residual(&f, &u, &b).unwrap();
        assert!(r.norm() / b.norm() < 1e-14);
    }
}
