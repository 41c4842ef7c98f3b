//! Characteristic-variable block preconditioned iteration for linear(ized)
//! all-at-once systems.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, PintError, Result};
use crate::grid::{
    all_at_once_residual, f_relax_rhs, forward_solve, CfSplitting, SpaceTimeGrid, SpaceTimeVector,
    StepOperator,
};
use crate::mgrit::{MgritHierarchy, MgritOptions, SlVariant};
use crate::report::{SolveStatus, SolverReport};

/// A linear one-step system together with its characteristic structure.
///
/// `char_block(n, s, j)` is block `(s, j)` of `R_{n+1}^{-1} Phi^n R_n`, acting on scalar fields.
/// Variables are ordered by ascending eigenvalue.
pub trait CharSystem: StepOperator {
    fn nvars(&self) -> usize;

    fn grid(&self) -> &SpaceTimeGrid;

    /// `w = R_n^{-1} v` on one block field.
    fn to_char(&self, n: usize, v: &[f64], w: &mut [f64]);

    /// `v = R_n w`.
    fn from_char(&self, n: usize, w: &[f64], v: &mut [f64]);

    fn char_block(&self, n: usize, s: usize, j: usize, e: &[f64], out: &mut [f64]);

    /// `sum_{j < upto} Phi^n_{sj} e_j`, where `e` holds all variables of a characteristic block field.
    fn char_row_partial(&self, n: usize, s: usize, upto: usize, e: &[f64], out: &mut [f64]) {
        let nx = self.grid().nx();
        out.fill(0.0);
        let mut tmp = vec![0.0; nx];
        for j in 0..upto.min(self.nvars()) {
            self.char_block(n, s, j, &e[j * nx..(j + 1) * nx], &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += t;
            }
        }
    }

    /// Full characteristic step `R_{n+1}^{-1} Phi^n R_n e`.
    fn char_step(&self, n: usize, e: &[f64], out: &mut [f64]) -> Result<()> {
        let len = e.len();
        let mut v = vec![0.0; len];
        let mut y = vec![0.0; len];
        self.from_char(n, e, &mut v);
        self.step(n, &v, &mut y)?;
        self.to_char(n + 1, &y, out);
        Ok(())
    }

    /// Advection approximation of the diagonal block `(s, s)`.
    fn approx_block(&self, n: usize, s: usize, e: &[f64], out: &mut [f64]);

    /// Wave speed of characteristic variable `s` at step `n`, per cell.
    fn wavespeed(&self, n: usize, s: usize, out: &mut [f64]);

    /// The operator and transforms do not depend on `n`.
    fn time_invariant(&self) -> bool;

    /// The approximate blocks are in conservation form.
    fn conservative(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecShape {
    /// Block Jacobi.
    Diagonal,
    /// Block Gauss-Seidel (lower triangular).
    LowerTriangular,
    /// No truncation; inverts the whole characteristic system. Only useful as a check.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecBlocks {
    /// True characteristic diagonal blocks.
    Exact,
    /// Advection approximations of the diagonal blocks.
    Advection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerSolve {
    /// Forward substitution in time.
    Sequential,
    Mgrit { v_cycles: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecConfig {
    pub shape: PrecShape,
    pub blocks: PrecBlocks,
    pub inner: InnerSolve,
    /// CF-splitting factor of the outer F-relaxation.
    pub m: usize,
    /// Settings for MGRIT inner solves; `mgrit.variant` is overridden by the system.
    pub mgrit: MgritOptions,
}

impl Default for PrecConfig {
    fn default() -> Self {
        PrecConfig {
            shape: PrecShape::Diagonal,
            blocks: PrecBlocks::Exact,
            inner: InnerSolve::Sequential,
            m: 8,
            mgrit: MgritOptions::default(),
        }
    }
}

impl PrecConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(PintError::InvalidParameter(format!("m must be > 1, got {}", self.m)));
        }
        match (self.blocks, self.inner) {
            (PrecBlocks::Exact, InnerSolve::Mgrit { .. }) => {
                return Err(PintError::InvalidParameter(
                    "MGRIT inner solves require the advection block approximation".into(),
                ))
            }
            (_, InnerSolve::Mgrit { v_cycles: 0 }) => {
                return Err(PintError::InvalidParameter("v_cycles must be >= 1".into()))
            }
            _ => {}
        }
        if self.shape == PrecShape::Full
            && (self.blocks != PrecBlocks::Exact || self.inner != InnerSolve::Sequential)
        {
            return Err(PintError::InvalidParameter(
                "the untruncated preconditioner needs exact blocks and sequential solves".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterOptions {
    pub maxit: usize,
    /// Relative residual target; `0` runs exactly `maxit` iterations.
    pub tol: f64,
    /// Relative residual above which the iteration is declared divergent.
    pub divergence: f64,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions {
            maxit: 60,
            tol: 1e-10,
            divergence: 1e6,
        }
    }
}

/// Scalar diagonal-block operator of one characteristic variable.
struct DiagBlock<'a, S: ?Sized> {
    sys: &'a S,
    s: usize,
    approx: bool,
}

impl<S: CharSystem + ?Sized> StepOperator for DiagBlock<'_, S> {
    fn block_len(&self) -> usize {
        self.sys.grid().nx()
    }

    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        if self.approx {
            self.sys.approx_block(n, self.s, input, output);
        } else {
            self.sys.char_block(n, self.s, self.s, input, output);
        }
        Ok(())
    }
}

/// Full characteristic operator.
struct CharStep<'a, S: ?Sized>(&'a S);

impl<S: CharSystem + ?Sized> StepOperator for CharStep<'_, S> {
    fn block_len(&self) -> usize {
        self.0.block_len()
    }

    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        self.0.char_step(n, input, output)
    }
}

/// Variable `s` of every time point, as a scalar space-time vector.
pub fn extract_var(v: &SpaceTimeVector, s: usize) -> SpaceTimeVector {
    let nx = v.nx();
    let mut out = SpaceTimeVector::zeros(1, nx, v.nt());
    for n in 0..v.nt() {
        out.at_mut(n).copy_from_slice(&v.at(n)[s * nx..(s + 1) * nx]);
    }
    out
}

pub fn insert_var(v: &mut SpaceTimeVector, s: usize, part: &SpaceTimeVector) {
    let nx = v.nx();
    for n in 0..v.nt() {
        v.at_mut(n)[s * nx..(s + 1) * nx].copy_from_slice(part.at(n));
    }
}

/// Reusable preconditioner `P^{-1}` in characteristic space.
pub struct BlockPreconditioner<'a, S: CharSystem + ?Sized> {
    sys: &'a S,
    cfg: PrecConfig,
    hierarchies: Vec<MgritHierarchy<'a>>,
}

impl<'a, S: CharSystem + ?Sized> BlockPreconditioner<'a, S> {
    pub fn new(sys: &'a S, cfg: PrecConfig) -> Result<Self> {
        cfg.validate()?;
        let mut hierarchies = Vec::new();
        if let InnerSolve::Mgrit { .. } = cfg.inner {
            let mut opts = cfg.mgrit;
            opts.variant = if sys.conservative() {
                SlVariant::Conservative
            } else {
                SlVariant::Interpolating
            };
            for s in 0..sys.nvars() {
                let fine = DiagBlock {
                    sys,
                    s,
                    approx: true,
                };
                hierarchies.push(MgritHierarchy::new(
                    fine,
                    sys.grid(),
                    |n, out| sys.wavespeed(n, s, out),
                    sys.time_invariant(),
                    opts,
                )?);
            }
        }
        Ok(BlockPreconditioner {
            sys,
            cfg,
            hierarchies,
        })
    }

    pub fn config(&self) -> &PrecConfig {
        &self.cfg
    }

    /// Coarse-grid GMRES breakdowns so far.
    pub fn fallbacks(&self) -> usize {
        self.hierarchies.iter().map(|h| h.fallbacks()).sum()
    }

    fn scalar_solve(&self, s: usize, rhs: &SpaceTimeVector) -> Result<SpaceTimeVector> {
        match self.cfg.inner {
            InnerSolve::Sequential => {
                let op = DiagBlock {
                    sys: self.sys,
                    s,
                    approx: self.cfg.blocks == PrecBlocks::Advection,
                };
                forward_solve(&op, rhs)
            }
            InnerSolve::Mgrit { v_cycles } => self.hierarchies[s].solve(rhs, v_cycles),
        }
    }

    fn check(&self, r_hat: &SpaceTimeVector) -> Result<()> {
        check_len("residual variables", self.sys.nvars(), r_hat.nvars())?;
        check_len("residual cells", self.sys.grid().nx(), r_hat.nx())?;
        check_len("residual time points", self.sys.grid().nt(), r_hat.nt())
    }

    /// Applies the configured preconditioner to a characteristic residual.
    pub fn apply(&self, r_hat: &SpaceTimeVector) -> Result<SpaceTimeVector> {
        self.check(r_hat)?;
        match self.cfg.shape {
            PrecShape::Diagonal => self.apply_diagonal(r_hat),
            PrecShape::LowerTriangular => self.apply_triangular(r_hat),
            PrecShape::Full => forward_solve(&CharStep(self.sys), r_hat),
        }
    }

    fn apply_diagonal(&self, r_hat: &SpaceTimeVector) -> Result<SpaceTimeVector> {
        let parts = (0..self.sys.nvars())
            .into_par_iter()
            .map(|s| self.scalar_solve(s, &extract_var(r_hat, s)))
            .collect::<Result<Vec<_>>>()?;
        let mut e = SpaceTimeVector::zeros(r_hat.nvars(), r_hat.nx(), r_hat.nt());
        for (s, p) in parts.iter().enumerate() {
            insert_var(&mut e, s, p);
        }
        Ok(e)
    }

    fn apply_triangular(&self, r_hat: &SpaceTimeVector) -> Result<SpaceTimeVector> {
        let nx = r_hat.nx();
        let nt = r_hat.nt();
        let mut e = SpaceTimeVector::zeros(r_hat.nvars(), nx, nt);
        for s in 0..self.sys.nvars() {
            let mut rhs = extract_var(r_hat, s);
            if s > 0 {
                let e_ref = &e;
                let sys = self.sys;
                rhs.as_mut_slice()[nx..]
                    .par_chunks_mut(nx)
                    .enumerate()
                    .for_each(|(n, out)| {
                        let mut tmp = vec![0.0; nx];
                        sys.char_row_partial(n, s, s, e_ref.at(n), &mut tmp);
                        for (o, t) in out.iter_mut().zip(&tmp) {
                            *o += t;
                        }
                    });
            }
            let es = self.scalar_solve(s, &rhs)?;
            insert_var(&mut e, s, &es);
        }
        Ok(e)
    }
}

/// Block-diagonal preconditioner applied once.
pub fn apply_block_diagonal_prec<S: CharSystem + ?Sized>(
    sys: &S,
    cfg: PrecConfig,
    r_hat: &SpaceTimeVector,
) -> Result<SpaceTimeVector> {
    BlockPreconditioner::new(sys, PrecConfig { shape: PrecShape::Diagonal, ..cfg })?.apply(r_hat)
}

/// Block lower-triangular preconditioner applied once.
pub fn apply_block_triangular_prec<S: CharSystem + ?Sized>(
    sys: &S,
    cfg: PrecConfig,
    r_hat: &SpaceTimeVector,
) -> Result<SpaceTimeVector> {
    BlockPreconditioner::new(sys, PrecConfig { shape: PrecShape::LowerTriangular, ..cfg })?
        .apply(r_hat)
}

/// Characteristic-based block preconditioned iteration for `A q = b`.
pub fn char_outer_iteration<S: CharSystem + ?Sized>(
    sys: &S,
    b: &SpaceTimeVector,
    q0: &SpaceTimeVector,
    cfg: PrecConfig,
    opts: OuterOptions,
) -> Result<(SpaceTimeVector, SolverReport)> {
    let clock = Instant::now();
    q0.conforms(b)?;
    check_len("system variables", sys.nvars(), b.nvars())?;
    check_len("system cells", sys.grid().nx(), b.nx())?;
    check_len("system time points", sys.grid().nt(), b.nt())?;
    let cf = CfSplitting::new(cfg.m)?;
    let prec = BlockPreconditioner::new(sys, cfg)?;

    let mut q = q0.clone();
    f_relax_rhs(sys, &mut q, b, &cf)?;
    let mut r = all_at_once_residual(sys, &q, b)?;
    let r0 = r.norm();
    let mut report = SolverReport::start(r0);
    if r0 == 0.0 {
        report.finish(SolveStatus::Converged);
        report.elapsed_secs = clock.elapsed().as_secs_f64();
        return Ok((q, report));
    }
    if !r0.is_finite() {
        report.failure = Some("initial residual is not finite".into());
        report.finish(SolveStatus::Diverged);
        return Ok((q, report));
    }
    let nx = b.nx();
    let l = b.nvars();
    let m = cf.m();
    let mut status = SolveStatus::MaxIterations;
    for k in 1..=opts.maxit {
        let mut r_hat = SpaceTimeVector::zeros(l, nx, b.nt());
        r_hat
            .as_mut_slice()
            .par_chunks_mut(l * nx)
            .enumerate()
            .filter(|(n, _)| n % m == 0)
            .for_each(|(n, w)| sys.to_char(n, r.at(n), w));
        let e_hat = prec.apply(&r_hat)?;
        q.as_mut_slice()
            .par_chunks_mut(l * nx)
            .enumerate()
            .filter(|(n, _)| n % m == 0)
            .for_each(|(n, qn)| {
                let mut v = vec![0.0; l * nx];
                sys.from_char(n, e_hat.at(n), &mut v);
                for (a, d) in qn.iter_mut().zip(&v) {
                    *a += d;
                }
            });
        f_relax_rhs(sys, &mut q, b, &cf)?;
        r = all_at_once_residual(sys, &q, b)?;
        let rel = r.norm() / r0;
        report.residual_history.push(rel);
        report.iterations = k;
        if !rel.is_finite() || rel > opts.divergence {
            status = SolveStatus::Diverged;
            report.failure = Some(format!("relative residual reached {rel:e}"));
            break;
        }
        if rel <= opts.tol {
            status = SolveStatus::Converged;
            break;
        }
    }
    report.coarse_solve_fallbacks = prec.fallbacks();
    report.finish(status);
    report.elapsed_secs = clock.elapsed().as_secs_f64();
    Ok((q, report))
}
