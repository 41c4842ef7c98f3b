//! Space-time grids, block vector layout, CF-splitting and the all-at-once
//! residual machinery shared by every solver in the crate.
//!
//! Storage is time-major: time point `n` owns one contiguous block of
//! `nvars * nx` values, and inside a block the values are variable-major
//! (all cells of variable 0, then all cells of variable 1, ...).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, PintError, Result};

/// Spatial boundary treatment, shared by every operator on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    /// Ghost cells copy the adjacent boundary cell.
    Extrapolate,
}

impl Boundary {
    /// Maps a possibly out-of-range cell index onto the mesh.
    #[inline]
    pub fn cell(self, i: isize, nx: usize) -> usize {
        match self {
            Boundary::Periodic => i.rem_euclid(nx as isize) as usize,
            Boundary::Extrapolate => i.clamp(0, nx as isize - 1) as usize,
        }
    }
}

/// Uniform finite-volume mesh times a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    nx: usize,
    x_lo: f64,
    x_hi: f64,
    nt: usize,
    dt: f64,
    bc: Boundary,
}

impl SpaceTimeGrid {
    pub fn new(nx: usize, x_lo: f64, x_hi: f64, nt: usize, dt: f64, bc: Boundary) -> Result<Self> {
        if nx < 3 {
            return Err(PintError::InvalidParameter(format!("nx must be >= 3, got {nx}")));
        }
        if nt < 2 {
            return Err(PintError::InvalidParameter(format!("nt must be >= 2, got {nt}")));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(PintError::InvalidParameter(format!(
                "empty spatial domain ({x_lo}, {x_hi})"
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(PintError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        Ok(SpaceTimeGrid {
            nx,
            x_lo,
            x_hi,
            nt,
            dt,
            bc,
        })
    }

    /// Grid whose `nt` points tile `[0, t_final]` exactly.
    pub fn tiled(
        nx: usize,
        x_lo: f64,
        x_hi: f64,
        t_final: f64,
        nt: usize,
        bc: Boundary,
    ) -> Result<Self> {
        if nt < 2 {
            return Err(PintError::InvalidParameter(format!("nt must be >= 2, got {nt}")));
        }
        Self::new(nx, x_lo, x_hi, nt, t_final / (nt - 1) as f64, bc)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn bc(&self) -> Boundary {
        self.bc
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.nx as f64
    }

    pub fn t_final(&self) -> f64 {
        (self.nt - 1) as f64 * self.dt
    }

    /// `dt / h`.
    pub fn ratio(&self) -> f64 {
        self.dt / self.h()
    }

    /// Centre of cell `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_lo + (i as f64 + 0.5) * self.h()
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    /// Same spatial mesh and boundary, different time grid.
    pub fn with_time(&self, nt: usize, dt: f64) -> Result<Self> {
        Self::new(self.nx, self.x_lo, self.x_hi, nt, dt, self.bc)
    }
}

/// Coarse/fine partition of the time grid: every `m`th point is a C-point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfSplitting {
    m: usize,
}

impl CfSplitting {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(PintError::InvalidParameter(format!(
                "coarsening factor must be > 1, got {m}"
            )));
        }
        Ok(CfSplitting { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_c_point(&self, n: usize) -> bool {
        n % self.m == 0
    }

    pub fn num_c_points(&self, nt: usize) -> usize {
        if nt == 0 {
            0
        } else {
            (nt - 1) / self.m + 1
        }
    }

    pub fn c_points(&self, nt: usize) -> impl Iterator<Item = usize> {
        (0..nt).step_by(self.m)
    }
}

/// A sequence of `nt` block fields, each holding `nvars` variables on `nx` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeVector {
    nvars: usize,
    nx: usize,
    nt: usize,
    data: Vec<f64>,
}

impl SpaceTimeVector {
    pub fn zeros(nvars: usize, nx: usize, nt: usize) -> Self {
        SpaceTimeVector {
            nvars,
            nx,
            nt,
            data: vec![0.0; nvars * nx * nt],
        }
    }

    pub fn from_vec(nvars: usize, nx: usize, nt: usize, data: Vec<f64>) -> Result<Self> {
        check_len("space-time vector storage", nvars * nx * nt, data.len())?;
        Ok(SpaceTimeVector {
            nvars,
            nx,
            nt,
            data,
        })
    }

    /// Builds a vector from `f(var, cell, time)`.
    pub fn from_fn(
        nvars: usize,
        nx: usize,
        nt: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut v = Self::zeros(nvars, nx, nt);
        for n in 0..nt {
            for s in 0..nvars {
                for i in 0..nx {
                    v.data[(n * nvars + s) * nx + i] = f(s, i, n);
                }
            }
        }
        v
    }

    /// All-at-once right-hand side `(q0, 0, ..., 0)`.
    pub fn initial_value_rhs(q0: &[f64], nvars: usize, nx: usize, nt: usize) -> Result<Self> {
        check_len("initial block", nvars * nx, q0.len())?;
        let mut b = Self::zeros(nvars, nx, nt);
        b.at_mut(0).copy_from_slice(q0);
        Ok(b)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn block_len(&self) -> usize {
        self.nvars * self.nx
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, var: usize, cell: usize, time: usize) -> usize {
        debug_assert!(var < self.nvars && cell < self.nx && time < self.nt);
        (time * self.nvars + var) * self.nx + cell
    }

    /// Inverse of [`index`](Self::index): `(var, cell, time)`.
    #[inline]
    pub fn unflatten(&self, k: usize) -> (usize, usize, usize) {
        let cell = k % self.nx;
        let rest = k / self.nx;
        (rest % self.nvars, cell, rest / self.nvars)
    }

    pub fn get(&self, var: usize, cell: usize, time: usize) -> f64 {
        self.data[self.index(var, cell, time)]
    }

    pub fn set(&mut self, var: usize, cell: usize, time: usize, value: f64) {
        let k = self.index(var, cell, time);
        self.data[k] = value;
    }

    /// Block field at time `n`.
    pub fn at(&self, n: usize) -> &[f64] {
        let bl = self.block_len();
        &self.data[n * bl..(n + 1) * bl]
    }

    pub fn at_mut(&mut self, n: usize) -> &mut [f64] {
        let bl = self.block_len();
        &mut self.data[n * bl..(n + 1) * bl]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Same shape (variables, cells, time points) as `other`.
    pub fn conforms(&self, other: &SpaceTimeVector) -> Result<()> {
        check_len("variable count", self.nvars, other.nvars)?;
        check_len("cell count", self.nx, other.nx)?;
        check_len("time point count", self.nt, other.nt)
    }

    /// Euclidean norm, summed in index order.
    pub fn norm(&self) -> f64 {
        l2_norm(&self.data)
    }

    pub fn add_assign(&mut self, other: &SpaceTimeVector) -> Result<()> {
        self.conforms(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Deterministic Euclidean norm (index-ascending summation).
pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc + x * x).sqrt()
}

/// One-step map `q^{n+1} = Phi^n(q^n)` on block fields of length `block_len`.
///
/// Linear operators never fail; nonlinear ones report inadmissible states.
pub trait StepOperator: Sync {
    fn block_len(&self) -> usize;

    /// Applies the step leaving time point `n`.
    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()>;
}

impl<T: StepOperator + ?Sized> StepOperator for &T {
    fn block_len(&self) -> usize {
        (**self).block_len()
    }

    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        (**self).step(n, input, output)
    }
}

/// Adapts a closure into a [`StepOperator`].
pub struct FnStep<F> {
    len: usize,
    f: F,
}

impl<F> FnStep<F>
where
    F: Fn(usize, &[f64], &mut [f64]) + Sync,
{
    pub fn new(len: usize, f: F) -> Self {
        FnStep { len, f }
    }
}

impl<F> StepOperator for FnStep<F>
where
    F: Fn(usize, &[f64], &mut [f64]) + Sync,
{
    fn block_len(&self) -> usize {
        self.len
    }

    fn step(&self, n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        (self.f)(n, input, output);
        Ok(())
    }
}

fn check_conform<P: StepOperator + ?Sized>(phi: &P, q: &SpaceTimeVector) -> Result<()> {
    check_len("step operator block length", phi.block_len(), q.block_len())
}

/// `r = b - A(q)` with `r^0 = b^0 - q^0` and `r^{n+1} = b^{n+1} - q^{n+1} + Phi(q^n)`.
pub fn all_at_once_residual<P: StepOperator + ?Sized>(
    phi: &P,
    q: &SpaceTimeVector,
    b: &SpaceTimeVector,
) -> Result<SpaceTimeVector> {
    q.conforms(b)?;
    check_conform(phi, q)?;
    let bl = q.block_len();
    let mut r = SpaceTimeVector::zeros(q.nvars, q.nx, q.nt);
    r.data
        .par_chunks_mut(bl)
        .enumerate()
        .try_for_each(|(n, rn)| -> Result<()> {
            if n == 0 {
                rn.fill(0.0);
            } else {
                phi.step(n - 1, q.at(n - 1), rn)?;
            }
            for ((r, b), q) in rn.iter_mut().zip(b.at(n)).zip(q.at(n)) {
                *r += b - q;
            }
            Ok(())
        })?;
    Ok(r)
}

/// All-at-once residual at C-points only, injected onto the coarse time grid.
pub fn c_point_residual<P: StepOperator + ?Sized>(
    phi: &P,
    q: &SpaceTimeVector,
    b: &SpaceTimeVector,
    cf: &CfSplitting,
) -> Result<SpaceTimeVector> {
    q.conforms(b)?;
    check_conform(phi, q)?;
    let bl = q.block_len();
    let m = cf.m();
    let mut r = SpaceTimeVector::zeros(q.nvars, q.nx, cf.num_c_points(q.nt));
    r.data
        .par_chunks_mut(bl)
        .enumerate()
        .try_for_each(|(j, rj)| -> Result<()> {
            let n = j * m;
            if n == 0 {
                rj.fill(0.0);
            } else {
                phi.step(n - 1, q.at(n - 1), rj)?;
            }
            for ((r, b), q) in rj.iter_mut().zip(b.at(n)).zip(q.at(n)) {
                *r += b - q;
            }
            Ok(())
        })?;
    Ok(r)
}

/// F-relaxation for the homogeneous system (`b` zero at F-points).
pub fn f_relax<P: StepOperator + ?Sized>(
    phi: &P,
    q: &mut SpaceTimeVector,
    cf: &CfSplitting,
) -> Result<()> {
    f_relax_impl(phi, q, None, cf)
}

/// F-relaxation with right-hand side: `q^{n+1} = Phi(q^n) + b^{n+1}` at F-points.
pub fn f_relax_rhs<P: StepOperator + ?Sized>(
    phi: &P,
    q: &mut SpaceTimeVector,
    b: &SpaceTimeVector,
    cf: &CfSplitting,
) -> Result<()> {
    q.conforms(b)?;
    f_relax_impl(phi, q, Some(b), cf)
}

fn f_relax_impl<P: StepOperator + ?Sized>(
    phi: &P,
    q: &mut SpaceTimeVector,
    b: Option<&SpaceTimeVector>,
    cf: &CfSplitting,
) -> Result<()> {
    check_conform(phi, q)?;
    let bl = q.block_len();
    let m = cf.m();
    q.data
        .par_chunks_mut(m * bl)
        .enumerate()
        .try_for_each(|(j, chunk)| -> Result<()> {
            let n0 = j * m;
            let steps = chunk.len() / bl;
            for k in 1..steps {
                let (done, rest) = chunk.split_at_mut(k * bl);
                let out = &mut rest[..bl];
                phi.step(n0 + k - 1, &done[(k - 1) * bl..], out)?;
                if let Some(b) = b {
                    for (o, bv) in out.iter_mut().zip(b.at(n0 + k)) {
                        *o += bv;
                    }
                }
            }
            Ok(())
        })
}

/// C-relaxation: `q^{jm} = Phi(q^{jm-1}) + b^{jm}` for every C-point but the first.
pub fn c_relax_rhs<P: StepOperator + ?Sized>(
    phi: &P,
    q: &mut SpaceTimeVector,
    b: &SpaceTimeVector,
    cf: &CfSplitting,
) -> Result<()> {
    q.conforms(b)?;
    check_conform(phi, q)?;
    let bl = q.block_len();
    let m = cf.m();
    // Chunk j starts at F-point jm+1; its last entry is C-point (j+1)m.
    let (_, tail) = q.data.split_at_mut(bl);
    tail.par_chunks_mut(m * bl)
        .enumerate()
        .try_for_each(|(j, chunk)| -> Result<()> {
            let steps = chunk.len() / bl;
            if steps < m {
                return Ok(());
            }
            let (prev, cpt) = chunk.split_at_mut((m - 1) * bl);
            let n_prev = j * m + m - 1;
            phi.step(n_prev, &prev[(m - 2) * bl..], cpt)?;
            for (o, bv) in cpt.iter_mut().zip(b.at(n_prev + 1)) {
                *o += bv;
            }
            Ok(())
        })
}

/// Sequential forward substitution for the block bidiagonal system `A q = b`.
pub fn forward_solve<P: StepOperator + ?Sized>(
    phi: &P,
    b: &SpaceTimeVector,
) -> Result<SpaceTimeVector> {
    check_conform(phi, b)?;
    let bl = b.block_len();
    let mut q = b.clone();
    for n in 1..b.nt {
        let (done, rest) = q.data.split_at_mut(n * bl);
        let out = &mut rest[..bl];
        phi.step(n - 1, &done[(n - 1) * bl..], out)?;
        for (o, bv) in out.iter_mut().zip(b.at(n)) {
            *o += bv;
        }
    }
    Ok(q)
}

/// `||r|| / r0_norm`.
pub fn relative_residual_norm(r: &SpaceTimeVector, r0_norm: f64) -> Result<f64> {
    if r0_norm == 0.0 {
        return Err(PintError::AlreadyConverged);
    }
    if !(r0_norm > 0.0) || !r0_norm.is_finite() {
        return Err(PintError::InvalidParameter(format!(
            "reference norm must be positive and finite, got {r0_norm}"
        )));
    }
    Ok(r.norm() / r0_norm)
}
