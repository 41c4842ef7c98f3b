//! Nonlinear conservation laws `q_t + f(q)_x = 0` with Roe fluxes.

mod euler;
mod linear;
mod linearized;
mod step;
mod swe;

use serde::Serialize;

pub use euler::Euler;
pub use linear::LinearFlux;
pub use linearized::{linearized_step, scalar_char_step, FrozenLevel, LinearizedSystem};
pub use step::{frozen_dissipation_step, NonlinearStep};
pub use swe::ShallowWater;

use crate::error::Result;
use crate::small::{matvec, recompose, Mat, Vect, MAX_VARS};

/// Smoothing parameter of the entropy fix.
pub const ENTROPY_DELTA: f64 = 1e-6;

/// Eigen-decomposition `A = R diag(lambda) R^{-1}`, eigenvalues ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigensystem {
    pub lambda: Vect,
    pub r: Mat,
    pub rinv: Mat,
}

/// Roe linearization between two states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoeLinearization {
    pub a_star: Mat,
    pub eigen: Eigensystem,
}

impl RoeLinearization {
    /// `|A*| = R* fix(|Lambda*|) (R*)^{-1}`.
    pub fn abs_matrix(&self, l: usize, delta: f64) -> Mat {
        recompose(l, &self.eigen.r, &self.abs_eigenvalues(l, delta), &self.eigen.rinv)
    }

    pub fn abs_eigenvalues(&self, l: usize, delta: f64) -> Vect {
        let mut d = [0.0; MAX_VARS];
        for k in 0..l {
            d[k] = entropy_fix(self.eigen.lambda[k], delta);
        }
        d
    }
}

/// Physics of a hyperbolic conservation law.
pub trait FluxModel: Sync + Send {
    fn nvars(&self) -> usize;

    fn var_names(&self) -> &'static [&'static str];

    fn check_admissible(&self, q: &Vect) -> Result<()>;

    fn flux(&self, q: &Vect) -> Vect;

    fn jacobian(&self, q: &Vect) -> Mat;

    fn eigensystem(&self, q: &Vect) -> Result<Eigensystem>;

    fn roe(&self, ql: &Vect, qr: &Vect) -> Result<RoeLinearization>;
}

/// Harten's entropy fix: `|lambda|` away from zero, `(lambda^2 + delta^2)/(2 delta)` near it.
pub fn entropy_fix(lambda: f64, delta: f64) -> f64 {
    let a = lambda.abs();
    if a >= delta {
        a
    } else {
        (lambda * lambda + delta * delta) / (2.0 * delta)
    }
}

/// `(f(qL) + f(qR) - |A*| (qR - qL)) / 2`.
pub fn roe_flux<M: FluxModel + ?Sized>(model: &M, ql: &Vect, qr: &Vect) -> Result<Vect> {
    let l = model.nvars();
    let roe = model.roe(ql, qr)?;
    let abs_a = roe.abs_matrix(l, ENTROPY_DELTA);
    let fl = model.flux(ql);
    let fr = model.flux(qr);
    let mut dq = [0.0; MAX_VARS];
    for k in 0..l {
        dq[k] = qr[k] - ql[k];
    }
    let diss = matvec(l, &abs_a, &dq);
    let mut out = [0.0; MAX_VARS];
    for k in 0..l {
        out[k] = 0.5 * (fl[k] + fr[k] - diss[k]);
    }
    Ok(out)
}

/// Wave-sum form: `(f(qL) + f(qR))/2 - sum_p |lambda*_p| alpha_p r*_p / 2`.
pub fn roe_flux_waves<M: FluxModel + ?Sized>(model: &M, ql: &Vect, qr: &Vect) -> Result<Vect> {
    let l = model.nvars();
    let roe = model.roe(ql, qr)?;
    let fl = model.flux(ql);
    let fr = model.flux(qr);
    let mut dq = [0.0; MAX_VARS];
    for k in 0..l {
        dq[k] = qr[k] - ql[k];
    }
    let alpha = matvec(l, &roe.eigen.rinv, &dq);
    let mut out = [0.0; MAX_VARS];
    for k in 0..l {
        out[k] = 0.5 * (fl[k] + fr[k]);
    }
    for p in 0..l {
        let w = 0.5 * entropy_fix(roe.eigen.lambda[p], ENTROPY_DELTA) * alpha[p];
        for k in 0..l {
            out[k] -= w * roe.eigen.r[k][p];
        }
    }
    Ok(out)
}

/// Runtime-selected flux model.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    ShallowWater(ShallowWater),
    Euler(Euler),
    Linear(LinearFlux),
}

impl Model {
    fn inner(&self) -> &dyn FluxModel {
        match self {
            Model::ShallowWater(m) => m,
            Model::Euler(m) => m,
            Model::Linear(m) => m,
        }
    }
}

impl FluxModel for Model {
    fn nvars(&self) -> usize {
        self.inner().nvars()
    }

    fn var_names(&self) -> &'static [&'static str] {
        self.inner().var_names()
    }

    fn check_admissible(&self, q: &Vect) -> Result<()> {
        self.inner().check_admissible(q)
    }

    fn flux(&self, q: &Vect) -> Vect {
        self.inner().flux(q)
    }

    fn jacobian(&self, q: &Vect) -> Mat {
        self.inner().jacobian(q)
    }

    fn eigensystem(&self, q: &Vect) -> Result<Eigensystem> {
        self.inner().eigensystem(q)
    }

    fn roe(&self, ql: &Vect, qr: &Vect) -> Result<RoeLinearization> {
        self.inner().roe(ql, qr)
    }
}

impl From<ShallowWater> for Model {
    fn from(m: ShallowWater) -> Self {
        Model::ShallowWater(m)
    }
}

impl From<Euler> for Model {
    fn from(m: Euler) -> Self {
        Model::Euler(m)
    }
}

impl From<LinearFlux> for Model {
    fn from(m: LinearFlux) -> Self {
        Model::Linear(m)
    }
}
