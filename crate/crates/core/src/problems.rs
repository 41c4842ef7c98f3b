//! Catalog of benchmark problems: five acoustic media and four nonlinear setups.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::acoustics::{AcousticsStep, Material};
use crate::conslaw::{Euler, FluxModel, Model, NonlinearStep, ShallowWater};
use crate::error::{PintError, Result};
use crate::grid::{Boundary, SpaceTimeGrid, SpaceTimeVector};
use crate::small::scatter;

pub const DEFAULT_SEED: u64 = 20240901;

/// Number of time points and step size so that uniform steps tile `[0, t_final]`
/// with CFL number at most `cfl`.
pub fn tiled_time_grid(t_final: f64, h: f64, max_speed: f64, cfl: f64) -> Result<(usize, f64)> {
    if !(cfl > 0.0) || !(max_speed > 0.0) || !(t_final > 0.0) {
        return Err(PintError::InvalidParameter(format!(
            "cannot size a time grid from T = {t_final}, max speed = {max_speed}, CFL = {cfl}"
        )));
    }
    let dt_target = cfl * h / max_speed;
    let steps = (t_final / dt_target - 1e-10).ceil().max(1.0) as usize;
    Ok((steps + 1, t_final / steps as f64))
}

/// Acoustic media on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaterialId {
    /// Smoothly varying speed, constant impedance.
    SmoothSpeed = 1,
    /// Smoothly varying speed and impedance.
    Smooth = 2,
    /// Piecewise-constant slab.
    Slab = 3,
    /// Alternating impedance in 16 layers, unit speed.
    Layered = 4,
    /// 16 layers with random speed and impedance.
    RandomLayered = 5,
}

impl MaterialId {
    pub fn from_index(id: u32) -> Result<Self> {
        Ok(match id {
            1 => MaterialId::SmoothSpeed,
            2 => MaterialId::Smooth,
            3 => MaterialId::Slab,
            4 => MaterialId::Layered,
            5 => MaterialId::RandomLayered,
            _ => return Err(PintError::InvalidParameter(format!("unknown material {id}, expected 1-5"))),
        })
    }

    pub fn index(self) -> u32 {
        self as u32
    }
}

/// Random layer values `(c, Z)`, each uniform on `[0.5, 2.5]`.
pub fn random_layers(seed: u64) -> ([f64; 16], [f64; 16]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = [0.0; 16];
    let mut z = [0.0; 16];
    for v in c.iter_mut() {
        *v = rng.random_range(0.5..=2.5);
    }
    for v in z.iter_mut() {
        *v = rng.random_range(0.5..=2.5);
    }
    (c, z)
}

fn layer(x: f64) -> usize {
    ((16.0 * x).floor().max(0.0) as usize).min(15)
}

/// `(c0(x), Z0(x))` for a medium.
pub fn material_functions(id: MaterialId, seed: u64) -> impl Fn(f64) -> (f64, f64) {
    let layers = random_layers(seed);
    move |x| match id {
        MaterialId::SmoothSpeed => (1.0 + 0.5 * (10.0 * PI * x).sin(), 1.0),
        MaterialId::Smooth => (1.0 + 0.5 * (10.0 * PI * x).sin(), 1.0 + 0.25 * (10.0 * PI * x).cos()),
        MaterialId::Slab => {
            if x > 0.35 && x < 0.65 {
                (2.0, 2.0)
            } else {
                (0.6, 6.0)
            }
        }
        MaterialId::Layered => {
            let z = if (16.0 * x).floor() as i64 % 2 == 0 { 1.0 } else { 2.0 };
            (1.0, z)
        }
        MaterialId::RandomLayered => {
            let k = layer(x);
            (layers.0[k], layers.1[k])
        }
    }
}

/// `max_x c0(x)` used to size the time step.
pub fn material_max_speed(id: MaterialId, seed: u64) -> f64 {
    match id {
        MaterialId::SmoothSpeed | MaterialId::Smooth => 1.5,
        MaterialId::Slab => 2.0,
        MaterialId::Layered => 1.0,
        MaterialId::RandomLayered => random_layers(seed).0.iter().cloned().fold(0.0, f64::max),
    }
}

pub fn acoustics_material(id: MaterialId, grid: &SpaceTimeGrid, seed: u64) -> Result<Material> {
    let f = material_functions(id, seed);
    Material::sample(grid, |x| f(x).0, |x| f(x).1)
}

pub const ACOUSTICS_CFL: f64 = 0.85;
pub const ACOUSTICS_T: f64 = 1.0;

/// `(dt, nt)` for the acoustics runs: `dt = cfl h / max c0`, rounded so steps tile `[0, 1]`.
pub fn acoustics_defaults(id: MaterialId, nx: usize, cfl: f64, seed: u64) -> Result<(f64, usize)> {
    let (nt, dt) = tiled_time_grid(ACOUSTICS_T, 1.0 / nx as f64, material_max_speed(id, seed), cfl)?;
    Ok((dt, nt))
}

/// Initial pressure pulse.
pub fn acoustics_pressure(x: f64) -> f64 {
    if x > 0.4 && x < 0.6 {
        0.25 * (7.0 - 3.0 * (10.0 * PI * x - 4.0 * PI).cos())
    } else {
        1.0
    }
}

/// A fully specified acoustics run.
#[derive(Debug, Clone)]
pub struct AcousticsProblem {
    pub material_id: MaterialId,
    pub step: AcousticsStep,
    /// Discrete initial condition `(p, u)`.
    pub q0: Vec<f64>,
}

impl AcousticsProblem {
    /// `nt` overrides the CFL-derived number of time points.
    pub fn new(id: MaterialId, nx: usize, nt: Option<usize>, cfl: f64, seed: u64) -> Result<Self> {
        let (dt, nt_default) = acoustics_defaults(id, nx, cfl, seed)?;
        let grid = match nt {
            Some(nt) => SpaceTimeGrid::tiled(nx, 0.0, 1.0, ACOUSTICS_T, nt, Boundary::Periodic)?,
            None => SpaceTimeGrid::new(nx, 0.0, 1.0, nt_default, dt, Boundary::Periodic)?,
        };
        let material = acoustics_material(id, &grid, seed)?;
        let mut q0 = vec![0.0; 2 * nx];
        for i in 0..nx {
            q0[i] = acoustics_pressure(grid.x(i));
        }
        Ok(AcousticsProblem {
            material_id: id,
            step: AcousticsStep::new(grid, material)?,
            q0,
        })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        self.step.grid()
    }

    pub fn rhs(&self) -> Result<SpaceTimeVector> {
        let g = self.grid();
        SpaceTimeVector::initial_value_rhs(&self.q0, 2, g.nx(), g.nt())
    }
}

/// Space-time iterate with independent standard normal entries.
pub fn random_iterate(nvars: usize, nx: usize, nt: usize, seed: u64) -> SpaceTimeVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..nvars * nx * nt).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    SpaceTimeVector::from_vec(nvars, nx, nt, data).expect("length matches by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearProblemId {
    /// Shallow water, Gaussian depth perturbation, periodic.
    Idp,
    /// Euler, Gaussian density and pressure perturbation, periodic.
    Idpp,
    /// Shallow water dam break.
    DamBreak,
    /// Euler shock tube.
    Sod,
}

impl NonlinearProblemId {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "idp" => NonlinearProblemId::Idp,
            "idpp" => NonlinearProblemId::Idpp,
            "db" | "dam-break" | "dambreak" => NonlinearProblemId::DamBreak,
            "sod" => NonlinearProblemId::Sod,
            other => return Err(PintError::InvalidParameter(format!("unknown problem '{other}'"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            NonlinearProblemId::Idp => "idp",
            NonlinearProblemId::Idpp => "idpp",
            NonlinearProblemId::DamBreak => "dam-break",
            NonlinearProblemId::Sod => "sod",
        }
    }

    pub fn is_euler(self) -> bool {
        matches!(self, NonlinearProblemId::Idpp | NonlinearProblemId::Sod)
    }

    pub fn default_eps(self) -> f64 {
        match self {
            NonlinearProblemId::Idp => 0.1,
            NonlinearProblemId::Idpp => 0.2,
            NonlinearProblemId::DamBreak => 0.1,
            NonlinearProblemId::Sod => 0.125,
        }
    }
}

/// A nonlinear benchmark: model, domain, amplitude and CFL constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearProblem {
    pub id: NonlinearProblemId,
    pub eps: f64,
    pub model: Model,
    pub x_lo: f64,
    pub x_hi: f64,
    pub t_final: f64,
    pub cfl: f64,
    pub bc: Boundary,
}

impl NonlinearProblem {
    pub fn new(id: NonlinearProblemId, eps: f64) -> Result<Self> {
        if !eps.is_finite() {
            return Err(PintError::InvalidParameter(format!("amplitude must be finite, got {eps}")));
        }
        let (model, x_lo, x_hi, t_final, cfl, bc): (Model, _, _, _, _, _) = match id {
            NonlinearProblemId::Idp => (ShallowWater::default().into(), -5.0, 5.0, 10.0, 0.8, Boundary::Periodic),
            NonlinearProblemId::Idpp => (Euler::default().into(), -5.0, 5.0, 10.0, 0.7, Boundary::Periodic),
            NonlinearProblemId::DamBreak => {
                (ShallowWater::default().into(), -10.0, 10.0, 5.0, 0.8, Boundary::Extrapolate)
            }
            NonlinearProblemId::Sod => (Euler::default().into(), 0.0, 1.0, 0.25, 0.45, Boundary::Extrapolate),
        };
        let p = NonlinearProblem {
            id,
            eps,
            model,
            x_lo,
            x_hi,
            t_final,
            cfl,
            bc,
        };
        for x in [x_lo, 0.5 * (x_lo + x_hi), 2.5f64.clamp(x_lo, x_hi), x_hi] {
            p.model.check_admissible(&p.initial_state(x))?;
        }
        Ok(p)
    }

    fn gaussian(&self, x: f64) -> f64 {
        1.0 + self.eps * (-5.0 * (x - 2.5) * (x - 2.5)).exp()
    }

    /// Conserved initial state at `x`.
    pub fn initial_state(&self, x: f64) -> [f64; 3] {
        let gamma = Euler::default().gamma;
        match self.id {
            NonlinearProblemId::Idp => [self.gaussian(x), 0.0, 0.0],
            NonlinearProblemId::Idpp => {
                let rho = self.gaussian(x);
                [rho, 0.0, rho / (gamma - 1.0)]
            }
            NonlinearProblemId::DamBreak => [if x < 0.0 { 1.0 + self.eps } else { 1.0 }, 0.0, 0.0],
            NonlinearProblemId::Sod => {
                let rho = if x < 0.5 { 1.0 } else { 1.0 - self.eps };
                [rho, 0.0, rho / (gamma - 1.0)]
            }
        }
    }

    /// `max_s max_x |lambda_s(q(x, 0))|`.
    pub fn max_initial_speed(&self) -> f64 {
        match self.id {
            // u = 0 and p = rho, so every state has c = sqrt(gamma)
            NonlinearProblemId::Idpp | NonlinearProblemId::Sod => Euler::default().gamma.sqrt(),
            NonlinearProblemId::Idp | NonlinearProblemId::DamBreak => {
                let g = ShallowWater::default().g;
                (g * (1.0 + self.eps.max(0.0))).sqrt()
            }
        }
    }

    /// Mesh with `nx` cells; time points from the CFL constant unless `nt` is given.
    pub fn grid(&self, nx: usize, cfl: Option<f64>, nt: Option<usize>) -> Result<SpaceTimeGrid> {
        let nt = match nt {
            Some(nt) => nt,
            None => {
                let h = (self.x_hi - self.x_lo) / nx as f64;
                tiled_time_grid(self.t_final, h, self.max_initial_speed(), cfl.unwrap_or(self.cfl))?.0
            }
        };
        SpaceTimeGrid::tiled(nx, self.x_lo, self.x_hi, self.t_final, nt, self.bc)
    }

    /// Initial condition sampled at cell centres.
    pub fn discrete_initial(&self, grid: &SpaceTimeGrid) -> Vec<f64> {
        let l = self.model.nvars();
        let nx = grid.nx();
        let mut q0 = vec![0.0; l * nx];
        for i in 0..nx {
            scatter(l, nx, &mut q0, i, &self.initial_state(grid.x(i)));
        }
        q0
    }

    pub fn step(&self, grid: SpaceTimeGrid) -> NonlinearStep {
        NonlinearStep::new(self.model.clone(), grid)
    }
}
