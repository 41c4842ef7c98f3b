//! Linear acoustics in heterogeneous media.
//!
//! State variables are `(p, u)`. The characteristic variables are
//! `w1 = (-p/Z + u)/2` (speed `-c`) and `w2 = (p/Z + u)/2` (speed `+c`).

use crate::blockprec::CharSystem;
use crate::error::{check_len, PintError, Result};
use crate::grid::{SpaceTimeGrid, StepOperator};
use crate::small::Mat;
use crate::stencil::TridiagStencil;
use crate::transform::CharTransform;

/// Per-cell sound speed and impedance.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    c: Vec<f64>,
    z: Vec<f64>,
}

impl Material {
    pub fn new(c: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        check_len("impedance field", c.len(), z.len())?;
        if let Some(i) = c.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(PintError::InvalidParameter(format!(
                "sound speed must be positive, c[{i}] = {}",
                c[i]
            )));
        }
        if let Some(i) = z.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(PintError::InvalidParameter(format!(
                "impedance must be positive, Z[{i}] = {}",
                z[i]
            )));
        }
        Ok(Material { c, z })
    }

    /// Samples `c0(x)` and `Z0(x)` at cell centres.
    pub fn sample(grid: &SpaceTimeGrid, c0: impl Fn(f64) -> f64, z0: impl Fn(f64) -> f64) -> Result<Self> {
        let x = grid.cell_centers();
        Self::new(x.iter().map(|&x| c0(x)).collect(), x.iter().map(|&x| z0(x)).collect())
    }

    /// From bulk modulus and density: `c = sqrt(K/rho)`, `Z = sqrt(K rho)`.
    pub fn from_bulk_density(k: &[f64], rho: &[f64]) -> Result<Self> {
        check_len("density field", k.len(), rho.len())?;
        Self::new(
            k.iter().zip(rho).map(|(k, r)| (k / r).sqrt()).collect(),
            k.iter().zip(rho).map(|(k, r)| (k * r).sqrt()).collect(),
        )
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn nx(&self) -> usize {
        self.c.len()
    }

    pub fn max_speed(&self) -> f64 {
        self.c.iter().cloned().fold(0.0, f64::max)
    }
}

/// Godunov step for acoustics on a fixed space-time grid.
#[derive(Debug, Clone)]
pub struct AcousticsStep {
    grid: SpaceTimeGrid,
    material: Material,
    nu: Vec<f64>,
    transform: CharTransform,
    hat: [TridiagStencil; 4],
    tilde: [TridiagStencil; 2],
}

impl AcousticsStep {
    pub fn new(grid: SpaceTimeGrid, material: Material) -> Result<Self> {
        check_len("material cell count", grid.nx(), material.nx())?;
        let ratio = grid.ratio();
        let nu: Vec<f64> = material.c.iter().map(|c| c * ratio).collect();
        if let Some(i) = nu.iter().position(|&v| v > 1.0 + 1e-12) {
            return Err(PintError::InvalidParameter(format!(
                "CFL condition violated: c dt/h = {} in cell {i}",
                nu[i]
            )));
        }
        let transform = char_transform(&material);
        let hat = char_blocks(&material, &grid);
        let tilde = advection_blocks(&material, &grid)?;
        Ok(AcousticsStep {
            grid,
            material,
            nu,
            transform,
            hat,
            tilde,
        })
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn transform(&self) -> &CharTransform {
        &self.transform
    }

    /// Closed-form characteristic blocks `[Phi11, Phi12, Phi21, Phi22]`.
    pub fn hat_blocks(&self) -> &[TridiagStencil; 4] {
        &self.hat
    }

    pub fn tilde_blocks(&self) -> &[TridiagStencil; 2] {
        &self.tilde
    }

    /// One Godunov step on `(p, u)` stacked variable-major.
    pub fn godunov_step(&self, q: &[f64], out: &mut [f64]) {
        let nx = self.grid.nx();
        let bc = self.grid.bc();
        let (p, u) = q.split_at(nx);
        let z = &self.material.z;
        // alpha1/alpha2 at interface k, between cells k-1 and k
        let mut a1 = vec![0.0; nx + 1];
        let mut a2 = vec![0.0; nx + 1];
        for k in 0..=nx {
            let l = bc.cell(k as isize - 1, nx);
            let r = bc.cell(k as isize, nx);
            let dp = p[r] - p[l];
            let du = u[r] - u[l];
            let zs = z[l] + z[r];
            a1[k] = (-dp + z[r] * du) / zs;
            a2[k] = (dp + z[l] * du) / zs;
        }
        let (po, uo) = out.split_at_mut(nx);
        for i in 0..nx {
            let nu = self.nu[i];
            po[i] = p[i] - nu * z[i] * (a2[i] + a1[i + 1]);
            uo[i] = u[i] - nu * (a2[i] - a1[i + 1]);
        }
    }

    pub fn to_characteristic(&self, v: &[f64], w: &mut [f64]) {
        self.transform.to_char(v, w);
    }

    pub fn from_characteristic(&self, w: &[f64], v: &mut [f64]) {
        self.transform.from_char(w, v);
    }
}

fn char_transform(material: &Material) -> CharTransform {
    let mut r = Vec::with_capacity(material.nx());
    let mut rinv = Vec::with_capacity(material.nx());
    for &z in &material.z {
        let m: Mat = [[-z, z, 0.0], [1.0, 1.0, 0.0], [0.0; 3]];
        let h = 0.5 / z;
        let mi: Mat = [[-h, 0.5, 0.0], [h, 0.5, 0.0], [0.0; 3]];
        r.push(m);
        rinv.push(mi);
    }
    CharTransform::new(2, r, rinv).expect("equal lengths by construction")
}

/// Closed-form characteristic-variable blocks `[Phi11, Phi12, Phi21, Phi22]` of the Godunov step.
pub fn char_blocks(material: &Material, grid: &SpaceTimeGrid) -> [TridiagStencil; 4] {
    let nx = grid.nx();
    let bc = grid.bc();
    let ratio = grid.ratio();
    let z = &material.z;
    let mut b11 = TridiagStencil::zeros(nx);
    let mut b12 = TridiagStencil::zeros(nx);
    let mut b21 = TridiagStencil::zeros(nx);
    let mut b22 = TridiagStencil::zeros(nx);
    for i in 0..nx {
        let nu = material.c[i] * ratio;
        let zp = z[bc.cell(i as isize + 1, nx)];
        let zm = z[bc.cell(i as isize - 1, nx)];
        let dp = (zp - z[i]) / (zp + z[i]);
        let dm = (zm - z[i]) / (zm + z[i]);
        b11.diag[i] = 1.0 - nu;
        b11.upper[i] = nu * (1.0 + dp);
        b22.diag[i] = 1.0 - nu;
        b22.lower[i] = nu * (1.0 + dm);
        b12.diag[i] = -nu * dp;
        b21.diag[i] = -nu * dm;
    }
    [b11, b12, b21, b22]
}

/// Upwind advection approximations `[Phi~11, Phi~22]` of the diagonal characteristic blocks.
pub fn advection_blocks(material: &Material, grid: &SpaceTimeGrid) -> Result<[TridiagStencil; 2]> {
    if let Some(i) = material.c.iter().position(|&c| c <= 0.0) {
        return Err(PintError::InvalidParameter(format!(
            "advection blocks need c > 0, got c[{i}] = {}",
            material.c[i]
        )));
    }
    let nx = grid.nx();
    let ratio = grid.ratio();
    let mut left = TridiagStencil::zeros(nx);
    let mut right = TridiagStencil::zeros(nx);
    for i in 0..nx {
        let nu = material.c[i] * ratio;
        left.diag[i] = 1.0 - nu;
        left.upper[i] = nu;
        right.diag[i] = 1.0 - nu;
        right.lower[i] = nu;
    }
    Ok([left, right])
}

impl StepOperator for AcousticsStep {
    fn block_len(&self) -> usize {
        2 * self.grid.nx()
    }

    fn step(&self, _n: usize, input: &[f64], output: &mut [f64]) -> Result<()> {
        self.godunov_step(input, output);
        Ok(())
    }
}

impl CharSystem for AcousticsStep {
    fn nvars(&self) -> usize {
        2
    }

    fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    fn to_char(&self, _n: usize, v: &[f64], w: &mut [f64]) {
        self.transform.to_char(v, w);
    }

    fn from_char(&self, _n: usize, w: &[f64], v: &mut [f64]) {
        self.transform.from_char(w, v);
    }

    fn char_block(&self, _n: usize, s: usize, j: usize, e: &[f64], out: &mut [f64]) {
        self.hat[2 * s + j].apply(self.grid.bc(), e, out);
    }

    fn char_row_partial(&self, _n: usize, s: usize, upto: usize, e: &[f64], out: &mut [f64]) {
        let nx = self.grid.nx();
        out.fill(0.0);
        for j in 0..upto.min(2) {
            self.hat[2 * s + j].apply_add(self.grid.bc(), &e[j * nx..(j + 1) * nx], out);
        }
    }

    fn approx_block(&self, _n: usize, s: usize, e: &[f64], out: &mut [f64]) {
        self.tilde[s].apply(self.grid.bc(), e, out);
    }

    fn wavespeed(&self, _n: usize, s: usize, out: &mut [f64]) {
        let sign = if s == 0 { -1.0 } else { 1.0 };
        for (o, c) in out.iter_mut().zip(&self.material.c) {
            *o = sign * c;
        }
    }

    fn time_invariant(&self) -> bool {
        true
    }

    fn conservative(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    fn unit_grid(nx: usize, ratio: f64) -> SpaceTimeGrid {
        let h = 1.0 / nx as f64;
        SpaceTimeGrid::new(nx, 0.0, 1.0, 2, ratio * h, Boundary::Periodic).unwrap()
    }

    #[test]
    fn hand_evaluated_pulse() {
        let g = unit_grid(4, 0.5);
        let m = Material::new(vec![1.0; 4], vec![1.0; 4]).unwrap();
        let a = AcousticsStep::new(g, m).unwrap();
        let q = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let mut out = [0.0; 8];
        a.godunov_step(&q, &mut out);
        let want = [0.5, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0, -0.25];
        for (o, w) in out.iter().zip(&want) {
            assert!((o - w).abs() < 1e-15, "{out:?}");
        }
    }

    #[test]
    fn constant_state_is_fixed() {
        let g = unit_grid(8, 0.5);
        let m = Material::new((0..8).map(|i| 1.0 + 0.1 * i as f64).collect(), (0..8).map(|i| 2.0 - 0.1 * i as f64).collect()).unwrap();
        let a = AcousticsStep::new(g, m).unwrap();
        let q = [vec![1.0; 8], vec![0.0; 8]].concat();
        let mut out = vec![0.0; 16];
        a.godunov_step(&q, &mut out);
        assert_eq!(out, q);
    }

    #[test]
    fn characteristic_of_pure_velocity() {
        let g = unit_grid(4, 0.5);
        let a = AcousticsStep::new(g, Material::new(vec![1.0; 4], vec![1.0; 4]).unwrap()).unwrap();
        let v = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        let mut w = [0.0; 8];
        a.to_characteristic(&v, &mut w);
        assert_eq!(w, [0.5; 8]);
    }

    #[test]
    fn rejects_cfl_violation_and_bad_material() {
        let g = unit_grid(4, 1.5);
        assert!(AcousticsStep::new(g, Material::new(vec![1.0; 4], vec![1.0; 4]).unwrap()).is_err());
        assert!(Material::new(vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Material::new(vec![1.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn unit_cfl_right_block_is_shift() {
        let g = unit_grid(5, 1.0);
        let m = Material::new(vec![1.0; 5], vec![1.0; 5]).unwrap();
        let [_, right] = advection_blocks(&m, &g).unwrap();
        let u = [1.0, 2.0, 3.0, 4.0, 5.0];
        let mut out = [0.0; 5];
        right.apply(Boundary::Periodic, &u, &mut out);
        assert_eq!(out, [5.0, 1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn bulk_density_construction() {
        let m = Material::from_bulk_density(&[4.0], &[1.0]).unwrap();
        assert_eq!(m.c(), &[2.0]);
        assert_eq!(m.z(), &[2.0]);
    }
}
