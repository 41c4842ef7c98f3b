//! Dense assembly of the characteristic triple product for acoustics.

use super::{dense_of, matmul, random_vec, rng};
use hyperpint::acoustics::{char_blocks, AcousticsStep, Material};
use hyperpint::stencil::TridiagStencil;
use hyperpint::{Boundary, SpaceTimeGrid};

pub fn random_material(seed: u64, nx: usize) -> Material {
    let mut g = rng(seed);
    Material::new(random_vec(&mut g, nx, 0.5, 2.0), random_vec(&mut g, nx, 0.3, 3.0)).unwrap()
}

fn block_dense(s: &TridiagStencil) -> Vec<Vec<f64>> {
    s.to_dense(Boundary::Periodic)
}

/// Triple product `R^{-1} Phi R` assembled densely, compared with the closed-form blocks.
pub fn lemma_identity_error(mat: &Material, g: &SpaceTimeGrid) -> f64 {
    let nx = g.nx();
    let step = AcousticsStep::new(g.clone(), mat.clone()).unwrap();
    let phi = dense_of(2 * nx, |x, y| step.godunov_step(x, y));
    let r = dense_of(2 * nx, |x, y| step.from_characteristic(x, y));
    let rinv = dense_of(2 * nx, |x, y| step.to_characteristic(x, y));
    let hat = matmul(&rinv, &matmul(&phi, &r));
    let blocks = char_blocks(mat, g);
    let mut err: f64 = 0.0;
    for (b, (bi, bj)) in blocks.iter().zip([(0, 0), (0, 1), (1, 0), (1, 1)]) {
        let d = block_dense(b);
        for i in 0..nx {
            for j in 0..nx {
                err = err.max((hat[bi * nx + i][bj * nx + j] - d[i][j]).abs());
            }
        }
    }
    err
}
