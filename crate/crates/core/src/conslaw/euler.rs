use serde::Serialize;

use super::{Eigensystem, FluxModel, RoeLinearization};
use crate::error::{PintError, Result};
use crate::small::{Mat, Vect};

/// Compressible Euler equations in `(rho, rho u, E)` for an ideal gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Euler {
    pub gamma: f64,
}

impl Default for Euler {
    fn default() -> Self {
        Euler { gamma: 1.4 }
    }
}

impl Euler {
    pub fn pressure(&self, q: &Vect) -> f64 {
        (self.gamma - 1.0) * (q[2] - 0.5 * q[1] * q[1] / q[0])
    }

    /// Conserved state from `(rho, u, p)`.
    pub fn conserved(&self, rho: f64, u: f64, p: f64) -> Vect {
        [rho, rho * u, p / (self.gamma - 1.0) + 0.5 * rho * u * u]
    }

    fn jacobian_at(&self, u: f64, h: f64) -> Mat {
        let g = self.gamma;
        [
            [0.0, 1.0, 0.0],
            [0.5 * (g - 3.0) * u * u, (3.0 - g) * u, g - 1.0],
            [0.5 * (g - 1.0) * u * u * u - u * h, h - (g - 1.0) * u * u, g * u],
        ]
    }

    fn eigen_at(&self, u: f64, h: f64, c: f64) -> Eigensystem {
        let gm = self.gamma - 1.0;
        let s = gm / (2.0 * c * c);
        let cg = c / gm;
        Eigensystem {
            lambda: [u - c, u, u + c],
            r: [
                [1.0, 1.0, 1.0],
                [u - c, u, u + c],
                [h - u * c, 0.5 * u * u, h + u * c],
            ],
            rinv: [
                [s * (h + cg * (u - c)), s * (-u - cg), s],
                [s * (4.0 * c * c / gm - 2.0 * h), s * 2.0 * u, -2.0 * s],
                [s * (h - cg * (u + c)), s * (-u + cg), s],
            ],
        }
    }
}

impl FluxModel for Euler {
    fn nvars(&self) -> usize {
        3
    }

    fn var_names(&self) -> &'static [&'static str] {
        &["rho", "rho_u", "E"]
    }

    fn check_admissible(&self, q: &Vect) -> Result<()> {
        if !(q[0] > 0.0) || !q.iter().all(|v| v.is_finite()) {
            return Err(PintError::inadmissible(format!("non-positive density rho = {}", q[0])));
        }
        let p = self.pressure(q);
        if !(p > 0.0) {
            return Err(PintError::inadmissible(format!("non-positive pressure p = {p}")));
        }
        Ok(())
    }

    fn flux(&self, q: &Vect) -> Vect {
        let u = q[1] / q[0];
        let p = self.pressure(q);
        [q[1], q[1] * u + p, (q[2] + p) * u]
    }

    fn jacobian(&self, q: &Vect) -> Mat {
        let u = q[1] / q[0];
        let h = (q[2] + self.pressure(q)) / q[0];
        self.jacobian_at(u, h)
    }

    fn eigensystem(&self, q: &Vect) -> Result<Eigensystem> {
        self.check_admissible(q)?;
        let u = q[1] / q[0];
        let p = self.pressure(q);
        let h = (q[2] + p) / q[0];
        let c = (self.gamma * p / q[0]).sqrt();
        Ok(self.eigen_at(u, h, c))
    }

    fn roe(&self, ql: &Vect, qr: &Vect) -> Result<RoeLinearization> {
        self.check_admissible(ql)?;
        self.check_admissible(qr)?;
        let (sl, sr) = (ql[0].sqrt(), qr[0].sqrt());
        let hl = (ql[2] + self.pressure(ql)) / ql[0];
        let hr = (qr[2] + self.pressure(qr)) / qr[0];
        let u = (ql[1] / sl + qr[1] / sr) / (sl + sr);
        let h = (sl * hl + sr * hr) / (sl + sr);
        let c2 = (self.gamma - 1.0) * (h - 0.5 * u * u);
        if !(c2 > 0.0) {
            return Err(PintError::inadmissible(format!(
                "Roe-averaged sound speed squared is {c2}"
            )));
        }
        Ok(RoeLinearization {
            a_star: self.jacobian_at(u, h),
            eigen: self.eigen_at(u, h, c2.sqrt()),
        })
    }
}
