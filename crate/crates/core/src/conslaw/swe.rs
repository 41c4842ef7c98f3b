use serde::Serialize;

use super::{Eigensystem, FluxModel, RoeLinearization};
use crate::error::{PintError, Result};
use crate::small::{Mat, Vect};

/// Shallow water equations in `(h, hu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShallowWater {
    pub g: f64,
}

impl Default for ShallowWater {
    fn default() -> Self {
        ShallowWater { g: 1.0 }
    }
}

impl ShallowWater {
    fn jacobian_at(&self, h: f64, u: f64) -> Mat {
        [[0.0, 1.0, 0.0], [-u * u + self.g * h, 2.0 * u, 0.0], [0.0; 3]]
    }

    fn eigen_at(&self, h: f64, u: f64) -> Eigensystem {
        let c = (self.g * h).sqrt();
        let (l1, l2) = (u - c, u + c);
        let d = 1.0 / (l2 - l1);
        Eigensystem {
            lambda: [l1, l2, 0.0],
            r: [[1.0, 1.0, 0.0], [l1, l2, 0.0], [0.0; 3]],
            rinv: [[l2 * d, -d, 0.0], [-l1 * d, d, 0.0], [0.0; 3]],
        }
    }
}

impl FluxModel for ShallowWater {
    fn nvars(&self) -> usize {
        2
    }

    fn var_names(&self) -> &'static [&'static str] {
        &["h", "hu"]
    }

    fn check_admissible(&self, q: &Vect) -> Result<()> {
        if q[0] > 0.0 && q[0].is_finite() && q[1].is_finite() {
            Ok(())
        } else {
            Err(PintError::inadmissible(format!("non-positive depth h = {}", q[0])))
        }
    }

    fn flux(&self, q: &Vect) -> Vect {
        let u = q[1] / q[0];
        [q[1], q[1] * u + 0.5 * self.g * q[0] * q[0], 0.0]
    }

    fn jacobian(&self, q: &Vect) -> Mat {
        self.jacobian_at(q[0], q[1] / q[0])
    }

    fn eigensystem(&self, q: &Vect) -> Result<Eigensystem> {
        self.check_admissible(q)?;
        Ok(self.eigen_at(q[0], q[1] / q[0]))
    }

    fn roe(&self, ql: &Vect, qr: &Vect) -> Result<RoeLinearization> {
        self.check_admissible(ql)?;
        self.check_admissible(qr)?;
        let (sl, sr) = (ql[0].sqrt(), qr[0].sqrt());
        let u = (ql[1] / sl + qr[1] / sr) / (sl + sr);
        let h = 0.5 * (ql[0] + qr[0]);
        Ok(RoeLinearization {
            a_star: self.jacobian_at(h, u),
            eigen: self.eigen_at(h, u),
        })
    }
}
