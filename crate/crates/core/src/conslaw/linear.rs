use serde::Serialize;

use super::{Eigensystem, FluxModel, RoeLinearization};
use crate::error::{PintError, Result};
use crate::small::{invert, matvec, recompose, Mat, Vect};

/// Constant-coefficient flux `f(q) = A q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFlux {
    nvars: usize,
    a: Mat,
    #[serde(skip)]
    eigen: Eigensystem,
}

impl LinearFlux {
    /// Builds `A = R diag(lambda) R^{-1}`; eigenvalues must be ascending.
    pub fn from_eigen(nvars: usize, lambda: Vect, r: Mat) -> Result<Self> {
        if !(1..=3).contains(&nvars) {
            return Err(PintError::InvalidParameter(format!("unsupported system size {nvars}")));
        }
        if lambda[..nvars].windows(2).any(|w| w[0] > w[1]) {
            return Err(PintError::InvalidParameter("eigenvalues must be ascending".into()));
        }
        let rinv = invert(nvars, &r)
            .ok_or_else(|| PintError::InvalidParameter("singular eigenvector matrix".into()))?;
        let a = recompose(nvars, &r, &lambda, &rinv);
        Ok(LinearFlux {
            nvars,
            a,
            eigen: Eigensystem { lambda, r, rinv },
        })
    }

    /// Constant-coefficient acoustics with bulk modulus `k` and density `rho`, state `(p, u)`.
    pub fn acoustics(k: f64, rho: f64) -> Result<Self> {
        let z = (k * rho).sqrt();
        let c = (k / rho).sqrt();
        Self::from_eigen(2, [-c, c, 0.0], [[-z, z, 0.0], [1.0, 1.0, 0.0], [0.0; 3]])
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }
}

impl FluxModel for LinearFlux {
    fn nvars(&self) -> usize {
        self.nvars
    }

    fn var_names(&self) -> &'static [&'static str] {
        static NAMES: [&str; 3] = ["q1", "q2", "q3"];
        &NAMES[..self.nvars]
    }

    fn check_admissible(&self, q: &Vect) -> Result<()> {
        if q[..self.nvars].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(PintError::inadmissible("non-finite state"))
        }
    }

    fn flux(&self, q: &Vect) -> Vect {
        matvec(self.nvars, &self.a, q)
    }

    fn jacobian(&self, _q: &Vect) -> Mat {
        self.a
    }

    fn eigensystem(&self, q: &Vect) -> Result<Eigensystem> {
        self.check_admissible(q)?;
        Ok(self.eigen)
    }

    fn roe(&self, ql: &Vect, qr: &Vect) -> Result<RoeLinearization> {
        self.check_admissible(ql)?;
        self.check_admissible(qr)?;
        Ok(RoeLinearization {
            a_star: self.a,
            eigen: self.eigen,
        })
    }
}
