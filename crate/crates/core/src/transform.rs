use crate::error::{check_len, Result};
use crate::small::{gather, matvec, scatter, Mat};

/// Per-cell eigenvector matrices `R_i` and `R_i^{-1}` over a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct CharTransform {
    nvars: usize,
    r: Vec<Mat>,
    rinv: Vec<Mat>,
}

impl CharTransform {
    pub fn new(nvars: usize, r: Vec<Mat>, rinv: Vec<Mat>) -> Result<Self> {
        check_len("inverse eigenvector matrices", r.len(), rinv.len())?;
        Ok(CharTransform { nvars, r, rinv })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nx(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self, i: usize) -> &Mat {
        &self.r[i]
    }

    pub fn rinv(&self, i: usize) -> &Mat {
        &self.rinv[i]
    }

    /// `w_i = R_i^{-1} v_i` on a variable-major block field.
    pub fn to_char(&self, v: &[f64], w: &mut [f64]) {
        apply_cellwise(self.nvars, &self.rinv, v, w);
    }

    /// `v_i = R_i w_i`.
    pub fn from_char(&self, w: &[f64], v: &mut [f64]) {
        apply_cellwise(self.nvars, &self.r, w, v);
    }
}

pub(crate) fn apply_cellwise(l: usize, mats: &[Mat], x: &[f64], y: &mut [f64]) {
    let nx = mats.len();
    debug_assert!(x.len() == l * nx && y.len() == l * nx);
    for (i, m) in mats.iter().enumerate() {
        let v = gather(l, nx, x, i);
        scatter(l, nx, y, i, &matvec(l, m, &v));
    }
}
