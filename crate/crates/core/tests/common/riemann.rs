//! Exact solution of the Euler Riemann problem for an ideal gas (two-rarefaction
//! starting guess, Newton iteration on the star pressure, self-similar sampling).

#[derive(Debug, Clone, Copy)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

pub struct ExactRiemann {
    left: Primitive,
    right: Primitive,
    gamma: f64,
    cl: f64,
    cr: f64,
    p_star: f64,
    u_star: f64,
}

impl ExactRiemann {
    pub fn new(left: Primitive, right: Primitive, gamma: f64) -> Self {
        let cl = (gamma * left.p / left.rho).sqrt();
        let cr = (gamma * right.p / right.rho).sqrt();
        assert!(
            2.0 * (cl + cr) / (gamma - 1.0) > right.u - left.u,
            "initial states generate vacuum"
        );
        let mut s = ExactRiemann {
            left,
            right,
            gamma,
            cl,
            cr,
            p_star: 0.0,
            u_star: 0.0,
        };
        s.solve_star();
        s
    }

    /// Wave function for one side and its derivative.
    fn side(&self, p: f64, st: Primitive, c: f64) -> (f64, f64) {
        let g = self.gamma;
        if p > st.p {
            let a = 2.0 / ((g + 1.0) * st.rho);
            let b = (g - 1.0) / (g + 1.0) * st.p;
            let q = (a / (p + b)).sqrt();
            ((p - st.p) * q, q * (1.0 - 0.5 * (p - st.p) / (b + p)))
        } else {
            let r = p / st.p;
            let e = (g - 1.0) / (2.0 * g);
            (
                2.0 * c / (g - 1.0) * (r.powf(e) - 1.0),
                r.powf(-(g + 1.0) / (2.0 * g)) / (st.rho * c),
            )
        }
    }

    fn solve_star(&mut self) {
        let g = self.gamma;
        let (l, r) = (self.left, self.right);
        let e = (g - 1.0) / (2.0 * g);
        let num = self.cl + self.cr - 0.5 * (g - 1.0) * (r.u - l.u);
        let den = self.cl / l.p.powf(e) + self.cr / r.p.powf(e);
        let mut p = (num / den).powf(1.0 / e).max(1e-12);
        for _ in 0..100 {
            let (fl, dl) = self.side(p, l, self.cl);
            let (fr, dr) = self.side(p, r, self.cr);
            let next = (p - (fl + fr + r.u - l.u) / (dl + dr)).max(1e-14);
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-15 {
                break;
            }
        }
        let (fl, _) = self.side(p, l, self.cl);
        let (fr, _) = self.side(p, r, self.cr);
        self.p_star = p;
        self.u_star = 0.5 * (l.u + r.u) + 0.5 * (fr - fl);
    }

    pub fn star(&self) -> (f64, f64) {
        (self.p_star, self.u_star)
    }

    /// State at similarity coordinate `xi = (x - x0) / t`.
    pub fn sample(&self, xi: f64) -> Primitive {
        let g = self.gamma;
        let (ps, us) = (self.p_star, self.u_star);
        let gm = (g - 1.0) / (g + 1.0);
        if xi <= us {
            let st = self.left;
            let c = self.cl;
            if ps > st.p {
                let s = st.u - c * ((g + 1.0) / (2.0 * g) * ps / st.p + (g - 1.0) / (2.0 * g)).sqrt();
                if xi <= s {
                    st
                } else {
                    let r = ps / st.p;
                    Primitive { rho: st.rho * (r + gm) / (gm * r + 1.0), u: us, p: ps }
                }
            } else {
                let head = st.u - c;
                let cs = c * (ps / st.p).powf((g - 1.0) / (2.0 * g));
                let tail = us - cs;
                if xi <= head {
                    st
                } else if xi >= tail {
                    Primitive { rho: st.rho * (ps / st.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    let k = 2.0 / (g + 1.0) + gm / c * (st.u - xi);
                    Primitive {
                        rho: st.rho * k.powf(2.0 / (g - 1.0)),
                        u: 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * st.u + xi),
                        p: st.p * k.powf(2.0 * g / (g - 1.0)),
                    }
                }
            }
        } else {
            let st = self.right;
            let c = self.cr;
            if ps > st.p {
                let s = st.u + c * ((g + 1.0) / (2.0 * g) * ps / st.p + (g - 1.0) / (2.0 * g)).sqrt();
                if xi >= s {
                    st
                } else {
                    let r = ps / st.p;
                    Primitive { rho: st.rho * (r + gm) / (gm * r + 1.0), u: us, p: ps }
                }
            } else {
                let head = st.u + c;
                let cs = c * (ps / st.p).powf((g - 1.0) / (2.0 * g));
                let tail = us + cs;
                if xi >= head {
                    st
                } else if xi <= tail {
                    Primitive { rho: st.rho * (ps / st.p).powf(1.0 / g), u: us, p: ps }
                } else {
                    let k = 2.0 / (g + 1.0) - gm / c * (st.u - xi);
                    Primitive {
                        rho: st.rho * k.powf(2.0 / (g - 1.0)),
                        u: 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * st.u + xi),
                        p: st.p * k.powf(2.0 * g / (g - 1.0)),
                    }
                }
            }
        }
    }

    /// Cell average of density over `[a, b]` at time `t` for a jump at `x0`,
    /// by composite midpoint quadrature.
    pub fn mean_density(&self, a: f64, b: f64, x0: f64, t: f64, samples: usize) -> f64 {
        let w = (b - a) / samples as f64;
        (0..samples)
            .map(|k| self.sample((a + (k as f64 + 0.5) * w - x0) / t).rho)
            .sum::<f64>()
            / samples as f64
    }
}
