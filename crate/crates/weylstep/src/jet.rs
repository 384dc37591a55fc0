//! Fourth-order jets: value plus first four derivatives, propagated exactly
//! through arithmetic and elementary functions. Used wherever coefficient
//! algebra needs derivatives that finite differences would contaminate
//! (partition functions, chart maps, Weyl corrections of differential
//! operators).

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    /// d[k] is the k-th derivative; d[0] the value.
    pub d: [f64; 5],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { d: [v, 0.0, 0.0, 0.0, 0.0] }
    }

    /// The identity jet at x: value x, slope 1.
    pub fn var(x: f64) -> Self {
        Self { d: [x, 1.0, 0.0, 0.0, 0.0] }
    }

    pub fn val(&self) -> f64 {
        self.d[0]
    }

    pub fn d1(&self) -> f64 {
        self.d[1]
    }

    pub fn d2(&self) -> f64 {
        self.d[2]
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut d = [0.0; 5];
        for k in 0..5 {
            d[k] = self.d[k] + o.d[k];
        }
        Jet { d }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let mut d = [0.0; 5];
        for k in 0..5 {
            d[k] = self.d[k] - o.d[k];
        }
        Jet { d }
    }

    pub fn neg(&self) -> Jet {
        let mut d = [0.0; 5];
        for k in 0..5 {
            d[k] = -self.d[k];
        }
        Jet { d }
    }

    pub fn scale(&self, c: f64) -> Jet {
        let mut d = [0.0; 5];
        for k in 0..5 {
            d[k] = c * self.d[k];
        }
        Jet { d }
    }

    /// Leibniz rule through order 4.
    pub fn mul(&self, o: &Jet) -> Jet {
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut d = [0.0; 5];
        for k in 0..5 {
            let mut s = 0.0;
            for j in 0..=k {
                s += BINOM[k][j] * self.d[j] * o.d[k - j];
            }
            d[k] = s;
        }
        Jet { d }
    }

    /// Reciprocal via the recursion (1/f)' = -f' (1/f) / f.
    pub fn recip(&self) -> Jet {
        let f = self.d;
        let g0 = 1.0 / f[0];
        // Solve f * g = 1 order by order (Leibniz).
        let mut g = [g0, 0.0, 0.0, 0.0, 0.0];
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        for k in 1..5 {
            let mut s = 0.0;
            for j in 0..k {
                s += BINOM[k][j] * g[j] * f[k - j];
            }
            g[k] = -s * g0;
        }
        Jet { d: g }
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }

    /// Compose f(g) where self is the outer jet taken at g.val().
    /// Faa di Bruno through order 4.
    pub fn compose(outer: &Jet, g: &Jet) -> Jet {
        let f = outer.d;
        let (g1, g2, g3, g4) = (g.d[1], g.d[2], g.d[3], g.d[4]);
        let mut d = [0.0; 5];
        d[0] = f[0];
        d[1] = f[1] * g1;
        d[2] = f[2] * g1 * g1 + f[1] * g2;
        d[3] = f[3] * g1.powi(3) + 3.0 * f[2] * g1 * g2 + f[1] * g3;
        d[4] = f[4] * g1.powi(4)
            + 6.0 * f[3] * g1 * g1 * g2
            + f[2] * (3.0 * g2 * g2 + 4.0 * g1 * g3)
            + f[1] * g4;
        Jet { d }
    }

    pub fn exp(&self) -> Jet {
        let v = self.d[0].exp();
        let outer = Jet { d: [v, v, v, v, v] };
        Jet::compose(&outer, self)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.d[0].sin_cos();
        let outer = Jet { d: [s, c, -s, -c, s] };
        Jet::compose(&outer, self)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.d[0].sin_cos();
        let outer = Jet { d: [c, -s, -c, s, c] };
        Jet::compose(&outer, self)
    }

    pub fn sqrt(&self) -> Jet {
        let v = self.d[0];
        let r = v.sqrt();
        let outer = Jet {
            d: [
                r,
                0.5 / r,
                -0.25 / (r * v),
                0.375 / (r * v * v),
                -0.9375 / (r * v * v * v),
            ],
        };
        Jet::compose(&outer, self)
    }

    pub fn powi(&self, p: i32) -> Jet {
        match p {
            0 => Jet::constant(1.0),
            1 => *self,
            _ if p > 1 => {
                let mut acc = *self;
                for _ in 1..p {
                    acc = acc.mul(self);
                }
                acc
            }
            _ => self.recip().powi(-p),
        }
    }

    /// Jet of the inverse map at y = self.val(), given the forward jet.
    /// Requires d1 != 0.
    pub fn inverse_jet(&self) -> Jet {
        let (p1, p2, p3, p4) = (self.d[1], self.d[2], self.d[3], self.d[4]);
        let w1 = 1.0 / p1;
        let w2 = -p2 * w1.powi(3);
        let w3 = (3.0 * p2 * p2 - p1 * p3) * w1.powi(5);
        let w4 = (-15.0 * p2.powi(3) + 10.0 * p1 * p2 * p3 - p1 * p1 * p4) * w1.powi(7);
        Jet { d: [self.d[0], w1, w2, w3, w4] }
    }
}

/// A scalar function of one variable exposed through jets.
pub trait JetFn: Send + Sync {
    fn jet(&self, x: f64) -> Jet;

    fn val(&self, x: f64) -> f64 {
        self.jet(x).val()
    }
}

impl<F: Fn(Jet) -> Jet + Send + Sync> JetFn for F {
    fn jet(&self, x: f64) -> Jet {
        self(Jet::var(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn product_and_quotient_match_closed_forms() {
        // f(x) = x^2 sin x; f'''' known in closed form.
        let x = 0.7;
        let j = Jet::var(x).powi(2).mul(&Jet::var(x).sin());
        close(j.d[0], x * x * x.sin(), 1e-14);
        close(j.d[1], 2.0 * x * x.sin() + x * x * x.cos(), 1e-13);
        close(j.d[2], 2.0 * x.sin() + 4.0 * x * x.cos() - x * x * x.sin(), 1e-13);
        close(
            j.d[4],
            x * x * x.sin() - 8.0 * x * x.cos() - 12.0 * x.sin(),
            1e-12,
        );

        let q = Jet::var(x).sin().div(&Jet::var(x).cos());
        let sec2 = 1.0 / (x.cos() * x.cos());
        close(q.d[1], sec2, 1e-13);
        close(q.d[2], 2.0 * x.tan() * sec2, 1e-12);
    }

    #[test]
    fn exp_of_reciprocal_matches_finite_differences() {
        let f = |x: f64| Jet::var(x).recip().neg().exp(); // e^{-1/x}
        let x = 0.43;
        let j = f(x);
        let h = 1e-4;
        let d1 = (f(x + h).d[0] - f(x - h).d[0]) / (2.0 * h);
        let d2 = (f(x + h).d[0] - 2.0 * j.d[0] + f(x - h).d[0]) / (h * h);
        // Central differences carry their own h^2 truncation error.
        close(j.d[1], d1, 2e-7);
        close(j.d[2], d2, 1e-5);
    }

    #[test]
    fn composition_against_direct_evaluation() {
        // sin(x + 0.25 sin x) built two ways.
        let x = 1.9;
        let inner = Jet::var(x).add(&Jet::var(x).sin().scale(0.25));
        let direct = inner.sin();
        let outer = {
            let (s, c) = inner.val().sin_cos();
            Jet { d: [s, c, -s, -c, s] }
        };
        let composed = Jet::compose(&outer, &inner);
        for k in 0..5 {
            close(direct.d[k], composed.d[k], 1e-12);
        }
    }

    #[test]
    fn inverse_jet_of_exp_is_log() {
        let x = 0.8;
        let fwd = Jet::var(x).exp(); // y = e^x
        let inv = fwd.inverse_jet(); // should be jet of ln at y
        let y = x.exp();
        close(inv.d[1], 1.0 / y, 1e-13);
        close(inv.d[2], -1.0 / (y * y), 1e-13);
        close(inv.d[3], 2.0 / (y * y * y), 1e-12);
        close(inv.d[4], -6.0 / (y * y * y * y), 1e-12);
    }

    #[test]
    fn sqrt_jet() {
        let x = 2.3;
        let j = Jet::var(x).sqrt();
        close(j.d[1], 0.5 / x.sqrt(), 1e-13);
        close(j.d[2], -0.25 * x.powf(-1.5), 1e-13);
    }
}
