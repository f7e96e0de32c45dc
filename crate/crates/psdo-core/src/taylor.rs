//! Truncated Taylor-series (jet) arithmetic used to differentiate the
//! smooth transition bridge exactly, to any order the cutoff machinery needs.

/// Maximum number of stored Taylor coefficients (derivative orders 0..=9).
pub const JET_LEN: usize = 10;

/// Taylor coefficients of a function at a point: `c[k] = f^(k)(x0) / k!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function evaluated at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x0;
        c[1] = 1.0;
        Jet { c }
    }

    /// k-th derivative value: `c[k] * k!`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            c[k] = self.c[k] + o.c[k];
        }
        Jet { c }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            c[k] = self.c[k] - o.c[k];
        }
        Jet { c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut c = self.c;
        for v in &mut c {
            *v *= s;
        }
        Jet { c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.c[j] * o.c[k - j];
            }
            c[k] = acc;
        }
        Jet { c }
    }

    /// Reciprocal 1/f; requires `f(x0) != 0`.
    pub fn recip(&self) -> Jet {
        let mut c = [0.0; JET_LEN];
        c[0] = 1.0 / self.c[0];
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.c[j] * c[k - j];
            }
            c[k] = -acc / self.c[0];
        }
        Jet { c }
    }

    /// exp(f) via the standard recurrence `g' = g f'`.
    pub fn exp(&self) -> Jet {
        let mut c = [0.0; JET_LEN];
        c[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (j as f64) * self.c[j] * c[k - j];
            }
            c[k] = acc / k as f64;
        }
        Jet { c }
    }
}

/// Jet of the C-infinity bridge T(s): 0 for s <= 0, 1 for s >= 1,
/// T(s) = e(s) / (e(s) + e(1-s)) with e(s) = exp(-1/s) in between.
pub fn bridge_jet(s0: f64) -> Jet {
    if s0 <= 0.0 {
        Jet::constant(0.0)
    } else if s0 >= 1.0 {
        Jet::constant(1.0)
    } else {
        let s = Jet::variable(s0);
        let one_minus = Jet::constant(1.0).sub(&s);
        let ea = s.recip().scale(-1.0).exp();
        let eb = one_minus.recip().scale(-1.0).exp();
        ea.mul(&ea.add(&eb).recip())
    }
}

/// Pointwise bridge value, shared by every smooth atom.
pub fn bridge(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let ea = (-1.0 / s).exp();
        let eb = (-1.0 / (1.0 - s)).exp();
        ea / (ea + eb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_jet_matches_exact_derivatives() {
        // f(x) = exp(2x) at x0 = 0.3: f^(k) = 2^k exp(0.6)
        let f = Jet::variable(0.3).scale(2.0).exp();
        let base = (0.6f64).exp();
        for k in 0..JET_LEN {
            let exact = 2f64.powi(k as i32) * base;
            assert!(
                (f.derivative(k) - exact).abs() < 1e-10 * exact.abs(),
                "order {k}"
            );
        }
    }

    #[test]
    fn recip_jet_matches_exact_derivatives() {
        // f(x) = 1/x at x0 = 2: f^(k) = (-1)^k k! / 2^(k+1)
        let f = Jet::variable(2.0).recip();
        let mut fact = 1.0;
        for k in 0..JET_LEN {
            if k > 0 {
                fact *= k as f64;
            }
            let exact = if k % 2 == 0 { 1.0 } else { -1.0 } * fact / 2f64.powi(k as i32 + 1);
            assert!((f.derivative(k) - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn bridge_endpoints_and_midpoint() {
        assert_eq!(bridge(-1.0), 0.0);
        assert_eq!(bridge(0.0), 0.0);
        assert_eq!(bridge(1.0), 1.0);
        assert_eq!(bridge(2.0), 1.0);
        assert!((bridge(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bridge_jet_first_derivative_matches_finite_difference() {
        let h = 1e-6;
        for &s in &[0.2, 0.5, 0.77] {
            let fd = (bridge(s + h) - bridge(s - h)) / (2.0 * h);
            let jet = bridge_jet(s);
            assert!(
                (jet.derivative(1) - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                "s = {s}: jet {} vs fd {}",
                jet.derivative(1),
                fd
            );
        }
    }

    #[test]
    fn bridge_jet_vanishing_derivatives_outside() {
        for &s in &[-0.5, 0.0, 1.0, 3.0] {
            let jet = bridge_jet(s);
            for k in 1..JET_LEN {
                assert_eq!(jet.derivative(k), 0.0, "s = {s}, order {k}");
            }
        }
    }
}
