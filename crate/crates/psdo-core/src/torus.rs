//! Finite Fourier symbols on the 2-torus, with just enough profile algebra
//! for the mixed multiplier-plus-potential operators quantized here.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::taylor::bridge;

/// Frequency profile over R^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Xi2Profile {
    Const(f64),
    /// First frequency component xi_1.
    Xi1,
    /// Second frequency component xi_2.
    Xi2,
    /// (1 + |xi|^2)^(power/2).
    JBracket2 { power: f64 },
    /// Radial bump at the origin: 1 on |xi| <= r_in, 0 outside r_out.
    RadialBump { r_in: f64, r_out: f64 },
    Sum(Vec<Xi2Profile>),
    Product(Vec<Xi2Profile>),
    Scaled(Complex64, Box<Xi2Profile>),
}

impl Xi2Profile {
    pub fn eval(&self, xi: (f64, f64)) -> Complex64 {
        match self {
            Xi2Profile::Const(v) => Complex64::new(*v, 0.0),
            Xi2Profile::Xi1 => Complex64::new(xi.0, 0.0),
            Xi2Profile::Xi2 => Complex64::new(xi.1, 0.0),
            Xi2Profile::JBracket2 { power } => {
                let n2 = xi.0 * xi.0 + xi.1 * xi.1;
                Complex64::new((1.0 + n2).powf(power / 2.0), 0.0)
            }
            Xi2Profile::RadialBump { r_in, r_out } => {
                let r = (xi.0 * xi.0 + xi.1 * xi.1).sqrt();
                let s = (r - r_in) / (r_out - r_in);
                Complex64::new(1.0 - bridge(s), 0.0)
            }
            Xi2Profile::Sum(terms) => terms.iter().map(|t| t.eval(xi)).sum(),
            Xi2Profile::Product(factors) => factors
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.eval(xi)),
            Xi2Profile::Scaled(c, inner) => c * inner.eval(xi),
        }
    }

    /// Same syntactic order bookkeeping as the circle profiles.
    pub fn order(&self) -> f64 {
        match self {
            Xi2Profile::Xi1 | Xi2Profile::Xi2 => 1.0,
            Xi2Profile::JBracket2 { power } => *power,
            Xi2Profile::Sum(terms) => terms
                .iter()
                .map(|t| t.order())
                .fold(f64::NEG_INFINITY, f64::max),
            Xi2Profile::Product(factors) => factors.iter().map(|f| f.order()).sum(),
            Xi2Profile::Scaled(_, inner) => inner.order(),
            _ => 0.0,
        }
    }
}

/// a2(x, xi) = sum over lattice offsets l of c_l(xi) e^{2 pi i l . x}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusSymbol2D {
    order: f64,
    coeffs: BTreeMap<(i32, i32), Xi2Profile>,
}

impl TorusSymbol2D {
    pub fn new(order: f64, coeffs: BTreeMap<(i32, i32), Xi2Profile>) -> Result<Self> {
        for ((l1, l2), p) in &coeffs {
            let actual = p.order();
            if actual > order {
                return Err(Error::OrderTooSmall {
                    declared: order,
                    actual,
                    l: l1.abs().max(l2.abs()),
                });
            }
        }
        Ok(TorusSymbol2D { order, coeffs })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// Max-norm bandwidth over the lattice offsets.
    pub fn bandwidth(&self) -> i32 {
        self.coeffs
            .keys()
            .map(|(l1, l2)| l1.abs().max(l2.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn coeffs(&self) -> &BTreeMap<(i32, i32), Xi2Profile> {
        &self.coeffs
    }

    pub fn evaluate(&self, x: (f64, f64), xi: (f64, f64)) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&(l1, l2), p)| {
                let phase = 2.0 * PI * (l1 as f64 * x.0 + l2 as f64 * x.1);
                p.eval(xi) * Complex64::new(phase.cos(), phase.sin())
            })
            .sum()
    }
}

/// Radius inside which the torus window equals 1; covers the lattice
/// midpoints (+-pi, 0) that carry the embedded eigenvector.
pub const TORUS_WINDOW_R_IN: f64 = 4.0;
pub const TORUS_WINDOW_R_OUT: f64 = 2.0 * PI;

/// The perturbed torus operator xi_2 / <xi> + 2 sin(2 pi x_1) (1 - chi(xi)),
/// whose Weyl truncation annihilates the lattice mode (0, 0).
pub fn example14_torus_symbol() -> TorusSymbol2D {
    let window = Xi2Profile::Sum(vec![
        Xi2Profile::Const(1.0),
        Xi2Profile::Scaled(
            Complex64::new(-1.0, 0.0),
            Box::new(Xi2Profile::RadialBump {
                r_in: TORUS_WINDOW_R_IN,
                r_out: TORUS_WINDOW_R_OUT,
            }),
        ),
    ]);
    let mut coeffs = BTreeMap::new();
    coeffs.insert(
        (0, 0),
        Xi2Profile::Product(vec![Xi2Profile::Xi2, Xi2Profile::JBracket2 { power: -1.0 }]),
    );
    coeffs.insert(
        (1, 0),
        Xi2Profile::Scaled(Complex64::new(0.0, -1.0), Box::new(window.clone())),
    );
    coeffs.insert(
        (-1, 0),
        Xi2Profile::Scaled(Complex64::new(0.0, 1.0), Box::new(window)),
    );
    TorusSymbol2D::new(0.0, coeffs).unwrap()
}
