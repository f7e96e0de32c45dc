//! Named symbol presets with every construction parameter pinned, so that
//! scenario runs and the verification suite are reproducible.

use crate::error::Result;
use crate::profile::XiProfile;
use crate::symbol::{fourier_project, CircleSymbol, LowCutoff};
use crate::torus::{example14_torus_symbol, TorusSymbol2D};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Window radii for the embedded-eigenvalue symbol: chi = bump(0, 1.5 pi, 2 pi),
/// so chi(+-pi) = 1 and the mode-0 column of the Weyl matrix vanishes.
pub const EXAMPLE13_R_IN: f64 = 1.5 * PI;
pub const EXAMPLE13_R_OUT: f64 = 2.0 * PI;

/// Low-frequency window removed from every conjugate symbol.
pub const CONJUGATE_LOW_CUTOFF: LowCutoff = LowCutoff { r_in: PI, r_out: 2.0 * PI };

/// Blend width joining the two directional branches of conjugate symbols.
pub const CONJUGATE_BLEND_WIDTH: f64 = 1.0;

/// Fourier bandwidth of the scattering preset projection.
pub const SCATTERING_BANDWIDTH: i32 = 12;

/// x-grid size used to project the scattering preset.
pub const SCATTERING_X_GRID: usize = 256;

/// Tail tolerance for the scattering projection.
pub const SCATTERING_TAIL_TOL: f64 = 1e-9;

/// sin(2 pi x) (1 - chi(xi)): embedded eigenvalue 0 with eigenvector e_0.
pub fn example13_symbol() -> CircleSymbol {
    let window = XiProfile::one_minus_bump(0.0, EXAMPLE13_R_IN, EXAMPLE13_R_OUT);
    let mut coeffs = BTreeMap::new();
    coeffs.insert(1, XiProfile::scaled(Complex64::new(0.0, -0.5), window.clone()));
    coeffs.insert(-1, XiProfile::scaled(Complex64::new(0.0, 0.5), window));
    CircleSymbol::new(0.0, coeffs).expect("preset symbol")
}

/// cos(2 pi x): the tridiagonal Toeplitz benchmark with band [-1, 1].
pub fn cosine_symbol() -> CircleSymbol {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(1, XiProfile::Const(0.5));
    coeffs.insert(-1, XiProfile::Const(0.5));
    CircleSymbol::new(0.0, coeffs).expect("preset symbol")
}

/// dirstep(2, -2, 10): x-independent symbol, diagonal truncations.
pub fn dirstep_symbol() -> CircleSymbol {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, XiProfile::DirStep { v_plus: 2.0, v_minus: -2.0, width: 10.0 });
    CircleSymbol::new(0.0, coeffs).expect("preset symbol")
}

/// Two-direction symbol with limits a(x, +1) = cos(2 pi x) and
/// a(x, -1) = 3 + cos(2 pi x); essential spectrum [-1, 1] union [2, 4].
pub fn twodir_symbol() -> CircleSymbol {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, XiProfile::DirStep { v_plus: 0.0, v_minus: 3.0, width: 1.0 });
    coeffs.insert(1, XiProfile::Const(0.5));
    coeffs.insert(-1, XiProfile::Const(0.5));
    CircleSymbol::new(0.0, coeffs).expect("preset symbol")
}

/// Probe set for tabulated scattering profiles: zero plus log-spaced points
/// out to 10^6 in both directions, dense enough for the interpolation error
/// to sit far below the profile tails the diagnostics measure.
pub fn scattering_probes() -> Vec<f64> {
    let mut probes = vec![0.0];
    let per_decade = 40;
    let decades = 9.0; // 1e-3 .. 1e6
    let n = (per_decade as f64 * decades) as usize;
    for i in 0..=n {
        let xi = 10f64.powf(-3.0 + i as f64 / per_decade as f64);
        probes.push(xi);
        probes.push(-xi);
    }
    probes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    probes
}

/// exp(i c sin(2 pi x) xi / <xi>) projected to bandwidth 12: the unitary
/// scattering-type symbol family. Returns the symbol and the projection
/// tail bound.
pub fn scattering_symbol(c: f64) -> Result<(CircleSymbol, f64)> {
    let f = move |x: f64, xi: f64| {
        let u = xi / (1.0 + xi * xi).sqrt();
        let t = c * (2.0 * PI * x).sin() * u;
        Complex64::new(t.cos(), t.sin())
    };
    fourier_project(
        f,
        SCATTERING_BANDWIDTH,
        SCATTERING_X_GRID,
        &scattering_probes(),
        SCATTERING_TAIL_TOL,
    )
}

/// The perturbed torus operator of the 2-d embedded-eigenvalue example.
pub fn example14_symbol() -> TorusSymbol2D {
    example14_torus_symbol()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scattering_projection_tail_is_tiny() {
        let (sym, tail) = scattering_symbol(1.0).unwrap();
        assert!(tail < 1e-9, "tail {tail}");
        assert_eq!(sym.bandwidth(), SCATTERING_BANDWIDTH);
    }

    #[test]
    fn scattering_symbol_is_unimodular_pointwise() {
        let (sym, _) = scattering_symbol(1.0).unwrap();
        for &xi in &[0.0, 0.5, -3.0, 40.0, -400.0, 1e5] {
            for i in 0..16 {
                let x = i as f64 / 16.0;
                let v = sym.evaluate(x, xi).norm();
                assert!((v - 1.0).abs() < 1e-7, "|a({x},{xi})| = {v}");
            }
        }
    }
}
