//! Exact Fourier-basis truncations of quantized symbols.
//!
//! On the circle with modes e^{2 pi i k x}, |k| <= K, the matrix of Op_t(a)
//! is M[j, k] = c_{j-k}(2 pi (t k + (1-t) j)): each entry is a closed-form
//! profile evaluation, so truncation to |k| <= K is the only approximation.

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::symbol::CircleSymbol;
use crate::torus::TorusSymbol2D;
use ndarray_linalg::{EighInto, UPLO};
use num_complex::Complex64;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Entry threshold for the verified-Hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Circle,
    Torus2,
}

/// A finite section of a quantized symbol on Fourier modes |k| <= K
/// (lattice modes on the torus), stored band by band.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub k: i32,
    pub t: f64,
    pub bandwidth: i32,
    pub geometry: Geometry,
    pub matrix: BandedMatrix,
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Matrix entry indexed by modes (circle geometry).
    pub fn entry_by_mode(&self, j: i32, k: i32) -> Complex64 {
        let off = self.k;
        self.matrix.get((j + off) as usize, (k + off) as usize)
    }

    pub fn mode_of(&self, index: usize) -> i32 {
        index as i32 - self.k
    }
}

/// Quantize a circle symbol at parameter t in [0, 1]; t = 1 is the standard
/// quantization (symbol read at the input frequency), t = 1/2 the Weyl rule
/// (frequency midpoint).
pub fn quantize_circle(a: &CircleSymbol, k: i32, t: f64) -> Result<OperatorMatrix> {
    let l = a.bandwidth();
    if k < l {
        return Err(Error::KTooSmall { k, l });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TOutOfRange { t });
    }
    let dim = (2 * k + 1) as usize;
    let mut m = BandedMatrix::new(dim);
    for (&offset, profile) in a.coeffs() {
        for col in 0..dim {
            let mode_k = col as i32 - k;
            let mode_j = mode_k + offset;
            if mode_j < -k || mode_j > k {
                continue;
            }
            let xi = TWO_PI * (t * mode_k as f64 + (1.0 - t) * mode_j as f64);
            let v = profile.eval(xi);
            if v != Complex64::new(0.0, 0.0) {
                m.set((mode_j + k) as usize, col, v);
            }
        }
    }
    let hermitian = m.hermitian_defect() <= HERMITIAN_TOL;
    Ok(OperatorMatrix {
        k,
        t,
        bandwidth: l,
        geometry: Geometry::Circle,
        matrix: m,
        hermitian,
    })
}

/// Weyl quantization on the 2-torus: lattice modes j, k in [-K, K]^2 with
/// M[j, k] = c_{j-k}(pi (j + k)) componentwise.
pub fn quantize_torus2_weyl(a2: &TorusSymbol2D, k: i32) -> Result<OperatorMatrix> {
    let l = a2.bandwidth();
    if k < l {
        return Err(Error::KTooSmall { k, l });
    }
    let side = (2 * k + 1) as usize;
    let dim = side * side;
    let flat = |m1: i32, m2: i32| -> usize { ((m1 + k) as usize) * side + (m2 + k) as usize };
    let mut m = BandedMatrix::new(dim);
    for (&(l1, l2), profile) in a2.coeffs() {
        for k1 in (-k).max(-k - l1)..=k.min(k - l1) {
            for k2 in (-k).max(-k - l2)..=k.min(k - l2) {
                let j1 = k1 + l1;
                let j2 = k2 + l2;
                let xi = (PI * (j1 + k1) as f64, PI * (j2 + k2) as f64);
                let v = profile.eval(xi);
                if v != Complex64::new(0.0, 0.0) {
                    m.set(flat(j1, j2), flat(k1, k2), v);
                }
            }
        }
    }
    let hermitian = m.hermitian_defect() <= HERMITIAN_TOL;
    Ok(OperatorMatrix {
        k,
        t: 0.5,
        bandwidth: l,
        geometry: Geometry::Torus2,
        matrix: m,
        hermitian,
    })
}

/// i (A H - H A). Hermitian whenever both inputs are.
pub fn commutator_i(a: &OperatorMatrix, h: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.geometry != h.geometry {
        return Err(Error::GeometryMismatch);
    }
    if a.dim() != h.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: h.dim() });
    }
    let ah = a.matrix.matmul(&h.matrix);
    let ha = h.matrix.matmul(&a.matrix);
    let m = ah
        .add_scaled(&ha, Complex64::new(-1.0, 0.0))
        .scale(Complex64::new(0.0, 1.0));
    let scale = m.max_abs().max(1.0);
    let hermitian =
        a.hermitian && h.hermitian && m.hermitian_defect() <= 1e-13 * scale;
    Ok(OperatorMatrix {
        k: h.k,
        t: h.t,
        bandwidth: a.bandwidth + h.bandwidth,
        geometry: h.geometry,
        matrix: m,
        hermitian,
    })
}

/// Operator norm of the truncation: max |eigenvalue| for Hermitian-flagged
/// input, largest singular value otherwise.
pub fn op_norm(m: &OperatorMatrix) -> f64 {
    if m.hermitian {
        let dense = m.matrix.to_dense();
        let vals = dense
            .eigh_into(UPLO::Lower)
            .expect("hermitian eigensolve")
            .0;
        vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    } else {
        largest_singular_value(&m.matrix)
    }
}

pub(crate) fn largest_singular_value(m: &BandedMatrix) -> f64 {
    // sigma_max^2 = lambda_max(M^* M); the Gram matrix is banded and Hermitian.
    let gram = m.adjoint().matmul(m);
    if gram.max_abs() == 0.0 {
        return 0.0;
    }
    let dense = gram.to_dense();
    let vals = dense
        .eigh_into(UPLO::Lower)
        .expect("hermitian eigensolve")
        .0;
    vals.iter().fold(0.0f64, |acc, v| acc.max(*v)).max(0.0).sqrt()
}

/// || P_{>n} (Op_1(a) - Op_{1/2}(a)) P_{>n} ||: the high-frequency norm of the
/// gap between the two quantizations, a finite-section proxy for the gap
/// being one order lower than the symbol.
pub fn order_gap_norm(a: &CircleSymbol, k: i32, n: i32) -> Result<f64> {
    if n >= k {
        return Err(Error::ProjectionLevel { n, k });
    }
    let standard = quantize_circle(a, k, 1.0)?;
    let weyl = quantize_circle(a, k, 0.5)?;
    let diff = standard
        .matrix
        .add_scaled(&weyl.matrix, Complex64::new(-1.0, 0.0));
    let projected = diff.project(|idx| (idx as i32 - k).abs() > n);
    Ok(largest_singular_value(&projected))
}

/// Schur-type uniform bound sum_l sup_xi |c_l(xi)|, evaluated on a dense
/// frequency grid covering the truncation range.
pub fn symbol_schur_bound(a: &CircleSymbol, k: i32) -> f64 {
    let mut total = 0.0;
    let xi_max = TWO_PI * (k as f64 + 1.0);
    for profile in a.coeffs().values() {
        let mut sup: f64 = 0.0;
        for i in 0..=4096 {
            let xi = -xi_max + 2.0 * xi_max * i as f64 / 4096.0;
            sup = sup.max(profile.eval(xi).norm());
        }
        total += sup;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::symbol_from_profiles;
    use crate::torus::{example14_torus_symbol, Xi2Profile};
    use std::collections::BTreeMap;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn example13() -> CircleSymbol {
        crate::presets::example13_symbol()
    }

    fn cosine() -> CircleSymbol {
        symbol_from_profiles(0.0, &[(1, "0.5"), (-1, "0.5")]).unwrap()
    }

    #[test]
    fn constant_symbol_quantizes_to_scalar_identity() {
        let a = symbol_from_profiles(0.0, &[(0, "const(2.5)")]).unwrap();
        for &t in &[0.0, 0.25, 0.5, 1.0] {
            let m = quantize_circle(&a, 6, t).unwrap();
            assert!(m.hermitian);
            for j in -6..=6 {
                for k in -6..=6 {
                    let expect = if j == k { c(2.5, 0.0) } else { c(0.0, 0.0) };
                    assert_eq!(m.entry_by_mode(j, k), expect);
                }
            }
        }
    }

    #[test]
    fn standard_quantization_reads_input_frequency() {
        // Column k of the t = 1 matrix holds the coefficients of a(., 2 pi k).
        let a = example13();
        let m = quantize_circle(&a, 8, 1.0).unwrap();
        for k in -8..=8i32 {
            for l in [-1i32, 1] {
                let j = k + l;
                if j.abs() > 8 {
                    continue;
                }
                let expect = a.coeff(l).unwrap().eval(TWO_PI * k as f64);
                assert_eq!(m.entry_by_mode(j, k), expect);
            }
        }
    }

    #[test]
    fn example13_weyl_matrix_has_zero_row_and_column_zero() {
        for &k in &[1, 8, 64] {
            let m = quantize_circle(&example13(), k, 0.5).unwrap();
            assert!(m.hermitian);
            for j in -k..=k {
                assert_eq!(m.entry_by_mode(j, 0), c(0.0, 0.0));
                assert_eq!(m.entry_by_mode(0, j), c(0.0, 0.0));
            }
            // H e_0 = 0 exactly.
            let mut e0 = vec![c(0.0, 0.0); m.dim()];
            e0[k as usize] = c(1.0, 0.0);
            let he0 = m.matrix.matvec(&e0);
            assert!(he0.iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn cosine_matrix_is_tridiagonal_toeplitz() {
        let k = 16;
        let m = quantize_circle(&cosine(), k, 0.5).unwrap();
        assert!(m.hermitian);
        assert_eq!(m.matrix.stored_entries(), 2 * (2 * k as usize + 1) - 2);
        for j in -k..=k - 1 {
            assert_eq!(m.entry_by_mode(j, j + 1), c(0.5, 0.0));
            assert_eq!(m.entry_by_mode(j + 1, j), c(0.5, 0.0));
        }
    }

    #[test]
    fn weyl_hermitian_for_real_symbols() {
        let a = symbol_from_profiles(
            0.0,
            &[
                (0, "dirstep(1, -1, 3)"),
                (1, "0.3 - 0.2i * jbracket(-1)"),
                (-1, "0.3 + 0.2i * jbracket(-1)"),
                (2, "0.25 * bump(0, 1, 4) + 0.1i * xi * jbracket(-2)"),
                (-2, "0.25 * bump(0, 1, 4) - 0.1i * xi * jbracket(-2)"),
            ],
        )
        .unwrap();
        a.check_real().unwrap();
        let m = quantize_circle(&a, 12, 0.5).unwrap();
        assert!(m.hermitian, "defect {}", m.matrix.hermitian_defect());
    }

    #[test]
    fn xi_independent_symbols_are_t_invariant() {
        let a = symbol_from_profiles(0.0, &[(1, "0.5"), (-1, "0.5"), (0, "0.1")]).unwrap();
        let m0 = quantize_circle(&a, 10, 0.0).unwrap();
        let m1 = quantize_circle(&a, 10, 1.0).unwrap();
        let mh = quantize_circle(&a, 10, 0.5).unwrap();
        for j in -10..=10 {
            for k in -10..=10 {
                assert_eq!(m0.entry_by_mode(j, k), m1.entry_by_mode(j, k));
                assert_eq!(mh.entry_by_mode(j, k), m1.entry_by_mode(j, k));
            }
        }
    }

    #[test]
    fn quantize_rejects_small_k_and_bad_t() {
        let a = cosine();
        assert!(matches!(
            quantize_circle(&a, 0, 0.5),
            Err(Error::KTooSmall { .. })
        ));
        assert!(matches!(
            quantize_circle(&a, 4, 1.5),
            Err(Error::TOutOfRange { .. })
        ));
    }

    #[test]
    fn banded_storage_stays_within_budget() {
        let a = example13();
        for &k in &[16, 64] {
            let m = quantize_circle(&a, k, 0.5).unwrap();
            let budget = (2 * k as usize + 1) * (2 * m.bandwidth as usize + 1);
            assert!(m.matrix.stored_entries() <= budget);
        }
    }

    #[test]
    fn commutator_of_matrix_with_itself_vanishes() {
        let h = quantize_circle(&example13(), 12, 0.5).unwrap();
        let z = commutator_i(&h, &h).unwrap();
        assert_eq!(z.matrix.max_abs(), 0.0);
        assert!(z.hermitian);
    }

    #[test]
    fn commutator_of_diagonal_symbols_vanishes() {
        let a = symbol_from_profiles(0.0, &[(0, "dirstep(2, -2, 10)")]).unwrap();
        let b = symbol_from_profiles(0.0, &[(0, "jbracket(-1)")]).unwrap();
        let ma = quantize_circle(&a, 12, 0.5).unwrap();
        let mb = quantize_circle(&b, 12, 0.5).unwrap();
        let z = commutator_i(&ma, &mb).unwrap();
        assert_eq!(z.matrix.max_abs(), 0.0);
    }

    #[test]
    fn commutator_band_profile_matches_squared_derivative() {
        // A = Op^w(-2 pi sin(2 pi x) xi (1 - chi0)), H = Op^w(cos 2 pi x):
        // far from the cutoff the commutator bands are the Fourier
        // coefficients of 4 pi^2 sin^2(2 pi x): diagonal 2 pi^2, bands +-2
        // equal to -pi^2.
        let k = 512;
        let h = quantize_circle(&cosine(), k, 0.5).unwrap();
        let conj = crate::symbol::mourre_conjugate_symbol(
            &cosine(),
            crate::symbol::LowCutoff::DEFAULT,
            1.0,
        )
        .unwrap();
        let a = quantize_circle(&conj, k, 0.5).unwrap();
        let comm = commutator_i(&a, &h).unwrap();
        assert!(comm.hermitian);
        let diag = 2.0 * PI * PI;
        let band2 = -PI * PI;
        for &mode in &[128i32, 200, 256, -128, -256] {
            let d0 = comm.entry_by_mode(mode, mode);
            let d2 = comm.entry_by_mode(mode + 2, mode);
            let dm2 = comm.entry_by_mode(mode - 2, mode);
            let d1 = comm.entry_by_mode(mode + 1, mode);
            assert!((d0 - c(diag, 0.0)).norm() < 1e-9, "diag at {mode}: {d0}");
            assert!((d2 - c(band2, 0.0)).norm() < 1e-9, "band2 at {mode}: {d2}");
            assert!((dm2 - c(band2, 0.0)).norm() < 1e-9);
            assert!(d1.norm() < 1e-9);
        }
    }

    #[test]
    fn commutator_rejects_mismatched_dimensions() {
        let a = quantize_circle(&cosine(), 8, 0.5).unwrap();
        let b = quantize_circle(&cosine(), 9, 0.5).unwrap();
        assert!(matches!(
            commutator_i(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn op_norm_of_constant_and_cosine() {
        let a = symbol_from_profiles(0.0, &[(0, "const(-3)")]).unwrap();
        let m = quantize_circle(&a, 8, 0.5).unwrap();
        assert!((op_norm(&m) - 3.0).abs() < 1e-12);

        // Toeplitz oracle: || cos truncation || = cos(pi / (2K + 2)).
        let k = 32;
        let m = quantize_circle(&cosine(), k, 0.5).unwrap();
        let expect = (PI / (2.0 * k as f64 + 2.0)).cos();
        assert!((op_norm(&m) - expect).abs() < 1e-12);
        assert!(op_norm(&m) < 1.0);
    }

    #[test]
    fn op_norm_obeys_schur_bound() {
        let a = example13();
        for &k in &[16, 64] {
            let m = quantize_circle(&a, k, 0.5).unwrap();
            let bound = symbol_schur_bound(&a, k);
            assert!(op_norm(&m) <= bound + 1e-12);
        }
    }

    #[test]
    fn largest_singular_value_matches_dense_oracle() {
        let a = symbol_from_profiles(0.0, &[(1, "0.7"), (0, "0.2")]).unwrap();
        let m = quantize_circle(&a, 6, 1.0).unwrap();
        assert!(!m.hermitian);
        let sigma = op_norm(&m);
        // Oracle: power iteration on the dense Gram matrix.
        let dense = m.matrix.to_dense();
        let gram = {
            let mut g = ndarray::Array2::from_elem((13, 13), c(0.0, 0.0));
            for i in 0..13 {
                for j in 0..13 {
                    let mut acc = c(0.0, 0.0);
                    for l in 0..13 {
                        acc += dense[(l, i)].conj() * dense[(l, j)];
                    }
                    g[(i, j)] = acc;
                }
            }
            g
        };
        let mut v = vec![c(1.0, 0.0); 13];
        let mut lam = 0.0;
        for _ in 0..500 {
            let mut w = vec![c(0.0, 0.0); 13];
            for i in 0..13 {
                for j in 0..13 {
                    w[i] += gram[(i, j)] * v[j];
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            lam = norm;
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
        }
        assert!((sigma - lam.sqrt()).abs() < 1e-8, "{sigma} vs {}", lam.sqrt());
    }

    #[test]
    fn order_gap_vanishes_for_xi_independent_symbols() {
        let a = cosine();
        for &n in &[1, 4] {
            assert_eq!(order_gap_norm(&a, 16, n).unwrap(), 0.0);
        }
        let b = symbol_from_profiles(0.0, &[(0, "const(4)")]).unwrap();
        assert_eq!(order_gap_norm(&b, 16, 2).unwrap(), 0.0);
    }

    #[test]
    fn order_gap_rejects_large_n() {
        assert!(matches!(
            order_gap_norm(&cosine(), 16, 16),
            Err(Error::ProjectionLevel { .. })
        ));
    }

    #[test]
    fn torus_diagonal_part_of_example14() {
        let h = example14_torus_symbol();
        let m = quantize_torus2_weyl(&h, 3).unwrap();
        assert!(m.hermitian);
        let side = 7i32;
        let flat = |m1: i32, m2: i32| -> usize { ((m1 + 3) * side + (m2 + 3)) as usize };
        for k1 in -3..=3 {
            for k2 in -3..=3 {
                let norm2 = 4.0 * PI * PI * ((k1 * k1 + k2 * k2) as f64);
                let expect = TWO_PI * k2 as f64 / (1.0 + norm2).sqrt();
                let got = m.matrix.get(flat(k1, k2), flat(k1, k2));
                assert!(
                    (got - c(expect, 0.0)).norm() < 1e-14,
                    "diagonal at ({k1},{k2}): {got} vs {expect}"
                );
            }
        }
        assert_eq!(m.matrix.get(flat(0, 0), flat(0, 0)), c(0.0, 0.0));
    }

    #[test]
    fn torus_example14_column_and_row_zero_vanish() {
        let h = example14_torus_symbol();
        let m = quantize_torus2_weyl(&h, 8).unwrap();
        assert_eq!(m.dim(), 289);
        let side = 17usize;
        let center = 8 * side + 8;
        for idx in 0..m.dim() {
            assert_eq!(m.matrix.get(idx, center), c(0.0, 0.0));
            assert_eq!(m.matrix.get(center, idx), c(0.0, 0.0));
        }
    }

    #[test]
    fn torus_constant_symbol_is_scalar_identity() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((0, 0), Xi2Profile::Const(1.5));
        let a2 = TorusSymbol2D::new(0.0, coeffs).unwrap();
        let m = quantize_torus2_weyl(&a2, 2).unwrap();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let expect = if i == j { c(1.5, 0.0) } else { c(0.0, 0.0) };
                assert_eq!(m.matrix.get(i, j), expect);
            }
        }
    }

    #[test]
    fn torus_rejects_bandwidth_exceeding_k() {
        let h = example14_torus_symbol();
        assert!(matches!(
            quantize_torus2_weyl(&h, 0),
            Err(Error::KTooSmall { .. })
        ));
    }
}
