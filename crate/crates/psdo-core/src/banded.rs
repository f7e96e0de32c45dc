//! Banded complex matrices keyed by diagonal offset, with the arithmetic the
//! truncation machinery needs: matvec, band-by-band products, adjoints,
//! dense export, and an LU factorization for resolvent solves.

use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::BTreeMap;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square banded matrix. Band `d` stores entries M[k + d, k], indexed by the
/// column k over its valid range.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    dim: usize,
    bands: BTreeMap<isize, Vec<Complex64>>,
}

impl BandedMatrix {
    pub fn new(dim: usize) -> Self {
        BandedMatrix { dim, bands: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = BandedMatrix::new(dim);
        for k in 0..dim {
            m.set(k, k, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest absolute band offset carrying data.
    pub fn max_offset(&self) -> usize {
        self.bands.keys().map(|d| d.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn offsets(&self) -> impl Iterator<Item = isize> + '_ {
        self.bands.keys().copied()
    }

    /// Number of stored entries across all bands.
    pub fn stored_entries(&self) -> usize {
        self.bands.values().map(|v| v.len()).sum()
    }

    fn col_range(dim: usize, d: isize) -> (usize, usize) {
        let start = if d < 0 { (-d) as usize } else { 0 };
        let end = if d > 0 { dim - d as usize } else { dim };
        (start, end)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let d = row as isize - col as isize;
        match self.bands.get(&d) {
            None => ZERO,
            Some(band) => {
                let (start, _) = Self::col_range(self.dim, d);
                band[col - start]
            }
        }
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim);
        let d = row as isize - col as isize;
        let (start, end) = Self::col_range(self.dim, d);
        let band = self
            .bands
            .entry(d)
            .or_insert_with(|| vec![ZERO; end - start]);
        band[col - start] = value;
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![ZERO; self.dim];
        for (&d, band) in &self.bands {
            let (start, end) = Self::col_range(self.dim, d);
            for col in start..end {
                let row = (col as isize + d) as usize;
                y[row] += band[col - start] * x[col];
            }
        }
        y
    }

    /// Banded product; offsets add, cost O(dim * bands_a * bands_b).
    pub fn matmul(&self, other: &BandedMatrix) -> BandedMatrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut out: BTreeMap<isize, Vec<Complex64>> = BTreeMap::new();
        for (&da, band_a) in &self.bands {
            let (sa, _) = Self::col_range(dim, da);
            for (&db, band_b) in &other.bands {
                let (sb, eb) = Self::col_range(dim, db);
                let dc = da + db;
                if dc.unsigned_abs() >= dim {
                    continue;
                }
                let (sc, ec) = Self::col_range(dim, dc);
                let band_c = out.entry(dc).or_insert_with(|| vec![ZERO; ec - sc]);
                // C[k + da + db, k] += A[m + da, m] B[k + db, k] with m = k + db
                for col in sb.max(sc)..eb.min(ec) {
                    let mid = (col as isize + db) as usize;
                    if mid < sa || mid >= sa + band_a.len() {
                        continue;
                    }
                    band_c[col - sc] += band_a[mid - sa] * band_b[col - sb];
                }
            }
        }
        BandedMatrix { dim, bands: out }
    }

    pub fn adjoint(&self) -> BandedMatrix {
        let dim = self.dim;
        let mut out = BandedMatrix::new(dim);
        for (&d, band) in &self.bands {
            let (start, end) = Self::col_range(dim, d);
            for col in start..end {
                let row = (col as isize + d) as usize;
                let v = band[col - start];
                if v != ZERO {
                    out.set(col, row, v.conj());
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, other: &BandedMatrix, factor: Complex64) -> BandedMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (&d, band) in &other.bands {
            let (start, end) = Self::col_range(self.dim, d);
            let target = out
                .bands
                .entry(d)
                .or_insert_with(|| vec![ZERO; end - start]);
            for (t, &v) in target.iter_mut().zip(band) {
                *t += factor * v;
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> BandedMatrix {
        let mut out = self.clone();
        for band in out.bands.values_mut() {
            for v in band.iter_mut() {
                *v *= factor;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.bands
            .values()
            .flat_map(|b| b.iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }

    /// max_{j,k} |M[j,k] - conj(M[k,j])|.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&d, band) in &self.bands {
            let (start, end) = Self::col_range(self.dim, d);
            for col in start..end {
                let row = (col as isize + d) as usize;
                let v = band[col - start];
                let w = self.get(col, row);
                worst = worst.max((v - w.conj()).norm());
            }
        }
        worst
    }

    /// Schur row-sum bound on the operator norm.
    pub fn max_row_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.dim];
        for (&d, band) in &self.bands {
            let (start, end) = Self::col_range(self.dim, d);
            for col in start..end {
                let row = (col as isize + d) as usize;
                sums[row] += band[col - start].norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut m = Array2::from_elem((self.dim, self.dim), ZERO);
        for (&d, band) in &self.bands {
            let (start, end) = Self::col_range(self.dim, d);
            for col in start..end {
                let row = (col as isize + d) as usize;
                m[(row, col)] = band[col - start];
            }
        }
        m
    }

    /// Dense submatrix on the given (ascending) index set.
    pub fn dense_submatrix(&self, keep: &[usize]) -> Array2<Complex64> {
        let n = keep.len();
        let mut m = Array2::from_elem((n, n), ZERO);
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        for (&d, band) in &self.bands {
            let (start, end) = Self::col_range(self.dim, d);
            for col in start..end {
                let row = (col as isize + d) as usize;
                if let (Some(&i), Some(&j)) = (pos.get(&row), pos.get(&col)) {
                    m[(i, j)] = band[col - start];
                }
            }
        }
        m
    }

    /// Zero all rows and columns whose index fails the predicate.
    pub fn project<P: Fn(usize) -> bool>(&self, keep: P) -> BandedMatrix {
        let mut out = BandedMatrix::new(self.dim);
        for (&d, band) in &self.bands {
            let (start, end) = Self::col_range(self.dim, d);
            let mut new_band = vec![ZERO; end - start];
            let mut any = false;
            for col in start..end {
                let row = (col as isize + d) as usize;
                if keep(row) && keep(col) {
                    new_band[col - start] = band[col - start];
                    if band[col - start] != ZERO {
                        any = true;
                    }
                }
            }
            if any {
                out.bands.insert(d, new_band);
            }
        }
        out
    }
}

/// LU factorization of a banded matrix without pivoting.
///
/// Intended for shifted Hermitian matrices z I - H with Im z != 0, whose
/// Schur-complement pivots keep |Im| >= |Im z| and make elimination stable.
pub struct BandedLU {
    dim: usize,
    kl: usize,
    ku: usize,
    /// Row-major compact storage: row i holds entries for columns
    /// i-kl .. i+ku at slots 0 .. kl+ku.
    data: Vec<Complex64>,
    inv_diag: Vec<Complex64>,
}

impl BandedLU {
    pub fn factor(m: &BandedMatrix) -> Result<BandedLU> {
        let dim = m.dim();
        let bw = m.max_offset();
        let (kl, ku) = (bw, bw);
        let width = kl + ku + 1;
        let mut data = vec![ZERO; dim * width];
        for (&d, band) in &m.bands {
            let (start, end) = BandedMatrix::col_range(dim, d);
            for col in start..end {
                let row = (col as isize + d) as usize;
                // slot index: col - (row - kl)
                let slot = (col + kl) - row;
                data[row * width + slot] = band[col - start];
            }
        }
        let mut inv_diag = vec![ZERO; dim];
        for i in 0..dim {
            let pivot = data[i * width + kl];
            if pivot.norm() < 1e-300 {
                return Err(Error::ZeroPivot { index: i });
            }
            let inv = Complex64::new(1.0, 0.0) / pivot;
            inv_diag[i] = inv;
            let rmax = (i + kl).min(dim - 1);
            for r in i + 1..=rmax {
                // A[r, i] sits at slot (i + kl) - r
                let slot_ri = (i + kl) - r;
                let a_ri = data[r * width + slot_ri];
                if a_ri == ZERO {
                    continue;
                }
                let mult = a_ri * inv;
                data[r * width + slot_ri] = mult;
                let cmax = (i + ku).min(dim - 1);
                for c in i + 1..=cmax {
                    // A[r, c] -= mult * A[i, c]
                    let v = data[i * width + (c + kl) - i];
                    if v != ZERO {
                        data[r * width + (c + kl) - r] -= mult * v;
                    }
                }
            }
        }
        Ok(BandedLU { dim, kl, ku, data, inv_diag })
    }

    /// In-place solve of (LU) x = b.
    pub fn solve(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.dim);
        let width = self.kl + self.ku + 1;
        // Forward: L has unit diagonal, multipliers below.
        for i in 0..self.dim {
            let bi = b[i];
            if bi == ZERO {
                continue;
            }
            let rmax = (i + self.kl).min(self.dim - 1);
            for r in i + 1..=rmax {
                let mult = self.data[r * width + (i + self.kl) - r];
                if mult != ZERO {
                    b[r] -= mult * bi;
                }
            }
        }
        // Backward with U.
        for i in (0..self.dim).rev() {
            let cmax = (i + self.ku).min(self.dim - 1);
            let mut acc = b[i];
            for c in i + 1..=cmax {
                let u = self.data[i * width + (c + self.kl) - i];
                if u != ZERO {
                    acc -= u * b[c];
                }
            }
            b[i] = acc * self.inv_diag[i];
        }
    }
}
