//! Symbols on the cotangent bundle of the circle: finite Fourier series in x
//! with closed-form frequency profiles, their directional limits, predicted
//! essential spectra, class-constant estimates, and conjugate symbols for the
//! positive-commutator machinery.

use crate::error::{Error, Result};
use crate::profile::{parse_profile, Direction, SampledProfile, XiProfile};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

fn cis(t: f64) -> Complex64 {
    Complex64::new(t.cos(), t.sin())
}

/// A symbol a(x, xi) = sum over |l| <= L of c_l(xi) e^{2 pi i l x} on R/Z.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleSymbol {
    order: f64,
    coeffs: BTreeMap<i32, XiProfile>,
}

impl CircleSymbol {
    /// Build a symbol from coefficient profiles; the declared order must
    /// dominate every coefficient's profile order.
    pub fn new(order: f64, coeffs: BTreeMap<i32, XiProfile>) -> Result<Self> {
        for (&l, p) in &coeffs {
            let actual = p.order();
            if actual > order {
                return Err(Error::OrderTooSmall { declared: order, actual, l });
            }
        }
        Ok(CircleSymbol { order, coeffs })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn bandwidth(&self) -> i32 {
        self.coeffs.keys().map(|l| l.abs()).max().unwrap_or(0)
    }

    pub fn coeff(&self, l: i32) -> Option<&XiProfile> {
        self.coeffs.get(&l)
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, XiProfile> {
        &self.coeffs
    }

    /// Exact evaluation of the finite series; no quadrature involved.
    pub fn evaluate(&self, x: f64, xi: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&l, p)| p.eval(xi) * cis(TWO_PI * l as f64 * x))
            .sum()
    }

    /// Max |Im a| over the standard 128 x 32 reality-check grid.
    pub fn max_imag_on_grid(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ix in 0..128 {
            let x = ix as f64 / 128.0;
            for &xi in REALITY_XI_GRID.iter() {
                worst = worst.max(self.evaluate(x, xi).im.abs());
            }
        }
        worst
    }

    /// Reject symbols that are not real-valued. The imaginary part is
    /// measured against the symbol's scale on the grid, so that order-1
    /// conjugate symbols (values of size |xi|) are judged fairly.
    pub fn check_real(&self) -> Result<()> {
        let mut max_imag: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for ix in 0..128 {
            let x = ix as f64 / 128.0;
            for &xi in REALITY_XI_GRID.iter() {
                let v = self.evaluate(x, xi);
                max_imag = max_imag.max(v.im.abs());
                scale = scale.max(v.norm());
            }
        }
        if max_imag > 1e-12 * scale.max(1.0) {
            return Err(Error::NonRealSymbol { max_imag });
        }
        Ok(())
    }

    /// Rebuild interpolation tables after deserialization.
    pub fn rehydrate(self) -> Self {
        CircleSymbol {
            order: self.order,
            coeffs: self
                .coeffs
                .into_iter()
                .map(|(l, p)| (l, p.rehydrate()))
                .collect(),
        }
    }
}

const REALITY_XI_GRID: [f64; 32] = [
    0.0, 0.37, -0.37, 1.0, -1.0, 2.5, -2.5, 4.0, -4.0, 6.283185307179586,
    -6.283185307179586, 10.0, -10.0, 31.41592653589793, -31.41592653589793, 75.0, -75.0, 300.0,
    -300.0, 1.0e3, -1.0e3, 1.0e4, -1.0e4, 1.0e5, -1.0e5, 1.0e6, -1.0e6, 17.3, -17.3, 150.0,
    -150.0, 5.0e2,
];

/// Convenience constructor from grammar strings.
pub fn symbol_from_profiles(order: f64, entries: &[(i32, &str)]) -> Result<CircleSymbol> {
    let mut coeffs = BTreeMap::new();
    for (l, text) in entries {
        coeffs.insert(*l, parse_profile(text)?);
    }
    CircleSymbol::new(order, coeffs)
}

// ---------------------------------------------------------------------------
// Directional limits
// ---------------------------------------------------------------------------

/// The two high-frequency limit functions a(x, +1) and a(x, -1), stored as
/// Fourier coefficient vectors indexed by l + L.
#[derive(Debug, Clone)]
pub struct DirectionalLimits {
    pub bandwidth: i32,
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
}

impl DirectionalLimits {
    pub fn coeff(&self, dir: Direction, l: i32) -> Complex64 {
        let idx = (l + self.bandwidth) as usize;
        match dir {
            Direction::Plus => self.plus[idx],
            Direction::Minus => self.minus[idx],
        }
    }

    pub fn eval(&self, dir: Direction, x: f64) -> Complex64 {
        let coeffs = match dir {
            Direction::Plus => &self.plus,
            Direction::Minus => &self.minus,
        };
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * cis(TWO_PI * (i as i32 - self.bandwidth) as f64 * x))
            .sum()
    }

    /// Uniform samples of a(x, dir) on [0, 1).
    pub fn sample(&self, dir: Direction, n: usize) -> Vec<Complex64> {
        (0..n).map(|i| self.eval(dir, i as f64 / n as f64)).collect()
    }

    /// Coefficients of the x-derivative: multiply by 2 pi i l.
    pub fn derivative_coeffs(&self, dir: Direction) -> Vec<Complex64> {
        let coeffs = match dir {
            Direction::Plus => &self.plus,
            Direction::Minus => &self.minus,
        };
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l = (i as i32 - self.bandwidth) as f64;
                c * Complex64::new(0.0, TWO_PI * l)
            })
            .collect()
    }

    pub fn eval_derivative(&self, dir: Direction, x: f64) -> Complex64 {
        let d = self.derivative_coeffs(dir);
        d.iter()
            .enumerate()
            .map(|(i, c)| c * cis(TWO_PI * (i as i32 - self.bandwidth) as f64 * x))
            .sum()
    }

    pub fn max_unimodularity_deviation(&self, n_grid: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for dir in [Direction::Plus, Direction::Minus] {
            for i in 0..n_grid {
                let x = i as f64 / n_grid as f64;
                worst = worst.max((self.eval(dir, x).norm() - 1.0).abs());
            }
        }
        worst
    }
}

/// Coefficientwise limits of the symbol as xi -> +inf and xi -> -inf.
pub fn directional_limits(a: &CircleSymbol) -> Result<DirectionalLimits> {
    if a.order() != 0.0 {
        return Err(Error::NonZeroOrder { order: a.order() });
    }
    let bw = a.bandwidth();
    let mut plus = vec![Complex64::new(0.0, 0.0); (2 * bw + 1) as usize];
    let mut minus = plus.clone();
    for (&l, p) in a.coeffs() {
        let idx = (l + bw) as usize;
        plus[idx] = p.limit(Direction::Plus).map_err(|e| relabel(e, l))?;
        minus[idx] = p.limit(Direction::Minus).map_err(|e| relabel(e, l))?;
    }
    Ok(DirectionalLimits { bandwidth: bw, plus, minus })
}

fn relabel(e: Error, l: i32) -> Error {
    match e {
        Error::OrderInDirection { direction, .. } => Error::OrderInDirection { l, direction },
        Error::IndeterminateLimit { .. } => Error::IndeterminateLimit { l },
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Essential spectrum prediction
// ---------------------------------------------------------------------------

/// Predicted essential spectrum: the ranges of the two directional limit
/// functions, together with the critical value set N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EssentialSpectrumPrediction {
    pub interval_plus: (f64, f64),
    pub interval_minus: (f64, f64),
    pub critical_set: Vec<f64>,
    pub grid_resolution: usize,
}

impl EssentialSpectrumPrediction {
    pub fn distance_to_union(&self, lambda: f64) -> f64 {
        let d1 = interval_distance(lambda, self.interval_plus);
        let d2 = interval_distance(lambda, self.interval_minus);
        d1.min(d2)
    }

    pub fn union_contains(&self, lambda: f64, tol: f64) -> bool {
        self.distance_to_union(lambda) <= tol
    }
}

fn interval_distance(x: f64, (lo, hi): (f64, f64)) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

struct LimitFunction {
    coeffs: Vec<Complex64>,
    bandwidth: i32,
}

impl LimitFunction {
    fn value(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (c * cis(TWO_PI * (i as i32 - self.bandwidth) as f64 * x)).re)
            .sum()
    }

    fn derivative(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let l = (i as i32 - self.bandwidth) as f64;
                (c * Complex64::new(0.0, TWO_PI * l) * cis(TWO_PI * l * x)).re
            })
            .sum()
    }
}

/// Critical values of one directional limit function: values at sign changes
/// of the analytic x-derivative, bisection-refined; flat stretches contribute
/// their common value once.
fn critical_values(f: &LimitFunction, n_grid: usize, refine_tol: f64) -> Vec<f64> {
    let mut values = Vec::new();
    let deriv: Vec<f64> = (0..n_grid)
        .map(|i| f.derivative(i as f64 / n_grid as f64))
        .collect();
    let flat: Vec<bool> = deriv.iter().map(|d| d.abs() < refine_tol).collect();

    if flat.iter().all(|&b| b) {
        return vec![f.value(0.0)];
    }

    for i in 0..n_grid {
        let j = (i + 1) % n_grid;
        if flat[i] {
            values.push(f.value(i as f64 / n_grid as f64));
            continue;
        }
        if flat[j] {
            continue;
        }
        if deriv[i] * deriv[j] < 0.0 {
            let mut lo = i as f64 / n_grid as f64;
            let mut hi = (i + 1) as f64 / n_grid as f64;
            let mut dlo = deriv[i];
            while hi - lo > refine_tol {
                let mid = 0.5 * (lo + hi);
                let dm = f.derivative(mid);
                if dm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if dlo * dm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    dlo = dm;
                }
            }
            values.push(f.value(0.5 * (lo + hi)));
        }
    }
    dedupe_sorted(values, refine_tol.max(1e-12) * 10.0)
}

fn dedupe_sorted(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if out.last().map_or(true, |&w| (v - w).abs() > tol) {
            out.push(v);
        }
    }
    out
}

/// Predict the essential spectrum of Op(a) for a real 0th-order symbol:
/// the union of the ranges of a(x, +1) and a(x, -1), plus the critical set.
pub fn predict_essential_spectrum(
    a: &CircleSymbol,
    n_grid: usize,
    refine_tol: f64,
) -> Result<EssentialSpectrumPrediction> {
    if n_grid < 16 {
        return Err(Error::GridTooCoarse { n_grid, min: 16 });
    }
    a.check_real()?;
    let limits = directional_limits(a)?;

    let mut intervals = Vec::new();
    let mut critical = Vec::new();
    for dir in [Direction::Plus, Direction::Minus] {
        let f = LimitFunction {
            coeffs: match dir {
                Direction::Plus => limits.plus.clone(),
                Direction::Minus => limits.minus.clone(),
            },
            bandwidth: limits.bandwidth,
        };
        let crit = critical_values(&f, n_grid, refine_tol);
        let lo = crit.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = crit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        intervals.push((lo, hi));
        critical.extend(crit);
    }

    Ok(EssentialSpectrumPrediction {
        interval_plus: intervals[0],
        interval_minus: intervals[1],
        critical_set: dedupe_sorted(critical, refine_tol.max(1e-12) * 10.0),
        grid_resolution: n_grid,
    })
}

// ---------------------------------------------------------------------------
// Symbol class constants
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ClassConstant {
    pub alpha: usize,
    pub beta: usize,
    pub constant: f64,
    pub unbounded: bool,
}

/// Estimate the seminorm constants sup |d_x^alpha d_xi^beta a| (1+|xi|)^{beta-m}
/// over a grid. x-derivatives are analytic; xi-derivatives use central
/// differences with step max(1e-4, 1e-6 |xi|). An entry is flagged unbounded
/// when its running max still grows by more than 1% over the last probe decade.
pub fn estimate_symbol_class(
    a: &CircleSymbol,
    m: f64,
    alpha_max: usize,
    beta_max: usize,
    x_grid: usize,
    xi_probes: &[f64],
) -> Vec<ClassConstant> {
    assert!(alpha_max <= 3 && beta_max <= 3, "derivative orders capped at 3");
    let mut probes: Vec<f64> = xi_probes.to_vec();
    probes.sort_by(|p, q| p.abs().partial_cmp(&q.abs()).unwrap());
    let max_abs = probes.last().map_or(1.0, |p| p.abs());
    let decade_start = max_abs / 10.0;

    let xs: Vec<f64> = (0..x_grid).map(|i| i as f64 / x_grid as f64).collect();
    let mut out = Vec::new();
    for alpha in 0..=alpha_max {
        for beta in 0..=beta_max {
            let mut running: f64 = 0.0;
            let mut at_decade_start: Option<f64> = None;
            for &xi in &probes {
                if xi.abs() >= decade_start && at_decade_start.is_none() {
                    at_decade_start = Some(running);
                }
                let weight = (1.0 + xi.abs()).powf(beta as f64 - m);
                for &x in &xs {
                    let d = xi_derivative(a, alpha, beta, x, xi);
                    running = running.max(d.norm() * weight);
                }
            }
            let base = at_decade_start.unwrap_or(running);
            let unbounded = running > 1.01 * base.max(f64::MIN_POSITIVE);
            out.push(ClassConstant { alpha, beta, constant: running, unbounded });
        }
    }
    out
}

fn x_derivative_eval(a: &CircleSymbol, alpha: usize, x: f64, xi: f64) -> Complex64 {
    a.coeffs()
        .iter()
        .map(|(&l, p)| {
            let factor = Complex64::new(0.0, TWO_PI * l as f64).powu(alpha as u32);
            p.eval(xi) * factor * cis(TWO_PI * l as f64 * x)
        })
        .sum()
}

fn xi_derivative(a: &CircleSymbol, alpha: usize, beta: usize, x: f64, xi: f64) -> Complex64 {
    let h = (1e-6 * xi.abs()).max(1e-4);
    let f = |s: f64| x_derivative_eval(a, alpha, x, s);
    match beta {
        0 => f(xi),
        1 => (f(xi + h) - f(xi - h)) / (2.0 * h),
        2 => (f(xi + h) - f(xi) * 2.0 + f(xi - h)) / (h * h),
        3 => {
            (f(xi + 2.0 * h) - f(xi + h) * 2.0 + f(xi - h) * 2.0 - f(xi - 2.0 * h))
                / (2.0 * h * h * h)
        }
        _ => unreachable!(),
    }
}

/// Log-spaced probes covering [1, 10^6] in both directions.
pub fn default_class_probes() -> Vec<f64> {
    let mut probes = Vec::new();
    let per_decade = 4;
    let n = 6 * per_decade;
    for i in 0..=n {
        let xi = 10f64.powf(i as f64 / per_decade as f64);
        probes.push(xi);
        probes.push(-xi);
    }
    probes
}

// ---------------------------------------------------------------------------
// Fourier projection of sampled functions
// ---------------------------------------------------------------------------

/// Project f(x, xi) onto Fourier modes |l| <= L by the trapezoid rule on a
/// uniform x-grid, tabulating each coefficient on the probe set. Returns the
/// symbol and the reported tail bound max over probes of |c_L| + |c_{-L}|.
pub fn fourier_project<F>(
    f: F,
    l_max: i32,
    n_grid: usize,
    probes: &[f64],
    tail_tol: f64,
) -> Result<(CircleSymbol, f64)>
where
    F: Fn(f64, f64) -> Complex64,
{
    if n_grid < 4 * l_max.max(1) as usize {
        return Err(Error::GridTooCoarse { n_grid, min: 4 * l_max.max(1) as usize });
    }
    let mut probes = probes.to_vec();
    probes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    probes.dedup();

    let mut tables: BTreeMap<i32, Vec<Complex64>> = (-l_max..=l_max)
        .map(|l| (l, Vec::with_capacity(probes.len())))
        .collect();
    let mut tail: f64 = 0.0;
    for &xi in &probes {
        let samples: Vec<Complex64> = (0..n_grid)
            .map(|j| f(j as f64 / n_grid as f64, xi))
            .collect();
        for l in -l_max..=l_max {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                acc += s * cis(-TWO_PI * l as f64 * j as f64 / n_grid as f64);
            }
            tables.get_mut(&l).unwrap().push(acc / n_grid as f64);
        }
    }
    for i in 0..probes.len() {
        let top = tables[&l_max][i].norm() + tables[&(-l_max)][i].norm();
        tail = tail.max(top);
    }
    if tail > tail_tol {
        return Err(Error::TailBound { bound: tail, tol: tail_tol });
    }

    let coeffs: BTreeMap<i32, XiProfile> = tables
        .into_iter()
        .map(|(l, values)| {
            (l, XiProfile::Sampled(SampledProfile::new(probes.clone(), values)))
        })
        .collect();
    Ok((CircleSymbol::new(0.0, coeffs)?, tail))
}

// ---------------------------------------------------------------------------
// Conjugate symbols
// ---------------------------------------------------------------------------

/// Low-frequency window parameters: a bump at 0 removed from the conjugate
/// symbol so that b vanishes near xi = 0.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LowCutoff {
    pub r_in: f64,
    pub r_out: f64,
}

impl LowCutoff {
    pub const DEFAULT: LowCutoff = LowCutoff { r_in: PI, r_out: TWO_PI };
}

/// Width of the dirstep blend joining the two directional branches.
pub const DEFAULT_BLEND_WIDTH: f64 = 1.0;

fn blended_linear_symbol(
    plus_coeffs: &[Complex64],
    minus_coeffs: &[Complex64],
    bandwidth: i32,
    low_cutoff: LowCutoff,
    blend_width: f64,
) -> Result<CircleSymbol> {
    let mut coeffs = BTreeMap::new();
    for idx in 0..plus_coeffs.len() {
        let l = idx as i32 - bandwidth;
        let gp = plus_coeffs[idx];
        let gm = minus_coeffs[idx];
        if gp.norm() < 1e-300 && gm.norm() < 1e-300 {
            continue;
        }
        // [g_minus + (g_plus - g_minus) rise(xi)] * xi * (1 - bump)
        let blend = XiProfile::sum(vec![
            XiProfile::scaled(gm, XiProfile::Const(1.0)),
            XiProfile::scaled(gp - gm, XiProfile::rise(blend_width)),
        ]);
        let profile = XiProfile::product(vec![
            blend,
            XiProfile::Xi,
            XiProfile::one_minus_bump(0.0, low_cutoff.r_in, low_cutoff.r_out),
        ]);
        coeffs.insert(l, profile);
    }
    CircleSymbol::new(1.0, coeffs)
}

/// Conjugate symbol for the self-adjoint positive-commutator estimate:
/// b(x, xi) = d_x a0(x, sign xi) * xi * (1 - chi0(xi)), with the two
/// directional branches blended smoothly across the low-frequency window.
pub fn mourre_conjugate_symbol(
    a: &CircleSymbol,
    low_cutoff: LowCutoff,
    blend_width: f64,
) -> Result<CircleSymbol> {
    a.check_real()?;
    let limits = directional_limits(a)?;
    let dp = limits.derivative_coeffs(Direction::Plus);
    let dm = limits.derivative_coeffs(Direction::Minus);
    blended_linear_symbol(&dp, &dm, limits.bandwidth, low_cutoff, blend_width)
}

/// Conjugate symbol for the unitary variant: b = i a0 d_x conj(a0) * xi *
/// (1 - chi0), real-valued because the directional limits are unimodular.
pub fn unitary_conjugate_symbol(
    a: &CircleSymbol,
    low_cutoff: LowCutoff,
    blend_width: f64,
) -> Result<CircleSymbol> {
    let limits = directional_limits(a)?;
    let dev = limits.max_unimodularity_deviation(512);
    if dev > 1e-8 {
        return Err(Error::UnimodularityViolation { max_dev: dev });
    }
    let bw = limits.bandwidth;
    let g = |coeffs: &[Complex64]| -> Vec<Complex64> {
        // phi = a0 d_x conj(a0); coefficients by convolution, bandwidth 2L.
        let mut out = vec![Complex64::new(0.0, 0.0); (4 * bw + 1) as usize];
        for (ia, &ca) in coeffs.iter().enumerate() {
            let la = ia as i32 - bw;
            for (ib, &cb) in coeffs.iter().enumerate() {
                let lb = ib as i32 - bw;
                // (d_x conj(a0))_p for p = -lb is 2 pi i (-lb) conj(c_{lb})
                let p = -lb;
                let deriv = Complex64::new(0.0, TWO_PI * p as f64) * cb.conj();
                let l = la + p;
                out[(l + 2 * bw) as usize] += Complex64::new(0.0, 1.0) * ca * deriv;
            }
        }
        // Symmetrize to enforce reality of i * phi.
        let n = out.len();
        let mut sym = out.clone();
        for i in 0..n {
            sym[i] = (out[i] + out[n - 1 - i].conj()) * 0.5;
        }
        sym
    };
    let gp = g(&limits.plus);
    let gm = g(&limits.minus);
    blended_linear_symbol(&gp, &gm, 2 * bw, low_cutoff, blend_width)
}
