//! Closed-form frequency profiles c(xi) and their expression algebra.
//!
//! A profile is a small expression tree over five atoms (constant, smooth
//! directional step, smooth compactly supported bump, the identity `xi`,
//! and Japanese-bracket powers) plus sums, products, and complex scalar
//! multiples. Profiles obtained by projection of a sampled function are
//! carried as monotone-cubic sample tables.

use crate::error::{Error, Result};
use crate::taylor::bridge;
use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A frequency profile: one coefficient function c(xi) of a circle symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum XiProfile {
    /// Real constant.
    Const(f64),
    /// Smooth blend equal to `v_minus` for xi <= -width and `v_plus` for xi >= width.
    DirStep { v_plus: f64, v_minus: f64, width: f64 },
    /// Smooth cutoff identically 1 on |xi - center| <= r_in, 0 outside r_out.
    Bump { center: f64, r_in: f64, r_out: f64 },
    /// The identity xi.
    Xi,
    /// (1 + xi^2)^(power/2).
    JBracket { power: f64 },
    /// Tabulated profile with monotone cubic interpolation between probes
    /// and constant extrapolation beyond the outermost probes.
    Sampled(SampledProfile),
    Sum(Vec<XiProfile>),
    Product(Vec<XiProfile>),
    Scaled(Complex64, Box<XiProfile>),
}

impl XiProfile {
    pub fn scaled(c: Complex64, p: XiProfile) -> XiProfile {
        XiProfile::Scaled(c, Box::new(p)).normalized()
    }

    pub fn sum(terms: Vec<XiProfile>) -> XiProfile {
        XiProfile::Sum(terms).normalized()
    }

    pub fn product(factors: Vec<XiProfile>) -> XiProfile {
        XiProfile::Product(factors).normalized()
    }

    /// 1 - bump(center, r_in, r_out): the standard high-frequency window.
    pub fn one_minus_bump(center: f64, r_in: f64, r_out: f64) -> XiProfile {
        XiProfile::sum(vec![
            XiProfile::Const(1.0),
            XiProfile::scaled(
                Complex64::new(-1.0, 0.0),
                XiProfile::Bump { center, r_in, r_out },
            ),
        ])
    }

    /// Smooth 0-to-1 rise across [-width, width] (dirstep with values 1/0).
    pub fn rise(width: f64) -> XiProfile {
        XiProfile::DirStep { v_plus: 1.0, v_minus: 0.0, width }
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        match self {
            XiProfile::Const(v) => Complex64::new(*v, 0.0),
            XiProfile::DirStep { v_plus, v_minus, width } => {
                let s = (xi + width) / (2.0 * width);
                Complex64::new(v_minus + (v_plus - v_minus) * bridge(s), 0.0)
            }
            XiProfile::Bump { center, r_in, r_out } => {
                let s = ((xi - center).abs() - r_in) / (r_out - r_in);
                Complex64::new(1.0 - bridge(s), 0.0)
            }
            XiProfile::Xi => Complex64::new(xi, 0.0),
            XiProfile::JBracket { power } => {
                Complex64::new((1.0 + xi * xi).powf(power / 2.0), 0.0)
            }
            XiProfile::Sampled(table) => table.eval(xi),
            XiProfile::Sum(terms) => terms.iter().map(|t| t.eval(xi)).sum(),
            XiProfile::Product(factors) => factors
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.eval(xi)),
            XiProfile::Scaled(c, inner) => c * inner.eval(xi),
        }
    }

    /// Syntactic order: xi has order 1, jbracket(p) order p, the remaining
    /// atoms order 0; products add orders, sums take the maximum.
    pub fn order(&self) -> f64 {
        match self {
            XiProfile::Xi => 1.0,
            XiProfile::JBracket { power } => *power,
            XiProfile::Sum(terms) => terms
                .iter()
                .map(|t| t.order())
                .fold(f64::NEG_INFINITY, f64::max),
            XiProfile::Product(factors) => factors.iter().map(|f| f.order()).sum(),
            XiProfile::Scaled(_, inner) => inner.order(),
            _ => 0.0,
        }
    }

    /// Leading asymptotic term `coef * |xi|^power` in the given direction.
    /// A power of -infinity marks a profile that is eventually exactly zero.
    fn leading(&self, dir: Direction) -> Result<(Complex64, f64)> {
        match self {
            XiProfile::Const(v) => Ok((Complex64::new(*v, 0.0), 0.0)),
            XiProfile::DirStep { v_plus, v_minus, .. } => {
                let v = match dir {
                    Direction::Plus => *v_plus,
                    Direction::Minus => *v_minus,
                };
                Ok((Complex64::new(v, 0.0), 0.0))
            }
            XiProfile::Bump { .. } => Ok((Complex64::new(0.0, 0.0), f64::NEG_INFINITY)),
            XiProfile::Xi => {
                let sign = match dir {
                    Direction::Plus => 1.0,
                    Direction::Minus => -1.0,
                };
                Ok((Complex64::new(sign, 0.0), 1.0))
            }
            XiProfile::JBracket { power } => Ok((Complex64::new(1.0, 0.0), *power)),
            XiProfile::Sampled(table) => {
                let v = match dir {
                    Direction::Plus => *table.values.last().unwrap(),
                    Direction::Minus => table.values[0],
                };
                Ok((v, 0.0))
            }
            XiProfile::Scaled(c, inner) => {
                let (ci, p) = inner.leading(dir)?;
                Ok((c * ci, p))
            }
            XiProfile::Product(factors) => {
                let mut coef = Complex64::new(1.0, 0.0);
                let mut power = 0.0;
                for f in factors {
                    let (c, p) = f.leading(dir)?;
                    if p == f64::NEG_INFINITY || c == Complex64::new(0.0, 0.0) {
                        return Ok((Complex64::new(0.0, 0.0), f64::NEG_INFINITY));
                    }
                    coef *= c;
                    power += p;
                }
                Ok((coef, power))
            }
            XiProfile::Sum(terms) => {
                let mut groups: Vec<(f64, Complex64)> = Vec::new();
                for t in terms {
                    let (c, p) = t.leading(dir)?;
                    if p == f64::NEG_INFINITY {
                        continue;
                    }
                    match groups.iter_mut().find(|(gp, _)| *gp == p) {
                        Some((_, gc)) => *gc += c,
                        None => groups.push((p, c)),
                    }
                }
                groups.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
                match groups
                    .iter()
                    .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                {
                    Some(&(p, c)) => Ok((c, p)),
                    None => Ok((Complex64::new(0.0, 0.0), f64::NEG_INFINITY)),
                }
            }
        }
    }

    /// Limit as xi -> +inf or -inf; errors when the profile grows.
    ///
    /// Exact cancellation of leading terms at positive order is reported as
    /// indeterminate rather than guessed.
    pub fn limit(&self, dir: Direction) -> Result<Complex64> {
        let (c, p) = self.leading(dir)?;
        if p > 0.0 {
            if c == Complex64::new(0.0, 0.0) {
                return Err(Error::IndeterminateLimit { l: 0 });
            }
            return Err(Error::OrderInDirection { l: 0, direction: dir.sign() });
        }
        if p == 0.0 {
            Ok(c)
        } else {
            Ok(Complex64::new(0.0, 0.0))
        }
    }

    fn normalized(self) -> XiProfile {
        match self {
            XiProfile::Scaled(c, inner) => Self::apply_scale(c, inner.normalized()),
            XiProfile::Sum(terms) => {
                let terms: Vec<XiProfile> = terms.into_iter().map(|t| t.normalized()).collect();
                if terms.len() == 1 {
                    return terms.into_iter().next().unwrap();
                }
                // Fold a sum of pure scalars into one scalar.
                if terms.iter().all(|t| t.as_scalar().is_some()) {
                    let total: Complex64 = terms.iter().map(|t| t.as_scalar().unwrap()).sum();
                    return XiProfile::from_scalar(total);
                }
                XiProfile::Sum(terms)
            }
            XiProfile::Product(factors) => {
                let factors: Vec<XiProfile> =
                    factors.into_iter().map(|f| f.normalized()).collect();
                // Pull scalar factors out front.
                let mut scalar = Complex64::new(1.0, 0.0);
                let mut rest: Vec<XiProfile> = Vec::new();
                for f in factors {
                    match f {
                        XiProfile::Scaled(c, inner) => {
                            scalar *= c;
                            rest.push(*inner);
                        }
                        other => match other.as_scalar() {
                            Some(c) => scalar *= c,
                            None => rest.push(other),
                        },
                    }
                }
                let core = match rest.len() {
                    0 => XiProfile::Const(1.0),
                    1 => rest.into_iter().next().unwrap(),
                    _ => XiProfile::Product(rest),
                };
                Self::apply_scale(scalar, core)
            }
            other => other,
        }
    }

    /// Attach a scalar to an already-normalized profile without re-normalizing.
    fn apply_scale(c: Complex64, inner: XiProfile) -> XiProfile {
        match inner {
            XiProfile::Scaled(c2, inner2) => Self::apply_scale(c * c2, *inner2),
            XiProfile::Const(v) => Self::from_scalar(c * v),
            other if c == Complex64::new(1.0, 0.0) => other,
            other => XiProfile::Scaled(c, Box::new(other)),
        }
    }

    fn as_scalar(&self) -> Option<Complex64> {
        match self {
            XiProfile::Const(v) => Some(Complex64::new(*v, 0.0)),
            XiProfile::Scaled(c, inner) => match **inner {
                XiProfile::Const(v) => Some(c * v),
                _ => None,
            },
            _ => None,
        }
    }

    fn from_scalar(c: Complex64) -> XiProfile {
        if c.im == 0.0 {
            XiProfile::Const(c.re)
        } else {
            XiProfile::Scaled(c, Box::new(XiProfile::Const(1.0)))
        }
    }

    /// Canonical text form; inverse of [`parse_profile`] for analytic trees.
    pub fn print(&self) -> String {
        match self {
            XiProfile::Const(v) => fmt_f64(*v),
            XiProfile::DirStep { v_plus, v_minus, width } => {
                format!(
                    "dirstep({}, {}, {})",
                    fmt_f64(*v_plus),
                    fmt_f64(*v_minus),
                    fmt_f64(*width)
                )
            }
            XiProfile::Bump { center, r_in, r_out } => {
                format!(
                    "bump({}, {}, {})",
                    fmt_f64(*center),
                    fmt_f64(*r_in),
                    fmt_f64(*r_out)
                )
            }
            XiProfile::Xi => "xi".to_string(),
            XiProfile::JBracket { power } => format!("jbracket({})", fmt_f64(*power)),
            XiProfile::Sampled(t) => format!("table[{} probes]", t.probes.len()),
            XiProfile::Sum(terms) => terms
                .iter()
                .map(|t| t.print())
                .collect::<Vec<_>>()
                .join(" + "),
            XiProfile::Product(factors) => factors
                .iter()
                .map(|f| match f {
                    XiProfile::Sum(_) => format!("({})", f.print()),
                    _ => f.print(),
                })
                .collect::<Vec<_>>()
                .join(" * "),
            XiProfile::Scaled(c, inner) => {
                let scalar = fmt_complex(*c);
                if matches!(**inner, XiProfile::Const(v) if v == 1.0) {
                    return scalar;
                }
                let inner_str = match **inner {
                    XiProfile::Sum(_) => format!("({})", inner.print()),
                    _ => inner.print(),
                };
                format!("{} * {}", scalar, inner_str)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(&self) -> i8 {
        match self {
            Direction::Plus => 1,
            Direction::Minus => -1,
        }
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{}", v)
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        fmt_f64(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt_f64(c.im))
    } else {
        format!("({} + {}i)", fmt_f64(c.re), fmt_f64(c.im))
    }
}

// ---------------------------------------------------------------------------
// Sampled profiles (monotone cubic, constant extrapolation)
// ---------------------------------------------------------------------------

/// Tabulated profile on an ascending probe set. Real and imaginary parts are
/// interpolated independently with the Fritsch-Carlson monotone cubic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    pub probes: Vec<f64>,
    pub values: Vec<Complex64>,
    #[serde(skip)]
    slopes: Vec<Complex64>,
}

impl SampledProfile {
    pub fn new(probes: Vec<f64>, values: Vec<Complex64>) -> Self {
        assert_eq!(probes.len(), values.len());
        assert!(probes.len() >= 2, "need at least two probes");
        assert!(
            probes.windows(2).all(|w| w[0] < w[1]),
            "probes must be strictly ascending"
        );
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = values.iter().map(|v| v.im).collect();
        let sre = pchip_slopes(&probes, &re);
        let sim = pchip_slopes(&probes, &im);
        let slopes = sre
            .into_iter()
            .zip(sim)
            .map(|(r, i)| Complex64::new(r, i))
            .collect();
        SampledProfile { probes, values, slopes }
    }

    fn ensure_slopes(&self) -> SampledProfile {
        if self.slopes.len() == self.values.len() {
            self.clone()
        } else {
            SampledProfile::new(self.probes.clone(), self.values.clone())
        }
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        let n = self.probes.len();
        if xi <= self.probes[0] {
            return self.values[0];
        }
        if xi >= self.probes[n - 1] {
            return self.values[n - 1];
        }
        debug_assert_eq!(self.slopes.len(), n, "slopes not initialized");
        let i = match self
            .probes
            .binary_search_by(|p| p.partial_cmp(&xi).unwrap())
        {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = self.probes[i + 1] - self.probes[i];
        let s = (xi - self.probes[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        self.values[i] * h00
            + self.slopes[i] * (h * h10)
            + self.values[i + 1] * h01
            + self.slopes[i + 1] * (h * h11)
    }
}

fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 2 {
        let d = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return vec![d, d];
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    m[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    m
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Parse the profile grammar:
/// `expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
/// factor := ['-'] (scalar | atom | '(' expr ')')`.
/// Scalars are decimal floats, optionally with an `i` suffix.
pub fn parse_profile(text: &str) -> Result<XiProfile> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let expr = p.parse_expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(Error::Syntax {
            offset: p.pos,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(expr.normalized())
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: self.pos,
                message: format!("expected '{}'", ch as char),
            })
        }
    }

    fn parse_expr(&mut self) -> Result<XiProfile> {
        let mut terms = vec![self.parse_term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.parse_term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.parse_term()?;
                    terms.push(XiProfile::Scaled(Complex64::new(-1.0, 0.0), Box::new(t)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.into_iter().next().unwrap()
        } else {
            XiProfile::Sum(terms)
        })
    }

    fn parse_term(&mut self) -> Result<XiProfile> {
        let mut factors = vec![self.parse_factor()?];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            factors.push(self.parse_factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.into_iter().next().unwrap()
        } else {
            XiProfile::Product(factors)
        })
    }

    fn parse_factor(&mut self) -> Result<XiProfile> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let f = self.parse_factor()?;
                Ok(XiProfile::Scaled(Complex64::new(-1.0, 0.0), Box::new(f)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.parse_number()?;
                if self.src.get(self.pos) == Some(&b'i') && !self.ident_continues(self.pos + 1) {
                    self.pos += 1;
                    Ok(XiProfile::Scaled(
                        Complex64::new(0.0, v),
                        Box::new(XiProfile::Const(1.0)),
                    ))
                } else {
                    Ok(XiProfile::Const(v))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => self.parse_atom(),
            _ => Err(Error::Syntax {
                offset: self.pos,
                message: "expected scalar, atom, or '('".into(),
            }),
        }
    }

    fn ident_continues(&self, pos: usize) -> bool {
        matches!(self.src.get(pos), Some(c) if c.is_ascii_alphanumeric() || *c == b'_')
    }

    fn parse_number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if matches!(self.src.get(probe), Some(b'+') | Some(b'-')) {
                probe += 1;
            }
            if matches!(self.src.get(probe), Some(c) if c.is_ascii_digit()) {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("invalid number '{}'", text),
        })
    }

    fn parse_signed_number(&mut self) -> Result<f64> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.parse_number()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.parse_number()
            }
            _ => self.parse_number(),
        }
    }

    fn parse_atom(&mut self) -> Result<XiProfile> {
        self.skip_ws();
        let start = self.pos;
        while self.ident_continues(self.pos) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "xi" => Ok(XiProfile::Xi),
            "i" => Ok(XiProfile::Scaled(
                Complex64::new(0.0, 1.0),
                Box::new(XiProfile::Const(1.0)),
            )),
            "const" => {
                let args = self.parse_args(1, start)?;
                Ok(XiProfile::Const(args[0]))
            }
            "dirstep" => {
                let args = self.parse_args(3, start)?;
                if args[2] <= 0.0 {
                    return Err(Error::AtomArgs {
                        offset: start,
                        message: format!("dirstep width must be > 0, got {}", args[2]),
                    });
                }
                Ok(XiProfile::DirStep {
                    v_plus: args[0],
                    v_minus: args[1],
                    width: args[2],
                })
            }
            "bump" => {
                let args = self.parse_args(3, start)?;
                if args[1] < 0.0 || args[1] >= args[2] {
                    return Err(Error::AtomArgs {
                        offset: start,
                        message: format!(
                            "bump radii must satisfy 0 <= r_in < r_out, got ({}, {})",
                            args[1], args[2]
                        ),
                    });
                }
                Ok(XiProfile::Bump {
                    center: args[0],
                    r_in: args[1],
                    r_out: args[2],
                })
            }
            "jbracket" => {
                let args = self.parse_args(1, start)?;
                Ok(XiProfile::JBracket { power: args[0] })
            }
            "" => Err(Error::Syntax {
                offset: start,
                message: "expected atom name".into(),
            }),
            other => Err(Error::Syntax {
                offset: start,
                message: format!("unknown atom '{}'", other),
            }),
        }
    }

    fn parse_args(&mut self, count: usize, atom_offset: usize) -> Result<Vec<f64>> {
        self.expect(b'(')?;
        let mut args = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                self.expect(b',')?;
            }
            args.push(self.parse_signed_number()?);
        }
        if self.peek() == Some(b',') {
            return Err(Error::AtomArgs {
                offset: atom_offset,
                message: format!("expected {} arguments", count),
            });
        }
        self.expect(b')')?;
        Ok(args)
    }
}

// ---------------------------------------------------------------------------
// Serialization: analytic trees as grammar strings, tables as objects
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TableRepr {
    probes: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for XiProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            XiProfile::Sampled(t) => TableRepr {
                probes: t.probes.clone(),
                re: t.values.iter().map(|v| v.re).collect(),
                im: t.values.iter().map(|v| v.im).collect(),
            }
            .serialize(serializer),
            other => serializer.serialize_str(&other.print()),
        }
    }
}

impl<'de> Deserialize<'de> for XiProfile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Table(TableRepr),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => parse_profile(&s).map_err(D::Error::custom),
            Repr::Table(t) => {
                if t.probes.len() != t.re.len() || t.re.len() != t.im.len() {
                    return Err(D::Error::custom("table arrays must have equal length"));
                }
                let values = t
                    .re
                    .iter()
                    .zip(&t.im)
                    .map(|(&r, &i)| Complex64::new(r, i))
                    .collect();
                Ok(XiProfile::Sampled(SampledProfile::new(t.probes, values)))
            }
        }
    }
}

impl XiProfile {
    /// Rebuild interpolation slopes after deserialization.
    pub fn rehydrate(self) -> XiProfile {
        match self {
            XiProfile::Sampled(t) => XiProfile::Sampled(t.ensure_slopes()),
            XiProfile::Sum(ts) => XiProfile::Sum(ts.into_iter().map(|t| t.rehydrate()).collect()),
            XiProfile::Product(fs) => {
                XiProfile::Product(fs.into_iter().map(|f| f.rehydrate()).collect())
            }
            XiProfile::Scaled(c, inner) => XiProfile::Scaled(c, Box::new(inner.rehydrate())),
            other => other,
        }
    }
}
