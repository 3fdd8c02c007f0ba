//! Real polynomials in the Laplace variable.
//!
//! Coefficients are stored in descending-degree order: `coeffs[0]` is the
//! leading coefficient. The canonical zero polynomial is `[0.0]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default relative tolerance for evenness checks and axis rejection.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial coefficient {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("polynomial is not even: coefficient of s^{power} is {value:e}")]
    NotEven { power: usize, value: f64 },
    #[error(
        "polynomial is not nonnegative on the imaginary axis (leading-sign condition violated)"
    )]
    NotNonnegative,
    #[error("root {root} lies on the imaginary axis; no strictly stable spectral factor exists")]
    MarginalFactorization { root: Complex64 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from descending coefficients, stripping exact
    /// leading zeros. An empty slice is the zero polynomial.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Result<Self, PolyError> {
        let coeffs = coeffs.into();
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(PolyError::NonFinite { index, value });
        }
        Ok(Self::from_vec_unchecked(coeffs))
    }

    fn from_vec_unchecked(mut coeffs: Vec<f64>) -> Self {
        let first = coeffs
            .iter()
            .position(|&c| c != 0.0)
            .unwrap_or(coeffs.len());
        coeffs.drain(..first);
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_vec_unchecked(vec![c])
    }

    /// The monomial `c * s^power`.
    pub fn monomial(c: f64, power: usize) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[0] = c;
        Self::from_vec_unchecked(coeffs)
    }

    /// `gain * prod (s - r)`. Roots must come in conjugate pairs for the
    /// result to be real; imaginary residue of the expansion is dropped.
    pub fn from_roots(gain: f64, roots: &[Complex64]) -> Self {
        let mut acc = vec![Complex64::new(gain, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (i, &c) in acc.iter().enumerate() {
                next[i] += c;
                next[i + 1] -= c * r;
            }
            acc = next;
        }
        Self::from_vec_unchecked(acc.into_iter().map(|c| c.re).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient of `s^power` (zero beyond the degree).
    pub fn coeff(&self, power: usize) -> f64 {
        let deg = self.degree();
        if power > deg {
            0.0
        } else {
            self.coeffs[deg - power]
        }
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `p(-s)`: odd-power coefficients change sign.
    pub fn paraconjugate(&self) -> Self {
        let deg = self.degree();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if (deg - i) % 2 == 1 { -c } else { c })
            .collect();
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        let deg = self.degree();
        if deg == 0 {
            return Self::zero();
        }
        Self::from_vec_unchecked(
            self.coeffs[..deg]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (deg - i) as f64)
                .collect(),
        )
    }

    /// Euclidean division: `self = quot * divisor + rem`, `deg rem < deg divisor`.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let dn = divisor.degree();
        let nn = self.degree();
        if nn < dn || self.is_zero() {
            return Ok((Self::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; nn - dn + 1];
        let lead = divisor.leading();
        for i in 0..quot.len() {
            let f = rem[i] / lead;
            quot[i] = f;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= f * d;
            }
            rem[i] = 0.0;
        }
        let rem_tail = rem[quot.len()..].to_vec();
        Ok((
            Self::from_vec_unchecked(quot),
            Self::from_vec_unchecked(rem_tail),
        ))
    }

    /// Removes exact trailing zero coefficients, returning the reduced
    /// polynomial and the number of roots at the origin that were stripped.
    pub fn strip_origin_roots(&self) -> (Polynomial, usize) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        let zeros = self.coeffs.iter().rev().take_while(|&&c| c == 0.0).count();
        let keep = self.coeffs.len() - zeros;
        (
            Self::from_vec_unchecked(self.coeffs[..keep].to_vec()),
            zeros,
        )
    }

    /// All complex roots with multiplicity, from the eigenvalues of the
    /// balanced companion matrix of the monic normalization.
    pub fn roots(&self) -> Result<Vec<Complex64>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Degenerate("roots of the zero polynomial"));
        }
        if self.degree() == 0 {
            return Err(PolyError::Degenerate("roots of a constant polynomial"));
        }
        let (reduced, origin) = self.strip_origin_roots();
        let mut roots = vec![Complex64::new(0.0, 0.0); origin];
        let n = reduced.degree();
        if n == 0 {
            return Ok(roots);
        }
        let lead = reduced.leading();
        if n == 1 {
            roots.push(Complex64::new(-reduced.coeffs[1] / lead, 0.0));
            return Ok(roots);
        }
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            companion[(0, j)] = -reduced.coeffs[j + 1] / lead;
        }
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        nalgebra::linalg::balancing::balance_parlett_reinsch(&mut companion);
        for z in schur_eigenvalues(companion) {
            let z = polish_root(&reduced, z);
            if !z.is_finite() {
                return Err(PolyError::Degenerate("root finder did not converge"));
            }
            roots.push(z);
        }
        Ok(roots)
    }

    /// True iff every root has real part strictly below `-margin`.
    pub fn is_hurwitz(&self, margin: f64) -> Result<bool, PolyError> {
        Ok(self.roots()?.iter().all(|r| r.re < -margin))
    }
}

/// Eigenvalues read off the real Schur form. The 2x2 blocks are solved
/// here because nalgebra's own extraction yields NaN for nearly defective
/// blocks (double roots).
fn schur_eigenvalues(m: DMatrix<f64>) -> Vec<Complex64> {
    let n = m.nrows();
    let (_, t) = m.schur().unpack();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let mid = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let disc = half * half + b * c;
            if disc >= 0.0 {
                let r = disc.sqrt();
                out.push(Complex64::new(mid + r, 0.0));
                out.push(Complex64::new(mid - r, 0.0));
            } else {
                let im = (-disc).sqrt();
                out.push(Complex64::new(mid, im));
                out.push(Complex64::new(mid, -im));
            }
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    out
}

/// One guarded Newton step; kept only if it lowers the residual.
fn polish_root(p: &Polynomial, z: Complex64) -> Complex64 {
    let dp = p.derivative();
    let f = p.eval_complex(z);
    let df = dp.eval_complex(z);
    if df.norm() == 0.0 {
        return z;
    }
    let candidate = z - f / df;
    if candidate.is_finite() && p.eval_complex(candidate).norm() < f.norm() {
        candidate
    } else {
        z
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = PolyError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Polynomial::new(v)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let deg = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let power = deg - i;
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match power {
                0 => write!(f, "{mag}")?,
                _ if mag == 1.0 => {}
                _ => write!(f, "{mag}")?,
            }
            match power {
                0 => {}
                1 => write!(f, "s")?,
                _ => write!(f, "s^{power}")?,
            }
        }
        Ok(())
    }
}

fn combine(a: &Polynomial, b: &Polynomial, sign: f64) -> Polynomial {
    let n = a.coeffs.len().max(b.coeffs.len());
    let mut out = vec![0.0; n];
    for (i, &c) in a.coeffs.iter().enumerate() {
        out[n - a.coeffs.len() + i] += c;
    }
    for (i, &c) in b.coeffs.iter().enumerate() {
        out[n - b.coeffs.len() + i] += sign * c;
    }
    Polynomial::from_vec_unchecked(out)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        combine(self, rhs, -1.0)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        poly_mul(self, rhs)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

/// Coefficient convolution.
pub fn poly_mul(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.is_zero() || q.is_zero() {
        return Polynomial::zero();
    }
    let mut out = vec![0.0; p.coeffs.len() + q.coeffs.len() - 1];
    for (i, &a) in p.coeffs.iter().enumerate() {
        for (j, &b) in q.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Polynomial::from_vec_unchecked(out)
}

/// `max |a_i - b_i| / max |b_i|`, coefficients aligned by power.
pub fn relative_coeff_error(a: &Polynomial, reference: &Polynomial) -> f64 {
    let diff = a - reference;
    let scale = reference.max_abs_coeff();
    if scale == 0.0 {
        diff.max_abs_coeff()
    } else {
        diff.max_abs_coeff() / scale
    }
}

/// Stable spectral factor of an even polynomial.
///
/// Returns `d` with all roots in the open left half-plane, positive leading
/// coefficient, and `d(-s) d(s) = e(s)`. The even polynomial is rewritten as
/// `F(x)` with `x = s^2`; every root `x` of `F` contributes the pair
/// `s = ±sqrt(x)` and the left-half-plane member `-sqrt(x)` is kept.
pub fn spectral_factor(e: &Polynomial, tol: f64) -> Result<Polynomial, PolyError> {
    if e.is_zero() {
        return Err(PolyError::Degenerate(
            "spectral factor of the zero polynomial",
        ));
    }
    let scale = e.max_abs_coeff();
    let deg = e.degree();
    for power in (1..=deg).step_by(2) {
        let c = e.coeff(power);
        if c.abs() > tol * scale {
            return Err(PolyError::NotEven { power, value: c });
        }
    }
    if deg % 2 == 1 {
        // leading odd term is below tolerance only if it is exactly zero,
        // which construction rules out
        return Err(PolyError::NotEven {
            power: deg,
            value: e.leading(),
        });
    }
    let m = deg / 2;
    let signed_lead = if m.is_multiple_of(2) {
        e.leading()
    } else {
        -e.leading()
    };
    if signed_lead <= 0.0 {
        return Err(PolyError::NotNonnegative);
    }
    if m == 0 {
        return Ok(Polynomial::constant(signed_lead.sqrt()));
    }
    let halved = Polynomial::from_vec_unchecked((0..=m).map(|i| e.coeff(2 * (m - i))).collect());
    if halved.constant_term() == 0.0 {
        return Err(PolyError::MarginalFactorization {
            root: Complex64::new(0.0, 0.0),
        });
    }
    let axis_tol = tol.sqrt();
    let mut selected = Vec::with_capacity(m);
    for x in halved.roots()? {
        let w = x.sqrt();
        if w.re <= axis_tol * w.norm() {
            return Err(PolyError::MarginalFactorization { root: w });
        }
        selected.push(-w);
    }
    // conjugate pairs of x give conjugate s; snap near-real ones to the axis
    for r in selected.iter_mut() {
        if r.im.abs() <= tol * r.norm() {
            r.im = 0.0;
        }
    }
    Ok(Polynomial::from_roots(signed_lead.sqrt(), &selected))
}
