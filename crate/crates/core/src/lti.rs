//! Rational transfer functions, canonical realizations, and discretization.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{PolyError, Polynomial};

/// Default simulation sample period (1 kHz loop).
pub const DEFAULT_TS: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LtiError {
    #[error("improper system: numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },
    #[error("degenerate transfer function: zero denominator")]
    ZeroDenominator,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("bilinear substitution is singular: denominator has a root at s = 2/Ts = {0}")]
    SingularSubstitution(f64),
    #[error("common factor does not divide exactly (relative remainder {0:e})")]
    InexactCancellation(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TfRepr", into = "TfRepr")]
pub struct TransferFunction {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TfRepr {
    num: Polynomial,
    den: Polynomial,
}

impl TryFrom<TfRepr> for TransferFunction {
    type Error = LtiError;
    fn try_from(r: TfRepr) -> Result<Self, LtiError> {
        TransferFunction::new(r.num, r.den)
    }
}

impl From<TransferFunction> for TfRepr {
    fn from(tf: TransferFunction) -> Self {
        TfRepr {
            num: tf.num,
            den: tf.den,
        }
    }
}

impl TransferFunction {
    /// Stores `num/den` verbatim. No pole-zero cancellation is attempted.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, LtiError> {
        if den.is_zero() {
            return Err(LtiError::ZeroDenominator);
        }
        if !num.is_zero() && num.degree() > den.degree() {
            return Err(LtiError::Improper {
                num: num.degree(),
                den: den.degree(),
            });
        }
        Ok(Self { num, den })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self, LtiError> {
        Self::new(
            Polynomial::new(num.to_vec())?,
            Polynomial::new(den.to_vec())?,
        )
    }

    pub fn gain(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::constant(1.0),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn order(&self) -> usize {
        self.den.degree()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    pub fn poles(&self) -> Result<Vec<Complex64>, LtiError> {
        if self.den.degree() == 0 {
            return Ok(Vec::new());
        }
        Ok(self.den.roots()?)
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>, LtiError> {
        if self.num.is_zero() || self.num.degree() == 0 {
            return Ok(Vec::new());
        }
        Ok(self.num.roots()?)
    }

    /// Series connection `self * other`.
    pub fn series(&self, other: &TransferFunction) -> TransferFunction {
        Self {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    pub fn scale(&self, k: f64) -> TransferFunction {
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Evaluates at a complex point. A zero denominator yields an
    /// infinite-magnitude marker (`re = +inf`).
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let d = self.den.eval_complex(s);
        if d.norm() == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        self.num.eval_complex(s) / d
    }

    pub fn freq_response(&self, omegas: &[f64]) -> Vec<Complex64> {
        omegas
            .iter()
            .map(|&w| self.eval(Complex64::new(0.0, w)))
            .collect()
    }

    /// `num(0)/den(0)`; `f64::INFINITY` for a pole at the origin. A removable
    /// `0/0` is resolved by dividing out common powers of `s`.
    pub fn dc_gain(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let (n, kn) = self.num.strip_origin_roots();
        let (d, kd) = self.den.strip_origin_roots();
        if kn > kd {
            0.0
        } else if kn < kd {
            f64::INFINITY
        } else {
            n.constant_term() / d.constant_term()
        }
    }

    /// Divides numerator and denominator by `factor`. Fails unless both
    /// remainders are negligible relative to the dividend.
    pub fn cancel_common_factor(
        &self,
        factor: &Polynomial,
        tol: f64,
    ) -> Result<TransferFunction, LtiError> {
        let (nq, nr) = self.num.div_rem(factor)?;
        let (dq, dr) = self.den.div_rem(factor)?;
        let rel = |r: &Polynomial, p: &Polynomial| {
            r.max_abs_coeff() / p.max_abs_coeff().max(f64::MIN_POSITIVE)
        };
        let worst = rel(&nr, &self.num).max(rel(&dr, &self.den));
        if worst > tol {
            return Err(LtiError::InexactCancellation(worst));
        }
        TransferFunction::new(nq, dq)
    }

    /// Controllable canonical realization of the monic-normalized system.
    pub fn to_statespace(&self) -> StateSpace {
        let lead = self.den.leading();
        let den = self.den.scale(1.0 / lead);
        let num = self.num.scale(1.0 / lead);
        let n = den.degree();
        let (d, rem) = if !num.is_zero() && num.degree() == n {
            let d = num.leading();
            (d, &num - &den.scale(d))
        } else {
            (0.0, num)
        };
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, 1);
        let mut c = RowDVector::zeros(n);
        if n > 0 {
            for j in 0..n {
                a[(0, j)] = -den.coeff(n - 1 - j);
                c[j] = rem.coeff(n - 1 - j);
            }
            for i in 1..n {
                a[(i, i - 1)] = 1.0;
            }
            b[(0, 0)] = 1.0;
        }
        StateSpace {
            a,
            b,
            c,
            d: RowDVector::from_element(1, d),
        }
    }

    /// Bilinear (Tustin) discretization.
    pub fn discretize_tustin(&self, ts: f64) -> Result<DiscreteStateSpace, LtiError> {
        discretize_tustin_miso(&[&self.num], &self.den, ts)
    }
}

/// Continuous multi-input single-output state space. `b` is `n x m`, `d` is `1 x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: RowDVector<f64>,
    pub d: RowDVector<f64>,
}

impl StateSpace {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    /// Transfer function from the first input, recovered with the
    /// Faddeev-LeVerrier recursion (independent of the canonical layout).
    pub fn to_tf(&self) -> Result<TransferFunction, LtiError> {
        let n = self.order();
        let b = self.b.column(0).into_owned();
        let d = self.d[0];
        let mut charpoly = vec![1.0];
        let mut num = vec![0.0; n];
        let mut adj = DMatrix::<f64>::identity(n, n);
        for k in 1..=n {
            num[k - 1] = (&self.c * &adj * &b)[0];
            let an = &self.a * &adj;
            let ck = -an.trace() / k as f64;
            charpoly.push(ck);
            adj = an + DMatrix::identity(n, n) * ck;
        }
        let charpoly = Polynomial::new(charpoly)?;
        let strict = Polynomial::new(num)?;
        let full = &strict + &charpoly.scale(d);
        TransferFunction::new(full, charpoly)
    }

    /// Diagonal similarity that balances `a` (Parlett-Reinsch); same
    /// transfer function, better-scaled states.
    pub fn balanced(&self) -> StateSpace {
        let mut a = self.a.clone();
        let scale = nalgebra::linalg::balancing::balance_parlett_reinsch(&mut a);
        let mut b = self.b.clone();
        let mut c = self.c.clone();
        for i in 0..scale.len() {
            b.row_mut(i).unscale_mut(scale[i]);
            c[i] *= scale[i];
        }
        StateSpace {
            a,
            b,
            c,
            d: self.d.clone(),
        }
    }

    /// Bilinear map with `M = (I - A Ts/2)^-1`: `Ad = M (I + A Ts/2)`,
    /// `Bd = M B Ts`, `Cd = C M`, `Dd = D + C Bd / 2`.
    pub fn discretize_tustin(&self, ts: f64) -> Result<DiscreteStateSpace, LtiError> {
        check_ts(ts)?;
        let n = self.order();
        if n == 0 {
            return Ok(DiscreteStateSpace {
                a: self.a.clone(),
                b: self.b.clone(),
                c: self.c.clone(),
                d: self.d.clone(),
                ts,
            });
        }
        let half = &self.a * (ts / 2.0);
        let eye = DMatrix::<f64>::identity(n, n);
        let lu = (&eye - &half).lu();
        let singular = || LtiError::SingularSubstitution(2.0 / ts);
        let a = lu.solve(&(&eye + &half)).ok_or_else(singular)?;
        let b = lu.solve(&(&self.b * ts)).ok_or_else(singular)?;
        let c = (&eye - &half)
            .transpose()
            .lu()
            .solve(&self.c.transpose())
            .ok_or_else(singular)?
            .transpose();
        let d = &self.d + (&self.c * &b) * 0.5;
        Ok(DiscreteStateSpace { a, b, c, d, ts })
    }

    /// Exact zero-order-hold discretization via the exponential of the
    /// augmented block `[[A, B], [0, 0]] * Ts`.
    pub fn discretize_zoh(&self, ts: f64) -> Result<DiscreteStateSpace, LtiError> {
        check_ts(ts)?;
        let n = self.order();
        let m = self.inputs();
        let mut aug = DMatrix::zeros(n + m, n + m);
        aug.view_mut((0, 0), (n, n)).copy_from(&(&self.a * ts));
        aug.view_mut((0, n), (n, m)).copy_from(&(&self.b * ts));
        let e = expm(&aug);
        Ok(DiscreteStateSpace {
            a: e.view((0, 0), (n, n)).into_owned(),
            b: e.view((0, n), (n, m)).into_owned(),
            c: self.c.clone(),
            d: self.d.clone(),
            ts,
        })
    }
}

/// Discrete multi-input single-output state space with sample period `ts`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteStateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: RowDVector<f64>,
    pub d: RowDVector<f64>,
    pub ts: f64,
}

impl DiscreteStateSpace {
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        if self.order() == 0 {
            return Vec::new();
        }
        self.a.complex_eigenvalues().iter().copied().collect()
    }

    /// `max |eig(A)| < 1`.
    pub fn is_schur_stable(&self) -> bool {
        self.eigenvalues().iter().all(|z| z.norm() < 1.0)
    }

    /// `C (zI - A)^-1 B + D` at `z = exp(j w Ts)` for the first input.
    pub fn freq_response(&self, omegas: &[f64]) -> Vec<Complex64> {
        let n = self.order();
        let ac = self.a.map(|x| Complex64::new(x, 0.0));
        let bc = self.b.column(0).map(|x| Complex64::new(x, 0.0));
        let cc = self.c.map(|x| Complex64::new(x, 0.0));
        omegas
            .iter()
            .map(|&w| {
                let z = Complex64::from_polar(1.0, w * self.ts);
                let mut h = Complex64::new(self.d[0], 0.0);
                if n > 0 {
                    let m = DMatrix::<Complex64>::identity(n, n) * z - &ac;
                    match m.lu().solve(&bc) {
                        Some(x) => h += (&cc * x)[0],
                        None => return Complex64::new(f64::INFINITY, 0.0),
                    }
                }
                h
            })
            .collect()
    }
}

fn check_ts(ts: f64) -> Result<(), LtiError> {
    if ts.is_finite() && ts > 0.0 {
        Ok(())
    } else {
        Err(LtiError::Parameter(format!(
            "sample period must be positive, got {ts}"
        )))
    }
}

/// Observable canonical realization of several numerators over a shared
/// denominator: one input per numerator, one shared state vector.
pub fn realize_miso(nums: &[&Polynomial], den: &Polynomial) -> Result<StateSpace, LtiError> {
    let (a, b, c, d) = observable_form(nums, den)?;
    Ok(StateSpace { a, b, c, d })
}

type Realization = (DMatrix<f64>, DMatrix<f64>, RowDVector<f64>, RowDVector<f64>);

fn observable_form(nums: &[&Polynomial], den: &Polynomial) -> Result<Realization, LtiError> {
    if den.is_zero() {
        return Err(LtiError::ZeroDenominator);
    }
    let n = den.degree();
    for num in nums {
        if !num.is_zero() && num.degree() > n {
            return Err(LtiError::Improper {
                num: num.degree(),
                den: n,
            });
        }
    }
    let lead = den.leading();
    let den = den.scale(1.0 / lead);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, 0)] = -den.coeff(n - 1 - i);
        if i + 1 < n {
            a[(i, i + 1)] = 1.0;
        }
    }
    let mut b = DMatrix::zeros(n, nums.len());
    let mut d = RowDVector::zeros(nums.len());
    for (j, num) in nums.iter().enumerate() {
        let num = num.scale(1.0 / lead);
        let direct = num.coeff(n);
        d[j] = direct;
        for i in 0..n {
            b[(i, j)] = num.coeff(n - 1 - i) - direct * den.coeff(n - 1 - i);
        }
    }
    let mut c = RowDVector::zeros(n);
    if n > 0 {
        c[0] = 1.0;
    }
    Ok((a, b, c, d))
}

/// Tustin discretization of several numerators over a shared denominator
/// (one input per numerator, shared state). The continuous observable form
/// is balanced first, then mapped with the state-space bilinear formulas.
pub fn discretize_tustin_miso(
    nums: &[&Polynomial],
    den: &Polynomial,
    ts: f64,
) -> Result<DiscreteStateSpace, LtiError> {
    check_ts(ts)?;
    let c = 2.0 / ts;
    // a pole at s = 2/Ts has no image under the substitution
    let magnitude: f64 = den
        .coeffs()
        .iter()
        .rev()
        .enumerate()
        .map(|(k, a)| a.abs() * c.powi(k as i32))
        .sum();
    if den.eval(c).abs() <= 1e-12 * magnitude {
        return Err(LtiError::SingularSubstitution(c));
    }
    realize_miso(nums, den)?.balanced().discretize_tustin(ts)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor
/// series (terms dropped once below 1e-16 of the running sum).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 0 {
        return m.clone();
    }
    let norm = m
        .column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=60 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.abs().max() <= 1e-16 * sum.abs().max() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Steps a discrete system one sample at a time. States start at zero.
#[derive(Debug, Clone)]
pub struct Stepper {
    sys: DiscreteStateSpace,
    x: DVector<f64>,
    scratch: DVector<f64>,
}

impl Stepper {
    pub fn new(sys: DiscreteStateSpace) -> Self {
        let n = sys.order();
        Self {
            sys,
            x: DVector::zeros(n),
            scratch: DVector::zeros(n),
        }
    }

    pub fn system(&self) -> &DiscreteStateSpace {
        &self.sys
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x
    }

    /// `C x` without the feedthrough term.
    pub fn state_output(&self) -> f64 {
        self.sys
            .c
            .iter()
            .zip(self.x.iter())
            .map(|(c, x)| c * x)
            .sum()
    }

    pub fn feedthrough(&self, input: usize) -> f64 {
        self.sys.d[input]
    }

    pub fn output(&self, u: &[f64]) -> f64 {
        self.state_output() + self.sys.d.iter().zip(u).map(|(d, u)| d * u).sum::<f64>()
    }

    pub fn advance(&mut self, u: &[f64]) {
        let n = self.sys.order();
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.sys.a[(i, j)] * self.x[j];
            }
            for (j, &uj) in u.iter().enumerate() {
                acc += self.sys.b[(i, j)] * uj;
            }
            self.scratch[i] = acc;
        }
        std::mem::swap(&mut self.x, &mut self.scratch);
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite())
    }
}
