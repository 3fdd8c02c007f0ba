//! Two-degree-of-freedom controller synthesis for a SISO plant `b(s)/a(s)`.
//!
//! The loop is `u = C1 r - C2 (y + n)`, `y = P (u + d)`. Design proceeds by
//! two spectral factorizations:
//!
//! - `rho^2 a(-s) a(s) + b(-s) b(s) = d_rho(-s) d_rho(s)`
//! - `-k^2 s^2 a(-s) a(s) + lambda^2 b(-s) b(s) = d_lk(-s) d_lk(s)`
//!
//! followed by the Diophantine equation `a p + b q = d_rho d_lk` with
//! `deg p = n + 1` and `p(0) = 0`, giving the feedback part `C2 = q/p` and
//! the feedforward part `C1 = (d_rho(0)/b(0)) d_lk / p`. The reference
//! transfer collapses to `(d_rho(0)/b(0)) b / d_rho`, so `rho` shapes
//! tracking while `lambda` and `k` shape disturbance and noise rejection.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lti::{LtiError, TransferFunction};
use crate::poly::{relative_coeff_error, spectral_factor, PolyError, Polynomial};

/// Relative root distance below which a plant/controller root pair counts
/// as a near-cancellation.
pub const CANCELLATION_TOL: f64 = 1e-6;

/// Column-equilibrated condition number above which the Diophantine system
/// is treated as singular.
const MAX_SYLVESTER_CONDITION: f64 = 1e12;

/// Default derivative filter coefficient for the PID baseline.
pub const DEFAULT_PID_FILTER: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("invalid design parameter: {0}")]
    Parameter(String),
    #[error("plant numerator vanishes at s = 0; unity DC tracking is impossible")]
    ZeroPlantDcGain,
    #[error("plant numerator and denominator are not coprime ({0})")]
    NotCoprime(String),
    #[error("algebraic loop: 1 + P C2 is identically zero")]
    SingularLoop,
    #[error("spectral factorization failed in {step}: {source}")]
    Factorization {
        step: &'static str,
        #[source]
        source: PolyError,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Lti(#[from] LtiError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoDofController {
    pub c1: TransferFunction,
    pub c2: TransferFunction,
    pub d_rho: Polynomial,
    pub d_lambda_k: Polynomial,
    pub p: Polynomial,
    pub q: Polynomial,
    pub rho: f64,
    pub lambda: f64,
    pub k: f64,
    pub diagnostics: DesignDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignDiagnostics {
    /// `||a p + b q - d_rho d_lk|| / ||d_rho d_lk||` (max-norm on coefficients).
    pub bezout_residual: f64,
    /// 2-norm condition number of the column-equilibrated Diophantine matrix.
    pub sylvester_condition: f64,
}

impl TwoDofController {
    /// `d_rho(0) / b(0)`, the feedforward gain that makes `T_ref(0) = 1`.
    pub fn feedforward_gain(&self, plant: &TransferFunction) -> f64 {
        self.d_rho.constant_term() / plant.num().constant_term()
    }

    /// The reference transfer predicted by the design, `g b / d_rho`.
    pub fn target_reference(&self, plant: &TransferFunction) -> Result<TransferFunction, LtiError> {
        TransferFunction::new(
            plant.num().scale(self.feedforward_gain(plant)),
            self.d_rho.clone(),
        )
    }

    /// Closed-loop characteristic polynomial implied by the design.
    pub fn characteristic(&self) -> Polynomial {
        &self.d_rho * &self.d_lambda_k
    }
}

fn check_weight(name: &str, v: f64) -> Result<(), SynthesisError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SynthesisError::Parameter(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn roots_or_empty(p: &Polynomial) -> Result<Vec<Complex64>, PolyError> {
    if p.degree() == 0 {
        Ok(Vec::new())
    } else {
        p.roots()
    }
}

fn near(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

/// Full 2-DOF design for plant `b/a` with weights `rho`, `lambda`, `k`.
pub fn design_2dof(
    plant: &TransferFunction,
    rho: f64,
    lambda: f64,
    k: f64,
    tol: f64,
) -> Result<TwoDofController, SynthesisError> {
    check_weight("rho", rho)?;
    check_weight("lambda", lambda)?;
    check_weight("k", k)?;
    let a = plant.den();
    let b = plant.num();
    if b.is_zero() {
        return Err(SynthesisError::ZeroPlantDcGain);
    }
    let n = a.degree();
    if n == 0 {
        return Err(SynthesisError::Parameter(
            "plant must have at least one pole".into(),
        ));
    }
    if b.constant_term().abs() <= tol * b.max_abs_coeff() {
        return Err(SynthesisError::ZeroPlantDcGain);
    }
    let plant_poles = a.roots()?;
    for zero in roots_or_empty(b)? {
        if let Some(pole) = plant_poles
            .iter()
            .find(|&&pole| near(pole, zero, CANCELLATION_TOL))
        {
            return Err(SynthesisError::NotCoprime(format!(
                "common root near {pole}"
            )));
        }
    }

    let aa = &a.paraconjugate() * a;
    let bb = &b.paraconjugate() * b;

    let e_rho = &aa.scale(rho * rho) + &bb;
    let d_rho = spectral_factor(&e_rho, tol).map_err(|source| SynthesisError::Factorization {
        step: "tracking factor d_rho",
        source,
    })?;

    let s2 = Polynomial::monomial(1.0, 2);
    let e_lk = &(&s2 * &aa).scale(-k * k) + &bb.scale(lambda * lambda);
    let d_lambda_k =
        spectral_factor(&e_lk, tol).map_err(|source| SynthesisError::Factorization {
            step: "rejection factor d_lambda_k",
            source,
        })?;

    let target = &d_rho * &d_lambda_k;
    let (p, q, condition) = solve_diophantine(a, b, &target)?;

    let bezout_residual = relative_coeff_error(&(&(a * &p) + &(b * &q)), &target);
    let gain = d_rho.constant_term() / b.constant_term();
    let c1 = TransferFunction::new(d_lambda_k.scale(gain), p.clone())?;
    let c2 = TransferFunction::new(q.clone(), p.clone())?;
    Ok(TwoDofController {
        c1,
        c2,
        d_rho,
        d_lambda_k,
        p,
        q,
        rho,
        lambda,
        k,
        diagnostics: DesignDiagnostics {
            bezout_residual,
            sylvester_condition: condition,
        },
    })
}

/// Solves `a p + b q = c` with `deg p = n + 1`, `p(0) = 0`, `deg q <= n`.
///
/// Unknowns are the `n + 1` nonzero-power coefficients of `p` and the
/// `n + 1` coefficients of `q`; equations are the `2n + 2` coefficients of
/// `c`. The system is square and nonsingular exactly when `s a` and `b` are
/// coprime.
fn solve_diophantine(
    a: &Polynomial,
    b: &Polynomial,
    c: &Polynomial,
) -> Result<(Polynomial, Polynomial, f64), SynthesisError> {
    let n = a.degree();
    let size = 2 * n + 2;
    if c.degree() + 1 > size {
        return Err(SynthesisError::Parameter(format!(
            "target polynomial degree {} exceeds 2n+1 = {}",
            c.degree(),
            2 * n + 1
        )));
    }
    // row r holds the coefficient of s^(2n+1-r)
    let mut m = DMatrix::<f64>::zeros(size, size);
    for col in 0..=n {
        // p_col multiplies s^(n+1-col)
        let shift = n + 1 - col;
        for power in 0..=a.degree() {
            m[(size - 1 - (power + shift), col)] += a.coeff(power);
        }
        // q_col multiplies s^(n-col)
        let shift = n - col;
        for power in 0..=b.degree() {
            let total = power + shift;
            if total < size {
                m[(size - 1 - total, n + 1 + col)] += b.coeff(power);
            }
        }
    }
    let rhs = DVector::from_fn(size, |r, _| c.coeff(size - 1 - r));

    let col_scale: Vec<f64> = (0..size)
        .map(|j| {
            let norm = m.column(j).norm();
            if norm > 0.0 {
                1.0 / norm
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = m.clone();
    for (j, s) in col_scale.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    let sv = scaled.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > MAX_SYLVESTER_CONDITION {
        return Err(SynthesisError::NotCoprime(format!(
            "Diophantine matrix is singular (condition {condition:e})"
        )));
    }
    let y = scaled
        .lu()
        .solve(&rhs)
        .ok_or_else(|| SynthesisError::NotCoprime("Diophantine matrix is singular".into()))?;
    let x: Vec<f64> = y.iter().zip(&col_scale).map(|(v, s)| v * s).collect();
    let mut p_coeffs = x[..=n].to_vec();
    p_coeffs.push(0.0);
    let q_coeffs = x[n + 1..].to_vec();
    Ok((
        Polynomial::new(p_coeffs)?,
        Polynomial::new(q_coeffs)?,
        condition,
    ))
}

/// Parallel PID with a first-order derivative filter,
/// `Kp + Ki/s + Kd N s / (s + N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    #[serde(default = "default_filter")]
    pub n: f64,
}

fn default_filter() -> f64 {
    DEFAULT_PID_FILTER
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            n: DEFAULT_PID_FILTER,
        }
    }

    /// Group A gains of the baseline comparison.
    pub fn group_a() -> Self {
        Self::new(0.08, 5e-6, 9.1e-3)
    }

    /// Group B gains of the baseline comparison.
    pub fn group_b() -> Self {
        Self::new(0.15, 5e-6, 9.1e-3)
    }
}

/// Returns `(C1, C2)` with `C1 = C2`: the PID acts on the tracking error.
pub fn pid_controller(
    g: &PidGains,
) -> Result<(TransferFunction, TransferFunction), SynthesisError> {
    for (name, v) in [("kp", g.kp), ("ki", g.ki), ("kd", g.kd)] {
        if !v.is_finite() {
            return Err(SynthesisError::Parameter(format!(
                "{name} must be finite, got {v}"
            )));
        }
    }
    if !(g.n.is_finite() && g.n > 0.0) {
        return Err(SynthesisError::Parameter(format!(
            "derivative filter N must be positive, got {}",
            g.n
        )));
    }
    let (kp, ki, kd, n) = (g.kp, g.ki, g.kd, g.n);
    let c = match (ki == 0.0, kd == 0.0) {
        (true, true) => TransferFunction::gain(kp),
        (false, true) => TransferFunction::from_coeffs(&[kp, ki], &[1.0, 0.0])?,
        (true, false) => TransferFunction::from_coeffs(&[kp + kd * n, kp * n], &[1.0, n])?,
        (false, false) => {
            TransferFunction::from_coeffs(&[kp + kd * n, kp * n + ki, ki * n], &[1.0, n, 0.0])?
        }
    };
    Ok((c.clone(), c))
}

/// Closed-loop transfers of `u = C1 r - C2 (y + n)`, `y = P (u + d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopTfs {
    /// Reference to force.
    pub t_ref: TransferFunction,
    /// Input disturbance to force.
    pub t_dist: TransferFunction,
    /// Measurement noise to force.
    pub t_noise: TransferFunction,
    /// Reference to control signal.
    pub t_u_ref: TransferFunction,
}

/// Builds the closed-loop transfers. Only the plant denominator, which
/// cancels structurally, is removed; no numerical cancellation is done.
pub fn closed_loop(
    plant: &TransferFunction,
    c1: &TransferFunction,
    c2: &TransferFunction,
) -> Result<ClosedLoopTfs, SynthesisError> {
    let (b, a) = (plant.num(), plant.den());
    let (n1, d1) = (c1.num(), c1.den());
    let (n2, d2) = (c2.num(), c2.den());
    let charpoly = &(a * d2) + &(b * n2);
    if charpoly.is_zero() {
        return Err(SynthesisError::SingularLoop);
    }
    let ref_den = d1 * &charpoly;
    Ok(ClosedLoopTfs {
        t_ref: TransferFunction::new(&(b * n1) * d2, ref_den.clone())?,
        t_dist: TransferFunction::new(b * d2, charpoly.clone())?,
        t_noise: TransferFunction::new(-&(b * n2), charpoly)?,
        t_u_ref: TransferFunction::new(&(a * n1) * d2, ref_den)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CancellationKind {
    PlantPoleControllerZero,
    PlantZeroControllerPole,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearCancellation {
    pub kind: CancellationKind,
    pub plant_root: Complex64,
    pub controller_root: Complex64,
    /// True when the cancelled root has nonnegative real part.
    pub unstable_side: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// Roots of `a p2 + b q2` for `C2 = q2/p2`.
    pub closed_loop_poles: Vec<Complex64>,
    /// `1 + P C2` vanished identically.
    pub singular: bool,
    pub stable: bool,
    pub cancellations: Vec<NearCancellation>,
    /// Feedforward poles outside the feedback loop that are not strictly stable.
    pub unstable_feedforward_poles: Vec<Complex64>,
}

/// Checks internal stability of the loop, including hidden cancellations
/// between plant and feedback controller and the feedforward block's own
/// poles (those shared with `C2` are realized inside the loop).
pub fn verify_internal_stability(
    plant: &TransferFunction,
    c1: &TransferFunction,
    c2: &TransferFunction,
    margin: f64,
) -> StabilityReport {
    let (b, a) = (plant.num(), plant.den());
    let charpoly = &(a * c2.den()) + &(b * c2.num());
    let singular = charpoly.is_zero()
        || charpoly.max_abs_coeff() <= f64::EPSILON * (a * c2.den()).max_abs_coeff();
    if singular {
        return StabilityReport {
            closed_loop_poles: Vec::new(),
            singular: true,
            stable: false,
            cancellations: Vec::new(),
            unstable_feedforward_poles: Vec::new(),
        };
    }
    let poles = roots_or_empty(&charpoly).unwrap_or_default();

    let plant_poles = roots_or_empty(a).unwrap_or_default();
    let plant_zeros = roots_or_empty(b).unwrap_or_default();
    let ctrl_zeros = roots_or_empty(c2.num()).unwrap_or_default();
    let ctrl_poles = roots_or_empty(c2.den()).unwrap_or_default();
    let mut cancellations = Vec::new();
    let mut scan = |plant_roots: &[Complex64], ctrl_roots: &[Complex64], kind| {
        for &pr in plant_roots {
            for &cr in ctrl_roots {
                if near(pr, cr, CANCELLATION_TOL) {
                    cancellations.push(NearCancellation {
                        kind,
                        plant_root: pr,
                        controller_root: cr,
                        unstable_side: pr.re >= 0.0,
                    });
                }
            }
        }
    };
    scan(
        &plant_poles,
        &ctrl_zeros,
        CancellationKind::PlantPoleControllerZero,
    );
    scan(
        &plant_zeros,
        &ctrl_poles,
        CancellationKind::PlantZeroControllerPole,
    );

    let unstable_feedforward_poles: Vec<Complex64> = roots_or_empty(c1.den())
        .unwrap_or_default()
        .into_iter()
        .filter(|r| r.re >= 0.0 && !ctrl_poles.iter().any(|c| near(*r, *c, CANCELLATION_TOL)))
        .collect();

    let stable = poles.iter().all(|r| r.re < -margin)
        && !cancellations.iter().any(|c| c.unstable_side)
        && unstable_feedforward_poles.is_empty();
    StabilityReport {
        closed_loop_poles: poles,
        singular: false,
        stable,
        cancellations,
        unstable_feedforward_poles,
    }
}

/// JSON form of a designed controller. The 2-DOF intermediates are absent
/// for controllers that were not produced by [`design_2dof`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerExport {
    pub c1: TransferFunction,
    pub c2: TransferFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_rho: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_lambda_k: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pid: Option<PidGains>,
    /// Written by the `design` command; ignored on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<serde_json::Value>,
}

impl ControllerExport {
    pub fn from_two_dof(c: &TwoDofController) -> Self {
        Self {
            c1: c.c1.clone(),
            c2: c.c2.clone(),
            d_rho: Some(c.d_rho.clone()),
            d_lambda_k: Some(c.d_lambda_k.clone()),
            p: Some(c.p.clone()),
            q: Some(c.q.clone()),
            rho: Some(c.rho),
            lambda: Some(c.lambda),
            k: Some(c.k),
            pid: None,
            diagnostics: None,
        }
    }

    pub fn from_pid(g: &PidGains) -> Result<Self, SynthesisError> {
        let (c1, c2) = pid_controller(g)?;
        Ok(Self {
            c1,
            c2,
            d_rho: None,
            d_lambda_k: None,
            p: None,
            q: None,
            rho: None,
            lambda: None,
            k: None,
            pid: Some(*g),
            diagnostics: None,
        })
    }
}
