//! Bounded scalar maximization over the investment ratio.
//!
//! Brent-style search: golden-section steps with parabolic interpolation
//! when the parabola is well conditioned. Derivative-free on purpose —
//! stationarity and concavity are verified afterwards from finite
//! differences rather than assumed from a closed form.

use serde::Serialize;
use thiserror::Error;

use crate::model::{self, Alpha, FirmParams, ModelError, FD_STEP};

/// Default bracket-width tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// Grid resolution used by [`verify_optimum`] for the dominance check.
pub const DOMINANCE_GRID_POINTS: usize = 10_000;

const MAX_ITERATIONS: usize = 200;
const CGOLD: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid bracket [{lo}, {hi}]: need 0 <= lo < hi <= 1")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("objective returned a non-finite value at alpha = {alpha}")]
    NonFiniteObjective { alpha: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Sign of the second derivative at the returned optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SocSign {
    Negative,
    Zero,
    Positive,
    /// The optimum sits too close to a bracket edge for a centered stencil.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub alpha_star: Alpha,
    pub objective_value: f64,
    pub iterations: usize,
    pub bracket_width_final: f64,
    /// |f'(α*)| from central differences; absent at bracket edges.
    pub stationarity_residual: Option<f64>,
    pub soc_sign: SocSign,
}

/// Diagnostics for a candidate optimum of the single-period profit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimumDiagnostics {
    pub stationarity_residual: Option<f64>,
    pub soc_sign: SocSign,
    /// True iff no point of a uniform α grid beats the candidate by more
    /// than 1e-9.
    pub grid_dominant: bool,
}

/// Tracks the best evaluation seen; ties resolve to the smaller α.
struct Best {
    alpha: f64,
    value: f64,
}

impl Best {
    fn offer(&mut self, alpha: f64, value: f64) {
        if value > self.value || (value == self.value && alpha < self.alpha) {
            self.alpha = alpha;
            self.value = value;
        }
    }
}

/// Maximize `objective` over `[lo, hi]` to bracket width `tol`.
///
/// Both endpoints are evaluated, so boundary maxima are returned exactly
/// and a plateau objective resolves to `lo`.
pub fn maximize_scalar(
    objective: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<OptimizationResult, SolverError> {
    if !(lo < hi) || lo < 0.0 || hi > 1.0 || !lo.is_finite() || !hi.is_finite() {
        return Err(SolverError::InvalidBracket { lo, hi });
    }
    let tol = tol.abs().max(1e-12);

    let mut best = Best {
        alpha: lo,
        value: f64::NEG_INFINITY,
    };
    let eval = |x: f64, best: &mut Best| -> Result<f64, SolverError> {
        let v = objective(x);
        if !v.is_finite() {
            return Err(SolverError::NonFiniteObjective { alpha: x });
        }
        best.offer(x, v);
        Ok(v)
    };

    eval(lo, &mut best)?;
    eval(hi, &mut best)?;

    // Brent's method on the negated objective, bookkeeping in place.
    let (mut a, mut b) = (lo, hi);
    let mut x = a + CGOLD * (b - a);
    let mut fx = eval(x, &mut best)?;
    let (mut w, mut v) = (x, x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut iterations = 0;

    while b - a > tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        let m = 0.5 * (a + b);
        let tol1 = 0.25 * tol;
        let mut use_golden = true;

        if e.abs() > tol1 {
            // Parabola through (x, w, v); maximization flips the usual signs.
            let r = (x - w) * (fx - fv);
            let q0 = (x - v) * (fx - fw);
            let mut p = (x - v) * q0 - (x - w) * r;
            let mut q = 2.0 * (q0 - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let e_prev = e;
            e = d;
            if q.abs() > f64::EPSILON
                && p.abs() < (0.5 * q * e_prev).abs()
                && p > q * (a - x)
                && p < q * (b - x)
            {
                d = p / q;
                let u = x + d;
                if u - a < tol1 || b - u < tol1 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = CGOLD * e;
        }
        if d.abs() < tol1 {
            d = if d >= 0.0 { tol1 } else { -tol1 };
        }

        let u = x + d;
        let fu = eval(u, &mut best)?;
        if fu >= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u >= x {
                b = u;
            } else {
                a = u;
            }
            if fu >= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu >= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    let alpha_star = best.alpha;
    // Re-evaluate rather than trusting an iterate's cached value.
    let objective_value = objective(alpha_star);
    let (stationarity_residual, soc_sign) =
        curvature_diagnostics(&objective, alpha_star, lo, hi, objective_value);

    Ok(OptimizationResult {
        alpha_star: Alpha::new(alpha_star)?,
        objective_value,
        iterations,
        bracket_width_final: b - a,
        stationarity_residual,
        soc_sign,
    })
}

fn curvature_diagnostics(
    objective: &impl Fn(f64) -> f64,
    alpha: f64,
    lo: f64,
    hi: f64,
    value_at_alpha: f64,
) -> (Option<f64>, SocSign) {
    if alpha < lo + FD_STEP || alpha > hi - FD_STEP {
        return (None, SocSign::Boundary);
    }
    let d1 = model::central_difference(objective, alpha, FD_STEP, 1);
    let d2 = model::central_difference(objective, alpha, FD_STEP, 2);
    let zero_band = 1e-6 * value_at_alpha.abs().max(1.0);
    let sign = if d2 < -zero_band {
        SocSign::Negative
    } else if d2 > zero_band {
        SocSign::Positive
    } else {
        SocSign::Zero
    };
    (Some(d1.abs()), sign)
}

/// Maximize the single-period profit over the full guarded α range.
pub fn maximize_profit(params: &FirmParams) -> Result<OptimizationResult, SolverError> {
    maximize_profit_with_tolerance(params, DEFAULT_TOLERANCE)
}

pub fn maximize_profit_with_tolerance(
    params: &FirmParams,
    tol: f64,
) -> Result<OptimizationResult, SolverError> {
    params.validate()?;
    let p = *params;
    maximize_scalar(
        move |a| model::profit(&p, Alpha::new(a).expect("alpha in bracket")).expect("valid params"),
        0.0,
        Alpha::search_max(),
        tol,
    )
}

/// Check stationarity, concavity and grid dominance of a candidate optimum
/// of the single-period profit.
pub fn verify_optimum(
    params: &FirmParams,
    alpha_star: Alpha,
) -> Result<OptimumDiagnostics, ModelError> {
    params.validate()?;
    let lo = 0.0;
    let hi = Alpha::search_max();
    let f = |a: f64| model::profit(params, Alpha::new(a).expect("grid alpha")).expect("valid");
    let candidate = f(alpha_star.value());

    let mut grid_dominant = true;
    let n = DOMINANCE_GRID_POINTS;
    for i in 0..n {
        let a = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
        if candidate < f(a) - 1e-9 {
            grid_dominant = false;
            break;
        }
    }
    let (stationarity_residual, soc_sign) =
        curvature_diagnostics(&f, alpha_star.value(), lo, hi, candidate);
    Ok(OptimumDiagnostics {
        stationarity_residual,
        soc_sign,
        grid_dominant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> FirmParams {
        FirmParams::default()
    }

    #[test]
    fn quadratic_vertex() {
        let r = maximize_scalar(|a| -(a - 0.25) * (a - 0.25), 0.0, 1.0, 1e-7).unwrap();
        assert!((r.alpha_star.value() - 0.25).abs() < 1e-6);
        assert!(r.objective_value.abs() < 1e-12);
        assert!(r.bracket_width_final <= 1e-7);
        assert_eq!(r.soc_sign, SocSign::Negative);
        assert!(r.stationarity_residual.unwrap() < 1e-5);
    }

    #[test]
    fn baseline_profit_optimum() {
        let r = maximize_profit(&base()).unwrap();
        assert!((r.alpha_star.value() - 0.3758660).abs() < 1e-4);
        assert!((r.objective_value - 50.43508).abs() < 1e-3);
        assert_eq!(r.soc_sign, SocSign::Negative);
    }

    #[test]
    fn higher_carbon_price_optimum() {
        let params = FirmParams {
            carbon_price: 1.5,
            ..base()
        };
        let r = maximize_profit(&params).unwrap();
        assert!((r.alpha_star.value() - 0.4874011).abs() < 1e-4);
        assert!((r.objective_value - 39.90827).abs() < 1e-3);
    }

    #[test]
    fn plateau_returns_lower_bound() {
        let r = maximize_scalar(|_| 7.0, 0.0, 1.0, 1e-7).unwrap();
        assert_eq!(r.alpha_star.value(), 0.0);
        assert_eq!(r.objective_value, 7.0);
        // lo is also the bracket edge here
        assert_eq!(r.soc_sign, SocSign::Boundary);
    }

    #[test]
    fn monotone_objective_returns_boundary() {
        // increasing objective: maximum at hi, evaluated exactly
        let r = maximize_scalar(|a| a, 0.0, Alpha::search_max(), 1e-7).unwrap();
        assert_eq!(r.alpha_star.value(), Alpha::search_max());
        assert_eq!(r.soc_sign, SocSign::Boundary);
        // decreasing objective: maximum at lo
        let r = maximize_scalar(|a| -a, 0.0, 1.0, 1e-7).unwrap();
        assert_eq!(r.alpha_star.value(), 0.0);
    }

    #[test]
    fn invalid_bracket_rejected() {
        assert!(matches!(
            maximize_scalar(|a| a, 0.5, 0.5, 1e-7),
            Err(SolverError::InvalidBracket { .. })
        ));
        assert!(matches!(
            maximize_scalar(|a| a, 0.7, 0.2, 1e-7),
            Err(SolverError::InvalidBracket { .. })
        ));
        assert!(matches!(
            maximize_scalar(|a| a, -0.1, 0.5, 1e-7),
            Err(SolverError::InvalidBracket { .. })
        ));
    }

    #[test]
    fn non_finite_objective_rejected() {
        let r = maximize_scalar(|a| if a > 0.5 { f64::NAN } else { a }, 0.0, 1.0, 1e-7);
        assert!(matches!(r, Err(SolverError::NonFiniteObjective { .. })));
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let a = maximize_profit(&base()).unwrap();
        let b = maximize_profit(&base()).unwrap();
        assert_eq!(a.alpha_star.value().to_bits(), b.alpha_star.value().to_bits());
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn objective_value_matches_reevaluation() {
        let r = maximize_profit(&base()).unwrap();
        let again = model::profit(&base(), r.alpha_star).unwrap();
        assert_eq!(r.objective_value.to_bits(), again.to_bits());
    }

    #[test]
    fn verify_optimum_accepts_true_maximum() {
        let d = verify_optimum(&base(), Alpha::new(0.3758660).unwrap()).unwrap();
        assert!(d.grid_dominant);
        assert_eq!(d.soc_sign, SocSign::Negative);
        assert!(d.stationarity_residual.unwrap() < 1e-3);
    }

    #[test]
    fn verify_optimum_rejects_far_point() {
        let d = verify_optimum(&base(), Alpha::new(0.9).unwrap()).unwrap();
        assert!(!d.grid_dominant);
    }

    #[test]
    fn verify_optimum_flags_boundary() {
        // with no carbon price and no efficiency gain there is no interior
        // incentive; α = 0 is the maximizer and sits on the bracket edge
        let params = FirmParams {
            carbon_price: 0.0,
            k: 0.0,
            ..base()
        };
        let d = verify_optimum(&params, Alpha::new(0.0).unwrap()).unwrap();
        assert_eq!(d.soc_sign, SocSign::Boundary);
        assert!(d.grid_dominant);
    }
}
