//! Single-period production, revenue, cost and profit functions.
//!
//! The firm sells `units(α)` at price `p`, pays `c` per unit to produce,
//! and pays the carbon price `B` per emission unit. Output is a
//! Cobb-Douglas-style term on productive assets, `[(1-α)A]^β`, scaled by
//! a saturating gain `2·sigmoid(αk)` from the transition investment.
//! Carbon intensity declines with the same gain, so investing a fraction
//! α of assets trades production volume against emission costs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Guard on the upper α search boundary: `(1-α)^β` has unbounded
/// derivative at α = 1 for β < 1.
pub const ALPHA_GUARD: f64 = 1e-9;

/// Central-difference step for numerical derivatives.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("alpha {value} outside [0, 1]")]
    AlphaOutOfRange { value: f64 },
    #[error("alpha {alpha} too close to the boundary for finite-difference step {step}")]
    DerivativeBoundary { alpha: f64, step: f64 },
    #[error("derivative order must be 1 or 2, got {0}")]
    BadDerivativeOrder(u32),
}

/// Transition investment ratio: the fraction of total assets put into
/// low-carbon initiatives. Valid on the closed interval [0, 1]; the
/// optimizer searches [0, 1 - ALPHA_GUARD].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&value) || !value.is_finite() {
            return Err(ModelError::AlphaOutOfRange { value });
        }
        Ok(Alpha(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Largest α the optimizer may probe.
    pub fn search_max() -> f64 {
        1.0 - ALPHA_GUARD
    }
}

/// Single-period firm parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirmParams {
    /// Selling price per unit.
    pub p: f64,
    /// Production cost per unit.
    pub c: f64,
    /// Total asset.
    #[serde(rename = "A")]
    pub total_asset: f64,
    /// Low-carbon production efficiency coefficient.
    pub k: f64,
    /// Original productivity coefficient (capital elasticity), in (0, 1].
    pub beta: f64,
    /// Carbon price per emission unit.
    #[serde(rename = "B")]
    pub carbon_price: f64,
}

impl Default for FirmParams {
    /// Baseline parameter set used throughout the bundled reference tables.
    fn default() -> Self {
        FirmParams {
            p: 3.6,
            c: 1.6,
            total_asset: 100.0,
            k: 2.0,
            beta: 0.8,
            carbon_price: 1.0,
        }
    }
}

impl FirmParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |ok: bool, msg: &str| -> Result<(), ModelError> {
            if ok {
                Ok(())
            } else {
                Err(ModelError::InvalidParams(msg.to_string()))
            }
        };
        check(self.total_asset > 0.0, "total asset A must be > 0")?;
        check(
            self.beta > 0.0 && self.beta <= 1.0,
            "beta must satisfy 0 < beta <= 1",
        )?;
        check(self.k >= 0.0, "efficiency coefficient k must be >= 0")?;
        check(self.carbon_price >= 0.0, "carbon price B must be >= 0")?;
        check(self.c >= 0.0, "production cost c must be >= 0")?;
        for (name, v) in [
            ("p", self.p),
            ("c", self.c),
            ("A", self.total_asset),
            ("k", self.k),
            ("beta", self.beta),
            ("B", self.carbon_price),
        ] {
            check(v.is_finite(), &format!("{name} must be finite"))?;
        }
        Ok(())
    }

    /// Selling profit per unit.
    pub fn margin(&self) -> f64 {
        self.p - self.c
    }
}

/// Itemized single-period result at a given α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfitBreakdown {
    pub units: f64,
    pub revenue: f64,
    pub production_cost: f64,
    pub carbon_intensity: f64,
    pub carbon_emission: f64,
    pub carbon_cost: f64,
    pub profit: f64,
}

/// Saturating output multiplier `2 / (1 + e^{-αk})`, in [1, 2) for αk ≥ 0.
pub fn sigmoid_gain(alpha: Alpha, k: f64) -> f64 {
    2.0 / (1.0 + (-alpha.value() * k).exp())
}

/// Emissions per unit of output, `2 / (1 + e^{αk})`, in (0, 1] for αk ≥ 0.
///
/// Algebraically equal to `2 - sigmoid_gain`; this form avoids cancellation
/// when αk is large.
pub fn carbon_intensity(alpha: Alpha, k: f64) -> f64 {
    2.0 / (1.0 + (alpha.value() * k).exp())
}

/// Production volume `2·sigmoid(αk) · [(1-α)A]^β`.
pub fn units(params: &FirmParams, alpha: Alpha) -> Result<f64, ModelError> {
    params.validate()?;
    let productive = (1.0 - alpha.value()) * params.total_asset;
    Ok(sigmoid_gain(alpha, params.k) * productive.powf(params.beta))
}

/// Revenue, costs and profit at a given α.
///
/// Profit is assembled as revenue − production cost − carbon cost, so the
/// decomposition identity holds exactly by construction.
pub fn profit_breakdown(params: &FirmParams, alpha: Alpha) -> Result<ProfitBreakdown, ModelError> {
    let units = units(params, alpha)?;
    let carbon_intensity = carbon_intensity(alpha, params.k);
    let revenue = params.p * units;
    let production_cost = params.c * units;
    let carbon_emission = carbon_intensity * units;
    let carbon_cost = carbon_emission * params.carbon_price;
    Ok(ProfitBreakdown {
        units,
        revenue,
        production_cost,
        carbon_intensity,
        carbon_emission,
        carbon_cost,
        profit: revenue - production_cost - carbon_cost,
    })
}

/// Single-period profit at a given α.
pub fn profit(params: &FirmParams, alpha: Alpha) -> Result<f64, ModelError> {
    Ok(profit_breakdown(params, alpha)?.profit)
}

/// Central finite difference of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64, order: u32) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        _ => f64::NAN,
    }
}

/// Numerical first or second derivative of the profit function at α.
///
/// This is the ground truth used for stationarity and concavity checks;
/// see [`stationarity_expression`] for the closed form it is checked against.
pub fn profit_derivative(params: &FirmParams, alpha: Alpha, order: u32) -> Result<f64, ModelError> {
    params.validate()?;
    if order != 1 && order != 2 {
        return Err(ModelError::BadDerivativeOrder(order));
    }
    let a = alpha.value();
    if a < FD_STEP || a > Alpha::search_max() - FD_STEP {
        return Err(ModelError::DerivativeBoundary {
            alpha: a,
            step: FD_STEP,
        });
    }
    let f = |x: f64| {
        profit(params, Alpha(x)).expect("interior alpha with validated params")
    };
    Ok(central_difference(f, a, FD_STEP, order))
}

/// Closed-form stationarity expression as printed in the source model:
/// `2((1-α)A)^β (p - c - 2Be^{-αk}/(1+e^{-αk})) / (1+e^{-αk})`.
///
/// This simplifies to the profit function itself, so its root marks zero
/// profit rather than the argmax. Kept for the documented comparison test
/// against [`profit_derivative`]; never used for optimization.
pub fn stationarity_expression(params: &FirmParams, alpha: Alpha) -> f64 {
    let a = alpha.value();
    let e = (-a * params.k).exp();
    let margin = params.p - params.c - 2.0 * params.carbon_price * e / (1.0 + e);
    2.0 * ((1.0 - a) * params.total_asset).powf(params.beta) * margin / (1.0 + e)
}

/// Closed-form curvature expression as printed in the source model.
///
/// Evaluation-only companion to [`stationarity_expression`]; its sign is
/// compared against the numerical second derivative in tests.
pub fn curvature_expression(params: &FirmParams, alpha: Alpha) -> f64 {
    let a = alpha.value();
    let (k, beta, asset) = (params.k, params.beta, params.total_asset);
    let e = (a * k).exp();
    let lead = 2.0 * a * e * (asset - a * asset).powf(beta)
        / ((a - 1.0).powi(2) * (e + 1.0).powi(3));
    lead
        * (-(a - 1.0).powi(2) * k * k * (e - 1.0)
            + (beta - 1.0) * beta * (e + 1.0).powi(2)
            + 2.0 * (a - 1.0) * beta * k * (e + 1.0))
}
