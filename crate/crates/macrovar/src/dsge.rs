//! Evaluatable equation block of a small deterministic economy:
//! discounted household utility, Cobb-Douglas production, the household
//! budget constraint, and a Taylor-type policy rate, plus a period loop
//! that chains them into simulated paths.
//!
//! The loop is scaffolding for inspecting the equations, not a
//! general-equilibrium solver: technology, inflation, labor, and the
//! savings share are exogenous inputs, capital is held at its initial
//! level, and consumption closes the budget constraint.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DsgeError {
    #[error("parameter {name} = {value} violates: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("savings rule implies negative consumption {consumption} at period {period}")]
    InfeasibleConsumption { period: usize, consumption: f64 },
}

/// Preference, technology, and policy parameters. Build through
/// [`DsgeParams::new`] so the range checks run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsgeParams {
    /// Discount factor β, in (0, 1).
    pub discount: f64,
    /// Relative risk aversion σ ≥ 0; σ = 1 selects log consumption utility.
    pub risk_aversion: f64,
    /// Labor disutility weight χ ≥ 0.
    pub labor_disutility: f64,
    /// Labor curvature φ ≥ 0.
    pub labor_curvature: f64,
    /// Capital share α, in (0, 1).
    pub capital_share: f64,
    /// Natural rate ρ in the policy rule.
    pub natural_rate: f64,
    /// Policy response to the inflation gap.
    pub taylor_pi: f64,
    /// Policy response to the output gap.
    pub taylor_y: f64,
    pub inflation_target: f64,
    pub potential_output: f64,
}

impl DsgeParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        discount: f64,
        risk_aversion: f64,
        labor_disutility: f64,
        labor_curvature: f64,
        capital_share: f64,
        natural_rate: f64,
        taylor_pi: f64,
        taylor_y: f64,
        inflation_target: f64,
        potential_output: f64,
    ) -> Result<Self, DsgeError> {
        let params = DsgeParams {
            discount,
            risk_aversion,
            labor_disutility,
            labor_curvature,
            capital_share,
            natural_rate,
            taylor_pi,
            taylor_y,
            inflation_target,
            potential_output,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), DsgeError> {
        let checks: [(&'static str, f64); 10] = [
            ("discount", self.discount),
            ("risk_aversion", self.risk_aversion),
            ("labor_disutility", self.labor_disutility),
            ("labor_curvature", self.labor_curvature),
            ("capital_share", self.capital_share),
            ("natural_rate", self.natural_rate),
            ("taylor_pi", self.taylor_pi),
            ("taylor_y", self.taylor_y),
            ("inflation_target", self.inflation_target),
            ("potential_output", self.potential_output),
        ];
        for (name, value) in checks {
            if !value.is_finite() {
                return Err(DsgeError::InvalidParameter {
                    name,
                    value,
                    requirement: "must be finite",
                });
            }
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(DsgeError::InvalidParameter {
                name: "discount",
                value: self.discount,
                requirement: "must lie strictly between 0 and 1",
            });
        }
        if !(self.capital_share > 0.0 && self.capital_share < 1.0) {
            return Err(DsgeError::InvalidParameter {
                name: "capital_share",
                value: self.capital_share,
                requirement: "must lie strictly between 0 and 1",
            });
        }
        if self.risk_aversion < 0.0 {
            return Err(DsgeError::InvalidParameter {
                name: "risk_aversion",
                value: self.risk_aversion,
                requirement: "must be nonnegative",
            });
        }
        if self.labor_disutility < 0.0 {
            return Err(DsgeError::InvalidParameter {
                name: "labor_disutility",
                value: self.labor_disutility,
                requirement: "must be nonnegative",
            });
        }
        if self.labor_curvature < 0.0 {
            return Err(DsgeError::InvalidParameter {
                name: "labor_curvature",
                value: self.labor_curvature,
                requirement: "must be nonnegative",
            });
        }
        Ok(())
    }
}

/// One period's flows and stocks. A plain record: invariants are
/// enforced where states are built for simulation, while diagnostic
/// functions like [`budget_residual`] accept any values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EconomyState {
    pub consumption: f64,
    pub labor: f64,
    pub capital: f64,
    pub technology: f64,
    pub investment: f64,
    pub bonds: f64,
    pub wage: f64,
    pub capital_return: f64,
    pub profits: f64,
    pub transfers: f64,
    pub inflation: f64,
    pub output: f64,
}

/// Discounted utility Σ β^t (C_t^{1−σ}/(1−σ) − χ L_t^{1+φ}/(1+φ)) over
/// a finite path of (consumption, labor) pairs. σ = 1 evaluates the log
/// limit of the consumption term instead of dividing by zero.
pub fn utility(path: &[(f64, f64)], params: &DsgeParams) -> Result<f64, DsgeError> {
    params.validate()?;
    let sigma = params.risk_aversion;
    let chi = params.labor_disutility;
    let phi = params.labor_curvature;
    let mut total = 0.0;
    let mut discount = 1.0;
    for (t, &(c, l)) in path.iter().enumerate() {
        if c < 0.0 || !c.is_finite() {
            return Err(DsgeError::Domain(format!(
                "consumption {c} at period {t} must be nonnegative"
            )));
        }
        if l < 0.0 || !l.is_finite() {
            return Err(DsgeError::Domain(format!(
                "labor {l} at period {t} must be nonnegative"
            )));
        }
        if c == 0.0 && sigma >= 1.0 {
            return Err(DsgeError::Domain(format!(
                "consumption is zero at period {t}, utility diverges for risk aversion {sigma}"
            )));
        }
        let consumption_term = if sigma == 1.0 {
            c.ln()
        } else {
            c.powf(1.0 - sigma) / (1.0 - sigma)
        };
        let labor_term = chi * l.powf(1.0 + phi) / (1.0 + phi);
        total += discount * (consumption_term - labor_term);
        discount *= params.discount;
    }
    Ok(total)
}

/// Cobb-Douglas output A K^α L^{1−α}, with 0^x = 0 at the boundary.
pub fn production(a: f64, k: f64, l: f64, alpha: f64) -> Result<f64, DsgeError> {
    if !(a.is_finite() && a > 0.0) {
        return Err(DsgeError::Domain(format!(
            "technology {a} must be strictly positive"
        )));
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(DsgeError::Domain(format!(
            "capital {k} must be nonnegative"
        )));
    }
    if !(l.is_finite() && l >= 0.0) {
        return Err(DsgeError::Domain(format!("labor {l} must be nonnegative")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DsgeError::Domain(format!(
            "capital share {alpha} must lie strictly between 0 and 1"
        )));
    }
    Ok(a * k.powf(alpha) * l.powf(1.0 - alpha))
}

/// Household budget gap (C + I + B) − (ωL + rK + Π + T); zero when the
/// constraint binds, positive when spending exceeds income.
pub fn budget_residual(state: &EconomyState) -> f64 {
    let spending = state.consumption + state.investment + state.bonds;
    let income = state.wage * state.labor
        + state.capital_return * state.capital
        + state.profits
        + state.transfers;
    spending - income
}

/// Policy rate ρ + φ_π(π − π*) + φ_y(y − y*). Affine and unbounded:
/// no floor is applied.
pub fn taylor_rate(inflation: f64, output: f64, params: &DsgeParams) -> f64 {
    params.natural_rate
        + params.taylor_pi * (inflation - params.inflation_target)
        + params.taylor_y * (output - params.potential_output)
}

/// Exogenous inputs for one simulated period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExogenousPeriod {
    pub technology: f64,
    pub inflation: f64,
    pub labor: f64,
    /// Share of income invested; consumption gets the remainder.
    pub savings_share: f64,
}

/// One simulated period's headline outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOutcome {
    pub output: f64,
    pub policy_rate: f64,
    pub consumption: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub periods: Vec<PeriodOutcome>,
    pub states: Vec<EconomyState>,
    pub total_utility: f64,
    /// β^T where T is the simulated horizon: the usual bound scale on
    /// the truncated utility tail.
    pub tail_bound: f64,
}

/// Chains the equations period by period: output from production at the
/// fixed initial capital stock, the policy rate from the rule, factor
/// incomes at competitive shares, and consumption from the budget
/// constraint under the exogenous savings share.
pub fn simulate(
    initial: &EconomyState,
    exogenous: &[ExogenousPeriod],
    params: &DsgeParams,
) -> Result<SimulationResult, DsgeError> {
    params.validate()?;
    let capital = initial.capital;
    if !(capital.is_finite() && capital >= 0.0) {
        return Err(DsgeError::Domain(format!(
            "initial capital {capital} must be nonnegative"
        )));
    }
    let alpha = params.capital_share;
    let mut periods = Vec::with_capacity(exogenous.len());
    let mut states = Vec::with_capacity(exogenous.len());
    let mut utility_path = Vec::with_capacity(exogenous.len());
    for (t, exo) in exogenous.iter().enumerate() {
        let output = production(exo.technology, capital, exo.labor, alpha)
            .map_err(|e| match e {
                DsgeError::Domain(msg) => DsgeError::Domain(format!("period {t}: {msg}")),
                other => other,
            })?;
        let policy_rate = taylor_rate(exo.inflation, output, params);
        // competitive factor incomes split output by the Cobb-Douglas shares
        let labor_income = (1.0 - alpha) * output;
        let capital_income = alpha * output;
        let income = labor_income + capital_income;
        let investment = exo.savings_share * income;
        let consumption = income - investment;
        if consumption < 0.0 {
            return Err(DsgeError::InfeasibleConsumption {
                period: t,
                consumption,
            });
        }
        let wage = if exo.labor > 0.0 {
            labor_income / exo.labor
        } else {
            0.0
        };
        let capital_return = if capital > 0.0 {
            capital_income / capital
        } else {
            0.0
        };
        periods.push(PeriodOutcome {
            output,
            policy_rate,
            consumption,
        });
        states.push(EconomyState {
            consumption,
            labor: exo.labor,
            capital,
            technology: exo.technology,
            investment,
            bonds: 0.0,
            wage,
            capital_return,
            profits: 0.0,
            transfers: 0.0,
            inflation: exo.inflation,
            output,
        });
        utility_path.push((consumption, exo.labor));
    }
    let total_utility = utility(&utility_path, params)?;
    let tail_bound = params.discount.powi(exogenous.len() as i32);
    Ok(SimulationResult {
        periods,
        states,
        total_utility,
        tail_bound,
    })
}
