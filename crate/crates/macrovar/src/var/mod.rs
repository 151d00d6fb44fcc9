//! VAR(p) estimation and the derived objects: companion form, stability,
//! moving-average inversion, orthogonalized impulse responses, forecast
//! error variance decomposition, and information-criterion lag selection.
//!
//! Estimation is equation-by-equation least squares on the lagged
//! regression, shared across all equations since the regressor matrix is
//! identical. Shock identification is recursive: the Cholesky factor of
//! the residual covariance in the order the variables were listed.

mod bootstrap;

pub use bootstrap::{
    bootstrap_bands, bootstrap_bands_serial, bootstrap_bands_with_options, percentile,
    BootstrapOptions,
};

use thiserror::Error;

use crate::numerics::{cholesky_lower, least_squares, spectral_radius, Matrix, NumericsError};
use crate::timeseries::Sample;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VarError {
    #[error("insufficient observations: have {have} effective rows, need at least {need}")]
    InsufficientObservations { have: usize, need: usize },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("invalid bootstrap request: {0}")]
    InvalidBootstrap(String),
    #[error("bootstrap exhausted {draws} draws without enough full-rank replications")]
    BootstrapFailed { draws: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// What the equation system looks like: which variables, in which order
/// (the order fixes the shock ordering), how many lags, intercept or not.
#[derive(Debug, Clone, PartialEq)]
pub struct VarSpec {
    pub variable_names: Vec<String>,
    pub lag_order: usize,
    pub include_intercept: bool,
}

impl VarSpec {
    pub fn new(variable_names: Vec<String>, lag_order: usize) -> Result<Self, VarError> {
        let spec = VarSpec {
            variable_names,
            lag_order,
            include_intercept: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), VarError> {
        if self.variable_names.is_empty() {
            return Err(VarError::InvalidSpec("no variables listed".into()));
        }
        if self.lag_order == 0 {
            return Err(VarError::InvalidSpec("lag order must be at least 1".into()));
        }
        for (i, name) in self.variable_names.iter().enumerate() {
            if self.variable_names[..i].contains(name) {
                return Err(VarError::InvalidSpec(format!(
                    "variable {name} listed twice"
                )));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.variable_names.len()
    }

    /// Regressors per equation: intercept plus m coefficients per lag.
    pub fn regressor_count(&self) -> usize {
        self.dimension() * self.lag_order + usize::from(self.include_intercept)
    }
}

/// Divisor for the residual covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceDivisor {
    /// T − p − mp − 1 with an intercept (effective rows minus regressors).
    DegreesOfFreedom,
    /// T − p (effective rows).
    SampleSize,
}

impl CovarianceDivisor {
    pub fn name(self) -> &'static str {
        match self {
            CovarianceDivisor::DegreesOfFreedom => "degrees_of_freedom",
            CovarianceDivisor::SampleSize => "sample_size",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "degrees_of_freedom" => Some(CovarianceDivisor::DegreesOfFreedom),
            "sample_size" => Some(CovarianceDivisor::SampleSize),
            _ => None,
        }
    }

    fn value(self, effective_rows: usize, regressors: usize) -> usize {
        match self {
            CovarianceDivisor::DegreesOfFreedom => effective_rows - regressors,
            CovarianceDivisor::SampleSize => effective_rows,
        }
    }
}

/// A fitted VAR: intercept vector, one coefficient matrix per lag, the
/// residual rows, and the residual covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct VarEstimate {
    pub spec: VarSpec,
    /// Length m; all zeros when the spec excludes the intercept.
    pub intercept: Vec<f64>,
    /// A_1..A_p, each m×m; row i holds the coefficients of equation i.
    pub lag_matrices: Vec<Matrix>,
    /// (T − p) × m, one column per equation.
    pub residuals: Matrix,
    /// m×m, exactly symmetric.
    pub sigma: Matrix,
    /// Years of the regression rows (observation p onward).
    pub sample_years: Vec<i32>,
    pub divisor: CovarianceDivisor,
}

/// Lagged regression design: Y rows are observations p..T, X rows are
/// [1, y_{t−1}, …, y_{t−p}] with the lag-1 block first.
pub fn build_regression(sample: &Sample, spec: &VarSpec) -> Result<(Matrix, Matrix), VarError> {
    spec.validate()?;
    let m = spec.dimension();
    let p = spec.lag_order;
    if sample.matrix.cols() != m {
        return Err(VarError::InvalidSpec(format!(
            "sample has {} columns but the spec lists {m} variables",
            sample.matrix.cols()
        )));
    }
    let t = sample.matrix.rows();
    let k = spec.regressor_count();
    // at least one residual degree of freedom per equation
    let need = p + k + 1;
    if t < need {
        return Err(VarError::InsufficientObservations {
            have: t.saturating_sub(p),
            need: k + 1,
        });
    }
    let n_eff = t - p;
    let mut x = Matrix::zeros(n_eff, k);
    let mut y = Matrix::zeros(n_eff, m);
    for r in 0..n_eff {
        let obs = r + p;
        for j in 0..m {
            y[(r, j)] = sample.matrix[(obs, j)];
        }
        let mut c = 0;
        if spec.include_intercept {
            x[(r, 0)] = 1.0;
            c = 1;
        }
        for lag in 1..=p {
            for j in 0..m {
                x[(r, c)] = sample.matrix[(obs - lag, j)];
                c += 1;
            }
        }
    }
    Ok((x, y))
}

/// Least-squares VAR fit with the degrees-of-freedom covariance divisor.
pub fn estimate_var(sample: &Sample, spec: &VarSpec) -> Result<VarEstimate, VarError> {
    estimate_var_with_divisor(sample, spec, CovarianceDivisor::DegreesOfFreedom)
}

pub fn estimate_var_with_divisor(
    sample: &Sample,
    spec: &VarSpec,
    divisor: CovarianceDivisor,
) -> Result<VarEstimate, VarError> {
    let (x, y) = build_regression(sample, spec)?;
    let m = spec.dimension();
    let p = spec.lag_order;
    let n_eff = x.rows();

    // coefficient matrix B is k×m: column j holds equation j's coefficients
    let b = least_squares(&x, &y)?;
    let residuals = y.sub(&x.matmul(&b));

    let mut intercept = vec![0.0; m];
    let mut offset = 0;
    if spec.include_intercept {
        for j in 0..m {
            intercept[j] = b[(0, j)];
        }
        offset = 1;
    }
    let mut lag_matrices = Vec::with_capacity(p);
    for lag in 0..p {
        let mut a = Matrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                // equation i, coefficient on variable j at this lag
                a[(i, j)] = b[(offset + lag * m + j, i)];
            }
        }
        lag_matrices.push(a);
    }

    // EᵀE is bitwise symmetric (each (i,j)/(j,i) pair sums identical products)
    let d = divisor.value(n_eff, spec.regressor_count()) as f64;
    let sigma = residuals.transpose().matmul(&residuals).scaled(1.0 / d);

    let sample_years = sample.years[p..].to_vec();
    Ok(VarEstimate {
        spec: spec.clone(),
        intercept,
        lag_matrices,
        residuals,
        sigma,
        sample_years,
        divisor,
    })
}

impl VarEstimate {
    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    /// Deterministic path of length p + innovations rows: the first p
    /// rows are `initial`, then y_t = c + Σ_j A_j y_{t−j} + u_t.
    pub fn simulate(&self, initial: &Matrix, innovations: &Matrix) -> Result<Matrix, VarError> {
        let m = self.dimension();
        let p = self.spec.lag_order;
        if initial.rows() != p || initial.cols() != m {
            return Err(VarError::InvalidSpec(format!(
                "initial block must be {p}x{m}, got {}x{}",
                initial.rows(),
                initial.cols()
            )));
        }
        if innovations.cols() != m {
            return Err(VarError::InvalidSpec(format!(
                "innovations must have {m} columns, got {}",
                innovations.cols()
            )));
        }
        let n = innovations.rows();
        let mut path = Matrix::zeros(p + n, m);
        for r in 0..p {
            for j in 0..m {
                path[(r, j)] = initial[(r, j)];
            }
        }
        for t in p..p + n {
            for i in 0..m {
                let mut v = self.intercept[i] + innovations[(t - p, i)];
                for (lag, a) in self.lag_matrices.iter().enumerate() {
                    for j in 0..m {
                        v += a[(i, j)] * path[(t - lag - 1, j)];
                    }
                }
                path[(t, i)] = v;
            }
        }
        Ok(path)
    }
}

/// Companion form: top block row [A_1 … A_p], identity blocks on the
/// subdiagonal, zeros elsewhere. mp × mp.
pub fn companion_matrix(est: &VarEstimate) -> Matrix {
    let m = est.dimension();
    let p = est.spec.lag_order;
    let n = m * p;
    let mut c = Matrix::zeros(n, n);
    for (lag, a) in est.lag_matrices.iter().enumerate() {
        for i in 0..m {
            for j in 0..m {
                c[(i, lag * m + j)] = a[(i, j)];
            }
        }
    }
    for i in m..n {
        c[(i, i - m)] = 1.0;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub is_stable: bool,
    pub radius: f64,
}

/// Spectral radius of the companion matrix. Reported, never enforced:
/// unstable systems still produce impulse responses.
pub fn stability(est: &VarEstimate) -> Result<Stability, VarError> {
    let radius = spectral_radius(&companion_matrix(est))?;
    Ok(Stability {
        is_stable: radius < 1.0 - 1e-10,
        radius,
    })
}

/// Moving-average inversion Φ_0..Φ_H: Φ_0 = I, Φ_h = Σ_{j=1..min(h,p)} A_j Φ_{h−j}.
pub fn ma_coefficients(est: &VarEstimate, horizon: usize) -> Vec<Matrix> {
    let m = est.dimension();
    let p = est.spec.lag_order;
    let mut phi = Vec::with_capacity(horizon + 1);
    phi.push(Matrix::identity(m));
    for h in 1..=horizon {
        let mut acc = Matrix::zeros(m, m);
        for j in 1..=h.min(p) {
            acc = acc_add(acc, &est.lag_matrices[j - 1].matmul(&phi[h - j]));
        }
        phi.push(acc);
    }
    phi
}

fn acc_add(mut acc: Matrix, rhs: &Matrix) -> Matrix {
    for i in 0..acc.rows() {
        for j in 0..acc.cols() {
            acc[(i, j)] += rhs[(i, j)];
        }
    }
    acc
}

/// Bootstrap band block of an [`IrfResult`].
#[derive(Debug, Clone, PartialEq)]
pub struct IrfBands {
    pub lower: Vec<Matrix>,
    pub upper: Vec<Matrix>,
    pub replications: usize,
    pub level: f64,
    pub seed: u64,
}

/// Orthogonalized impulse responses: entry [h][(i, j)] is the response
/// of variable i at horizon h to a one-standard-deviation shock in
/// variable j, shocks identified recursively in `ordering`.
#[derive(Debug, Clone, PartialEq)]
pub struct IrfResult {
    pub ordering: Vec<String>,
    pub point: Vec<Matrix>,
    pub bands: Option<IrfBands>,
}

impl IrfResult {
    pub fn horizon(&self) -> usize {
        self.point.len() - 1
    }
}

/// Point impulse responses Θ_h = Φ_h · cholesky_lower(Σ), no bands.
pub fn orthogonal_irf(est: &VarEstimate, horizon: usize) -> Result<IrfResult, VarError> {
    let chol = cholesky_lower(&est.sigma)?;
    let point = ma_coefficients(est, horizon)
        .iter()
        .map(|phi| phi.matmul(&chol))
        .collect();
    Ok(IrfResult {
        ordering: est.spec.variable_names.clone(),
        point,
        bands: None,
    })
}

/// Forecast error variance decomposition: share[h][(i, j)] of variable
/// i's h-step forecast error variance attributed to shock j. Rows sum
/// to one at every horizon.
pub fn fevd(est: &VarEstimate, horizon: usize) -> Result<Vec<Matrix>, VarError> {
    let irf = orthogonal_irf(est, horizon)?;
    let m = est.dimension();
    let mut cumulative = Matrix::zeros(m, m);
    let mut shares = Vec::with_capacity(horizon + 1);
    for theta in &irf.point {
        for i in 0..m {
            for j in 0..m {
                cumulative[(i, j)] += theta[(i, j)] * theta[(i, j)];
            }
        }
        let mut share = Matrix::zeros(m, m);
        for i in 0..m {
            let total: f64 = (0..m).map(|j| cumulative[(i, j)]).sum();
            for j in 0..m {
                share[(i, j)] = cumulative[(i, j)] / total;
            }
        }
        shares.push(share);
    }
    Ok(shares)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagCriterion {
    Aic,
    Bic,
}

impl LagCriterion {
    pub fn name(self) -> &'static str {
        match self {
            LagCriterion::Aic => "aic",
            LagCriterion::Bic => "bic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "aic" => Some(LagCriterion::Aic),
            "bic" => Some(LagCriterion::Bic),
            _ => None,
        }
    }
}

/// One candidate's score in a lag-selection sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LagScore {
    pub lag: usize,
    pub criterion_value: f64,
}

/// Chooses the lag order in 1..=p_max by information criterion, every
/// candidate fitted on the common sample (the first p_max observations
/// serve only as lags). Ties break toward the smaller order.
pub fn select_lag(
    sample: &Sample,
    spec_template: &VarSpec,
    p_max: usize,
    criterion: LagCriterion,
) -> Result<usize, VarError> {
    Ok(select_lag_detailed(sample, spec_template, p_max, criterion)?.0)
}

pub fn select_lag_detailed(
    sample: &Sample,
    spec_template: &VarSpec,
    p_max: usize,
    criterion: LagCriterion,
) -> Result<(usize, Vec<LagScore>), VarError> {
    if p_max == 0 {
        return Err(VarError::InvalidSpec("p_max must be at least 1".into()));
    }
    let t = sample.matrix.rows();
    if t <= p_max {
        return Err(VarError::InsufficientObservations { have: 0, need: 1 });
    }
    let m = spec_template.dimension();
    let n_eff = t - p_max;
    let mut best: Option<(usize, f64)> = None;
    let mut scores = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let spec = VarSpec {
            lag_order: p,
            ..spec_template.clone()
        };
        // same Y rows for every candidate: keep p lags before the common sample
        let start = p_max - p;
        let rows: Vec<Vec<f64>> = (start..t).map(|r| sample.matrix.row(r).to_vec()).collect();
        let sub = Sample {
            years: sample.years[start..].to_vec(),
            variables: sample.variables.clone(),
            matrix: Matrix::from_rows(&rows).expect("sub-sample rows are rectangular"),
        };
        let (x, y) = build_regression(&sub, &spec)?;
        debug_assert_eq!(y.rows(), n_eff);
        let b = least_squares(&x, &y)?;
        let resid = y.sub(&x.matmul(&b));
        let sigma_ml = resid.transpose().matmul(&resid).scaled(1.0 / n_eff as f64);
        let chol = cholesky_lower(&sigma_ml)?;
        let ln_det: f64 = (0..m).map(|i| 2.0 * chol[(i, i)].ln()).sum();
        let params = (m * spec.regressor_count()) as f64;
        let penalty = match criterion {
            LagCriterion::Aic => 2.0,
            LagCriterion::Bic => (n_eff as f64).ln(),
        };
        let value = ln_det + penalty * params / n_eff as f64;
        scores.push(LagScore {
            lag: p,
            criterion_value: value,
        });
        // strict improvement keeps the smaller lag on ties
        if best.map_or(true, |(_, current)| value < current) {
            best = Some((p, value));
        }
    }
    Ok((best.expect("at least one candidate").0, scores))
}
