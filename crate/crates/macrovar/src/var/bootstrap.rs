//! Residual-based recursive bootstrap for impulse-response confidence
//! bands.
//!
//! Each replication resamples centered residual rows with replacement,
//! rebuilds the series from the first p actual observations with the
//! estimated coefficients, re-estimates, and recomputes the
//! orthogonalized responses. Replication r draws from ChaCha stream
//! r + 1 of the master seed, so the replication set is a pure function
//! of (inputs, seed) and parallel execution is bitwise identical to
//! serial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::numerics::{Matrix, NumericsError};
use crate::timeseries::Sample;
use crate::var::{
    estimate_var_with_divisor, orthogonal_irf, CovarianceDivisor, IrfBands, IrfResult, VarError,
    VarSpec,
};

/// A replication whose refit is rank deficient is redrawn at most this
/// many times, keeping total draws within 10x the replication count.
const MAX_DRAWS_PER_REPLICATION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    pub divisor: CovarianceDivisor,
    pub parallel: bool,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions {
            divisor: CovarianceDivisor::DegreesOfFreedom,
            parallel: true,
        }
    }
}

/// Orthogonalized impulse responses with percentile bootstrap bands,
/// replications run in parallel.
pub fn bootstrap_bands(
    sample: &Sample,
    spec: &VarSpec,
    horizon: usize,
    replications: usize,
    level: f64,
    seed: u64,
) -> Result<IrfResult, VarError> {
    bootstrap_bands_with_options(
        sample,
        spec,
        horizon,
        replications,
        level,
        seed,
        BootstrapOptions::default(),
    )
}

/// Same computation on a single thread; the result is bitwise identical
/// to the parallel form.
pub fn bootstrap_bands_serial(
    sample: &Sample,
    spec: &VarSpec,
    horizon: usize,
    replications: usize,
    level: f64,
    seed: u64,
) -> Result<IrfResult, VarError> {
    bootstrap_bands_with_options(
        sample,
        spec,
        horizon,
        replications,
        level,
        seed,
        BootstrapOptions {
            parallel: false,
            ..BootstrapOptions::default()
        },
    )
}

pub fn bootstrap_bands_with_options(
    sample: &Sample,
    spec: &VarSpec,
    horizon: usize,
    replications: usize,
    level: f64,
    seed: u64,
    options: BootstrapOptions,
) -> Result<IrfResult, VarError> {
    if replications < 100 {
        return Err(VarError::InvalidBootstrap(format!(
            "need at least 100 replications, got {replications}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(VarError::InvalidBootstrap(format!(
            "confidence level must lie strictly between 0 and 1, got {level}"
        )));
    }

    let est = estimate_var_with_divisor(sample, spec, options.divisor)?;
    let point = orthogonal_irf(&est, horizon)?;
    let m = est.dimension();
    let p = spec.lag_order;

    // centered residual rows are the resampling pool
    let n_resid = est.residuals.rows();
    let mut centered = est.residuals.clone();
    for j in 0..m {
        let mean: f64 = (0..n_resid).map(|r| centered[(r, j)]).sum::<f64>() / n_resid as f64;
        for r in 0..n_resid {
            centered[(r, j)] -= mean;
        }
    }

    // first p actual observations, held fixed across replications
    let initial_rows: Vec<Vec<f64>> = (0..p).map(|r| sample.matrix.row(r).to_vec()).collect();
    let initial = Matrix::from_rows(&initial_rows).expect("p nonempty rows");

    let worker = |r: usize| -> Result<Vec<Matrix>, VarError> {
        replicate(
            &est, &initial, &centered, sample, spec, horizon, seed, r, options.divisor,
        )
    };
    let outcomes: Vec<Result<Vec<Matrix>, VarError>> = if options.parallel {
        (0..replications).into_par_iter().map(worker).collect()
    } else {
        (0..replications).map(worker).collect()
    };
    // surface errors in replication order so failures are deterministic too
    let mut thetas = Vec::with_capacity(replications);
    for outcome in outcomes {
        thetas.push(outcome?);
    }

    let q_low = (1.0 - level) / 2.0;
    let q_high = (1.0 + level) / 2.0;
    let mut lower = Vec::with_capacity(horizon + 1);
    let mut upper = Vec::with_capacity(horizon + 1);
    let mut cell = vec![0.0_f64; replications];
    for h in 0..=horizon {
        let mut lo = Matrix::zeros(m, m);
        let mut hi = Matrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                for (r, theta) in thetas.iter().enumerate() {
                    cell[r] = theta[h][(i, j)];
                }
                cell.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite responses"));
                lo[(i, j)] = percentile(&cell, q_low);
                hi[(i, j)] = percentile(&cell, q_high);
            }
        }
        lower.push(lo);
        upper.push(hi);
    }

    Ok(IrfResult {
        ordering: point.ordering,
        point: point.point,
        bands: Some(IrfBands {
            lower,
            upper,
            replications,
            level,
            seed,
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn replicate(
    est: &crate::var::VarEstimate,
    initial: &Matrix,
    centered: &Matrix,
    sample: &Sample,
    spec: &VarSpec,
    horizon: usize,
    seed: u64,
    r: usize,
    divisor: CovarianceDivisor,
) -> Result<Vec<Matrix>, VarError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64 + 1);
    let n = centered.rows();
    let m = centered.cols();
    for _ in 0..MAX_DRAWS_PER_REPLICATION {
        let mut innovations = Matrix::zeros(n, m);
        for t in 0..n {
            let pick = rng.gen_range(0..n);
            for j in 0..m {
                innovations[(t, j)] = centered[(pick, j)];
            }
        }
        let path = est.simulate(initial, &innovations)?;
        let resample = Sample {
            years: sample.years.clone(),
            variables: sample.variables.clone(),
            matrix: path,
        };
        match estimate_var_with_divisor(&resample, spec, divisor)
            .and_then(|refit| orthogonal_irf(&refit, horizon))
        {
            Ok(irf) => return Ok(irf.point),
            Err(VarError::Numerics(NumericsError::RankDeficient { .. })) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(VarError::BootstrapFailed {
        draws: MAX_DRAWS_PER_REPLICATION,
    })
}

/// Linear-interpolation percentile (the common "type 7" definition) of
/// an ascending-sorted slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::estimate_var;

    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (*state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    fn gauss(state: &mut u64) -> f64 {
        (0..12).map(|_| lcg(state)).sum()
    }

    fn stable_var1_sample(t: usize, seed: u64) -> Sample {
        let a = [[0.5, 0.1], [-0.2, 0.3]];
        let mut state = seed;
        let mut rows = vec![vec![0.0, 0.0]];
        for r in 1..t {
            let prev = rows[r - 1].clone();
            rows.push(vec![
                0.2 + a[0][0] * prev[0] + a[0][1] * prev[1] + gauss(&mut state),
                -0.1 + a[1][0] * prev[0] + a[1][1] * prev[1] + gauss(&mut state),
            ]);
        }
        Sample {
            years: (0..t as i32).collect(),
            variables: vec!["v0".into(), "v1".into()],
            matrix: Matrix::from_rows(&rows).unwrap(),
        }
    }

    fn spec2() -> VarSpec {
        VarSpec::new(vec!["v0".into(), "v1".into()], 1).unwrap()
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert_eq!(percentile(&v, 0.5), 2.5);
        assert_eq!(percentile(&v, 1.0 / 3.0), 2.0);
        assert_eq!(percentile(&[7.0], 0.25), 7.0);
    }

    #[test]
    fn rejects_bad_requests() {
        let s = stable_var1_sample(60, 5);
        assert!(matches!(
            bootstrap_bands(&s, &spec2(), 4, 99, 0.95, 1),
            Err(VarError::InvalidBootstrap(_))
        ));
        assert!(matches!(
            bootstrap_bands(&s, &spec2(), 4, 100, 1.0, 1),
            Err(VarError::InvalidBootstrap(_))
        ));
        assert!(matches!(
            bootstrap_bands(&s, &spec2(), 4, 100, 0.0, 1),
            Err(VarError::InvalidBootstrap(_))
        ));
    }

    #[test]
    fn deterministic_and_ordered_bands() {
        let s = stable_var1_sample(80, 42);
        let a = bootstrap_bands(&s, &spec2(), 6, 100, 0.9, 42).unwrap();
        let b = bootstrap_bands(&s, &spec2(), 6, 100, 0.9, 42).unwrap();
        assert_eq!(a, b);
        let bands = a.bands.as_ref().unwrap();
        for h in 0..=6 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(bands.lower[h][(i, j)] <= bands.upper[h][(i, j)]);
                }
            }
        }
        // a different seed moves the bands
        let c = bootstrap_bands(&s, &spec2(), 6, 100, 0.9, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn parallel_matches_serial_bitwise() {
        let s = stable_var1_sample(70, 7);
        let par = bootstrap_bands(&s, &spec2(), 5, 120, 0.95, 7).unwrap();
        let ser = bootstrap_bands_serial(&s, &spec2(), 5, 120, 0.95, 7).unwrap();
        assert_eq!(par, ser);
    }

    #[test]
    fn point_estimate_matches_plain_irf() {
        let s = stable_var1_sample(60, 9);
        let est = estimate_var(&s, &spec2()).unwrap();
        let plain = orthogonal_irf(&est, 5).unwrap();
        let booted = bootstrap_bands(&s, &spec2(), 5, 100, 0.95, 3).unwrap();
        assert_eq!(plain.point, booted.point);
    }

    #[test]
    fn estimation_errors_surface_from_bootstrap() {
        // duplicated variable columns make the design collinear: the
        // initial estimation fails and the error propagates untouched
        let mut state = 21_u64;
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| {
                let v = gauss(&mut state);
                vec![v, v]
            })
            .collect();
        let s = Sample {
            years: (0..40).collect(),
            variables: vec!["v0".into(), "v1".into()],
            matrix: Matrix::from_rows(&rows).unwrap(),
        };
        assert!(matches!(
            bootstrap_bands(&s, &spec2(), 3, 100, 0.95, 1),
            Err(VarError::Numerics(NumericsError::RankDeficient { .. }))
        ));
    }
}
