//! Property tests for the numeric and statistical invariants the crate
//! promises: transform round trips, factorization identities, the
//! IRF/simulation equivalence, variance-share normalization, relabeling
//! equivariance, and geometric response decay on stable systems.

use proptest::prelude::*;

use macrovar::numerics::{cholesky_lower, least_squares, spectral_radius, Matrix};
use macrovar::timeseries::{Sample, TimeSeriesPanel, TransformKind};
use macrovar::var::{
    estimate_var, fevd, ma_coefficients, orthogonal_irf, stability, VarEstimate, VarSpec,
};

fn positive_series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3_f64..1e6, 3..24)
}

fn bounded_series(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0_f64..100.0, len)
}

fn panel_from(values: Vec<f64>) -> TimeSeriesPanel {
    let years: Vec<i32> = (0..values.len() as i32).collect();
    TimeSeriesPanel::build("X", &years, &[("v".to_string(), values)]).unwrap()
}

fn sample_from_rows(rows: Vec<Vec<f64>>) -> Sample {
    let matrix = Matrix::from_rows(&rows).unwrap();
    Sample {
        years: (0..matrix.rows() as i32).collect(),
        variables: (0..matrix.cols()).map(|i| format!("v{i}")).collect(),
        matrix,
    }
}

fn spec(m: usize, p: usize) -> VarSpec {
    VarSpec::new((0..m).map(|i| format!("v{i}")).collect(), p).unwrap()
}

/// Random lag matrices rescaled so the companion radius hits `target`;
/// scaling A_j by c^j scales every companion eigenvalue by c.
fn stable_lag_matrices(m: usize, raw: &[f64], p: usize, target: f64) -> Option<Vec<Matrix>> {
    let mut mats = Vec::with_capacity(p);
    for lag in 0..p {
        let data: Vec<f64> = raw[lag * m * m..(lag + 1) * m * m].to_vec();
        mats.push(Matrix::new(m, m, data).unwrap());
    }
    let est = synthetic_estimate(mats.clone(), Matrix::identity(m));
    let radius = spectral_radius(&macrovar::var::companion_matrix(&est)).ok()?;
    if radius == 0.0 {
        return None;
    }
    let c = target / radius;
    for (lag, a) in mats.iter_mut().enumerate() {
        *a = a.scaled(c.powi(lag as i32 + 1));
    }
    Some(mats)
}

fn synthetic_estimate(lag_matrices: Vec<Matrix>, sigma: Matrix) -> VarEstimate {
    let m = sigma.rows();
    VarEstimate {
        spec: spec(m, lag_matrices.len()),
        intercept: vec![0.0; m],
        lag_matrices,
        residuals: Matrix::zeros(4, m),
        sigma,
        sample_years: vec![1, 2, 3, 4],
        divisor: macrovar::var::CovarianceDivisor::DegreesOfFreedom,
    }
}

proptest! {
    #[test]
    fn log_transform_round_trips(values in positive_series()) {
        let panel = panel_from(values.clone());
        let logged = panel.apply_transform("v", TransformKind::Log).unwrap();
        for (orig, transformed) in values.iter().zip(logged.column("v").unwrap()) {
            let back = transformed.unwrap().exp();
            prop_assert!((back - orig).abs() <= 1e-12 * orig.abs());
        }
    }

    #[test]
    fn standardize_round_trips(values in bounded_series(3..24)) {
        let panel = panel_from(values.clone());
        let standardized = match panel.apply_transform("v", TransformKind::Standardize) {
            Ok(p) => p,
            // constant input has no scale; rejection is the contract
            Err(_) => return Ok(()),
        };
        let chain = standardized.chain("v").unwrap();
        let macrovar::timeseries::AppliedTransform::Standardize { mean, stddev } = chain[0]
        else {
            panic!("expected a standardize record");
        };
        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1.0);
        for (orig, transformed) in values.iter().zip(standardized.column("v").unwrap()) {
            let back = transformed.unwrap() * stddev + mean;
            prop_assert!((back - orig).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn diff_then_cumulate_round_trips(values in bounded_series(3..24)) {
        let panel = panel_from(values.clone());
        let diffed = panel.apply_transform("v", TransformKind::Diff).unwrap();
        let col = diffed.column("v").unwrap();
        prop_assert_eq!(col[0], None);
        let mut level = values[0];
        for (orig, d) in values[1..].iter().zip(&col[1..]) {
            level += d.unwrap();
            prop_assert!((level - orig).abs() <= 1e-9 * (1.0 + orig.abs()));
        }
    }

    #[test]
    fn untouched_columns_stay_bitwise_identical(
        a in bounded_series(4..16),
        shift in -5.0_f64..5.0,
    ) {
        let b: Vec<f64> = a.iter().map(|v| v * 0.5 + shift).collect();
        let years: Vec<i32> = (0..a.len() as i32).collect();
        let panel = TimeSeriesPanel::build(
            "X",
            &years,
            &[("a".to_string(), a), ("b".to_string(), b)],
        )
        .unwrap();
        let transformed = panel.apply_transform("a", TransformKind::Diff).unwrap();
        prop_assert_eq!(panel.column("b").unwrap(), transformed.column("b").unwrap());
    }

    #[test]
    fn residuals_are_orthogonal_to_regressors(
        x_data in prop::collection::vec(-1.0_f64..1.0, 12 * 3),
        y_data in prop::collection::vec(-1.0_f64..1.0, 12 * 2),
    ) {
        let x = Matrix::new(12, 3, x_data).unwrap();
        let y = Matrix::new(12, 2, y_data).unwrap();
        let b = match least_squares(&x, &y) {
            Ok(b) => b,
            Err(_) => return Ok(()), // degenerate draw
        };
        let resid = y.sub(&x.matmul(&b));
        let xt_r = x.transpose().matmul(&resid);
        let bound = 1e-8 * x.frobenius_norm() * y.frobenius_norm().max(1.0);
        prop_assert!(xt_r.max_abs() <= bound);
    }

    #[test]
    fn cholesky_reconstructs_and_stays_triangular(
        dim in 1usize..=6,
        raw in prop::collection::vec(-2.0_f64..2.0, 36),
    ) {
        let b = Matrix::new(dim, dim, raw[..dim * dim].to_vec()).unwrap();
        let mut s = b.matmul(&b.transpose());
        for i in 0..dim {
            s[(i, i)] += 0.5; // keep the matrix safely positive definite
        }
        let p = cholesky_lower(&s).unwrap();
        for i in 0..dim {
            prop_assert!(p[(i, i)] > 0.0);
            for j in i + 1..dim {
                prop_assert_eq!(p[(i, j)], 0.0);
            }
        }
        let recon = p.matmul(&p.transpose());
        prop_assert!(recon.sub(&s).frobenius_norm() <= 1e-12 * s.frobenius_norm());
    }

    #[test]
    fn spectral_radius_scales_linearly(
        dim in 1usize..=5,
        raw in prop::collection::vec(-1.0_f64..1.0, 25),
        c in 0.1_f64..10.0,
    ) {
        let m = Matrix::new(dim, dim, raw[..dim * dim].to_vec()).unwrap();
        let r = spectral_radius(&m).unwrap();
        let r_scaled = spectral_radius(&m.scaled(c)).unwrap();
        prop_assert!((r_scaled - c * r).abs() <= 1e-8 * (1.0 + c * r));
    }

    #[test]
    fn spectral_radius_of_triangular_is_max_abs_diagonal(
        dim in 1usize..=6,
        raw in prop::collection::vec(-3.0_f64..3.0, 36),
    ) {
        let mut t = Matrix::zeros(dim, dim);
        let mut idx = 0;
        for i in 0..dim {
            for j in i..dim {
                t[(i, j)] = raw[idx];
                idx += 1;
            }
        }
        let expected = (0..dim).map(|i| t[(i, i)].abs()).fold(0.0, f64::max);
        let r = spectral_radius(&t).unwrap();
        prop_assert!((r - expected).abs() <= 1e-8 * (1.0 + expected));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_form_irf_equals_simulation_delta(
        m in 1usize..=3,
        p in 1usize..=2,
        raw in prop::collection::vec(-1.0_f64..1.0, 18),
        intercept_raw in prop::collection::vec(-2.0_f64..2.0, 3),
        target in 0.2_f64..0.9,
    ) {
        let mats = match stable_lag_matrices(m, &raw, p, target) {
            Some(mats) => mats,
            None => return Ok(()),
        };
        let mut est = synthetic_estimate(mats, Matrix::identity(m));
        est.intercept = intercept_raw[..m].to_vec();
        let h = 20;
        let phi = ma_coefficients(&est, h);
        let zeros_init = Matrix::zeros(p, m);
        let baseline = est
            .simulate(&zeros_init, &Matrix::zeros(h + 1, m))
            .unwrap();
        for j in 0..m {
            let mut shock = Matrix::zeros(h + 1, m);
            shock[(0, j)] = 1.0;
            let shocked = est.simulate(&zeros_init, &shock).unwrap();
            for hh in 0..=h {
                for i in 0..m {
                    let delta = shocked[(p + hh, i)] - baseline[(p + hh, i)];
                    prop_assert!(
                        (delta - phi[hh][(i, j)]).abs() < 1e-10,
                        "h={} i={} j={}", hh, i, j
                    );
                }
            }
        }
    }

    #[test]
    fn fevd_rows_sum_to_one(
        m in 2usize..=3,
        p in 1usize..=2,
        raw in prop::collection::vec(-1.0_f64..1.0, 18),
        sigma_raw in prop::collection::vec(-1.0_f64..1.0, 9),
        target in 0.2_f64..0.95,
    ) {
        let mats = match stable_lag_matrices(m, &raw, p, target) {
            Some(mats) => mats,
            None => return Ok(()),
        };
        let b = Matrix::new(m, m, sigma_raw[..m * m].to_vec()).unwrap();
        let mut sigma = b.matmul(&b.transpose());
        for i in 0..m {
            sigma[(i, i)] += 0.3;
        }
        let est = synthetic_estimate(mats, sigma);
        for share in fevd(&est, 12).unwrap() {
            for i in 0..m {
                let row_sum: f64 = (0..m).map(|j| share[(i, j)]).sum();
                prop_assert!((row_sum - 1.0).abs() < 1e-10);
                for j in 0..m {
                    prop_assert!(share[(i, j)] >= 0.0);
                }
            }
        }
    }

    #[test]
    fn stable_responses_decay_geometrically(
        m in 1usize..=3,
        p in 1usize..=2,
        raw in prop::collection::vec(-1.0_f64..1.0, 18),
        target in 0.3_f64..0.9,
    ) {
        let mats = match stable_lag_matrices(m, &raw, p, target) {
            Some(mats) => mats,
            None => return Ok(()),
        };
        let est = synthetic_estimate(mats, Matrix::identity(m));
        let st = stability(&est).unwrap();
        prop_assert!(st.is_stable);
        let h = 20;
        let irf = orthogonal_irf(&est, 2 * h).unwrap();
        let max_at = |hh: usize| irf.point[hh].max_abs();
        prop_assert!(max_at(2 * h) < max_at(h).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn relabeling_permutes_the_estimate(
        raw in prop::collection::vec(-1.0_f64..1.0, 3 * 3),
        noise in prop::collection::vec(-0.5_f64..0.5, 40 * 3),
    ) {
        // generate a 3-variable VAR(1) path, estimate it under two
        // labelings, and check the coefficient objects permute along
        let m = 3;
        let t = 40;
        let mats = match stable_lag_matrices(m, &raw, 1, 0.6) {
            Some(mats) => mats,
            None => return Ok(()),
        };
        let a = &mats[0];
        let mut rows = vec![vec![0.0; m]];
        for r in 1..t {
            let prev = rows[r - 1].clone();
            let mut next = vec![0.0; m];
            for i in 0..m {
                next[i] = noise[r * m + i]
                    + (0..m).map(|j| a[(i, j)] * prev[j]).sum::<f64>();
            }
            rows.push(next);
        }
        let perm = [2usize, 0, 1]; // permuted column k holds original column perm[k]
        let permuted_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| perm.iter().map(|&k| r[k]).collect())
            .collect();

        let base = estimate_var(&sample_from_rows(rows), &spec(m, 1));
        let renamed_spec = VarSpec::new(
            perm.iter().map(|&k| format!("v{k}")).collect(),
            1,
        )
        .unwrap();
        let mut permuted_sample = sample_from_rows(permuted_rows);
        permuted_sample.variables = renamed_spec.variable_names.clone();
        let permuted = estimate_var(&permuted_sample, &renamed_spec);
        let (Ok(base), Ok(permuted)) = (base, permuted) else {
            return Ok(()); // degenerate draw
        };

        let tol = 1e-8;
        for i in 0..m {
            prop_assert!(
                (permuted.intercept[i] - base.intercept[perm[i]]).abs()
                    <= tol * (1.0 + base.intercept[perm[i]].abs())
            );
            for j in 0..m {
                let expected = base.lag_matrices[0][(perm[i], perm[j])];
                let got = permuted.lag_matrices[0][(i, j)];
                prop_assert!((got - expected).abs() <= tol * (1.0 + expected.abs()));
                let sig_expected = base.sigma[(perm[i], perm[j])];
                let sig_got = permuted.sigma[(i, j)];
                prop_assert!(
                    (sig_got - sig_expected).abs() <= tol * (1.0 + sig_expected.abs())
                );
            }
        }
        // reduced-form responses permute the same way
        let phi_base = ma_coefficients(&base, 6);
        let phi_perm = ma_coefficients(&permuted, 6);
        for h in 0..=6 {
            for i in 0..m {
                for j in 0..m {
                    let expected = phi_base[h][(perm[i], perm[j])];
                    let got = phi_perm[h][(i, j)];
                    prop_assert!((got - expected).abs() <= tol * (1.0 + expected.abs()));
                }
            }
        }
    }
}

/// Cross-module smoke path: raw panel -> transforms -> complete cases ->
/// estimation -> responses, on synthetic data with a known shape.
#[test]
fn panel_to_irf_pipeline_runs() {
    let t = 30;
    let mut state = 77_u64;
    let mut lcg = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut gdp = vec![100.0_f64];
    let mut rate = vec![5.0_f64];
    for i in 1..t {
        let g = gdp[i - 1] * (1.02 + 0.01 * lcg());
        gdp.push(g);
        rate.push(5.0 + 0.5 * rate[i - 1] / 5.0 + lcg());
    }
    let years: Vec<i32> = (1990..1990 + t as i32).collect();
    let panel = TimeSeriesPanel::build(
        "X",
        &years,
        &[("gdp".to_string(), gdp), ("rate".to_string(), rate)],
    )
    .unwrap();
    let panel = panel.apply_transform("gdp", TransformKind::Log).unwrap();
    let sample = panel
        .complete_cases(&["gdp".to_string(), "rate".to_string()])
        .unwrap();
    assert_eq!(sample.matrix.rows(), t);
    let spec = VarSpec::new(vec!["gdp".to_string(), "rate".to_string()], 1).unwrap();
    let est = estimate_var(&sample, &spec).unwrap();
    let irf = orthogonal_irf(&est, 10).unwrap();
    assert_eq!(irf.point.len(), 11);
    assert_eq!(irf.point[0][(0, 1)], 0.0);
    let shares = fevd(&est, 10).unwrap();
    assert!((shares[10][(0, 0)] + shares[10][(0, 1)] - 1.0).abs() < 1e-10);
    let st = stability(&est).unwrap();
    assert!(st.radius.is_finite());
}
