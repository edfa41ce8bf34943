//! Deterministic property checks. Each panics on failure; `properties.rs`
//! wraps them as tests and the acceptance run calls them as one criterion.

use super::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;
use sl0::expgen::{
    generate_mixing, generate_problem, generate_sources, mix, mse, snr_db, Activity, MixingSpec,
    ProblemSpec, SourceModel,
};
use sl0::linalg::{check_urp, compute_m, min_norm_solution, project_feasible, ProjectorFactor};
use sl0::penalty::{ascent_direction, eval_big_f, PenaltyFamily};
use sl0::solver::{
    error_upper_bound, maximize_at_sigma, sl0_solve, sl0_solve_batch, ScheduleSpec, SigmaSchedule, SolverConfig,
};

pub const ALL: &[(&str, fn())] = &[
    ("projection_is_idempotent_and_feasible", projection_is_idempotent_and_feasible),
    ("projection_matches_explicit_inverse", projection_matches_explicit_inverse),
    ("min_norm_solution_is_orthogonal_to_null_space", min_norm_solution_is_orthogonal_to_null_space),
    ("min_norm_solution_is_minimal", min_norm_solution_is_minimal),
    ("null_space_vectors_with_few_large_entries_are_bounded", null_space_vectors_with_few_large_entries_are_bounded),
    ("urp_check_agrees_with_determinant_oracle", urp_check_agrees_with_determinant_oracle),
    ("m_constant_agrees_with_enumeration_oracle", m_constant_agrees_with_enumeration_oracle),
    ("gaussian_gradient_matches_finite_differences", gaussian_gradient_matches_finite_differences),
    ("rational_gradient_matches_finite_differences", rational_gradient_matches_finite_differences),
    ("snr_and_mse_are_consistent", snr_and_mse_are_consistent),
    ("batch_equals_columnwise", batch_equals_columnwise),
    ("generation_and_solve_are_seed_deterministic", generation_and_solve_are_seed_deterministic),
    ("a_posteriori_bound_covers_true_error", a_posteriori_bound_covers_true_error),
    ("smoothed_count_rises_along_projected_steps", smoothed_count_rises_along_projected_steps),
    ("exact_k_activity_and_binomial_concentration", exact_k_activity_and_binomial_concentration),
    ("noise_energy_concentrates", noise_energy_concentrates),
    ("generated_mixing_matrices_have_urp", generated_mixing_matrices_have_urp),
    ("projection_lands_on_feasible_set", projection_lands_on_feasible_set),
    ("enumeration_oracle_finds_one_sparse_sources", enumeration_oracle_finds_one_sparse_sources),
];

pub fn projection_is_idempotent_and_feasible() {
    let mut r = rng(1);
    for _ in 0..50 {
        let a = dense(&gaussian_matrix(&mut r, 8, 20));
        let x = dvec(&gaussian_vector(&mut r, 8));
        let s = dvec(&gaussian_vector(&mut r, 20).scale(3.0));
        let p = ProjectorFactor::new(&a).unwrap();
        let once = project_feasible(&p, &s, &x).unwrap();
        let twice = project_feasible(&p, &once, &x).unwrap();
        let drift = (once.as_nalgebra() - twice.as_nalgebra()).amax();
        assert!(drift <= 1e-10, "drift {drift}");
        let residual = (a.as_nalgebra() * once.as_nalgebra() - x.as_nalgebra()).norm();
        assert!(residual <= 1e-10, "residual {residual}");
    }
}

pub fn projection_matches_explicit_inverse() {
    let mut r = rng(2);
    for _ in 0..20 {
        let a = gaussian_matrix(&mut r, 5, 12);
        let x = gaussian_vector(&mut r, 5);
        let s = gaussian_vector(&mut r, 12);
        let p = ProjectorFactor::new(&dense(&a)).unwrap();
        let got = project_feasible(&p, &dvec(&s), &dvec(&x)).unwrap();
        let want = project_by_inverse(&a, &s, &x);
        assert!((got.as_nalgebra() - want).amax() <= 1e-10);
        let s0 = min_norm_solution(&dense(&a), &dvec(&x)).unwrap();
        assert!((s0.as_nalgebra() - min_norm_by_inverse(&a, &x)).amax() <= 1e-10);
    }
}

pub fn min_norm_solution_is_orthogonal_to_null_space() {
    let mut r = rng(3);
    let a = gaussian_matrix(&mut r, 10, 30);
    let x = gaussian_vector(&mut r, 10);
    let s0 = min_norm_solution(&dense(&a), &dvec(&x)).unwrap();
    let s0 = s0.as_nalgebra();
    let basis = null_space_basis(&a);
    for _ in 0..100 {
        let v = &basis * gaussian_vector(&mut r, basis.ncols());
        assert!((&a * &v).amax() < 1e-10);
        assert!(v.dot(s0).abs() <= 1e-8 * v.norm() * s0.norm());
    }
}

pub fn min_norm_solution_is_minimal() {
    let mut r = rng(4);
    let a = gaussian_matrix(&mut r, 10, 30);
    let x = gaussian_vector(&mut r, 10);
    let s0 = min_norm_solution(&dense(&a), &dvec(&x)).unwrap();
    let basis = null_space_basis(&a);
    for _ in 0..100 {
        let s = s0.as_nalgebra() + &basis * gaussian_vector(&mut r, basis.ncols());
        assert!((&a * &s - &x).amax() < 1e-9);
        assert!(s0.norm() <= s.norm() + 1e-12);
    }
}

pub fn null_space_vectors_with_few_large_entries_are_bounded() {
    let (n, m) = (3, 6);
    let mut r = rng(5);
    for _ in 0..40 {
        let a = unit_columns(gaussian_matrix(&mut r, n, m));
        let m_const = compute_m(&dense(&a)).unwrap();
        for _ in 0..25 {
            // Small entries outside a random size-n set, then solve for the
            // rest so that A v = 0.
            let alpha = 10f64.powf(r.random_range(-4.0..0.0));
            let large = rand::seq::index::sample(&mut r, m, n).into_vec();
            let small: Vec<usize> = (0..m).filter(|j| !large.contains(j)).collect();
            let mut v = DVector::zeros(m);
            for &j in &small {
                v[j] = r.random_range(-alpha..alpha);
            }
            let rhs = -(&a * &v);
            let sub = select_columns(&a, &large);
            let coef = sub.try_inverse().unwrap() * rhs;
            for (c, &j) in coef.iter().zip(&large) {
                v[j] = *c;
            }
            assert!((&a * &v).amax() < 1e-9);
            let bound = (m_const + 1.0) * m as f64 * alpha;
            assert!(v.norm() < bound, "{} >= {bound}", v.norm());
        }
    }
}

pub fn urp_check_agrees_with_determinant_oracle() {
    let mut r = rng(6);
    for trial in 0..30 {
        let mut a = gaussian_matrix(&mut r, 3, 6);
        if trial % 3 == 0 {
            // Force a dependent triple.
            let combo = a.column(0) * 0.7 - a.column(1) * 1.3;
            a.set_column(4, &combo);
        }
        assert_eq!(check_urp(&dense(&a)).unwrap(), urp_by_determinants(&a, 1e-10));
    }
}

pub fn m_constant_agrees_with_enumeration_oracle() {
    let mut r = rng(7);
    for _ in 0..20 {
        let a = unit_columns(gaussian_matrix(&mut r, 3, 6));
        let got = compute_m(&dense(&a)).unwrap();
        let want = m_constant_by_enumeration(&a);
        assert!((got - want).abs() <= 1e-9 * want, "{got} vs {want}");
    }
}

fn finite_difference_check(family: PenaltyFamily, seed: u64) {
    let mut r = rng(seed);
    let h = 1e-6;
    for _ in 0..1000 {
        let sigma = 10f64.powf(r.random_range(-2.0..1.0));
        let s = r.random_range(-4.0..4.0) * sigma;
        let v = dvec(&DVector::from_vec(vec![s]));
        let delta = ascent_direction(family, &v, sigma).unwrap().as_slice()[0];
        let grad = -delta / (sigma * sigma);
        let step = h * sigma;
        let plus = eval_big_f(family, &dvec(&DVector::from_vec(vec![s + step])), sigma).unwrap();
        let minus = eval_big_f(family, &dvec(&DVector::from_vec(vec![s - step])), sigma).unwrap();
        let fd = (plus - minus) / (2.0 * step);
        let scale = 1.0 / sigma;
        assert!(
            (grad - fd).abs() <= 1e-5 * grad.abs().max(1e-3 * scale),
            "{family}: s={s} sigma={sigma} grad={grad} fd={fd}"
        );
    }
}

pub fn gaussian_gradient_matches_finite_differences() {
    finite_difference_check(PenaltyFamily::Gaussian, 8);
}

pub fn rational_gradient_matches_finite_differences() {
    finite_difference_check(PenaltyFamily::Rational, 9);
}

pub fn snr_and_mse_are_consistent() {
    let mut r = rng(10);
    for _ in 0..200 {
        let m = r.random_range(2..200);
        let s = gaussian_vector(&mut r, m);
        let e = &s + gaussian_vector(&mut r, m).scale(10f64.powf(r.random_range(-6.0..0.5)));
        let snr = snr_db(&dvec(&s), &dvec(&e)).unwrap();
        let err = mse(&dvec(&s), &dvec(&e)).unwrap();
        let implied = 10.0 * (s.norm_squared() / (m as f64 * err)).log10();
        assert!((snr - implied).abs() < 1e-9);
    }
}

pub fn batch_equals_columnwise() {
    let mut r = rng(11);
    let a = gaussian_matrix(&mut r, 20, 50);
    let mut cols = Vec::new();
    for _ in 0..5 {
        let mut s = DVector::zeros(50);
        for j in rand::seq::index::sample(&mut r, 50, 5) {
            s[j] = r.sample::<f64, _>(rand_distr::StandardNormal);
        }
        cols.push(&a * s);
    }
    let x = DMatrix::from_columns(&cols);
    let cfg = SolverConfig::default();
    let batch = sl0_solve_batch(&dense(&a), &dense(&x), &cfg).unwrap();
    assert_eq!(batch.len(), 5);
    for (col, report) in cols.iter().zip(&batch) {
        let single = sl0_solve(&dense(&a), &dvec(col), &cfg).unwrap();
        let gap = (single.estimate.as_nalgebra() - report.estimate.as_nalgebra()).amax();
        assert!(gap <= 1e-9, "gap {gap}");
        assert_eq!(single.trace.len(), report.trace.len());
    }
}

pub fn generation_and_solve_are_seed_deterministic() {
    let spec = ProblemSpec {
        n: 40,
        sources: SourceModel::with_mean_active(100, 10.0, 1.0, 0.0),
        noise_sigma: 0.01,
    };
    let p1 = generate_problem(&spec, 42).unwrap();
    let p2 = generate_problem(&spec, 42).unwrap();
    let p3 = generate_problem(&spec, 43).unwrap();
    assert_eq!(p1, p2);
    assert_ne!(p1.a, p3.a);
    let cfg = SolverConfig::default();
    let r1 = sl0_solve(&p1.a, &p1.x, &cfg).unwrap();
    let r2 = sl0_solve(&p2.a, &p2.x, &cfg).unwrap();
    assert!(r1.same_result_as(&r2));
}

pub fn a_posteriori_bound_covers_true_error() {
    let mut r = rng(12);
    let cfg = SolverConfig::default().with_schedule(ScheduleSpec::Explicit(
        SigmaSchedule::geometric(1.0, 0.8, 1e-3).unwrap(),
    ));
    for _ in 0..30 {
        let a = unit_columns(gaussian_matrix(&mut r, 4, 8));
        let mut s = DVector::zeros(8);
        s[r.random_range(0..8)] = r.random_range(0.5..2.0);
        let x = &a * &s;
        let est = sl0_solve(&dense(&a), &dvec(&x), &cfg).unwrap().estimate;
        let b = error_upper_bound(&dense(&a), &est).unwrap();
        let err = (est.as_nalgebra() - &s).norm();
        assert!(err <= b.bound, "{err} > {}", b.bound);
    }
}

pub fn smoothed_count_rises_along_projected_steps() {
    let spec = ProblemSpec {
        n: 40,
        sources: SourceModel::with_mean_active(100, 10.0, 1.0, 0.0),
        noise_sigma: 0.0,
    };
    let family = PenaltyFamily::Gaussian;
    let trials = 40;
    let mut monotone = 0;
    for seed in 0..trials {
        let p = generate_problem(&spec, seed).unwrap();
        let factor = ProjectorFactor::new(&p.a).unwrap();
        let mut s = factor.min_norm(&p.x).unwrap();
        let mut ok = true;
        for sigma in [1.0, 0.5, 0.2, 0.1] {
            let mut last = eval_big_f(family, &s, sigma).unwrap();
            for _ in 0..5 {
                s = maximize_at_sigma(&factor, &s, &p.x, family, sigma, 1.0, 1).unwrap();
                let f = eval_big_f(family, &s, sigma).unwrap();
                ok &= f >= last - 1e-9;
                last = f;
            }
        }
        monotone += usize::from(ok);
    }
    assert!(monotone as f64 >= 0.95 * trials as f64, "{monotone}/{trials}");
}

pub fn exact_k_activity_and_binomial_concentration() {
    let model = SourceModel { m: 100, activity: Activity::ExactK(5), sigma_on: 1.0, sigma_off: 0.0 };
    for seed in 0..20 {
        let s = generate_sources(&model, seed).unwrap();
        assert_eq!(s.as_slice().iter().filter(|v| **v != 0.0).count(), 5);
    }
    let m = 10_000;
    let p = 0.1;
    let model = SourceModel::with_mean_active(m, p * m as f64, 1.0, 0.0);
    let sd = (m as f64 * p * (1.0 - p)).sqrt();
    for seed in 0..10 {
        let s = generate_sources(&model, seed).unwrap();
        let active = s.as_slice().iter().filter(|v| **v != 0.0).count() as f64;
        assert!((active - p * m as f64).abs() <= 3.0 * sd, "{active}");
    }
}

pub fn noise_energy_concentrates() {
    let n = 10_000;
    let sigma = 0.05;
    let a = dense(&DMatrix::from_element(n, 1, 1.0));
    let s = dvec(&DVector::zeros(1));
    let x = mix(&a, &s, sigma, 3).unwrap();
    // ||x||^2 / sigma^2 is chi-square with n degrees of freedom.
    let stat = x.as_nalgebra().norm_squared() / (sigma * sigma);
    let sd = (2.0 * n as f64).sqrt();
    assert!((stat - n as f64).abs() <= 3.0 * sd, "{stat}");
}

pub fn generated_mixing_matrices_have_urp() {
    for seed in 0..100 {
        let a = generate_mixing(&MixingSpec { n: 3, m: 6, noise_sigma: 0.0, seed }).unwrap();
        for j in 0..6 {
            assert!((a.column(j).norm() - 1.0).abs() < 1e-12);
        }
        assert!(check_urp(&a).unwrap());
        assert!(urp_by_determinants(a.as_nalgebra(), 1e-10));
    }
}

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() })
}

pub fn projection_lands_on_feasible_set() {
    let strategy = (any::<u64>(), 1usize..6, 1usize..8);
    runner()
        .run(&strategy, |(seed, n, extra)| {
            let m = n + extra;
            let mut r = rng(seed);
            let a = gaussian_matrix(&mut r, n, m);
            let x = gaussian_vector(&mut r, n);
            let s = gaussian_vector(&mut r, m);
            let p = ProjectorFactor::new(&dense(&a)).unwrap();
            let out = project_feasible(&p, &dvec(&s), &dvec(&x)).unwrap();
            let scale = 1.0 + s.norm() + x.norm();
            prop_assert!((&a * out.as_nalgebra() - &x).amax() <= 1e-9 * scale);
            let again = project_feasible(&p, &out, &dvec(&x)).unwrap();
            prop_assert!((again.as_nalgebra() - out.as_nalgebra()).amax() <= 1e-10 * scale);
            Ok(())
        })
        .unwrap();
}

pub fn enumeration_oracle_finds_one_sparse_sources() {
    runner()
        .run(&any::<u64>(), |seed| {
            let mut r = rng(seed);
            let a = unit_columns(gaussian_matrix(&mut r, 3, 6));
            prop_assume!(urp_by_determinants(&a, 1e-3));
            let mut s = DVector::zeros(6);
            let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
            s[r.random_range(0..6)] = sign * r.random_range(0.5..2.0);
            let x = &a * &s;
            let oracle = sparsest_by_enumeration(&a, &x, 1e-10);
            prop_assert!((&oracle - &s).amax() < 1e-9);
            Ok(())
        })
        .unwrap();
}
