use advtrain::data::{generate, ill_conditioned_classification, Family, SynthSpec, ILL_CONDITIONED_DELTA};
use advtrain::{fit, DMatrix, DVector, Dataset, NormKind, SolveOptions, Solver, Task};

fn dual(beta: &DVector<f64>, norm: NormKind) -> f64 {
    match norm {
        NormKind::Linf => beta.iter().map(|b| b.abs()).sum(),
        NormKind::L2 => beta.norm(),
    }
}

/// Total worst-case squared error, written out per sample.
fn regression_objective(d: &Dataset, beta: &DVector<f64>, delta: f64, norm: NormKind) -> f64 {
    let shift = delta * dual(beta, norm);
    (0..d.n())
        .map(|i| {
            let f: f64 = d.row(i).iter().zip(beta.iter()).map(|(a, b)| a * b).sum();
            ((d.y()[i] - f).abs() + shift).powi(2)
        })
        .sum()
}

/// Mean worst-case logistic loss.
fn classification_objective(d: &Dataset, beta: &DVector<f64>, delta: f64, norm: NormKind) -> f64 {
    let shift = delta * dual(beta, norm);
    let total: f64 = (0..d.n())
        .map(|i| {
            let m: f64 = d.y()[i] * d.row(i).iter().zip(beta.iter()).map(|(a, b)| a * b).sum::<f64>() - shift;
            (1.0 + (-m).exp()).ln()
        })
        .sum();
    total / d.n() as f64
}

fn regression_data(n: usize, p: usize, seed: u64) -> Dataset {
    generate(&SynthSpec { noise_sd: 0.4, seed, ..SynthSpec::new(Family::Isotropic, n, p) }).unwrap().0
}

#[test]
fn zero_radius_is_least_squares() {
    let d = regression_data(70, 6, 1);
    let ols = (d.x().transpose() * d.x()).cholesky().unwrap().solve(&(d.x().transpose() * d.y()));
    let opts = SolveOptions { max_iter: 500, tol: 1e-14, ..Default::default() };
    for solver in [Solver::Irrr, Solver::Icg] {
        let r = fit(&d, NormKind::Linf, 0.0, solver, &opts).unwrap();
        assert!((&r.beta - &ols).amax() < 1e-6, "{solver}");
    }
}

#[test]
fn regression_solvers_agree_with_recomputed_objective() {
    for (n, p) in [(60, 10), (100, 30)] {
        let d = regression_data(n, p, 5);
        for norm in [NormKind::Linf, NormKind::L2] {
            let opts = SolveOptions { max_iter: 3000, tol: 1e-12, ..Default::default() };
            let irrr = fit(&d, norm, 0.05, Solver::Irrr, &opts).unwrap();
            let icg = fit(&d, norm, 0.05, Solver::Icg, &opts).unwrap();
            let oracle = regression_objective(&d, &irrr.beta, 0.05, norm);
            assert!((irrr.objective - oracle).abs() <= 1e-10 * oracle, "{n}x{p} {norm}");
            let gap = (icg.objective - irrr.objective).abs() / irrr.objective;
            assert!(gap <= 1e-6, "{n}x{p} {norm}: icg {} irrr {}", icg.objective, irrr.objective);
        }
    }
}

#[test]
fn wide_problems_use_the_dual_form_and_stay_optimal() {
    // p > n: the exact solver switches to the n × n system; a 1e-4 step on
    // any coordinate must not improve the objective noticeably.
    let d = regression_data(20, 40, 5);
    let opts = SolveOptions { max_iter: 20_000, tol: 1e-14, ..Default::default() };
    for norm in [NormKind::Linf, NormKind::L2] {
        let r = fit(&d, norm, 0.05, Solver::Irrr, &opts).unwrap();
        assert_eq!(r.config["dual_form"], 1.0);
        let base = regression_objective(&d, &r.beta, 0.05, norm);
        for j in 0..d.p() {
            for step in [1e-4, -1e-4] {
                let mut moved = r.beta.clone();
                moved[j] += step;
                assert!(regression_objective(&d, &moved, 0.05, norm) >= base - 1e-9, "{norm} coordinate {j}");
            }
        }
    }
}

#[test]
fn classification_solvers_reach_a_common_minimum() {
    let d = ill_conditioned_classification(0).unwrap();
    let opts = SolveOptions { max_iter: 20_000, tol: 1e-12, ..Default::default() };
    let reference = fit(&d, NormKind::Linf, ILL_CONDITIONED_DELTA, Solver::Agd, &opts).unwrap();
    let oracle = classification_objective(&d, &reference.beta, ILL_CONDITIONED_DELTA, NormKind::Linf);
    assert!((reference.objective - oracle).abs() <= 1e-10);
    for solver in [Solver::Gd, Solver::GdLs, Solver::Saga] {
        let r = fit(&d, NormKind::Linf, ILL_CONDITIONED_DELTA, solver, &opts).unwrap();
        assert!((r.objective - reference.objective).abs() <= 1e-6, "{solver}: {} vs {}", r.objective, reference.objective);
    }
}

#[test]
fn fgsm_never_beats_the_exact_minimum() {
    let d = generate(&SynthSpec { task: Task::BinaryClassification, seed: 4, ..SynthSpec::new(Family::Isotropic, 100, 5) }).unwrap().0;
    let opts = SolveOptions { max_iter: 2000, tol: 1e-12, ..Default::default() };
    let best = fit(&d, NormKind::Linf, 0.1, Solver::Agd, &opts).unwrap().objective;
    let fgsm = fit(&d, NormKind::Linf, 0.1, Solver::FgsmGd, &opts).unwrap();
    assert!(classification_objective(&d, &fgsm.beta, 0.1, NormKind::Linf) >= best - 1e-9);
}

#[test]
fn solver_task_mismatch_is_rejected() {
    let reg = regression_data(10, 2, 0);
    let opts = SolveOptions::default();
    assert!(fit(&reg, NormKind::Linf, 0.1, Solver::Saga, &opts).is_err());
    let clf = Dataset::new(DMatrix::identity(2, 2), DVector::from_vec(vec![1.0, -1.0]), Task::BinaryClassification).unwrap();
    assert!(fit(&clf, NormKind::Linf, 0.1, Solver::Irrr, &opts).is_err());
}
