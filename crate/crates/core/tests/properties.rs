use defectbench::evaluation::{stratified_kfold, Confusion, MetricsReport};
use defectbench::models::{
    bce_loss, train, AnnParams, BoostingParams, ForestParams, Hyperparameters, ModelKind, ModelSpec,
};
use defectbench::numerics::{eigh_symmetric, Matrix, RandomSource};
use defectbench::preprocess::{FittedPipeline, PipelineConfig};
use proptest::prelude::*;

fn labels_with_both(k: usize) -> impl Strategy<Value = Vec<u8>> {
    (k..40usize, k..40usize, any::<u64>()).prop_map(|(neg, pos, seed)| {
        let mut y: Vec<u8> = std::iter::repeat(0).take(neg).chain(std::iter::repeat(1).take(pos)).collect();
        RandomSource::new(seed).shuffle(&mut y);
        y
    })
}

fn small_problem() -> impl Strategy<Value = (Matrix, Vec<u8>)> {
    (6..30usize, 1..5usize, any::<u64>()).prop_map(|(n, p, seed)| {
        let mut rng = RandomSource::new(seed);
        let data: Vec<f64> = (0..n * p).map(|_| 10.0 * rng.normal()).collect();
        let mut y: Vec<u8> = (0..n).map(|_| u8::from(rng.uniform01() < 0.4)).collect();
        y[0] = 0;
        y[1] = 1;
        (Matrix::from_vec(n, p, data).unwrap(), y)
    })
}

fn fast_spec(kind: ModelKind, seed: u64) -> ModelSpec {
    let params = match Hyperparameters::default_for(kind) {
        Hyperparameters::RandomForest(p) => Hyperparameters::RandomForest(ForestParams { n_trees: 5, ..p }),
        Hyperparameters::GradientBoosting(p) => {
            Hyperparameters::GradientBoosting(BoostingParams { n_rounds: 10, min_samples_leaf: 1, ..p })
        }
        Hyperparameters::Ann(p) => Hyperparameters::Ann(AnnParams { max_epochs: 5, ..p }),
        other => other,
    };
    ModelSpec::new(params, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn folds_are_balanced_and_stratified(y in labels_with_both(5), k in 2..6usize, seed in any::<u64>()) {
        let a = stratified_kfold(&y, k, &mut RandomSource::new(seed)).unwrap();
        let sizes = a.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let pos = y.iter().filter(|&&l| l == 1).count() as f64;
        for f in 0..k {
            let p = a.test_indices(f).iter().filter(|&&i| y[i] == 1).count() as f64;
            prop_assert!((p - pos / k as f64).abs() <= 1.0);
        }
        let mut seen = vec![0; y.len()];
        for f in 0..k {
            for i in a.test_indices(f) {
                seen[i] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn report_identities(folds in prop::collection::vec((0..20usize, 0..20usize, 0..20usize, 0..20usize), 1..12)) {
        let confusions: Vec<Confusion> = folds
            .iter()
            .map(|&(tp, fp, tn, fn_)| Confusion { tp, fp, tn: tn + 1, fn_ })
            .collect();
        let r = MetricsReport::from_folds(&confusions).unwrap();
        let total: usize = confusions.iter().map(Confusion::total).sum();
        prop_assert_eq!(r.confusion.total(), total);
        prop_assert_eq!(r.accuracy, (r.confusion.tp + r.confusion.tn) as f64 / total as f64);
        let mean = r.per_fold_accuracy.iter().sum::<f64>() / r.per_fold_accuracy.len() as f64;
        prop_assert!((r.mean_accuracy - mean).abs() <= 1e-12);
        for v in [r.accuracy, r.precision, r.recall, r.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn bce_is_non_negative(pairs in prop::collection::vec((0u8..2, -0.5f64..1.5), 1..50)) {
        let (y, p): (Vec<u8>, Vec<f64>) = pairs.into_iter().unzip();
        let loss = bce_loss(&y, &p).unwrap();
        prop_assert!(loss >= 0.0 && loss.is_finite());
    }

    #[test]
    fn probabilities_stay_in_unit_interval((x, y) in small_problem(), kind_index in 0..6usize, seed in any::<u64>()) {
        let kind = ModelKind::ALL[kind_index];
        let m = train(&fast_spec(kind, seed), &x, &y).unwrap();
        let mut rng = RandomSource::new(seed ^ 1);
        let probe_data: Vec<f64> = (0..5 * x.cols()).map(|_| 1e3 * rng.normal()).collect();
        let probe = Matrix::from_vec(5, x.cols(), probe_data).unwrap();
        for p in m.predict_proba(&probe).unwrap().into_iter().chain(m.predict_proba(&x).unwrap()) {
            prop_assert!((0.0..=1.0).contains(&p), "{kind}: {p}");
        }
    }

    #[test]
    fn duplicated_row_keeps_parameters_finite((x, y) in small_problem(), kind_index in 0..6usize) {
        let kind = ModelKind::ALL[kind_index];
        let mut rows: Vec<Vec<f64>> = x.row_iter().map(<[f64]>::to_vec).collect();
        rows.push(rows[0].clone());
        let mut y2 = y.clone();
        y2.push(y[0]);
        let x2 = Matrix::from_rows(&rows).unwrap();
        prop_assert!(train(&fast_spec(kind, 3), &x2, &y2).is_ok());
    }

    #[test]
    fn pipeline_ignores_rows_it_was_not_fitted_on((x, _) in small_problem(), scale in 1.5f64..100.0) {
        let cfg = PipelineConfig { use_pca: true, ..PipelineConfig::default() };
        let train_rows: Vec<usize> = (0..x.rows() - 2).collect();
        let fitted = FittedPipeline::fit(&x.select_rows(&train_rows), &cfg);
        let mut other = x.clone();
        for v in other.row_mut(x.rows() - 1) {
            *v *= scale;
        }
        let refit = FittedPipeline::fit(&other.select_rows(&train_rows), &cfg);
        match (fitted, refit) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "fit outcome changed"),
        }
    }

    #[test]
    fn eigendecomposition_reconstructs(n in 1..8usize, seed in any::<u64>()) {
        let mut rng = RandomSource::new(seed);
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.normal();
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let e = eigh_symmetric(&a).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let mut rebuilt = Matrix::zeros(n, n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    rebuilt[(i, j)] += e.values[k] * e.vectors[(i, k)] * e.vectors[(j, k)];
                }
            }
        }
        prop_assert!(rebuilt.max_abs_diff(&a) <= 1e-9 * a.frobenius_norm().max(1.0));
    }
}
