mod common;

use decay::classifier::{
    self, logistic_loss_and_gradient, ClassifierConfig, ClassifierKind, ForestConfig, LogRegConfig, ModelParameters,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<bool>, Vec<f64>, f64) {
    let n = rng.gen_range(4..40);
    let d = rng.gen_range(1..7);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
    let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
    let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
    (x, y, w, rng.gen_range(-1.0..1.0))
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-10 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

#[test]
fn logistic_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-5;
    for _ in 0..50 {
        let (x, y, w, b) = random_problem(&mut rng);
        let l2 = [0.0, 1e-3, 0.5][rng.gen_range(0..3)];
        let (_, gw, gb) = logistic_loss_and_gradient(&x, &y, &w, b, l2);
        for j in 0..w.len() {
            let mut up = w.clone();
            up[j] += h;
            let mut down = w.clone();
            down[j] -= h;
            let numeric = (logistic_loss_and_gradient(&x, &y, &up, b, l2).0
                - logistic_loss_and_gradient(&x, &y, &down, b, l2).0)
                / (2.0 * h);
            assert!(rel_err(gw[j], numeric) < 1e-4, "w[{j}]: {} vs {numeric}", gw[j]);
        }
        let numeric = (logistic_loss_and_gradient(&x, &y, &w, b + h, l2).0
            - logistic_loss_and_gradient(&x, &y, &w, b - h, l2).0)
            / (2.0 * h);
        assert!(rel_err(gb, numeric) < 1e-4, "bias: {gb} vs {numeric}");
    }
}

#[test]
fn logistic_loss_does_not_increase_over_epochs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (x, y, _, _) = random_problem(&mut rng);
    let mut prev = f64::INFINITY;
    for epochs in [1, 2, 5, 10, 50, 200] {
        let m = common::matrix(&x, &y);
        if y.iter().all(|&l| l) || y.iter().all(|&l| !l) {
            return;
        }
        let cfg = LogRegConfig { epochs, tolerance: 0.0, ..Default::default() };
        let model = classifier::train_logreg(&m, &cfg).unwrap();
        let ModelParameters::Linear { weights, bias } = &model.parameters else { unreachable!() };
        let z = model.standardization.transform_values(&m.values());
        let (loss, _, _) = logistic_loss_and_gradient(&z, &y, weights, *bias, cfg.l2);
        assert!(loss <= prev + 1e-12, "epochs {epochs}: {loss} > {prev}");
        prev = loss;
    }
}

fn labeled_problem() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<bool>)> {
    (6usize..40, 1usize..5).prop_flat_map(|(n, d)| {
        (
            proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, d), n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_filter("both classes", |(_, y)| y.iter().any(|&l| l) && y.iter().any(|&l| !l))
    })
}

fn quick() -> ClassifierConfig {
    let mut cfg = ClassifierConfig::default();
    cfg.logreg.epochs = 300;
    cfg.svm.epochs = 100;
    cfg.forest.n_trees = 15;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trainers_are_reproducible((x, y) in labeled_problem(), seed in any::<u64>()) {
        let m = common::matrix(&x, &y);
        let cfg = quick().with_seed(seed);
        for kind in [ClassifierKind::Logreg, ClassifierKind::LinearSvm, ClassifierKind::RandomForest] {
            let a = classifier::train(kind, &m, &cfg).unwrap();
            let b = classifier::train(kind, &m, &cfg).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn prediction_ignores_test_row_order((x, y) in labeled_problem(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let m = common::matrix(&x, &y);
        let mut idx: Vec<usize> = (0..m.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = m.subset(&idx);
        for kind in [ClassifierKind::Logreg, ClassifierKind::LinearSvm, ClassifierKind::RandomForest] {
            let model = classifier::train(kind, &m, &quick()).unwrap();
            let base = model.predict(&m).unwrap();
            let moved = model.predict(&shuffled).unwrap();
            for (k, &i) in idx.iter().enumerate() {
                prop_assert_eq!(moved[k], base[i]);
            }
        }
    }

    #[test]
    fn importance_is_a_distribution((x, y) in labeled_problem(), seed in any::<u64>()) {
        let m = common::matrix(&x, &y);
        let model = classifier::train_random_forest(&m, &ForestConfig { n_trees: 10, seed, ..Default::default() }).unwrap();
        let ranking = classifier::feature_importance(&model).unwrap();
        let total: f64 = ranking.entries.iter().map(|e| e.1).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(ranking.entries.iter().all(|e| e.1 >= 0.0));
        prop_assert!(ranking.entries.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn probabilities_are_in_unit_interval((x, y) in labeled_problem()) {
        let m = common::matrix(&x, &y);
        for kind in [ClassifierKind::Logreg, ClassifierKind::LinearSvm, ClassifierKind::RandomForest] {
            let model = classifier::train(kind, &m, &quick()).unwrap();
            prop_assert!(model.predict(&m).unwrap().iter().all(|(p, _)| (0.0..=1.0).contains(p)));
        }
    }
}

#[test]
fn logistic_regression_is_row_order_invariant() {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (x, y) = common::planted(&mut rng, 60, 3);
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.shuffle(&mut rng);
    let a = classifier::train_logreg(&common::matrix(&x, &y), &LogRegConfig::default()).unwrap();
    let xs: Vec<Vec<f64>> = idx.iter().map(|&i| x[i].clone()).collect();
    let ys: Vec<bool> = idx.iter().map(|&i| y[i]).collect();
    let b = classifier::train_logreg(&common::matrix(&xs, &ys), &LogRegConfig::default()).unwrap();
    let probe = common::matrix(&x, &y);
    for (pa, pb) in a.predict(&probe).unwrap().iter().zip(b.predict(&probe).unwrap()) {
        assert!((pa.0 - pb.0).abs() < 1e-9);
        assert_eq!(pa.1, pb.1);
    }
}

#[test]
fn duplicated_rows_grow_the_same_forest_without_bootstrap() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (x, y) = common::planted(&mut rng, 45, 3);
    // flip a few labels so trees need more than one split
    let y: Vec<bool> = y.iter().enumerate().map(|(i, &l)| if i % 7 == 1 { !l } else { l }).collect();
    let doubled_x: Vec<Vec<f64>> = x.iter().chain(&x).cloned().collect();
    let doubled_y: Vec<bool> = y.iter().chain(&y).copied().collect();
    let cfg = ForestConfig { n_trees: 20, bootstrap: false, seed: 4, ..Default::default() };
    let a = classifier::train_random_forest(&common::matrix(&x, &y), &cfg).unwrap();
    let b = classifier::train_random_forest(&common::matrix(&doubled_x, &doubled_y), &cfg).unwrap();
    let (ModelParameters::Forest(fa), ModelParameters::Forest(fb)) = (&a.parameters, &b.parameters) else {
        unreachable!()
    };
    for (ta, tb) in fa.trees.iter().zip(&fb.trees) {
        assert_eq!(ta.nodes.len(), tb.nodes.len());
        for (na, nb) in ta.nodes.iter().zip(&tb.nodes) {
            assert_eq!((na.feature, na.left, na.right), (nb.feature, nb.left, nb.right));
            assert_eq!(na.leaf_class_counts.map(|c| c * 2), nb.leaf_class_counts);
        }
    }
    let probe = common::matrix(&x, &y);
    assert_eq!(a.predict(&probe).unwrap(), b.predict(&probe).unwrap());
}

#[test]
fn decision_threshold_extremes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (x, y) = common::planted(&mut rng, 30, 1);
    let m = common::matrix(&x, &y);
    for (t, expect) in [(0.0, true), (1.5, false)] {
        let cfg = ClassifierConfig { decision_threshold: Some(t), ..quick() };
        for kind in [ClassifierKind::Logreg, ClassifierKind::LinearSvm, ClassifierKind::RandomForest] {
            let model = classifier::train(kind, &m, &cfg).unwrap();
            assert!(model.predict_labels(&m).unwrap().iter().all(|&l| l == expect));
        }
    }
}

#[test]
fn separable_training_rows_are_all_correct() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (x, y) = common::planted(&mut rng, 60, 2);
    let m = common::matrix(&x, &y);
    for kind in [ClassifierKind::Logreg, ClassifierKind::LinearSvm, ClassifierKind::RandomForest] {
        let model = classifier::train(kind, &m, &ClassifierConfig::default()).unwrap();
        assert_eq!(model.predict_labels(&m).unwrap(), y, "{kind}");
    }
}

#[test]
fn column_mismatch_names_the_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (x, y) = common::planted(&mut rng, 20, 2);
    let model = classifier::train_logreg(&common::matrix(&x, &y), &LogRegConfig::default()).unwrap();
    let narrow: Vec<Vec<f64>> = x.iter().map(|r| r[..2].to_vec()).collect();
    let err = model.predict(&common::matrix(&narrow, &y)).unwrap_err().to_string();
    assert!(err.contains("f02"), "{err}");
}

#[test]
fn single_class_is_rejected() {
    let x = vec![vec![1.0], vec![2.0]];
    let m = common::matrix(&x, &[true, true]);
    for kind in [ClassifierKind::Logreg, ClassifierKind::LinearSvm, ClassifierKind::RandomForest] {
        assert!(matches!(classifier::train(kind, &m, &quick()), Err(decay::Error::SingleClass)));
    }
}
