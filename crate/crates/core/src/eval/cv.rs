use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

use super::experiment::FittedModel;
use super::{metrics, Confusion, Scores};

/// Splits row indices into `k` folds with class proportions preserved.
/// Each class is shuffled with `seed` and dealt round-robin, continuing
/// the deal across classes so fold sizes differ by at most one.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid("k-fold cross-validation needs k >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if idx.len() < k {
            return Err(Error::invalid(format!(
                "class `{class}` has {} rows, fewer than k = {k}",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for i in idx {
            folds[slot % k].push(i);
            slot += 1;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: Vec<(Confusion, Scores)>,
    /// Unweighted mean of the per-fold scores.
    pub mean: Scores,
}

/// Trains on `k - 1` folds and evaluates on the held-out fold, `k` times.
pub fn kfold_cv<F>(m: &FeatureMatrix, k: usize, seed: u64, trainer: F) -> Result<CvReport>
where
    F: Fn(&FeatureMatrix) -> Result<FittedModel>,
{
    let folds = stratified_folds(&m.labels(), k, seed)?;
    let mut out = Vec::with_capacity(k);
    for (i, test_idx) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .flat_map(|(_, f)| f.iter().copied())
            .collect();
        let model = trainer(&m.subset(&train_idx))?;
        let test = m.subset(test_idx);
        let predicted = model.predict_labels(&test)?;
        let c = Confusion::from_predictions(&predicted, &test.labels());
        out.push((c, metrics(&c)?));
    }
    let n = out.len() as f64;
    let mean = Scores {
        precision: out.iter().map(|f| f.1.precision).sum::<f64>() / n,
        recall: out.iter().map(|f| f.1.recall).sum::<f64>() / n,
        accuracy: out.iter().map(|f| f.1.accuracy).sum::<f64>() / n,
        f1: out.iter().map(|f| f.1.f1).sum::<f64>() / n,
        degenerate: out.iter().any(|f| f.1.degenerate),
    };
    Ok(CvReport { folds: out, mean })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stratification_arithmetic() {
        let labels = [false, false, false, false, false, false, true, true, true];
        let folds = stratified_folds(&labels, 3, 42).unwrap();
        for f in &folds {
            assert_eq!(f.iter().filter(|&&i| labels[i]).count(), 1);
            assert_eq!(f.iter().filter(|&&i| !labels[i]).count(), 2);
        }
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn too_small_minority_or_k() {
        let labels = [false, false, false, true, true];
        assert!(stratified_folds(&labels, 3, 1).is_err());
        assert!(stratified_folds(&labels, 1, 1).is_err());
    }
}
