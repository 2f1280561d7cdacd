use serde::{Deserialize, Serialize};

use crate::numerics::RandomSource;

use super::EvaluationError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffles each class and deals it round-robin across the folds. The
/// second class continues from the fold where the first stopped, so total
/// fold sizes also differ by at most one.
pub fn stratified_kfold(labels: &[u8], k: usize, rng: &mut RandomSource) -> Result<FoldAssignment, EvaluationError> {
    if k < 2 {
        return Err(EvaluationError::InvalidK(k));
    }
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(EvaluationError::ClassTooSmall {
                dataset: String::new(),
                class,
                count: members.len(),
                k,
            });
        }
        rng.shuffle(&mut members);
        for i in members {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment {
        k,
        fold_of,
        seed: rng.seed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_ten_into_five() {
        let y = [0, 1, 0, 1, 0, 1, 0, 1, 0, 1];
        let a = stratified_kfold(&y, 5, &mut RandomSource::new(3)).unwrap();
        for f in 0..5 {
            let test = a.test_indices(f);
            assert_eq!(test.len(), 2);
            assert_eq!(test.iter().filter(|&&i| y[i] == 1).count(), 1);
        }
    }

    #[test]
    fn cm1_counts() {
        let y: Vec<u8> = (0..498).map(|i| u8::from(i < 49)).collect();
        let a = stratified_kfold(&y, 10, &mut RandomSource::new(42)).unwrap();
        for f in 0..10 {
            let test = a.test_indices(f);
            assert!([49, 50].contains(&test.len()));
            let pos = test.iter().filter(|&&i| y[i] == 1).count();
            assert!([4, 5].contains(&pos));
        }
    }

    #[test]
    fn same_seed_same_folds() {
        let y: Vec<u8> = (0..60).map(|i| u8::from(i % 3 == 0)).collect();
        let a = stratified_kfold(&y, 10, &mut RandomSource::new(9)).unwrap();
        let b = stratified_kfold(&y, 10, &mut RandomSource::new(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, 9);
    }

    #[test]
    fn small_class_rejected() {
        let y = [0, 0, 0, 1, 1, 0];
        assert!(matches!(
            stratified_kfold(&y, 3, &mut RandomSource::new(0)),
            Err(EvaluationError::ClassTooSmall { class: 1, count: 2, k: 3, .. })
        ));
        assert!(matches!(
            stratified_kfold(&y, 1, &mut RandomSource::new(0)),
            Err(EvaluationError::InvalidK(1))
        ));
    }

    #[test]
    fn train_and_test_partition() {
        let y: Vec<u8> = (0..37).map(|i| u8::from(i % 4 == 0)).collect();
        let a = stratified_kfold(&y, 4, &mut RandomSource::new(1)).unwrap();
        for f in 0..4 {
            let mut all = a.train_indices(f);
            all.extend(a.test_indices(f));
            all.sort_unstable();
            assert_eq!(all, (0..37).collect::<Vec<_>>());
        }
    }
}
