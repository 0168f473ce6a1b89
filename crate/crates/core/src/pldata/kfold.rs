use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::rng::{rng_for, stream};
use crate::{Error, Result};

/// Assignment of every instance to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    /// `(train, test)` indices for fold `f`, each in ascending order.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &a) in self.assignments.iter().enumerate() {
            if a == f {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Seeded shuffle, then position `i` of the shuffled order goes to fold
/// `i mod k`, so fold sizes differ by at most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "k-fold needs k >= 2, got {k}"
        )));
    }
    if n < k {
        return Err(Error::InvalidConfig(format!(
            "cannot split {n} instances into {k} folds"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(seed, stream::FOLDS));
    let mut assignments = alloc::vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ten_into_ten() {
        let plan = kfold_split(10, 10, 3).unwrap();
        assert_eq!(plan.fold_sizes(), vec![1; 10]);
    }

    #[test]
    fn twelve_into_ten() {
        let mut sizes = kfold_split(12, 10, 3).unwrap().fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 1, 1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn deterministic_and_validated() {
        assert_eq!(
            kfold_split(50, 10, 9).unwrap(),
            kfold_split(50, 10, 9).unwrap()
        );
        assert_ne!(
            kfold_split(50, 10, 9).unwrap(),
            kfold_split(50, 10, 10).unwrap()
        );
        assert!(kfold_split(5, 10, 0).is_err());
        assert!(kfold_split(5, 1, 0).is_err());
    }

    #[test]
    fn split_partitions_indices() {
        let plan = kfold_split(23, 4, 1).unwrap();
        let mut seen = [0; 23];
        for f in 0..4 {
            let (train, test) = plan.split(f);
            assert_eq!(train.len() + test.len(), 23);
            for i in test {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }
}
