use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, Dataset};
use crate::taxonomy::BasicEmotion;

const NEUTRAL: usize = 6;
const STRATA: usize = 7;
const TRAIN: usize = 0;
const TEST: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    pub train: Dataset,
    pub test: Dataset,
    pub ratio: f64,
    pub seed: u64,
}

fn strata_of(labels: &std::collections::BTreeSet<BasicEmotion>) -> Vec<usize> {
    if labels.is_empty() {
        vec![NEUTRAL]
    } else {
        labels.iter().map(|e| e.index()).collect()
    }
}

/// Splits `ds` into train and test with greedy iterative stratification.
///
/// Each of the six emotions plus a neutral stratum is handled rarest-first:
/// every unassigned instance carrying the current stratum goes to whichever
/// side still wants more of it (ties go to the side wanting more instances
/// overall, then to a seeded coin). A final pass moves instances across so
/// the test side has exactly `round(ratio * n)` members, picking the moves
/// that disturb per-stratum proportions least.
pub fn stratified_split(ds: &Dataset, ratio: f64, seed: u64) -> Result<SplitResult, CorpusError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(CorpusError::InvalidRatio(ratio));
    }
    if ds.is_empty() {
        return Err(CorpusError::EmptyDataset);
    }

    let n = ds.len();
    let strata: Vec<Vec<usize>> = ds.iter().map(|u| strata_of(&u.labels)).collect();
    let mut totals = [0usize; STRATA];
    for s in strata.iter().flatten() {
        totals[*s] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let target_test = (ratio * n as f64).round() as usize;
    let mut wanted = [[0f64; STRATA]; 2];
    for s in 0..STRATA {
        wanted[TEST][s] = ratio * totals[s] as f64;
        wanted[TRAIN][s] = (1.0 - ratio) * totals[s] as f64;
    }
    let mut wanted_total = [(n - target_test) as f64, target_test as f64];

    let mut side: Vec<Option<usize>> = vec![None; n];
    let mut remaining = totals;
    while let Some(stratum) = (0..STRATA).filter(|&s| remaining[s] > 0).min_by_key(|&s| remaining[s]) {
        for &i in &order {
            if side[i].is_some() || !strata[i].contains(&stratum) {
                continue;
            }
            let pick = if wanted[TEST][stratum] != wanted[TRAIN][stratum] {
                if wanted[TEST][stratum] > wanted[TRAIN][stratum] { TEST } else { TRAIN }
            } else if wanted_total[TEST] != wanted_total[TRAIN] {
                if wanted_total[TEST] > wanted_total[TRAIN] { TEST } else { TRAIN }
            } else if rng.random_bool(0.5) {
                TEST
            } else {
                TRAIN
            };
            side[i] = Some(pick);
            wanted_total[pick] -= 1.0;
            for &s in &strata[i] {
                wanted[pick][s] -= 1.0;
                remaining[s] -= 1;
            }
        }
    }

    let mut side: Vec<usize> = side.into_iter().map(|s| s.expect("every instance has a stratum")).collect();
    let mut in_test = [0f64; STRATA];
    for i in 0..n {
        if side[i] == TEST {
            for &s in &strata[i] {
                in_test[s] += 1.0;
            }
        }
    }
    balance_total(&mut side, &strata, &order, &mut in_test, &totals, ratio, target_test);

    let mut train = Vec::with_capacity(n - target_test);
    let mut test = Vec::with_capacity(target_test);
    for (u, s) in ds.iter().zip(&side) {
        if *s == TEST {
            test.push(u.clone());
        } else {
            train.push(u.clone());
        }
    }
    Ok(SplitResult {
        train: Dataset::new(train, format!("{}#train", ds.provenance))?,
        test: Dataset::new(test, format!("{}#test", ds.provenance))?,
        ratio,
        seed,
    })
}

fn balance_total(
    side: &mut [usize],
    strata: &[Vec<usize>],
    order: &[usize],
    in_test: &mut [f64; STRATA],
    totals: &[usize; STRATA],
    ratio: f64,
    target_test: usize,
) {
    let deviation = |in_test: &[f64; STRATA], s: usize| in_test[s] - ratio * totals[s] as f64;
    loop {
        let test_size = side.iter().filter(|&&s| s == TEST).count();
        if test_size == target_test {
            return;
        }
        let (from, delta) = if test_size > target_test { (TEST, -1.0) } else { (TRAIN, 1.0) };
        // Score a move by the worst resulting deviation among the strata it
        // touches, then by how much it reduces total absolute deviation.
        let best = order
            .iter()
            .copied()
            .filter(|&i| side[i] == from)
            .map(|i| {
                let mut worst = 0f64;
                let mut gain = 0f64;
                for &s in &strata[i] {
                    let before = deviation(in_test, s);
                    let after = before + delta;
                    worst = worst.max(after.abs());
                    gain += after.abs() - before.abs();
                }
                (i, worst, gain)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.total_cmp(&b.2)));
        let Some((i, _, _)) = best else { return };
        side[i] = if from == TEST { TRAIN } else { TEST };
        for &s in &strata[i] {
            in_test[s] += delta;
        }
    }
}
