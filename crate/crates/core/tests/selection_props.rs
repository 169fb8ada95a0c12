mod common;

use common::{brute_argmax, brute_ranking, expected_calls, random_dataset};
use fselect_core::selector::subset_criteria;
use fselect_core::synth::duplicate_feature;
use fselect_core::{
    cvtest, score_curve, select, Chunking, EngineConfig, Objective, ParallelEngine, SelectionState,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn engine(workers: usize, par_threshold: usize) -> ParallelEngine {
    ParallelEngine::new(EngineConfig {
        workers,
        par_threshold,
        chunking: Chunking::Block,
    })
    .unwrap()
}

fn objectives() -> [Objective; 3] {
    [Objective::mmaiq(), Objective::mmais(1.0), Objective::mmais(0.3)]
}

#[test]
fn greedy_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let m = rng.random_range(1..=6);
        let r = rng.random_range(4..=40);
        let data = random_dataset(&mut rng, r, m, 4, 3);
        for objective in objectives() {
            let report = select(&data, &objective, m, &ParallelEngine::sequential()).unwrap();
            let ranking = report.feature_indices();
            for p in 0..ranking.len() {
                assert_eq!(brute_argmax(&data, &objective, &ranking[..p]), Some(ranking[p]));
            }
            assert_eq!(ranking, brute_ranking(&data, &objective, m));
        }
    }
}

#[test]
fn accumulator_equals_direct_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let data = random_dataset(&mut rng, 60, 10, 5, 3);
        let e = ParallelEngine::sequential();
        let mut state = SelectionState::new(&data, &e);
        // The sums are brought up to date at the start of each step, so after
        // a step they cover every selected feature except the newest.
        while state.step(&data, &Objective::mmais(1.0), &e).is_some() {
            let scored_against = &state.selected()[..state.selected().len() - 1];
            for j in 0..data.n_features() {
                if state.selected().contains(&j) {
                    continue;
                }
                let mut direct = 0.0;
                for &i in scored_against {
                    direct += cvtest(data.column(j), data.column(i), data.card(j), data.card(i)).unwrap().v;
                }
                assert_eq!(state.red_sum()[j], direct);
            }
        }
    }
}

#[test]
fn call_count_matches_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for m in [1usize, 2, 5, 9, 17] {
        let data = fselect_core::synth::planted_informative(50, m, 3, 0.1, rng.random());
        // Make sure nothing is constant so no step is skipped.
        assert!((0..m).all(|j| !data.is_constant(j)));
        for k in 1..=m {
            let e = ParallelEngine::sequential();
            select(&data, &Objective::mmaiq(), k, &e).unwrap();
            assert_eq!(e.stats().cvtest_calls, expected_calls(m, k), "m={m} k={k}");
        }
    }
}

#[test]
fn duplicate_never_second_under_mmaiq() {
    for seed in 0..50 {
        let data = duplicate_feature(60, 4, 0.2, seed);
        let report = select(&data, &Objective::mmaiq(), 2, &ParallelEngine::sequential()).unwrap();
        let ranking = report.feature_indices();
        assert!(ranking[0] == 0 || ranking[0] == 1);
        assert_ne!(ranking[1], 1 - ranking[0], "seed {seed}: {ranking:?}");
    }
}

#[test]
fn duplicate_inflates_redundancy_criterion() {
    let data = duplicate_feature(60, 4, 0.2, 3);
    let (_, with_dup) = subset_criteria(&data, &[0, 1, 2]);
    let (_, without) = subset_criteria(&data, &[0, 2, 3]);
    assert!(with_dup > without, "{with_dup} vs {without}");
}

#[test]
fn score_curve_agrees_with_direct_criteria() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let data = random_dataset(&mut rng, 80, 8, 4, 3);
    let report = select(&data, &Objective::mmais(1.0), 8, &ParallelEngine::sequential()).unwrap();
    for point in score_curve(&report) {
        let (a, r) = subset_criteria(&data, &report.prefix(point.k));
        assert!((point.association - a).abs() < 1e-12);
        assert!((point.redundancy - r).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ranking_is_prefix_stable(seed in any::<u64>(), m in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, 30, m, 4, 2);
        let e = ParallelEngine::sequential();
        for k in 1..m {
            let short = select(&data, &Objective::mmais(1.0), k, &e).unwrap();
            let long = select(&data, &Objective::mmais(1.0), k + 1, &e).unwrap();
            prop_assert_eq!(&long.ranking[..short.ranking.len()], &short.ranking[..]);
        }
    }

    #[test]
    fn mmaiq_ignores_lambda(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, 40, 6, 4, 3);
        let e = ParallelEngine::sequential();
        let base = select(&data, &Objective::mmaiq(), 6, &e).unwrap().ranking;
        for lambda in [0.1, 10.0] {
            let objective = Objective { lambda, ..Objective::mmaiq() };
            prop_assert_eq!(&select(&data, &objective, 6, &e).unwrap().ranking, &base);
        }
    }

    #[test]
    fn worker_count_does_not_change_result(seed in any::<u64>(), workers in 2usize..6, threshold in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, 120, 24, 6, 3);
        let seq = select(&data, &Objective::mmaiq(), 24, &ParallelEngine::sequential()).unwrap();
        let par = select(&data, &Objective::mmaiq(), 24, &engine(workers, threshold)).unwrap();
        prop_assert_eq!(seq, par);
    }

    #[test]
    fn first_pick_has_max_relevance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, 40, 6, 4, 3);
        let e = ParallelEngine::sequential();
        let report = select(&data, &Objective::mmais(1.0), 3, &e).unwrap();
        let rel = fselect_core::relevance_vector(&data, &e);
        let max = rel.iter().copied().fold(0.0, f64::max);
        if let Some(first) = report.ranking.first() {
            prop_assert_eq!(first.relevance, max);
        }
    }
}
