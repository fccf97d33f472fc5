use proptest::prelude::*;

use randproj::algorithms::{round, run, AlgorithmState, RunOptions};
use randproj::harness::generate_instance;
use randproj::metrics::{approx_distance_to_intersection, DISTANCE_PROXY_MAX_SWEEPS, DISTANCE_PROXY_TOL};
use randproj::network::{build_ring_of_cliques, mix, ring_of_cliques_weights};
use randproj::sampler::derive_seed;
use randproj::{AlgorithmKind, ExperimentConfig, ProblemInstance, StepSizeSchedule, WeightMatrix};

fn setup(d: usize, m: usize, seed: u64) -> (ProblemInstance, WeightMatrix) {
    let cfg = ExperimentConfig::new(d, m, AlgorithmKind::Proximal, 1.0, 1, 1, seed);
    let inst = generate_instance(&cfg, derive_seed(seed, 0)).unwrap();
    let w = ring_of_cliques_weights(&build_ring_of_cliques(m).unwrap()).unwrap();
    (inst.problem, w)
}

fn kind() -> impl Strategy<Value = AlgorithmKind> {
    prop_oneof![Just(AlgorithmKind::Proximal), Just(AlgorithmKind::Subgradient)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_estimate_lies_in_its_drawn_component(seed in any::<u64>(), kind in kind(), base in 1e-3..2.0f64) {
        let (problem, w) = setup(4, 6, seed);
        let schedule = StepSizeSchedule::harmonic(base).unwrap();
        let mut state = AlgorithmState::random_start(6, 4, -2.0, 2.0, seed).unwrap();
        for _ in 0..25 {
            let snapshot = state.estimates().to_vec();
            round(kind, &mut state, &problem, &w, &schedule).unwrap();
            for i in 0..6 {
                let j = state.last_draw(i).unwrap();
                prop_assert!(problem.partition().members(i).contains(&j));
                prop_assert!(problem.components()[j].contains(&state.estimates()[i]));
                // the recorded average is the mix of the previous snapshot
                let v = mix(&w, &snapshot, i).unwrap();
                prop_assert_eq!(state.averaged(i).unwrap(), v.as_slice());
            }
        }
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), kind in kind()) {
        let (problem, w) = setup(3, 6, seed);
        let mut opts = RunOptions::new(kind, StepSizeSchedule::harmonic(0.5).unwrap(), 30, seed);
        opts.record_every = 7;
        let a = run(&problem, &w, &opts).unwrap();
        let b = run(&problem, &w, &opts).unwrap();
        prop_assert_eq!(&a.records, &b.records);
        prop_assert_eq!(a.final_state.estimates(), b.final_state.estimates());
    }
}

#[test]
fn thinning_does_not_change_the_trajectory() {
    let (problem, w) = setup(5, 9, 11);
    let mut dense = RunOptions::new(AlgorithmKind::Subgradient, StepSizeSchedule::harmonic(0.3).unwrap(), 40, 11);
    let mut sparse = dense;
    dense.record_every = 1;
    sparse.record_every = 8;
    let a = run(&problem, &w, &dense).unwrap();
    let b = run(&problem, &w, &sparse).unwrap();
    assert_eq!(a.final_state.estimates(), b.final_state.estimates());
    for rec in &b.records {
        assert_eq!(rec, &a.records[rec.k as usize]);
    }
    assert_eq!(b.records.iter().map(|r| r.k).collect::<Vec<_>>(), vec![0, 8, 16, 24, 32, 40]);
}

#[test]
fn parallel_rounds_match_serial_rounds() {
    // 48 * 100 coordinates per round takes the parallel path
    let (problem, w) = setup(100, 48, 5);
    let opts = RunOptions::new(AlgorithmKind::Proximal, StepSizeSchedule::harmonic(1e-3).unwrap(), 5, 5);
    let go = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(&problem, &w, &opts).unwrap())
    };
    let a = go(1);
    let b = go(4);
    assert_eq!(a.records, b.records);
    assert_eq!(a.final_state.estimates(), b.final_state.estimates());
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    0.5 * (v[(n - 1) / 2] + v[n / 2])
}

#[test]
fn squared_distance_proxy_trends_down() {
    let checkpoints = [10u64, 100, 1000];
    for kind in [AlgorithmKind::Proximal, AlgorithmKind::Subgradient] {
        let mut per_checkpoint = vec![Vec::new(); checkpoints.len()];
        for seed in 1..=20u64 {
            let (problem, w) = setup(10, 12, seed);
            let schedule = StepSizeSchedule::harmonic(0.1).unwrap();
            let mut state = AlgorithmState::random_start(12, 10, -2.0, 2.0, derive_seed(seed, 1)).unwrap();
            for (c, &k) in checkpoints.iter().enumerate() {
                while state.iteration() < k {
                    round(kind, &mut state, &problem, &w, &schedule).unwrap();
                }
                let s: f64 = state
                    .estimates()
                    .iter()
                    .map(|x| {
                        approx_distance_to_intersection(&problem, x, DISTANCE_PROXY_TOL, DISTANCE_PROXY_MAX_SWEEPS)
                            .unwrap()
                            .value
                            .powi(2)
                    })
                    .sum();
                per_checkpoint[c].push(s);
            }
        }
        let m: Vec<f64> = per_checkpoint.into_iter().map(median).collect();
        assert!(m[2] < m[1] && m[1] < m[0], "{kind}: {m:?}");
    }
}
