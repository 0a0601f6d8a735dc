#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucp_core::corpus::StageLabel;
use ucp_core::mlp::FeatureVector;
use ucp_core::report::{read_estimates_csv, EvalRecord};

pub const KARNER_LEVEL_WEIGHTS: [f64; 10] = [5.0, 5.0, 5.0, 10.0, 10.0, 10.0, 10.0, 15.0, 15.0, 15.0];
pub const KARNER_ACTOR_WEIGHTS: [f64; 3] = [1.0, 2.0, 3.0];

pub const TABLE4_CSV: &str = include_str!("../fixtures/table4_estimates.csv");

/// Closed-form Karner UUCP of a histogram.
pub fn karner_map(f: &FeatureVector) -> f64 {
    let uc: f64 = f
        .use_cases
        .iter()
        .zip(KARNER_LEVEL_WEIGHTS)
        .map(|(n, w)| *n as f64 * w)
        .sum();
    let ac: f64 = f
        .actors
        .iter()
        .zip(KARNER_ACTOR_WEIGHTS)
        .map(|(n, w)| *n as f64 * w)
        .sum();
    uc + ac
}

/// Random valid histograms labelled with their exact Karner size.
pub fn karner_synthetic(n: usize, seed: u64) -> Vec<(FeatureVector, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut f = FeatureVector::default();
            for u in &mut f.use_cases {
                *u = rng.random_range(0..=4);
            }
            for a in &mut f.actors {
                *a = rng.random_range(0..=3);
            }
            if f.use_cases.iter().sum::<u32>() == 0 {
                f.use_cases[rng.random_range(0..10)] = 1;
            }
            if f.actors.iter().sum::<u32>() == 0 {
                f.actors[rng.random_range(0..3)] = 1;
            }
            let t = karner_map(&f);
            (f, t)
        })
        .collect()
}

pub fn table4() -> Vec<EvalRecord> {
    read_estimates_csv(TABLE4_CSV).expect("fixture parses").1
}

pub fn table4_stage(stage: StageLabel) -> Vec<EvalRecord> {
    table4().into_iter().filter(|r| r.stage == Some(stage)).collect()
}
