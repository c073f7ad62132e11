//! Moments and experiment summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Count, mean and sum of squared deviations, merged by count weight.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }

    pub fn from_values(values: &[f64]) -> Moments {
        let mut m = Moments::default();
        for &v in values {
            m.push(v);
        }
        m
    }

    /// Unbiased sample variance; zero for fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub source: String,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// Experiment-specific reference values and secondary measurements.
    pub extra: BTreeMap<String, serde_json::Value>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl ExperimentResult {
    pub fn from_values(experiment: &str, source: String, seed: u64, values: Vec<f64>) -> Self {
        let m = Moments::from_values(&values);
        ExperimentResult {
            experiment: experiment.into(),
            source,
            trials: m.count,
            seed,
            mean: m.mean,
            variance: m.variance(),
            std_error: m.std_error(),
            extra: BTreeMap::new(),
            values,
        }
    }

    pub fn with_extra(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.extra.insert(key.into(), value.into());
        self
    }

    /// `trial,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,value\n");
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{i},{v}").unwrap();
        }
        out
    }
}

/// The generator for one trial: the base seed picks the key and the trial
/// index picks the stream, so trials are independent of scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` independent trials in parallel and returns the values in
/// trial order.
pub fn run_trials<T, F>(trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(&mut trial_rng(seed, i)))
        .collect()
}
