//! Linear-softmax tour construction policy trained with REINFORCE against a
//! linear critic, one Lagrange multiplier per preference.
//!
//! From the current city `i`, each unvisited city `j` is scored with
//! `theta . x(i, j, w)` and the next city is drawn from the softmax of the
//! scores. The feature vector `x` is laid out as in [`FEATURE_NAMES`].

mod checkpoint;
mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::PreferenceVector;
use crate::error::{invalid, Error, Result};
use crate::instance::{BtspInstance, CostMatrices, Matrix};
use crate::instances::node_features;
use crate::objective::ObjectiveVector;
use crate::tour::Tour;

pub use checkpoint::{Checkpoint, CHECKPOINT_SCHEMA_VERSION};
pub use train::{infer_front, train, IterationStats, TrainConfig, TrainOutcome};

pub const FEATURE_DIM: usize = 13;
pub const CRITIC_DIM: usize = 9;

pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "d1", "d2", "w1*d1", "w2*d2", "d1*w2", "d2*w1", "mean1(j)", "min1(j)", "max1(j)", "mean2(j)", "min2(j)",
    "max2(j)", "bias",
];

/// Which candidate features the policy sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FeatureSchema {
    #[default]
    #[serde(rename = "v1")]
    Full,
    /// Preference-interaction features held at zero.
    #[serde(rename = "v1-nopref")]
    NoPreference,
}

impl FeatureSchema {
    pub fn name(self) -> &'static str {
        match self {
            Self::Full => "v1",
            Self::NoPreference => "v1-nopref",
        }
    }
}

impl std::str::FromStr for FeatureSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1" => Ok(Self::Full),
            "v1-nopref" => Ok(Self::NoPreference),
            _ => Err(Error::Schema(format!("unknown feature schema {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub theta: Vec<f64>,
    pub schema: FeatureSchema,
}

impl PolicyParams {
    /// The uniform policy.
    pub fn zeros(schema: FeatureSchema) -> Self {
        Self { theta: vec![0.0; FEATURE_DIM], schema }
    }

    pub fn new(theta: Vec<f64>, schema: FeatureSchema) -> Result<Self> {
        check_params("theta", &theta, FEATURE_DIM)?;
        Ok(Self { theta, schema })
    }

    fn score(&self, x: &[f64; FEATURE_DIM]) -> f64 {
        self.theta.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticParams {
    pub phi: Vec<f64>,
}

impl CriticParams {
    pub fn zeros() -> Self {
        Self { phi: vec![0.0; CRITIC_DIM] }
    }

    pub fn new(phi: Vec<f64>) -> Result<Self> {
        check_params("phi", &phi, CRITIC_DIM)?;
        Ok(Self { phi })
    }

    pub fn predict(&self, z: &[f64]) -> f64 {
        self.phi.iter().zip(z).map(|(a, b)| a * b).sum()
    }
}

fn check_params(name: &str, v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return invalid(format!("{name} has {} entries, expected {dim}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(format!("{name} has non-finite entries")));
    }
    Ok(())
}

/// An instance prepared for the policy: raw costs, min-max normalized
/// distances, per-city statistics and the critic's instance summary.
#[derive(Debug, Clone)]
pub struct PolicyInstance {
    costs: CostMatrices,
    norm: [Matrix; 2],
    node: Vec<[f64; 6]>,
    summary: [f64; 7],
}

impl PolicyInstance {
    pub fn new(inst: &BtspInstance) -> Result<Self> {
        let costs = inst.costs();
        let n = costs.n();
        let norm = [normalize(&costs.d1), normalize(&costs.d2)];
        let f1 = node_features(&norm[0])?;
        let f2 = node_features(&norm[1])?;
        let scale = 1.0 / (n - 1) as f64;
        let node = (0..n)
            .map(|j| {
                let (a, b) = (f1.get(j), f2.get(j));
                [a.sum * scale, a.min, a.max, b.sum * scale, b.min, b.max]
            })
            .collect();
        let (m1, lo1, hi1) = entry_stats(&costs.d1);
        let (m2, lo2, hi2) = entry_stats(&costs.d2);
        let summary = [m1, lo1, hi1, m2, lo2, hi2, n as f64];
        Ok(Self { costs, norm, node, summary })
    }

    pub fn n(&self) -> usize {
        self.costs.n()
    }

    pub fn costs(&self) -> &CostMatrices {
        &self.costs
    }

    pub fn features(&self, schema: FeatureSchema, w: &PreferenceVector, i: usize, j: usize) -> [f64; FEATURE_DIM] {
        let d1 = self.norm[0].get(i, j);
        let d2 = self.norm[1].get(i, j);
        let (w1, w2) = match schema {
            FeatureSchema::Full => (w.w1(), w.w2()),
            FeatureSchema::NoPreference => (0.0, 0.0),
        };
        let s = &self.node[j];
        [d1, d2, w1 * d1, w2 * d2, d1 * w2, d2 * w1, s[0], s[1], s[2], s[3], s[4], s[5], 1.0]
    }

    /// `[w1, w2, mean1, min1, max1, mean2, min2, max2, n]` over raw edge weights.
    pub fn critic_features(&self, w: &PreferenceVector) -> Vec<f64> {
        let mut z = Vec::with_capacity(CRITIC_DIM);
        z.push(w.w1());
        z.push(w.w2());
        z.extend_from_slice(&self.summary);
        z
    }
}

fn normalize(m: &Matrix) -> Matrix {
    let (_, lo, hi) = entry_stats(m);
    let span = hi - lo;
    Matrix::from_fn(m.n(), |i, j| if i == j || span <= 0.0 { 0.0 } else { (m.get(i, j) - lo) / span })
}

fn entry_stats(m: &Matrix) -> (f64, f64, f64) {
    let (mut sum, mut lo, mut hi, mut count) = (0.0, f64::INFINITY, f64::NEG_INFINITY, 0usize);
    for v in m.upper_entries() {
        sum += v;
        lo = lo.min(v);
        hi = hi.max(v);
        count += 1;
    }
    if count == 0 {
        return (0.0, 0.0, 0.0);
    }
    (sum / count as f64, lo, hi)
}

/// A constructed tour with its log-probability and the gradient of that
/// log-probability with respect to `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub tour: Tour,
    pub objectives: ObjectiveVector,
    pub log_prob: f64,
    /// Log-probability of each decision, city 1 onwards.
    pub step_log_probs: Vec<f64>,
    pub grad_log_prob: Vec<f64>,
}

fn decode(
    policy: &PolicyParams,
    inst: &PolicyInstance,
    w: &PreferenceVector,
    mut choose: impl FnMut(usize, &[usize], &[f64]) -> Result<usize>,
) -> Result<Rollout> {
    let n = inst.n();
    let mut order = Vec::with_capacity(n);
    order.push(0);
    let mut unvisited: Vec<usize> = (1..n).collect();
    let mut grad = vec![0.0; FEATURE_DIM];
    let mut step_log_probs = Vec::with_capacity(n.saturating_sub(1));
    let mut feats = Vec::with_capacity(n);
    let mut probs = Vec::with_capacity(n);
    while !unvisited.is_empty() {
        let cur = *order.last().unwrap();
        feats.clear();
        feats.extend(unvisited.iter().map(|&j| inst.features(policy.schema, w, cur, j)));
        let scores: Vec<f64> = feats.iter().map(|x| policy.score(x)).collect();
        let top = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        probs.clear();
        probs.extend(scores.iter().map(|s| (s - top).exp()));
        let z: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= z);
        if !top.is_finite() || !z.is_finite() {
            return Err(Error::Numerical("non-finite policy scores".into()));
        }
        let c = choose(order.len(), &unvisited, &probs)?;
        step_log_probs.push(scores[c] - top - z.ln());
        for (d, g) in grad.iter_mut().enumerate() {
            let expected: f64 = feats.iter().zip(&probs).map(|(x, p)| p * x[d]).sum();
            *g += feats[c][d] - expected;
        }
        order.push(unvisited.remove(c));
    }
    let objectives = inst.costs.evaluate(&order);
    Ok(Rollout {
        tour: Tour::from_canonical_unchecked(order),
        objectives,
        log_prob: step_log_probs.iter().sum(),
        step_log_probs,
        grad_log_prob: grad,
    })
}

/// Builds a tour from city 0, drawing each next city from the softmax over
/// the unvisited ones.
pub fn sample_tour<R: Rng + ?Sized>(
    policy: &PolicyParams,
    inst: &PolicyInstance,
    w: &PreferenceVector,
    rng: &mut R,
) -> Result<Rollout> {
    decode(policy, inst, w, |_, _, probs| {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (c, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return Ok(c);
            }
        }
        Ok(probs.len() - 1)
    })
}

/// Always takes the most probable city; ties go to the lowest index.
pub fn greedy_tour(policy: &PolicyParams, inst: &PolicyInstance, w: &PreferenceVector) -> Result<Rollout> {
    decode(policy, inst, w, |_, _, probs| {
        let mut best = 0;
        for (c, p) in probs.iter().enumerate() {
            if *p > probs[best] {
                best = c;
            }
        }
        Ok(best)
    })
}

/// Log-probability (and its gradient) of constructing `tour` exactly as
/// ordered, starting from city 0.
pub fn log_prob_of(policy: &PolicyParams, inst: &PolicyInstance, w: &PreferenceVector, tour: &[usize]) -> Result<Rollout> {
    if tour.len() != inst.n() || tour.first() != Some(&0) {
        return invalid("tour must visit every city and start at city 0");
    }
    crate::tour::check_permutation(tour)?;
    decode(policy, inst, w, |step, cands, _| {
        cands.iter().position(|&c| c == tour[step]).ok_or_else(|| Error::InvalidInput("repeated city".into()))
    })
}

/// `(1/M) sum (L - b) grad log p` over `(rollout, reward, baseline)` samples.
pub fn reinforce_gradient<'a>(batch: impl IntoIterator<Item = (&'a Rollout, f64, f64)>) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; FEATURE_DIM];
    let mut count = 0usize;
    for (r, reward, baseline) in batch {
        let adv = reward - baseline;
        for (g, x) in grad.iter_mut().zip(&r.grad_log_prob) {
            *g += adv * x;
        }
        count += 1;
    }
    if count == 0 {
        return invalid("empty gradient batch");
    }
    grad.iter_mut().for_each(|g| *g /= count as f64);
    Ok(grad)
}

/// One descent step on `(1/M) sum 1/2 (phi . z - L)^2`.
pub fn critic_update(critic: &CriticParams, batch: &[(Vec<f64>, f64)], eta_c: f64) -> Result<CriticParams> {
    if batch.is_empty() {
        return invalid("empty critic batch");
    }
    let mut grad = vec![0.0; critic.phi.len()];
    for (z, target) in batch {
        if z.len() != critic.phi.len() {
            return invalid(format!("critic features have {} entries, expected {}", z.len(), critic.phi.len()));
        }
        let err = critic.predict(z) - target;
        for (g, x) in grad.iter_mut().zip(z) {
            *g += err * x;
        }
    }
    let m = batch.len() as f64;
    let phi = critic.phi.iter().zip(&grad).map(|(p, g)| p - eta_c * g / m).collect();
    Ok(CriticParams { phi })
}

/// Mean of `1/2 (phi . z - L)^2` over the batch.
pub fn critic_loss(critic: &CriticParams, batch: &[(Vec<f64>, f64)]) -> f64 {
    batch.iter().map(|(z, t)| 0.5 * (critic.predict(z) - t).powi(2)).sum::<f64>() / batch.len() as f64
}

#[cfg(test)]
mod tests;
