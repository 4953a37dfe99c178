use serde::{Deserialize, Serialize};

use super::{
    critic_update, greedy_tour, reinforce_gradient, sample_tour, CriticParams, FeatureSchema, PolicyInstance,
    PolicyParams, Rollout,
};
use crate::archive::ParetoArchive;
use crate::decomposition::{
    generate_preferences, MultiplierState, PreferenceSet,
};
use crate::error::{invalid, Error, Result};
use crate::instance::BtspInstance;
use crate::rng::RngSeed;
use crate::search::cone_g;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub iterations: usize,
    pub batch_size: usize,
    pub prefs: usize,
    pub eta_actor: f64,
    pub eta_critic: f64,
    pub alpha: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub seed: RngSeed,
    pub schema: FeatureSchema,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 2000,
            batch_size: 8,
            prefs: 4,
            eta_actor: 1e-2,
            eta_critic: 1e-2,
            alpha: MultiplierState::DEFAULT_ALPHA,
            lambda_min: MultiplierState::DEFAULT_LAMBDA_MIN,
            lambda_max: MultiplierState::DEFAULT_LAMBDA_MAX,
            seed: RngSeed(0),
            schema: FeatureSchema::Full,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.prefs == 0 {
            return invalid("batch size and preference count must be positive");
        }
        for (name, v) in [("eta_actor", self.eta_actor), ("eta_critic", self.eta_critic), ("alpha", self.alpha)] {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        MultiplierState::new(self.prefs, self.alpha, self.lambda_min, self.lambda_max).map(drop)
    }
}

/// Per-iteration averages over the batch, one entry per preference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub reward: Vec<f64>,
    pub norm: Vec<f64>,
    pub g: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl IterationStats {
    pub fn mean_reward(&self) -> f64 {
        self.reward.iter().sum::<f64>() / self.reward.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub policy: PolicyParams,
    pub critic: CriticParams,
    pub multipliers: MultiplierState,
    pub prefs: PreferenceSet,
    pub history: Vec<IterationStats>,
}

struct Sample {
    rollout: Rollout,
    reward: f64,
    baseline: f64,
    g: f64,
    critic_z: Vec<f64>,
}

/// Trains the policy, critic and multipliers.
///
/// Each iteration draws `batch_size` instances from `sample_instance`,
/// samples one tour per (instance, preference), takes one actor step down the
/// REINFORCE gradient of the Lagrangian reward, one critic step on the
/// squared prediction error and one multiplier ascent step per preference.
pub fn train<F>(sample_instance: F, cfg: &TrainConfig) -> Result<TrainOutcome>
where
    F: Fn(RngSeed) -> Result<BtspInstance> + Sync,
{
    cfg.validate()?;
    let prefs = generate_preferences(cfg.prefs)?;
    let mut policy = PolicyParams::zeros(cfg.schema);
    let mut critic = CriticParams::zeros();
    let mut multipliers = MultiplierState::new(cfg.prefs, cfg.alpha, cfg.lambda_min, cfg.lambda_max)?;
    let mut history = Vec::with_capacity(cfg.iterations);
    let (k_count, b_count) = (cfg.prefs, cfg.batch_size);

    for it in 0..cfg.iterations {
        let iter_seed = cfg.seed.derive(it as u64);
        let instances = (0..b_count)
            .map(|b| sample_instance(iter_seed.derive(b as u64)).and_then(|i| PolicyInstance::new(&i)))
            .collect::<Result<Vec<_>>>()?;

        let rollout = |job: usize| -> Result<Sample> {
            let (b, k) = (job / k_count, job % k_count);
            let w = &prefs[k];
            let inst = &instances[b];
            let mut rng = iter_seed.stream(job as u64);
            let rollout = sample_tour(&policy, inst, w, &mut rng)?;
            let g = cone_g(&rollout.objectives, w);
            let reward = rollout.objectives.norm() + multipliers.lambda(k) * g;
            let critic_z = inst.critic_features(w);
            let baseline = critic.predict(&critic_z);
            Ok(Sample { rollout, reward, baseline, g, critic_z })
        };
        #[cfg(feature = "parallel")]
        let samples: Result<Vec<Sample>> = {
            use rayon::prelude::*;
            (0..b_count * k_count).into_par_iter().map(rollout).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let samples: Result<Vec<Sample>> = (0..b_count * k_count).map(rollout).collect();
        let samples = samples?;

        let mut stats = IterationStats {
            reward: vec![0.0; k_count],
            norm: vec![0.0; k_count],
            g: vec![0.0; k_count],
            lambdas: Vec::new(),
        };
        for (job, s) in samples.iter().enumerate() {
            let k = job % k_count;
            stats.reward[k] += s.reward / b_count as f64;
            stats.norm[k] += s.rollout.objectives.norm() / b_count as f64;
            stats.g[k] += s.g / b_count as f64;
        }

        let grad = reinforce_gradient(samples.iter().map(|s| (&s.rollout, s.reward, s.baseline)))?;
        for (t, g) in policy.theta.iter_mut().zip(&grad) {
            *t -= cfg.eta_actor * g;
        }
        let critic_batch: Vec<(Vec<f64>, f64)> = samples.iter().map(|s| (s.critic_z.clone(), s.reward)).collect();
        critic = critic_update(&critic, &critic_batch, cfg.eta_critic)?;
        for k in 0..k_count {
            let gs: Vec<f64> = samples.iter().skip(k).step_by(k_count).map(|s| s.g).collect();
            multipliers.ascend(k, &gs);
        }
        stats.lambdas = multipliers.lambdas().to_vec();

        if policy.theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("actor parameters diverged at iteration {it}")));
        }
        if critic.phi.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "critic parameters diverged at iteration {it}; try a smaller critic learning rate"
            )));
        }
        history.push(stats);
    }
    Ok(TrainOutcome { policy, critic, multipliers, prefs, history })
}

/// Per preference, the greedy tour plus `samples_per_pref - 1` sampled tours,
/// all offered to one archive.
pub fn infer_front(
    policy: &PolicyParams,
    inst: &BtspInstance,
    prefs: &PreferenceSet,
    samples_per_pref: usize,
    seed: RngSeed,
) -> Result<ParetoArchive> {
    if samples_per_pref == 0 {
        return invalid("need at least one tour per preference");
    }
    let ctx = PolicyInstance::new(inst)?;
    let mut archive = ParetoArchive::new();
    for (k, w) in prefs.iter().enumerate() {
        let g = greedy_tour(policy, &ctx, w)?;
        archive.insert(g.tour, g.objectives);
        let mut rng = seed.stream(k as u64);
        for _ in 1..samples_per_pref {
            let r = sample_tour(policy, &ctx, w, &mut rng)?;
            archive.insert(r.tour, r.objectives);
        }
    }
    Ok(archive)
}
