use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::decomposition::generate_preferences;
use crate::instances::gen_euclidean;
use crate::metrics::{hv_exact_2d, reference_point};
use crate::rng::RngSeed;
use crate::search::random_tour_archive;

fn inst(n: usize, seed: u64) -> (BtspInstance, PolicyInstance) {
    let b: BtspInstance = gen_euclidean(n, RngSeed(seed)).unwrap().into();
    let p = PolicyInstance::new(&b).unwrap();
    (b, p)
}

fn random_policy(rng: &mut ChaCha8Rng, scale: f64) -> PolicyParams {
    PolicyParams::new((0..FEATURE_DIM).map(|_| rng.gen_range(-scale..scale)).collect(), FeatureSchema::Full).unwrap()
}

fn pref(rng: &mut ChaCha8Rng) -> PreferenceVector {
    PreferenceVector::from_angle(rng.gen_range(0.0..std::f64::consts::FRAC_PI_2)).unwrap()
}

/// Probability of constructing `tour` step by step, with the softmax written
/// out directly from the feature definitions.
fn path_probability(theta: &[f64], p: &PolicyInstance, w: &PreferenceVector, tour: &[usize]) -> f64 {
    let mut prob = 1.0;
    let mut left: Vec<usize> = (1..p.n()).collect();
    for k in 1..tour.len() {
        let cur = tour[k - 1];
        let weight = |j: usize| {
            let x = p.features(FeatureSchema::Full, w, cur, j);
            x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>().exp()
        };
        let z: f64 = left.iter().map(|&j| weight(j)).sum();
        prob *= weight(tour[k]) / z;
        left.retain(|&j| j != tour[k]);
    }
    prob
}

fn directed_tours(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let c = left.remove(i);
            prefix.push(c);
            rec(prefix, left, out);
            prefix.pop();
            left.insert(i, c);
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![0], &mut (1..n).collect(), &mut out);
    out
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale.max(1e-12)
}

#[test]
fn two_cities_are_forced() {
    let (_, p) = inst(2, 1);
    let w = PreferenceVector::from_angle(0.3).unwrap();
    let r = sample_tour(&random_policy(&mut ChaCha8Rng::seed_from_u64(0), 3.0), &p, &w, &mut ChaCha8Rng::seed_from_u64(1))
        .unwrap();
    assert_eq!(r.tour.as_slice(), &[0, 1]);
    assert_eq!(r.log_prob, 0.0);
}

#[test]
fn uniform_policy_log_prob() {
    for n in [3, 5, 9] {
        let (_, p) = inst(n, n as u64);
        let w = PreferenceVector::from_angle(1.0).unwrap();
        let r = sample_tour(&PolicyParams::zeros(FeatureSchema::Full), &p, &w, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let expected: f64 = -(2..n).map(|j| (j as f64).ln()).sum::<f64>();
        assert!((r.log_prob - expected).abs() < 1e-12);
        crate::tour::check_permutation(r.tour.as_slice()).unwrap();
        assert_eq!(r.tour.as_slice()[0], 0);
        assert!(r.grad_log_prob.iter().all(|g| g.is_finite()));
    }
}

#[test]
fn log_prob_matches_product_of_step_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in 0..20 {
        let (_, p) = inst(8, s);
        let pol = random_policy(&mut rng, 4.0);
        let w = pref(&mut rng);
        let r = sample_tour(&pol, &p, &w, &mut rng).unwrap();
        let oracle = path_probability(&pol.theta, &p, &w, r.tour.as_slice());
        assert!((r.log_prob.exp() / oracle - 1.0).abs() < 1e-10);
        let recomputed = log_prob_of(&pol, &p, &w, r.tour.as_slice()).unwrap();
        assert_eq!(recomputed.log_prob, r.log_prob);
        assert_eq!(recomputed.grad_log_prob, r.grad_log_prob);
    }
}

#[test]
fn sampling_frequencies_match_softmax() {
    let (_, p) = inst(4, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pol = random_policy(&mut rng, 3.0);
    let w = PreferenceVector::from_angle(0.4).unwrap();
    let tours = directed_tours(4);
    let samples = 100_000;
    let mut counts = vec![0usize; tours.len()];
    for _ in 0..samples {
        let r = sample_tour(&pol, &p, &w, &mut rng).unwrap();
        counts[tours.iter().position(|t| t == r.tour.as_slice()).unwrap()] += 1;
    }
    let total: f64 = tours.iter().map(|t| path_probability(&pol.theta, &p, &w, t)).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for (t, &c) in tours.iter().zip(&counts) {
        let q = path_probability(&pol.theta, &p, &w, t);
        let sigma = (samples as f64 * q * (1.0 - q)).sqrt();
        assert!((c as f64 - samples as f64 * q).abs() <= 3.0 * sigma.max(1.0), "{t:?}: {c} vs {}", samples as f64 * q);
    }
}

#[test]
fn perfect_baseline_gives_zero_gradient() {
    let (_, p) = inst(6, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pol = random_policy(&mut rng, 1.0);
    let w = pref(&mut rng);
    let rs: Vec<Rollout> = (0..5).map(|_| sample_tour(&pol, &p, &w, &mut rng).unwrap()).collect();
    let g = reinforce_gradient(rs.iter().map(|r| (r, 2.5, 2.5))).unwrap();
    assert!(g.iter().all(|&v| v == 0.0));
    assert!(reinforce_gradient(std::iter::empty()).is_err());
}

#[test]
fn uniform_gradient_on_three_cities() {
    let (_, p) = inst(3, 6);
    let w = PreferenceVector::from_angle(0.9).unwrap();
    let pol = PolicyParams::zeros(FeatureSchema::Full);
    let r = sample_tour(&pol, &p, &w, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
    let first = r.tour.as_slice()[1];
    let (x1, x2) = (p.features(FeatureSchema::Full, &w, 0, 1), p.features(FeatureSchema::Full, &w, 0, 2));
    let chosen = if first == 1 { x1 } else { x2 };
    let (reward, baseline) = (4.0, 1.5);
    let g = reinforce_gradient([(&r, reward, baseline)]).unwrap();
    for d in 0..FEATURE_DIM {
        let expected = (reward - baseline) * (chosen[d] - 0.5 * (x1[d] + x2[d]));
        assert!((g[d] - expected).abs() < 1e-14);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in 0..30 {
        let (_, p) = inst(5, 100 + s);
        let pol = random_policy(&mut rng, 2.0);
        let w = pref(&mut rng);
        let r = sample_tour(&pol, &p, &w, &mut rng).unwrap();
        let (reward, baseline) = (rng.gen_range(1.0..5.0), rng.gen_range(0.0..3.0));
        let g = reinforce_gradient([(&r, reward, baseline)]).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..FEATURE_DIM)
            .map(|d| {
                let eval = |delta: f64| {
                    let mut q = pol.clone();
                    q.theta[d] += delta;
                    (reward - baseline) * log_prob_of(&q, &p, &w, r.tour.as_slice()).unwrap().log_prob
                };
                (eval(h) - eval(-h)) / (2.0 * h)
            })
            .collect();
        assert!(rel_err(&g, &fd) < 1e-4, "{g:?} vs {fd:?}");
    }
}

#[test]
fn constant_baseline_leaves_expected_gradient_unbiased() {
    let (_, p) = inst(4, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pol = random_policy(&mut rng, 2.0);
    let w = pref(&mut rng);
    let lambda = 3.0;
    let tours = directed_tours(4);
    let reward = |t: &[usize]| {
        let f = p.costs().evaluate(t);
        f.norm() + lambda * crate::search::cone_g(&f, &w)
    };
    let expected_reward = |theta: &[f64]| -> f64 {
        tours.iter().map(|t| path_probability(theta, &p, &w, t) * reward(t)).sum()
    };
    let h = 1e-5;
    let exact: Vec<f64> = (0..FEATURE_DIM)
        .map(|d| {
            let mut up = pol.theta.clone();
            let mut down = pol.theta.clone();
            up[d] += h;
            down[d] -= h;
            (expected_reward(&up) - expected_reward(&down)) / (2.0 * h)
        })
        .collect();
    for c in [0.0, 1.7, -4.0] {
        let mut grad = vec![0.0; FEATURE_DIM];
        for t in &tours {
            let r = log_prob_of(&pol, &p, &w, t).unwrap();
            let q = r.log_prob.exp();
            let single = reinforce_gradient([(&r, reward(t), c)]).unwrap();
            grad.iter_mut().zip(&single).for_each(|(a, b)| *a += q * b);
        }
        assert!(rel_err(&grad, &exact) < 1e-6, "baseline {c}");
    }
}

#[test]
fn critic_fixed_point_and_lms() {
    let c = CriticParams::new(vec![0.5; CRITIC_DIM]).unwrap();
    let z: Vec<f64> = (0..CRITIC_DIM).map(|i| i as f64 * 0.1).collect();
    let batch = vec![(z.clone(), c.predict(&z))];
    assert_eq!(critic_update(&c, &batch, 0.1).unwrap(), c);

    let scalar = CriticParams { phi: vec![0.3] };
    let (x, target, eta) = (2.0, 5.0, 0.05);
    let next = critic_update(&scalar, &[(vec![x], target)], eta).unwrap();
    assert!((next.phi[0] - (0.3 + eta * (target - 0.3 * x) * x)).abs() < 1e-15);
    assert!(critic_update(&c, &[], 0.1).is_err());
}

#[test]
fn critic_mse_decreases_monotonically() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let batch: Vec<(Vec<f64>, f64)> = (0..16)
        .map(|_| ((0..CRITIC_DIM).map(|_| rng.gen_range(0.0..1.0)).collect(), rng.gen_range(2.0..8.0)))
        .collect();
    let mut c = CriticParams::zeros();
    let mut last = critic_loss(&c, &batch);
    for _ in 0..100 {
        c = critic_update(&c, &batch, 1e-2).unwrap();
        let now = critic_loss(&c, &batch);
        assert!(now < last);
        last = now;
    }
}

#[test]
fn preference_features_vanish_in_ablation() {
    let (_, p) = inst(6, 10);
    let w = PreferenceVector::from_angle(0.7).unwrap();
    let full = p.features(FeatureSchema::Full, &w, 1, 4);
    let ablated = p.features(FeatureSchema::NoPreference, &w, 1, 4);
    assert_eq!(&ablated[2..6], &[0.0; 4]);
    assert_eq!(&ablated[..2], &full[..2]);
    assert_eq!(&ablated[6..], &full[6..]);
    assert!(full[..2].iter().chain(&full[6..12]).all(|v| (0.0..=1.0).contains(v)));
}

fn sampler(n: usize) -> impl Fn(RngSeed) -> Result<BtspInstance> + Sync {
    move |s| Ok(gen_euclidean(n, s)?.into())
}

#[test]
fn zero_iterations_is_a_no_op() {
    let cfg = TrainConfig { iterations: 0, ..TrainConfig::default() };
    let out = train(sampler(6), &cfg).unwrap();
    assert_eq!(out.policy, PolicyParams::zeros(FeatureSchema::Full));
    assert_eq!(out.critic, CriticParams::zeros());
    assert!(out.multipliers.lambdas().iter().all(|&l| l == 0.0));
    assert!(out.history.is_empty());
}

#[test]
fn training_is_deterministic_and_bounded() {
    let cfg = TrainConfig { iterations: 40, batch_size: 4, seed: RngSeed(3), ..TrainConfig::default() };
    let a = train(sampler(7), &cfg).unwrap();
    let b = train(sampler(7), &cfg).unwrap();
    assert_eq!(a.policy, b.policy);
    assert_eq!(a.history, b.history);
    assert_eq!(a.history.len(), 40);
    for s in &a.history {
        assert!(s.lambdas.iter().all(|l| (0.0..=50.0).contains(l)));
    }
    assert!(train(sampler(7), &TrainConfig { prefs: 0, ..cfg.clone() }).is_err());
    let err = train(sampler(7), &TrainConfig { iterations: 400, eta_critic: 10.0, ..cfg }).unwrap_err();
    assert!(matches!(err, Error::Numerical(_)), "{err}");
}

#[test]
fn inference_front() {
    let cfg = TrainConfig { seed: RngSeed(1), ..TrainConfig::default() };
    let trained = train(sampler(7), &cfg).unwrap();
    let (b, _) = inst(7, 999);
    let prefs = generate_preferences(4).unwrap();
    let a1 = infer_front(&trained.policy, &b, &prefs, 1, RngSeed(0)).unwrap();
    let a2 = infer_front(&trained.policy, &b, &prefs, 1, RngSeed(77)).unwrap();
    assert_eq!(a1, a2);

    let many = generate_preferences(100).unwrap();
    let wide = infer_front(&trained.policy, &b, &many, 3, RngSeed(0)).unwrap();
    assert!(wide.is_mutually_nondominated());

    let r = reference_point(7);
    let mut wins = 0;
    for s in 0..10 {
        let (b, _) = inst(7, 500 + s);
        let front = infer_front(&trained.policy, &b, &prefs, 10, RngSeed(s)).unwrap();
        let random = random_tour_archive(&b, 40, &mut RngSeed(s).rng());
        wins += usize::from(hv_exact_2d(&front.objectives(), &r) >= hv_exact_2d(&random.objectives(), &r));
    }
    assert_eq!(wins, 10);
    assert!(infer_front(&trained.policy, &b, &prefs, 0, RngSeed(0)).is_err());
}

#[test]
fn checkpoint_shape_and_version() {
    let pol = PolicyParams::zeros(FeatureSchema::NoPreference);
    let ck = Checkpoint::new(&pol, &CriticParams::zeros(), &[1.0, 2.5]);
    let json = ck.to_json().unwrap();
    assert!(json.starts_with(r#"{"theta":[0.0,"#));
    assert!(json.ends_with(r#""lambdas":[1.0,2.5],"schema_version":1,"feature_schema":"v1-nopref"}"#));
    let back = Checkpoint::from_json(&json).unwrap();
    assert_eq!(back, ck);
    assert_eq!(back.policy().unwrap(), pol);
    let newer = json.replace(r#""schema_version":1"#, r#""schema_version":2"#);
    assert!(matches!(Checkpoint::from_json(&newer), Err(Error::Schema(_))));
    let short = json.replacen("[0.0,", "[", 1);
    assert!(Checkpoint::from_json(&short).is_err());
}
