//! Preference cones, the norm surrogate, the Lagrangian reward and
//! projected multiplier ascent.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::objective::ObjectiveVector;

/// Unit-norm, nonnegative direction in objective space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceVector {
    w1: f64,
    w2: f64,
}

impl PreferenceVector {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        if !(w1 >= 0.0 && w2 >= 0.0) {
            return invalid(format!("preference ({w1}, {w2}) has a negative component"));
        }
        if (w1.hypot(w2) - 1.0).abs() > 1e-12 {
            return invalid(format!("preference ({w1}, {w2}) is not unit norm"));
        }
        Ok(Self { w1, w2 })
    }

    /// `(cos phi, sin phi)` for `phi` in `[0, pi/2]` radians.
    pub fn from_angle(phi: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return invalid(format!("angle {phi} outside [0, pi/2]"));
        }
        Ok(Self { w1: phi.cos(), w2: phi.sin().max(0.0) })
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }

    pub fn angle(&self) -> f64 {
        self.w2.atan2(self.w1)
    }

    pub fn dot(&self, f: &ObjectiveVector) -> f64 {
        self.w1 * f.f1 + self.w2 * f.f2
    }
}

/// Ordered preference vectors with strictly increasing angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PreferenceVector>", into = "Vec<PreferenceVector>")]
pub struct PreferenceSet(Vec<PreferenceVector>);

impl PreferenceSet {
    pub fn new(prefs: Vec<PreferenceVector>) -> Result<Self> {
        if prefs.is_empty() {
            return invalid("preference set is empty");
        }
        if prefs.windows(2).any(|w| w[1].angle() <= w[0].angle()) {
            return invalid("preference angles must be strictly increasing");
        }
        Ok(Self(prefs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[PreferenceVector] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PreferenceVector> {
        self.0.iter()
    }
}

impl TryFrom<Vec<PreferenceVector>> for PreferenceSet {
    type Error = Error;

    fn try_from(v: Vec<PreferenceVector>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PreferenceSet> for Vec<PreferenceVector> {
    fn from(p: PreferenceSet) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for PreferenceSet {
    type Output = PreferenceVector;

    fn index(&self, k: usize) -> &PreferenceVector {
        &self.0[k]
    }
}

/// `K` preferences at angles `(k - 1/2) * (pi/2) / K`, `k = 1..=K`. The
/// half-step offset keeps the axis directions out of the set.
pub fn generate_preferences(k: usize) -> Result<PreferenceSet> {
    if k < 1 {
        return invalid("need at least one preference");
    }
    let step = FRAC_PI_2 / k as f64;
    let prefs = (1..=k)
        .map(|i| PreferenceVector::from_angle((i as f64 - 0.5) * step))
        .collect::<Result<Vec<_>>>()?;
    PreferenceSet::new(prefs)
}

/// `g = 1 - (w . F) / |F|`: zero on the preference ray, in `[0, 1]` for
/// nonnegative `F`.
pub fn cone_constraint(f: &ObjectiveVector, w: &PreferenceVector) -> Result<f64> {
    let norm = f.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate(format!("objective vector ({}, {}) has norm {norm}", f.f1, f.f2)));
    }
    Ok(1.0 - w.dot(f) / norm)
}

/// Euclidean norm of the objective vector.
pub fn surrogate_objective(f: &ObjectiveVector) -> f64 {
    f.norm()
}

/// `L = |F| + lambda * g(F, w)`.
pub fn lagrangian_reward(f: &ObjectiveVector, w: &PreferenceVector, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return invalid(format!("multiplier {lambda} must be nonnegative"));
    }
    Ok(surrogate_objective(f) + lambda * cone_constraint(f, w)?)
}

/// Per-preference Lagrange multipliers with their ascent rate and bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierState {
    lambdas: Vec<f64>,
    alpha: f64,
    lambda_min: f64,
    lambda_max: f64,
}

impl MultiplierState {
    pub const DEFAULT_ALPHA: f64 = 0.05;
    pub const DEFAULT_LAMBDA_MIN: f64 = 0.0;
    pub const DEFAULT_LAMBDA_MAX: f64 = 50.0;

    /// `k` multipliers, all starting at `lambda_min`.
    pub fn new(k: usize, alpha: f64, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        Self::with_lambdas(vec![lambda_min; k], alpha, lambda_min, lambda_max)
    }

    pub fn with_defaults(k: usize) -> Self {
        Self::new(k, Self::DEFAULT_ALPHA, Self::DEFAULT_LAMBDA_MIN, Self::DEFAULT_LAMBDA_MAX)
            .expect("default multiplier bounds are valid")
    }

    pub fn with_lambdas(lambdas: Vec<f64>, alpha: f64, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return invalid(format!("ascent rate {alpha} must be positive"));
        }
        if !(lambda_min >= 0.0 && lambda_min <= lambda_max && lambda_max.is_finite()) {
            return invalid(format!("multiplier bounds [{lambda_min}, {lambda_max}] are invalid"));
        }
        if let Some(l) = lambdas.iter().find(|l| !(lambda_min..=lambda_max).contains(*l)) {
            return invalid(format!("multiplier {l} outside [{lambda_min}, {lambda_max}]"));
        }
        Ok(Self { lambdas, alpha, lambda_min, lambda_max })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.lambdas[k]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lambda_min, self.lambda_max)
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// One projected ascent step for preference `k` from its batch of
    /// constraint values.
    pub fn ascend(&mut self, k: usize, batch_g: &[f64]) {
        let sum: f64 = batch_g.iter().sum();
        self.lambdas[k] = (self.lambdas[k] + self.alpha * sum).clamp(self.lambda_min, self.lambda_max);
    }

    pub fn reset(&mut self) {
        self.lambdas.fill(self.lambda_min);
    }
}

/// `lambda_k <- clamp(lambda_k + alpha * sum_j g_kj, lambda_min, lambda_max)`
/// for every preference.
pub fn update_multipliers(state: &MultiplierState, batch_g: &[Vec<f64>]) -> Result<MultiplierState> {
    if batch_g.len() != state.len() {
        return invalid(format!("{} constraint batches for {} multipliers", batch_g.len(), state.len()));
    }
    if batch_g.iter().any(Vec::is_empty) {
        return invalid("every preference needs at least one constraint value");
    }
    let mut next = state.clone();
    for (k, g) in batch_g.iter().enumerate() {
        next.ascend(k, g);
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ov(a: f64, b: f64) -> ObjectiveVector {
        ObjectiveVector::new(a, b)
    }

    #[test]
    fn preference_generation() {
        let one = generate_preferences(1).unwrap();
        assert!((one[0].w1() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((one[0].w2() - 0.5f64.sqrt()).abs() < 1e-15);
        let two = generate_preferences(2).unwrap();
        assert!((two[0].angle().to_degrees() - 22.5).abs() < 1e-12);
        assert!((two[1].angle().to_degrees() - 67.5).abs() < 1e-12);
        for k in [1, 3, 16, 100, 1000] {
            let p = generate_preferences(k).unwrap();
            assert_eq!(p.len(), k);
            for w in p.iter() {
                assert!((w.w1().hypot(w.w2()) - 1.0).abs() <= 1e-12);
                assert!(w.w1() > 0.0 && w.w2() > 0.0);
            }
        }
        assert!(generate_preferences(0).is_err());
    }

    #[test]
    fn preference_set_rejects_unordered() {
        let a = PreferenceVector::from_angle(0.3).unwrap();
        let b = PreferenceVector::from_angle(0.2).unwrap();
        assert!(PreferenceSet::new(vec![a, b]).is_err());
        assert!(PreferenceSet::new(vec![a, a]).is_err());
        assert!(PreferenceSet::new(vec![]).is_err());
        assert!(PreferenceVector::new(0.6, 0.7).is_err());
        assert!(PreferenceVector::new(-0.6, 0.8).is_err());
    }

    #[test]
    fn cone_constraint_examples() {
        let w = PreferenceVector::new(0.6, 0.8).unwrap();
        assert!(cone_constraint(&ov(3.0, 4.0), &w).unwrap().abs() < 1e-15);
        let y = PreferenceVector::new(0.0, 1.0).unwrap();
        assert_eq!(cone_constraint(&ov(1.0, 0.0), &y).unwrap(), 1.0);
        let x = PreferenceVector::new(1.0, 0.0).unwrap();
        let g = cone_constraint(&ov(1.0, 1.0), &x).unwrap();
        assert!((g - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!(matches!(cone_constraint(&ov(0.0, 0.0), &x), Err(Error::Degenerate(_))));
    }

    #[test]
    fn surrogate_and_reward_examples() {
        assert_eq!(surrogate_objective(&ov(3.0, 4.0)), 5.0);
        assert_eq!(surrogate_objective(&ov(0.0, 0.0)), 0.0);
        let x = PreferenceVector::new(1.0, 0.0).unwrap();
        let f = ov(1.0, 1.0);
        assert_eq!(lagrangian_reward(&f, &x, 0.0).unwrap(), f.norm());
        assert!((lagrangian_reward(&f, &x, 2.0).unwrap() - 2.0).abs() < 1e-15);
        let w = PreferenceVector::new(0.6, 0.8).unwrap();
        for lambda in [0.0, 1.0, 100.0] {
            assert!((lagrangian_reward(&ov(3.0, 4.0), &w, lambda).unwrap() - 5.0).abs() < 1e-12);
        }
        assert!(lagrangian_reward(&f, &x, -1.0).is_err());
    }

    #[test]
    fn surrogate_matches_scaled_hypot() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let (a, b): (f64, f64) = (rng.gen_range(0.0..1e3), rng.gen_range(0.0..1e3));
            // Scale into [1, 2) before squaring so nothing rounds away, then
            // compare with a relative bound of a few ulps.
            let s = a.max(b).max(1e-300);
            let expect = s * ((a / s).powi(2) + (b / s).powi(2)).sqrt();
            let got = surrogate_objective(&ov(a, b));
            assert!((got - expect).abs() <= 4.0 * f64::EPSILON * expect);
        }
    }

    #[test]
    fn multiplier_examples() {
        let s = MultiplierState::with_lambdas(vec![1.0, 2.0], 0.1, 0.0, 10.0).unwrap();
        let same = update_multipliers(&s, &[vec![0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(same, s);
        let next = update_multipliers(&s, &[vec![-0.2, -0.3], vec![0.0]]).unwrap();
        assert!((next.lambda(0) - 0.95).abs() < 1e-15);
        let s = MultiplierState::with_lambdas(vec![9.9], 1.0, 0.0, 10.0).unwrap();
        assert_eq!(update_multipliers(&s, &[vec![5.0]]).unwrap().lambda(0), 10.0);
        assert!(update_multipliers(&s, &[vec![]]).is_err());
        assert!(update_multipliers(&s, &[vec![1.0], vec![1.0]]).is_err());
        assert!(MultiplierState::new(2, 0.0, 0.0, 1.0).is_err());
        assert!(MultiplierState::new(2, 0.1, -1.0, 1.0).is_err());
        assert!(MultiplierState::new(2, 0.1, 2.0, 1.0).is_err());
    }

    #[test]
    fn default_rate_saturates_within_1000_updates() {
        let mut s = MultiplierState::with_defaults(1);
        for _ in 0..1000 {
            s.ascend(0, &[1.0]);
        }
        assert!(MultiplierState::DEFAULT_LAMBDA_MAX - s.lambda(0) < 1e-9, "{}", s.lambda(0));
    }

    fn pref() -> impl Strategy<Value = PreferenceVector> {
        (0.0..=FRAC_PI_2).prop_map(|phi| PreferenceVector::from_angle(phi).unwrap())
    }

    fn objective() -> impl Strategy<Value = ObjectiveVector> {
        (0.0f64..100.0, 0.0f64..100.0)
            .prop_filter("nonzero", |(a, b)| a.hypot(*b) > 1e-6)
            .prop_map(|(a, b)| ov(a, b))
    }

    proptest! {
        #[test]
        fn cone_constraint_range_and_scale_invariance(f in objective(), w in pref(), c in 1e-3f64..1e3) {
            let g = cone_constraint(&f, &w).unwrap();
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&g));
            let gc = cone_constraint(&f.scale(c), &w).unwrap();
            prop_assert!((g - gc).abs() <= 1e-12);
        }

        #[test]
        fn cone_constraint_zero_on_ray(w in pref(), t in 1e-3f64..1e3) {
            let f = ov(t * w.w1(), t * w.w2());
            prop_assert!(cone_constraint(&f, &w).unwrap().abs() <= 1e-9);
        }

        #[test]
        fn cone_constraint_positive_off_ray(w in pref(), f in objective()) {
            let g = cone_constraint(&f, &w).unwrap();
            // Angular distance to the ray; g = 1 - cos(delta).
            let delta = (f.f2.atan2(f.f1) - w.angle()).abs();
            if delta > 1e-3 {
                prop_assert!(g > 1e-9);
            }
        }

        #[test]
        fn reward_monotone_in_lambda(f in objective(), w in pref(), l1 in 0.0f64..50.0, dl in 1e-3f64..50.0) {
            let g = cone_constraint(&f, &w).unwrap();
            let a = lagrangian_reward(&f, &w, l1).unwrap();
            let b = lagrangian_reward(&f, &w, l1 + dl).unwrap();
            prop_assert!(b >= a);
            if g > 1e-12 {
                prop_assert!(b > a);
            }
        }

        #[test]
        fn multipliers_stay_in_bounds(
            start in prop::collection::vec(0.0f64..=10.0, 1..6),
            alpha in 1e-3f64..5.0,
            gs in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 1..5), 6),
        ) {
            let k = start.len();
            let s = MultiplierState::with_lambdas(start, alpha, 0.0, 10.0).unwrap();
            let batch: Vec<Vec<f64>> = gs.into_iter().take(k).collect();
            let next = update_multipliers(&s, &batch).unwrap();
            for (i, l) in next.lambdas().iter().enumerate() {
                prop_assert!((0.0..=10.0).contains(l));
                let expect = (s.lambda(i) + alpha * batch[i].iter().sum::<f64>()).clamp(0.0, 10.0);
                prop_assert!((l - expect).abs() <= 1e-12);
                if batch[i].iter().all(|g| *g <= 0.0) {
                    prop_assert!(*l <= s.lambda(i));
                }
            }
        }
    }
}
