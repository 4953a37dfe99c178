use proptest::prelude::*;

use pareto_tour::instances::gen_euclidean;
use pareto_tour::tour::all_canonical_tours;
use pareto_tour::*;

fn members(points: &[ObjectiveVector], w: &PreferenceVector, eps: f64) -> Vec<ObjectiveVector> {
    points.iter().copied().filter(|f| cone_constraint(f, w).unwrap() <= eps).collect()
}

#[test]
fn minimum_norm_tour_is_undominated_in_its_cone() {
    let tours = all_canonical_tours(6);
    for seed in 0..10 {
        let inst: BtspInstance = gen_euclidean(6, RngSeed(seed)).unwrap().into();
        let fs: Vec<ObjectiveVector> = tours.iter().map(|t| inst.evaluate(t).unwrap()).collect();
        for eps in [1e-3, 1e-2, 0.1] {
            for w in generate_preferences(8).unwrap().iter() {
                let m = members(&fs, w, eps);
                if let Some(best) = m.iter().min_by(|a, b| a.norm().total_cmp(&b.norm())) {
                    assert!(m.iter().all(|o| !dominates(o, best)));
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn holds_for_arbitrary_nonnegative_points(
        pts in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 2..60),
        phi in 0.0f64..std::f64::consts::FRAC_PI_2,
        eps in 0.0f64..0.3,
    ) {
        let pts: Vec<ObjectiveVector> = pts.into_iter().map(Into::into).filter(|f: &ObjectiveVector| f.norm() > 0.0).collect();
        let w = PreferenceVector::from_angle(phi).unwrap();
        let m = members(&pts, &w, eps);
        if let Some(best) = m.iter().min_by(|a, b| a.norm().total_cmp(&b.norm())) {
            prop_assert!(m.iter().all(|o| !dominates(o, best)));
        }
    }
}
