use mochis_core::numeric::{rational_to_f64, BigInt, BigRational};
use mochis_core::power::{
    heteroskedastic_objective, heteroskedastic_search, simulate_p_values, AlternativeSpec, Design, EnsembleTest,
    PowerEstimate, WeightSearchConfig, WeightTemplate,
};
use mochis_core::stattest::{TwoSampleConfig, TwoSampleTest};
use mochis_core::WeightVector;

#[test]
fn ensemble_tracks_its_scale_member_at_half_level() {
    let scale = TwoSampleConfig::new(1, WeightVector::parse("1,1/5,1/10,0,0,0,0,1/10,1/5,1").unwrap());
    let location = TwoSampleConfig::new(1, WeightVector::parse("1,4/5,7/10,1/2,1/10,1/10,0,0,0,0").unwrap());
    let ensemble = EnsembleTest::prepare(&[location, scale.clone()], 30, 0.05).unwrap();
    let member = TwoSampleTest::prepare(&scale, 30).unwrap();
    let reps = 600;
    let p = simulate_p_values(
        &[&ensemble, &member],
        &Design::TwoSample { k: 10, n: 30 },
        &AlternativeSpec::Scale { sigma: 2.0 },
        reps,
        404,
    )
    .unwrap();
    let joint = PowerEstimate::from_p_values(&p[0], 0.05, 404);
    let alone = PowerEstimate::from_p_values(&p[1], 0.025, 404);
    assert!(joint.power >= alone.power);
    assert!(
        (joint.power - alone.power).abs() <= 3.0 * alone.standard_error.max(joint.standard_error),
        "{joint:?} vs {alone:?}"
    );
}

#[test]
fn search_matches_or_beats_hand_tuned_scale_weights() {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let hand_tuned = WeightVector::parse("1,1/5,1/10,0,0,0,0,1/10,1/5,1").unwrap();
    let reference = rational_to_f64(&heteroskedastic_objective(1, &hand_tuned, 30, &half).unwrap());
    let config = WeightSearchConfig::new(10, WeightTemplate::Symmetric, 10);
    let found = heteroskedastic_search(30, &half, &[1, 2], &config, 1).unwrap();
    assert!(found.objective <= reference, "{found:?} vs {reference}");
    let w = found.weights.entries();
    assert!(w.iter().zip(w.iter().rev()).all(|(a, b)| a == b));
}
