use mochis_wasm::{cdf_curve, moments, two_sample};

#[test]
fn moments_json() {
    let out = moments(false, 2, 2, "1,1", 1).unwrap();
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(rows[1]["raw"], "10/3");
}

#[test]
fn cdf_curve_is_monotone() {
    let out = cdf_curve(true, 0, 2, "1,1/2,1", 12, 50).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let ys: Vec<f64> = v["cdf"].as_array().unwrap().iter().map(|y| y.as_f64().unwrap()).collect();
    assert_eq!(ys.len(), 51);
    assert!(ys.windows(2).all(|w| w[0] <= w[1] + 1e-12));
}

#[test]
fn two_sample_json() {
    let out = two_sample("0.3 -1.2 0.8", "2.1,0.5 3.3", 2, "", "two-sided", 0).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let p = v["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
}
