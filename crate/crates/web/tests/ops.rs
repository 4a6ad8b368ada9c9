use racah_frames_web::ops;
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn symbols_round_trip_through_json() {
    let v = parse(ops::three_jm_json(["1", "1", "0", "1", "-1", "0"]).unwrap());
    assert_eq!(v["exact"], "+sqrt(1/3)");
    let v = parse(ops::six_j_json(["1", "1", "0", "1", "1", "1"]).unwrap());
    assert_eq!(v["exact"], "-1/3");
    assert!(ops::three_jm_json(["1/2", "1", "0", "1", "1", "0"]).is_err());
    assert!(ops::three_jm_json(["x", "1", "0", "1", "1", "0"]).is_err());
}

#[test]
fn mub_table_is_unbiased() {
    let v = parse(ops::mub_overlaps_json(3).unwrap());
    let n = v["n"].as_u64().unwrap() as usize;
    assert_eq!(n, 12);
    let o: Vec<f64> = serde_json::from_value(v["overlaps"].clone()).unwrap();
    for x in 0..n {
        for y in 0..n {
            let e = if x == y { 1.0 } else if x / 3 == y / 3 { 0.0 } else { 1.0 / 3.0 };
            assert!((o[x * n + y] - e).abs() < 1e-12);
        }
    }
    assert!(ops::mub_overlaps_json(4).unwrap_err().contains("prime"));
}

#[test]
fn small_sic_search_converges() {
    let v = parse(ops::sic_search_json(3, 7).unwrap());
    assert_eq!(v["converged"], true);
    assert_eq!(v["rank"], 9);
    assert!(v["gram_deviation"].as_f64().unwrap() < 1e-8);
    assert!(ops::sic_search_json(0, 1).is_err());
}
