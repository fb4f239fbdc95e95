use dmbc_core::dof::{DofRegion, region_constraints, SystemConfig};
use dmbc_core::schemes::*;
use dmbc_core::channel::Rx;

fn cfg(m: usize, n1: usize, n2: usize, k: usize) -> SystemConfig {
    SystemConfig::new(m, n1, n2, k).unwrap()
}

#[test]
fn plans_round_trip_through_json() {
    let plans = [
        build_scheme_mid_k(&cfg(4, 1, 3, 2)).unwrap(),
        build_scheme_low_k(&cfg(6, 3, 3, 1)).unwrap(),
        build_scheme_6331().unwrap(),
        build_scheme_baseline(&cfg(5, 2, 3, 0)).unwrap(),
        build_centralized_zf(&cfg(4, 1, 3, 2)).unwrap(),
        select_scheme(&cfg(11, 2, 5, 3), false).unwrap(),
    ];
    for plan in plans {
        let text = serde_json::to_string_pretty(&plan).unwrap();
        let back: TransmissionPlan = serde_json::from_str(&text).unwrap();
        assert_eq!(back, plan);
    }
}

#[test]
fn plan_json_shape() {
    let plan = build_scheme_6331().unwrap();
    let v = serde_json::to_value(&plan).unwrap();
    assert_eq!(v["scheme"], "table1");
    assert_eq!(v["claimed_dof"], "4");
    assert_eq!(v["cfg"], serde_json::json!({"m": 6, "n1": 3, "n2": 3, "k": 1}));
    let first = &v["slots"][0]["streams"][0];
    assert_eq!(first["payload"]["kind"], "retransmission");
    assert_eq!(first["payload"]["terms"].as_array().unwrap().len(), 2);
    assert_eq!(first["csit"][0], "channel_dependent");
    assert_eq!(first["precoder"]["kind"], "constant");
    assert_eq!(v["slots"].as_array().unwrap().len(), 4);
}

#[test]
fn invalid_plans_are_rejected_on_load() {
    let plan = build_scheme_mid_k(&cfg(4, 1, 3, 2)).unwrap();
    let mut v = serde_json::to_value(&plan).unwrap();
    v["cfg"]["k"] = serde_json::json!(9);
    assert!(serde_json::from_value::<TransmissionPlan>(v).is_err());
}

#[test]
fn table1_symbol_names() {
    let plan = build_scheme_6331().unwrap();
    assert_eq!(plan.symbols.count(Rx::Rx1), 8);
    assert_eq!(plan.symbols.count(Rx::Rx2), 8);
    for name in ["a1", "a8", "b1", "b8"] {
        assert!(plan.symbols.by_name(name).is_some(), "{name}");
    }
    assert!(plan.symbols.by_name("a9").is_none());
}

#[test]
fn regions_round_trip_through_json() {
    for c in [cfg(4, 1, 3, 0), cfg(9, 3, 6, 4), cfg(2, 2, 5, 1)] {
        let region = region_constraints(&c);
        let text = serde_json::to_string(&region).unwrap();
        let back: DofRegion = serde_json::from_str(&text).unwrap();
        assert_eq!(back, region);
        assert_eq!(back.vertices().unwrap(), region.vertices().unwrap());
    }
}
