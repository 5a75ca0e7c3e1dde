#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_distortion::MetricInstance;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(inst) = MetricInstance::from_json(text) else {
        return;
    };
    // accepted instances are valid metrics and survive a round trip
    assert!(inst.validate().is_ok());
    let again = MetricInstance::from_json(&inst.to_json()).expect("serialized instance parses");
    assert_eq!((again.n(), again.m()), (inst.n(), inst.m()));
    let _ = inst.optimal_candidate();
});
