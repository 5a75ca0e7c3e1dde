#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_distortion::models::ModelSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = ModelSpec::from_json(text) else {
        return;
    };
    let again = ModelSpec::from_json(&spec.to_json()).expect("serialized model parses");
    assert_eq!(format!("{again:?}"), format!("{spec:?}"));
    for (n, m) in [(1, 2), (3, 3), (8, 5)] {
        if let Ok(model) = spec.clone().into_model(n, m) {
            assert_eq!(model.n(), n);
        }
    }
});
