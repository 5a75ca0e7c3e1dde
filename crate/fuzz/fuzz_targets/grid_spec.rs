#![no_main]

use libfuzzer_sys::fuzz_target;
use metric_distortion::io::{parse_grid, parse_usize_list};

fuzz_target!(|data: &str| {
    if let Ok(grid) = parse_grid(data) {
        assert!(!grid.is_empty());
        assert!(grid.iter().all(|x| x.is_finite()));
    }
    let _ = parse_usize_list(data);
});
