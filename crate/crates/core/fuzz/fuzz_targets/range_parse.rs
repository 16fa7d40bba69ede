#![no_main]
use libfuzzer_sys::fuzz_target;
use magnon_core::sweep::{parse_range, AxisRange};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((_, min, max)) = parse_range(text) {
        assert!(min.is_finite() && max.is_finite());
        if let Ok(range) = AxisRange::new(min, max, 7) {
            let values: Vec<f64> = range.values().collect();
            assert_eq!(values.len(), 7);
            assert_eq!(values[6], max);
        }
    }
});
