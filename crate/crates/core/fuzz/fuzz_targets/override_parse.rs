#![no_main]
use libfuzzer_sys::fuzz_target;
use magnon_core::config::{parse_override, ConfigFile};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((key, value)) = parse_override(text) {
        assert!(value.is_finite());
        let mut cfg = ConfigFile::default();
        cfg.apply_override(text).unwrap();
        assert_eq!(cfg.get(key), Some(value));
        let _ = cfg.resolve();
    }
});
