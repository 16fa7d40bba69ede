#![no_main]
use libfuzzer_sys::fuzz_target;
use magnon_core::config::ConfigFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ConfigFile::parse(text) {
        if let Ok(point) = cfg.resolve() {
            assert!(point.params.validate().is_ok());
            let back = ConfigFile::from_point(&point).resolve().unwrap();
            assert_eq!(back, point);
        }
    }
});
