#![no_main]
use libfuzzer_sys::fuzz_target;
use magnon_core::sweep::SweepResult;

fuzz_target!(|data: &[u8]| {
    if let Ok(result) = SweepResult::read_csv(data) {
        let text = result.to_csv_string().unwrap();
        let again = SweepResult::read_csv(text.as_bytes()).unwrap();
        assert_eq!(again, result);
    }
});
