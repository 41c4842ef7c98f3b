#![no_main]
use hyperpint_bench::config::parse_snapshot_times;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        let _ = parse_snapshot_times(s);
    }
});
