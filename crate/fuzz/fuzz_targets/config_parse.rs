#![no_main]
use hyperpint_bench::config::{parse_flat_config, Overrides};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(pairs) = parse_flat_config(s) {
            let _ = Overrides::from_pairs(&pairs);
        }
    }
});
