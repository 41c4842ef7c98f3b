#![no_main]
use hyperpint_bench::csvio::read_snapshot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(snap) = read_snapshot(data) {
        assert!(snap.values.iter().all(|v| v.len() == snap.x.len()));
    }
});
