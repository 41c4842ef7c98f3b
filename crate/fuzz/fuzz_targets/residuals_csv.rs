#![no_main]
use hyperpint_bench::csvio::{read_residuals, write_residuals};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_residuals(data) {
        // anything accepted must survive a rewrite
        let h: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let mut buf = Vec::new();
        write_residuals(&mut buf, &h).unwrap();
        let again = read_residuals(&buf[..]).unwrap();
        assert_eq!(again.len(), rows.len());
    }
});
