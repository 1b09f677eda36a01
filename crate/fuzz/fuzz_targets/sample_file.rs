#![no_main]

use libfuzzer_sys::fuzz_target;
use rayprod_core::montecarlo::{decode_samples, encode_samples};

fuzz_target!(|data: &[u8]| {
    if let Ok((seed, values)) = decode_samples(data) {
        assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert_eq!(encode_samples(seed, &values), data);
    }
});
