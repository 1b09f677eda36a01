#![no_main]

use libfuzzer_sys::fuzz_target;
use rayprod_core::interface::parse_dims;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = parse_dims(text) {
        assert!(config.n() >= 1);
        assert!(config.dims().iter().all(|&k| k >= 1));
        let again = parse_dims(&config.to_string()).expect("display form parses");
        assert_eq!(again, config);
    }
});
