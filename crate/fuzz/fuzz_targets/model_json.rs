#![no_main]

use libfuzzer_sys::fuzz_target;
use rayprod_core::cdf::GammaLaguerreModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(model) = GammaLaguerreModel::from_json(text) else {
        return;
    };
    for x in [0.0, model.mean(), model.mean() + 3.0 * model.std_dev()] {
        if let Ok(v) = model.cdf(x) {
            assert!((0.0..=1.0).contains(&v.regularized));
        }
    }
    let again = GammaLaguerreModel::from_json(&model.to_json()).expect("own output loads");
    assert_eq!(again.to_file(), model.to_file());
});
