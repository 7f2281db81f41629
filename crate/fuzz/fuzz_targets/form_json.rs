#![no_main]

use folcheck::pforms::PolyForm;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(f) = PolyForm::from_json(data) {
        if !f.is_zero() {
            assert_eq!(PolyForm::from_json(&f.to_json()).expect("serialized form parses"), f);
        }
        let _ = f.is_radially_closed();
        if f.n() <= 4 && f.poly_degree() <= 4 {
            let _ = f.exterior_derivative();
        }
    }
});
