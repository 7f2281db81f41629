#![no_main]

use folcheck::verify::Registry;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(reg) = Registry::parse(data) {
        for c in reg.cases() {
            assert!(reg.get(&c.id).is_ok());
        }
    }
});
