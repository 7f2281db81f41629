#![no_main]

use folcheck::weight::{fundamental_notation, Weight};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(w) = Weight::parse(data) {
        let again = Weight::parse(&w.to_string()).expect("display parses back");
        assert_eq!(w, again);
        let _ = fundamental_notation(&w);
    }
});
