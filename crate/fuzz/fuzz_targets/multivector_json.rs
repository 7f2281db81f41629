#![no_main]

use folcheck::extalg::MultiVector;
use libfuzzer_sys::fuzz_target;

// The first two bytes pick n and the inner degree; the rest is the JSON.
fuzz_target!(|data: &[u8]| {
    let [n, m, json @ ..] = data else { return };
    let Ok(s) = std::str::from_utf8(json) else { return };
    let n = 1 + *n as usize % 9;
    let m = 1 + *m as usize % 3;
    if let Ok(x) = MultiVector::from_json(n, m, s) {
        let back = MultiVector::from_json(n, m, &x.to_json()).expect("serialized vector parses");
        assert_eq!(x, back);
    }
});
