#![no_main]

use folcheck::charring::FormalCharacter;
use folcheck::decomp::IrrDecomposition;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(ch) = FormalCharacter::from_json(data) {
        assert_eq!(FormalCharacter::from_json(&ch.to_json()).expect("serialized character parses"), ch);
    }
    if let Ok(dec) = IrrDecomposition::from_json(data) {
        assert_eq!(IrrDecomposition::from_json(&dec.to_json()).expect("serialized decomposition parses"), dec);
    }
});
