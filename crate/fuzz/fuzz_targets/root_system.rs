#![no_main]

use folcheck::RootSystem;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(rs) = RootSystem::parse(data) {
        let again = RootSystem::parse(rs.name()).expect("name parses back");
        assert_eq!(rs.rank(), again.rank());
        let _ = rs.weyl_dim(&rs.rho());
    }
});
