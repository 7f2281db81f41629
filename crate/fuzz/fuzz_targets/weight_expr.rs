#![no_main]

use folcheck::expr::{self, Params, WeightExpr};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let params: Params = [("n".to_string(), 13), ("k".to_string(), 3), ("d".to_string(), 1)].into_iter().collect();
    let _ = expr::eval_int(data, &params);
    if let Ok(s) = expr::substitute(data, &params) {
        if let Ok(e) = WeightExpr::parse(&s) {
            for rank in [1, 4, 12, 16] {
                let _ = e.eval(rank);
            }
        }
    }
});
