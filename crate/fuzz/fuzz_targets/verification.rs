#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_core::randomness::{builtin_schnorr, Verification};
use typicality_core::spaces::ApproxPoint;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<Verification>(data) else { return };
    let json = serde_json::to_vec(&v).unwrap();
    assert_eq!(serde_json::from_slice::<Verification>(&json).unwrap(), v);
    // replaying a forged certificate must fail cleanly, never panic
    let test = builtin_schnorr("cylinder-zeros").unwrap();
    let x = ApproxPoint::eventually_periodic(&[], &[false]);
    for c in v.certificates.iter().take(4) {
        if c.level <= 16 && c.stage <= 64 {
            let _ = c.replay(&x, test.ml());
        }
    }
});
