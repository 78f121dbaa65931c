#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_core::spaces::IdealBall;

fuzz_target!(|data: &[u8]| {
    let Ok(b) = serde_json::from_slice::<IdealBall>(data) else { return };
    assert!(b.radius().is_positive());
    let json = serde_json::to_vec(&b).unwrap();
    assert_eq!(serde_json::from_slice::<IdealBall>(&json).unwrap(), b);
    assert!(b.within(&b).unwrap_or(true));
    assert!(b.contains_ideal(b.center()).unwrap_or(true));
});
