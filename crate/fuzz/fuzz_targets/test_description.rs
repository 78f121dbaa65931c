#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_core::randomness::TestDescription;

fuzz_target!(|data: &[u8]| {
    let Ok(d) = serde_json::from_slice::<TestDescription>(data) else { return };
    if d.check().is_ok() {
        assert!(d.levels.iter().all(|l| l.measure_lower <= l.measure_upper));
    }
    let _ = d.certifies_bound();
    let json = serde_json::to_vec(&d).unwrap();
    assert_eq!(serde_json::from_slice::<TestDescription>(&json).unwrap(), d);
});
