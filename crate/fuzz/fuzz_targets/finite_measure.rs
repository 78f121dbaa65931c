#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_core::exact::Rational;
use typicality_core::measures::FiniteMeasure;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = serde_json::from_slice::<FiniteMeasure>(data) else { return };
    let total = m.atoms().iter().fold(Rational::zero(), |acc, a| acc + &a.weight);
    assert_eq!(total, Rational::one());
    let json = serde_json::to_vec(&m).unwrap();
    assert_eq!(serde_json::from_slice::<FiniteMeasure>(&json).unwrap(), m);
});
