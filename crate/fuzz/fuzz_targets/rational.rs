#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_core::exact::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = s.parse::<Rational>() {
        let text = x.to_pq();
        let back: Rational = text.parse().expect("p/q output must parse");
        assert_eq!(back, x);
        assert_eq!(back.to_pq(), text);
    }
    if let Ok(x) = serde_json::from_str::<Rational>(s) {
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), x);
    }
});
