#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_core::spaces::IdealPoint;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<IdealPoint>() {
        let text = p.to_string();
        assert_eq!(text.parse::<IdealPoint>().unwrap(), p, "{text}");
    }
});
