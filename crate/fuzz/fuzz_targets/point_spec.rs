#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_core::dynamics::PointSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = s.parse::<PointSpec>() {
        let text = p.to_string();
        let again: PointSpec = text.parse().expect("display output must parse");
        assert_eq!(again, p);
        // only cheap forms get evaluated
        if !matches!(p, PointSpec::Pseudorandom { .. } | PointSpec::Oscillating { .. }) {
            let _ = p.to_point();
        }
    }
});
