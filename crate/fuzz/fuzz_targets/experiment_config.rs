#![no_main]
use libfuzzer_sys::fuzz_target;
use typicality_cli::{parse_config, SUBCOMMANDS};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(config) = parse_config(s, None) else { return };
    assert!(SUBCOMMANDS.contains(&config.experiment.name()));
    let json = serde_json::to_string(&config).unwrap();
    assert_eq!(parse_config(&json, Some(config.experiment.name())).unwrap(), config);
});
