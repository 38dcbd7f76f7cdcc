#![no_main]

use libfuzzer_sys::fuzz_target;
use staeb_core::io::{instance_from_json, instance_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(parsed) = instance_from_json(text) {
        // anything accepted must survive a write/read cycle unchanged
        let again = instance_from_json(&instance_to_json(&parsed.value)).expect("re-parse of own output");
        assert_eq!(again.value, parsed.value);
    }
});
