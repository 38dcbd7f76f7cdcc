#![no_main]

use libfuzzer_sys::fuzz_target;
use staeb_core::fixtures::canonical_instance;
use staeb_core::io::matching_from_json;
use staeb_core::validate_matching;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let i0 = canonical_instance();
    if let Ok(parsed) = matching_from_json(text, &i0) {
        let _ = validate_matching(&parsed.value, &i0);
    }
});
