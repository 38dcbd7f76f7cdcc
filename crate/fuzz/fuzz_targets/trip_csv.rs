#![no_main]

use libfuzzer_sys::fuzz_target;
use staeb_core::io::{ingest_trips, IngestConfig};

fuzz_target!(|data: &[u8]| {
    if let Ok(got) = ingest_trips(data, &IngestConfig::default()) {
        assert_eq!(got.instance.tasks().len(), got.instance.workers().len());
    }
});
