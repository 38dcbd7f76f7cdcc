#![no_main]

use libfuzzer_sys::fuzz_target;
use staeb_core::io::{generate_instance, GenConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut cfg = GenConfig {
        num_tasks: 4,
        num_workers: 8,
        ..GenConfig::default()
    };
    for line in text.lines() {
        if let Some((k, v)) = line.split_once('=') {
            let _ = cfg.set(k, v);
        }
    }
    // keep generation cheap
    cfg.num_tasks = cfg.num_tasks.min(64);
    cfg.num_workers = cfg.num_workers.min(64);
    let _ = generate_instance(&cfg);
});
