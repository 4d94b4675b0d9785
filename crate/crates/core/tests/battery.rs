//! Runs every gallery row end-to-end against the bundled files.

use std::time::Instant;

use autogrp_core::gallery;

#[test]
fn every_gallery_row_passes() {
    let dir = gallery::default_dir();
    let mut failures = Vec::new();
    for row in gallery::rows() {
        let start = Instant::now();
        match (row.run)(&dir) {
            Ok(res) => {
                println!(
                    "{:4} {:28} [{:13}] {:6.2}s  {}",
                    if res.pass { "ok" } else { "FAIL" },
                    row.name,
                    row.topic,
                    start.elapsed().as_secs_f64(),
                    res.detail
                );
                if !res.pass {
                    failures.push(format!("{}: {}", row.name, res.detail));
                }
            }
            Err(e) => {
                println!("ERR  {:28} {}", row.name, e);
                failures.push(format!("{}: {e}", row.name));
            }
        }
    }
    assert!(failures.is_empty(), "failing rows:\n{}", failures.join("\n"));
}
