//! Regenerates the fixture files and the manifest.
//!
//! Usage: `cargo run -p qlogic --example gen_fixtures [DIR]` (defaults to
//! the workspace `fixtures/` directory).

use std::path::PathBuf;

fn main() {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(qlogic::fixtures::bundled_dir);
    match qlogic::fixtures::generate(&dir) {
        Ok(m) => {
            for e in &m.fixtures {
                println!("{:<16} {}", e.name(), e.file());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
