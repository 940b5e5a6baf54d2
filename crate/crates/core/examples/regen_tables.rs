//! Rewrites `data/repring_tables.json` from the resolution oracle.
//!
//!     cargo run -p crystalk-core --example regen_tables

fn main() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/repring_tables.json");
    let text = crystalk_core::oracle::regenerate_tables().to_file_string();
    std::fs::write(&path, text).expect("write table");
    println!("wrote {}", path.display());
}
