//! Regenerate the synthetic evaluation corpus shipped with the pack.
//!
//! cargo run -p framechat-core --example gen_corpus [out_dir]

use std::path::PathBuf;

use framechat_core::corpus::{generate_corpus, write_corpus};
use framechat_core::engine::{Engine, EngineConfig};
use framechat_core::pack::{shipped_pack, shipped_pack_dir};

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| shipped_pack_dir().join("corpus"));
    let engine = Engine::new(shipped_pack().set, EngineConfig::default()).expect("shipped pack is valid");
    let corpus = generate_corpus(&engine);
    write_corpus(&corpus, &out).expect("write corpus");
    println!("wrote {} records to {}", corpus.records.len(), out.display());
}
