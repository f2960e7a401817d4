//! Builds the default corpus and a stratified subset, then writes a sample.
//!
//!     cargo run --release --example generate_corpus -- /tmp/corpus.jsonl

use colorbench::corpus::{generate_corpus, stratified_subset, write_corpus, CorpusConfig, Task};
use std::collections::BTreeMap;

fn main() -> colorbench::Result<()> {
    let cfg = CorpusConfig::default();
    let corpus = generate_corpus(&cfg)?;
    let mut per_task: BTreeMap<Task, usize> = BTreeMap::new();
    for p in &corpus {
        *per_task.entry(p.task).or_default() += 1;
    }
    println!("{} prompts", corpus.len());
    for (t, n) in &per_task {
        let first = corpus.iter().find(|p| p.task == *t).unwrap();
        println!("  {t} {n:>6}  e.g. {}: {}", first.id, first.text);
    }

    let mini = stratified_subset(&corpus, 1000, cfg.seed)?;
    println!("mini subset: {} prompts", mini.len());
    if let Some(path) = std::env::args().nth(1) {
        write_corpus(&mini, path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}
