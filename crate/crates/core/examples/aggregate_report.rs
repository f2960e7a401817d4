//! Aggregates synthetic per-image results into the report tables.

use colorbench::corpus::{generate_corpus, CorpusConfig};
use colorbench::report::{aggregate, write_long_csv, write_wide_csv, Slice};
use colorbench::scoring::ImageResult;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> colorbench::Result<()> {
    let mut cfg = CorpusConfig::default();
    for tc in cfg.tasks.values_mut() {
        tc.quota = 200;
    }
    let corpus = generate_corpus(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let results: Vec<ImageResult> = corpus
        .iter()
        .flat_map(|p| (0..4).map(move |i| (p, i)))
        .map(|(p, i)| ImageResult {
            prompt_id: p.id.clone(),
            image_index: i,
            correct: rng.random_bool(0.3),
            excluded: false,
            reports: vec![],
            model_tag: None,
        })
        .collect();
    let report = aggregate(&results, &corpus, "coin-flip", 4)?;
    let stdout = std::io::stdout();
    for s in [Slice::Tasks, Slice::Categories, Slice::Basic, Slice::Modifiers] {
        println!("# {s}");
        write_wide_csv(std::slice::from_ref(&report), s, stdout.lock())?;
    }
    println!("# long format, first lines");
    let mut buf = Vec::new();
    write_long_csv(&[report], &mut buf)?;
    for line in String::from_utf8_lossy(&buf).lines().take(8) {
        println!("{line}");
    }
    Ok(())
}
