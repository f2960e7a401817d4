//! Corpus → synthetic images and masks → manifest → evaluate → report, all
//! in a temporary directory, through the same entry points as the binary.

use colorbench::cli::{cmd_evaluate, cmd_report, EvalArgs, ReportArgs};
use colorbench::corpus::{generate_corpus, write_corpus, CorpusConfig};
use colorbench::masks::Mask;
use colorbench::scoring::{write_manifest, ImageRecord, ObjectRecord};
use image::{Rgb, RgbImage};

fn main() -> colorbench::Result<()> {
    let dir = std::env::temp_dir().join(format!("colorbench-e2e-{}", std::process::id()));
    let images = dir.join("images");
    std::fs::create_dir_all(&images).map_err(colorbench::Error::io(&images))?;

    let mut cfg = CorpusConfig::default();
    for tc in cfg.tasks.values_mut() {
        tc.quota = 5;
    }
    let corpus = generate_corpus(&cfg)?;
    let corpus_path = dir.join("corpus.jsonl");
    write_corpus(&corpus, &corpus_path)?;

    // stand-in for a generator: one flat band per object in its prompted color,
    // except every third image, which is rendered gray
    let band = 32;
    let mut manifest = Vec::new();
    for p in &corpus {
        std::fs::create_dir_all(images.join(&p.id)).map_err(colorbench::Error::io(&images))?;
        let pairs = p.pairs();
        for i in 0..4u32 {
            let gray = (manifest.len() % 3) == 2;
            let img = RgbImage::from_fn(band, band * pairs.len() as u32, |_, y| {
                let c = pairs[(y / band) as usize].1.value;
                if gray { Rgb([128, 128, 128]) } else { Rgb([c.r, c.g, c.b]) }
            });
            let rel = format!("{}/{i}.png", p.id);
            img.save(images.join(&rel)).map_err(|source| colorbench::Error::Image { path: images.join(&rel), source })?;
            let mut objects = Vec::new();
            for (k, (name, _)) in pairs.iter().enumerate() {
                let rec = ObjectRecord::conventional(&rel, name, true, &[]);
                let (w, h) = img.dimensions();
                Mask::from_fn(w, h, |_, y| y / band == k as u32).save(&images.join(rec.mask_path.as_ref().unwrap()))?;
                objects.push(rec);
            }
            manifest.push(ImageRecord { prompt_id: p.id.clone(), image_index: i, image_path: rel, objects });
        }
    }
    let manifest_path = dir.join("manifest.jsonl");
    write_manifest(&manifest, &manifest_path)?;

    let results = dir.join("demo.jsonl");
    cmd_evaluate(&EvalArgs {
        corpus: corpus_path.clone(),
        manifest: manifest_path,
        images,
        out: results.clone(),
        k: 3,
        jnd_chroma: 5.0,
        jnd_de2000: 5.0,
        jnd_hue: 5.0,
        chroma_gate: 5.0,
        seed: 0,
        jobs: None,
        model_tag: Some("demo".into()),
        images_per_prompt: 4,
        exclude_absent: false,
        ica_referenced_only: false,
    })?;
    cmd_report(&ReportArgs {
        results: vec![results],
        corpus: corpus_path,
        out: dir.join("report"),
        slice: vec![],
        model_tag: None,
        images_per_prompt: 4,
    })?;
    println!("outputs in {}", dir.display());
    Ok(())
}
