use colorbench::colorspace::{srgb_to_lab, Lab, Rgb8};
use colorbench::corpus::{find_object, generate_corpus, Category, CorpusConfig, PromptSpec, Task};
use colorbench::dominant::DominantColor;
use colorbench::report::*;
use colorbench::scoring::{ImageResult, Metric, MetricReport};
use colorbench::taxonomy::{classify_nearest, system, SystemId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};
use std::sync::LazyLock;

static CORPUS: LazyLock<Vec<PromptSpec>> = LazyLock::new(|| {
    let mut cfg = CorpusConfig::default();
    for tc in cfg.tasks.values_mut() {
        tc.quota = 60;
    }
    generate_corpus(&cfg).unwrap()
});

fn small_corpus() -> Vec<PromptSpec> {
    CORPUS.clone()
}

fn report_for(object: &str, lab: Lab, correct: bool) -> MetricReport {
    let m = Metric { distance: Some(0.0), pass: correct };
    MetricReport {
        object: object.into(),
        delta_chroma: m,
        ciede2000: m,
        hue: m,
        hue_gated: false,
        correct,
        failure_reason: None,
        dominant: Some(DominantColor { lab, pixel_count: 1, mean_chroma: lab.chroma(), hue_axis: [1.0, 0.0] }),
    }
}

fn results(corpus: &[PromptSpec], mut correct: impl FnMut(&PromptSpec, u32) -> bool) -> Vec<ImageResult> {
    let mut out = Vec::new();
    for p in corpus {
        for i in 0..4 {
            let ok = correct(p, i);
            let reports = p.pairs().iter().map(|(o, c)| report_for(o, c.target_lab, ok)).collect();
            out.push(ImageResult { prompt_id: p.id.clone(), image_index: i, correct: ok, excluded: false, reports, model_tag: None });
        }
    }
    out
}

#[test]
fn all_correct_is_one_hundred() {
    let corpus = small_corpus();
    let r = aggregate(&results(&corpus, |_, _| true), &corpus, "m", 4).unwrap();
    for t in Task::ALL {
        assert_eq!(r.task_score(t), Some(100.0), "{t}");
    }
    assert_eq!(r.avg(), Some(100.0));
    assert_eq!(r.get(Slice::Tasks, AVG_KEY).unwrap().prompts, corpus.len());
}

#[test]
fn half_the_images_is_fifty() {
    let corpus = small_corpus();
    let r = aggregate(&results(&corpus, |_, i| i % 2 == 0), &corpus, "m", 4).unwrap();
    assert_eq!(r.avg(), Some(50.0));
    assert!(r.rows.iter().all(|row| row.score.is_none_or(|s| (s - 50.0).abs() < 1e-9)));
}

#[test]
fn missing_task_leaves_average_empty() {
    let corpus = small_corpus();
    let res: Vec<_> = results(&corpus, |_, _| true).into_iter().filter(|r| !r.prompt_id.starts_with("NCU")).collect();
    let r = aggregate(&res, &corpus, "m", 4).unwrap();
    assert_eq!(r.task_score(Task::Ncu), None);
    assert_eq!(r.avg(), None);
}

#[test]
fn orphan_rows_are_rejected() {
    let corpus = small_corpus();
    let mut res = results(&corpus[..3], |_, _| true);
    res[0].prompt_id = "CNA-999999".into();
    match aggregate(&res, &corpus, "m", 4) {
        Err(colorbench::Error::Mismatch { ids, .. }) => assert_eq!(ids, ["CNA-999999"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn task_scores_are_prompt_weighted_system_means() {
    let corpus = small_corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = aggregate(&results(&corpus, |_, _| rng.random_bool(0.4)), &corpus, "m", 4).unwrap();
    for t in Task::ALL {
        let prefix = format!("{t}/");
        let (mut sum, mut n) = (0.0, 0);
        for row in r.slice(Slice::Systems).filter(|row| row.key.starts_with(&prefix)) {
            sum += row.score.unwrap() * row.prompts as f64;
            n += row.prompts;
        }
        assert!((sum / n as f64 - r.task_score(t).unwrap()).abs() < 1e-9, "{t}");
    }
    let cna = r.get(Slice::Tasks, "CNA").unwrap().prompts;
    assert_eq!(r.slice(Slice::Categories).map(|row| row.prompts).sum::<usize>(), cna);
    assert!(r.slice(Slice::Basic).all(|row| row.prompts <= cna));
}

#[test]
fn per_prompt_accuracy_then_mean() {
    let corpus: Vec<PromptSpec> = small_corpus().into_iter().filter(|p| p.task == Task::Cna).take(2).collect();
    // first prompt 1 of 4 right, second 4 of 4
    let res = results(&corpus, |p, i| p.id == corpus[1].id || i == 0);
    let r = aggregate(&res, &corpus, "m", 4).unwrap();
    assert!((r.task_score(Task::Cna).unwrap() - 62.5).abs() < 1e-9);
}

#[test]
fn bias_matches_brute_force_classification() {
    let corpus = small_corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut res = results(&corpus, |_, _| false);
    for r in &mut res {
        for rep in &mut r.reports {
            let lab = srgb_to_lab(Rgb8::new(rng.random(), rng.random(), rng.random()));
            rep.dominant.as_mut().unwrap().lab = lab;
        }
    }
    let report = aggregate(&res, &corpus, "m", 4).unwrap();

    let by_id: HashMap<&str, &PromptSpec> = corpus.iter().map(|p| (p.id.as_str(), p)).collect();
    let l2 = system(SystemId::IsccL2);
    let mut want: BTreeMap<Category, BTreeMap<String, usize>> = BTreeMap::new();
    for r in &res {
        for rep in &r.reports {
            let cat = find_object(&rep.object).map_or(by_id[r.prompt_id.as_str()].category, |o| o.category);
            let name = classify_nearest(rep.dominant.unwrap().lab, l2).name.clone();
            *want.entry(cat).or_default().entry(name).or_default() += 1;
        }
    }
    assert_eq!(report.bias.keys().collect::<Vec<_>>(), want.keys().collect::<Vec<_>>());
    for (cat, b) in &report.bias {
        let counts = &want[cat];
        assert_eq!(b.classified, counts.values().sum::<usize>());
        assert!(b.top.len() <= 10);
        assert!(b.top.windows(2).all(|w| w[0].count >= w[1].count));
        for e in &b.top {
            assert_eq!(counts[&e.name], e.count, "{cat} {}", e.name);
        }
        let mut sorted: Vec<usize> = counts.values().copied().collect();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(b.top.iter().map(|e| e.count).collect::<Vec<_>>(), sorted[..b.top.len()]);
    }
}

#[test]
fn csv_and_json_exports() {
    let corpus = small_corpus();
    let a = aggregate(&results(&corpus, |_, i| i == 0), &corpus, "model-a", 4).unwrap();
    let b = aggregate(&results(&corpus, |_, _| true), &corpus, "model-b", 4).unwrap();
    let reports = vec![a, b];

    let mut buf = Vec::new();
    write_long_csv(&reports, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let bias_rows: usize = reports.iter().flat_map(|r| r.bias.values()).map(|b| b.top.len()).sum();
    let rows: usize = reports.iter().map(|r| r.rows.len()).sum();
    assert_eq!(text.lines().count(), 1 + rows + bias_rows);
    assert!(text.contains("model-b,tasks,Avg,100.00,"));
    assert!(text.contains("model-a,tasks,Avg,25.00,"));

    let mut buf = Vec::new();
    write_wide_csv(&reports, Slice::Tasks, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next().unwrap(), "model,CNA,COA,MCC,ICA,NCU,Avg");
    assert_eq!(text.lines().count(), 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    export(&reports, Format::Json, &path).unwrap();
    let back: Vec<AggregateReport> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, reports);
}

#[test]
fn slice_names_parse() {
    for s in Slice::ALL {
        assert_eq!(s.as_str().parse::<Slice>().unwrap(), s);
    }
    assert!("colors".parse::<Slice>().is_err());
}
