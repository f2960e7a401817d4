mod common;

use colorbench::colorspace::{Lab, Rgb8};
use colorbench::corpus::{Category, PromptSpec, PromptSystem, Task};
use colorbench::dominant::DominantColor;
use colorbench::masks::{Mask, MaskBundle};
use colorbench::scoring::*;
use colorbench::taxonomy::{system, ColorSpec, SystemId};
use common::flat_image;
use image::{Rgb, RgbImage};
use proptest::prelude::*;

fn l2(name: &str) -> ColorSpec {
    ColorSpec::named(system(SystemId::IsccL2).get(name).unwrap())
}

fn prompt(task: Task, objects: &[&str], colors: Vec<ColorSpec>) -> PromptSpec {
    PromptSpec {
        id: format!("{task}-000001"),
        task,
        level: 1,
        template_id: "OF01".into(),
        objects: objects.iter().map(|s| s.to_string()).collect(),
        colors,
        system: PromptSystem::Named(SystemId::IsccL2),
        category: Category::Vehicles,
        text: String::new(),
    }
}

fn full(img: &RgbImage, n: usize) -> Vec<ObjectInput> {
    let (w, h) = img.dimensions();
    vec![ObjectInput { present: true, masks: Some(MaskBundle { positive: Mask::full(w, h), negatives: vec![] }) }; n]
}

/// Left half painted `left`, right half `right`, with one half-mask per object.
fn split(left: Rgb8, right: Rgb8) -> (RgbImage, Vec<ObjectInput>) {
    let img = RgbImage::from_fn(64, 32, |x, _| {
        let c = if x < 32 { left } else { right };
        Rgb([c.r, c.g, c.b])
    });
    let half = |lhs: bool| ObjectInput {
        present: true,
        masks: Some(MaskBundle { positive: Mask::from_fn(64, 32, |x, _| (x < 32) == lhs), negatives: vec![] }),
    };
    (img, vec![half(true), half(false)])
}

#[test]
fn flat_target_patch_is_correct() {
    let p = prompt(Task::Cna, &["car"], vec![l2("Red")]);
    let img = flat_image(32, 32, p.colors[0].value);
    let r = evaluate_loaded(&p, 0, &img, &full(&img, 1), &ScoringOptions::default()).unwrap();
    assert!(r.correct && !r.excluded);
    let rep = &r.reports[0];
    assert_eq!(rep.object, "car");
    assert_eq!(rep.dominant.unwrap().pixel_count, 1024);
    assert!(rep.ciede2000.distance.unwrap() < 1e-9);
}

#[test]
fn wrong_flat_patch_fails_on_metrics() {
    let p = prompt(Task::Cna, &["car"], vec![l2("Red")]);
    let img = flat_image(32, 32, l2("Blue").value);
    let r = evaluate_loaded(&p, 0, &img, &full(&img, 1), &ScoringOptions::default()).unwrap();
    assert!(!r.correct);
    assert_eq!(r.reports[0].failure_reason, Some(FailureReason::MetricFail));
}

#[test]
fn multi_color_needs_every_pair() {
    let (red, blue) = (l2("Red"), l2("Blue"));
    let p = prompt(Task::Mcc, &["banana", "apple"], vec![red.clone(), blue.clone()]);
    let opts = ScoringOptions::default();
    let (img, objs) = split(red.value, blue.value);
    assert!(evaluate_loaded(&p, 0, &img, &objs, &opts).unwrap().correct);
    let (img, objs) = split(red.value, red.value);
    let r = evaluate_loaded(&p, 0, &img, &objs, &opts).unwrap();
    assert!(!r.correct);
    assert!(r.reports[0].correct && !r.reports[1].correct);
}

#[test]
fn implicit_attribute_modes() {
    let green = l2("Green");
    let p = prompt(Task::Ica, &["backpack", "suitcase"], vec![green.clone()]);
    let both = ScoringOptions::default();
    let referenced = ScoringOptions { ica_mode: IcaMode::ReferencedOnly, ..Default::default() };

    let (img, objs) = split(green.value, green.value);
    assert!(evaluate_loaded(&p, 0, &img, &objs, &both).unwrap().correct);

    // referenced object wrong: fails either way
    let (img, objs) = split(green.value, l2("Violet").value);
    assert!(!evaluate_loaded(&p, 0, &img, &objs, &both).unwrap().correct);
    assert!(!evaluate_loaded(&p, 0, &img, &objs, &referenced).unwrap().correct);

    // only the explicitly colored object wrong
    let (img, objs) = split(l2("Violet").value, green.value);
    assert!(!evaluate_loaded(&p, 0, &img, &objs, &both).unwrap().correct);
    let r = evaluate_loaded(&p, 0, &img, &objs, &referenced).unwrap();
    assert!(r.correct);
    assert_eq!(r.reports.len(), 1);
    assert_eq!(r.reports[0].object, "suitcase");
}

#[test]
fn absent_objects_are_penalized_or_excluded() {
    let p = prompt(Task::Cna, &["car"], vec![l2("Red")]);
    let img = flat_image(32, 32, p.colors[0].value);
    let mut objs = full(&img, 1);
    objs[0].present = false;
    let r = evaluate_loaded(&p, 0, &img, &objs, &ScoringOptions::default()).unwrap();
    assert!(!r.correct && !r.excluded);
    assert_eq!(r.reports[0].failure_reason, Some(FailureReason::ObjectAbsent));
    assert!(r.reports[0].dominant.is_none());
    let opts = ScoringOptions { absent_policy: AbsentPolicy::Exclude, ..Default::default() };
    let r = evaluate_loaded(&p, 0, &img, &objs, &opts).unwrap();
    assert!(r.excluded && !r.correct);
    assert_eq!(score_prompt(&[r], 4), None);
}

#[test]
fn unusable_masks_are_invalid() {
    let p = prompt(Task::Cna, &["car"], vec![l2("Red")]);
    let img = flat_image(32, 32, p.colors[0].value);
    let opts = ScoringOptions::default();
    let none = vec![ObjectInput { present: true, masks: None }];
    let tiny = vec![ObjectInput {
        present: true,
        masks: Some(MaskBundle { positive: Mask::from_fn(32, 32, |x, y| x < 4 && y < 4), negatives: vec![] }),
    }];
    let wrong_size = vec![ObjectInput { present: true, masks: Some(MaskBundle { positive: Mask::full(8, 8), negatives: vec![] }) }];
    for objs in [none, tiny, wrong_size] {
        let r = evaluate_loaded(&p, 0, &img, &objs, &opts).unwrap();
        assert_eq!(r.reports[0].failure_reason, Some(FailureReason::MaskInvalid));
    }
    assert!(evaluate_loaded(&p, 0, &img, &[], &opts).is_err());
}

#[test]
fn numeric_prompt_against_nearest_names() {
    let spec = ColorSpec::numeric(colorbench::taxonomy::SpecKind::Hex, Rgb8::new(200, 30, 50), Some(SystemId::Css3X11));
    let p = prompt(Task::Ncu, &["car"], vec![spec]);
    let img = flat_image(32, 32, Rgb8::new(200, 30, 50));
    assert!(evaluate_loaded(&p, 0, &img, &full(&img, 1), &ScoringOptions::default()).unwrap().correct);
}

#[test]
fn files_on_disk_and_manifest_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let p = prompt(Task::Cna, &["fire hydrant"], vec![l2("Orange")]);
    let rows = common::write_flat_fixture(dir.path(), std::slice::from_ref(&p), 2, 24);
    let path = dir.path().join("manifest.jsonl");
    common::save_manifest(&rows, &path);
    let back = read_manifest(&path).unwrap();
    assert_eq!(back, rows);
    assert_eq!(back[1].objects[0].mask_path.as_deref(), Some("CNA-000001/1.fire_hydrant.mask.png"));
    let opts = ScoringOptions::default();
    for rec in &back {
        assert!(evaluate_image(rec, &p, dir.path(), &opts).unwrap().correct);
    }
    std::fs::remove_file(dir.path().join("CNA-000001/0.fire_hydrant.mask.png")).unwrap();
    let r = evaluate_image(&back[0], &p, dir.path(), &opts).unwrap();
    assert_eq!(r.reports[0].failure_reason, Some(FailureReason::MaskInvalid));
    std::fs::remove_file(dir.path().join("CNA-000001/1.png")).unwrap();
    assert!(evaluate_image(&back[1], &p, dir.path(), &opts).is_err());
    let other = prompt(Task::Cna, &["car"], vec![l2("Orange")]);
    assert!(matches!(evaluate_image(&back[0], &other, dir.path(), &opts), Err(colorbench::Error::Mismatch { .. })));
}

#[test]
fn results_parse_back() {
    let p = prompt(Task::Cna, &["car"], vec![l2("Red")]);
    let img = flat_image(16, 16, p.colors[0].value);
    let opts = ScoringOptions { refine: colorbench::masks::RefineParams { min_pixels: 1, ..Default::default() }, ..Default::default() };
    let r = evaluate_loaded(&p, 3, &img, &full(&img, 1), &opts).unwrap();
    let line = serde_json::to_string(&r).unwrap();
    assert_eq!(serde_json::from_str::<ImageResult>(&line).unwrap(), r);
}

fn any_lab() -> impl Strategy<Value = Lab> {
    (5.0..95.0f64, -60.0..60.0f64, -60.0..60.0f64).prop_map(|(l, a, b)| Lab::new(l, a, b))
}

fn any_spec() -> impl Strategy<Value = ColorSpec> {
    (0..2usize).prop_flat_map(|s| {
        let sys = system([SystemId::IsccL2, SystemId::Css3X11][s]);
        (0..sys.len()).prop_map(move |i| ColorSpec::named(&sys.entries[i]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn looser_thresholds_never_hurt(x in any_lab(), spec in any_spec(), k in 0usize..4, extra in 0.0..10.0f64, dk in 0usize..4) {
        let dom = DominantColor { lab: x, pixel_count: 1, mean_chroma: x.chroma(), hue_axis: [1.0, 0.0] };
        let th = Thresholds { k_neighbors: k, ..Default::default() };
        let loose = Thresholds {
            jnd_delta_chroma: th.jnd_delta_chroma + extra,
            jnd_ciede2000: th.jnd_ciede2000 + extra,
            jnd_hue_deg: th.jnd_hue_deg + extra,
            k_neighbors: k + dk,
            ..th
        };
        let tight = evaluate_target(&dom, &spec, &th).unwrap();
        let relaxed = evaluate_target(&dom, &spec, &loose).unwrap();
        prop_assert!(!tight.correct || relaxed.correct);
        prop_assert!(!tight.ciede2000.pass || relaxed.ciede2000.pass);
        prop_assert!(!tight.delta_chroma.pass || relaxed.delta_chroma.pass);
        prop_assert!(!tight.hue.pass || relaxed.hue.pass);
    }
}

#[test]
fn manifest_rows_follow_the_schema_fields() {
    let schema: serde_json::Value = serde_json::from_str(include_str!("../schema/manifest.schema.json")).unwrap();
    let keys = |v: &serde_json::Value| v["properties"].as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    let required = |v: &serde_json::Value| v["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap().to_string()).collect::<Vec<_>>();
    let object_schema = &schema["properties"]["objects"]["items"];

    let rec = ImageRecord {
        prompt_id: "MCC-000123".into(),
        image_index: 2,
        image_path: "MCC-000123/2.png".into(),
        objects: vec![ObjectRecord::conventional("MCC-000123/2.png", "car", true, &["tire"]), ObjectRecord::conventional("MCC-000123/2.png", "dog", false, &[])],
    };
    let v = serde_json::to_value(&rec).unwrap();
    let mut have: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    have.sort();
    let mut want = keys(&schema);
    want.sort();
    assert_eq!(have, want);
    for o in v["objects"].as_array().unwrap() {
        for k in o.as_object().unwrap().keys() {
            assert!(keys(object_schema).contains(k), "{k}");
        }
        for k in required(object_schema) {
            assert!(o.get(&k).is_some(), "{k}");
        }
    }
    let line = r#"{"prompt_id":"CNA-000001","image_index":0,"image_path":"a.png","objects":[{"name":"car","present":true,"mask_path":"a.car.mask.png"}]}"#;
    let parsed: ImageRecord = serde_json::from_str(line).unwrap();
    assert!(parsed.objects[0].neg_mask_paths.is_empty());
}
