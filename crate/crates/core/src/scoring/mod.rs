//! Per-image scoring: presence gate, mask refinement, dominant color and the
//! three JND-gated metrics against a candidate set.

mod manifest;

pub use manifest::{neg_label_from_path, read_manifest, write_manifest, ImageRecord, ObjectRecord};

use crate::colorspace::{ciede2000, delta_chroma, hue_diff_deg, HueDiff, Lab};
use crate::corpus::{PromptSpec, Task};
use crate::dominant::{dominant_color_with, DominantColor, DominantOptions};
use crate::masks::{extract_pixels, refine_mask, Mask, MaskBundle, RefineParams, DEFAULT_SAMPLE_CAP};
use crate::taxonomy::{candidate_set, ColorSpec};
use crate::{Error, Result};
use image::RgbImage;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub jnd_delta_chroma: f64,
    pub jnd_ciede2000: f64,
    pub jnd_hue_deg: f64,
    pub chroma_gate: f64,
    pub k_neighbors: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { jnd_delta_chroma: 5.0, jnd_ciede2000: 5.0, jnd_hue_deg: 5.0, chroma_gate: 5.0, k_neighbors: 3 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let all = [self.jnd_delta_chroma, self.jnd_ciede2000, self.jnd_hue_deg, self.chroma_gate];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(format!("thresholds must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    ObjectAbsent,
    MaskInvalid,
    MetricFail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    /// Minimum over the candidate set. `None` if never computed.
    pub distance: Option<f64>,
    pub pass: bool,
}

impl Metric {
    const SKIPPED: Metric = Metric { distance: None, pass: false };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub object: String,
    pub delta_chroma: Metric,
    pub ciede2000: Metric,
    pub hue: Metric,
    pub hue_gated: bool,
    pub correct: bool,
    pub failure_reason: Option<FailureReason>,
    pub dominant: Option<DominantColor>,
}

impl MetricReport {
    fn failed(object: &str, reason: FailureReason) -> Self {
        MetricReport {
            object: object.to_string(),
            delta_chroma: Metric::SKIPPED,
            ciede2000: Metric::SKIPPED,
            hue: Metric::SKIPPED,
            hue_gated: false,
            correct: false,
            failure_reason: Some(reason),
            dominant: None,
        }
    }
}

/// Compares a dominant color against the spec's candidate set.
///
/// Each metric takes its own minimum over the candidates. A hue comparison
/// where either side is below the chroma gate counts as a pass.
pub fn evaluate_target(dom: &DominantColor, spec: &ColorSpec, th: &Thresholds) -> Result<MetricReport> {
    let cands = candidate_set(spec, th.k_neighbors)?;
    Ok(evaluate_against(dom, &cands, th))
}

fn evaluate_against(dom: &DominantColor, cands: &[Lab], th: &Thresholds) -> MetricReport {
    let x = dom.lab;
    let min = |f: &dyn Fn(Lab) -> f64| cands.iter().map(|c| f(*c)).fold(f64::INFINITY, f64::min);
    let dc = min(&|c| delta_chroma(x, c));
    let de = min(&|c| ciede2000(x, c));
    let mut hue_gated = false;
    let mut dh = f64::INFINITY;
    for c in cands {
        match hue_diff_deg(x, *c, th.chroma_gate) {
            HueDiff::Gated => hue_gated = true,
            HueDiff::Degrees(d) => dh = dh.min(d),
        }
    }
    let delta_chroma = Metric { distance: Some(dc), pass: dc < th.jnd_delta_chroma };
    let ciede2000 = Metric { distance: Some(de), pass: de < th.jnd_ciede2000 };
    let hue = Metric { distance: dh.is_finite().then_some(dh), pass: hue_gated || dh < th.jnd_hue_deg };
    let correct = delta_chroma.pass && ciede2000.pass && hue.pass;
    MetricReport {
        object: String::new(),
        delta_chroma,
        ciede2000,
        hue,
        hue_gated,
        correct,
        failure_reason: (!correct).then_some(FailureReason::MetricFail),
        dominant: Some(*dom),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsentPolicy {
    /// Missing objects make the image incorrect.
    #[default]
    Penalize,
    /// Images with a missing object are left out of the prompt score.
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcaMode {
    /// Both objects must show the explicit color.
    #[default]
    BothObjects,
    /// Only the referenced (second) object is checked.
    ReferencedOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringOptions {
    pub thresholds: Thresholds,
    pub refine: RefineParams,
    pub dominant: DominantOptions,
    pub sample_cap: usize,
    pub seed: u64,
    pub absent_policy: AbsentPolicy,
    pub ica_mode: IcaMode,
    pub images_per_prompt: usize,
}

impl Default for ScoringOptions {
    fn default() -> Self {
        ScoringOptions {
            thresholds: Thresholds::default(),
            refine: RefineParams::default(),
            dominant: DominantOptions::default(),
            sample_cap: DEFAULT_SAMPLE_CAP,
            seed: 0,
            absent_policy: AbsentPolicy::Penalize,
            ica_mode: IcaMode::BothObjects,
            images_per_prompt: 4,
        }
    }
}

/// One line of the result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageResult {
    pub prompt_id: String,
    pub image_index: u32,
    pub correct: bool,
    /// Left out of the prompt score (absent object under [`AbsentPolicy::Exclude`]).
    #[serde(default)]
    pub excluded: bool,
    pub reports: Vec<MetricReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_tag: Option<String>,
}

impl ImageResult {
    pub fn key(&self) -> (String, u32) {
        (self.prompt_id.clone(), self.image_index)
    }
}

/// Reads a result file written by the evaluate command.
pub fn read_results(path: &Path) -> Result<Vec<ImageResult>> {
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse { path: path.into(), line: i + 1, msg: e.to_string() })
        })
        .collect()
}

/// Per-object input for an already-loaded image.
#[derive(Debug, Clone)]
pub struct ObjectInput {
    pub present: bool,
    /// `None` when segmentation produced nothing usable.
    pub masks: Option<MaskBundle>,
}

fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in *part {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Sampling seed for one object of one image; stable across runs and platforms.
pub fn pair_seed(base: u64, prompt_id: &str, image_index: u32, object_index: usize) -> u64 {
    base ^ fnv1a(&[prompt_id.as_bytes(), &image_index.to_le_bytes(), &(object_index as u64).to_le_bytes()])
}

/// Object indices scored for this prompt and the color each one must match.
fn scored_pairs<'a>(prompt: &'a PromptSpec, opts: &ScoringOptions) -> Vec<(usize, &'a ColorSpec)> {
    let pairs = prompt.pairs();
    let skip = usize::from(prompt.task == Task::Ica && opts.ica_mode == IcaMode::ReferencedOnly);
    pairs.iter().enumerate().skip(skip).map(|(i, (_, c))| (i, *c)).collect()
}

fn finish(prompt: &PromptSpec, image_index: u32, reports: Vec<MetricReport>, excluded: bool) -> ImageResult {
    ImageResult {
        prompt_id: prompt.id.clone(),
        image_index,
        correct: !excluded && !reports.is_empty() && reports.iter().all(|r| r.correct),
        excluded,
        reports,
        model_tag: None,
    }
}

fn absent(prompt: &PromptSpec, image_index: u32, present: &[bool], opts: &ScoringOptions) -> Option<ImageResult> {
    if present.iter().all(|p| *p) {
        return None;
    }
    let reports = prompt
        .objects
        .iter()
        .zip(present)
        .filter(|(_, p)| !**p)
        .map(|(o, _)| MetricReport::failed(o, FailureReason::ObjectAbsent))
        .collect();
    Some(finish(prompt, image_index, reports, opts.absent_policy == AbsentPolicy::Exclude))
}

fn score_object(
    prompt: &PromptSpec,
    image_index: u32,
    object_index: usize,
    image: &RgbImage,
    masks: Option<&MaskBundle>,
    spec: &ColorSpec,
    opts: &ScoringOptions,
) -> Result<MetricReport> {
    let object = &prompt.objects[object_index];
    let invalid = || MetricReport::failed(object, FailureReason::MaskInvalid);
    let Some(bundle) = masks else { return Ok(invalid()) };
    if bundle.positive.dimensions() != image.dimensions() {
        log::warn!("{} image {image_index}: mask for `{object}` does not match image size", prompt.id);
        return Ok(invalid());
    }
    let refined = match refine_mask(bundle, &opts.refine) {
        Ok(r) if r.valid => r,
        _ => return Ok(invalid()),
    };
    let seed = pair_seed(opts.seed, &prompt.id, image_index, object_index);
    let pixels = extract_pixels(image, &refined.mask, opts.sample_cap, seed)?;
    let mut dom = dominant_color_with(&pixels.samples, &opts.dominant)?;
    dom.pixel_count = pixels.source_count;
    let cands = candidate_set(spec, opts.thresholds.k_neighbors)?;
    let mut rep = evaluate_against(&dom, &cands, &opts.thresholds);
    rep.object = object.clone();
    Ok(rep)
}

/// Scores an image held in memory. `objects` is parallel to `prompt.objects`.
pub fn evaluate_loaded(
    prompt: &PromptSpec,
    image_index: u32,
    image: &RgbImage,
    objects: &[ObjectInput],
    opts: &ScoringOptions,
) -> Result<ImageResult> {
    if objects.len() != prompt.objects.len() {
        return Err(Error::Mismatch {
            what: format!("{} objects given for a {}-object prompt", objects.len(), prompt.objects.len()),
            ids: vec![prompt.id.clone()],
        });
    }
    let present: Vec<bool> = objects.iter().map(|o| o.present).collect();
    if let Some(r) = absent(prompt, image_index, &present, opts) {
        return Ok(r);
    }
    let reports = scored_pairs(prompt, opts)
        .into_iter()
        .map(|(i, spec)| score_object(prompt, image_index, i, image, objects[i].masks.as_ref(), spec, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(prompt, image_index, reports, false))
}

fn load_mask(root: &Path, rel: &str) -> Option<Mask> {
    match Mask::load(&root.join(rel)) {
        Ok(m) => Some(m),
        Err(e) => {
            log::warn!("{e}");
            None
        }
    }
}

fn load_bundle(root: &Path, rec: &ObjectRecord) -> Option<MaskBundle> {
    let positive = load_mask(root, rec.mask_path.as_deref()?)?;
    let mut negatives = Vec::with_capacity(rec.neg_mask_paths.len());
    for p in &rec.neg_mask_paths {
        negatives.push((neg_label_from_path(p), load_mask(root, p)?));
    }
    Some(MaskBundle { positive, negatives })
}

/// Scores one manifest row, loading the image and masks under `root`.
///
/// Missing or unreadable masks yield `mask_invalid`; an unreadable image is
/// an error.
pub fn evaluate_image(rec: &ImageRecord, prompt: &PromptSpec, root: &Path, opts: &ScoringOptions) -> Result<ImageResult> {
    let names_match = rec.objects.len() == prompt.objects.len()
        && rec.objects.iter().zip(&prompt.objects).all(|(r, o)| r.name.eq_ignore_ascii_case(o));
    if rec.prompt_id != prompt.id || !names_match {
        return Err(Error::Mismatch {
            what: "manifest row does not match its prompt".into(),
            ids: vec![format!("{}#{}", rec.prompt_id, rec.image_index)],
        });
    }
    let present: Vec<bool> = rec.objects.iter().map(|o| o.present).collect();
    if let Some(r) = absent(prompt, rec.image_index, &present, opts) {
        return Ok(r);
    }
    let path = root.join(&rec.image_path);
    let image = image::open(&path).map_err(|source| Error::Image { path, source })?.to_rgb8();
    let objects: Vec<ObjectInput> =
        rec.objects.iter().map(|o| ObjectInput { present: o.present, masks: load_bundle(root, o) }).collect();
    evaluate_loaded(prompt, rec.image_index, &image, &objects, opts)
}

/// Mean of image-level correctness over the non-excluded images.
///
/// Warns when fewer than `images_per_prompt` images were scored. `None` when
/// nothing is left to average.
pub fn score_prompt(results: &[ImageResult], images_per_prompt: usize) -> Option<f64> {
    let scored: Vec<&ImageResult> = results.iter().filter(|r| !r.excluded).collect();
    if results.len() < images_per_prompt {
        if let Some(r) = results.first() {
            log::warn!("prompt {}: {} of {images_per_prompt} images evaluated", r.prompt_id, results.len());
        }
    }
    if scored.is_empty() {
        return None;
    }
    Some(scored.iter().filter(|r| r.correct).count() as f64 / scored.len() as f64)
}
