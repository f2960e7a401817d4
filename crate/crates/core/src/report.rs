//! Corpus-level aggregation, analysis slices and CSV/JSON export.
//!
//! Scores are percentages: the mean over prompts of the per-prompt image
//! accuracy, times 100. A slice with no scored prompts is `null`.

use crate::corpus::{find_object, Category, PromptSpec, PromptSystem, Task};
use crate::scoring::{score_prompt, ImageResult};
use crate::taxonomy::{classify_nearest, system, Group, SystemId};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slice {
    Tasks,
    Categories,
    Systems,
    Basic,
    Modifiers,
    Bias,
}

impl Slice {
    pub const ALL: [Slice; 6] = [Slice::Tasks, Slice::Categories, Slice::Systems, Slice::Basic, Slice::Modifiers, Slice::Bias];

    pub fn as_str(self) -> &'static str {
        match self {
            Slice::Tasks => "tasks",
            Slice::Categories => "categories",
            Slice::Systems => "systems",
            Slice::Basic => "basic",
            Slice::Modifiers => "modifiers",
            Slice::Bias => "bias",
        }
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Slice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Slice::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown slice `{s}`")))
    }
}

/// One score cell with its denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRow {
    pub slice: Slice,
    pub key: String,
    pub score: Option<f64>,
    /// Prompts averaged into `score`.
    pub prompts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasEntry {
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryBias {
    /// Dominant colors classified in this category.
    pub classified: usize,
    /// At most ten names, most frequent first.
    pub top: Vec<BiasEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub model: String,
    pub rows: Vec<SliceRow>,
    /// Per object category, the most frequent nearest L2 names of the
    /// measured dominant colors.
    pub bias: BTreeMap<Category, CategoryBias>,
}

pub const AVG_KEY: &str = "Avg";

impl AggregateReport {
    pub fn empty(model: &str) -> Self {
        AggregateReport { model: model.to_string(), rows: Vec::new(), bias: BTreeMap::new() }
    }

    pub fn slice(&self, slice: Slice) -> impl Iterator<Item = &SliceRow> {
        self.rows.iter().filter(move |r| r.slice == slice)
    }

    pub fn get(&self, slice: Slice, key: &str) -> Option<&SliceRow> {
        self.rows.iter().find(|r| r.slice == slice && r.key == key)
    }

    pub fn task_score(&self, task: Task) -> Option<f64> {
        self.get(Slice::Tasks, task.as_str()).and_then(|r| r.score)
    }

    pub fn avg(&self) -> Option<f64> {
        self.get(Slice::Tasks, AVG_KEY).and_then(|r| r.score)
    }
}

/// Unweighted mean of the five task scores; `None` unless all are present.
pub fn overall_average(task_scores: &[Option<f64>]) -> Option<f64> {
    if task_scores.len() != Task::ALL.len() {
        return None;
    }
    let vals: Option<Vec<f64>> = task_scores.iter().copied().collect();
    vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

#[derive(Default)]
struct Acc {
    sum: f64,
    n: usize,
}

impl Acc {
    fn add(&mut self, v: f64) {
        self.sum += v;
        self.n += 1;
    }

    fn row(&self, slice: Slice, key: impl Into<String>) -> SliceRow {
        SliceRow {
            slice,
            key: key.into(),
            score: (self.n > 0).then(|| 100.0 * self.sum / self.n as f64),
            prompts: self.n,
        }
    }
}

/// Joins results to the corpus and computes every slice.
pub fn aggregate(results: &[ImageResult], corpus: &[PromptSpec], model: &str, images_per_prompt: usize) -> Result<AggregateReport> {
    let by_id: HashMap<&str, &PromptSpec> = corpus.iter().map(|p| (p.id.as_str(), p)).collect();
    let mut per_prompt: BTreeMap<&str, Vec<ImageResult>> = BTreeMap::new();
    let mut orphans = Vec::new();
    for r in results {
        if by_id.contains_key(r.prompt_id.as_str()) {
            per_prompt.entry(r.prompt_id.as_str()).or_default().push(r.clone());
        } else if !orphans.contains(&r.prompt_id) {
            orphans.push(r.prompt_id.clone());
        }
    }
    if !orphans.is_empty() {
        return Err(Error::Mismatch { what: "result rows without a corpus prompt".into(), ids: orphans });
    }

    let mut tasks: BTreeMap<Task, Acc> = BTreeMap::new();
    let mut categories: BTreeMap<Category, Acc> = BTreeMap::new();
    let mut systems: BTreeMap<(Task, PromptSystem), Acc> = BTreeMap::new();
    let mut basic: BTreeMap<Group, Acc> = BTreeMap::new();
    let mut modifiers: BTreeMap<Group, Acc> = BTreeMap::new();
    for p in corpus {
        systems.entry((p.task, p.system)).or_default();
    }
    let mut dominants = Vec::new();

    for (id, imgs) in &per_prompt {
        let p = by_id[id];
        for rep in imgs.iter().flat_map(|r| &r.reports) {
            if let Some(d) = &rep.dominant {
                dominants.push((find_object(&rep.object).map_or(p.category, |o| o.category), d.lab));
            }
        }
        let Some(s) = score_prompt(imgs, images_per_prompt) else { continue };
        tasks.entry(p.task).or_default().add(s);
        systems.entry((p.task, p.system)).or_default().add(s);
        if p.task != Task::Cna {
            continue;
        }
        categories.entry(p.category).or_default().add(s);
        if let Some(group) = p.colors[0].entry().and_then(|e| e.group) {
            match p.system {
                PromptSystem::Named(SystemId::IsccL2) => basic.entry(group).or_default().add(s),
                PromptSystem::Named(SystemId::IsccL3) => modifiers.entry(group).or_default().add(s),
                _ => {}
            }
        }
    }

    let empty = Acc::default();
    let mut rows = Vec::new();
    let mut task_scores = Vec::new();
    for t in Task::ALL {
        let row = tasks.get(&t).unwrap_or(&empty).row(Slice::Tasks, t.as_str());
        task_scores.push(row.score);
        rows.push(row);
    }
    rows.push(SliceRow {
        slice: Slice::Tasks,
        key: AVG_KEY.into(),
        score: overall_average(&task_scores),
        prompts: tasks.values().map(|a| a.n).sum(),
    });
    for c in Category::ALL {
        rows.push(categories.get(&c).unwrap_or(&empty).row(Slice::Categories, c.as_str()));
    }
    for ((t, s), acc) in &systems {
        rows.push(acc.row(Slice::Systems, format!("{t}/{s}")));
    }
    for g in [Group::Basic, Group::Intermediate] {
        rows.push(basic.get(&g).unwrap_or(&empty).row(Slice::Basic, g.as_str()));
    }
    for g in [Group::Light, Group::Dark, Group::Ish, Group::Plain] {
        rows.push(modifiers.get(&g).unwrap_or(&empty).row(Slice::Modifiers, g.as_str()));
    }
    Ok(AggregateReport { model: model.to_string(), rows, bias: bias_histogram(&dominants, 10) })
}

/// `tally` maps L2 table positions to counts. Ties keep table order.
fn top_names(tally: &HashMap<usize, usize>, n: usize) -> Vec<BiasEntry> {
    let l2 = system(SystemId::IsccL2);
    let mut v: Vec<(usize, usize)> = tally.iter().map(|(&i, &c)| (i, c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.into_iter().take(n).map(|(i, count)| BiasEntry { name: l2.entries[i].name.clone(), count }).collect()
}

/// Top-`n` nearest L2 names per category for `(category, dominant Lab)` pairs.
pub fn bias_histogram(dominants: &[(Category, crate::colorspace::Lab)], n: usize) -> BTreeMap<Category, CategoryBias> {
    let l2 = system(SystemId::IsccL2);
    let mut counts: BTreeMap<Category, HashMap<usize, usize>> = BTreeMap::new();
    for (cat, lab) in dominants {
        let idx = l2.position(&classify_nearest(*lab, l2).name).expect("entry of the table");
        *counts.entry(*cat).or_default().entry(idx).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(c, t)| (c, CategoryBias { classified: t.values().sum(), top: top_names(&t, n) }))
        .collect()
}

fn fmt2(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(Error::io(path))?))
}

/// Long format, one line per slice row and bias entry:
/// `model,slice,key,score,n`. Bias rows leave `score` empty and put the
/// count in `n`.
pub fn write_long_csv<W: Write>(reports: &[AggregateReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["model", "slice", "key", "score", "n"])?;
    for r in reports {
        for row in &r.rows {
            out.write_record([&r.model, row.slice.as_str(), &row.key, &fmt2(row.score), &row.prompts.to_string()])?;
        }
        for (cat, b) in &r.bias {
            for e in &b.top {
                out.write_record([&r.model, "bias", &format!("{cat}/{}", e.name), "", &e.count.to_string()])?;
            }
        }
    }
    out.flush().map_err(Error::io("<csv>"))
}

/// One row per model, one column per key of `slice`.
pub fn write_wide_csv<W: Write>(reports: &[AggregateReport], slice: Slice, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if slice == Slice::Bias {
        out.write_record(["model", "category", "rank", "name", "count"])?;
        for r in reports {
            for (cat, b) in &r.bias {
                for (i, e) in b.top.iter().enumerate() {
                    out.write_record([&r.model, cat.as_str(), &(i + 1).to_string(), &e.name, &e.count.to_string()])?;
                }
            }
        }
        return out.flush().map_err(Error::io("<csv>"));
    }
    let mut keys: Vec<&str> = Vec::new();
    for r in reports {
        for row in r.slice(slice) {
            if !keys.contains(&row.key.as_str()) {
                keys.push(&row.key);
            }
        }
    }
    let mut header = vec!["model"];
    header.extend(&keys);
    out.write_record(&header)?;
    for r in reports {
        let mut rec = vec![r.model.clone()];
        rec.extend(keys.iter().map(|k| fmt2(r.get(slice, k).and_then(|x| x.score))));
        out.write_record(&rec)?;
    }
    out.flush().map_err(Error::io("<csv>"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Writes `reports` to `path`. JSON keeps full float precision.
pub fn export(reports: &[AggregateReport], format: Format, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    match format {
        Format::Csv => write_long_csv(reports, &mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, reports)?;
            w.write_all(b"\n").map_err(Error::io(path))?;
        }
    }
    w.flush().map_err(Error::io(path))
}

pub fn export_slice(reports: &[AggregateReport], slice: Slice, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    write_wide_csv(reports, slice, &mut w)?;
    w.flush().map_err(Error::io(path))
}
