//! `colorbench` command line: `gen-prompts`, `evaluate`, `report`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use crate::corpus::{generate_corpus, generate_mini, read_corpus, write_corpus, CorpusConfig, PromptSpec, Task};
use crate::report::{aggregate, export, export_slice, write_wide_csv, AggregateReport, Format, Slice};
use crate::scoring::{
    evaluate_image, read_manifest, AbsentPolicy, IcaMode, ImageRecord, ImageResult, ScoringOptions, Thresholds,
};
use crate::{Error, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::ffi::OsString;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

const CHUNK: usize = 256;

#[derive(Debug, Parser)]
#[command(name = "colorbench", version, about = "Color-fidelity benchmark for text-to-image models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the prompt corpus as JSONL.
    GenPrompts(GenArgs),
    /// Score generated images listed in a manifest.
    Evaluate(EvalArgs),
    /// Aggregate result files into report tables.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("size").required(true).args(["full", "mini"])))]
pub struct GenArgs {
    /// Emit the full corpus.
    #[arg(long)]
    pub full: bool,
    /// Emit a stratified subset of this many prompts.
    #[arg(long, value_name = "N")]
    pub mini: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Corpus config (TOML). Defaults to the built-in config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Root that manifest image and mask paths are relative to.
    #[arg(long)]
    pub images: PathBuf,
    /// Result file (JSONL). Existing rows are kept and skipped.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 5.0)]
    pub jnd_chroma: f64,
    #[arg(long, default_value_t = 5.0)]
    pub jnd_de2000: f64,
    #[arg(long, default_value_t = 5.0)]
    pub jnd_hue: f64,
    #[arg(long, default_value_t = 5.0)]
    pub chroma_gate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub model_tag: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub images_per_prompt: usize,
    /// Leave images with a missing object out of the score instead of counting them wrong.
    #[arg(long)]
    pub exclude_absent: bool,
    /// For ICA prompts check only the referenced object.
    #[arg(long)]
    pub ica_referenced_only: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Result files, one per model.
    #[arg(long, required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Print these slices to stdout.
    #[arg(long, value_parser = parse_slice)]
    pub slice: Vec<Slice>,
    /// Model name when the result rows carry none. Applies to every file.
    #[arg(long)]
    pub model_tag: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub images_per_prompt: usize,
}

fn parse_slice(s: &str) -> std::result::Result<Slice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (including the program name) and runs. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::MiniBudget(_) | Error::UnknownSystem(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenPrompts(a) => cmd_gen_prompts(&a),
        Command::Evaluate(a) => cmd_evaluate(&a).map(|_| ()),
        Command::Report(a) => cmd_report(&a).map(|_| ()),
    }
}

fn require_file(p: &Path, what: &str) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} `{}` is not a file", p.display())))
    }
}

fn require_parent(p: &Path) -> Result<()> {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() && !d.is_dir() => {
            Err(Error::Config(format!("directory `{}` does not exist", d.display())))
        }
        _ => Ok(()),
    }
}

pub fn cmd_gen_prompts(a: &GenArgs) -> Result<()> {
    require_parent(&a.out)?;
    let mut cfg = match &a.config {
        Some(p) => CorpusConfig::from_toml(&std::fs::read_to_string(p).map_err(Error::io(p))?)?,
        None => CorpusConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let prompts = match a.mini {
        Some(n) => {
            cfg.mini_budget = n;
            generate_mini(&cfg)?
        }
        None => generate_corpus(&cfg)?,
    };
    write_corpus(&prompts, &a.out)?;
    let mut per_task: BTreeMap<Task, usize> = BTreeMap::new();
    for p in &prompts {
        *per_task.entry(p.task).or_default() += 1;
    }
    println!("wrote {} prompts to {}", prompts.len(), a.out.display());
    for (t, n) in per_task {
        println!("  {t}: {n}");
    }
    Ok(())
}

/// Outcome of an evaluate run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalSummary {
    pub already_done: usize,
    pub evaluated: usize,
    pub correct: usize,
}

impl EvalArgs {
    pub fn scoring_options(&self) -> Result<ScoringOptions> {
        let thresholds = Thresholds {
            jnd_delta_chroma: self.jnd_chroma,
            jnd_ciede2000: self.jnd_de2000,
            jnd_hue_deg: self.jnd_hue,
            chroma_gate: self.chroma_gate,
            k_neighbors: self.k,
        };
        thresholds.validate()?;
        if self.images_per_prompt == 0 {
            return Err(Error::Config("--images-per-prompt must be positive".into()));
        }
        Ok(ScoringOptions {
            thresholds,
            seed: self.seed,
            images_per_prompt: self.images_per_prompt,
            absent_policy: if self.exclude_absent { AbsentPolicy::Exclude } else { AbsentPolicy::Penalize },
            ica_mode: if self.ica_referenced_only { IcaMode::ReferencedOnly } else { IcaMode::BothObjects },
            ..ScoringOptions::default()
        })
    }
}

/// Manifest rows that do not fit the corpus, as `prompt_id#image_index`.
fn manifest_mismatches(records: &[ImageRecord], by_id: &HashMap<&str, &PromptSpec>, per_prompt: usize) -> Vec<String> {
    let mut bad = Vec::new();
    let mut seen = HashSet::new();
    for r in records {
        let ok = seen.insert(r.key())
            && (r.image_index as usize) < per_prompt
            && by_id.get(r.prompt_id.as_str()).is_some_and(|p| {
                p.objects.len() == r.objects.len()
                    && p.objects.iter().zip(&r.objects).all(|(o, ro)| o.eq_ignore_ascii_case(&ro.name))
            });
        if !ok {
            bad.push(format!("{}#{}", r.prompt_id, r.image_index));
        }
    }
    bad
}

/// Reads the finished rows of an existing result file. A trailing partial
/// line (an interrupted write) is cut off.
fn load_existing(path: &Path) -> Result<Vec<ImageResult>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
    let mut done = Vec::new();
    let mut good_len = 0;
    let mut offset = 0;
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    for (i, line) in lines.iter().enumerate() {
        offset += line.len();
        let complete = line.ends_with('\n');
        if line.trim().is_empty() {
            good_len = offset;
            continue;
        }
        match serde_json::from_str::<ImageResult>(line) {
            Ok(r) if complete => {
                done.push(r);
                good_len = offset;
            }
            _ if i + 1 == lines.len() => {
                log::warn!("{}: dropping incomplete last line", path.display());
            }
            Err(e) => return Err(Error::Parse { path: path.into(), line: i + 1, msg: e.to_string() }),
            Ok(_) => unreachable!("only the last line can lack a newline"),
        }
    }
    if good_len < text.len() {
        let f = OpenOptions::new().write(true).open(path).map_err(Error::io(path))?;
        f.set_len(good_len as u64).map_err(Error::io(path))?;
    }
    Ok(done)
}

fn write_results(path: &Path, rows: &[ImageResult], append: bool) -> Result<()> {
    let f = OpenOptions::new()
        .create(true)
        .append(append)
        .write(true)
        .truncate(!append)
        .open(path)
        .map_err(Error::io(path))?;
    let mut w = BufWriter::new(f);
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(Error::io(path))?;
    }
    w.flush().map_err(Error::io(path))
}

pub fn cmd_evaluate(a: &EvalArgs) -> Result<EvalSummary> {
    let opts = a.scoring_options()?;
    require_file(&a.corpus, "corpus")?;
    require_file(&a.manifest, "manifest")?;
    if !a.images.is_dir() {
        return Err(Error::Config(format!("images root `{}` is not a directory", a.images.display())));
    }
    require_parent(&a.out)?;
    if a.jobs == Some(0) {
        return Err(Error::Config("--jobs must be positive".into()));
    }

    let corpus = read_corpus(&a.corpus)?;
    let by_id: HashMap<&str, &PromptSpec> = corpus.iter().map(|p| (p.id.as_str(), p)).collect();
    let mut records = read_manifest(&a.manifest)?;
    let bad = manifest_mismatches(&records, &by_id, opts.images_per_prompt);
    if !bad.is_empty() {
        return Err(Error::Mismatch { what: "manifest rows that do not match the corpus".into(), ids: bad });
    }
    records.sort_by_key(ImageRecord::key);

    let existing = load_existing(&a.out)?;
    let done: HashSet<(String, u32)> = existing.iter().map(ImageResult::key).collect();
    let todo: Vec<&ImageRecord> = records.iter().filter(|r| !done.contains(&r.key())).collect();
    let mut summary = EvalSummary { already_done: done.len(), evaluated: 0, correct: 0 };
    if todo.is_empty() {
        println!("{}: all {} images already evaluated", a.out.display(), done.len());
        return Ok(summary);
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = a.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    if !a.out.exists() {
        File::create(&a.out).map_err(Error::io(&a.out))?;
    }
    let mut last_key = existing.iter().map(ImageResult::key).max();
    let mut in_order = existing.windows(2).all(|w| w[0].key() < w[1].key());
    for chunk in todo.chunks(CHUNK) {
        let rows: Vec<ImageResult> = pool.install(|| {
            chunk
                .par_iter()
                .map(|rec| {
                    let mut r = evaluate_image(rec, by_id[rec.prompt_id.as_str()], &a.images, &opts)?;
                    r.model_tag = a.model_tag.clone();
                    Ok(r)
                })
                .collect::<Result<_>>()
        })?;
        if let (Some(last), Some(first)) = (&last_key, rows.first()) {
            in_order &= *last < first.key();
        }
        last_key = rows.last().map(ImageResult::key);
        summary.evaluated += rows.len();
        summary.correct += rows.iter().filter(|r| r.correct).count();
        write_results(&a.out, &rows, true)?;
    }
    if !in_order {
        // resumed with rows that sort before earlier output
        let mut all = load_existing(&a.out)?;
        all.sort_by_key(ImageResult::key);
        write_results(&a.out, &all, false)?;
    }
    println!(
        "{}: evaluated {} images ({} correct), {} already present",
        a.out.display(),
        summary.evaluated,
        summary.correct,
        summary.already_done
    );
    Ok(summary)
}

fn model_name(rows: &[ImageResult], flag: Option<&str>, path: &Path) -> String {
    flag.map(str::to_string)
        .or_else(|| rows.iter().find_map(|r| r.model_tag.clone()))
        .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
}

pub fn cmd_report(a: &ReportArgs) -> Result<Vec<AggregateReport>> {
    require_file(&a.corpus, "corpus")?;
    for r in &a.results {
        require_file(r, "results")?;
    }
    if !a.out.is_dir() {
        std::fs::create_dir_all(&a.out).map_err(Error::io(&a.out))?;
    }
    let corpus = read_corpus(&a.corpus)?;
    let mut reports = Vec::new();
    for path in &a.results {
        let rows = crate::scoring::read_results(path)?;
        let model = model_name(&rows, a.model_tag.as_deref(), path);
        reports.push(aggregate(&rows, &corpus, &model, a.images_per_prompt)?);
    }
    export(&reports, Format::Csv, &a.out.join("report.csv"))?;
    export(&reports, Format::Json, &a.out.join("report.json"))?;
    for s in Slice::ALL {
        export_slice(&reports, s, &a.out.join(format!("{s}.csv")))?;
    }
    let bias: BTreeMap<_, _> = reports.iter().map(|r| (&r.model, &r.bias)).collect();
    let bias_json = serde_json::to_string_pretty(&bias)?;
    let bias_path = a.out.join("bias.json");
    std::fs::write(&bias_path, format!("{bias_json}\n")).map_err(Error::io(&bias_path))?;

    let stdout = std::io::stdout();
    for s in &a.slice {
        println!("# {s}");
        if *s == Slice::Bias {
            println!("{bias_json}");
        } else {
            write_wide_csv(&reports, *s, stdout.lock())?;
        }
    }
    if a.slice.is_empty() {
        write_wide_csv(&reports, Slice::Tasks, stdout.lock())?;
    }
    Ok(reports)
}
