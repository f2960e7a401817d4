use super::catalog::{catalog, render, templates, ObjectEntry, Template};
use super::{Category, PromptSpec, PromptSystem, Task};
use crate::taxonomy::{system, ColorSpec, SpecKind, SystemId};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskConfig {
    pub quota: usize,
    pub systems: Vec<PromptSystem>,
    /// Template ids or inclusive `FIRST..LAST` ranges.
    pub templates: Vec<String>,
    /// Table numeric prompts take their values from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric_source: Option<SystemId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub seed: u64,
    pub mini_budget: usize,
    /// Restrict objects to these categories.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<Category>>,
    pub tasks: BTreeMap<Task, TaskConfig>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self::from_toml(include_str!("../../data/corpus_default.toml")).expect("embedded default config")
    }
}

impl CorpusConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: CorpusConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn total_quota(&self) -> usize {
        self.tasks.values().map(|t| t.quota).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for (task, tc) in &self.tasks {
            let bad = |msg: String| Err(Error::Config(format!("task {task}: {msg}")));
            if tc.quota == 0 {
                return bad("quota must be positive".into());
            }
            if tc.systems.is_empty() {
                return bad("no color systems".into());
            }
            for t in resolve_templates(&tc.templates)? {
                if t.task() != *task {
                    return bad(format!("template {} belongs to {}", t.id, t.task()));
                }
            }
            let numeric = *task == Task::Ncu;
            if tc.systems.iter().any(|s| matches!(s, PromptSystem::Named(_)) == numeric) {
                return bad("numeric systems are only valid for NCU".into());
            }
        }
        Ok(())
    }

    fn allows(&self, category: Category) -> bool {
        self.categories.as_ref().is_none_or(|c| c.contains(&category))
    }
}

fn resolve_templates(specs: &[String]) -> Result<Vec<&'static Template>> {
    let all = templates();
    let pos = |id: &str| {
        all.iter()
            .position(|t| t.id == id)
            .ok_or_else(|| Error::Config(format!("unknown template `{id}`")))
    };
    let mut out = Vec::new();
    for spec in specs {
        match spec.split_once("..") {
            Some((a, b)) => {
                let (i, j) = (pos(a.trim())?, pos(b.trim())?);
                if i > j {
                    return Err(Error::Config(format!("empty template range `{spec}`")));
                }
                out.extend(&all[i..=j]);
            }
            None => out.push(&all[pos(spec.trim())?]),
        }
    }
    Ok(out)
}

struct Draft {
    system: PromptSystem,
    template: &'static Template,
    object: Option<&'static ObjectEntry>,
    colors: Vec<ColorSpec>,
    text: String,
}

impl Draft {
    fn category(&self) -> Category {
        match self.object {
            Some(o) => o.category,
            None => super::find_object(&self.template.objects[0]).map_or(Category::ToolsAndMiscellaneous, |o| o.category),
        }
    }
}

fn palette(sys: PromptSystem, numeric_source: Option<SystemId>) -> Vec<ColorSpec> {
    match sys {
        PromptSystem::Named(id) => system(id).entries.iter().map(ColorSpec::named).collect(),
        numeric => {
            let src = numeric_source.unwrap_or(SystemId::Css3X11);
            let kind = if numeric == PromptSystem::NumericHex { SpecKind::Hex } else { SpecKind::RgbTriplet };
            system(src).entries.iter().map(|e| ColorSpec::numeric(kind, e.rgb, Some(src))).collect()
        }
    }
}

fn template_pool(cfg: &CorpusConfig, tc: &TaskConfig, sys: PromptSystem) -> Result<Vec<&'static Template>> {
    Ok(resolve_templates(&tc.templates)?
        .into_iter()
        .filter(|t| t.kind == sys.template_kind())
        .filter(|t| {
            t.objects.is_empty()
                || super::find_object(&t.objects[0]).is_some_and(|o| cfg.allows(o.category))
        })
        .collect())
}

/// Every distinct single-color prompt of one system, skipping texts in `seen`.
fn enumerate(
    cfg: &CorpusConfig,
    tc: &TaskConfig,
    sys: PromptSystem,
    seen: &mut HashSet<String>,
) -> Result<Vec<Draft>> {
    let colors = palette(sys, tc.numeric_source);
    let objects: Vec<&ObjectEntry> = catalog().iter().filter(|o| cfg.allows(o.category)).collect();
    let mut out = Vec::new();
    for t in template_pool(cfg, tc, sys)? {
        let slots: Vec<Option<&ObjectEntry>> =
            if t.objects.is_empty() { objects.iter().map(|o| Some(*o)).collect() } else { vec![None] };
        for object in slots {
            for c in &colors {
                let text = render(t, object.map(|o| o.name.as_str()), std::slice::from_ref(c));
                if seen.insert(text.clone()) {
                    out.push(Draft { system: sys, template: t, object, colors: vec![c.clone()], text });
                }
            }
        }
    }
    Ok(out)
}

fn permutations(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n.saturating_sub(i)))
}

/// Splits `total` as evenly as possible over bins of the given capacities.
/// Earlier bins take the remainder. `None` when the capacities are too small.
pub fn water_fill(total: usize, caps: &[usize]) -> Option<Vec<usize>> {
    if caps.iter().sum::<usize>() < total {
        return None;
    }
    let mut alloc = vec![0; caps.len()];
    let mut remaining = total;
    let mut open: Vec<usize> = (0..caps.len()).filter(|&i| caps[i] > 0).collect();
    while remaining > 0 {
        let (share, extra) = (remaining / open.len(), remaining % open.len());
        let target = |rank: usize| share + usize::from(rank < extra);
        let full: Vec<usize> = open
            .iter()
            .enumerate()
            .filter(|&(rank, &i)| caps[i] - alloc[i] <= target(rank))
            .map(|(_, &i)| i)
            .collect();
        if full.is_empty() {
            for (rank, &i) in open.iter().enumerate() {
                alloc[i] += target(rank);
            }
            break;
        }
        for &i in &full {
            remaining -= caps[i] - alloc[i];
            alloc[i] = caps[i];
        }
        open.retain(|i| !full.contains(i));
    }
    Some(alloc)
}

fn quota_error(task: Task, quota: usize, caps: &[usize]) -> Error {
    Error::Quota {
        task: task.to_string(),
        msg: format!("{quota} requested but at most {} distinct prompts exist", caps.iter().sum::<usize>()),
    }
}

fn task_drafts(cfg: &CorpusConfig, task: Task, tc: &TaskConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Draft>> {
    let mut seen = HashSet::new();
    if task == Task::Mcc {
        return sample_multi(cfg, task, tc, rng, &mut seen);
    }
    let mut pools = Vec::new();
    for &sys in &tc.systems {
        pools.push(enumerate(cfg, tc, sys, &mut seen)?);
    }
    let caps: Vec<usize> = pools.iter().map(Vec::len).collect();
    let alloc = water_fill(tc.quota, &caps).ok_or_else(|| quota_error(task, tc.quota, &caps))?;
    let mut out = Vec::with_capacity(tc.quota);
    for (mut pool, n) in pools.into_iter().zip(alloc) {
        pool.shuffle(rng);
        pool.truncate(n);
        out.append(&mut pool);
    }
    Ok(out)
}

/// Multi-slot prompts: too many combinations to enumerate, so sample
/// distinct color tuples until the quota is met.
fn sample_multi(
    cfg: &CorpusConfig,
    task: Task,
    tc: &TaskConfig,
    rng: &mut ChaCha8Rng,
    seen: &mut HashSet<String>,
) -> Result<Vec<Draft>> {
    let mut plans = Vec::new();
    for &sys in &tc.systems {
        let colors = palette(sys, tc.numeric_source);
        let pool = template_pool(cfg, tc, sys)?;
        let cap = pool
            .iter()
            .map(|t| permutations(colors.len(), t.color_slots()))
            .fold(0usize, usize::saturating_add);
        plans.push((colors, pool, cap));
    }
    let caps: Vec<usize> = plans.iter().map(|p| p.2).collect();
    let alloc = water_fill(tc.quota, &caps).ok_or_else(|| quota_error(task, tc.quota, &caps))?;
    let mut out = Vec::with_capacity(tc.quota);
    for (((colors, pool, _), n), &sys) in plans.into_iter().zip(alloc).zip(&tc.systems) {
        let max_attempts = 100 * n + 10_000;
        let mut got = 0;
        for _ in 0..max_attempts {
            if got == n {
                break;
            }
            let t = pool[rng.random_range(0..pool.len())];
            let pick = rand::seq::index::sample(rng, colors.len(), t.color_slots());
            let chosen: Vec<ColorSpec> = pick.iter().map(|i| colors[i].clone()).collect();
            let text = render(t, None, &chosen);
            if seen.insert(text.clone()) {
                out.push(Draft { system: sys, template: t, object: None, colors: chosen, text });
                got += 1;
            }
        }
        if got < n {
            return Err(Error::Quota {
                task: task.to_string(),
                msg: format!("only {got} of {n} distinct prompts found by sampling"),
            });
        }
    }
    Ok(out)
}

fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds the full corpus. Output is a pure function of the config.
pub fn generate_corpus(cfg: &CorpusConfig) -> Result<Vec<PromptSpec>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.total_quota());
    for (&task, tc) in &cfg.tasks {
        let mut rng = task_rng(cfg.seed, task as u64 + 1);
        let mut drafts = task_drafts(cfg, task, tc, &mut rng)?;
        drafts.shuffle(&mut rng);
        for (i, d) in drafts.into_iter().enumerate() {
            let objects = match d.object {
                Some(o) => vec![o.name.clone()],
                None => d.template.objects.clone(),
            };
            out.push(PromptSpec {
                id: format!("{task}-{:06}", i + 1),
                task,
                level: d.template.level,
                template_id: d.template.id.clone(),
                category: d.category(),
                system: d.system,
                objects,
                colors: d.colors,
                text: d.text,
            });
        }
    }
    Ok(out)
}

/// Stratified sample over (task, category, system), every non-empty stratum
/// kept, counts proportional to stratum size. Output keeps corpus order.
pub fn stratified_subset(prompts: &[PromptSpec], budget: usize, seed: u64) -> Result<Vec<PromptSpec>> {
    let mut strata: BTreeMap<(Task, Category, PromptSystem), Vec<usize>> = BTreeMap::new();
    for (i, p) in prompts.iter().enumerate() {
        strata.entry((p.task, p.category, p.system)).or_default().push(i);
    }
    if budget == 0 {
        return Err(Error::MiniBudget("budget must be positive".into()));
    }
    if budget < strata.len() {
        return Err(Error::MiniBudget(format!("{budget} is smaller than the {} non-empty strata", strata.len())));
    }
    if budget > prompts.len() {
        return Err(Error::MiniBudget(format!("{budget} exceeds the corpus size {}", prompts.len())));
    }
    let n = prompts.len() as f64;
    let ideal: Vec<f64> = strata.values().map(|m| budget as f64 * m.len() as f64 / n).collect();
    let sizes: Vec<usize> = strata.values().map(Vec::len).collect();
    let mut alloc: Vec<usize> = ideal.iter().zip(&sizes).map(|(x, &s)| (x.floor() as usize).clamp(1, s)).collect();
    let mut order: Vec<usize> = (0..alloc.len()).collect();
    loop {
        let total: usize = alloc.iter().sum();
        if total == budget {
            break;
        }
        if total < budget {
            // largest shortfall first, ties by stratum order
            order.sort_by(|&i, &j| (ideal[j] - alloc[j] as f64).total_cmp(&(ideal[i] - alloc[i] as f64)).then(i.cmp(&j)));
            let i = *order.iter().find(|&&i| alloc[i] < sizes[i]).expect("budget within corpus size");
            alloc[i] += 1;
        } else {
            order.sort_by(|&i, &j| (alloc[j] as f64 - ideal[j]).total_cmp(&(alloc[i] as f64 - ideal[i])).then(i.cmp(&j)));
            let i = *order.iter().find(|&&i| alloc[i] > 1).expect("budget covers every stratum");
            alloc[i] -= 1;
        }
    }
    let mut rng = task_rng(seed, 0x4d49_4e49);
    let mut keep = Vec::with_capacity(budget);
    for (members, k) in strata.values().zip(alloc) {
        keep.extend(rand::seq::index::sample(&mut rng, members.len(), k).iter().map(|j| members[j]));
    }
    keep.sort_unstable();
    Ok(keep.into_iter().map(|i| prompts[i].clone()).collect())
}

pub fn generate_mini(cfg: &CorpusConfig) -> Result<Vec<PromptSpec>> {
    stratified_subset(&generate_corpus(cfg)?, cfg.mini_budget, cfg.seed)
}
