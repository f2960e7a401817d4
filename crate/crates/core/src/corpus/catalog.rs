use super::{Category, Task};
use crate::taxonomy::{ColorSpec, SpecKind};
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "COCO")]
    Coco,
    #[serde(rename = "ImageNet")]
    ImageNet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectEntry {
    pub source: Source,
    pub category: Category,
    pub name: String,
    pub negative_labels: Vec<String>,
}

#[derive(Deserialize)]
struct ObjectRow {
    source: Source,
    category: Category,
    name: String,
    negative_labels: String,
}

static CATALOG: LazyLock<Vec<ObjectEntry>> = LazyLock::new(|| {
    let src = include_str!("../../data/objects.csv");
    let rows: Vec<ObjectEntry> = csv::Reader::from_reader(src.as_bytes())
        .deserialize::<ObjectRow>()
        .map(|r| {
            let r = r.expect("embedded object catalog is malformed");
            ObjectEntry {
                source: r.source,
                category: r.category,
                name: r.name,
                negative_labels: r.negative_labels.split('|').map(str::to_string).collect(),
            }
        })
        .collect();
    assert_eq!(rows.len(), 108, "object catalog size");
    assert!(rows.iter().all(|o| !o.negative_labels.iter().any(String::is_empty)));
    rows
});

/// The 108 catalog objects in table order. Some names occur twice.
pub fn catalog() -> &'static [ObjectEntry] {
    &CATALOG
}

/// First catalog entry with this name, ignoring case.
pub fn find_object(name: &str) -> Option<&'static ObjectEntry> {
    CATALOG.iter().find(|o| o.name.eq_ignore_ascii_case(name.trim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    Named,
    Hex,
    Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Template {
    pub id: String,
    pub level: u8,
    pub kind: TemplateKind,
    pub text: String,
    /// Objects written into the text. Empty when the text has an `{object}` slot.
    pub objects: Vec<String>,
}

impl Template {
    pub fn task(&self) -> Task {
        match (self.level, self.kind) {
            (1, TemplateKind::Named) => Task::Cna,
            (1, _) => Task::Ncu,
            (2, _) => Task::Coa,
            (3, _) => Task::Mcc,
            _ => Task::Ica,
        }
    }

    /// Number of color slots.
    pub fn color_slots(&self) -> usize {
        match self.kind {
            TemplateKind::Named => self.text.matches("{color").count(),
            _ => 1,
        }
    }
}

#[derive(Deserialize)]
struct TemplateRow {
    id: String,
    level: u8,
    kind: TemplateKind,
    text: String,
    objects: String,
}

static TEMPLATES: LazyLock<Vec<Template>> = LazyLock::new(|| {
    let src = include_str!("../../data/templates.csv");
    csv::Reader::from_reader(src.as_bytes())
        .deserialize::<TemplateRow>()
        .map(|r| {
            let r = r.expect("embedded template list is malformed");
            let objects = if r.objects.is_empty() {
                Vec::new()
            } else {
                r.objects.split('|').map(str::to_string).collect()
            };
            Template { id: r.id, level: r.level, kind: r.kind, text: r.text, objects }
        })
        .collect()
});

pub fn templates() -> &'static [Template] {
    &TEMPLATES
}

pub fn template(id: &str) -> Option<&'static Template> {
    TEMPLATES.iter().find(|t| t.id == id)
}

/// Plain slot substitution. A color at the very start of the sentence is
/// capitalized; everywhere else names are lowercase.
pub fn render(t: &Template, object: Option<&str>, colors: &[ColorSpec]) -> String {
    let mut out = t.text.clone();
    if let Some(o) = object {
        out = out.replace("{object}", o);
    }
    for (i, c) in colors.iter().enumerate() {
        out = out.replace(&format!("{{color{}}}", i + 1), &c.token());
    }
    if let Some(c) = colors.first() {
        out = out.replace("{color}", &c.token());
        if matches!(c.kind, SpecKind::Hex | SpecKind::RgbTriplet) {
            out = out
                .replace("{hex}", &c.value.to_hex())
                .replace("{r}", &c.value.r.to_string())
                .replace("{g}", &c.value.g.to_string())
                .replace("{b}", &c.value.b.to_string());
        }
    }
    if t.text.starts_with("{color") {
        let mut chars = out.chars();
        if let Some(first) = chars.next() {
            out = first.to_uppercase().chain(chars).collect();
        }
    }
    out
}
