//! Prompt corpus: object catalog, templates, deterministic generation,
//! stratified Mini subset, and JSONL I/O.

mod catalog;
mod generate;
mod io;

pub use catalog::{catalog, find_object, render, template, templates, ObjectEntry, Source, Template, TemplateKind};
pub use generate::{generate_corpus, generate_mini, stratified_subset, water_fill, CorpusConfig, TaskConfig};
pub use io::{read_corpus, write_corpus, write_corpus_to};

use crate::taxonomy::{ColorSpec, SystemId};
use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    /// Color name accuracy
    #[serde(rename = "CNA")]
    Cna,
    /// Color-object association
    #[serde(rename = "COA")]
    Coa,
    /// Multi-object color composition
    #[serde(rename = "MCC")]
    Mcc,
    /// Implicit color association
    #[serde(rename = "ICA")]
    Ica,
    /// Numerical color understanding
    #[serde(rename = "NCU")]
    Ncu,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Cna, Task::Coa, Task::Mcc, Task::Ica, Task::Ncu];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Cna => "CNA",
            Task::Coa => "COA",
            Task::Mcc => "MCC",
            Task::Ica => "ICA",
            Task::Ncu => "NCU",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown task `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Vehicles,
    FruitsAndVegetables,
    FurnitureAndHousehold,
    Animals,
    ClothingAndAccessories,
    SportsAndToys,
    ToolsAndMiscellaneous,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Vehicles,
        Category::FruitsAndVegetables,
        Category::FurnitureAndHousehold,
        Category::Animals,
        Category::ClothingAndAccessories,
        Category::SportsAndToys,
        Category::ToolsAndMiscellaneous,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Vehicles => "vehicles",
            Category::FruitsAndVegetables => "fruits_and_vegetables",
            Category::FurnitureAndHousehold => "furniture_and_household",
            Category::Animals => "animals",
            Category::ClothingAndAccessories => "clothing_and_accessories",
            Category::SportsAndToys => "sports_and_toys",
            Category::ToolsAndMiscellaneous => "tools_and_miscellaneous",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown category `{s}`")))
    }
}

/// Where a prompt's colors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PromptSystem {
    Named(SystemId),
    NumericHex,
    NumericRgb,
}

impl PromptSystem {
    pub fn as_str(self) -> &'static str {
        match self {
            PromptSystem::Named(id) => id.as_str(),
            PromptSystem::NumericHex => "numeric-hex",
            PromptSystem::NumericRgb => "numeric-rgb",
        }
    }

    pub fn template_kind(self) -> TemplateKind {
        match self {
            PromptSystem::Named(_) => TemplateKind::Named,
            PromptSystem::NumericHex => TemplateKind::Hex,
            PromptSystem::NumericRgb => TemplateKind::Rgb,
        }
    }
}

impl fmt::Display for PromptSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "numeric-hex" => Ok(PromptSystem::NumericHex),
            "numeric-rgb" => Ok(PromptSystem::NumericRgb),
            _ => Ok(PromptSystem::Named(s.parse()?)),
        }
    }
}

impl TryFrom<String> for PromptSystem {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<PromptSystem> for String {
    fn from(s: PromptSystem) -> String {
        s.as_str().to_string()
    }
}

/// One benchmark prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub id: String,
    pub task: Task,
    pub level: u8,
    pub template_id: String,
    pub objects: Vec<String>,
    /// Parallel to `objects` for MCC; a single color otherwise.
    pub colors: Vec<ColorSpec>,
    pub system: PromptSystem,
    pub category: Category,
    pub text: String,
}

impl PromptSpec {
    /// Renders the prompt again from its template and slots.
    pub fn rerender(&self) -> crate::Result<String> {
        let t = template(&self.template_id)
            .ok_or_else(|| Error::Config(format!("unknown template `{}`", self.template_id)))?;
        let object = t.objects.is_empty().then(|| self.objects[0].as_str());
        Ok(render(t, object, &self.colors))
    }

    /// The (object, color) pairs scored for this prompt.
    pub fn pairs(&self) -> Vec<(&str, &ColorSpec)> {
        match self.task {
            Task::Mcc => self.objects.iter().map(String::as_str).zip(&self.colors).collect(),
            _ => self.objects.iter().map(|o| (o.as_str(), &self.colors[0])).collect(),
        }
    }
}
