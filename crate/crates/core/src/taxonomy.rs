//! Embedded color naming systems, color-spec parsing, candidate sets and
//! nearest-name classification.

use crate::colorspace::{ciede2000, srgb_to_lab, Lab, Rgb8};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SystemId {
    #[serde(rename = "ISCC_L2")]
    IsccL2,
    #[serde(rename = "ISCC_L3")]
    IsccL3,
    #[serde(rename = "CSS3X11")]
    Css3X11,
}

impl SystemId {
    pub const ALL: [SystemId; 3] = [SystemId::IsccL2, SystemId::IsccL3, SystemId::Css3X11];

    pub fn as_str(self) -> &'static str {
        match self {
            SystemId::IsccL2 => "ISCC_L2",
            SystemId::IsccL3 => "ISCC_L3",
            SystemId::Css3X11 => "CSS3X11",
        }
    }

    /// Row count of the checked-in table. The L3 table is missing seven
    /// entries of the full 267-name list (see README).
    pub fn expected_len(self) -> usize {
        match self {
            SystemId::IsccL2 => 29,
            SystemId::IsccL3 => 260,
            SystemId::Css3X11 => 147,
        }
    }

    fn table_source(self) -> &'static str {
        match self {
            SystemId::IsccL2 => include_str!("../data/taxonomy/iscc_l2.csv"),
            SystemId::IsccL3 => include_str!("../data/taxonomy/iscc_l3.csv"),
            SystemId::Css3X11 => include_str!("../data/taxonomy/css3x11.csv"),
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SystemId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownSystem(s.to_string()))
    }
}

/// Analysis grouping attached to L2 and L3 entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Basic,
    Intermediate,
    Light,
    Dark,
    Ish,
    #[serde(rename = "none")]
    Plain,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Basic => "basic",
            Group::Intermediate => "intermediate",
            Group::Light => "light",
            Group::Dark => "dark",
            Group::Ish => "ish",
            Group::Plain => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorEntry {
    pub name: String,
    pub rgb: Rgb8,
    pub hex: String,
    pub lab: Lab,
    pub system: SystemId,
    pub group: Option<Group>,
}

#[derive(Debug)]
pub struct ColorSystem {
    pub id: SystemId,
    pub entries: Vec<ColorEntry>,
    index: HashMap<String, usize>,
    compact_index: HashMap<String, usize>,
}

/// Lowercase and collapse runs of whitespace.
pub fn normalize_name(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn compact_name(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

fn group_for(system: SystemId, name: &str) -> Option<Group> {
    match system {
        SystemId::IsccL2 => Some(if name.split_whitespace().count() == 1 {
            Group::Basic
        } else {
            Group::Intermediate
        }),
        SystemId::IsccL3 => {
            let lower = name.to_lowercase();
            let tokens: Vec<&str> = lower
                .split(|c: char| c.is_whitespace() || c == '-')
                .filter(|t| !t.is_empty())
                .collect();
            Some(if tokens.iter().any(|t| t.ends_with("ish")) {
                Group::Ish
            } else if tokens.contains(&"light") {
                Group::Light
            } else if tokens.contains(&"dark") {
                Group::Dark
            } else {
                Group::Plain
            })
        }
        SystemId::Css3X11 => None,
    }
}

#[derive(Deserialize)]
struct Row {
    system: String,
    name: String,
    hex: String,
    r: u8,
    g: u8,
    b: u8,
}

impl ColorSystem {
    /// Parses a `system,name,hex,r,g,b` table and checks its integrity.
    pub fn from_csv(id: SystemId, text: &str, expected_len: usize) -> Result<Self> {
        let bad = |msg: String| Error::Table { table: id.to_string(), msg };
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        let mut compact_index = HashMap::new();
        for (i, row) in csv::Reader::from_reader(text.as_bytes()).deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
            if row.system != id.as_str() {
                return Err(bad(format!("row {}: system `{}`", i + 1, row.system)));
            }
            let rgb = Rgb8::new(row.r, row.g, row.b);
            if row.hex != rgb.to_hex() {
                return Err(bad(format!("row {}: {} disagrees with {rgb}", i + 1, row.hex)));
            }
            if index.insert(normalize_name(&row.name), entries.len()).is_some() {
                return Err(bad(format!("duplicate name `{}`", row.name)));
            }
            compact_index.entry(compact_name(&row.name)).or_insert(entries.len());
            entries.push(ColorEntry {
                group: group_for(id, &row.name),
                name: row.name,
                hex: row.hex,
                lab: srgb_to_lab(rgb),
                rgb,
                system: id,
            });
        }
        if entries.len() != expected_len {
            return Err(bad(format!("{} rows, expected {expected_len}", entries.len())));
        }
        Ok(ColorSystem { id, entries, index, compact_index })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index
            .get(&normalize_name(name))
            .or_else(|| self.compact_index.get(&compact_name(name)))
            .copied()
    }

    pub fn get(&self, name: &str) -> Option<&ColorEntry> {
        self.position(name).map(|i| &self.entries[i])
    }
}

static SYSTEMS: LazyLock<[ColorSystem; 3]> = LazyLock::new(|| {
    SystemId::ALL.map(|id| {
        ColorSystem::from_csv(id, id.table_source(), id.expected_len())
            .unwrap_or_else(|e| panic!("embedded table is corrupt: {e}"))
    })
});

/// The embedded, immutable table for `id`.
pub fn system(id: SystemId) -> &'static ColorSystem {
    &SYSTEMS[id as usize]
}

pub fn load_system(id: &str) -> Result<&'static ColorSystem> {
    Ok(system(id.parse()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Named,
    Hex,
    RgbTriplet,
}

/// The ground-truth color of a prompt slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SpecRecord", try_from = "SpecRecord")]
pub struct ColorSpec {
    pub kind: SpecKind,
    pub name: Option<String>,
    pub value: Rgb8,
    pub system: Option<SystemId>,
    pub target_lab: Lab,
}

impl ColorSpec {
    pub fn named(entry: &ColorEntry) -> Self {
        ColorSpec {
            kind: SpecKind::Named,
            name: Some(entry.name.clone()),
            value: entry.rgb,
            system: Some(entry.system),
            target_lab: entry.lab,
        }
    }

    pub fn numeric(kind: SpecKind, value: Rgb8, system: Option<SystemId>) -> Self {
        debug_assert!(kind != SpecKind::Named);
        ColorSpec { kind, name: None, value, system, target_lab: srgb_to_lab(value) }
    }

    /// The system candidates are drawn from.
    pub fn candidate_system(&self) -> SystemId {
        self.system.unwrap_or(SystemId::Css3X11)
    }

    /// Table entry a named spec points to.
    pub fn entry(&self) -> Option<&'static ColorEntry> {
        match (&self.name, self.kind) {
            (Some(name), SpecKind::Named) => system(self.candidate_system()).get(name),
            _ => None,
        }
    }

    /// How the color appears in prompt text.
    pub fn token(&self) -> String {
        match self.kind {
            SpecKind::Named => self.name.as_deref().unwrap_or_default().to_lowercase(),
            SpecKind::Hex => self.value.to_hex(),
            SpecKind::RgbTriplet => self.value.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRecord {
    kind: SpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    hex: String,
    r: u8,
    g: u8,
    b: u8,
    system: Option<SystemId>,
}

impl From<ColorSpec> for SpecRecord {
    fn from(s: ColorSpec) -> Self {
        SpecRecord {
            kind: s.kind,
            name: s.name,
            hex: s.value.to_hex(),
            r: s.value.r,
            g: s.value.g,
            b: s.value.b,
            system: s.system,
        }
    }
}

impl TryFrom<SpecRecord> for ColorSpec {
    type Error = Error;

    fn try_from(rec: SpecRecord) -> Result<Self> {
        let value = Rgb8::new(rec.r, rec.g, rec.b);
        if parse_hex(&rec.hex)? != value {
            return Err(Error::MalformedSpec(format!("{} disagrees with {value}", rec.hex)));
        }
        match rec.kind {
            SpecKind::Named => {
                let name = rec.name.ok_or_else(|| Error::MalformedSpec("named spec without name".into()))?;
                let id = rec.system.ok_or_else(|| Error::MalformedSpec(format!("`{name}` has no system")))?;
                let entry = system(id).get(&name).ok_or_else(|| Error::UnknownColorName(name.clone()))?;
                if entry.rgb != value {
                    return Err(Error::MalformedSpec(format!("`{name}` is {} in {id}", entry.hex)));
                }
                Ok(ColorSpec::named(entry))
            }
            kind => Ok(ColorSpec { name: rec.name, ..ColorSpec::numeric(kind, value, rec.system) }),
        }
    }
}

fn parse_hex(text: &str) -> Result<Rgb8> {
    let malformed = || Error::MalformedHex(text.to_string());
    let digits = text.strip_prefix('#').ok_or_else(malformed)?;
    if digits.len() != 6 || !digits.bytes().all(|c| c.is_ascii_hexdigit()) {
        return Err(malformed());
    }
    let ch = |i: usize| u8::from_str_radix(&digits[i..i + 2], 16).map_err(|_| malformed());
    Ok(Rgb8::new(ch(0)?, ch(2)?, ch(4)?))
}

fn parse_triplet(text: &str, inner: &str) -> Result<Rgb8> {
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::MalformedSpec(text.to_string()));
    }
    let mut out = [0u8; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        let v: i64 = p.parse().map_err(|_| Error::MalformedSpec(text.to_string()))?;
        *slot = u8::try_from(v).map_err(|_| Error::ChannelOutOfRange(text.to_string()))?;
    }
    Ok(Rgb8::new(out[0], out[1], out[2]))
}

/// Parses a color name, `#rrggbb`, `rgb(r, g, b)` or `(r, g, b)`.
///
/// Names are looked up in `hint` if given, else in L2, L3 and CSS3/X11 in
/// that order.
pub fn parse_color_spec(text: &str, hint: Option<SystemId>) -> Result<ColorSpec> {
    let t = text.trim();
    if t.starts_with('#') {
        return Ok(ColorSpec::numeric(SpecKind::Hex, parse_hex(t)?, hint));
    }
    let lower = t.to_ascii_lowercase();
    let inner = lower
        .strip_prefix("rgb")
        .map(str::trim_start)
        .unwrap_or(&lower)
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'));
    if let Some(inner) = inner {
        return Ok(ColorSpec::numeric(SpecKind::RgbTriplet, parse_triplet(t, inner)?, hint));
    }
    if lower.starts_with("rgb") || lower.starts_with('(') {
        return Err(Error::MalformedSpec(t.to_string()));
    }
    let order: &[SystemId] = match &hint {
        Some(id) => std::slice::from_ref(id),
        None => &SystemId::ALL,
    };
    order
        .iter()
        .find_map(|&id| system(id).get(t))
        .map(ColorSpec::named)
        .ok_or_else(|| Error::UnknownColorName(t.to_string()))
}

/// Nominal entry (if any) followed by the `k` nearest other entries.
pub fn candidate_entries(spec: &ColorSpec, k: usize) -> Result<Vec<(Lab, Option<&'static ColorEntry>)>> {
    let sys = system(spec.candidate_system());
    if k >= sys.len() {
        return Err(Error::TooManyNeighbors { k, size: sys.len() });
    }
    let nominal = spec.entry();
    let mut out = Vec::with_capacity(k + 1);
    out.push((spec.target_lab, nominal));
    if k == 0 {
        return Ok(out);
    }
    let mut others: Vec<(f64, &ColorEntry)> = sys
        .entries
        .iter()
        .filter(|e| match nominal {
            Some(n) => !std::ptr::eq(*e, n),
            None => e.rgb != spec.value,
        })
        .map(|e| (ciede2000(spec.target_lab, e.lab), e))
        .collect();
    // stable: equal distances keep table order
    others.sort_by(|x, y| x.0.total_cmp(&y.0));
    out.extend(others.into_iter().take(k).map(|(_, e)| (e.lab, Some(e))));
    Ok(out)
}

/// The nominal target followed by its `k` perceptually nearest neighbors.
pub fn candidate_set(spec: &ColorSpec, k: usize) -> Result<Vec<Lab>> {
    Ok(candidate_entries(spec, k)?.into_iter().map(|(lab, _)| lab).collect())
}

pub fn classify_nearest(lab: Lab, sys: &ColorSystem) -> &ColorEntry {
    let mut best = &sys.entries[0];
    let mut best_d = ciede2000(lab, best.lab);
    for e in &sys.entries[1..] {
        let d = ciede2000(lab, e.lab);
        if d < best_d {
            best = e;
            best_d = d;
        }
    }
    best
}

pub fn group_of(entry: &ColorEntry) -> Result<Group> {
    entry.group.ok_or_else(|| Error::NoGrouping(format!("{} {}", entry.system, entry.name)))
}
