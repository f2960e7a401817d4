mod common;

use colorbench::colorspace::{ciede2000, srgb_to_lab, Lab, Rgb8};
use colorbench::taxonomy::*;
use proptest::prelude::*;
use std::collections::BTreeMap;

#[test]
fn tables_load_with_their_sizes() {
    assert_eq!(system(SystemId::IsccL2).len(), 29);
    assert_eq!(system(SystemId::IsccL3).len(), 260);
    assert_eq!(system(SystemId::Css3X11).len(), 147);
}

#[test]
fn spot_rows_match_published_tables() {
    assert_eq!(common::spot_row_errors(), Vec::<String>::new());
}

#[test]
fn stored_lab_matches_rgb() {
    for id in SystemId::ALL {
        for e in &system(id).entries {
            assert_eq!(e.lab, srgb_to_lab(e.rgb), "{id} {}", e.name);
        }
    }
}

#[test]
fn group_partitions() {
    let count = |id| {
        let mut m = BTreeMap::new();
        for e in &system(id).entries {
            *m.entry(group_of(e).unwrap()).or_insert(0) += 1;
        }
        m
    };
    let l2 = count(SystemId::IsccL2);
    assert_eq!((l2[&Group::Basic], l2[&Group::Intermediate]), (13, 16));
    let l3 = count(SystemId::IsccL3);
    assert_eq!([l3[&Group::Ish], l3[&Group::Light], l3[&Group::Dark], l3[&Group::Plain]], [155, 18, 16, 71]);
    assert!(group_of(&system(SystemId::Css3X11).entries[0]).is_err());
}

#[test]
fn lookup_tolerates_case_spacing_and_hyphens() {
    let css = system(SystemId::Css3X11);
    assert_eq!(css.get("dark slate grey").unwrap().name, "DarkSlateGrey");
    assert_eq!(css.get("  CRIMSON ").unwrap().name, "Crimson");
    assert_eq!(system(SystemId::IsccL2).get("yellowish-pink").unwrap().name, "Yellowish pink");
    assert!(css.get("ultraviolet").is_none());
}

#[test]
fn parse_specs() {
    let s = parse_color_spec("#dc143c", None).unwrap();
    assert_eq!((s.kind, s.value), (SpecKind::Hex, Rgb8::new(220, 20, 60)));
    let s = parse_color_spec("rgb(1, 2, 3)", None).unwrap();
    assert_eq!((s.kind, s.value), (SpecKind::RgbTriplet, Rgb8::new(1, 2, 3)));
    let s = parse_color_spec("vivid pink", Some(SystemId::IsccL3)).unwrap();
    assert_eq!(s.name.as_deref(), Some("Vivid pink"));
    assert!(matches!(parse_color_spec("#12345", None), Err(colorbench::Error::MalformedHex(_))));
    assert!(matches!(parse_color_spec("rgb(1, 2, 300)", None), Err(colorbench::Error::ChannelOutOfRange(_))));
    assert!(parse_color_spec("not a color", None).is_err());
}

#[test]
fn nearest_neighbor_of_red_by_brute_force() {
    let l2 = system(SystemId::IsccL2);
    let red = l2.get("Red").unwrap();
    let mut best: Option<(&ColorEntry, f64)> = None;
    for e in &l2.entries {
        let d = ciede2000(red.lab, e.lab);
        if e.name != "Red" && best.is_none_or(|(_, bd)| d < bd) {
            best = Some((e, d));
        }
    }
    let cands = candidate_entries(&ColorSpec::named(red), 1).unwrap();
    assert_eq!(cands.len(), 2);
    assert_eq!(cands[0].1.unwrap().name, "Red");
    assert_eq!(cands[1].1.unwrap().name, best.unwrap().0.name);
}

#[test]
fn classify_extremes() {
    let l2 = system(SystemId::IsccL2);
    assert_eq!(classify_nearest(Lab::new(0.0, 0.0, 0.0), l2).name, "Black");
    assert_eq!(classify_nearest(Lab::new(100.0, 0.0, 0.0), l2).name, "White");
}

#[test]
fn every_entry_classifies_to_itself() {
    for id in SystemId::ALL {
        let sys = system(id);
        for e in &sys.entries {
            // duplicate colors resolve to the first entry with that value
            let got = classify_nearest(e.lab, sys);
            assert_eq!(got.rgb, e.rgb, "{id} {}", e.name);
        }
    }
}

#[test]
fn too_many_neighbors_is_an_error() {
    let spec = ColorSpec::named(&system(SystemId::IsccL2).entries[0]);
    assert!(candidate_set(&spec, 28).is_ok());
    assert!(matches!(candidate_set(&spec, 29), Err(colorbench::Error::TooManyNeighbors { .. })));
}

#[test]
fn spec_json_roundtrip() {
    for spec in [
        ColorSpec::named(system(SystemId::IsccL3).get("Deep blue").unwrap()),
        ColorSpec::numeric(SpecKind::Hex, Rgb8::new(1, 2, 3), Some(SystemId::Css3X11)),
        ColorSpec::numeric(SpecKind::RgbTriplet, Rgb8::new(250, 0, 9), None),
    ] {
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ColorSpec>(&text).unwrap(), spec, "{text}");
    }
}

fn any_entry() -> impl Strategy<Value = &'static ColorEntry> {
    (0..3usize).prop_flat_map(|s| {
        let sys = system(SystemId::ALL[s]);
        (0..sys.len()).prop_map(move |i| &sys.entries[i])
    })
}

proptest! {
    #[test]
    fn candidates_are_nominal_first_then_ascending(e in any_entry(), k in 0usize..12) {
        let spec = ColorSpec::named(e);
        let cands = candidate_entries(&spec, k).unwrap();
        prop_assert_eq!(cands.len(), k + 1);
        prop_assert_eq!(cands[0].0, e.lab);
        let d: Vec<f64> = cands[1..].iter().map(|(lab, _)| ciede2000(e.lab, *lab)).collect();
        prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(cands[1..].iter().all(|(_, c)| !std::ptr::eq(c.unwrap(), e)));
        // no entry left out is closer than the farthest one taken
        if let Some(&worst) = d.last() {
            let taken: Vec<&str> = cands.iter().map(|(_, c)| c.unwrap().name.as_str()).collect();
            for other in &system(e.system).entries {
                if !taken.contains(&other.name.as_str()) {
                    prop_assert!(ciede2000(e.lab, other.lab) >= worst);
                }
            }
        }
    }

    #[test]
    fn numeric_specs_exclude_their_own_value(r: u8, g: u8, b: u8, k in 1usize..6) {
        let spec = ColorSpec::numeric(SpecKind::Hex, Rgb8::new(r, g, b), Some(SystemId::Css3X11));
        let cands = candidate_entries(&spec, k).unwrap();
        prop_assert!(cands[0].1.is_none());
        prop_assert!(cands[1..].iter().all(|(_, c)| c.unwrap().rgb != spec.value));
    }
}
