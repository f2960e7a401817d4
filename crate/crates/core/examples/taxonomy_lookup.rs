//! Named color lookup, candidate sets and nearest-name classification.
//!
//!     cargo run --example taxonomy_lookup -- "vivid pink" 3

use colorbench::colorspace::{ciede2000, srgb_to_lab, Rgb8};
use colorbench::taxonomy::{candidate_entries, classify_nearest, parse_color_spec, system, SystemId};

fn main() -> colorbench::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "Red".into());
    let k = args.next().and_then(|v| v.parse().ok()).unwrap_or(3);

    for id in SystemId::ALL {
        println!("{id}: {} entries", system(id).len());
    }
    let spec = parse_color_spec(&text, None)?;
    println!("\n`{text}` -> {:?} {} in {}", spec.kind, spec.value, spec.candidate_system());
    for (lab, entry) in candidate_entries(&spec, k)? {
        let name = entry.map_or("(numeric target)", |e| e.name.as_str());
        println!("  {name:<24} ΔE00 {:5.2}", ciede2000(spec.target_lab, lab));
    }

    let probe = srgb_to_lab(Rgb8::new(90, 140, 60));
    println!("\n{} is nearest to:", Rgb8::new(90, 140, 60));
    for id in SystemId::ALL {
        println!("  {id:<8} {}", classify_nearest(probe, system(id)).name);
    }
    Ok(())
}
