//! The three perceptual distances used for scoring, with the hue gate.

use colorbench::colorspace::{ciede2000, delta_chroma, hue_diff_deg, srgb_to_lab, HueDiff, Rgb8};

fn main() {
    let pairs = [
        ("crimson vs red", Rgb8::new(220, 20, 60), Rgb8::new(255, 0, 0)),
        ("navy vs blue", Rgb8::new(0, 0, 128), Rgb8::new(0, 0, 255)),
        ("gray vs silver", Rgb8::new(128, 128, 128), Rgb8::new(192, 192, 192)),
        ("teal vs teal", Rgb8::new(0, 128, 128), Rgb8::new(0, 128, 128)),
    ];
    for (label, x, y) in pairs {
        let (x, y) = (srgb_to_lab(x), srgb_to_lab(y));
        let hue = match hue_diff_deg(x, y, 5.0) {
            HueDiff::Degrees(d) => format!("{d:6.2}°"),
            HueDiff::Gated => "gated".into(),
        };
        println!("{label:<16} ΔE00 {:6.2}  Δchroma {:6.2}  Δhue {hue}", ciede2000(x, y), delta_chroma(x, y));
    }
}
