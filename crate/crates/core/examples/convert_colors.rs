//! sRGB ↔ CIELAB conversion and LCh polar form.
//!
//!     cargo run --example convert_colors -- 220 20 60

use colorbench::colorspace::{lab_to_lch, lab_to_srgb, srgb_to_lab, Rgb8};

fn main() {
    let args: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let colors = match args.as_slice() {
        [r, g, b] => vec![Rgb8::new(*r, *g, *b)],
        _ => vec![Rgb8::new(255, 255, 255), Rgb8::new(128, 128, 128), Rgb8::new(220, 20, 60), Rgb8::new(0, 128, 128)],
    };
    println!("{:<20} {:>8} {:>8} {:>8} {:>8} {:>8}  back", "rgb", "L*", "a*", "b*", "C*", "h");
    for c in colors {
        let lab = srgb_to_lab(c);
        let lch = lab_to_lch(lab);
        println!(
            "{:<20} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.2}  {}",
            c.to_string(),
            lab.l,
            lab.a,
            lab.b,
            lch.c,
            lch.h,
            lab_to_srgb(lab).to_hex()
        );
    }
}
