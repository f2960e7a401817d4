//! Dominant color of a shaded, noisy patch versus the plain mean.

use colorbench::colorspace::{lab_to_srgb, srgb_to_lab, Lab, Rgb8};
use colorbench::dominant::dominant_color;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> colorbench::Result<()> {
    let target = srgb_to_lab(Rgb8::new(185, 40, 66));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut samples = Vec::new();
    for i in 0..2000 {
        let shade = -10.0 + 20.0 * (i % 100) as f64 / 99.0;
        let lab = if rng.random_bool(0.05) {
            // highlights and specks
            srgb_to_lab(Rgb8::new(rng.random(), rng.random(), rng.random()))
        } else {
            Lab::new(target.l + shade, target.a, target.b)
        };
        samples.push(lab);
    }
    let n = samples.len() as f64;
    let mean = Lab::new(
        samples.iter().map(|p| p.l).sum::<f64>() / n,
        samples.iter().map(|p| p.a).sum::<f64>() / n,
        samples.iter().map(|p| p.b).sum::<f64>() / n,
    );
    let d = dominant_color(&samples)?;
    println!("target   {:?} {}", target, lab_to_srgb(target));
    println!("mean     {:?} {}", mean, lab_to_srgb(mean));
    println!("dominant {:?} {}", d.lab, lab_to_srgb(d.lab));
    println!("hue axis {:?}, mean chroma {:.2}", d.hue_axis, d.mean_chroma);
    Ok(())
}
