//! Negative-label subtraction and the validity floor.

use colorbench::masks::{refine_mask, Mask, MaskBundle, RefineParams};

fn main() -> colorbench::Result<()> {
    // a car body with four wheels and a window
    let car = Mask::from_fn(120, 60, |x, y| (10..110).contains(&x) && (10..50).contains(&y));
    let wheels = Mask::from_fn(120, 60, |x, y| {
        [25u32, 45, 75, 95].iter().any(|cx| (x as i32 - *cx as i32).pow(2) + (y as i32 - 45).pow(2) < 36)
    });
    let window = Mask::from_fn(120, 60, |x, y| (40..80).contains(&x) && (12..24).contains(&y));
    let whole = car.clone();

    let bundle = MaskBundle {
        positive: car,
        negatives: vec![("tire".into(), wheels), ("window".into(), window), ("body".into(), whole)],
    };
    let params = RefineParams::default();
    let r = refine_mask(&bundle, &params)?;
    println!("positive {} px, refined {} px, valid {}", bundle.positive.area(), r.mask.area(), r.valid);
    println!("ignored as whole-object duplicates: {:?}", r.ignored);

    let strict = RefineParams { min_pixels: 4000, ..params };
    println!("with a 4000 px floor: valid {}", refine_mask(&bundle, &strict)?.valid);
    Ok(())
}
