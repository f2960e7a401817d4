//! Scores one synthetic two-object image against a multi-color prompt.

use colorbench::corpus::{render, template, Category, PromptSpec, PromptSystem, Task};
use colorbench::masks::{Mask, MaskBundle};
use colorbench::scoring::{evaluate_loaded, ObjectInput, ScoringOptions};
use colorbench::taxonomy::{system, ColorSpec, SystemId};
use image::{Rgb, RgbImage};

fn main() -> colorbench::Result<()> {
    let l2 = system(SystemId::IsccL2);
    let t = template("SCN01").expect("built-in template");
    let colors = vec![ColorSpec::named(l2.get("Yellow").unwrap()), ColorSpec::named(l2.get("Green").unwrap())];
    let prompt = PromptSpec {
        id: "MCC-000001".into(),
        task: Task::Mcc,
        level: t.level,
        template_id: t.id.clone(),
        text: render(t, None, &colors),
        objects: t.objects.clone(),
        colors,
        system: PromptSystem::Named(SystemId::IsccL2),
        category: Category::FruitsAndVegetables,
    };
    println!("{}", prompt.text);

    // the banana came out right, the apple came out red
    let img = RgbImage::from_fn(128, 64, |x, _| if x < 64 { Rgb([217, 180, 81]) } else { Rgb([185, 40, 66]) });
    let half = |left: bool| ObjectInput {
        present: true,
        masks: Some(MaskBundle { positive: Mask::from_fn(128, 64, |x, _| (x < 64) == left), negatives: vec![] }),
    };
    let r = evaluate_loaded(&prompt, 0, &img, &[half(true), half(false)], &ScoringOptions::default())?;
    for rep in &r.reports {
        println!(
            "{:<8} correct {:<5} ΔE00 {:6.2} Δchroma {:6.2} Δhue {:?} {:?}",
            rep.object,
            rep.correct,
            rep.ciede2000.distance.unwrap_or(f64::NAN),
            rep.delta_chroma.distance.unwrap_or(f64::NAN),
            rep.hue.distance,
            rep.failure_reason
        );
    }
    println!("image correct: {}", r.correct);
    Ok(())
}
