#![allow(dead_code)]

use colorbench::colorspace::{lab_to_srgb, Lab, Rgb8};
use colorbench::corpus::PromptSpec;
use colorbench::masks::Mask;
use colorbench::scoring::{write_manifest, ImageRecord, ObjectRecord};
use image::{Rgb, RgbImage};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

/// sRGB→Lab written from scratch: the RGB→XYZ matrix is derived here from
/// the primaries' chromaticities and the D65 white point.
pub struct LabOracle {
    m: Matrix3<f64>,
    white: Vector3<f64>,
}

impl LabOracle {
    pub fn new() -> Self {
        let xyz = |x: f64, y: f64| Vector3::new(x / y, 1.0, (1.0 - x - y) / y);
        let prim = Matrix3::from_columns(&[xyz(0.64, 0.33), xyz(0.30, 0.60), xyz(0.15, 0.06)]);
        let s = prim.try_inverse().unwrap() * xyz(0.3127, 0.3290);
        let m = prim * Matrix3::from_diagonal(&s);
        let white = m * Vector3::new(1.0, 1.0, 1.0);
        LabOracle { m, white }
    }

    pub fn lab(&self, c: Rgb8) -> Lab {
        let lin = |v: u8| {
            let v = f64::from(v) / 255.0;
            if v <= 0.04045 { v / 12.92 } else { ((v + 0.055) / 1.055).powf(2.4) }
        };
        let xyz = self.m * Vector3::new(lin(c.r), lin(c.g), lin(c.b));
        let f = |t: f64| {
            if t > 216.0 / 24389.0 { t.cbrt() } else { (24389.0 / 27.0 * t + 16.0) / 116.0 }
        };
        let (fx, fy, fz) = (f(xyz.x / self.white.x), f(xyz.y / self.white.y), f(xyz.z / self.white.z));
        Lab::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
    }
}

pub fn flat_image(w: u32, h: u32, c: Rgb8) -> RgbImage {
    RgbImage::from_pixel(w, h, Rgb([c.r, c.g, c.b]))
}

/// Patch of `base` with lightness ramping linearly from -10 to +10 across
/// columns, then `noise` of the pixels replaced by uniformly random colors.
pub fn shaded_patch(base: Lab, w: u32, h: u32, noise: f64, seed: u64) -> RgbImage {
    let mut img = RgbImage::from_fn(w, h, |x, _| {
        let dl = -10.0 + 20.0 * f64::from(x) / f64::from(w - 1);
        let c = lab_to_srgb(Lab::new((base.l + dl).clamp(0.0, 100.0), base.a, base.b));
        Rgb([c.r, c.g, c.b])
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (noise * f64::from(w * h)).round() as usize;
    for i in rand::seq::index::sample(&mut rng, (w * h) as usize, n) {
        let px = Rgb([rng.random(), rng.random(), rng.random()]);
        img.put_pixel(i as u32 % w, i as u32 / w, px);
    }
    img
}

/// Writes `<root>/<prompt_id>/<index>.png` where object `i` is a flat
/// `size`×`size` band in its prompted color, one mask per band, and returns
/// the manifest rows.
pub fn write_flat_fixture(root: &Path, prompts: &[PromptSpec], images_per_prompt: u32, size: u32) -> Vec<ImageRecord> {
    let mut rows = Vec::new();
    for p in prompts {
        std::fs::create_dir_all(root.join(&p.id)).unwrap();
        let pairs = p.pairs();
        let height = size * pairs.len() as u32;
        let img = RgbImage::from_fn(size, height, |_, y| {
            let c = pairs[(y / size) as usize].1.value;
            Rgb([c.r, c.g, c.b])
        });
        for i in 0..images_per_prompt {
            let rel = format!("{}/{i}.png", p.id);
            img.save(root.join(&rel)).unwrap();
            let objects = pairs
                .iter()
                .enumerate()
                .map(|(band, (o, _))| {
                    let rec = ObjectRecord::conventional(&rel, o, true, &[]);
                    let band = band as u32;
                    let m = Mask::from_fn(size, height, |_, y| y / size == band);
                    m.save(&root.join(rec.mask_path.as_ref().unwrap())).unwrap();
                    rec
                })
                .collect();
            rows.push(ImageRecord { prompt_id: p.id.clone(), image_index: i, image_path: rel, objects });
        }
    }
    rows
}

pub fn save_manifest(rows: &[ImageRecord], path: &Path) {
    write_manifest(rows, path).unwrap();
}

/// Rows copied by hand from the published color tables.
pub const L2_ROWS: [(&str, [u8; 3]); 10] = [
    ("Pink", [230, 134, 151]),
    ("Red", [185, 40, 66]),
    ("Yellowish pink", [234, 154, 144]),
    ("Reddish orange", [215, 71, 42]),
    ("Orange", [220, 125, 52]),
    ("Olive green", [62, 80, 31]),
    ("Green", [79, 191, 154]),
    ("Blue", [59, 116, 192]),
    ("Purplish red", [186, 43, 119]),
    ("Black", [43, 41, 43]),
];

pub const L3_ROWS: [(&str, [u8; 3]); 10] = [
    ("Vivid pink", [253, 121, 146]),
    ("Vivid red", [213, 28, 60]),
    ("Strong red", [191, 52, 75]),
    ("Deep red", [135, 18, 45]),
    ("Blackish red", [51, 33, 39]),
    ("Vivid yellowish pink", [253, 126, 93]),
    ("Grayish yellow", [200, 177, 139]),
    ("Deep blue", [17, 48, 116]),
    ("Bluish white", [225, 225, 241]),
    ("Vivid violet", [121, 49, 211]),
];

pub const CSS_ROWS: [(&str, &str, [u8; 3]); 10] = [
    ("Aqua", "#00FFFF", [0, 255, 255]),
    ("CadetBlue", "#5F9EA0", [95, 158, 160]),
    ("Crimson", "#DC143C", [220, 20, 60]),
    ("DarkBlue", "#00008B", [0, 0, 139]),
    ("DarkSlateGrey", "#2F4F4F", [47, 79, 79]),
    ("MediumOrchid", "#BA55D3", [186, 85, 211]),
    ("Navy", "#000080", [0, 0, 128]),
    ("RebeccaPurple", "#663399", [102, 51, 153]),
    ("Tomato", "#FF6347", [255, 99, 71]),
    ("YellowGreen", "#9ACD32", [154, 205, 50]),
];

/// Spot rows that disagree with the loaded tables, as messages.
pub fn spot_row_errors() -> Vec<String> {
    use colorbench::taxonomy::{system, SystemId};
    let mut bad = Vec::new();
    let mut check = |id: SystemId, name: &str, rgb: [u8; 3], hex: Option<&str>| match system(id).get(name) {
        None => bad.push(format!("{id}: `{name}` missing")),
        Some(e) => {
            if e.rgb != Rgb8::new(rgb[0], rgb[1], rgb[2]) || hex.is_some_and(|h| !h.eq_ignore_ascii_case(&e.hex)) {
                bad.push(format!("{id}: `{name}` is {} {}", e.hex, e.rgb));
            }
        }
    };
    for (n, rgb) in L2_ROWS {
        check(SystemId::IsccL2, n, rgb, None);
    }
    for (n, rgb) in L3_ROWS {
        check(SystemId::IsccL3, n, rgb, None);
    }
    for (n, hex, rgb) in CSS_ROWS {
        check(SystemId::Css3X11, n, rgb, Some(hex));
    }
    bad
}

/// One single-object prompt per entry of `id`, rendered from template OF01.
pub fn prompts_for_system(id: colorbench::taxonomy::SystemId) -> Vec<PromptSpec> {
    use colorbench::corpus::{render, template, Category, PromptSystem, Task};
    use colorbench::taxonomy::{system, ColorSpec};
    let t = template("OF01").unwrap();
    system(id)
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let colors = vec![ColorSpec::named(e)];
            PromptSpec {
                id: format!("CNA-{:06}", i + 1),
                task: Task::Cna,
                level: 1,
                template_id: t.id.clone(),
                text: render(t, Some("car"), &colors),
                objects: vec!["car".into()],
                colors,
                system: PromptSystem::Named(id),
                category: Category::Vehicles,
            }
        })
        .collect()
}
