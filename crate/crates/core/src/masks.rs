//! Binary masks: PNG I/O, negative-label refinement, and masked pixel
//! extraction in CIELAB.

use crate::colorspace::{srgb_to_lab, Lab, Rgb8};
use crate::{Error, Result};
use image::{GrayImage, Luma, RgbImage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const DEFAULT_SAMPLE_CAP: usize = 100_000;

/// Row-major binary occupancy.
#[derive(Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl std::fmt::Debug for Mask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mask")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("area", &self.area())
            .finish()
    }
}

impl Mask {
    pub fn empty(width: u32, height: u32) -> Self {
        Mask { width, height, bits: vec![false; width as usize * height as usize] }
    }

    pub fn full(width: u32, height: u32) -> Self {
        Mask { width, height, bits: vec![true; width as usize * height as usize] }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let bits = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Mask { width, height, bits }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::Config(format!("{} bits for a {width}x{height} mask", bits.len())));
        }
        Ok(Mask { width, height, bits })
    }

    /// Pixels with value >= 128 are occupied.
    pub fn from_gray(img: &GrayImage) -> Self {
        let bits = img.pixels().map(|p| p.0[0] >= 128).collect();
        Mask { width: img.width(), height: img.height(), bits }
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| Luma([if self.get(x, y) { 255 } else { 0 }]))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|source| Error::Image { path: path.into(), source })?;
        Ok(Mask::from_gray(&img.to_luma8()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_gray().save(path).map_err(|source| Error::Image { path: path.into(), source })
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    fn check_dims(&self, other: &Mask) -> Result<()> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch { expected: self.dimensions(), got: other.dimensions() });
        }
        Ok(())
    }

    pub fn intersection_area(&self, other: &Mask) -> Result<usize> {
        self.check_dims(other)?;
        Ok(self.bits.iter().zip(&other.bits).filter(|(a, b)| **a && **b).count())
    }

    /// Intersection over union; 0 when both are empty.
    pub fn iou(&self, other: &Mask) -> Result<f64> {
        self.check_dims(other)?;
        let (mut inter, mut union) = (0usize, 0usize);
        for (a, b) in self.bits.iter().zip(&other.bits) {
            inter += (*a && *b) as usize;
            union += (*a || *b) as usize;
        }
        Ok(if union == 0 { 0.0 } else { inter as f64 / union as f64 })
    }

    /// Clears every pixel set in `other`. Returns how many were cleared.
    pub fn subtract(&mut self, other: &Mask) -> Result<usize> {
        self.check_dims(other)?;
        let mut removed = 0;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            if *a && *b {
                *a = false;
                removed += 1;
            }
        }
        Ok(removed)
    }
}

#[derive(Debug, Clone)]
pub struct MaskBundle {
    pub positive: Mask,
    pub negatives: Vec<(String, Mask)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineParams {
    /// Negatives overlapping the mask with IoU above this are ignored.
    pub tau_ignore: f64,
    pub min_pixels: usize,
    pub min_fraction: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams { tau_ignore: 0.9, min_pixels: 256, min_fraction: 0.02 }
    }
}

#[derive(Debug, Clone)]
pub struct Refined {
    pub mask: Mask,
    pub valid: bool,
    /// Labels whose mask was ignored in the final pass.
    pub ignored: Vec<String>,
}

/// Removes negative-label regions from the positive mask.
///
/// A negative whose IoU with the positive exceeds `tau_ignore` is taken to be
/// a mis-segmentation of the whole object and skipped. The guard looks at the
/// original positive, so the order of the negatives does not matter.
pub fn refine_mask(bundle: &MaskBundle, params: &RefineParams) -> Result<Refined> {
    let mut mask = bundle.positive.clone();
    let mut ignored = Vec::new();
    for (label, neg) in &bundle.negatives {
        if neg.iou(&bundle.positive)? > params.tau_ignore {
            ignored.push(label.clone());
        } else {
            mask.subtract(neg)?;
        }
    }
    let floor = (params.min_fraction * bundle.positive.area() as f64).max(params.min_pixels as f64);
    let valid = mask.area() > 0 && mask.area() as f64 >= floor;
    Ok(Refined { mask, valid, ignored })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PixelSet {
    pub samples: Vec<Lab>,
    /// Masked pixel count before sampling.
    pub source_count: usize,
}

/// Masked pixels in Lab, uniformly subsampled to `cap` when there are more.
pub fn extract_pixels(image: &RgbImage, mask: &Mask, cap: usize, seed: u64) -> Result<PixelSet> {
    let dims = image.dimensions();
    if dims != mask.dimensions() {
        return Err(Error::DimensionMismatch { expected: dims, got: mask.dimensions() });
    }
    if cap == 0 {
        return Err(Error::Config("sample cap must be at least 1".into()));
    }
    let idx: Vec<usize> = mask.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
    if idx.is_empty() {
        return Err(Error::EmptyMask);
    }
    let raw = image.as_raw();
    let lab = |i: usize| srgb_to_lab(Rgb8::new(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]));
    let samples = if idx.len() > cap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = rand::seq::index::sample(&mut rng, idx.len(), cap).into_vec();
        pick.sort_unstable();
        pick.into_iter().map(|j| lab(idx[j])).collect()
    } else {
        idx.iter().map(|&i| lab(i)).collect()
    };
    Ok(PixelSet { samples, source_count: idx.len() })
}

/// Lowercased with whitespace runs replaced by `_`.
pub fn slug(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join("_").to_lowercase()
}

pub fn mask_file_name(image_stem: &str, object: &str) -> String {
    format!("{image_stem}.{}.mask.png", slug(object))
}

pub fn neg_mask_file_name(image_stem: &str, object: &str, label: &str) -> String {
    format!("{image_stem}.{}.neg.{}.mask.png", slug(object), slug(label))
}
