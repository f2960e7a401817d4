//! Dominant color of a pixel distribution.
//!
//! Lightness is the plain mean. Chromaticity is the mean of the samples
//! projected onto the principal axis of their (uncentered) second-moment
//! matrix in the a*b* plane, i.e. the dominant hue direction through the
//! neutral origin.

use crate::colorspace::Lab;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaMode {
    /// Second moments about the neutral origin.
    #[default]
    Uncentered,
    /// Covariance about the mean. The projected mean is then the plain mean.
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantOptions {
    pub mode: PcaMode,
    /// Below this mean chroma the projection is skipped.
    pub neutral_chroma: f64,
}

impl Default for DominantOptions {
    fn default() -> Self {
        DominantOptions { mode: PcaMode::Uncentered, neutral_chroma: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantColor {
    pub lab: Lab,
    pub pixel_count: usize,
    pub mean_chroma: f64,
    pub hue_axis: [f64; 2],
}

struct Moments {
    mean: Lab,
    mean_chroma: f64,
    // covariance about the mean, [aa, ab, bb]
    cov: [f64; 3],
}

fn moments(samples: &[Lab]) -> Result<Moments> {
    let first = *samples.first().ok_or(Error::EmptyPixels)?;
    let n = samples.len() as f64;
    // shifting by the first sample keeps constant sets exact
    let (mut dl, mut da, mut db, mut chroma) = (0.0, 0.0, 0.0, 0.0);
    for p in samples {
        dl += p.l - first.l;
        da += p.a - first.a;
        db += p.b - first.b;
        chroma += p.chroma();
    }
    let mean = Lab::new(first.l + dl / n, first.a + da / n, first.b + db / n);
    let mut cov = [0.0; 3];
    for p in samples {
        let (x, y) = (p.a - mean.a, p.b - mean.b);
        cov[0] += x * x;
        cov[1] += x * y;
        cov[2] += y * y;
    }
    Ok(Moments { mean, mean_chroma: chroma / n, cov: cov.map(|c| c / n) })
}

/// Eigenvalues (descending) and the unit eigenvector of the larger one for a
/// symmetric 2×2 matrix `[[p, q], [q, r]]`. `None` for the vector when the
/// eigenvalues coincide.
pub fn symmetric_eigen2(p: f64, q: f64, r: f64) -> ([f64; 2], Option<[f64; 2]>) {
    let m = 0.5 * (p + r);
    let d = (0.5 * (p - r)).hypot(q);
    let vals = [m + d, m - d];
    if d <= 1e-15 * m.abs() || d == 0.0 {
        return (vals, None);
    }
    let v = if p >= r { [vals[0] - r, q] } else { [q, vals[0] - p] };
    let norm = v[0].hypot(v[1]);
    (vals, Some([v[0] / norm, v[1] / norm]))
}

fn canonical_sign(v: [f64; 2], toward: [f64; 2]) -> [f64; 2] {
    let dot = v[0] * toward[0] + v[1] * toward[1];
    let flip = if dot != 0.0 {
        dot < 0.0
    } else if v[0] != 0.0 {
        v[0] < 0.0
    } else {
        v[1] < 0.0
    };
    if flip {
        [-v[0], -v[1]]
    } else {
        v
    }
}

fn axis_and_rank(m: &Moments, mode: PcaMode) -> ([f64; 2], bool) {
    let (ma, mb) = (m.mean.a, m.mean.b);
    let [p, q, r] = match mode {
        PcaMode::Uncentered => [m.cov[0] + ma * ma, m.cov[1] + ma * mb, m.cov[2] + mb * mb],
        PcaMode::Centered => m.cov,
    };
    let (vals, vec) = symmetric_eigen2(p, q, r);
    let rank_one = vals[1] <= 1e-12 * vals[0];
    let axis = vec.unwrap_or_else(|| {
        let norm = ma.hypot(mb);
        if norm > 0.0 {
            [ma / norm, mb / norm]
        } else {
            [1.0, 0.0]
        }
    });
    (canonical_sign(axis, [ma, mb]), rank_one)
}

/// Principal chromatic axis with `axis · mean_chromaticity >= 0`.
pub fn dominant_hue_axis(samples: &[Lab]) -> Result<[f64; 2]> {
    Ok(axis_and_rank(&moments(samples)?, PcaMode::Uncentered).0)
}

pub fn dominant_color(samples: &[Lab]) -> Result<DominantColor> {
    dominant_color_with(samples, &DominantOptions::default())
}

pub fn dominant_color_with(samples: &[Lab], opts: &DominantOptions) -> Result<DominantColor> {
    let m = moments(samples)?;
    let (axis, rank_one) = axis_and_rank(&m, opts.mode);
    let (a, b) = if m.mean_chroma < opts.neutral_chroma || rank_one || opts.mode == PcaMode::Centered {
        (m.mean.a, m.mean.b)
    } else {
        let t = m.mean.a * axis[0] + m.mean.b * axis[1];
        (t * axis[0], t * axis[1])
    };
    Ok(DominantColor {
        lab: Lab::new(m.mean.l, a, b),
        pixel_count: samples.len(),
        mean_chroma: m.mean_chroma,
        hue_axis: axis,
    })
}
