//! sRGB / CIELAB conversions and the perceptual distances used for scoring.
//!
//! Everything is `f64`. The white point is taken as the row sums of the
//! RGB→XYZ matrix so that neutral sRGB inputs land exactly on a* = b* = 0.

#![allow(clippy::excessive_precision, clippy::unreadable_literal)]

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::LazyLock;

/// 8-bit sRGB triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb8 {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    /// Lowercase `#rrggbb`.
    pub fn to_hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

impl fmt::Display for Rgb8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rgb({}, {}, {})", self.r, self.g, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Lab {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }

    pub fn chroma(self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn is_finite(self) -> bool {
        self.l.is_finite() && self.a.is_finite() && self.b.is_finite()
    }
}

/// Cylindrical Lab. `h` is in degrees, `[0, 360)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LCh {
    pub l: f64,
    pub c: f64,
    pub h: f64,
}

impl LCh {
    pub fn to_lab(self) -> Lab {
        let h = self.h.to_radians();
        Lab::new(self.l, self.c * h.cos(), self.c * h.sin())
    }
}

// sRGB primaries with D65, rows X, Y, Z.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4123907992659594, 0.35758433938387796, 0.1804807884018343],
    [0.2126390058715103, 0.7151686787677559, 0.07219231536073371],
    [0.01933081871559182, 0.11919477979462596, 0.9505321522496607],
];

const WHITE: [f64; 3] = [
    RGB_TO_XYZ[0][0] + RGB_TO_XYZ[0][1] + RGB_TO_XYZ[0][2],
    RGB_TO_XYZ[1][0] + RGB_TO_XYZ[1][1] + RGB_TO_XYZ[1][2],
    RGB_TO_XYZ[2][0] + RGB_TO_XYZ[2][1] + RGB_TO_XYZ[2][2],
];

const XYZ_TO_RGB: [[f64; 3]; 3] = invert3(RGB_TO_XYZ);

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

const fn invert3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
    [
        [
            c00 / det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det,
        ],
        [
            c01 / det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det,
        ],
        [
            c02 / det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det,
        ],
    ]
}

/// sRGB transfer function, encoded `[0,1]` to linear.
pub fn srgb_decode(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

pub fn srgb_encode(v: f64) -> f64 {
    if v <= 0.0031308 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

static LINEAR: LazyLock<[f64; 256]> =
    LazyLock::new(|| std::array::from_fn(|i| srgb_decode(i as f64 / 255.0)));

fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

fn lab_f_inv(f: f64) -> f64 {
    let t = f * f * f;
    if t > EPSILON {
        t
    } else {
        (116.0 * f - 16.0) / KAPPA
    }
}

pub fn srgb_to_xyz(c: Rgb8) -> [f64; 3] {
    let lin = [LINEAR[c.r as usize], LINEAR[c.g as usize], LINEAR[c.b as usize]];
    RGB_TO_XYZ.map(|row| row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2])
}

pub fn xyz_to_lab(xyz: [f64; 3]) -> Lab {
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    Lab::new(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

pub fn srgb_to_lab(c: Rgb8) -> Lab {
    xyz_to_lab(srgb_to_xyz(c))
}

/// Inverse conversion, clamped to the sRGB gamut and rounded to 8 bits.
pub fn lab_to_srgb(x: Lab) -> Rgb8 {
    let fy = (x.l + 16.0) / 116.0;
    let fx = fy + x.a / 500.0;
    let fz = fy - x.b / 200.0;
    let yr = if x.l > KAPPA * EPSILON {
        fy * fy * fy
    } else {
        x.l / KAPPA
    };
    let xyz = [lab_f_inv(fx) * WHITE[0], yr * WHITE[1], lab_f_inv(fz) * WHITE[2]];
    let [r, g, b] = XYZ_TO_RGB.map(|row| {
        let lin = row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2];
        (srgb_encode(lin.clamp(0.0, 1.0)) * 255.0).round() as u8
    });
    Rgb8::new(r, g, b)
}

pub fn lab_to_lch(x: Lab) -> LCh {
    let c = x.chroma();
    let h = if c == 0.0 {
        0.0
    } else {
        let deg = x.b.atan2(x.a).to_degrees();
        let deg = if deg < 0.0 { deg + 360.0 } else { deg };
        // -tiny + 360 can round up to exactly 360
        if deg >= 360.0 {
            0.0
        } else {
            deg
        }
    };
    LCh { l: x.l, c, h }
}

/// Euclidean distance in the a*b* plane.
pub fn delta_chroma(x: Lab, y: Lab) -> f64 {
    (x.a - y.a).hypot(x.b - y.b)
}

/// CIEDE2000 with kL = kC = kH = 1.
pub fn ciede2000(x: Lab, y: Lab) -> f64 {
    const POW25_7: f64 = 6103515625.0;

    let c1 = x.chroma();
    let c2 = y.chroma();
    let c_bar7 = ((c1 + c2) / 2.0).powi(7);
    let g = 0.5 * (1.0 - (c_bar7 / (c_bar7 + POW25_7)).sqrt());

    let a1p = (1.0 + g) * x.a;
    let a2p = (1.0 + g) * y.a;
    let c1p = a1p.hypot(x.b);
    let c2p = a2p.hypot(y.b);

    let hue = |b: f64, ap: f64| {
        if b == 0.0 && ap == 0.0 {
            0.0
        } else {
            let h = b.atan2(ap).to_degrees();
            if h < 0.0 {
                h + 360.0
            } else {
                h
            }
        }
    };
    let h1p = hue(x.b, a1p);
    let h2p = hue(y.b, a2p);

    let dl = y.l - x.l;
    let dc = c2p - c1p;
    let cprod = c1p * c2p;
    let dh_deg = if cprod == 0.0 {
        0.0
    } else {
        let d = h2p - h1p;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let dh = 2.0 * cprod.sqrt() * (dh_deg.to_radians() / 2.0).sin();

    let l_bar = (x.l + y.l) / 2.0;
    let c_bar_p = (c1p + c2p) / 2.0;
    let h_bar = if cprod == 0.0 {
        h1p + h2p
    } else if (h1p - h2p).abs() <= 180.0 {
        (h1p + h2p) / 2.0
    } else if h1p + h2p < 360.0 {
        (h1p + h2p + 360.0) / 2.0
    } else {
        (h1p + h2p - 360.0) / 2.0
    };

    let t = 1.0 - 0.17 * (h_bar - 30.0).to_radians().cos()
        + 0.24 * (2.0 * h_bar).to_radians().cos()
        + 0.32 * (3.0 * h_bar + 6.0).to_radians().cos()
        - 0.20 * (4.0 * h_bar - 63.0).to_radians().cos();
    let d_theta = 30.0 * (-((h_bar - 275.0) / 25.0).powi(2)).exp();
    let cbp7 = c_bar_p.powi(7);
    let r_c = 2.0 * (cbp7 / (cbp7 + POW25_7)).sqrt();
    let l50 = (l_bar - 50.0).powi(2);
    let s_l = 1.0 + 0.015 * l50 / (20.0 + l50).sqrt();
    let s_c = 1.0 + 0.045 * c_bar_p;
    let s_h = 1.0 + 0.015 * c_bar_p * t;
    let r_t = -(2.0 * d_theta).to_radians().sin() * r_c;

    let tl = dl / s_l;
    let tc = dc / s_c;
    let th = dh / s_h;
    (tl * tl + tc * tc + th * th + r_t * tc * th).max(0.0).sqrt()
}

/// Result of a chroma-gated hue comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HueDiff {
    Degrees(f64),
    /// At least one side is too close to the neutral axis for hue to mean anything.
    Gated,
}

impl HueDiff {
    pub fn degrees(self) -> Option<f64> {
        match self {
            HueDiff::Degrees(d) => Some(d),
            HueDiff::Gated => None,
        }
    }
}

pub fn hue_diff_deg(x: Lab, y: Lab, chroma_gate: f64) -> HueDiff {
    let (px, py) = (lab_to_lch(x), lab_to_lch(y));
    if px.c < chroma_gate || py.c < chroma_gate {
        return HueDiff::Gated;
    }
    let d = (px.h - py.h).abs();
    HueDiff::Degrees(d.min(360.0 - d))
}
