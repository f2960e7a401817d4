//! Color-fidelity benchmark harness for text-to-image models.
//!
//! The crate builds the prompt corpus from embedded color taxonomies, object
//! catalogs and templates, then scores generated images by extracting a
//! dominant color from each object mask and comparing it against the prompted
//! color with three perceptual metrics.
//!
//! ```
//! use colorbench::colorspace::{ciede2000, srgb_to_lab, Rgb8};
//!
//! let red = srgb_to_lab(Rgb8::new(185, 40, 66));
//! let crimson = srgb_to_lab(Rgb8::new(220, 20, 60));
//! assert!(ciede2000(red, crimson) > 1.0);
//! ```

pub mod cli;
pub mod colorspace;
pub mod corpus;
pub mod dominant;
mod error;
pub mod masks;
pub mod report;
pub mod scoring;
pub mod taxonomy;

pub use error::{Error, Result};
