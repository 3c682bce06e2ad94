//! Seeded digit-like stroke images used as a self-contained MNIST stand-in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::image::GridImage;
use crate::error::{OtError, Result};

/// Side length of generated digit images.
pub const DIGIT_SIZE: usize = 28;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub label: usize,
    pub image: GridImage,
}

/// Stroke templates, one per synthetic class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Ring,
    Bar,
    Cross,
    Ell,
    Diagonal,
    Blob,
}

impl Shape {
    pub const ALL: [Shape; 6] = [Shape::Ring, Shape::Bar, Shape::Cross, Shape::Ell, Shape::Diagonal, Shape::Blob];

    /// Distance from `(x, y)` to the template centred at `(cx, cy)` with size factor `s`.
    fn distance(self, x: f64, y: f64, cx: f64, cy: f64, s: f64) -> f64 {
        let seg = |ax: f64, ay: f64, bx: f64, by: f64| {
            segment_distance(x, y, cx + ax * s, cy + ay * s, cx + bx * s, cy + by * s)
        };
        match self {
            Shape::Ring => (((x - cx).powi(2) + (y - cy).powi(2)).sqrt() - 7.0 * s).abs(),
            Shape::Bar => seg(0.0, -7.5, 0.0, 7.5),
            Shape::Cross => seg(0.0, -7.0, 0.0, 7.0).min(seg(-7.0, 0.0, 7.0, 0.0)),
            Shape::Ell => seg(-4.0, -7.5, -4.0, 7.5).min(seg(-4.0, 7.5, 5.0, 7.5)),
            Shape::Diagonal => seg(-6.0, 7.5, 6.0, -7.5),
            Shape::Blob => (((x - cx).powi(2) + (y - cy).powi(2)).sqrt() - 5.0 * s).max(0.0),
        }
    }
}

fn segment_distance(x: f64, y: f64, ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((x - ax) * dx + (y - ay) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (px, py) = (ax + t * dx, ay + t * dy);
    ((x - px).powi(2) + (y - py).powi(2)).sqrt()
}

/// Anti-aliased stroke rendering: full intensity within `thickness − 1` of the
/// template, fading linearly to zero at `thickness`.
pub fn render_shape(
    shape: Shape,
    width: usize,
    height: usize,
    center: (f64, f64),
    scale: f64,
    thickness: f64,
    gain: f64,
) -> Result<GridImage> {
    let mut px = vec![0.0; width * height];
    for row in 0..height {
        for col in 0..width {
            let d = shape.distance(col as f64, row as f64, center.0, center.1, scale);
            let v = (thickness - d).clamp(0.0, 1.0);
            px[row * width + col] = gain * v;
        }
    }
    GridImage::new(width, height, px)
}

/// `count` images cycling through `classes` labels, each a jittered stroke template.
///
/// Jitter per image: size factor in `[0.85, 1.15]`, stroke thickness in
/// `[1.6, 2.4]`, centre offset within ±2 px, intensity gain in `[0.8, 1.2]`.
pub fn synthetic_digits(count: usize, classes: usize, seed: u64) -> Result<Vec<LabeledImage>> {
    if classes < 2 || classes > Shape::ALL.len() {
        return Err(OtError::InvalidExperiment(format!(
            "synthetic corpus supports 2..={} classes, got {classes}",
            Shape::ALL.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mid = (DIGIT_SIZE as f64 - 1.0) / 2.0;
    (0..count)
        .map(|k| {
            let label = k % classes;
            let center = (mid + rng.random_range(-2.0..=2.0), mid + rng.random_range(-2.0..=2.0));
            let scale = rng.random_range(0.85..=1.15);
            let thickness = rng.random_range(1.6..=2.4);
            let gain = rng.random_range(0.8..=1.2);
            let image = render_shape(Shape::ALL[label], DIGIT_SIZE, DIGIT_SIZE, center, scale, thickness, gain)?;
            Ok(LabeledImage { label, image })
        })
        .collect()
}
