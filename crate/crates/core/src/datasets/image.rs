use crate::error::{OtError, Result};
use crate::Distribution;

/// Nonnegative intensity grid, stored row-major (`height` rows of `width`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridImage {
    width: usize,
    height: usize,
    intensities: Vec<f64>,
    pub timestamp: Option<String>,
}

impl GridImage {
    pub fn new(width: usize, height: usize, intensities: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(OtError::InvalidImage(format!("empty {width}x{height} grid")));
        }
        if intensities.len() != width * height {
            return Err(OtError::InvalidImage(format!(
                "{} intensities for a {width}x{height} grid",
                intensities.len()
            )));
        }
        if let Some(bad) = intensities.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(OtError::InvalidImage(format!("invalid intensity {bad}")));
        }
        if !intensities.iter().any(|&x| x > 0.0) {
            return Err(OtError::EmptyImage);
        }
        Ok(Self { width, height, intensities, timestamp: None })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let h = rows.len();
        let w = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != w) {
            return Err(OtError::InvalidImage("ragged rows".into()));
        }
        Self::new(w, h, rows.concat())
    }

    pub fn with_timestamp(mut self, ts: impl Into<String>) -> Self {
        self.timestamp = Some(ts.into());
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.intensities[row * self.width + col]
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let mut out = Self::new(self.width, self.height, self.intensities.iter().map(|x| x * c).collect())?;
        out.timestamp = self.timestamp.clone();
        Ok(out)
    }
}

/// Pixel masses normalized by total intensity, supported on `(col, row)` of positive pixels.
pub fn image_to_distribution(img: &GridImage) -> Result<Distribution> {
    let mut coords = Vec::new();
    let mut masses = Vec::new();
    for row in 0..img.height {
        for col in 0..img.width {
            let x = img.get(col, row);
            if x > 0.0 {
                coords.push(col as f64);
                coords.push(row as f64);
                masses.push(x);
            }
        }
    }
    if masses.is_empty() {
        return Err(OtError::EmptyImage);
    }
    Distribution::from_flat(2, coords, masses)
}

/// Centres `img` on a `canvas_w × canvas_h` canvas, then offsets it by `t = (dx, dy)` pixels.
pub fn embed_and_translate(img: &GridImage, canvas_w: usize, canvas_h: usize, t: [i64; 2]) -> Result<GridImage> {
    if canvas_w < img.width || canvas_h < img.height {
        return Err(OtError::PlacementError(format!(
            "{}x{} image does not fit a {canvas_w}x{canvas_h} canvas",
            img.width, img.height
        )));
    }
    let left = ((canvas_w - img.width) / 2) as i64 + t[0];
    let top = ((canvas_h - img.height) / 2) as i64 + t[1];
    if left < 0 || top < 0 || left as usize + img.width > canvas_w || top as usize + img.height > canvas_h {
        return Err(OtError::PlacementError(format!(
            "offset ({}, {}) moves the image outside the {canvas_w}x{canvas_h} canvas",
            t[0], t[1]
        )));
    }
    let (left, top) = (left as usize, top as usize);
    let mut out = vec![0.0; canvas_w * canvas_h];
    for row in 0..img.height {
        let dst = (top + row) * canvas_w + left;
        out[dst..dst + img.width].copy_from_slice(&img.intensities[row * img.width..(row + 1) * img.width]);
    }
    let mut canvas = GridImage::new(canvas_w, canvas_h, out)?;
    canvas.timestamp = img.timestamp.clone();
    Ok(canvas)
}
