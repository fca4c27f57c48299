use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// An 8-bit RGB pixel grid, rows top to bottom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    rgb: Vec<u8>,
}

impl Image {
    pub fn from_rgb(width: usize, height: usize, rgb: Vec<u8>) -> Image {
        assert_eq!(rgb.len(), width * height * 3);
        Image { width, height, rgb }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn rgb(&self) -> &[u8] {
        &self.rgb
    }

    pub fn pixel(&self, i: usize, j: usize) -> [u8; 3] {
        let k = 3 * (j * self.width + i);
        [self.rgb[k], self.rgb[k + 1], self.rgb[k + 2]]
    }

    /// Binary PPM (P6).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    /// Writes PNG when the path ends in `.png`, PPM otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        let is_png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png {
            ::image::save_buffer(
                path,
                &self.rgb,
                self.width as u32,
                self.height as u32,
                ::image::ExtendedColorType::Rgb8,
            )
            .map_err(|e| Error::Io(std::io::Error::other(e)))
        } else {
            let mut f = std::fs::File::create(path)?;
            f.write_all(&self.to_ppm())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_header() {
        let img = Image::from_rgb(2, 1, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(img.to_ppm(), b"P6\n2 1\n255\n\x01\x02\x03\x04\x05\x06".to_vec());
        assert_eq!(img.pixel(1, 0), [4, 5, 6]);
    }
}
