//! Binary PGM (P5) with 8-bit samples.

use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::LengthMismatch(width * height, pixels.len()));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// 256x256 test card: a diagonal ramp with a 32-pixel checkerboard and a
    /// fine modular texture on top.
    pub fn synthetic(width: usize, height: usize) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        let span = (width + height).saturating_sub(2).max(1);
        for y in 0..height {
            for x in 0..width {
                let ramp = (x + y) * 180 / span;
                let checker = if (x / 32 + y / 32) % 2 == 0 { 50 } else { 0 };
                let texture = (x * 7 + y * 13) % 23;
                pixels.push((ramp + checker + texture).min(255) as u8);
            }
        }
        GrayImage { width, height, pixels }
    }

    pub fn read_pgm<R: Read>(mut input: R) -> Result<Self> {
        let mut data = Vec::new();
        input.read_to_end(&mut data)?;
        let mut pos = 0;
        let mut header = Vec::with_capacity(4);
        while header.len() < 4 {
            // skip whitespace and comments
            while pos < data.len() {
                match data[pos] {
                    b'#' => {
                        while pos < data.len() && data[pos] != b'\n' {
                            pos += 1;
                        }
                    }
                    c if c.is_ascii_whitespace() => pos += 1,
                    _ => break,
                }
            }
            let start = pos;
            while pos < data.len() && !data[pos].is_ascii_whitespace() && data[pos] != b'#' {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Parse("truncated PGM header".into()));
            }
            header.push(String::from_utf8_lossy(&data[start..pos]).into_owned());
        }
        if header[0] != "P5" {
            return Err(Error::Parse(format!("expected P5 magic, got `{}`", header[0])));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad PGM header field `{s}`: {e}")))
        };
        let (width, height, maxval) = (num(&header[1])?, num(&header[2])?, num(&header[3])?);
        if maxval == 0 || maxval > 255 {
            return Err(Error::Parse(format!("only 8-bit PGM supported, maxval {maxval}")));
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let end = pos + width * height;
        if data.len() < end {
            return Err(Error::Parse("truncated PGM raster".into()));
        }
        GrayImage::new(width, height, data[pos..end].to_vec())
    }

    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)?;
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage::synthetic(17, 9);
        let mut buf = Vec::new();
        img.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n17 9\n255\n"));
        assert_eq!(GrayImage::read_pgm(buf.as_slice()).unwrap(), img);
    }

    #[test]
    fn pgm_header_with_comment() {
        let mut buf = b"P5\n# made by hand\n2 2\n255\n".to_vec();
        buf.extend_from_slice(&[1, 2, 3, 4]);
        let img = GrayImage::read_pgm(buf.as_slice()).unwrap();
        assert_eq!((img.width, img.height), (2, 2));
        assert_eq!(img.get(1, 1), 4);
    }

    #[test]
    fn pgm_rejects_bad_input() {
        assert!(GrayImage::read_pgm(&b"P2\n2 2\n255\n1234"[..]).is_err());
        assert!(GrayImage::read_pgm(&b"P5\n2 2\n65535\n"[..]).is_err());
        assert!(GrayImage::read_pgm(&b"P5\n2 2\n255\n12"[..]).is_err());
        assert!(GrayImage::read_pgm(&b"P5\n2"[..]).is_err());
    }

    #[test]
    fn synthetic_card_is_varied() {
        let img = GrayImage::synthetic(256, 256);
        let distinct: std::collections::BTreeSet<_> = img.pixels.iter().collect();
        assert!(distinct.len() > 200);
    }
}
