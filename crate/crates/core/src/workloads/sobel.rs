//! 3x3 Sobel gradient magnitude. All nine weights of each kernel are
//! multiplied in, as the AxBench kernel does; border pixels are zero.

use super::pgm::GrayImage;
use super::MulCtx;

const KX: [[f32; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
const KY: [[f32; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];

/// Gradient magnitude per pixel, clamped to `[0, 255]`, row-major.
pub fn run(img: &GrayImage, ctx: &mut MulCtx) -> Vec<f32> {
    let (w, h) = (img.width, img.height);
    let mut out = vec![0.0f32; w * h];
    if w < 3 || h < 3 {
        return out;
    }
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let mut gx = 0.0f32;
            let mut gy = 0.0f32;
            for (j, (kx_row, ky_row)) in KX.iter().zip(&KY).enumerate() {
                for i in 0..3 {
                    let p = f32::from(img.get(x + i - 1, y + j - 1));
                    gx += ctx.mul(kx_row[i], p);
                    gy += ctx.mul(ky_row[i], p);
                }
            }
            let magnitude = (ctx.mul(gx, gx) + ctx.mul(gy, gy)).sqrt();
            out[y * w + x] = magnitude.min(255.0);
        }
    }
    out
}

/// Rounds a magnitude buffer back to 8-bit pixels.
pub fn to_image(width: usize, height: usize, values: &[f32]) -> GrayImage {
    let pixels = values.iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect();
    GrayImage { width, height, pixels }
}
