//! A small fully connected classifier: 64 -> 32 -> 32 -> 10 with ReLU between
//! layers and softmax on the output. Only the dense-layer products go through
//! the context.

use rand::Rng;

use super::MulCtx;

pub const LAYERS: [usize; 4] = [64, 32, 32, 10];

pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    /// Row-major `outputs x inputs`.
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

impl Dense {
    fn generate<R: Rng>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        // uniform with variance 2 / fan_in
        let bound = (6.0 / inputs as f32).sqrt();
        Dense {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| rng.gen_range(-bound..bound)).collect(),
            bias: (0..outputs).map(|_| rng.gen_range(-0.1f32..0.1)).collect(),
        }
    }

    fn forward(&self, x: &[f32], ctx: &mut MulCtx) -> Vec<f32> {
        self.weights
            .chunks(self.inputs)
            .zip(&self.bias)
            .map(|(row, &b)| row.iter().zip(x).fold(b, |acc, (&w, &v)| acc + ctx.mul(w, v)))
            .collect()
    }
}

pub struct MlpInput {
    pub layers: Vec<Dense>,
    /// `batch x LAYERS[0]` inputs in `[0, 1)`.
    pub samples: Vec<Vec<f32>>,
}

impl MlpInput {
    pub fn generate<R: Rng>(batch: usize, rng: &mut R) -> Self {
        let layers = LAYERS.windows(2).map(|w| Dense::generate(w[0], w[1], rng)).collect();
        let samples = (0..batch).map(|_| (0..LAYERS[0]).map(|_| rng.gen::<f32>()).collect()).collect();
        MlpInput { layers, samples }
    }
}

pub fn softmax(logits: &[f32]) -> Vec<f32> {
    let max = logits.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let exps: Vec<f32> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f32 = exps.iter().sum();
    exps.iter().map(|&e| e / total).collect()
}

/// Index of the largest entry; the first one wins ties.
pub fn argmax(values: &[f32]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f32::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}

/// Logits for every sample, flattened `batch x 10`.
pub fn run(input: &MlpInput, ctx: &mut MulCtx) -> Vec<f32> {
    let last = input.layers.len() - 1;
    let mut out = Vec::with_capacity(input.samples.len() * LAYERS[LAYERS.len() - 1]);
    for sample in &input.samples {
        let mut act = sample.clone();
        for (li, layer) in input.layers.iter().enumerate() {
            act = layer.forward(&act, ctx);
            if li != last {
                act.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        out.extend_from_slice(&act);
    }
    out
}

/// Top-1 class per sample after softmax.
pub fn predictions(logits: &[f32]) -> Vec<usize> {
    logits.chunks(LAYERS[LAYERS.len() - 1]).map(|z| argmax(&softmax(z))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::NativeMul;

    #[test]
    fn shapes_and_counts() {
        let input = MlpInput::generate(4, &mut crate::metrics::block_rng(1, 0));
        let mut ctx = MulCtx::new(&NativeMul);
        let logits = run(&input, &mut ctx);
        assert_eq!(logits.len(), 40);
        assert_eq!(ctx.count(), 4 * (64 * 32 + 32 * 32 + 32 * 10));
        assert_eq!(predictions(&logits).len(), 4);
    }

    #[test]
    fn softmax_and_argmax() {
        let p = softmax(&[1.0, 2.0, 3.0]);
        assert!((p.iter().sum::<f32>() - 1.0).abs() < 1e-6);
        assert_eq!(argmax(&p), 2);
        assert_eq!(argmax(&[5.0, 5.0, 1.0]), 0);
    }
}
