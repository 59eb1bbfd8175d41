//! Lloyd's k-means on 3-channel points in `[0, 1)`.
//!
//! Distances use squared differences through the context. Centroid updates
//! are native sums and divisions. Equidistant centroids resolve to the lower
//! index; an empty cluster keeps its previous centre.

use rand::seq::index::sample;
use rand::Rng;

use super::MulCtx;

pub const DIM: usize = 3;
pub const CLUSTERS: usize = 6;
pub const ITERATIONS: usize = 10;

pub struct KmeansInput {
    pub points: Vec<[f32; DIM]>,
    pub initial: Vec<[f32; DIM]>,
}

impl KmeansInput {
    /// `count` points scattered around `CLUSTERS` random centres; initial
    /// centroids are a seeded sample of the points.
    pub fn generate<R: Rng>(count: usize, rng: &mut R) -> Self {
        let centres: Vec<[f32; DIM]> =
            (0..CLUSTERS).map(|_| std::array::from_fn(|_| rng.gen_range(0.15f32..0.85))).collect();
        let points: Vec<[f32; DIM]> = (0..count)
            .map(|i| {
                let c = centres[i % CLUSTERS];
                std::array::from_fn(|d| (c[d] + rng.gen_range(-0.15f32..0.15)).clamp(0.0, 0.999))
            })
            .collect();
        let initial = sample(rng, count, CLUSTERS.min(count)).iter().map(|i| points[i]).collect();
        KmeansInput { points, initial }
    }
}

fn distance2(p: &[f32; DIM], c: &[f32; DIM], ctx: &mut MulCtx) -> f32 {
    p.iter().zip(c).fold(0.0, |acc, (&a, &b)| {
        let d = a - b;
        acc + ctx.mul(d, d)
    })
}

/// Final centroid coordinates, flattened.
pub fn run(input: &KmeansInput, ctx: &mut MulCtx) -> Vec<f32> {
    let mut centroids = input.initial.clone();
    let mut assignment = vec![0usize; input.points.len()];
    for _ in 0..ITERATIONS {
        for (p, slot) in input.points.iter().zip(assignment.iter_mut()) {
            let mut best = 0;
            let mut best_d = f32::INFINITY;
            for (ci, c) in centroids.iter().enumerate() {
                let d = distance2(p, c, ctx);
                if d < best_d {
                    best = ci;
                    best_d = d;
                }
            }
            *slot = best;
        }
        let mut sums = vec![[0.0f32; DIM]; centroids.len()];
        let mut counts = vec![0u32; centroids.len()];
        for (p, &ci) in input.points.iter().zip(&assignment) {
            counts[ci] += 1;
            for d in 0..DIM {
                sums[ci][d] += p[d];
            }
        }
        for ((c, s), &n) in centroids.iter_mut().zip(&sums).zip(&counts) {
            if n > 0 {
                for d in 0..DIM {
                    c[d] = s[d] / n as f32;
                }
            }
        }
    }
    centroids.iter().flatten().copied().collect()
}
