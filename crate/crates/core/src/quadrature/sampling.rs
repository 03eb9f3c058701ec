//! Seeded uniform sampling on spheres and of sphere blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Samples per independent random stream in chunked Monte Carlo.
pub const CHUNK: usize = 65_536;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereSampler {
    pub d: usize,
    pub seed: u64,
}

impl SphereSampler {
    pub fn new(d: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("sphere sampling needs d >= 2, got {d}")));
        }
        Ok(Self { d, seed })
    }

    /// Independent stream `k` for the same seed; chunked runs stay thread-count independent.
    pub fn stream(&self, k: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k);
        rng
    }

    /// Overwrites `out` (length d) with a uniform point on S^{d-1}.
    pub fn fill(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        loop {
            let mut norm2 = 0.0;
            for v in out.iter_mut() {
                *v = StandardNormal.sample(rng);
                norm2 += *v * *v;
            }
            if norm2 > 1e-300 {
                let inv = 1.0 / norm2.sqrt();
                out.iter_mut().for_each(|v| *v *= inv);
                return;
            }
        }
    }

    /// `count` points, row-major, drawn from stream 0.
    pub fn sample(&self, count: usize) -> Vec<f64> {
        let mut rng = self.stream(0);
        let mut out = vec![0.0; count * self.d];
        for chunk in out.chunks_mut(self.d) {
            self.fill(&mut rng, chunk);
        }
        out
    }
}

/// First m coordinates of a uniform point on S^{m k - 1}, written to `out`.
pub fn ball_block_sample(m: usize, k: usize, rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut norm2 = 0.0;
    for v in out.iter_mut().take(m) {
        *v = StandardNormal.sample(rng);
        norm2 += *v * *v;
    }
    for _ in m..m * k {
        let g: f64 = StandardNormal.sample(rng);
        norm2 += g * g;
    }
    let inv = 1.0 / norm2.sqrt();
    out.iter_mut().take(m).for_each(|v| *v *= inv);
}

/// Splits `total` samples into fixed-size chunks: (stream index, count).
pub fn chunks(total: usize) -> Vec<(u64, usize)> {
    let mut out = vec![];
    let mut left = total;
    let mut k = 0;
    while left > 0 {
        let c = left.min(CHUNK);
        out.push((k, c));
        left -= c;
        k += 1;
    }
    out
}

/// Running mean and variance accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments {
    pub n: f64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        let mean = self.mean();
        let var = ((self.sum_sq / self.n - mean * mean) * self.n / (self.n - 1.0)).max(0.0);
        (var / self.n).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_norm_and_deterministic() {
        let s = SphereSampler::new(5, 42).unwrap();
        let a = s.sample(100);
        let b = s.sample(100);
        assert_eq!(a, b);
        for p in a.chunks(5) {
            let n: f64 = p.iter().map(|v| v * v).sum();
            assert!((n.sqrt() - 1.0).abs() < 1e-14);
        }
        assert!(SphereSampler::new(1, 0).is_err());
    }

    #[test]
    fn block_inside_ball() {
        let s = SphereSampler::new(2, 1).unwrap();
        let mut rng = s.stream(3);
        let mut v = [0.0; 3];
        for _ in 0..1000 {
            ball_block_sample(3, 2, &mut rng, &mut v);
            assert!(v.iter().map(|x| x * x).sum::<f64>() <= 1.0);
        }
        ball_block_sample(3, 1, &mut rng, &mut v);
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
