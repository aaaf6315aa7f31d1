//! Seeded random polynomial inputs for randomized identity checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use std::sync::Arc;

use crate::graded::{Chart, Derivation, Superfunction};
use crate::scalar::Scalar;
use crate::tensor::Matrix;

pub struct Sampler {
    rng: ChaCha8Rng,
    nvars: usize,
    degree: u32,
}

impl Sampler {
    pub fn new(seed: u64, nvars: usize, degree: u32) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            nvars,
            degree,
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// Polynomial with up to four terms of total degree at most the bound.
    pub fn poly(&mut self) -> Scalar {
        let terms = self.rng.gen_range(1..=4);
        let mut s = Scalar::zero();
        for _ in 0..terms {
            let c = self.rng.gen_range(-3i64..=3);
            if c == 0 {
                continue;
            }
            let deg = self.rng.gen_range(0..=self.degree);
            let mut t = Scalar::from_int(c);
            for _ in 0..deg {
                t = t * Scalar::var(self.rng.gen_range(0..self.nvars));
            }
            s = s + t;
        }
        s
    }

    pub fn one_form(&mut self) -> Vec<Scalar> {
        (0..self.nvars).map(|_| self.poly()).collect()
    }

    pub fn two_tensor(&mut self) -> Matrix {
        (0..self.nvars).map(|_| (0..self.nvars).map(|_| self.poly()).collect()).collect()
    }

    pub fn symmetric(&mut self) -> Matrix {
        let n = self.nvars;
        let mut m = crate::tensor::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = self.poly();
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        m
    }

    /// Homogeneous superfunction of degree `d` with up to three terms whose
    /// coefficients are polynomials in the first `nvars` base coordinates.
    /// Even slot exponents stay below 3.
    pub fn superfunction(&mut self, chart: &Arc<Chart>, d: u32) -> Superfunction {
        let slots: Vec<usize> = (0..chart.len()).filter(|&a| chart.degree(a) > 0).collect();
        let mut f = Superfunction::zero(chart);
        let mut shapes: Vec<Vec<u32>> = vec![vec![]];
        for &a in &slots {
            let top = if chart.degree(a) % 2 == 1 { 1 } else { 2 };
            shapes = shapes
                .into_iter()
                .flat_map(|v| (0..=top).map(move |k| [v.clone(), vec![k]].concat()))
                .collect();
        }
        shapes.retain(|v| v.iter().zip(&slots).map(|(k, &a)| k * chart.degree(a)).sum::<u32>() == d);
        if shapes.is_empty() {
            return f;
        }
        for _ in 0..self.int(1, 3) {
            let shape = shapes[self.int(0, shapes.len() as i64 - 1) as usize].clone();
            let mut t = Superfunction::scalar(chart, self.poly());
            for (k, &a) in shape.iter().zip(&slots) {
                t = t * Superfunction::coordinate(chart, a).pow(*k);
            }
            f = f + t;
        }
        f
    }

    /// Derivation of degree `k` with random homogeneous components.
    pub fn derivation(&mut self, chart: &Arc<Chart>, k: i32) -> Derivation {
        let mut comps = Vec::new();
        for a in 0..chart.len() {
            let d = chart.degree(a) as i32 + k;
            if d >= 0 && self.int(0, 2) > 0 {
                comps.push((a, self.superfunction(chart, d as u32)));
            }
        }
        Derivation::new(chart, k, comps).expect("homogeneous components")
    }
}
