//! Deterministic low-discrepancy sampling of strategy boxes.
//!
//! All sampling in residual reports goes through a Halton sequence, so
//! every report is reproducible from its recorded `(box, count, seed)`.

/// Axis-aligned box in strategy space.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b), "empty box");
        SampleBox { lo, hi }
    }

    /// The default report box: `[-half, half]^n`.
    pub fn symmetric(dim: usize, half: f64) -> Self {
        SampleBox {
            lo: vec![-half; dim],
            hi: vec![half; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

/// Halton-sequence sampler over a box. Distinct seeds select disjoint,
/// reproducible index windows of the same sequence.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub bounds: SampleBox,
    pub count: usize,
    pub seed: u64,
}

impl Sampler {
    pub fn new(bounds: SampleBox, count: usize, seed: u64) -> Self {
        Sampler {
            bounds,
            count,
            seed,
        }
    }

    /// The default residual-report sampler: 256 points in `[-2, 2]^n`.
    pub fn default_for(dim: usize, seed: u64) -> Self {
        Sampler::new(SampleBox::symmetric(dim, 2.0), 256, seed)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let start = 1 + self.seed as usize * self.count;
        (start..start + self.count).map(move |index| {
            (0..self.bounds.dim())
                .map(|axis| {
                    let u = radical_inverse(index, PRIMES[axis % PRIMES.len()]);
                    self.bounds.lo[axis] + u * (self.bounds.hi[axis] - self.bounds.lo[axis])
                })
                .collect()
        })
    }
}

const PRIMES: [usize; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut index: usize, base: usize) -> f64 {
    let mut result = 0.0;
    let mut frac = 1.0 / base as f64;
    while index > 0 {
        result += (index % base) as f64 * frac;
        index /= base;
        frac /= base as f64;
    }
    result
}
