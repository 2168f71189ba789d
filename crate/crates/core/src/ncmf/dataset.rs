//! Dataset text format and the synthetic Gaussian benchmark.
//!
//! ```text
//! M D_0 D_1 ... D_{M-1}
//! label v v v ...        # descriptor values concatenated in order
//! ```

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{ClassId, Dataset, DescriptorSample, NcmError};
use crate::alphabet::strip_comment;

fn parse_err(line: usize, message: impl Into<String>) -> NcmError {
    NcmError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_dataset(text: &str) -> Result<Dataset, NcmError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let header: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse().map_err(|_| parse_err(hline, format!("bad header field `{f}`"))))
        .collect::<Result<_, _>>()?;
    let (&m, dims) = header
        .split_first()
        .ok_or_else(|| parse_err(hline, "empty header"))?;
    if m != dims.len() {
        return Err(parse_err(
            hline,
            format!("header declares {m} descriptors but lists {} dimensions", dims.len()),
        ));
    }
    let width: usize = dims.iter().sum();

    let mut samples = Vec::new();
    for (lineno, line) in lines {
        let mut fields = line.split_whitespace();
        let label: ClassId = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| parse_err(lineno, "label must be a non-negative integer"))?;
        let values: Vec<f64> = fields
            .map(|f| f.parse().map_err(|_| parse_err(lineno, format!("bad value `{f}`"))))
            .collect::<Result<_, _>>()?;
        if values.len() != width {
            return Err(parse_err(
                lineno,
                format!("expected {width} values, got {}", values.len()),
            ));
        }
        let mut rest = values.as_slice();
        let descriptors = dims
            .iter()
            .map(|&d| {
                let (head, tail) = rest.split_at(d);
                rest = tail;
                head.to_vec()
            })
            .collect();
        samples.push(DescriptorSample::labeled(label, descriptors));
    }
    Dataset::new(dims.to_vec(), samples)
}

pub fn write_dataset(dataset: &Dataset) -> String {
    let mut out = String::new();
    let _ = write!(out, "{}", dataset.dims().len());
    for d in dataset.dims() {
        let _ = write!(out, " {d}");
    }
    out.push('\n');
    for s in dataset.samples() {
        let _ = write!(out, "{}", s.label.expect("labeled"));
        for v in s.descriptors.iter().flatten() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Isotropic Gaussian classes with unit variance. In descriptor `m` the
/// class means sit on the corners of a square (or a line for fewer than
/// three classes) with side `separation_sigma`, and each descriptor assigns
/// corners to classes in a different rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub n_classes: usize,
    pub n_descriptors: usize,
    pub dim: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub separation_sigma: f64,
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            n_classes: 4,
            n_descriptors: 2,
            dim: 2,
            train_per_class: 125,
            test_per_class: 125,
            separation_sigma: 6.0,
            seed: 42,
        }
    }
}

impl BenchmarkSpec {
    fn class_mean(&self, class: usize, descriptor: usize) -> Vec<f64> {
        let slot = (class + descriptor) % self.n_classes;
        // grid of side ceil(sqrt(n)) so neighbouring means are exactly
        // `separation_sigma` apart
        let side = (self.n_classes as f64).sqrt().ceil() as usize;
        let cell = [slot % side, slot / side];
        (0..self.dim)
            .map(|j| cell.get(j).copied().unwrap_or(0) as f64 * self.separation_sigma)
            .collect()
    }
}

/// Returns `(train, test)`, drawn from independent streams.
pub fn gaussian_benchmark(spec: &BenchmarkSpec) -> (Dataset, Dataset) {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let draw = |per_class: usize, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::with_capacity(per_class * spec.n_classes);
        for _ in 0..per_class {
            for c in 0..spec.n_classes {
                let descriptors = (0..spec.n_descriptors)
                    .map(|m| {
                        spec.class_mean(c, m)
                            .into_iter()
                            .map(|mu| mu + normal.sample(&mut rng))
                            .collect()
                    })
                    .collect();
                samples.push(DescriptorSample::labeled(c, descriptors));
            }
        }
        Dataset::new(vec![spec.dim; spec.n_descriptors], samples).expect("well-formed benchmark")
    };
    (
        draw(spec.train_per_class, spec.seed),
        draw(spec.test_per_class, spec.seed ^ 0x9e37_79b9_7f4a_7c15),
    )
}
