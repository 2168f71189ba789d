//! Multi-descriptor Nearest Class Mean Forest.
//!
//! Samples carry several descriptor vectors. Every internal tree node picks
//! one descriptor and a subset of the classes present at the node, computes
//! those classes' means in that descriptor space, and routes each sample to
//! its nearest mean. Leaves hold normalised class histograms and the forest
//! averages the leaves a sample reaches.

mod dataset;
mod forest;

pub use dataset::{gaussian_benchmark, parse_dataset, write_dataset, BenchmarkSpec};
pub use forest::{evaluate, nearest_class_mean, train, Evaluation, Forest, ForestParams, Node, Tree};

use thiserror::Error;

pub type ClassId = usize;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum NcmError {
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dataset line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorSample {
    /// Absent at prediction time.
    pub label: Option<ClassId>,
    pub descriptors: Vec<Vec<f64>>,
}

impl DescriptorSample {
    pub fn labeled(label: ClassId, descriptors: Vec<Vec<f64>>) -> Self {
        Self {
            label: Some(label),
            descriptors,
        }
    }

    pub fn unlabeled(descriptors: Vec<Vec<f64>>) -> Self {
        Self {
            label: None,
            descriptors,
        }
    }

    /// Checks descriptor count, per-descriptor dimension, and finiteness.
    pub fn check_shape(&self, dims: &[usize]) -> Result<(), NcmError> {
        if self.descriptors.len() != dims.len() {
            return Err(NcmError::ShapeMismatch(format!(
                "expected {} descriptors, got {}",
                dims.len(),
                self.descriptors.len()
            )));
        }
        for (m, (v, &d)) in self.descriptors.iter().zip(dims).enumerate() {
            if v.len() != d {
                return Err(NcmError::ShapeMismatch(format!(
                    "descriptor {m} has dimension {}, expected {d}",
                    v.len()
                )));
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(NcmError::ShapeMismatch(format!(
                    "descriptor {m} has non-finite entries"
                )));
            }
        }
        Ok(())
    }
}

/// Labeled samples with a common descriptor layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dims: Vec<usize>,
    samples: Vec<DescriptorSample>,
}

impl Dataset {
    pub fn new(dims: Vec<usize>, samples: Vec<DescriptorSample>) -> Result<Self, NcmError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(NcmError::ShapeMismatch(
                "need at least one descriptor, each of positive dimension".into(),
            ));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.label.is_none() {
                return Err(NcmError::DegenerateData(format!("sample {i} has no label")));
            }
            s.check_shape(&dims)
                .map_err(|e| NcmError::ShapeMismatch(format!("sample {i}: {e}")))?;
        }
        Ok(Self { dims, samples })
    }

    /// Infers the layout from the first sample.
    pub fn from_samples(samples: Vec<DescriptorSample>) -> Result<Self, NcmError> {
        let dims = samples
            .first()
            .map(|s| s.descriptors.iter().map(Vec::len).collect())
            .ok_or_else(|| NcmError::DegenerateData("empty dataset".into()))?;
        Self::new(dims, samples)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn samples(&self) -> &[DescriptorSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub(crate) fn label(&self, i: usize) -> ClassId {
        self.samples[i].label.expect("dataset samples are labeled")
    }

    /// Distinct labels, ascending.
    pub fn classes(&self) -> Vec<ClassId> {
        let mut c: Vec<ClassId> = (0..self.len()).map(|i| self.label(i)).collect();
        c.sort_unstable();
        c.dedup();
        c
    }
}
