//! Synthetic desk-scale classification tasks.
//!
//! Four deterministic datasets stand in for full image benchmarks: two-moons,
//! Gaussian blobs, concentric rings (all 2-D point clouds) and a tiny 8x8
//! single-channel image task. Contents depend only on the dataset id, so
//! accuracies recorded in benchmark files stay meaningful across processes.

use crate::rng::RandomStream;
use crate::tensor::Tensor;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DataError {
    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),
}

/// Shape of one input sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputShape {
    Flat(usize),
    Image {
        channels: usize,
        height: usize,
        width: usize,
    },
}

impl InputShape {
    pub fn numel(&self) -> usize {
        match *self {
            InputShape::Flat(n) => n,
            InputShape::Image {
                channels,
                height,
                width,
            } => channels * height * width,
        }
    }

    /// Shape of a batch of `n` samples.
    pub fn batch_shape(&self, n: usize) -> Vec<usize> {
        match *self {
            InputShape::Flat(d) => vec![n, d],
            InputShape::Image {
                channels,
                height,
                width,
            } => vec![n, channels, height, width],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetId {
    Moons,
    Blobs,
    Rings,
    Digits,
}

impl DatasetId {
    pub const ALL: [DatasetId; 4] = [
        DatasetId::Moons,
        DatasetId::Blobs,
        DatasetId::Rings,
        DatasetId::Digits,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetId::Moons => "moons",
            DatasetId::Blobs => "blobs",
            DatasetId::Rings => "rings",
            DatasetId::Digits => "digits",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, DataError> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| DataError::UnknownDataset(name.to_string()))
    }

    pub fn input_shape(self) -> InputShape {
        match self {
            DatasetId::Digits => InputShape::Image {
                channels: 1,
                height: 8,
                width: 8,
            },
            _ => InputShape::Flat(2),
        }
    }

    pub fn class_count(self) -> usize {
        match self {
            DatasetId::Digits => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A mini-batch: stacked inputs plus integer class labels.
#[derive(Clone, Debug)]
pub struct Batch {
    pub inputs: Tensor,
    pub labels: Vec<usize>,
}

/// One split of a dataset, stored sample-major.
#[derive(Clone, Debug)]
pub struct Split {
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Split {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Assemble a batch from sample indices.
    pub fn batch(&self, indices: &[usize], shape: InputShape) -> Batch {
        let mut data = Vec::with_capacity(indices.len() * shape.numel());
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(&self.samples[i]);
            labels.push(self.labels[i]);
        }
        Batch {
            inputs: Tensor::new(shape.batch_shape(indices.len()), data)
                .expect("split samples match the input shape"),
            labels,
        }
    }

    /// The whole split as one batch.
    pub fn full_batch(&self, shape: InputShape) -> Batch {
        let indices: Vec<usize> = (0..self.len()).collect();
        self.batch(&indices, shape)
    }
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub id: DatasetId,
    pub input: InputShape,
    pub classes: usize,
    pub train: Split,
    pub test: Split,
}

const TRAIN_SIZE: usize = 256;
const TEST_SIZE: usize = 128;

impl Dataset {
    /// Generate the dataset. Deterministic per id.
    pub fn load(id: DatasetId) -> Self {
        let mut rng = RandomStream::from_seed(0x5eed_0000).child(id.name(), 0);
        let input = id.input_shape();
        let classes = id.class_count();
        let train = generate_split(id, TRAIN_SIZE, &mut rng);
        let test = generate_split(id, TEST_SIZE, &mut rng);
        Dataset {
            id,
            input,
            classes,
            train,
            test,
        }
    }
}

fn generate_split(id: DatasetId, n: usize, rng: &mut RandomStream) -> Split {
    let mut samples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % id.class_count();
        samples.push(generate_sample(id, class, rng));
        labels.push(class);
    }
    Split { samples, labels }
}

fn generate_sample(id: DatasetId, class: usize, rng: &mut RandomStream) -> Vec<f64> {
    match id {
        DatasetId::Moons => {
            let theta = rng.uniform() * std::f64::consts::PI;
            let noise = 0.15;
            let (x, y) = if class == 0 {
                (theta.cos(), theta.sin())
            } else {
                (1.0 - theta.cos(), 0.5 - theta.sin())
            };
            vec![x + noise * rng.normal(), y + noise * rng.normal()]
        }
        DatasetId::Blobs => {
            let center = if class == 0 { -1.5 } else { 1.5 };
            vec![center + 0.5 * rng.normal(), 0.5 * rng.normal()]
        }
        DatasetId::Rings => {
            let theta = rng.uniform() * std::f64::consts::TAU;
            let radius = if class == 0 { 0.5 } else { 1.5 };
            let r = radius + 0.15 * rng.normal();
            vec![r * theta.cos(), r * theta.sin()]
        }
        DatasetId::Digits => {
            let mut img = vec![0.0f64; 64];
            match class {
                0 => {
                    // horizontal bar
                    for col in 0..8 {
                        img[3 * 8 + col] = 1.0;
                        img[4 * 8 + col] = 1.0;
                    }
                }
                1 => {
                    // vertical bar
                    for row in 0..8 {
                        img[row * 8 + 3] = 1.0;
                        img[row * 8 + 4] = 1.0;
                    }
                }
                2 => {
                    // main diagonal
                    for d in 0..8 {
                        img[d * 8 + d] = 1.0;
                        if d + 1 < 8 {
                            img[d * 8 + d + 1] = 0.6;
                        }
                    }
                }
                _ => {
                    // centered blob
                    for row in 2..6 {
                        for col in 2..6 {
                            img[row * 8 + col] = 0.8;
                        }
                    }
                }
            }
            let gain = 0.8 + 0.4 * rng.uniform();
            for px in img.iter_mut() {
                *px = *px * gain + 0.2 * rng.normal();
            }
            img
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datasets_are_deterministic() {
        for id in DatasetId::ALL {
            let a = Dataset::load(id);
            let b = Dataset::load(id);
            assert_eq!(a.train.samples, b.train.samples);
            assert_eq!(a.test.labels, b.test.labels);
            assert_eq!(a.train.len(), 256);
            assert_eq!(a.test.len(), 128);
        }
    }

    #[test]
    fn labels_are_in_range_and_balanced() {
        for id in DatasetId::ALL {
            let d = Dataset::load(id);
            let classes = d.classes;
            assert!(d.train.labels.iter().all(|&l| l < classes));
            let count0 = d.train.labels.iter().filter(|&&l| l == 0).count();
            // round-robin class assignment keeps the split balanced
            assert!(count0 >= d.train.len() / classes - 1);
        }
    }

    #[test]
    fn batch_shapes_follow_input_shape() {
        let d = Dataset::load(DatasetId::Digits);
        let b = d.train.batch(&[0, 1, 2], d.input);
        assert_eq!(b.inputs.shape(), &[3, 1, 8, 8]);
        assert_eq!(b.labels.len(), 3);
        let m = Dataset::load(DatasetId::Moons);
        let b = m.test.full_batch(m.input);
        assert_eq!(b.inputs.shape(), &[128, 2]);
    }

    #[test]
    fn name_round_trip() {
        for id in DatasetId::ALL {
            assert_eq!(DatasetId::from_name(id.name()).unwrap(), id);
        }
        assert!(DatasetId::from_name("cifar").is_err());
    }
}
