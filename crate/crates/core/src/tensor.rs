//! Dense n-dimensional tensors and the shape rules of the proxy DSL.
//!
//! Tensors are immutable row-major `f64` arrays. Two rules make every DSL
//! operation total over arbitrary operand shapes:
//!
//! * [`reconcile`] flattens the shorter of two operands, right-pads it with
//!   the constant 1.0 and reshapes it to the shape of the larger operand.
//! * [`sanitize`] replaces structurally invalid tensors with the scalar
//!   `[1.0]` and any non-finite element with 1.0.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Value substituted for invalid tensors and non-finite elements.
pub const SANITIZE_SUBSTITUTE: f64 = 1.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("shape {shape:?} implies {expected} elements, got {got}")]
    ShapeDataMismatch {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },
}

/// Dense row-major tensor of 64-bit floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Build a tensor, checking that `data` fills `shape` exactly.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TensorError> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(TensorError::ShapeDataMismatch {
                shape,
                expected,
                got: data.len(),
            });
        }
        Ok(Self { shape, data })
    }

    /// Shape-(1,) tensor holding a single value.
    pub fn scalar(value: f64) -> Self {
        Self {
            shape: vec![1],
            data: vec![value],
        }
    }

    /// 1-D tensor from a vector.
    pub fn from_vec(data: Vec<f64>) -> Self {
        Self {
            shape: vec![data.len()],
            data,
        }
    }

    /// Tensor with no elements; only [`sanitize`] produces or accepts these.
    pub fn empty() -> Self {
        Self {
            shape: vec![0],
            data: Vec::new(),
        }
    }

    pub fn filled(shape: Vec<usize>, value: f64) -> Self {
        let n: usize = shape.iter().product();
        Self {
            shape,
            data: vec![value; n],
        }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        Self::filled(shape, 0.0)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Element-wise map into a new tensor of the same shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Pairwise zip with another tensor of identical element count.
    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.numel(), other.numel());
        Self {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Same data under a new shape; element counts must match.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Self, TensorError> {
        Self::new(shape, self.data.clone())
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Mean of all elements; 0.0 for the (unreachable post-sanitize) empty case.
    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            self.sum() / self.data.len() as f64
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// True when `self` is 2-D with equal dimensions.
    pub fn is_square_matrix(&self) -> bool {
        self.rank() == 2 && self.shape[0] == self.shape[1]
    }

    /// Transpose. Rank-2 tensors swap axes; higher ranks reverse axis order;
    /// rank 0/1 are returned unchanged.
    pub fn transpose(&self) -> Self {
        if self.rank() < 2 {
            return self.clone();
        }
        let rank = self.rank();
        let new_shape: Vec<usize> = self.shape.iter().rev().copied().collect();
        let old_strides = row_major_strides(&self.shape);
        let new_strides = row_major_strides(&new_shape);
        let mut data = vec![0.0; self.data.len()];
        let mut index = vec![0usize; rank];
        for &value in &self.data {
            // position in the transposed layout: reversed index vector
            let mut offset = 0;
            for d in 0..rank {
                offset += index[rank - 1 - d] * new_strides[d];
            }
            data[offset] = value;
            // advance the row-major index over the source
            for d in (0..rank).rev() {
                index[d] += 1;
                if index[d] < self.shape[d] {
                    break;
                }
                index[d] = 0;
            }
        }
        let _ = old_strides;
        Self {
            shape: new_shape,
            data,
        }
    }
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

/// Make two tensors element-count compatible.
///
/// The tensor with fewer elements is flattened, right-padded with 1.0 up to
/// the larger element count and reshaped to the larger tensor's shape. Equal
/// counts reshape the second operand to the first operand's shape.
pub fn reconcile(a: &Tensor, b: &Tensor) -> (Tensor, Tensor) {
    use std::cmp::Ordering;
    match a.numel().cmp(&b.numel()) {
        Ordering::Equal => {
            let b2 = Tensor {
                shape: a.shape.clone(),
                data: b.data.clone(),
            };
            (a.clone(), b2)
        }
        Ordering::Greater => (a.clone(), pad_to(b, a)),
        Ordering::Less => (pad_to(a, b), b.clone()),
    }
}

fn pad_to(short: &Tensor, long: &Tensor) -> Tensor {
    let mut data = short.data.clone();
    data.resize(long.numel(), SANITIZE_SUBSTITUTE);
    Tensor {
        shape: long.shape.clone(),
        data,
    }
}

/// Replace invalid tensors with the scalar `[1.0]` and non-finite elements
/// with 1.0.
pub fn sanitize(t: &Tensor) -> Tensor {
    sanitize_with(t, SANITIZE_SUBSTITUTE)
}

/// [`sanitize`] with an explicit substitute value.
pub fn sanitize_with(t: &Tensor, substitute: f64) -> Tensor {
    if t.is_empty() {
        return Tensor::scalar(substitute);
    }
    if t.is_finite() {
        return t.clone();
    }
    t.map(|x| if x.is_finite() { x } else { substitute })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t2x2(vals: [f64; 4]) -> Tensor {
        Tensor::new(vec![2, 2], vals.to_vec()).unwrap()
    }

    #[test]
    fn new_rejects_mismatched_data() {
        let err = Tensor::new(vec![2, 2], vec![1.0, 2.0]).unwrap_err();
        assert!(matches!(err, TensorError::ShapeDataMismatch { .. }));
    }

    #[test]
    fn reconcile_pads_shorter_with_ones() {
        let a = t2x2([1.0, 2.0, 3.0, 4.0]);
        let b = Tensor::from_vec(vec![5.0, 6.0, 7.0]);
        let (ra, rb) = reconcile(&a, &b);
        assert_eq!(ra, a);
        assert_eq!(rb, t2x2([5.0, 6.0, 7.0, 1.0]));
    }

    #[test]
    fn reconcile_equal_length_is_identity() {
        let a = Tensor::from_vec(vec![1.0, 2.0]);
        let b = Tensor::from_vec(vec![3.0, 4.0]);
        let (ra, rb) = reconcile(&a, &b);
        assert_eq!(ra, a);
        assert_eq!(rb, b);
    }

    #[test]
    fn reconcile_pads_first_operand_too() {
        let a = Tensor::from_vec(vec![7.0]);
        let b = t2x2([1.0, 2.0, 3.0, 4.0]);
        let (ra, rb) = reconcile(&a, &b);
        assert_eq!(ra, t2x2([7.0, 1.0, 1.0, 1.0]));
        assert_eq!(rb, b);
    }

    #[test]
    fn reconcile_is_idempotent() {
        let a = t2x2([1.0, 2.0, 3.0, 4.0]);
        let b = Tensor::from_vec(vec![5.0, 6.0, 7.0]);
        let (ra, rb) = reconcile(&a, &b);
        let (ra2, rb2) = reconcile(&ra, &rb);
        assert_eq!(ra, ra2);
        assert_eq!(rb, rb2);
    }

    #[test]
    fn sanitize_replaces_non_finite_elements() {
        let t = Tensor::from_vec(vec![f64::NAN, 2.0]);
        assert_eq!(sanitize(&t), Tensor::from_vec(vec![1.0, 2.0]));
        let t = Tensor::from_vec(vec![f64::NEG_INFINITY, 0.0]);
        assert_eq!(sanitize(&t), Tensor::from_vec(vec![1.0, 0.0]));
    }

    #[test]
    fn sanitize_defaults_empty_tensor() {
        assert_eq!(sanitize(&Tensor::empty()), Tensor::scalar(1.0));
    }

    #[test]
    fn sanitize_keeps_valid_input() {
        let t = Tensor::from_vec(vec![1.0, -3.5]);
        assert_eq!(sanitize(&t), t);
    }

    #[test]
    fn transpose_swaps_matrix_axes() {
        let t = Tensor::new(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let tt = t.transpose();
        assert_eq!(tt.shape(), &[3, 2]);
        assert_eq!(tt.data(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        assert_eq!(tt.transpose(), t);
    }

    #[test]
    fn transpose_reverses_higher_rank_axes() {
        let t = Tensor::new(vec![2, 1, 3], (0..6).map(|x| x as f64).collect()).unwrap();
        let tt = t.transpose();
        assert_eq!(tt.shape(), &[3, 1, 2]);
        assert_eq!(tt.transpose(), t);
    }

    #[test]
    fn transpose_keeps_vectors() {
        let t = Tensor::from_vec(vec![1.0, 2.0]);
        assert_eq!(t.transpose(), t);
    }
}
