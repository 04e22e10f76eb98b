//! The closed operation vocabulary of the proxy DSL: 24 unary and 11 binary
//! tensor operations, all total after [`sanitize`].
//!
//! Binary operands are reconciled before application (matrix multiplication
//! excepted, which has its own shape rule). Scalar-valued operations return
//! shape-(1,) tensors.

use crate::rng::RandomStream;
use crate::tensor::{reconcile, sanitize, Tensor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Abs,
    AddNoise,
    Determinant,
    ElementWiseInvert,
    Exp,
    FrobeniusNorm,
    GaussianInit,
    GreaterThanZero,
    Heaviside,
    L1Norm,
    LessThanZero,
    Log,
    LogDeterminant,
    NormalizedSum,
    Normalize,
    Numel,
    OnesLike,
    Relu,
    Sigmoid,
    Sign,
    Softmax,
    Power,
    Transpose,
    ZerosLike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    CosineSimilarity,
    ElementWiseProduct,
    Equal,
    GreaterThan,
    KlDiv,
    LessThan,
    MatMul,
    Max,
    Min,
    Subtract,
    Sum,
}

/// Identifier of any operation in the vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpId {
    Unary(UnaryOp),
    Binary(BinaryOp),
}

impl UnaryOp {
    pub const ALL: [UnaryOp; 24] = [
        UnaryOp::Abs,
        UnaryOp::AddNoise,
        UnaryOp::Determinant,
        UnaryOp::ElementWiseInvert,
        UnaryOp::Exp,
        UnaryOp::FrobeniusNorm,
        UnaryOp::GaussianInit,
        UnaryOp::GreaterThanZero,
        UnaryOp::Heaviside,
        UnaryOp::L1Norm,
        UnaryOp::LessThanZero,
        UnaryOp::Log,
        UnaryOp::LogDeterminant,
        UnaryOp::NormalizedSum,
        UnaryOp::Normalize,
        UnaryOp::Numel,
        UnaryOp::OnesLike,
        UnaryOp::Relu,
        UnaryOp::Sigmoid,
        UnaryOp::Sign,
        UnaryOp::Softmax,
        UnaryOp::Power,
        UnaryOp::Transpose,
        UnaryOp::ZerosLike,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Abs => "abs",
            UnaryOp::AddNoise => "add_noise",
            UnaryOp::Determinant => "determinant",
            UnaryOp::ElementWiseInvert => "element_wise_invert",
            UnaryOp::Exp => "exp",
            UnaryOp::FrobeniusNorm => "frobenius_norm",
            UnaryOp::GaussianInit => "gaussian_init",
            UnaryOp::GreaterThanZero => "greater_than_zero",
            UnaryOp::Heaviside => "heaviside",
            UnaryOp::L1Norm => "l1_norm",
            UnaryOp::LessThanZero => "less_than_zero",
            UnaryOp::Log => "log",
            UnaryOp::LogDeterminant => "log_determinant",
            UnaryOp::NormalizedSum => "normalized_sum",
            UnaryOp::Normalize => "normalize",
            UnaryOp::Numel => "numel",
            UnaryOp::OnesLike => "ones_like",
            UnaryOp::Relu => "relu",
            UnaryOp::Sigmoid => "sigmoid",
            UnaryOp::Sign => "sign",
            UnaryOp::Softmax => "softmax",
            UnaryOp::Power => "power",
            UnaryOp::Transpose => "transpose",
            UnaryOp::ZerosLike => "zeros_like",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 11] = [
        BinaryOp::CosineSimilarity,
        BinaryOp::ElementWiseProduct,
        BinaryOp::Equal,
        BinaryOp::GreaterThan,
        BinaryOp::KlDiv,
        BinaryOp::LessThan,
        BinaryOp::MatMul,
        BinaryOp::Max,
        BinaryOp::Min,
        BinaryOp::Subtract,
        BinaryOp::Sum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::CosineSimilarity => "cosine_similarity",
            BinaryOp::ElementWiseProduct => "element_wise_product",
            BinaryOp::Equal => "equal",
            BinaryOp::GreaterThan => "greater_than",
            BinaryOp::KlDiv => "kl_div",
            BinaryOp::LessThan => "less_than",
            BinaryOp::MatMul => "mat_mul",
            BinaryOp::Max => "max",
            BinaryOp::Min => "min",
            BinaryOp::Subtract => "subtract",
            BinaryOp::Sum => "sum",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }
}

impl OpId {
    /// Look an operation up by its text name; unknown names are rejected.
    pub fn from_name(name: &str) -> Result<Self, OpError> {
        if let Some(u) = UnaryOp::from_name(name) {
            return Ok(OpId::Unary(u));
        }
        if let Some(b) = BinaryOp::from_name(name) {
            return Ok(OpId::Binary(b));
        }
        Err(OpError::UnknownOp(name.to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            OpId::Unary(u) => u.name(),
            OpId::Binary(b) => b.name(),
        }
    }
}

/// Apply a unary operation. Total: any invalid intermediate is sanitized.
pub fn apply_unary(op: UnaryOp, t: &Tensor, rng: &mut RandomStream) -> Tensor {
    let raw = match op {
        UnaryOp::Abs => t.map(f64::abs),
        UnaryOp::AddNoise => t.map(|x| x + rng.normal()),
        UnaryOp::Determinant => match determinant(t) {
            Some(d) => Tensor::scalar(d),
            None => Tensor::empty(),
        },
        UnaryOp::ElementWiseInvert => t.map(|x| 1.0 / x),
        UnaryOp::Exp => t.map(f64::exp),
        UnaryOp::FrobeniusNorm => Tensor::scalar(t.data().iter().map(|x| x * x).sum::<f64>().sqrt()),
        UnaryOp::GaussianInit => t.map(|_| rng.normal()),
        UnaryOp::GreaterThanZero => t.map(|x| if x > 0.0 { 1.0 } else { 0.0 }),
        UnaryOp::Heaviside => t.map(|x| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                0.0
            } else {
                0.5
            }
        }),
        UnaryOp::L1Norm => Tensor::scalar(t.data().iter().map(|x| x.abs()).sum()),
        UnaryOp::LessThanZero => t.map(|x| if x < 0.0 { 1.0 } else { 0.0 }),
        UnaryOp::Log => t.map(f64::ln),
        UnaryOp::LogDeterminant => match determinant(t) {
            Some(d) => Tensor::scalar(d.ln()),
            None => Tensor::empty(),
        },
        UnaryOp::NormalizedSum => Tensor::scalar(t.mean()),
        UnaryOp::Normalize => normalize(t),
        UnaryOp::Numel => Tensor::scalar(t.numel() as f64),
        UnaryOp::OnesLike => t.map(|_| 1.0),
        UnaryOp::Relu => t.map(|x| x.max(0.0)),
        UnaryOp::Sigmoid => t.map(|x| 1.0 / (1.0 + (-x).exp())),
        UnaryOp::Sign => t.map(|x| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            }
        }),
        UnaryOp::Softmax => softmax(t),
        UnaryOp::Power => t.map(|x| x * x),
        UnaryOp::Transpose => t.transpose(),
        UnaryOp::ZerosLike => t.map(|_| 0.0),
    };
    sanitize(&raw)
}

/// Apply a binary operation after reconciling the operands. Total.
pub fn apply_binary(op: BinaryOp, a: &Tensor, b: &Tensor) -> Tensor {
    if op == BinaryOp::MatMul {
        return sanitize(&mat_mul(a, b));
    }
    let (a, b) = reconcile(a, b);
    let raw = match op {
        BinaryOp::CosineSimilarity => Tensor::scalar(cosine_similarity(&a, &b)),
        BinaryOp::ElementWiseProduct => a.zip(&b, |x, y| x * y),
        BinaryOp::Equal => a.zip(&b, |x, y| if x == y { 1.0 } else { 0.0 }),
        BinaryOp::GreaterThan => a.zip(&b, |x, y| if x > y { 1.0 } else { 0.0 }),
        BinaryOp::KlDiv => Tensor::scalar(kl_divergence(&a, &b)),
        BinaryOp::LessThan => a.zip(&b, |x, y| if x < y { 1.0 } else { 0.0 }),
        BinaryOp::MatMul => unreachable!(),
        BinaryOp::Max => a.zip(&b, f64::max),
        BinaryOp::Min => a.zip(&b, f64::min),
        BinaryOp::Subtract => a.zip(&b, |x, y| x - y),
        BinaryOp::Sum => a.zip(&b, |x, y| x + y),
    };
    sanitize(&raw)
}

/// Determinant via LU decomposition with partial pivoting.
/// `None` for anything that is not a square 2-D matrix.
fn determinant(t: &Tensor) -> Option<f64> {
    if !t.is_square_matrix() {
        return None;
    }
    let n = t.shape()[0];
    let mut m: Vec<f64> = t.data().to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row * n + col].abs() > m[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if m[pivot * n + col] == 0.0 {
            return Some(0.0);
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        det *= m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
        }
    }
    Some(det)
}

/// Scale all elements to [0, 1]; constant tensors map to zeros.
fn normalize(t: &Tensor) -> Tensor {
    let min = t.data().iter().copied().fold(f64::INFINITY, f64::min);
    let max = t.data().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if !range.is_finite() || range == 0.0 {
        return t.map(|_| 0.0);
    }
    t.map(|x| (x - min) / range)
}

/// Numerically stable softmax over all elements, keeping the shape.
fn softmax(t: &Tensor) -> Tensor {
    let max = t.data().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp = t.map(|x| (x - max).exp());
    let total = exp.sum();
    exp.map(|x| x / total)
}

fn cosine_similarity(a: &Tensor, b: &Tensor) -> f64 {
    let dot: f64 = a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum();
    let na: f64 = a.data().iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.data().iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// KL divergence between the softmax distributions of the two operands.
fn kl_divergence(a: &Tensor, b: &Tensor) -> f64 {
    let p = softmax(a);
    let q = softmax(b);
    p.data()
        .iter()
        .zip(q.data())
        .map(|(&pi, &qi)| if pi > 0.0 { pi * (pi.ln() - qi.ln()) } else { 0.0 })
        .sum()
}

/// Standard matrix product when both operands are 2-D with compatible inner
/// dimensions; otherwise both are flattened, length-reconciled and reduced to
/// their inner product (shape (1,)).
fn mat_mul(a: &Tensor, b: &Tensor) -> Tensor {
    if a.rank() == 2 && b.rank() == 2 && a.shape()[1] == b.shape()[0] {
        let (m, k) = (a.shape()[0], a.shape()[1]);
        let n = b.shape()[1];
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0.0;
                for c in 0..k {
                    acc += a.data()[i * k + c] * b.data()[c * n + j];
                }
                out[i * n + j] = acc;
            }
        }
        return Tensor::new(vec![m, n], out).expect("matmul shape is consistent");
    }
    let flat_a = Tensor::from_vec(a.data().to_vec());
    let flat_b = Tensor::from_vec(b.data().to_vec());
    let (fa, fb) = reconcile(&flat_a, &flat_b);
    Tensor::scalar(fa.data().iter().zip(fb.data()).map(|(x, y)| x * y).sum())
}
