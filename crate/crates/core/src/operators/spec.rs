//! Immutable operator specifications.
//!
//! An `OperatorSpec` is a description of a monotone operator on R^d by
//! oracles: a matrix, a subdifferential with an exact prox formula, a
//! normal cone with an exact projection, a finite graph sample, or a
//! composition (Yosida wrap, sum, adjoint composition, product lift,
//! graph normal cone) of such descriptions.

use super::types::{OpError, SampledGraph, Vector};
use crate::linalg::Matrix;

/// Convex functions with an exact proximal formula.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ConvexFnSpec {
    /// f(x) = sum_i |x_i|.
    AbsValueSum,
    /// f(x) = <Qx, x>/2 + <b, x> with Q symmetric positive semidefinite.
    Quadratic { q: Matrix, b: Vector },
    /// Indicator of a convex set with exact projection.
    IndicatorOfSet { set: ConvexSetSpec },
    /// f(x) = scale * ||x - center||^p / p with p in {1, 2}.
    ShiftedPower { center: Vector, exponent: u8, scale: f64 },
}

impl ConvexFnSpec {
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexFnSpec::AbsValueSum => None,
            ConvexFnSpec::Quadratic { q, .. } => Some(q.cols()),
            ConvexFnSpec::IndicatorOfSet { set } => set.dim(),
            ConvexFnSpec::ShiftedPower { center, .. } => Some(center.dim()),
        }
    }

    pub fn validate(&self) -> Result<(), OpError> {
        match self {
            ConvexFnSpec::AbsValueSum => Ok(()),
            ConvexFnSpec::Quadratic { q, b } => {
                if !q.is_square() || q.cols() != b.dim() {
                    return Err(OpError::BadSpec("quadratic shape mismatch".into()));
                }
                let sym = q.symmetric_part();
                let min = sym.min_symmetric_eigenvalue();
                if min < -1e-9 {
                    return Err(OpError::BadSpec(format!(
                        "quadratic matrix is not positive semidefinite (min eigenvalue {min})"
                    )));
                }
                Ok(())
            }
            ConvexFnSpec::IndicatorOfSet { set } => set.validate(),
            ConvexFnSpec::ShiftedPower { exponent, scale, .. } => {
                if !matches!(exponent, 1 | 2) {
                    return Err(OpError::BadSpec("power exponent must be 1 or 2".into()));
                }
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(OpError::BadSpec("power scale must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

/// Nonempty convex sets with an exact Euclidean projection formula.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ConvexSetSpec {
    Singleton { point: Vector },
    /// Axis box [lo, hi]; entries may be -inf/+inf for half-lines.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// { x : <normal, x> <= offset }.
    Halfspace { normal: Vector, offset: f64 },
    /// The graph { (y, Ay) } of a linear map A, as a subset of R^{cols+rows}.
    AffineGraph { a: Matrix },
}

impl ConvexSetSpec {
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexSetSpec::Singleton { point } => Some(point.dim()),
            ConvexSetSpec::Box { lo, .. } => Some(lo.len()),
            ConvexSetSpec::Halfspace { normal, .. } => Some(normal.dim()),
            ConvexSetSpec::AffineGraph { a } => Some(a.cols() + a.rows()),
        }
    }

    pub fn validate(&self) -> Result<(), OpError> {
        match self {
            ConvexSetSpec::Singleton { .. } => Ok(()),
            ConvexSetSpec::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(OpError::BadSpec("box bounds shape mismatch".into()));
                }
                for (l, h) in lo.iter().zip(hi) {
                    if l.is_nan() || h.is_nan() || l > h {
                        return Err(OpError::BadSpec("box requires lo <= hi".into()));
                    }
                }
                Ok(())
            }
            ConvexSetSpec::Halfspace { normal, offset } => {
                if normal.norm() <= 0.0 || !offset.is_finite() {
                    return Err(OpError::BadSpec("halfspace needs a nonzero normal".into()));
                }
                Ok(())
            }
            ConvexSetSpec::AffineGraph { .. } => Ok(()),
        }
    }

    /// Exact Euclidean projection.
    pub fn project(&self, w: &Vector) -> Vector {
        match self {
            ConvexSetSpec::Singleton { point } => point.clone(),
            ConvexSetSpec::Box { lo, hi } => {
                let coords = w
                    .coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(&v, (&l, &h))| v.max(l).min(h))
                    .collect();
                Vector::new(coords).expect("clamped coordinates are finite")
            }
            ConvexSetSpec::Halfspace { normal, offset } => {
                let slack = normal.dot(w) - offset;
                if slack <= 0.0 {
                    w.clone()
                } else {
                    w.sub(&normal.scale(slack / normal.dot(normal)))
                }
            }
            ConvexSetSpec::AffineGraph { a } => {
                // minimize ||y - u||^2 + ||Ay - v||^2 => (I + A^T A) y = u + A^T v
                let dy = a.cols();
                let (u, v) = w.split(dy);
                let mut m = a.transpose().matmul(a);
                for i in 0..dy {
                    m.set(i, i, m.get(i, i) + 1.0);
                }
                let rhs: Vec<f64> = u
                    .coords()
                    .iter()
                    .zip(a.transpose_matvec(v.coords()))
                    .map(|(ui, av)| ui + av)
                    .collect();
                let y = m.solve(&rhs).expect("I + A^T A is positive definite");
                let ay = a.matvec(&y);
                let y = Vector::new(y).expect("finite");
                let ay = Vector::new(ay).expect("finite");
                y.concat(&ay)
            }
        }
    }
}

/// Tagged operator description over R^d.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum OperatorSpec {
    /// The zero map x |-> {0}.
    Zero { dim: usize },
    /// x |-> {Mx} with M + M^T positive semidefinite.
    Linear { matrix: Matrix },
    /// Subdifferential of a convex function with exact prox.
    Subdifferential { f: ConvexFnSpec, dim: usize },
    /// Normal cone operator of a convex set with exact projection.
    NormalCone { set: ConvexSetSpec, dim: usize },
    /// A finite graph sample used as an operator.
    FiniteGraph { graph: SampledGraph },
    /// Yosida regularization of the inner operator with parameter lambda > 0.
    Yosida { inner: Box<OperatorSpec>, lambda: f64 },
    /// Pointwise sum of the parts (all on the same space).
    SumOf { parts: Vec<OperatorSpec> },
    /// y |-> A^T T(A y) for a linear map A: R^{dY} -> R^{dX}
    /// (`a` has shape dX x dY) and T on R^{dX}.
    AdjointComposition { a: Matrix, inner: Box<OperatorSpec> },
    /// The lift (y, x) |-> {0} x T(x) on R^{y_dim + dim T}.
    ProductLift { y_dim: usize, inner: Box<OperatorSpec> },
    /// Normal cone to the graph of A, with values {(A^T s, -s)} on the graph.
    GraphNormalCone { a: Matrix },
}

impl OperatorSpec {
    /// Monotone linear map; rejects matrices whose symmetric part has an
    /// eigenvalue below -1e-9.
    pub fn linear(matrix: Matrix) -> Result<Self, OpError> {
        if !matrix.is_square() {
            return Err(OpError::BadSpec("linear operator matrix must be square".into()));
        }
        let min = matrix.symmetric_part().min_symmetric_eigenvalue();
        if min < -1e-9 {
            return Err(OpError::NotMonotone { min_eigenvalue: min });
        }
        Ok(OperatorSpec::Linear { matrix })
    }

    /// 1x1 linear map.
    pub fn linear_scalar(v: f64) -> Result<Self, OpError> {
        Self::linear(Matrix::scalar(v))
    }

    pub fn subdifferential(f: ConvexFnSpec, dim: usize) -> Result<Self, OpError> {
        f.validate()?;
        if let Some(d) = f.dim() {
            if d != dim {
                return Err(OpError::DimensionMismatch { expected: dim, got: d });
            }
        }
        Ok(OperatorSpec::Subdifferential { f, dim })
    }

    pub fn normal_cone(set: ConvexSetSpec, dim: usize) -> Result<Self, OpError> {
        set.validate()?;
        if let Some(d) = set.dim() {
            if d != dim {
                return Err(OpError::DimensionMismatch { expected: dim, got: d });
            }
        }
        Ok(OperatorSpec::NormalCone { set, dim })
    }

    /// Normal cone to the singleton {p}: the operator {p} x R^d.
    pub fn normal_cone_singleton(p: Vector) -> Self {
        let dim = p.dim();
        OperatorSpec::NormalCone { set: ConvexSetSpec::Singleton { point: p }, dim }
    }

    pub fn yosida(inner: OperatorSpec, lambda: f64) -> Result<Self, OpError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(OpError::BadSpec("Yosida parameter must be positive".into()));
        }
        Ok(OperatorSpec::Yosida { inner: Box::new(inner), lambda })
    }

    pub fn sum_of(parts: Vec<OperatorSpec>) -> Result<Self, OpError> {
        let first = parts
            .first()
            .ok_or_else(|| OpError::BadSpec("sum needs at least one part".into()))?
            .dim();
        for p in &parts {
            if p.dim() != first {
                return Err(OpError::DimensionMismatch { expected: first, got: p.dim() });
            }
        }
        Ok(OperatorSpec::SumOf { parts })
    }

    pub fn adjoint_composition(a: Matrix, inner: OperatorSpec) -> Result<Self, OpError> {
        if a.rows() != inner.dim() {
            return Err(OpError::DimensionMismatch { expected: a.rows(), got: inner.dim() });
        }
        Ok(OperatorSpec::AdjointComposition { a, inner: Box::new(inner) })
    }

    pub fn product_lift(y_dim: usize, inner: OperatorSpec) -> Result<Self, OpError> {
        if y_dim == 0 {
            return Err(OpError::BadSpec("product lift needs y_dim >= 1".into()));
        }
        Ok(OperatorSpec::ProductLift { y_dim, inner: Box::new(inner) })
    }

    pub fn graph_normal_cone(a: Matrix) -> Self {
        OperatorSpec::GraphNormalCone { a }
    }

    /// Ambient dimension of the operator.
    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::Zero { dim } => *dim,
            OperatorSpec::Linear { matrix } => matrix.cols(),
            OperatorSpec::Subdifferential { dim, .. } => *dim,
            OperatorSpec::NormalCone { dim, .. } => *dim,
            OperatorSpec::FiniteGraph { graph } => graph.dim(),
            OperatorSpec::Yosida { inner, .. } => inner.dim(),
            OperatorSpec::SumOf { parts } => parts.first().map_or(0, |p| p.dim()),
            OperatorSpec::AdjointComposition { a, .. } => a.cols(),
            OperatorSpec::ProductLift { y_dim, inner } => *y_dim + inner.dim(),
            OperatorSpec::GraphNormalCone { a } => a.cols() + a.rows(),
        }
    }

    /// Validates the whole tree (dimensions, psd checks, parameter signs).
    /// Used by deserialization fronts; the typed constructors enforce the
    /// same rules piecewise.
    pub fn validate(&self) -> Result<(), OpError> {
        match self {
            OperatorSpec::Zero { dim } => {
                if *dim == 0 {
                    return Err(OpError::BadSpec("zero operator needs dim >= 1".into()));
                }
                Ok(())
            }
            OperatorSpec::Linear { matrix } => {
                Self::linear(matrix.clone()).map(|_| ())
            }
            OperatorSpec::Subdifferential { f, dim } => {
                Self::subdifferential(f.clone(), *dim).map(|_| ())
            }
            OperatorSpec::NormalCone { set, dim } => {
                Self::normal_cone(set.clone(), *dim).map(|_| ())
            }
            OperatorSpec::FiniteGraph { .. } => Ok(()),
            OperatorSpec::Yosida { inner, lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(OpError::BadSpec("Yosida parameter must be positive".into()));
                }
                inner.validate()
            }
            OperatorSpec::SumOf { parts } => {
                Self::sum_of(parts.clone())?;
                parts.iter().try_for_each(|p| p.validate())
            }
            OperatorSpec::AdjointComposition { a, inner } => {
                if a.rows() != inner.dim() {
                    return Err(OpError::DimensionMismatch {
                        expected: a.rows(),
                        got: inner.dim(),
                    });
                }
                inner.validate()
            }
            OperatorSpec::ProductLift { y_dim, inner } => {
                if *y_dim == 0 {
                    return Err(OpError::BadSpec("product lift needs y_dim >= 1".into()));
                }
                inner.validate()
            }
            OperatorSpec::GraphNormalCone { .. } => Ok(()),
        }
    }
}
