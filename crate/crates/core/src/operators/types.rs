//! Points, dual pairs and sampled graphs in R^d x R^d.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OpError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector entries must be finite and dimension at least 1")]
    BadVector,
    #[error("graph is empty")]
    EmptyGraph,
    #[error("linear operator is not monotone: min eigenvalue of symmetric part = {min_eigenvalue}")]
    NotMonotone { min_eigenvalue: f64 },
    #[error("invalid operator specification: {0}")]
    BadSpec(String),
}

/// A point of R^d. Entries are finite, d >= 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<f64>", into = "Vec<f64>"))]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self, OpError> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(OpError::BadVector);
        }
        Ok(Self { coords })
    }

    /// 1-D convenience constructor.
    pub fn scalar(v: f64) -> Self {
        Self::new(vec![v]).expect("finite scalar")
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Self { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }

    /// Concatenates two blocks into a product-space point.
    pub fn concat(&self, other: &Vector) -> Vector {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Vector { coords }
    }

    /// Splits into blocks of the given leading dimension.
    pub fn split(&self, first_dim: usize) -> (Vector, Vector) {
        assert!(first_dim >= 1 && first_dim < self.dim());
        (
            Vector { coords: self.coords[..first_dim].to_vec() },
            Vector { coords: self.coords[first_dim..].to_vec() },
        )
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = OpError;
    fn try_from(coords: Vec<f64>) -> Result<Self, Self::Error> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.coords
    }
}

/// A point (x, x*) of X x X*.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawDualPair", into = "RawDualPair"))]
pub struct DualPair {
    x: Vector,
    xstar: Vector,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone)]
pub struct RawDualPair {
    pub x: Vector,
    pub xstar: Vector,
}

impl DualPair {
    pub fn new(x: Vector, xstar: Vector) -> Result<Self, OpError> {
        if x.dim() != xstar.dim() {
            return Err(OpError::DimensionMismatch { expected: x.dim(), got: xstar.dim() });
        }
        Ok(Self { x, xstar })
    }

    /// 1-D convenience constructor.
    pub fn scalar(x: f64, xstar: f64) -> Self {
        Self::new(Vector::scalar(x), Vector::scalar(xstar)).expect("scalar pair")
    }

    pub fn x(&self) -> &Vector {
        &self.x
    }

    pub fn xstar(&self) -> &Vector {
        &self.xstar
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// The duality product <x*, x>.
    pub fn pairing(&self) -> f64 {
        self.xstar.dot(&self.x)
    }

    /// Euclidean distance in the product space X x X*.
    pub fn dist(&self, other: &DualPair) -> f64 {
        let dx = self.x.dist(&other.x);
        let ds = self.xstar.dist(&other.xstar);
        (dx * dx + ds * ds).sqrt()
    }
}

impl TryFrom<RawDualPair> for DualPair {
    type Error = OpError;
    fn try_from(raw: RawDualPair) -> Result<Self, Self::Error> {
        DualPair::new(raw.x, raw.xstar)
    }
}

impl From<DualPair> for RawDualPair {
    fn from(p: DualPair) -> Self {
        RawDualPair { x: p.x, xstar: p.xstar }
    }
}

/// A finite sample of an operator graph. May be empty (the empty operator).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawSampledGraph", into = "RawSampledGraph"))]
pub struct SampledGraph {
    dim: usize,
    pairs: Vec<DualPair>,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone)]
pub struct RawSampledGraph {
    pub dim: usize,
    pub pairs: Vec<DualPair>,
}

impl SampledGraph {
    pub fn new(dim: usize, pairs: Vec<DualPair>) -> Result<Self, OpError> {
        if dim == 0 {
            return Err(OpError::BadVector);
        }
        for p in &pairs {
            if p.dim() != dim {
                return Err(OpError::DimensionMismatch { expected: dim, got: p.dim() });
            }
        }
        Ok(Self { dim, pairs })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, pairs: Vec::new() }
    }

    /// 1-D graph from (x, x*) value pairs.
    pub fn from_scalars(pairs: &[(f64, f64)]) -> Self {
        Self {
            dim: 1,
            pairs: pairs.iter().map(|&(x, s)| DualPair::scalar(x, s)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[DualPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, p: DualPair) -> Result<(), OpError> {
        if p.dim() != self.dim {
            return Err(OpError::DimensionMismatch { expected: self.dim, got: p.dim() });
        }
        self.pairs.push(p);
        Ok(())
    }

    /// Distance from a pair to the nearest sample; +inf for an empty graph.
    pub fn dist_to(&self, p: &DualPair) -> f64 {
        self.pairs
            .iter()
            .map(|q| q.dist(p))
            .fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<RawSampledGraph> for SampledGraph {
    type Error = OpError;
    fn try_from(raw: RawSampledGraph) -> Result<Self, Self::Error> {
        SampledGraph::new(raw.dim, raw.pairs)
    }
}

impl From<SampledGraph> for RawSampledGraph {
    fn from(g: SampledGraph) -> Self {
        RawSampledGraph { dim: g.dim, pairs: g.pairs }
    }
}

/// Two-sided Hausdorff distance between finite pair sets.
/// Empty vs empty is 0; empty vs nonempty is +inf.
pub fn hausdorff_distance(a: &SampledGraph, b: &SampledGraph) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |from: &SampledGraph, to: &SampledGraph| {
        from.pairs()
            .iter()
            .map(|p| to.dist_to(p))
            .fold(0.0_f64, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
