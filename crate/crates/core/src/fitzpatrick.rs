//! Fitzpatrick functions on sampled graphs, discrete conjugation over
//! rectangular grids of X x X*, and the monotone / representable / maximal
//! classification built from them.
//!
//! The conjugate pairing on X x X* is <(y, y*), (x, x*)> = <x*, y> + <y*, x>.
//! Discrete conjugation is brute force over grid nodes, which at desk scale
//! (d = 1 with a few hundred nodes per axis, d = 2 with a few tens) runs in
//! seconds; the node sweep is data-parallel.

use crate::operators::{
    graph_monotone_check, hausdorff_distance, DualPair, MonotoneReport, SampledGraph,
    ToleranceConfig, Vector,
};
use crate::par;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("graph is empty")]
    EmptyGraph,
    #[error("field is +inf everywhere")]
    AllInfinite,
    #[error("graph sample lies outside the grid bounds")]
    OutOfBounds,
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("field/grid shape mismatch")]
    ShapeMismatch,
}

/// One grid axis: `count` equispaced nodes on [lo, hi].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self, FieldError> {
        let axis = Self { lo, hi, count };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(FieldError::BadGrid("axis needs finite lo < hi".into()));
        }
        if self.count < 3 {
            return Err(FieldError::BadGrid("axis needs at least 3 nodes".into()));
        }
        if self.lo < 0.0 && self.hi > 0.0 {
            let step = self.step();
            let k = (-self.lo / step).round();
            if (self.lo + k * step).abs() > 1e-9 * (self.hi - self.lo) {
                return Err(FieldError::BadGrid(
                    "axis straddling 0 must contain the origin as a node".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        if i + 1 == self.count {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        let slack = 1e-9 * (self.hi - self.lo);
        v >= self.lo - slack && v <= self.hi + slack
    }

    fn refined(&self) -> GridAxis {
        GridAxis { lo: self.lo, hi: self.hi, count: 2 * self.count - 1 }
    }
}

/// Rectangular discretization of X x X*: d axes for the x block and d for
/// the x* block.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawGridSpec", into = "RawGridSpec"))]
pub struct GridSpec {
    x_axes: Vec<GridAxis>,
    xstar_axes: Vec<GridAxis>,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone)]
pub struct RawGridSpec {
    pub x_axes: Vec<GridAxis>,
    pub xstar_axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn new(x_axes: Vec<GridAxis>, xstar_axes: Vec<GridAxis>) -> Result<Self, FieldError> {
        if x_axes.is_empty() || x_axes.len() != xstar_axes.len() {
            return Err(FieldError::BadGrid(
                "need matching nonempty x and x* axis lists".into(),
            ));
        }
        for a in x_axes.iter().chain(&xstar_axes) {
            a.validate()?;
        }
        Ok(Self { x_axes, xstar_axes })
    }

    /// The common 1-D case: the same axis for x and x*.
    pub fn square_1d(lo: f64, hi: f64, count: usize) -> Result<Self, FieldError> {
        let a = GridAxis::new(lo, hi, count)?;
        Self::new(vec![a.clone()], vec![a])
    }

    pub fn dim(&self) -> usize {
        self.x_axes.len()
    }

    pub fn x_axes(&self) -> &[GridAxis] {
        &self.x_axes
    }

    pub fn xstar_axes(&self) -> &[GridAxis] {
        &self.xstar_axes
    }

    fn all_axes(&self) -> impl Iterator<Item = &GridAxis> {
        self.x_axes.iter().chain(&self.xstar_axes)
    }

    pub fn node_count(&self) -> usize {
        self.all_axes().map(|a| a.count).product()
    }

    /// Largest axis step; the resolution used by set-equality certificates.
    pub fn max_step(&self) -> f64 {
        self.all_axes().map(|a| a.step()).fold(0.0, f64::max)
    }

    /// Multi-index of a flat node index (last axis fastest).
    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        let axes: Vec<&GridAxis> = self.all_axes().collect();
        let mut rem = idx;
        let mut out = vec![0usize; axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            out[k] = rem % axis.count;
            rem /= axis.count;
        }
        out
    }

    /// Node as a dual pair.
    pub fn node(&self, idx: usize) -> DualPair {
        let mi = self.multi_index(idx);
        let d = self.dim();
        let x: Vec<f64> = (0..d).map(|k| self.x_axes[k].node(mi[k])).collect();
        let xs: Vec<f64> = (0..d).map(|k| self.xstar_axes[k].node(mi[d + k])).collect();
        DualPair::new(Vector::new(x).expect("finite"), Vector::new(xs).expect("finite"))
            .expect("matching dims")
    }

    pub fn contains(&self, p: &DualPair) -> bool {
        p.x()
            .coords()
            .iter()
            .zip(&self.x_axes)
            .all(|(&v, a)| a.contains(v))
            && p.xstar()
                .coords()
                .iter()
                .zip(&self.xstar_axes)
                .all(|(&v, a)| a.contains(v))
    }

    /// Grid with every axis refined 2x (same bounds, nodes a superset).
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            x_axes: self.x_axes.iter().map(|a| a.refined()).collect(),
            xstar_axes: self.xstar_axes.iter().map(|a| a.refined()).collect(),
        }
    }
}

impl TryFrom<RawGridSpec> for GridSpec {
    type Error = FieldError;
    fn try_from(raw: RawGridSpec) -> Result<Self, Self::Error> {
        GridSpec::new(raw.x_axes, raw.xstar_axes)
    }
}

impl From<GridSpec> for RawGridSpec {
    fn from(g: GridSpec) -> Self {
        RawGridSpec { x_axes: g.x_axes, xstar_axes: g.xstar_axes }
    }
}

/// Real values over the nodes of a grid; +inf allowed, -inf never.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.node_count() {
            return Err(FieldError::ShapeMismatch);
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(FieldError::BadGrid("field values must be > -inf and not NaN".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&DualPair) -> f64 + Sync) -> Result<Self, FieldError> {
        let n = grid.node_count();
        let values = par::map_indexed(n, |i| f(&grid.node(i)));
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }
}

/// phi_T(x, x*) = max over (y, y*) in the sample of
/// <y*, x> - <y*, y> + <x*, y>; exact on finite graphs.
pub fn fitzpatrick_eval(g: &SampledGraph, p: &DualPair) -> Result<f64, FieldError> {
    if g.is_empty() {
        return Err(FieldError::EmptyGraph);
    }
    Ok(g.pairs()
        .iter()
        .map(|q| q.xstar().dot(p.x()) - q.xstar().dot(q.x()) + p.xstar().dot(q.x()))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// The Fitzpatrick function of the sample evaluated over all grid nodes.
pub fn fitzpatrick_field(g: &SampledGraph, grid: &GridSpec) -> Result<ScalarField, FieldError> {
    if g.is_empty() {
        return Err(FieldError::EmptyGraph);
    }
    if g.dim() != grid.dim() {
        return Err(FieldError::ShapeMismatch);
    }
    let n = grid.node_count();
    let values = par::map_indexed(n, |i| {
        fitzpatrick_eval(g, &grid.node(i)).expect("nonempty graph")
    });
    ScalarField::new(grid.clone(), values)
}

/// Precomputed kernel for discrete conjugation: finite source nodes with
/// their block-swapped coordinates, so the pairing is a plain dot product.
struct ConjugateKernel {
    swapped: Vec<f64>,
    fvals: Vec<f64>,
    width: usize,
}

impl ConjugateKernel {
    fn build(f: &ScalarField) -> Result<Self, FieldError> {
        let grid = f.grid();
        let d = grid.dim();
        let width = 2 * d;
        let mut swapped = Vec::new();
        let mut fvals = Vec::new();
        for i in 0..grid.node_count() {
            let v = f.value(i);
            if v.is_finite() {
                let q = grid.node(i);
                swapped.extend_from_slice(q.xstar().coords());
                swapped.extend_from_slice(q.x().coords());
                fvals.push(v);
            }
        }
        if fvals.is_empty() {
            return Err(FieldError::AllInfinite);
        }
        Ok(Self { swapped, fvals, width })
    }

    fn value_at(&self, flat: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for (k, fv) in self.fvals.iter().enumerate() {
            let q = &self.swapped[k * self.width..(k + 1) * self.width];
            let mut pair = 0.0;
            for (a, b) in q.iter().zip(flat) {
                pair += a * b;
            }
            let cand = pair - fv;
            if cand > best {
                best = cand;
            }
        }
        best
    }
}

fn flat_pair(p: &DualPair) -> Vec<f64> {
    let mut out = p.x().coords().to_vec();
    out.extend_from_slice(p.xstar().coords());
    out
}

/// Discrete conjugate of the grid restriction of `f`:
/// phi*(p) = max over nodes q of <q, p> - f(q).
pub fn conjugate_field(f: &ScalarField) -> Result<ScalarField, FieldError> {
    conjugate_field_impl(f, true)
}

/// Sequential variant of [`conjugate_field`] (used by the benchmarks to
/// compare against the parallel path; identical output).
pub fn conjugate_field_serial(f: &ScalarField) -> Result<ScalarField, FieldError> {
    conjugate_field_impl(f, false)
}

fn conjugate_field_impl(f: &ScalarField, parallel: bool) -> Result<ScalarField, FieldError> {
    let kernel = ConjugateKernel::build(f)?;
    let grid = f.grid().clone();
    let n = grid.node_count();
    let eval = |i: usize| kernel.value_at(&flat_pair(&grid.node(i)));
    let values = if parallel {
        par::map_indexed(n, eval)
    } else {
        par::map_indexed_serial(n, eval)
    };
    ScalarField::new(grid, values)
}

/// Discrete conjugate evaluated at an arbitrary point (not necessarily a
/// node): max over grid nodes q of <q, p> - f(q).
pub fn conjugate_at(f: &ScalarField, p: &DualPair) -> Result<f64, FieldError> {
    let kernel = ConjugateKernel::build(f)?;
    Ok(kernel.value_at(&flat_pair(p)))
}

/// Verdict of the Fitzpatrick-class test f >= pairing.
#[derive(Debug, Clone)]
pub struct InFReport {
    pub ok: bool,
    pub worst_node: DualPair,
    /// min over nodes of f(node) - <x*, x>.
    pub worst_gap: f64,
}

/// Checks f(node) >= <x*, x> - eps_rep at every grid node.
pub fn in_f_class(f: &ScalarField, tol: &ToleranceConfig) -> InFReport {
    let grid = f.grid();
    let mut worst_gap = f64::INFINITY;
    let mut worst_node = grid.node(0);
    for i in 0..grid.node_count() {
        let node = grid.node(i);
        let gap = f.value(i) - node.pairing();
        if gap < worst_gap {
            worst_gap = gap;
            worst_node = node;
        }
    }
    InFReport { ok: worst_gap >= -tol.eps_rep, worst_node, worst_gap }
}

/// Extracts L(f) = { nodes : f(node) <= <x*, x> + eps_rep }.
/// One-sided because the caller checks the F-class inequality separately.
pub fn l_set(f: &ScalarField, tol: &ToleranceConfig) -> SampledGraph {
    let grid = f.grid();
    let mut out = SampledGraph::empty(grid.dim());
    for i in 0..grid.node_count() {
        let node = grid.node(i);
        if f.value(i) <= node.pairing() + tol.eps_rep {
            out.push(node).expect("grid node dims agree");
        }
    }
    out
}

/// Classification of a sampled graph at grid resolution.
///
/// `is_representable` certifies phi* in F together with two-sided Hausdorff
/// agreement between the sample and L(phi*) at resolution 2 * grid step;
/// `is_maximal` additionally requires phi itself in F. The set-equality
/// check is a grid-resolution certificate, not a proof. L(phi*) is the
/// smallest representable extension of the sample (in finite dimension the
/// intersection of all its maximal monotone extensions, written T00).
#[derive(Debug, Clone)]
pub struct Classification {
    pub is_monotone: bool,
    pub is_representable: bool,
    pub is_maximal: bool,
    pub monotonicity: MonotoneReport,
    pub phi_in_f: Option<InFReport>,
    pub phi_star_in_f: Option<InFReport>,
    pub l_set: Option<SampledGraph>,
    /// Two-sided Hausdorff distance between the sample and L(phi*).
    pub l_set_hausdorff: Option<f64>,
    pub phi: Option<ScalarField>,
    pub phi_star: Option<ScalarField>,
}

/// Builds phi on the grid, conjugates it, and derives the classification.
/// Non-monotone graphs short-circuit: the fields are not evaluated.
pub fn classify(
    g: &SampledGraph,
    grid: &GridSpec,
    tol: &ToleranceConfig,
) -> Result<Classification, FieldError> {
    if g.is_empty() {
        return Err(FieldError::EmptyGraph);
    }
    if g.dim() != grid.dim() {
        return Err(FieldError::ShapeMismatch);
    }
    if g.pairs().iter().any(|p| !grid.contains(p)) {
        return Err(FieldError::OutOfBounds);
    }
    let monotonicity = graph_monotone_check(g, tol);
    if !monotonicity.is_monotone {
        return Ok(Classification {
            is_monotone: false,
            is_representable: false,
            is_maximal: false,
            monotonicity,
            phi_in_f: None,
            phi_star_in_f: None,
            l_set: None,
            l_set_hausdorff: None,
            phi: None,
            phi_star: None,
        });
    }
    let phi = fitzpatrick_field(g, grid)?;
    let phi_star = conjugate_field(&phi)?;
    let phi_in_f = in_f_class(&phi, tol);
    let phi_star_in_f = in_f_class(&phi_star, tol);
    let l = l_set(&phi_star, tol);
    let haus = hausdorff_distance(g, &l);
    let is_representable = phi_star_in_f.ok && haus <= 2.0 * grid.max_step();
    let is_maximal = is_representable && phi_in_f.ok;
    Ok(Classification {
        is_monotone: true,
        is_representable,
        is_maximal,
        monotonicity,
        phi_in_f: Some(phi_in_f),
        phi_star_in_f: Some(phi_star_in_f),
        l_set: Some(l),
        l_set_hausdorff: Some(haus),
        phi: Some(phi),
        phi_star: Some(phi_star),
    })
}

/// Worst midpoint-convexity violation 2 f(mid) - f(prev) - f(next) along
/// all grid lines; +inf when an interior node is infinite between finite
/// neighbors. Nonpositive (up to slack) for convex fields.
pub fn max_midpoint_convexity_violation(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let axes: Vec<usize> = grid.all_axes().map(|a| a.count).collect();
    let n = grid.node_count();
    let mut strides = vec![1usize; axes.len()];
    for k in (0..axes.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * axes[k + 1];
    }
    let mut worst = f64::NEG_INFINITY;
    for (k, &count) in axes.iter().enumerate() {
        let stride = strides[k];
        for idx in 0..n {
            let mi = grid.multi_index(idx);
            if mi[k] == 0 || mi[k] + 1 >= count {
                continue;
            }
            let prev = f.value(idx - stride);
            let mid = f.value(idx);
            let next = f.value(idx + stride);
            if mid == f64::INFINITY {
                if prev.is_finite() && next.is_finite() {
                    return f64::INFINITY;
                }
                continue;
            }
            if prev == f64::INFINITY || next == f64::INFINITY {
                continue;
            }
            worst = worst.max(2.0 * mid - prev - next);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn origin_graph() -> SampledGraph {
        SampledGraph::from_scalars(&[(0.0, 0.0)])
    }

    fn diagonal_graph(lo: f64, hi: f64, step: f64) -> SampledGraph {
        let mut pairs = Vec::new();
        let mut t = lo;
        while t <= hi + 1e-12 {
            pairs.push((t, t));
            t += step;
        }
        SampledGraph::from_scalars(&pairs)
    }

    #[test]
    fn grid_axis_validation() {
        assert!(GridAxis::new(-1.0, 1.0, 2).is_err());
        assert!(GridAxis::new(1.0, -1.0, 5).is_err());
        // straddles zero without a node at the origin
        assert!(GridAxis::new(-1.0, 1.0, 4).is_err());
        assert!(GridAxis::new(-1.0, 1.0, 5).is_ok());
        // does not straddle: no origin requirement
        assert!(GridAxis::new(1.0, 2.0, 4).is_ok());
    }

    #[test]
    fn grid_indexing_round_trips() {
        let grid = GridSpec::square_1d(-2.0, 2.0, 5).unwrap();
        assert_eq!(grid.node_count(), 25);
        let p = grid.node(7); // multi-index (1, 2) -> x = -1, x* = 0
        assert_eq!(p.x().coords()[0], -1.0);
        assert_eq!(p.xstar().coords()[0], 0.0);
        assert_eq!(grid.multi_index(7), vec![1, 2]);
    }

    #[test]
    fn refinement_doubles_resolution() {
        let grid = GridSpec::square_1d(-1.0, 1.0, 5).unwrap();
        let fine = grid.refined();
        assert_eq!(fine.node_count(), 81);
        assert!((fine.max_step() - grid.max_step() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn fitzpatrick_eval_examples() {
        // singleton at the origin: identically zero
        for &(x, xs) in &[(0.0, 0.0), (1.0, 1.0), (-3.0, 2.0)] {
            let v = fitzpatrick_eval(&origin_graph(), &DualPair::scalar(x, xs)).unwrap();
            assert_eq!(v, 0.0);
        }
        // singleton at (1, 1): x + x* - 1
        let g = SampledGraph::from_scalars(&[(1.0, 1.0)]);
        let v = fitzpatrick_eval(&g, &DualPair::scalar(0.5, -2.0)).unwrap();
        assert!((v - (0.5 - 2.0 - 1.0)).abs() < 1e-15);
        // three diagonal samples at the origin probe: max(-1, 0, -1) = 0
        let g3 = SampledGraph::from_scalars(&[(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(fitzpatrick_eval(&g3, &DualPair::scalar(0.0, 0.0)).unwrap(), 0.0);

        assert_eq!(
            fitzpatrick_eval(&SampledGraph::empty(1), &DualPair::scalar(0.0, 0.0)),
            Err(FieldError::EmptyGraph)
        );
    }

    #[test]
    fn conjugate_of_zero_field_is_the_box_support_function() {
        let grid = GridSpec::square_1d(-10.0, 10.0, 101).unwrap();
        let zero = ScalarField::from_fn(grid, |_| 0.0).unwrap();
        let star = conjugate_field(&zero).unwrap();
        // phi*(x, x*) = 10 (|x| + |x*|)
        let at = |x: f64, xs: f64| conjugate_at(&zero, &DualPair::scalar(x, xs)).unwrap();
        assert!((at(0.5, 0.0) - 5.0).abs() < 1e-12);
        assert!((at(0.0, 0.0) - 0.0).abs() < 1e-12);
        assert!((at(-1.0, 2.0) - 30.0).abs() < 1e-12);
        // the parallel and serial kernels agree bit for bit
        let star_serial = conjugate_field_serial(&zero).unwrap();
        assert_eq!(star.values(), star_serial.values());
    }

    #[test]
    fn conjugate_of_diagonal_fitzpatrick_function() {
        // phi(x, x*) = (x + x*)^2 / 4 has conjugate x^2 on the diagonal
        let grid = GridSpec::square_1d(-4.0, 4.0, 81).unwrap();
        let phi = ScalarField::from_fn(grid, |p| {
            let s = p.x().coords()[0] + p.xstar().coords()[0];
            s * s / 4.0
        })
        .unwrap();
        let v = conjugate_at(&phi, &DualPair::scalar(1.0, 1.0)).unwrap();
        assert!((v - 1.0).abs() < 0.05, "grid conjugate at (1,1) = {v}");
        // off the diagonal the conjugate grows with the grid radius
        let off = conjugate_at(&phi, &DualPair::scalar(1.0, -1.0)).unwrap();
        assert!(off > 2.0);
    }

    #[test]
    fn all_infinite_field_is_rejected() {
        let grid = GridSpec::square_1d(-1.0, 1.0, 5).unwrap();
        let inf = ScalarField::from_fn(grid, |_| f64::INFINITY).unwrap();
        assert_eq!(conjugate_field(&inf), Err(FieldError::AllInfinite));
    }

    #[test]
    fn f_class_examples() {
        let grid = GridSpec::square_1d(-10.0, 10.0, 101).unwrap();
        // phi of {(0,0)} is identically 0: not in F (0 < x x* at (1,1))
        let zero = ScalarField::from_fn(grid.clone(), |_| 0.0).unwrap();
        let rep = in_f_class(&zero, &tol());
        assert!(!rep.ok);
        assert!(rep.worst_gap < -1e-6);
        // its conjugate is in F
        let star = conjugate_field(&zero).unwrap();
        assert!(in_f_class(&star, &tol()).ok);
        // the pairing field is in F with equality everywhere
        let pairing = ScalarField::from_fn(grid, |p| p.pairing()).unwrap();
        let rep = in_f_class(&pairing, &tol());
        assert!(rep.ok);
        assert!(rep.worst_gap.abs() < 1e-12);
    }

    #[test]
    fn l_set_examples() {
        let grid = GridSpec::square_1d(-10.0, 10.0, 201).unwrap();
        let zero = ScalarField::from_fn(grid.clone(), |_| 0.0).unwrap();
        let star = conjugate_field(&zero).unwrap();
        let l = l_set(&star, &tol());
        assert_eq!(l.len(), 1);
        assert_eq!(l.pairs()[0], DualPair::scalar(0.0, 0.0));

        let pairing = ScalarField::from_fn(grid.clone(), |p| p.pairing()).unwrap();
        assert_eq!(l_set(&pairing, &tol()).len(), grid.node_count());
    }

    #[test]
    fn classify_singleton_origin() {
        let grid = GridSpec::square_1d(-10.0, 10.0, 201).unwrap();
        let c = classify(&origin_graph(), &grid, &tol()).unwrap();
        assert!(c.is_monotone);
        assert!(c.is_representable);
        assert!(!c.is_maximal);
        let l = c.l_set.unwrap();
        assert_eq!(l.len(), 1);
        assert!(!c.phi_in_f.unwrap().ok);
        assert!(c.phi_star_in_f.unwrap().ok);
    }

    #[test]
    fn classify_identity_diagonal() {
        let grid = GridSpec::square_1d(-4.0, 4.0, 81).unwrap();
        let g = diagonal_graph(-4.0, 4.0, 0.1);
        let c = classify(&g, &grid, &tol()).unwrap();
        assert!(c.is_monotone);
        assert!(c.is_representable, "hausdorff = {:?}", c.l_set_hausdorff);
        assert!(c.is_maximal);
    }

    #[test]
    fn classify_non_monotone_short_circuits() {
        let grid = GridSpec::square_1d(-2.0, 2.0, 41).unwrap();
        let g = SampledGraph::from_scalars(&[(0.0, 1.0), (1.0, 0.0)]);
        let c = classify(&g, &grid, &tol()).unwrap();
        assert!(!c.is_monotone);
        assert!(!c.is_representable);
        assert!(!c.is_maximal);
        assert!(c.phi.is_none());
    }

    #[test]
    fn classify_rejects_out_of_bounds_samples() {
        let grid = GridSpec::square_1d(-1.0, 1.0, 11).unwrap();
        let g = SampledGraph::from_scalars(&[(5.0, 5.0)]);
        assert!(matches!(classify(&g, &grid, &tol()), Err(FieldError::OutOfBounds)));
    }

    #[test]
    fn conjugates_are_midpoint_convex_and_satisfy_fenchel_young() {
        let grid = GridSpec::square_1d(-3.0, 3.0, 41).unwrap();
        let g = SampledGraph::from_scalars(&[(-1.0, -2.0), (0.0, 0.0), (1.0, 2.0)]);
        let phi = fitzpatrick_field(&g, &grid).unwrap();
        let star = conjugate_field(&phi).unwrap();
        assert!(max_midpoint_convexity_violation(&star) <= 1e-9);
        // Fenchel-Young on node pairs: phi*(p) + phi(q) >= <q, p>
        for (i, j) in [(0, 5), (17, 1200), (800, 800), (40, 1600)] {
            let p = grid.node(i);
            let q = grid.node(j);
            let pairing = q.xstar().dot(p.x()) + p.xstar().dot(q.x());
            assert!(star.value(i) + phi.value(j) >= pairing - 1e-9);
        }
    }

    #[test]
    fn classify_two_point_graph_is_representable_not_maximal() {
        // two diagonal points form their own smallest representable
        // extension: L(phi*) keeps exactly the two samples, while phi
        // itself dips below the pairing between them.
        let grid = GridSpec::square_1d(-4.0, 4.0, 81).unwrap();
        let g = SampledGraph::from_scalars(&[(-2.0, -2.0), (2.0, 2.0)]);
        let c = classify(&g, &grid, &tol()).unwrap();
        assert!(c.is_monotone);
        assert!(c.is_representable, "hausdorff = {:?}", c.l_set_hausdorff);
        assert!(!c.is_maximal);
        assert_eq!(c.l_set.unwrap().len(), 2);
    }
}
