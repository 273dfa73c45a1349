//! Operator specifications over R^d, point evaluation where closed forms
//! exist, and monotonicity / monotone-polar tests on sampled graphs.
//!
//! The ambient space is Euclidean R^d throughout, so the duality mapping is
//! the identity and <x*, x> is the ordinary dot product.

mod sets;
mod spec;
mod types;

pub use sets::{set_add, sum_contains, SetDescription};
pub use spec::{ConvexFnSpec, ConvexSetSpec, OperatorSpec};
pub use types::{hausdorff_distance, DualPair, OpError, SampledGraph, Vector};

use crate::linalg::Matrix;

/// Tolerances shared across the lab.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ToleranceConfig {
    /// Solver residual target (in the Lipschitz-normalized metric).
    pub eps_res: f64,
    /// Slack absorbed by monotone-gap comparisons.
    pub eps_gap: f64,
    /// Distance threshold for limit-membership verdicts.
    pub eps_member: f64,
    /// Slack for Fitzpatrick-class and L-set extraction.
    pub eps_rep: f64,
    /// Radius of the bounded dual slice used by closedness tests.
    pub slice_radius: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps_res: 1e-10,
            eps_gap: 1e-9,
            eps_member: 1e-4,
            eps_rep: 1e-6,
            slice_radius: 10.0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), OpError> {
        let all = [
            self.eps_res,
            self.eps_gap,
            self.eps_member,
            self.eps_rep,
            self.slice_radius,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(OpError::BadSpec("tolerances must be strictly positive".into()));
        }
        Ok(())
    }
}

/// Snap tolerance for exact point-membership questions (is x in the
/// singleton / on the graph) inside `op_eval`.
const POINT_SNAP: f64 = 1e-9;

/// The duality mapping J. With the Euclidean norm it is the identity, and
/// <Jx, x> = ||x||^2 = ||Jx||^2 holds exactly.
pub fn duality_map(x: &Vector) -> Vector {
    x.clone()
}

/// Result of a monotonicity scan over all unordered pairs of a graph.
#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub is_monotone: bool,
    /// The pair realizing the worst gap; `None` for graphs with < 2 samples.
    pub worst_pair: Option<(DualPair, DualPair)>,
    /// min over unordered pairs of <y* - x*, y - x>; +inf when no pairs.
    pub worst_gap: f64,
}

/// Checks <y* - x*, y - x> >= -eps_gap over all unordered sample pairs.
/// The empty graph is monotone.
pub fn graph_monotone_check(g: &SampledGraph, tol: &ToleranceConfig) -> MonotoneReport {
    let pairs = g.pairs();
    let mut worst_gap = f64::INFINITY;
    let mut worst_pair = None;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let gap = monotone_gap(&pairs[i], &pairs[j]);
            if gap < worst_gap {
                worst_gap = gap;
                worst_pair = Some((pairs[i].clone(), pairs[j].clone()));
            }
        }
    }
    MonotoneReport {
        is_monotone: worst_gap >= -tol.eps_gap,
        worst_pair,
        worst_gap,
    }
}

/// <y* - x*, y - x> for two graph points; symmetric in its arguments.
pub fn monotone_gap(p: &DualPair, q: &DualPair) -> f64 {
    q.xstar().sub(p.xstar()).dot(&q.x().sub(p.x()))
}

/// Membership of `p` in the monotone polar T^0 of the sampled graph:
/// true iff min over the graph of <y* - x*, y - x> >= -eps_gap.
pub fn polar_member(p: &DualPair, g: &SampledGraph, tol: &ToleranceConfig) -> Result<bool, OpError> {
    if p.dim() != g.dim() {
        return Err(OpError::DimensionMismatch { expected: g.dim(), got: p.dim() });
    }
    let min = g
        .pairs()
        .iter()
        .map(|q| monotone_gap(p, q))
        .fold(f64::INFINITY, f64::min);
    Ok(min >= -tol.eps_gap)
}

/// Evaluates the operator at `x`, exactly where a closed form exists.
/// Yosida wraps, sums and adjoint compositions are evaluated through their
/// resolvents when resolvable; anything else reports `Unsupported`.
pub fn op_eval(spec: &OperatorSpec, x: &Vector) -> Result<SetDescription, OpError> {
    if spec.dim() != x.dim() {
        return Err(OpError::DimensionMismatch { expected: spec.dim(), got: x.dim() });
    }
    Ok(eval_unchecked(spec, x))
}

fn eval_unchecked(spec: &OperatorSpec, x: &Vector) -> SetDescription {
    match spec {
        OperatorSpec::Zero { dim } => SetDescription::Singleton { point: Vector::zeros(*dim) },
        OperatorSpec::Linear { matrix } => SetDescription::Singleton {
            point: Vector::new(matrix.matvec(x.coords())).expect("finite matvec"),
        },
        OperatorSpec::Subdifferential { f, .. } => subdifferential_value(f, x),
        OperatorSpec::NormalCone { set, .. } => normal_cone_value(set, x),
        OperatorSpec::FiniteGraph { graph } => {
            let snap = POINT_SNAP * (1.0 + x.norm());
            let mut matches: Vec<&DualPair> = graph
                .pairs()
                .iter()
                .filter(|p| p.x().dist(x) <= snap)
                .collect();
            match matches.len() {
                0 => SetDescription::Empty,
                1 => SetDescription::Singleton { point: matches.pop().unwrap().xstar().clone() },
                _ => {
                    let first = matches[0].xstar().clone();
                    if matches.iter().all(|p| p.xstar().dist(&first) <= snap) {
                        SetDescription::Singleton { point: first }
                    } else {
                        SetDescription::Unsupported
                    }
                }
            }
        }
        OperatorSpec::Yosida { lambda, .. } => {
            match crate::resolvent::resolvent(spec_inner(spec), *lambda, x) {
                Ok(report) => {
                    let value = x.sub(&report.solution).scale(1.0 / lambda);
                    SetDescription::Singleton { point: value }
                }
                Err(_) => SetDescription::Unsupported,
            }
        }
        OperatorSpec::SumOf { parts } => {
            let mut acc: Option<SetDescription> = None;
            for part in parts {
                let v = eval_unchecked(part, x);
                acc = Some(match acc {
                    None => v,
                    Some(prev) => set_add(&prev, &v),
                });
            }
            acc.unwrap_or(SetDescription::Unsupported)
        }
        OperatorSpec::AdjointComposition { a, inner } => {
            let ax = Vector::new(a.matvec(x.coords())).expect("finite");
            eval_unchecked(inner, &ax).image_under_transpose(a)
        }
        OperatorSpec::ProductLift { y_dim, inner } => {
            let (_, xx) = x.split(*y_dim);
            lift_value_set(*y_dim, &eval_unchecked(inner, &xx))
        }
        OperatorSpec::GraphNormalCone { a } => graph_normal_cone_value(a, x),
    }
}

fn spec_inner(spec: &OperatorSpec) -> &OperatorSpec {
    match spec {
        OperatorSpec::Yosida { inner, .. } => inner,
        _ => unreachable!("spec_inner is only called on Yosida"),
    }
}

fn subdifferential_value(f: &ConvexFnSpec, x: &Vector) -> SetDescription {
    match f {
        ConvexFnSpec::AbsValueSum => {
            let mut lo = Vec::with_capacity(x.dim());
            let mut hi = Vec::with_capacity(x.dim());
            for &c in x.coords() {
                if c > 0.0 {
                    lo.push(1.0);
                    hi.push(1.0);
                } else if c < 0.0 {
                    lo.push(-1.0);
                    hi.push(-1.0);
                } else {
                    lo.push(-1.0);
                    hi.push(1.0);
                }
            }
            SetDescription::IntervalBox { lo, hi }.normalized()
        }
        ConvexFnSpec::Quadratic { q, b } => {
            let v = Vector::new(q.matvec(x.coords())).expect("finite").add(b);
            SetDescription::Singleton { point: v }
        }
        ConvexFnSpec::IndicatorOfSet { set } => normal_cone_value(set, x),
        ConvexFnSpec::ShiftedPower { center, exponent, scale } => {
            let rel = x.sub(center);
            match exponent {
                2 => SetDescription::Singleton { point: rel.scale(*scale) },
                1 => {
                    let r = rel.norm();
                    if r > POINT_SNAP {
                        SetDescription::Singleton { point: rel.scale(*scale / r) }
                    } else if x.dim() == 1 {
                        SetDescription::IntervalBox { lo: vec![-*scale], hi: vec![*scale] }
                    } else {
                        // the value is the scaled unit ball, outside the set family
                        SetDescription::Unsupported
                    }
                }
                _ => SetDescription::Unsupported,
            }
        }
    }
}

fn normal_cone_value(set: &ConvexSetSpec, x: &Vector) -> SetDescription {
    let snap = POINT_SNAP * (1.0 + x.norm());
    match set {
        ConvexSetSpec::Singleton { point } => {
            if x.dist(point) <= snap {
                SetDescription::AllSpace { dim: x.dim() }
            } else {
                SetDescription::Empty
            }
        }
        ConvexSetSpec::Box { lo, hi } => {
            let mut out_lo = Vec::with_capacity(x.dim());
            let mut out_hi = Vec::with_capacity(x.dim());
            for (&c, (&l, &h)) in x.coords().iter().zip(lo.iter().zip(hi)) {
                if c < l - snap || c > h + snap {
                    return SetDescription::Empty;
                }
                let at_lo = (c - l).abs() <= snap;
                let at_hi = (c - h).abs() <= snap;
                out_lo.push(if at_lo { f64::NEG_INFINITY } else { 0.0 });
                out_hi.push(if at_hi { f64::INFINITY } else { 0.0 });
            }
            SetDescription::IntervalBox { lo: out_lo, hi: out_hi }.normalized()
        }
        ConvexSetSpec::Halfspace { normal, offset } => {
            let slack = normal.dot(x) - offset;
            if slack > snap * normal.norm() {
                SetDescription::Empty
            } else if slack < -snap * normal.norm() {
                SetDescription::Singleton { point: Vector::zeros(x.dim()) }
            } else {
                SetDescription::Ray { origin: Vector::zeros(x.dim()), direction: normal.clone() }
            }
        }
        ConvexSetSpec::AffineGraph { a } => graph_normal_cone_value(a, x),
    }
}

fn graph_normal_cone_value(a: &Matrix, x: &Vector) -> SetDescription {
    let dy = a.cols();
    let (y, xx) = x.split(dy);
    let ay = Vector::new(a.matvec(y.coords())).expect("finite");
    let snap = POINT_SNAP * (1.0 + x.norm());
    if xx.dist(&ay) > snap {
        return SetDescription::Empty;
    }
    // values {(A^T s, -s) : s in R^{dX}}
    let dx = a.rows();
    let basis: Vec<Vector> = (0..dx)
        .map(|i| {
            let mut e = vec![0.0; dx];
            e[i] = 1.0;
            let top = a.transpose_matvec(&e);
            let mut coords = top;
            let mut bottom = vec![0.0; dx];
            bottom[i] = -1.0;
            coords.extend_from_slice(&bottom);
            Vector::new(coords).expect("finite")
        })
        .collect();
    SetDescription::Span { origin: Vector::zeros(dy + dx), basis }.normalized()
}

/// Lifts a value set S of the inner operator to {0}^{y_dim} x S.
fn lift_value_set(y_dim: usize, inner: &SetDescription) -> SetDescription {
    let zeros = Vector::zeros(y_dim);
    match inner {
        SetDescription::Empty => SetDescription::Empty,
        SetDescription::Unsupported => SetDescription::Unsupported,
        SetDescription::Singleton { point } => {
            SetDescription::Singleton { point: zeros.concat(point) }
        }
        SetDescription::IntervalBox { lo, hi } => {
            let mut nlo = vec![0.0; y_dim];
            nlo.extend_from_slice(lo);
            let mut nhi = vec![0.0; y_dim];
            nhi.extend_from_slice(hi);
            SetDescription::IntervalBox { lo: nlo, hi: nhi }
        }
        SetDescription::Ray { origin, direction } => SetDescription::Ray {
            origin: zeros.concat(origin),
            direction: Vector::zeros(y_dim).concat(direction),
        },
        SetDescription::Span { origin, basis } => SetDescription::Span {
            origin: zeros.concat(origin),
            basis: basis.iter().map(|b| Vector::zeros(y_dim).concat(b)).collect(),
        },
        SetDescription::AllSpace { dim } => {
            let mut lo = vec![0.0; y_dim];
            lo.extend(vec![f64::NEG_INFINITY; *dim]);
            let mut hi = vec![0.0; y_dim];
            hi.extend(vec![f64::INFINITY; *dim]);
            SetDescription::IntervalBox { lo, hi }
        }
    }
}

/// Pointwise Minkowski sum of the two operators' values at `x`.
/// Empty if either value is empty.
pub fn minkowski_sum_eval(
    t1: &OperatorSpec,
    t2: &OperatorSpec,
    x: &Vector,
) -> Result<SetDescription, OpError> {
    let a = op_eval(t1, x)?;
    let b = op_eval(t2, x)?;
    if a.is_empty() || b.is_empty() {
        return Ok(SetDescription::Empty);
    }
    if matches!(a, SetDescription::Unsupported) || matches!(b, SetDescription::Unsupported) {
        return Err(OpError::BadSpec(
            "minkowski_sum_eval requires both operands pointwise evaluable".into(),
        ));
    }
    Ok(set_add(&a, &b))
}
