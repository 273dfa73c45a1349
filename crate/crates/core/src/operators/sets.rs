//! Value-set descriptions and the small algebra over them.
//!
//! Built-in operator variants produce values in a restricted family:
//! empty, singleton, axis-aligned interval box (entries may be infinite),
//! a ray, an affine span, or all of space. Anything else is reported as
//! `Unsupported` rather than approximated.

use super::types::Vector;
use crate::linalg::{orthonormalize, project_onto_span, Matrix};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SetDescription {
    Empty,
    Singleton { point: Vector },
    /// { v : lo <= v <= hi } coordinatewise; bounds may be -inf/+inf.
    IntervalBox { lo: Vec<f64>, hi: Vec<f64> },
    /// { origin + t * direction : t >= 0 }.
    Ray { origin: Vector, direction: Vector },
    /// { origin + sum_i t_i basis_i : t in R^k }.
    Span { origin: Vector, basis: Vec<Vector> },
    AllSpace { dim: usize },
    Unsupported,
}

impl SetDescription {
    pub fn dim(&self) -> Option<usize> {
        match self {
            SetDescription::Empty | SetDescription::Unsupported => None,
            SetDescription::Singleton { point } => Some(point.dim()),
            SetDescription::IntervalBox { lo, .. } => Some(lo.len()),
            SetDescription::Ray { origin, .. } => Some(origin.dim()),
            SetDescription::Span { origin, .. } => Some(origin.dim()),
            SetDescription::AllSpace { dim } => Some(*dim),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SetDescription::Empty)
    }

    /// Collapses degenerate boxes to singletons and full boxes to all-space.
    pub fn normalized(self) -> SetDescription {
        match self {
            SetDescription::IntervalBox { lo, hi } => {
                if lo.iter().zip(&hi).all(|(l, h)| l == h) {
                    let point = Vector::new(lo).expect("finite degenerate box");
                    SetDescription::Singleton { point }
                } else if lo.iter().all(|l| *l == f64::NEG_INFINITY)
                    && hi.iter().all(|h| *h == f64::INFINITY)
                {
                    SetDescription::AllSpace { dim: lo.len() }
                } else {
                    SetDescription::IntervalBox { lo, hi }
                }
            }
            SetDescription::Span { origin, basis } => {
                if basis.is_empty() {
                    SetDescription::Singleton { point: origin }
                } else if basis.len() >= origin.dim() {
                    let ortho =
                        orthonormalize(&basis.iter().map(|b| b.coords().to_vec()).collect::<Vec<_>>());
                    if ortho.len() == origin.dim() {
                        SetDescription::AllSpace { dim: origin.dim() }
                    } else {
                        SetDescription::Span { origin, basis }
                    }
                } else {
                    SetDescription::Span { origin, basis }
                }
            }
            other => other,
        }
    }

    /// Translates the set by `v`.
    pub fn translate(&self, v: &Vector) -> SetDescription {
        match self {
            SetDescription::Empty => SetDescription::Empty,
            SetDescription::Unsupported => SetDescription::Unsupported,
            SetDescription::AllSpace { dim } => SetDescription::AllSpace { dim: *dim },
            SetDescription::Singleton { point } => {
                SetDescription::Singleton { point: point.add(v) }
            }
            SetDescription::IntervalBox { lo, hi } => SetDescription::IntervalBox {
                lo: lo.iter().zip(v.coords()).map(|(l, c)| l + c).collect(),
                hi: hi.iter().zip(v.coords()).map(|(h, c)| h + c).collect(),
            },
            SetDescription::Ray { origin, direction } => SetDescription::Ray {
                origin: origin.add(v),
                direction: direction.clone(),
            },
            SetDescription::Span { origin, basis } => SetDescription::Span {
                origin: origin.add(v),
                basis: basis.clone(),
            },
        }
    }

    /// Membership test with Euclidean tolerance. `None` when the description
    /// cannot decide (unsupported descriptions).
    pub fn contains(&self, v: &Vector, tol: f64) -> Option<bool> {
        match self {
            SetDescription::Empty => Some(false),
            SetDescription::Unsupported => None,
            SetDescription::AllSpace { .. } => Some(true),
            SetDescription::Singleton { point } => Some(point.dist(v) <= tol),
            SetDescription::IntervalBox { lo, hi } => Some(
                v.coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .all(|(&c, (&l, &h))| c >= l - tol && c <= h + tol),
            ),
            SetDescription::Ray { origin, direction } => {
                let rel = v.sub(origin);
                let dd = direction.dot(direction);
                if dd <= 0.0 {
                    return Some(rel.norm() <= tol);
                }
                let t = (rel.dot(direction) / dd).max(0.0);
                Some(rel.sub(&direction.scale(t)).norm() <= tol)
            }
            SetDescription::Span { origin, basis } => {
                let rel = v.sub(origin);
                let ortho =
                    orthonormalize(&basis.iter().map(|b| b.coords().to_vec()).collect::<Vec<_>>());
                let proj = project_onto_span(&ortho, rel.coords());
                let resid: f64 = rel
                    .coords()
                    .iter()
                    .zip(&proj)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                Some(resid <= tol)
            }
        }
    }

    /// Image of the set under the transpose of `a` (a map from the set's
    /// space R^{rows} to R^{cols}). Exact where the family is closed under
    /// the image; `Unsupported` otherwise.
    pub fn image_under_transpose(&self, a: &Matrix) -> SetDescription {
        let apply = |v: &Vector| Vector::new(a.transpose_matvec(v.coords())).expect("finite image");
        match self {
            SetDescription::Empty => SetDescription::Empty,
            SetDescription::Unsupported => SetDescription::Unsupported,
            SetDescription::Singleton { point } => {
                SetDescription::Singleton { point: apply(point) }
            }
            SetDescription::Ray { origin, direction } => {
                let dir = apply(direction);
                if dir.norm() <= 0.0 {
                    SetDescription::Singleton { point: apply(origin) }
                } else {
                    SetDescription::Ray { origin: apply(origin), direction: dir }
                }
            }
            SetDescription::Span { origin, basis } => SetDescription::Span {
                origin: apply(origin),
                basis: basis.iter().map(apply).collect(),
            }
            .normalized(),
            SetDescription::AllSpace { .. } => {
                // image of all of space = range of A^T = span of its columns
                let dim_out = a.cols();
                let basis: Vec<Vector> = (0..a.rows())
                    .map(|i| {
                        let mut e = vec![0.0; a.rows()];
                        e[i] = 1.0;
                        Vector::new(a.transpose_matvec(&e)).expect("finite")
                    })
                    .collect();
                SetDescription::Span { origin: Vector::zeros(dim_out), basis }.normalized()
            }
            SetDescription::IntervalBox { lo, hi } => {
                // exact only in easy cases: zero map, or 1x1 scaling
                let zero = (0..a.rows()).all(|i| (0..a.cols()).all(|j| a.get(i, j) == 0.0));
                if zero {
                    return SetDescription::Singleton { point: Vector::zeros(a.cols()) };
                }
                if a.rows() == 1 && a.cols() == 1 {
                    let s = a.get(0, 0);
                    let (mut l, mut h) = (lo[0] * s, hi[0] * s);
                    if s < 0.0 {
                        std::mem::swap(&mut l, &mut h);
                    }
                    return SetDescription::IntervalBox { lo: vec![l], hi: vec![h] }.normalized();
                }
                SetDescription::Unsupported
            }
        }
    }
}

/// Minkowski sum of two descriptions, exact within the family.
/// In dimension 1 everything is an interval, which keeps the sum closed;
/// in higher dimension only the structurally exact cases are produced.
pub fn set_add(a: &SetDescription, b: &SetDescription) -> SetDescription {
    use SetDescription::*;
    if a.is_empty() || b.is_empty() {
        return Empty;
    }
    if matches!(a, Unsupported) || matches!(b, Unsupported) {
        return Unsupported;
    }
    // 1-D fast path: interval arithmetic is exact.
    if a.dim() == Some(1) && b.dim() == Some(1) {
        if let (Some((al, ah)), Some((bl, bh))) = (as_interval(a), as_interval(b)) {
            return SetDescription::IntervalBox { lo: vec![al + bl], hi: vec![ah + bh] }
                .normalized();
        }
    }
    match (a, b) {
        (Singleton { point }, other) | (other, Singleton { point }) => other.translate(point),
        (AllSpace { dim }, _) | (_, AllSpace { dim }) => AllSpace { dim: *dim },
        (IntervalBox { lo: al, hi: ah }, IntervalBox { lo: bl, hi: bh }) => IntervalBox {
            lo: al.iter().zip(bl).map(|(x, y)| x + y).collect(),
            hi: ah.iter().zip(bh).map(|(x, y)| x + y).collect(),
        }
        .normalized(),
        (Span { origin: ao, basis: ab }, Span { origin: bo, basis: bb }) => {
            let mut basis = ab.clone();
            basis.extend(bb.iter().cloned());
            Span { origin: ao.add(bo), basis }.normalized()
        }
        (Ray { origin: ao, direction: ad }, Ray { origin: bo, direction: bd }) => {
            let cross_free = ad.scale(1.0 / ad.norm()).dist(&bd.scale(1.0 / bd.norm())) < 1e-12;
            if cross_free {
                Ray { origin: ao.add(bo), direction: ad.clone() }
            } else {
                Unsupported
            }
        }
        _ => Unsupported,
    }
}

/// Reads a 1-D description as an interval when possible.
fn as_interval(s: &SetDescription) -> Option<(f64, f64)> {
    match s {
        SetDescription::Singleton { point } => {
            let v = point.coords()[0];
            Some((v, v))
        }
        SetDescription::IntervalBox { lo, hi } => Some((lo[0], hi[0])),
        SetDescription::AllSpace { .. } => Some((f64::NEG_INFINITY, f64::INFINITY)),
        SetDescription::Ray { origin, direction } => {
            let o = origin.coords()[0];
            let d = direction.coords()[0];
            if d > 0.0 {
                Some((o, f64::INFINITY))
            } else if d < 0.0 {
                Some((f64::NEG_INFINITY, o))
            } else {
                Some((o, o))
            }
        }
        SetDescription::Span { origin, basis } => {
            if basis.iter().all(|b| b.norm() <= 0.0) {
                let o = origin.coords()[0];
                Some((o, o))
            } else {
                Some((f64::NEG_INFINITY, f64::INFINITY))
            }
        }
        _ => None,
    }
}

/// Membership of `p` in the Minkowski sum A + B without materializing the
/// sum. Handles the box-plus-span case (value of a lifted sum) by
/// alternating projections between the box and the affine set p - span.
pub fn sum_contains(a: &SetDescription, b: &SetDescription, p: &Vector, tol: f64) -> Option<bool> {
    use SetDescription::*;
    if a.is_empty() || b.is_empty() {
        return Some(false);
    }
    let summed = set_add(a, b);
    if !matches!(summed, Unsupported) {
        return summed.contains(p, tol);
    }
    let (bx, span) = match (a, b) {
        (IntervalBox { .. }, Span { .. }) => (a, b),
        (Span { .. }, IntervalBox { .. }) => (b, a),
        _ => return None,
    };
    let (lo, hi) = match bx {
        IntervalBox { lo, hi } => (lo, hi),
        _ => unreachable!(),
    };
    let (origin, basis) = match span {
        Span { origin, basis } => (origin, basis),
        _ => unreachable!(),
    };
    // p in box + span  <=>  box intersects the affine set (p - origin) - span(Q)
    let target = p.sub(origin);
    let ortho = orthonormalize(&basis.iter().map(|v| v.coords().to_vec()).collect::<Vec<_>>());
    let proj_affine = |z: &[f64]| -> Vec<f64> {
        // projection onto { target + span(Q) }
        let rel: Vec<f64> = z.iter().zip(target.coords()).map(|(a, b)| a - b).collect();
        let pr = project_onto_span(&ortho, &rel);
        pr.iter().zip(target.coords()).map(|(a, b)| a + b).collect()
    };
    let clamp = |z: &[f64]| -> Vec<f64> {
        z.iter()
            .zip(lo.iter().zip(hi))
            .map(|(&v, (&l, &h))| v.max(l).min(h))
            .collect()
    };
    let mut z = clamp(target.coords());
    let mut gap = f64::INFINITY;
    for _ in 0..10_000 {
        let on_affine = proj_affine(&z);
        let next = clamp(&on_affine);
        gap = next
            .iter()
            .zip(&on_affine)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let moved: f64 = next
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        z = next;
        if gap <= tol * 0.5 || moved <= tol * 1e-3 {
            break;
        }
    }
    Some(gap <= tol)
}
