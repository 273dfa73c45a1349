//! Closed-form proximal operators and projections for the prox-capable
//! operator variants.

use super::SolveError;
use crate::operators::{ConvexFnSpec, ConvexSetSpec, OperatorSpec, Vector};

/// prox_{gamma f}(v) for the prox-capable convex function specs.
pub(crate) fn prox_fn(f: &ConvexFnSpec, gamma: f64, v: &Vector) -> Result<Vector, SolveError> {
    match f {
        ConvexFnSpec::AbsValueSum => Ok(soft_threshold(v, gamma)),
        ConvexFnSpec::IndicatorOfSet { set } => Ok(set.project(v)),
        ConvexFnSpec::ShiftedPower { center, exponent: 1, scale } => {
            Ok(block_soft_threshold(v, center, gamma * scale))
        }
        ConvexFnSpec::ShiftedPower { center, exponent: 2, scale } => {
            // argmin scale ||z - c||^2 / 2 + ||z - v||^2 / (2 gamma)
            let t = gamma * scale;
            Ok(v.add(&center.scale(t)).scale(1.0 / (1.0 + t)))
        }
        ConvexFnSpec::Quadratic { q, b } => {
            // (I + gamma Q) z = v - gamma b
            let d = v.dim();
            let mut m = q.scale(gamma);
            for i in 0..d {
                m.set(i, i, m.get(i, i) + 1.0);
            }
            let rhs: Vec<f64> = v
                .coords()
                .iter()
                .zip(b.coords())
                .map(|(vi, bi)| vi - gamma * bi)
                .collect();
            let z = m.solve(&rhs).map_err(|e| SolveError::NotResolvable {
                reason: format!("quadratic prox solve failed: {e}"),
            })?;
            Ok(Vector::new(z).expect("finite"))
        }
        other => Err(SolveError::NotResolvable { reason: format!("no prox formula for {other:?}") }),
    }
}

/// prox_{gamma g}(v) for a prox-capable operator T = ∂g.
pub fn prox_apply(spec: &OperatorSpec, gamma: f64, v: &Vector) -> Result<Vector, SolveError> {
    match spec {
        OperatorSpec::Subdifferential { f, .. } => prox_fn(f, gamma, v),
        OperatorSpec::NormalCone { set, .. } => Ok(set.project(v)),
        OperatorSpec::GraphNormalCone { a } => {
            Ok(ConvexSetSpec::AffineGraph { a: a.clone() }.project(v))
        }
        OperatorSpec::ProductLift { y_dim, inner } => {
            let (vy, vx) = v.split(*y_dim);
            let px = prox_apply(inner, gamma, &vx)?;
            Ok(vy.concat(&px))
        }
        other => Err(SolveError::NotResolvable {
            reason: format!("{other:?} is not prox-capable"),
        }),
    }
}

/// Scalar fast path for 1-D prox formulas; `None` when not scalar.
pub fn prox_apply_scalar(spec: &OperatorSpec, gamma: f64, v: f64) -> Option<f64> {
    if spec.dim() != 1 {
        return None;
    }
    match spec {
        OperatorSpec::Subdifferential { f, .. } => prox_scalar(f, gamma, v),
        OperatorSpec::NormalCone { set, .. } => Some(set.project(&Vector::scalar(v)).coords()[0]),
        _ => None,
    }
}

/// Scalar prox formulas used by the bisection fast path.
pub(crate) fn prox_scalar(f: &ConvexFnSpec, gamma: f64, v: f64) -> Option<f64> {
    match f {
        ConvexFnSpec::AbsValueSum => Some(v.signum() * (v.abs() - gamma).max(0.0)),
        ConvexFnSpec::IndicatorOfSet { set } => Some(set.project(&Vector::scalar(v)).coords()[0]),
        ConvexFnSpec::ShiftedPower { center, exponent: 1, scale } => {
            let c = center.coords()[0];
            let r = v - c;
            Some(c + r.signum() * (r.abs() - gamma * scale).max(0.0))
        }
        ConvexFnSpec::ShiftedPower { center, exponent: 2, scale } => {
            let t = gamma * scale;
            Some((v + t * center.coords()[0]) / (1.0 + t))
        }
        ConvexFnSpec::Quadratic { q, b } => {
            Some((v - gamma * b.coords()[0]) / (1.0 + gamma * q.get(0, 0)))
        }
        _ => None,
    }
}

pub(crate) fn soft_threshold(v: &Vector, gamma: f64) -> Vector {
    Vector::new(
        v.coords()
            .iter()
            .map(|&c| c.signum() * (c.abs() - gamma).max(0.0))
            .collect(),
    )
    .expect("finite")
}

fn block_soft_threshold(v: &Vector, center: &Vector, gamma: f64) -> Vector {
    let rel = v.sub(center);
    let r = rel.norm();
    if r <= gamma {
        center.clone()
    } else {
        center.add(&rel.scale(1.0 - gamma / r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force 1-D prox oracle: grid minimization of
    /// f(z) + (z - v)^2 / (2 gamma), refined twice.
    pub(crate) fn brute_force_prox(f: impl Fn(f64) -> f64, gamma: f64, v: f64) -> f64 {
        let mut lo = v - 10.0 * (1.0 + gamma);
        let mut hi = v + 10.0 * (1.0 + gamma);
        let mut best = v;
        for _pass in 0..4 {
            let n = 20_000;
            let step = (hi - lo) / n as f64;
            let mut best_val = f64::INFINITY;
            for i in 0..=n {
                let z = lo + i as f64 * step;
                let val = f(z) + (z - v) * (z - v) / (2.0 * gamma);
                if val < best_val {
                    best_val = val;
                    best = z;
                }
            }
            lo = best - 2.0 * step;
            hi = best + 2.0 * step;
        }
        best
    }

    #[test]
    fn soft_threshold_matches_brute_force() {
        for &(v, gamma) in &[(3.0, 1.0), (-0.4, 0.7), (0.2, 0.5), (5.0, 2.5)] {
            let exact = prox_scalar(&ConvexFnSpec::AbsValueSum, gamma, v).unwrap();
            let brute = brute_force_prox(|z| z.abs(), gamma, v);
            assert!(
                (exact - brute).abs() < 1e-6,
                "v={v} gamma={gamma}: exact {exact} vs brute {brute}"
            );
        }
        // the classical value: prox of |.| at 3 with gamma 1 is 2
        assert_eq!(prox_scalar(&ConvexFnSpec::AbsValueSum, 1.0, 3.0), Some(2.0));
    }

    #[test]
    fn shifted_power_prox_matches_brute_force() {
        let f1 = ConvexFnSpec::ShiftedPower {
            center: Vector::scalar(1.0),
            exponent: 1,
            scale: 2.0,
        };
        let exact = prox_scalar(&f1, 0.5, 4.0).unwrap();
        let brute = brute_force_prox(|z| 2.0 * (z - 1.0).abs(), 0.5, 4.0);
        assert!((exact - brute).abs() < 1e-6);

        let f2 = ConvexFnSpec::ShiftedPower {
            center: Vector::scalar(-2.0),
            exponent: 2,
            scale: 3.0,
        };
        let exact2 = prox_scalar(&f2, 0.8, 1.0).unwrap();
        let brute2 = brute_force_prox(|z| 3.0 * (z + 2.0) * (z + 2.0) / 2.0, 0.8, 1.0);
        assert!((exact2 - brute2).abs() < 1e-6);
    }

    #[test]
    fn product_lift_prox_acts_blockwise() {
        let inner = OperatorSpec::subdifferential(ConvexFnSpec::AbsValueSum, 1).unwrap();
        let lift = OperatorSpec::product_lift(1, inner).unwrap();
        let v = Vector::new(vec![7.0, 3.0]).unwrap();
        let p = prox_apply(&lift, 1.0, &v).unwrap();
        assert_eq!(p.coords(), &[7.0, 2.0]);
    }
}
