//! Resolvent and Yosida-regularization evaluation.
//!
//! `resolvent(T, lambda, w)` solves 0 in (z - w) + lambda T(z), the
//! Euclidean form of the resolvent inclusion. The solver picks the
//! strongest available path:
//!
//! 1. affine collapse: if T(z) = Mz + b (possibly through Yosida wraps,
//!    lifts, adjoint compositions and sums of such), solve
//!    (I + lambda M) z = w - lambda b directly;
//! 2. exact prox/projection formulas for subdifferential and normal-cone
//!    variants;
//! 3. the resolvent composition identity for Yosida wraps,
//!    (I + lambda T_mu)^{-1} w = (mu w + lambda (I + (lambda+mu) T)^{-1} w) / (lambda + mu);
//! 4. sums of single-valued parts plus at most one prox-capable part:
//!    elimination onto the prox part's affine domain when it has one,
//!    bisection in one reduced dimension, otherwise damped iterations
//!    with the universally safe step m/L^2.
//!
//! Residuals are reported in a Lipschitz-normalized metric — the raw
//! residual divided by (1 + lambda L) — so that stiff regularization
//! parameters remain certifiable in double precision.

mod prox;
mod solver;

pub use prox::{prox_apply, prox_apply_scalar};

use crate::linalg::{orthonormalize, Matrix};
use crate::operators::{ConvexFnSpec, ConvexSetSpec, OperatorSpec, ToleranceConfig, Vector};
use thiserror::Error;

/// Outcome of a resolvent or root-finding solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Vector,
    /// Residual in the Lipschitz-normalized metric (see module docs).
    pub residual: f64,
    pub iterations: u64,
    pub converged: bool,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("operator is not resolvable: {reason}")]
    NotResolvable { reason: String },
    #[error("no convergence after {} iterations (residual {})", best.iterations, best.residual)]
    NoConvergence { best: Box<SolveReport> },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("resolvent parameter must be positive, got {0}")]
    BadParameter(f64),
}

/// Iteration cap for the damped fixed-point fallbacks.
pub const ITERATION_CAP: u64 = 1_000_000;

/// Checks statically whether the resolvent solver accepts this operator.
pub fn resolvable(spec: &OperatorSpec) -> Result<(), SolveError> {
    let fail = |reason: String| Err(SolveError::NotResolvable { reason });
    match spec {
        OperatorSpec::Zero { .. }
        | OperatorSpec::Linear { .. }
        | OperatorSpec::NormalCone { .. }
        | OperatorSpec::GraphNormalCone { .. }
        | OperatorSpec::Subdifferential { .. } => Ok(()),
        OperatorSpec::FiniteGraph { .. } => {
            fail("finite graph samples carry no resolvent oracle".into())
        }
        OperatorSpec::Yosida { inner, .. } => resolvable(inner),
        OperatorSpec::ProductLift { inner, .. } => resolvable(inner),
        OperatorSpec::AdjointComposition { inner, .. } => {
            if is_single_valued(inner) {
                Ok(())
            } else {
                fail(
                    "adjoint composition is resolvable only for single-valued inner operators"
                        .into(),
                )
            }
        }
        OperatorSpec::SumOf { parts } => {
            let mut prox_parts = 0;
            for p in parts {
                if is_single_valued(p) {
                    continue;
                }
                if is_prox_capable(p) {
                    prox_parts += 1;
                    continue;
                }
                return fail(format!("sum part {p:?} is neither single-valued nor prox-capable"));
            }
            if prox_parts > 1 {
                return fail("sum has two genuinely set-valued summands".into());
            }
            Ok(())
        }
    }
}

/// True when the operator is single-valued with a pointwise evaluation:
/// linear maps, smooth gradients, Yosida wraps of resolvable operators and
/// their sums, lifts and adjoint compositions.
pub fn is_single_valued(spec: &OperatorSpec) -> bool {
    match spec {
        OperatorSpec::Zero { .. } | OperatorSpec::Linear { .. } => true,
        OperatorSpec::Subdifferential { f, .. } => matches!(
            f,
            ConvexFnSpec::Quadratic { .. } | ConvexFnSpec::ShiftedPower { exponent: 2, .. }
        ),
        OperatorSpec::Yosida { inner, .. } => resolvable(inner).is_ok(),
        OperatorSpec::SumOf { parts } => parts.iter().all(is_single_valued),
        OperatorSpec::AdjointComposition { inner, .. } => is_single_valued(inner),
        OperatorSpec::ProductLift { inner, .. } => is_single_valued(inner),
        _ => false,
    }
}

/// True when the operator has an exact prox/projection formula.
pub fn is_prox_capable(spec: &OperatorSpec) -> bool {
    match spec {
        OperatorSpec::NormalCone { .. } | OperatorSpec::GraphNormalCone { .. } => true,
        OperatorSpec::Subdifferential { f, .. } => matches!(
            f,
            ConvexFnSpec::AbsValueSum
                | ConvexFnSpec::IndicatorOfSet { .. }
                | ConvexFnSpec::ShiftedPower { exponent: 1, .. }
        ),
        OperatorSpec::ProductLift { inner, .. } => is_prox_capable(inner),
        _ => false,
    }
}

/// A map z |-> M z + b.
#[derive(Debug, Clone)]
pub(crate) struct AffineMap {
    pub m: Matrix,
    pub b: Vec<f64>,
}

impl AffineMap {
    fn zero(dim: usize) -> Self {
        Self { m: Matrix::zeros(dim, dim), b: vec![0.0; dim] }
    }

    fn add_assign(&mut self, other: &AffineMap) {
        self.m = self.m.add(&other.m);
        for (a, c) in self.b.iter_mut().zip(&other.b) {
            *a += c;
        }
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let mut out = self.m.matvec(z);
        for (o, b) in out.iter_mut().zip(&self.b) {
            *o += b;
        }
        out
    }
}

/// Collapses the operator to an affine map when its action is affine:
/// linear maps, quadratic gradients, Yosida wraps of operators whose
/// resolvent is affine, and sums/lifts/adjoint compositions of such.
pub(crate) fn try_affine(spec: &OperatorSpec) -> Option<AffineMap> {
    match spec {
        OperatorSpec::Zero { dim } => Some(AffineMap::zero(*dim)),
        OperatorSpec::Linear { matrix } => Some(AffineMap {
            m: matrix.clone(),
            b: vec![0.0; matrix.rows()],
        }),
        OperatorSpec::Subdifferential { f, .. } => match f {
            ConvexFnSpec::Quadratic { q, b } => Some(AffineMap {
                m: q.clone(),
                b: b.coords().to_vec(),
            }),
            ConvexFnSpec::ShiftedPower { center, exponent: 2, scale } => {
                let d = center.dim();
                Some(AffineMap {
                    m: Matrix::identity(d).scale(*scale),
                    b: center.coords().iter().map(|c| -scale * c).collect(),
                })
            }
            _ => None,
        },
        OperatorSpec::Yosida { inner, lambda } => {
            let mu = *lambda;
            if let Some((p, basis)) = affine_resolvent_projection(inner) {
                // resolvent of the inner operator is the affine projection
                // R(w) = z0 + Q Q^T (w - z0); Yosida = (I - R)/mu
                let d = p.dim();
                let mut proj = Matrix::zeros(d, d);
                for col in 0..d {
                    let mut e = vec![0.0; d];
                    e[col] = 1.0;
                    let pe = crate::linalg::project_onto_span(&basis, &e);
                    for row in 0..d {
                        proj.set(row, col, pe[row]);
                    }
                }
                // R(w) = proj w + (I - proj) z0
                let mut m = Matrix::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        let id = if i == j { 1.0 } else { 0.0 };
                        m.set(i, j, (id - proj.get(i, j)) / mu);
                    }
                }
                let rz0: Vec<f64> = {
                    let pz = crate::linalg::project_onto_span(&basis, p.coords());
                    p.coords().iter().zip(&pz).map(|(z0, pz)| z0 - pz).collect()
                };
                let b = rz0.iter().map(|v| -v / mu).collect();
                return Some(AffineMap { m, b });
            }
            let inner_aff = try_affine(inner)?;
            // R_mu(w) = (I + mu M)^{-1} (w - mu b); Yosida = (I - K)/mu with K = (I + mu M)^{-1}
            let d = inner_aff.b.len();
            let mut ipm = inner_aff.m.scale(mu);
            for i in 0..d {
                ipm.set(i, i, ipm.get(i, i) + 1.0);
            }
            // build K column by column
            let mut k = Matrix::zeros(d, d);
            for col in 0..d {
                let mut e = vec![0.0; d];
                e[col] = 1.0;
                let x = ipm.solve(&e).ok()?;
                for row in 0..d {
                    k.set(row, col, x[row]);
                }
            }
            let mut m = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let id = if i == j { 1.0 } else { 0.0 };
                    m.set(i, j, (id - k.get(i, j)) / mu);
                }
            }
            let b = k.matvec(&inner_aff.b);
            Some(AffineMap { m, b })
        }
        OperatorSpec::SumOf { parts } => {
            let dim = spec.dim();
            let mut acc = AffineMap::zero(dim);
            for p in parts {
                acc.add_assign(&try_affine(p)?);
            }
            Some(acc)
        }
        OperatorSpec::AdjointComposition { a, inner } => {
            let inner_aff = try_affine(inner)?;
            let m = a.transpose().matmul(&inner_aff.m).matmul(a);
            let b = a.transpose_matvec(&inner_aff.b);
            Some(AffineMap { m, b })
        }
        OperatorSpec::ProductLift { y_dim, inner } => {
            let inner_aff = try_affine(inner)?;
            let dx = inner_aff.b.len();
            let d = y_dim + dx;
            let mut m = Matrix::zeros(d, d);
            for i in 0..dx {
                for j in 0..dx {
                    m.set(y_dim + i, y_dim + j, inner_aff.m.get(i, j));
                }
            }
            let mut b = vec![0.0; d];
            b[*y_dim..].copy_from_slice(&inner_aff.b);
            Some(AffineMap { m, b })
        }
        _ => None,
    }
}

/// Detects prox parts whose resolvent is the projection onto an affine
/// subspace {z0 + span(Q)}; returns (z0, orthonormal basis).
pub(crate) fn affine_resolvent_projection(spec: &OperatorSpec) -> Option<(Vector, Vec<Vec<f64>>)> {
    let from_set = |set: &ConvexSetSpec| -> Option<(Vector, Vec<Vec<f64>>)> {
        match set {
            ConvexSetSpec::Singleton { point } => Some((point.clone(), Vec::new())),
            ConvexSetSpec::AffineGraph { a } => Some((
                Vector::zeros(a.cols() + a.rows()),
                graph_subspace_basis(a),
            )),
            _ => None,
        }
    };
    match spec {
        OperatorSpec::NormalCone { set, .. } => from_set(set),
        OperatorSpec::Subdifferential { f: ConvexFnSpec::IndicatorOfSet { set }, .. } => {
            from_set(set)
        }
        OperatorSpec::GraphNormalCone { a } => {
            Some((Vector::zeros(a.cols() + a.rows()), graph_subspace_basis(a)))
        }
        OperatorSpec::ProductLift { y_dim, inner } => {
            let (z0, basis) = affine_resolvent_projection(inner)?;
            let lifted_origin = Vector::zeros(*y_dim).concat(&z0);
            let mut lifted = Vec::with_capacity(y_dim + basis.len());
            for i in 0..*y_dim {
                let mut e = vec![0.0; y_dim + z0.dim()];
                e[i] = 1.0;
                lifted.push(e);
            }
            for b in basis {
                let mut e = vec![0.0; *y_dim];
                e.extend_from_slice(&b);
                lifted.push(e);
            }
            Some((lifted_origin, lifted))
        }
        _ => None,
    }
}

fn graph_subspace_basis(a: &Matrix) -> Vec<Vec<f64>> {
    let dy = a.cols();
    let cols: Vec<Vec<f64>> = (0..dy)
        .map(|j| {
            let mut e = vec![0.0; dy];
            e[j] = 1.0;
            let mut v = e.clone();
            v.extend(a.matvec(&e));
            v
        })
        .collect();
    orthonormalize(&cols)
}

/// Lipschitz bound for a single-valued operator.
pub(crate) fn sv_lipschitz(spec: &OperatorSpec) -> f64 {
    match spec {
        OperatorSpec::Zero { .. } => 0.0,
        OperatorSpec::Linear { matrix } => matrix.spectral_norm(),
        OperatorSpec::Subdifferential { f, .. } => match f {
            ConvexFnSpec::Quadratic { q, .. } => q.spectral_norm(),
            ConvexFnSpec::ShiftedPower { exponent: 2, scale, .. } => *scale,
            _ => f64::INFINITY,
        },
        OperatorSpec::Yosida { lambda, .. } => 1.0 / lambda,
        OperatorSpec::SumOf { parts } => parts.iter().map(sv_lipschitz).sum(),
        OperatorSpec::AdjointComposition { a, inner } => {
            let na = a.spectral_norm();
            na * na * sv_lipschitz(inner)
        }
        OperatorSpec::ProductLift { inner, .. } => sv_lipschitz(inner),
        _ => f64::INFINITY,
    }
}

/// Pointwise evaluation of a single-valued operator. Yosida parts are
/// evaluated through the inner resolvent.
pub(crate) fn eval_single_valued(spec: &OperatorSpec, z: &Vector) -> Result<Vector, SolveError> {
    match spec {
        OperatorSpec::Zero { dim } => Ok(Vector::zeros(*dim)),
        OperatorSpec::Linear { matrix } => {
            Ok(Vector::new(matrix.matvec(z.coords())).expect("finite"))
        }
        OperatorSpec::Subdifferential { f, .. } => match f {
            ConvexFnSpec::Quadratic { q, b } => {
                Ok(Vector::new(q.matvec(z.coords())).expect("finite").add(b))
            }
            ConvexFnSpec::ShiftedPower { center, exponent: 2, scale } => {
                Ok(z.sub(center).scale(*scale))
            }
            other => Err(SolveError::NotResolvable {
                reason: format!("{other:?} is not single-valued"),
            }),
        },
        OperatorSpec::Yosida { inner, lambda } => {
            let r = resolvent(inner, *lambda, z)?;
            Ok(z.sub(&r.solution).scale(1.0 / lambda))
        }
        OperatorSpec::SumOf { parts } => {
            let mut acc = Vector::zeros(z.dim());
            for p in parts {
                acc = acc.add(&eval_single_valued(p, z)?);
            }
            Ok(acc)
        }
        OperatorSpec::AdjointComposition { a, inner } => {
            let az = Vector::new(a.matvec(z.coords())).expect("finite");
            let tz = eval_single_valued(inner, &az)?;
            Ok(Vector::new(a.transpose_matvec(tz.coords())).expect("finite"))
        }
        OperatorSpec::ProductLift { y_dim, inner } => {
            let (_, zx) = z.split(*y_dim);
            let tx = eval_single_valued(inner, &zx)?;
            Ok(Vector::zeros(*y_dim).concat(&tx))
        }
        other => Err(SolveError::NotResolvable {
            reason: format!("{other:?} is not single-valued"),
        }),
    }
}

/// Scalar (1-D) fast path for [`eval_single_valued`]; `None` when some part
/// has no scalar closed form.
pub(crate) fn eval_single_valued_scalar(spec: &OperatorSpec, z: f64) -> Option<f64> {
    match spec {
        OperatorSpec::Zero { .. } => Some(0.0),
        OperatorSpec::Linear { matrix } => Some(matrix.get(0, 0) * z),
        OperatorSpec::Subdifferential { f, .. } => match f {
            ConvexFnSpec::Quadratic { q, b } => Some(q.get(0, 0) * z + b.coords()[0]),
            ConvexFnSpec::ShiftedPower { center, exponent: 2, scale } => {
                Some(scale * (z - center.coords()[0]))
            }
            _ => None,
        },
        OperatorSpec::Yosida { inner, lambda } => {
            let r = resolvent_scalar(inner, *lambda, z)?;
            Some((z - r) / lambda)
        }
        OperatorSpec::SumOf { parts } => {
            let mut acc = 0.0;
            for p in parts {
                acc += eval_single_valued_scalar(p, z)?;
            }
            Some(acc)
        }
        OperatorSpec::AdjointComposition { a, inner } => {
            if a.rows() != 1 || a.cols() != 1 {
                return None;
            }
            let s = a.get(0, 0);
            Some(s * eval_single_valued_scalar(inner, s * z)?)
        }
        _ => None,
    }
}

/// Scalar closed-form resolvent; `None` when the variant needs the full
/// solver.
pub(crate) fn resolvent_scalar(spec: &OperatorSpec, lambda: f64, w: f64) -> Option<f64> {
    match spec {
        OperatorSpec::Zero { .. } => Some(w),
        OperatorSpec::Linear { matrix } => Some(w / (1.0 + lambda * matrix.get(0, 0))),
        OperatorSpec::Subdifferential { f, .. } => prox::prox_scalar(f, lambda, w),
        OperatorSpec::NormalCone { set, .. } => {
            if set.dim() == Some(1) || set.dim().is_none() {
                Some(set.project(&Vector::scalar(w)).coords()[0])
            } else {
                None
            }
        }
        OperatorSpec::Yosida { inner, lambda: mu } => {
            let r = resolvent_scalar(inner, lambda + mu, w)?;
            Some((mu * w + lambda * r) / (lambda + mu))
        }
        _ => None,
    }
}

/// Resolvent (I + lambda T)^{-1} w in Euclidean form: the unique z with
/// 0 in (z - w) + lambda T(z).
pub fn resolvent(spec: &OperatorSpec, lambda: f64, w: &Vector) -> Result<SolveReport, SolveError> {
    resolvent_with(spec, lambda, w, &ToleranceConfig::default())
}

/// [`resolvent`] with explicit tolerances.
pub fn resolvent_with(
    spec: &OperatorSpec,
    lambda: f64,
    w: &Vector,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(SolveError::BadParameter(lambda));
    }
    if spec.dim() != w.dim() {
        return Err(SolveError::Dimension { expected: spec.dim(), got: w.dim() });
    }
    solver::solve(spec, lambda, w, tol)
}

/// Yosida regularization value T_lambda(x) = (x - z)/lambda with
/// z = resolvent(T, lambda, x).
pub fn yosida_eval(spec: &OperatorSpec, lambda: f64, x: &Vector) -> Result<Vector, SolveError> {
    let report = resolvent(spec, lambda, x)?;
    Ok(x.sub(&report.solution).scale(1.0 / lambda))
}

/// Solves x* in (x_n - x) + T_n(x_n): the graph-limit probe equation.
/// With the identity duality map this is the resolvent of T_n at x + x*.
pub fn solve_graph_probe(
    t_n: &OperatorSpec,
    x: &Vector,
    xstar: &Vector,
) -> Result<SolveReport, SolveError> {
    solve_graph_probe_with(t_n, x, xstar, &ToleranceConfig::default())
}

/// [`solve_graph_probe`] with explicit tolerances.
pub fn solve_graph_probe_with(
    t_n: &OperatorSpec,
    x: &Vector,
    xstar: &Vector,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    if x.dim() != xstar.dim() {
        return Err(SolveError::Dimension { expected: x.dim(), got: xstar.dim() });
    }
    resolvent_with(t_n, 1.0, &x.add(xstar), tol)
}

/// Finds the zero of an m-strongly monotone, L-Lipschitz vector field by
/// damped Picard iteration z <- z - alpha F(z) with alpha = m/L^2
/// (contraction factor sqrt(1 - m^2/L^2) per step).
pub fn strongly_monotone_solve(
    f: &dyn Fn(&Vector) -> Vector,
    m: f64,
    l: f64,
    w0: &Vector,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    if !(m > 0.0 && l >= m && l.is_finite()) {
        return Err(SolveError::BadParameter(if m > 0.0 { l } else { m }));
    }
    let alpha = m / (l * l);
    let mut z = w0.clone();
    let mut best_res = f64::INFINITY;
    let mut best_z = z.clone();
    for it in 0..ITERATION_CAP {
        let fz = f(&z);
        let res = fz.norm();
        if res < best_res {
            best_res = res;
            best_z = z.clone();
        }
        if res <= tol.eps_res {
            return Ok(SolveReport { solution: z, residual: res, iterations: it, converged: true });
        }
        z = z.sub(&fz.scale(alpha));
    }
    Err(SolveError::NoConvergence {
        best: Box::new(SolveReport {
            solution: best_z,
            residual: best_res,
            iterations: ITERATION_CAP,
            converged: false,
        }),
    })
}

#[cfg(test)]
mod tests;
