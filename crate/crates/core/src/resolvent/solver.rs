//! Solve dispatch for the resolvent inclusion 0 in (z - w) + lambda T(z).

use super::prox::{prox_apply, prox_apply_scalar};
use super::{
    affine_resolvent_projection, eval_single_valued, eval_single_valued_scalar, is_prox_capable,
    is_single_valued, resolvent_with, sv_lipschitz, try_affine, AffineMap, SolveError, SolveReport,
    ITERATION_CAP,
};
use crate::linalg::Matrix;
use crate::operators::{OperatorSpec, ToleranceConfig, Vector};

pub(super) fn solve(
    spec: &OperatorSpec,
    lambda: f64,
    w: &Vector,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    // 1. fully affine action: direct linear solve
    if let Some(aff) = try_affine(spec) {
        return solve_affine(&aff, lambda, w, tol);
    }
    // 2. exact prox/projection at the root
    if is_prox_capable(spec) {
        let z = prox_apply(spec, lambda, w)?;
        return Ok(SolveReport { solution: z, residual: 0.0, iterations: 0, converged: true });
    }
    match spec {
        // 3. Yosida wrap: resolvent composition identity, exact
        OperatorSpec::Yosida { inner, lambda: mu } => {
            let inner_report = resolvent_with(inner, lambda + mu, w, tol)?;
            let z = w.scale(*mu).add(&inner_report.solution.scale(lambda)).scale(1.0 / (lambda + mu));
            // honest residual: evaluate the Yosida value at z through the
            // inner resolvent and plug it back into the inclusion
            let check = resolvent_with(inner, *mu, &z, tol)?;
            let t_mu = z.sub(&check.solution).scale(1.0 / mu);
            let raw = z.add(&t_mu.scale(lambda)).sub(w).norm();
            let scale = 1.0 + lambda / mu;
            let residual = raw / scale;
            Ok(SolveReport {
                solution: z,
                residual,
                iterations: inner_report.iterations + check.iterations,
                converged: residual <= tol.eps_res,
            })
        }
        // 4. product lift: identity on the y-block, inner resolvent on x
        OperatorSpec::ProductLift { y_dim, inner } => {
            let (wy, wx) = w.split(*y_dim);
            let inner_report = resolvent_with(inner, lambda, &wx, tol)?;
            Ok(SolveReport {
                solution: wy.concat(&inner_report.solution),
                residual: inner_report.residual,
                iterations: inner_report.iterations,
                converged: inner_report.converged,
            })
        }
        // 5. sums and adjoint compositions
        _ => solve_decomposed(spec, lambda, w, tol),
    }
}

fn solve_affine(
    aff: &AffineMap,
    lambda: f64,
    w: &Vector,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    let d = w.dim();
    let mut system = aff.m.scale(lambda);
    for i in 0..d {
        system.set(i, i, system.get(i, i) + 1.0);
    }
    let rhs: Vec<f64> = w
        .coords()
        .iter()
        .zip(&aff.b)
        .map(|(wi, bi)| wi - lambda * bi)
        .collect();
    let z = system.solve(&rhs).map_err(|e| SolveError::NotResolvable {
        reason: format!("affine resolvent solve failed: {e}"),
    })?;
    let z = Vector::new(z).expect("finite solution");
    let tz = aff.apply(z.coords());
    let raw: f64 = z
        .coords()
        .iter()
        .zip(&tz)
        .zip(w.coords())
        .map(|((zi, ti), wi)| {
            let r = zi + lambda * ti - wi;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    let scale = 1.0 + lambda * aff.m.spectral_norm();
    let residual = raw / scale;
    Ok(SolveReport { solution: z, residual, iterations: 0, converged: residual <= tol.eps_res })
}

/// Sum split into an affine accumulator, non-affine single-valued parts and
/// at most one prox-capable part.
struct Decomposition<'a> {
    affine: Option<AffineMap>,
    svs: Vec<&'a OperatorSpec>,
    prox: Option<&'a OperatorSpec>,
    lip: f64,
}

impl<'a> Decomposition<'a> {
    fn of(spec: &'a OperatorSpec) -> Result<Self, SolveError> {
        let mut flat = Vec::new();
        flatten(spec, &mut flat);
        let dim = spec.dim();
        let mut affine: Option<AffineMap> = None;
        let mut svs = Vec::new();
        let mut prox = None;
        for part in flat {
            if let Some(a) = try_affine(part) {
                match &mut affine {
                    Some(acc) => {
                        acc.m = acc.m.add(&a.m);
                        for (x, y) in acc.b.iter_mut().zip(&a.b) {
                            *x += y;
                        }
                    }
                    None => affine = Some(a),
                }
            } else if is_single_valued(part) {
                svs.push(part);
            } else if is_prox_capable(part) {
                if prox.is_some() {
                    return Err(SolveError::NotResolvable {
                        reason: "sum has two genuinely set-valued summands".into(),
                    });
                }
                prox = Some(part);
            } else {
                return Err(SolveError::NotResolvable {
                    reason: format!("sum part is not resolvable: {part:?}"),
                });
            }
        }
        let mut lip = affine.as_ref().map_or(0.0, |a| a.m.spectral_norm());
        for p in &svs {
            lip += sv_lipschitz(p);
        }
        if !lip.is_finite() {
            return Err(SolveError::NotResolvable {
                reason: "no finite Lipschitz bound for the single-valued parts".into(),
            });
        }
        let _ = dim;
        Ok(Self { affine, svs, prox, lip })
    }

    fn eval_f(&self, z: &Vector) -> Result<Vector, SolveError> {
        let mut acc = match &self.affine {
            Some(a) => Vector::new(a.apply(z.coords())).expect("finite"),
            None => Vector::zeros(z.dim()),
        };
        for p in &self.svs {
            acc = acc.add(&eval_single_valued(p, z)?);
        }
        Ok(acc)
    }

    fn eval_f_scalar(&self, z: f64) -> Result<f64, SolveError> {
        let mut acc = match &self.affine {
            Some(a) => a.m.get(0, 0) * z + a.b[0],
            None => 0.0,
        };
        for p in &self.svs {
            match eval_single_valued_scalar(p, z) {
                Some(v) => acc += v,
                None => {
                    let v = eval_single_valued(p, &Vector::scalar(z))?;
                    acc += v.coords()[0];
                }
            }
        }
        Ok(acc)
    }
}

fn flatten<'a>(spec: &'a OperatorSpec, out: &mut Vec<&'a OperatorSpec>) {
    if let OperatorSpec::SumOf { parts } = spec {
        for p in parts {
            flatten(p, out);
        }
    } else {
        out.push(spec);
    }
}

fn solve_decomposed(
    spec: &OperatorSpec,
    lambda: f64,
    w: &Vector,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    let dec = Decomposition::of(spec)?;
    let scale = 1.0 + lambda * dec.lip;
    let abs_target = tol.eps_res * scale;
    let d = w.dim();

    match dec.prox {
        None => {
            if d == 1 {
                let w0 = w.coords()[0];
                let mut f = |z: f64| Ok(z - w0 + lambda * dec.eval_f_scalar(z)?);
                let (z, fabs, iters) = bisect_increasing(&mut f, w0, abs_target)?;
                let residual = fabs / scale;
                return Ok(SolveReport {
                    solution: Vector::scalar(z),
                    residual,
                    iterations: iters,
                    converged: residual <= tol.eps_res,
                });
            }
            // damped Picard on H(z) = z - w + lambda F(z): 1-strongly
            // monotone, Lipschitz `scale`; step m/L^2 is always safe.
            let h = |z: &Vector| -> Result<Vector, SolveError> {
                Ok(z.sub(w).add(&dec.eval_f(z)?.scale(lambda)))
            };
            damped_picard(&h, w.clone(), scale, abs_target, scale, tol)
        }
        Some(g) => {
            if let Some((z0, basis)) = affine_resolvent_projection(g) {
                return solve_on_affine_domain(&dec, &z0, &basis, lambda, w, scale, tol);
            }
            if d == 1 {
                let w0 = w.coords()[0];
                let mut f = |z: f64| -> Result<f64, SolveError> {
                    let v = w0 - lambda * dec.eval_f_scalar(z)?;
                    let p = match prox_apply_scalar(g, lambda, v) {
                        Some(p) => p,
                        None => prox_apply(g, lambda, &Vector::scalar(v))?.coords()[0],
                    };
                    Ok(z - p)
                };
                let (z, fabs, iters) = bisect_increasing(&mut f, w0, abs_target)?;
                let residual = fabs / scale;
                return Ok(SolveReport {
                    solution: Vector::scalar(z),
                    residual,
                    iterations: iters,
                    converged: residual <= tol.eps_res,
                });
            }
            forward_backward(&dec, g, lambda, w, scale, tol)
        }
    }
}

/// Solve with the prox part forcing z onto the affine set {z0 + span(Q)}:
/// the inclusion reduces to Q^T (z - w + lambda F(z)) = 0 on the subspace.
fn solve_on_affine_domain(
    dec: &Decomposition,
    z0: &Vector,
    basis: &[Vec<f64>],
    lambda: f64,
    w: &Vector,
    scale: f64,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    let abs_target = tol.eps_res * scale;
    let k = basis.len();
    let point = |t: &[f64]| -> Vector {
        let mut z = z0.coords().to_vec();
        for (ti, b) in t.iter().zip(basis) {
            for (zi, bi) in z.iter_mut().zip(b) {
                *zi += ti * bi;
            }
        }
        Vector::new(z).expect("finite")
    };
    let reduced = |t: &[f64], dec: &Decomposition| -> Result<Vec<f64>, SolveError> {
        let z = point(t);
        let g = z.sub(w).add(&dec.eval_f(&z)?.scale(lambda));
        Ok(basis
            .iter()
            .map(|b| b.iter().zip(g.coords()).map(|(bi, gi)| bi * gi).sum())
            .collect())
    };

    if k == 0 {
        // domain is the single point z0; the normal cone absorbs everything
        return Ok(SolveReport {
            solution: z0.clone(),
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if k == 1 {
        let mut f = |t: f64| Ok(reduced(&[t], dec)?[0]);
        let seed: f64 = basis[0]
            .iter()
            .zip(w.coords().iter().zip(z0.coords()))
            .map(|(bi, (wi, zi))| bi * (wi - zi))
            .sum();
        let (t, fabs, iters) = bisect_increasing(&mut f, seed, abs_target)?;
        let residual = fabs / scale;
        return Ok(SolveReport {
            solution: point(&[t]),
            residual,
            iterations: iters,
            converged: residual <= tol.eps_res,
        });
    }
    if dec.svs.is_empty() {
        // F affine: the reduced system is linear, (I_k + lambda Q^T M Q) t = rhs
        let id = Matrix::identity(z0.dim());
        let m = dec.affine.as_ref().map_or_else(|| Matrix::zeros(z0.dim(), z0.dim()), |a| a.m.clone());
        let b = dec.affine.as_ref().map_or_else(|| vec![0.0; z0.dim()], |a| a.b.clone());
        let full = id.add(&m.scale(lambda));
        let mut sys = Matrix::zeros(k, k);
        for (j, bj) in basis.iter().enumerate() {
            let col = full.matvec(bj);
            for (i, bi) in basis.iter().enumerate() {
                sys.set(i, j, bi.iter().zip(&col).map(|(x, y)| x * y).sum());
            }
        }
        let fz0 = full.matvec(z0.coords());
        let rhs: Vec<f64> = basis
            .iter()
            .map(|bi| {
                bi.iter()
                    .zip(fz0.iter().zip(w.coords().iter().zip(&b)))
                    .map(|(q, (f0, (wi, bb)))| q * (wi - lambda * bb - f0))
                    .sum()
            })
            .collect();
        let t = sys.solve(&rhs).map_err(|e| SolveError::NotResolvable {
            reason: format!("reduced affine solve failed: {e}"),
        })?;
        let z = point(&t);
        let res = reduced(&t, dec)?;
        let raw: f64 = res.iter().map(|r| r * r).sum::<f64>().sqrt();
        let residual = raw / scale;
        return Ok(SolveReport { solution: z, residual, iterations: 0, converged: residual <= tol.eps_res });
    }
    // reduced damped Picard: the reduced field inherits strong monotonicity 1
    // and the Lipschitz bound of the full field.
    let h = |t: &Vector| -> Result<Vector, SolveError> {
        Ok(Vector::new(reduced(t.coords(), dec)?).expect("finite"))
    };
    let seed: Vec<f64> = basis
        .iter()
        .map(|b| {
            b.iter()
                .zip(w.coords().iter().zip(z0.coords()))
                .map(|(bi, (wi, zi))| bi * (wi - zi))
                .sum()
        })
        .collect();
    let report = damped_picard(&h, Vector::new(seed).expect("finite"), scale, abs_target, scale, tol)?;
    Ok(SolveReport {
        solution: point(report.solution.coords()),
        residual: report.residual,
        iterations: report.iterations,
        converged: report.converged,
    })
}

/// Forward-backward iteration z <- prox_{gamma lambda g}(z - gamma G(z))
/// with the universally safe step gamma = 1/L^2 for the 1-strongly-monotone,
/// L-Lipschitz smooth part G(z) = z - w + lambda F(z).
fn forward_backward(
    dec: &Decomposition,
    g: &OperatorSpec,
    lambda: f64,
    w: &Vector,
    scale: f64,
    tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    let gamma = 1.0 / (scale * scale);
    let abs_target = tol.eps_res * scale;
    let mut z = prox_apply(g, lambda, w)?;
    let mut best: Option<(Vector, f64)> = None;
    let mut iters = 0u64;
    while iters < ITERATION_CAP {
        let fz = dec.eval_f(&z)?;
        let gz = z.sub(w).add(&fz.scale(lambda));
        let next = prox_apply(g, gamma * lambda, &z.sub(&gz.scale(gamma)))?;
        iters += 1;
        let check_now = iters % 64 == 0 || next.sub(&z).norm() <= gamma * abs_target;
        z = next;
        if check_now {
            // residual of the un-damped fixed-point form
            let fz = dec.eval_f(&z)?;
            let v = w.sub(&fz.scale(lambda));
            let raw = z.sub(&prox_apply(g, lambda, &v)?).norm();
            match &best {
                Some((_, b)) if *b <= raw => {}
                _ => best = Some((z.clone(), raw)),
            }
            if raw <= abs_target {
                return Ok(SolveReport {
                    solution: z,
                    residual: raw / scale,
                    iterations: iters,
                    converged: true,
                });
            }
        }
    }
    let (zb, raw) = best.unwrap_or((z, f64::INFINITY));
    Err(SolveError::NoConvergence {
        best: Box::new(SolveReport {
            solution: zb,
            residual: raw / scale,
            iterations: iters,
            converged: false,
        }),
    })
}

fn damped_picard(
    h: &dyn Fn(&Vector) -> Result<Vector, SolveError>,
    seed: Vector,
    lipschitz: f64,
    abs_target: f64,
    scale: f64,
    _tol: &ToleranceConfig,
) -> Result<SolveReport, SolveError> {
    let alpha = 1.0 / (lipschitz * lipschitz);
    let mut z = seed;
    let mut best: Option<(Vector, f64)> = None;
    for it in 0..ITERATION_CAP {
        let hz = h(&z)?;
        let raw = hz.norm();
        match &best {
            Some((_, b)) if *b <= raw => {}
            _ => best = Some((z.clone(), raw)),
        }
        if raw <= abs_target {
            return Ok(SolveReport {
                solution: z,
                residual: raw / scale,
                iterations: it,
                converged: true,
            });
        }
        z = z.sub(&hz.scale(alpha));
    }
    let (zb, raw) = best.unwrap_or((z, f64::INFINITY));
    Err(SolveError::NoConvergence {
        best: Box::new(SolveReport {
            solution: zb,
            residual: raw / scale,
            iterations: ITERATION_CAP,
            converged: false,
        }),
    })
}

/// Bisection for a strictly increasing scalar map (slope >= 1).
/// Returns (root, |f(root)|, iterations).
fn bisect_increasing(
    f: &mut dyn FnMut(f64) -> Result<f64, SolveError>,
    seed: f64,
    abs_target: f64,
) -> Result<(f64, f64, u64), SolveError> {
    let mut iters = 0u64;
    let mut eval = |x: f64, iters: &mut u64| -> Result<f64, SolveError> {
        *iters += 1;
        f(x)
    };
    let fs = eval(seed, &mut iters)?;
    if fs.abs() <= abs_target {
        return Ok((seed, fs.abs(), iters));
    }
    let mut best = (seed, fs.abs());
    // expand a bracket [a, b] with f(a) <= 0 <= f(b)
    let (mut a, mut b, mut fa, mut fb);
    if fs > 0.0 {
        b = seed;
        fb = fs;
        let mut step = 1.0 + fs.abs();
        loop {
            a = b - step;
            fa = eval(a, &mut iters)?;
            if fa.abs() < best.1 {
                best = (a, fa.abs());
            }
            if fa <= 0.0 {
                break;
            }
            b = a;
            fb = fa;
            step *= 2.0;
            if iters > 400 {
                return Err(SolveError::NoConvergence {
                    best: Box::new(SolveReport {
                        solution: Vector::scalar(best.0),
                        residual: best.1,
                        iterations: iters,
                        converged: false,
                    }),
                });
            }
        }
    } else {
        a = seed;
        fa = fs;
        let mut step = 1.0 + fs.abs();
        loop {
            b = a + step;
            fb = eval(b, &mut iters)?;
            if fb.abs() < best.1 {
                best = (b, fb.abs());
            }
            if fb >= 0.0 {
                break;
            }
            a = b;
            fa = fb;
            step *= 2.0;
            if iters > 400 {
                return Err(SolveError::NoConvergence {
                    best: Box::new(SolveReport {
                        solution: Vector::scalar(best.0),
                        residual: best.1,
                        iterations: iters,
                        converged: false,
                    }),
                });
            }
        }
    }
    let _ = (fa, fb);
    while iters < 700 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = eval(mid, &mut iters)?;
        if fm.abs() < best.1 {
            best = (mid, fm.abs());
        }
        if fm.abs() <= abs_target {
            return Ok((mid, fm.abs(), iters));
        }
        if fm > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok((best.0, best.1, iters))
}
