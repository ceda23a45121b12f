//! Generic pseudo-arclength predictor-corrector over a finite-dimensional
//! map with one distinguished parameter.
//!
//! The extended state is `z = [param; unknowns]`. A step predicts along the
//! unit tangent and corrects with Newton on the map augmented by the
//! hyperplane condition `<z - z_pred, tangent> = 0`, which lets the engine
//! pass folds. The fresh tangent comes from the bordered system already
//! factored for the corrector, inheriting the previous orientation.

use crate::error::Error;
use crate::Result;
use nalgebra::{DMatrix, DVector};

pub trait ContinuationProblem {
    fn dim(&self) -> usize;

    fn residual(&self, param: f64, u: &DVector<f64>) -> DVector<f64>;

    /// `dim x (dim + 1)` Jacobian with the parameter column first.
    fn jacobian(&self, param: f64, u: &DVector<f64>) -> DMatrix<f64>;
}

/// One accepted point on a branch. The tangent lives in the extended space
/// `(param, unknowns)` and has unit Euclidean norm.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub param: f64,
    pub unknowns: DVector<f64>,
    pub residual_norm: f64,
    pub tangent: DVector<f64>,
}

impl BranchPoint {
    fn extended(&self) -> DVector<f64> {
        let mut z = DVector::zeros(self.unknowns.len() + 1);
        z[0] = self.param;
        z.rows_mut(1, self.unknowns.len()).copy_from(&self.unknowns);
        z
    }
}

#[derive(Clone, Debug)]
pub struct BranchMeta {
    pub map_id: String,
    pub truncation: Vec<usize>,
    /// Step size used to reach each point (0 for the seed).
    pub steps: Vec<f64>,
    pub halvings: usize,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub meta: BranchMeta,
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Reassemble the Jacobian every corrector iteration. When false a step
    /// freezes the factorization at the predictor (chord iterations) and
    /// rebuilds at most once; the hyperplane row is linear, so it is always
    /// satisfied exactly.
    pub exact_jacobian: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            ds: 1e-3,
            ds_min: 1e-8,
            ds_max: 5e-2,
            tol: 1e-12,
            max_iter: 20,
            exact_jacobian: true,
        }
    }
}

fn augmented(problem: &impl ContinuationProblem, z: &DVector<f64>, border: &DVector<f64>) -> DMatrix<f64> {
    let n = problem.dim();
    let u = z.rows(1, n).into_owned();
    let jac = problem.jacobian(z[0], &u);
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n + 1)).copy_from(&jac);
    aug.row_mut(n).copy_from(&border.transpose());
    aug
}

/// Unit tangent of the solution curve at `(param, u)`: the nullspace of the
/// Jacobian, computed from the bordered system. `prefer` fixes the border
/// row and the orientation (positive inner product); without it the
/// parameter direction is used.
pub fn tangent_at(
    problem: &impl ContinuationProblem,
    param: f64,
    u: &DVector<f64>,
    prefer: Option<&DVector<f64>>,
) -> Result<DVector<f64>> {
    let n = problem.dim();
    let mut e0 = DVector::zeros(n + 1);
    e0[0] = 1.0;
    let border = prefer.unwrap_or(&e0);
    let mut z = DVector::zeros(n + 1);
    z[0] = param;
    z.rows_mut(1, n).copy_from(u);
    let aug = augmented(problem, &z, border);
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let t = aug.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    let norm = t.norm();
    if norm == 0.0 {
        return Err(Error::SingularSystem);
    }
    // <t, border> = 1 before normalization, so orientation is inherited.
    Ok(t / norm)
}

/// Plain Newton at fixed parameter (square system in the unknowns).
pub fn newton_fixed_param(
    problem: &impl ContinuationProblem,
    param: f64,
    u0: &DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(DVector<f64>, f64)> {
    let n = problem.dim();
    let mut u = u0.clone();
    let mut r = problem.residual(param, &u);
    let mut rn = r.amax();
    for _ in 0..max_iter {
        if rn <= tol {
            return Ok((u, rn));
        }
        let jac = problem.jacobian(param, &u).columns(1, n).into_owned();
        let step = jac.lu().solve(&(-&r)).ok_or(Error::SingularSystem)?;
        u += step;
        r = problem.residual(param, &u);
        rn = r.amax();
    }
    if rn <= tol {
        Ok((u, rn))
    } else {
        Err(Error::NewtonDiverged { residual: rn, iters: max_iter })
    }
}

/// One predictor-corrector step of signed length `ds`. Returns the accepted
/// point and the number of corrector iterations spent.
pub fn arclength_step(
    problem: &impl ContinuationProblem,
    from: &BranchPoint,
    ds: f64,
    settings: &Settings,
) -> Result<(BranchPoint, usize)> {
    let n = problem.dim();
    let z_pred = from.extended() + ds * &from.tangent;
    let mut z = z_pred.clone();

    let mut iters = 0;
    let mut rebuilds = 0;
    let mut lu = augmented(problem, &z, &from.tangent).lu();
    let mut last_rn = f64::INFINITY;
    loop {
        let u = z.rows(1, n).into_owned();
        let r = problem.residual(z[0], &u);
        let rn = r.amax();
        let hp = from.tangent.dot(&(&z - &z_pred));
        if rn <= settings.tol && hp.abs() <= 1e-10 {
            // Refresh the tangent from the bordered system; rebuild it at
            // the accepted point when running with exact Jacobians.
            if settings.exact_jacobian {
                lu = augmented(problem, &z, &from.tangent).lu();
            }
            let mut rhs = DVector::zeros(n + 1);
            rhs[n] = 1.0;
            let t = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
            let norm = t.norm();
            if norm == 0.0 {
                return Err(Error::SingularSystem);
            }
            let tangent = if t.dot(&from.tangent) < 0.0 { -t / norm } else { t / norm };
            let point = BranchPoint {
                param: z[0],
                unknowns: u,
                residual_norm: rn,
                tangent,
            };
            return Ok((point, iters));
        }
        if iters >= settings.max_iter {
            if !settings.exact_jacobian && rebuilds == 0 {
                // Chord stalled: rebuild the factorization once at the
                // current iterate and keep going.
                lu = augmented(problem, &z, &from.tangent).lu();
                rebuilds = 1;
                iters = 0;
                last_rn = f64::INFINITY;
                continue;
            }
            return Err(Error::NewtonDiverged { residual: rn, iters });
        }
        if iters > 2 && rn > 10.0 * last_rn {
            return Err(Error::NewtonDiverged { residual: rn, iters });
        }
        last_rn = rn;
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&(-&r));
        rhs[n] = -hp;
        if settings.exact_jacobian && iters > 0 {
            lu = augmented(problem, &z, &from.tangent).lu();
        }
        let step = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
        if !step.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularSystem);
        }
        z += step;
        iters += 1;
    }
}

/// Follow a branch until `stop` returns true, the step controller gives up,
/// or `max_steps` points have been accepted. Failed steps halve `ds`; easy
/// steps grow it toward `ds_max`.
pub fn run(
    problem: &impl ContinuationProblem,
    start: BranchPoint,
    settings: &Settings,
    max_steps: usize,
    map_id: &str,
    truncation: Vec<usize>,
    mut stop: impl FnMut(&BranchPoint) -> bool,
) -> Branch {
    let mut meta = BranchMeta {
        map_id: map_id.to_string(),
        truncation,
        steps: vec![0.0],
        halvings: 0,
    };
    let mut points = vec![start];
    let mut ds = settings.ds;
    while points.len() < max_steps {
        let last = points.last().unwrap();
        match arclength_step(problem, last, ds, settings) {
            Ok((pt, iters)) => {
                debug_assert!(pt.tangent.dot(&last.tangent) > 0.0);
                let done = stop(&pt);
                points.push(pt);
                meta.steps.push(ds);
                if done {
                    break;
                }
                if iters <= 4 {
                    ds = (ds * 1.5).min(settings.ds_max);
                }
            }
            Err(_) => {
                ds *= 0.5;
                meta.halvings += 1;
                if ds < settings.ds_min {
                    break;
                }
            }
        }
    }
    Branch { points, meta }
}

/// Locate a fold (sign change of the tangent parameter component) and refine
/// it by bisection in the step length. Returns `None` when the branch is
/// monotone in the parameter.
pub fn detect_fold(
    problem: &impl ContinuationProblem,
    branch: &Branch,
    settings: &Settings,
) -> Result<Option<BranchPoint>> {
    let pts = &branch.points;
    let idx = match pts
        .windows(2)
        .position(|w| w[0].tangent[0] > 0.0 && w[1].tangent[0] <= 0.0
            || w[0].tangent[0] < 0.0 && w[1].tangent[0] >= 0.0)
    {
        Some(i) => i,
        None => return Ok(None),
    };
    let base = &pts[idx];
    let sign0 = base.tangent[0].signum();
    let mut lo = 0.0;
    let mut hi = branch.meta.steps[idx + 1];
    let mut best = pts[idx + 1].clone();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let (pt, _) = arclength_step(problem, base, mid, settings)?;
        let t0 = pt.tangent[0];
        let keep = t0 * sign0 > 0.0;
        if t0.abs() < best.tangent[0].abs() {
            best = pt;
        }
        if best.tangent[0].abs() < 1e-9 {
            break;
        }
        if keep {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(best))
}
