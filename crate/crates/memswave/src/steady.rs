//! Steady states of the membrane equation as zeros of a map on Chebyshev
//! coefficients.
//!
//! With `u1 = U`, `u2 = U_y`, `u3 = 1/(1+U)` the boundary value problem
//! `U_yy = lambda / (1+U)^2`, `U(-1) = U(1) = 0` becomes first order with
//! polynomial right-hand side `(u2, lambda u3^2, -u2 u3^2)` and left boundary
//! values `(0, delta, 1)`; the extra scalar row enforces `u1(1) = 0`.

use crate::continuation::{self, Branch, ContinuationProblem, Settings};
use crate::error::Error;
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::seqspace::ChebSeq;
use crate::Result;
use nalgebra::{DMatrix, DVector};

/// A candidate steady state: voltage strength, initial slope `delta =
/// U'(-1)` and the three coefficient sequences for `(U, U_y, 1/(1+U))`.
#[derive(Clone, Debug)]
pub struct SteadyPoint<T> {
    pub lambda: T,
    pub delta: T,
    pub a: [ChebSeq<T>; 3],
}

/// Residual of the steady map: the boundary scalar `u1(1)` and one sequence
/// per component (row 0 carries the left boundary defect, rows `n >= 1` the
/// differential relation).
#[derive(Clone, Debug)]
pub struct SteadyResidual<T> {
    pub eta: T,
    pub rows: [ChebSeq<T>; 3],
}

impl<T: Scalar> SteadyResidual<T> {
    /// Unweighted max over every stored entry.
    pub fn sup_norm(&self) -> f64 {
        let mut m = self.eta.mag();
        for r in &self.rows {
            for &c in r.coeffs() {
                m = m.max(c.mag());
            }
        }
        m
    }

    /// Flatten the first `m` rows of each component behind the scalar row.
    pub fn project(&self, m: usize) -> Vec<T> {
        let mut v = Vec::with_capacity(3 * m + 1);
        v.push(self.eta);
        for r in &self.rows {
            for n in 0..m {
                v.push(r.get(n));
            }
        }
        v
    }
}

impl SteadyPoint<f64> {
    pub fn to_intervals(&self) -> SteadyPoint<crate::interval::Interval> {
        SteadyPoint {
            lambda: crate::interval::Interval::point(self.lambda),
            delta: crate::interval::Interval::point(self.delta),
            a: [self.a[0].to_intervals(), self.a[1].to_intervals(), self.a[2].to_intervals()],
        }
    }

    /// Membrane deflection `U(y)`.
    pub fn eval_u(&self, y: f64) -> Result<f64> {
        self.a[0].eval(y)
    }
}

/// The exact solution at `lambda = 0`: `U = 0`, so `u3 = 1`.
pub fn zero_state(m: usize) -> SteadyPoint<f64> {
    SteadyPoint {
        lambda: 0.0,
        delta: 0.0,
        a: [
            ChebSeq::zeros(m),
            ChebSeq::zeros(m),
            ChebSeq::basis(0).truncated(m.max(1)),
        ],
    }
}

/// Right-hand-side coefficient sequences `(u2, lambda u3^2, -u2 u3^2)`.
pub fn rhs_coeffs<T: Scalar>(p: &SteadyPoint<T>) -> [ChebSeq<T>; 3] {
    let a3sq = p.a[2].conv(&p.a[2]);
    let c2 = a3sq.scale(p.lambda);
    let c3 = p.a[1].conv(&a3sq).scale(-T::one());
    [p.a[1].clone(), c2, c3]
}

fn boundary_targets<T: Scalar>(p: &SteadyPoint<T>) -> [T; 3] {
    [T::zero(), p.delta, T::one()]
}

/// Full residual with exact support bookkeeping (component `j` reaches mode
/// `(j+1) m - j` for inputs supported on `m` modes, and is exactly zero
/// beyond).
pub fn residual<T: Scalar>(p: &SteadyPoint<T>) -> SteadyResidual<T> {
    let c = rhs_coeffs(p);
    let alpha = boundary_targets(p);
    let eta = p.a[0].value_at_one();
    let rows = core::array::from_fn(|j| {
        let mut row = p.a[j].lambda_op().add(&c[j].t_op());
        row.set(0, p.a[j].value_at_minus_one() - alpha[j]);
        row
    });
    SteadyResidual { eta, rows }
}

/// Jacobian of the `m`-mode projection. Rows are ordered
/// `[eta, f1, f2, f3]` (1 + 3m), columns `[lambda | delta | a1 | a2 | a3]`
/// (2 + 3m); callers drop the lambda column when the voltage is held fixed.
pub fn jacobian<T: Scalar>(p: &SteadyPoint<T>, m: usize) -> Mat<T> {
    let rows = 3 * m + 1;
    let mut jac = Mat::zeros(rows, 3 * m + 2);
    let col_lambda = 0;
    let col_delta = 1;
    let col_a = |j: usize, n: usize| 2 + j * m + n;
    let row_f = |j: usize, n: usize| 1 + j * m + n;

    let two = T::from_f64(2.0);

    // eta row: value of a1 at +1.
    for n in 0..m {
        jac.set(0, col_a(0, n), if n == 0 { T::one() } else { two });
    }

    // Left boundary rows.
    for j in 0..3 {
        for n in 0..m {
            let w = if n == 0 {
                T::one()
            } else if n % 2 == 0 {
                two
            } else {
                -two
            };
            jac.set(row_f(j, 0), col_a(j, n), w);
        }
    }
    jac.set(row_f(1, 0), col_delta, -T::one());

    // Interior rows: diagonal 2n plus the tridiagonal coupling of the
    // right-hand-side derivatives.
    let a3sq = p.a[2].conv(&p.a[2]);
    let a2a3 = p.a[1].conv(&p.a[2]);
    let m_a3 = p.a[2].mult_op_matrix(m + 1, m);
    let m_a3sq = a3sq.mult_op_matrix(m + 1, m);
    let m_a2a3 = a2a3.mult_op_matrix(m + 1, m);

    for j in 0..3 {
        for n in 1..m {
            jac.add_to(row_f(j, n), col_a(j, n), T::from_f64(2.0 * n as f64));
        }
    }
    for n in 1..m {
        // f1: c1 = a2.
        if n + 1 < m {
            jac.add_to(row_f(0, n), col_a(1, n + 1), T::one());
        }
        jac.add_to(row_f(0, n), col_a(1, n - 1), -T::one());

        // f2: c2 = lambda a3^2.
        let tl = p.lambda * two;
        for s in 0..m {
            let d = m_a3.at(n + 1, s) - m_a3.at(n - 1, s);
            jac.add_to(row_f(1, n), col_a(2, s), tl * d);
        }
        jac.add_to(row_f(1, n), col_lambda, a3sq.get(n + 1) - a3sq.get(n - 1));

        // f3: c3 = -a2 a3^2.
        for s in 0..m {
            let d2 = m_a3sq.at(n + 1, s) - m_a3sq.at(n - 1, s);
            jac.add_to(row_f(2, n), col_a(1, s), -d2);
            let d3 = m_a2a3.at(n + 1, s) - m_a2a3.at(n - 1, s);
            jac.add_to(row_f(2, n), col_a(2, s), -(two * d3));
        }
    }
    jac
}

pub fn pack(p: &SteadyPoint<f64>, m: usize) -> DVector<f64> {
    let mut v = DVector::zeros(3 * m + 1);
    v[0] = p.delta;
    for j in 0..3 {
        for n in 0..m {
            v[1 + j * m + n] = p.a[j].get(n);
        }
    }
    v
}

pub fn unpack(lambda: f64, v: &DVector<f64>, m: usize) -> SteadyPoint<f64> {
    let a = core::array::from_fn(|j| {
        ChebSeq::new((0..m).map(|n| v[1 + j * m + n]).collect())
    });
    SteadyPoint { lambda, delta: v[0], a }
}

/// Newton iteration at fixed `lambda`. The stopping test is the unweighted
/// max over the full residual (including the tail rows Newton cannot touch),
/// so convergence certifies that the truncation `m` is adequate too.
pub fn newton_solve(
    p0: &SteadyPoint<f64>,
    m: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SteadyPoint<f64>> {
    let mut p = SteadyPoint {
        lambda: p0.lambda,
        delta: p0.delta,
        a: core::array::from_fn(|j| p0.a[j].truncated(m)),
    };
    let mut res = residual(&p);
    let mut rn = res.sup_norm();
    for _ in 0..max_iter {
        if rn <= tol {
            return Ok(p);
        }
        let jac_full = jacobian(&p, m).to_dmatrix();
        let jac = jac_full.columns(1, 3 * m + 1).into_owned();
        let rhs = -DVector::from_vec(res.project(m));
        let lu = jac.lu();
        let step = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
        let x = pack(&p, m) + step;
        p = unpack(p.lambda, &x, m);
        res = residual(&p);
        rn = res.sup_norm();
    }
    if rn <= tol {
        Ok(p)
    } else {
        Err(Error::NewtonDiverged { residual: rn, iters: max_iter })
    }
}

/// Continuation problem in the voltage strength.
pub struct SteadyProblem {
    pub m: usize,
}

impl ContinuationProblem for SteadyProblem {
    fn dim(&self) -> usize {
        3 * self.m + 1
    }

    fn residual(&self, lambda: f64, u: &DVector<f64>) -> DVector<f64> {
        let p = unpack(lambda, u, self.m);
        DVector::from_vec(residual(&p).project(self.m))
    }

    fn jacobian(&self, lambda: f64, u: &DVector<f64>) -> DMatrix<f64> {
        let p = unpack(lambda, u, self.m);
        jacobian(&p, self.m).to_dmatrix()
    }
}

/// Follow the stable branch from the exact `lambda = 0` solution until the
/// fold is passed (the tangent lambda-component changes sign) or `max_steps`
/// is exhausted.
pub fn continue_from_zero(m: usize, settings: &Settings, max_steps: usize) -> Result<Branch> {
    let problem = SteadyProblem { m };
    let p0 = zero_state(m);
    let u0 = pack(&p0, m);
    let tangent = continuation::tangent_at(&problem, 0.0, &u0, None)?;
    // Orient toward increasing lambda.
    let tangent = if tangent[0] < 0.0 { -tangent } else { tangent };
    let start = continuation::BranchPoint {
        param: 0.0,
        unknowns: u0,
        residual_norm: 0.0,
        tangent,
    };
    let mut seen_fold = false;
    Ok(continuation::run(
        &problem,
        start,
        settings,
        max_steps,
        "steady",
        vec![m],
        |pt| {
            if pt.tangent[0] < 0.0 {
                seen_fold = true;
            }
            // A few points past the fold are enough to bracket it.
            seen_fold && pt.param < 0.34
        },
    ))
}
