//! Coupled steady-state + eigenpair solver.
//!
//! The linearization of the membrane equation about a steady state `U` has
//! eigenpairs `(mu, V)` solving `-V_yy - 2 lambda V / (1+U)^3 = mu V` with
//! `V(+-1) = 0`. With `u4 = V`, `u5 = V_y` appended to the steady variables
//! this is again a polynomial boundary value problem; a phase row pins the
//! eigenvector scale so Newton sees isolated zeros. Branches in `lambda`
//! start from the explicit `lambda = 0` eigenpairs `mu_k = (k pi / 2)^2`,
//! `V_k = cos(k pi y / 2)` (k odd) or `sin(k pi y / 2)` (k even).

use crate::error::Error;
use crate::matrix::Mat;
use crate::seqspace::ChebSeq;
use crate::Result;
use nalgebra::DVector;

/// A point on an eigenvalue branch: the mode index `k`, the voltage, the
/// eigenvalue and the five sequences `(U, U_y, 1/(1+U), V, V_y)`. `delta`
/// holds the left slopes `(U'(-1), V'(-1))`.
#[derive(Clone, Debug)]
pub struct EigenPoint {
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    pub delta: [f64; 2],
    pub a: [ChebSeq<f64>; 5],
}

#[derive(Clone, Debug)]
pub struct EigenResidual {
    pub eta: [f64; 3],
    pub rows: [ChebSeq<f64>; 5],
}

impl EigenResidual {
    pub fn sup_norm(&self) -> f64 {
        let mut m = self.eta.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        for r in &self.rows {
            m = m.max(r.sup_entry());
        }
        m
    }

    pub fn project(&self, m: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(5 * m + 3);
        v.extend_from_slice(&self.eta);
        for r in &self.rows {
            for n in 0..m {
                v.push(r.get(n));
            }
        }
        v
    }
}

/// Phase functional fixing the eigenvector scale: value at `y = 0` for odd
/// `k` (where `V_k(0) != 0`), slope at `y = 0` for even `k`. Solutions are
/// normalized to phase value 1.
pub fn phase(k: usize, v: &ChebSeq<f64>) -> f64 {
    if k % 2 == 1 {
        v.eval(0.0).expect("0 is interior")
    } else {
        v.deriv_at_zero()
    }
}

/// Weights of the phase functional on the first `m` coefficients.
fn phase_weights(k: usize, m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m];
    if k % 2 == 1 {
        // T_n(0): 1, 0, -1, 0, 1, ... on even n; factor 2 for n >= 1.
        for (n, slot) in w.iter_mut().enumerate() {
            if n == 0 {
                *slot = 1.0;
            } else if n % 2 == 0 {
                *slot = if (n / 2) % 2 == 0 { 2.0 } else { -2.0 };
            }
        }
    } else {
        for (n, slot) in w.iter_mut().enumerate() {
            if n % 2 == 1 {
                let sign = if ((n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                *slot = 2.0 * sign * n as f64;
            }
        }
    }
    w
}

/// Right-hand-side sequences for the five components. The eigenvector
/// component couples through the cube of `u3` (the potential is
/// `2 lambda / (1+U)^3`).
pub fn rhs_coeffs(p: &EigenPoint) -> [ChebSeq<f64>; 5] {
    let a3sq = p.a[2].conv(&p.a[2]);
    let c2 = a3sq.scale(p.lambda);
    let c3 = p.a[1].conv(&a3sq).scale(-1.0);
    let a3cube_a4 = a3sq.conv(&p.a[2]).conv(&p.a[3]);
    let c5 = a3cube_a4.scale(-2.0 * p.lambda).sub(&p.a[3].scale(p.mu));
    [p.a[1].clone(), c2, c3, p.a[4].clone(), c5]
}

fn boundary_targets(p: &EigenPoint) -> [f64; 5] {
    [0.0, p.delta[0], 1.0, 0.0, p.delta[1]]
}

pub fn residual(p: &EigenPoint) -> EigenResidual {
    let c = rhs_coeffs(p);
    let alpha = boundary_targets(p);
    let eta = [
        p.a[0].value_at_one(),
        p.a[3].value_at_one(),
        phase(p.k, &p.a[3]) - 1.0,
    ];
    let rows = core::array::from_fn(|j| {
        let mut row = p.a[j].lambda_op().add(&c[j].t_op());
        row.set(0, p.a[j].value_at_minus_one() - alpha[j]);
        row
    });
    EigenResidual { eta, rows }
}

/// Jacobian of the `m`-mode projection. Rows `[eta1, eta2, eta3, g1..g5]`
/// (3 + 5m), columns `[lambda | mu | delta1 | delta2 | a1..a5]` (4 + 5m).
pub fn jacobian(p: &EigenPoint, m: usize) -> Mat<f64> {
    let rows = 5 * m + 3;
    let mut jac = Mat::zeros(rows, 5 * m + 4);
    let (col_lambda, col_mu, col_d1, col_d2) = (0, 1, 2, 3);
    let col_a = |j: usize, n: usize| 4 + j * m + n;
    let row_g = |j: usize, n: usize| 3 + j * m + n;

    // eta rows.
    for n in 0..m {
        jac.set(0, col_a(0, n), if n == 0 { 1.0 } else { 2.0 });
        jac.set(1, col_a(3, n), if n == 0 { 1.0 } else { 2.0 });
    }
    for (n, w) in phase_weights(p.k, m).into_iter().enumerate() {
        jac.set(2, col_a(3, n), w);
    }

    // Left boundary rows.
    for j in 0..5 {
        for n in 0..m {
            let w = if n == 0 {
                1.0
            } else if n % 2 == 0 {
                2.0
            } else {
                -2.0
            };
            jac.set(row_g(j, 0), col_a(j, n), w);
        }
    }
    jac.set(row_g(1, 0), col_d1, -1.0);
    jac.set(row_g(4, 0), col_d2, -1.0);

    let a3sq = p.a[2].conv(&p.a[2]);
    let a2a3 = p.a[1].conv(&p.a[2]);
    let a3cube = a3sq.conv(&p.a[2]);
    let a3sq_a4 = a3sq.conv(&p.a[3]);
    let a3cube_a4 = a3cube.conv(&p.a[3]);
    let m_a3 = p.a[2].mult_op_matrix(m + 1, m);
    let m_a3sq = a3sq.mult_op_matrix(m + 1, m);
    let m_a2a3 = a2a3.mult_op_matrix(m + 1, m);
    let m_a3cube = a3cube.mult_op_matrix(m + 1, m);
    let m_a3sq_a4 = a3sq_a4.mult_op_matrix(m + 1, m);

    for j in 0..5 {
        for n in 1..m {
            jac.add_to(row_g(j, n), col_a(j, n), 2.0 * n as f64);
        }
    }
    for n in 1..m {
        // g1: c1 = a2.
        if n + 1 < m {
            jac.add_to(row_g(0, n), col_a(1, n + 1), 1.0);
        }
        jac.add_to(row_g(0, n), col_a(1, n - 1), -1.0);

        // g2: c2 = lambda a3^2.
        for s in 0..m {
            let d = m_a3.at(n + 1, s) - m_a3.at(n - 1, s);
            jac.add_to(row_g(1, n), col_a(2, s), 2.0 * p.lambda * d);
        }
        jac.add_to(row_g(1, n), col_lambda, a3sq.get(n + 1) - a3sq.get(n - 1));

        // g3: c3 = -a2 a3^2.
        for s in 0..m {
            let d2 = m_a3sq.at(n + 1, s) - m_a3sq.at(n - 1, s);
            jac.add_to(row_g(2, n), col_a(1, s), -d2);
            let d3 = m_a2a3.at(n + 1, s) - m_a2a3.at(n - 1, s);
            jac.add_to(row_g(2, n), col_a(2, s), -2.0 * d3);
        }

        // g4: c4 = a5.
        if n + 1 < m {
            jac.add_to(row_g(3, n), col_a(4, n + 1), 1.0);
        }
        jac.add_to(row_g(3, n), col_a(4, n - 1), -1.0);

        // g5: c5 = -2 lambda a3^3 a4 - mu a4.
        for s in 0..m {
            let d4 = m_a3cube.at(n + 1, s) - m_a3cube.at(n - 1, s);
            jac.add_to(row_g(4, n), col_a(3, s), -2.0 * p.lambda * d4);
            let d3 = m_a3sq_a4.at(n + 1, s) - m_a3sq_a4.at(n - 1, s);
            jac.add_to(row_g(4, n), col_a(2, s), -6.0 * p.lambda * d3);
        }
        // mu-dependence of c5 and the diagonal -mu part on a4.
        if n + 1 < m {
            jac.add_to(row_g(4, n), col_a(3, n + 1), -p.mu);
        }
        jac.add_to(row_g(4, n), col_a(3, n - 1), p.mu);
        jac.add_to(row_g(4, n), col_mu, -(p.a[3].get(n + 1) - p.a[3].get(n - 1)));
        jac.add_to(row_g(4, n), col_lambda, -2.0 * (a3cube_a4.get(n + 1) - a3cube_a4.get(n - 1)));
    }
    jac
}

/// Bessel functions `J_0(c) .. J_{n_max}(c)` by the downward recurrence with
/// normalization `J_0 + 2 J_2 + 2 J_4 + ... = 1`.
fn bessel_j(c: f64, n_max: usize) -> Vec<f64> {
    assert!(c > 0.0);
    let start = n_max + 18 + c as usize;
    let mut j = vec![0.0f64; start + 2];
    j[start] = 1e-280;
    for l in (1..=start).rev() {
        j[l - 1] = (2.0 * l as f64 / c) * j[l] - j[l + 1];
        if j[l - 1].abs() > 1e260 {
            let scale = 1e-260;
            for v in j.iter_mut().skip(l - 1) {
                *v *= scale;
            }
        }
    }
    let mut s = j[0];
    for l in (2..=start).step_by(2) {
        s += 2.0 * j[l];
    }
    for v in j.iter_mut() {
        *v /= s;
    }
    j.truncate(n_max + 1);
    j
}

/// Chebyshev coefficients of `cos(c y)` in the factor-2 convention.
fn cos_series(c: f64, m: usize) -> ChebSeq<f64> {
    let j = bessel_j(c, m);
    let mut a = vec![0.0; m];
    for (n, slot) in a.iter_mut().enumerate() {
        if n % 2 == 0 {
            let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
            *slot = sign * j[n];
        }
    }
    ChebSeq::new(a)
}

/// Chebyshev coefficients of `sin(c y)`.
fn sin_series(c: f64, m: usize) -> ChebSeq<f64> {
    let j = bessel_j(c, m);
    let mut a = vec![0.0; m];
    for (n, slot) in a.iter_mut().enumerate() {
        if n % 2 == 1 {
            let sign = if ((n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            *slot = sign * j[n];
        }
    }
    ChebSeq::new(a)
}

/// Exact eigenpair at `lambda = 0` for `k = 1, 2, 3`, normalized so the
/// phase functional equals 1.
pub fn seed_at_zero(k: usize, m: usize) -> Result<EigenPoint> {
    if !(1..=3).contains(&k) {
        return Err(Error::UnsupportedMode(k));
    }
    let c = k as f64 * core::f64::consts::FRAC_PI_2;
    let (a4, a5, delta2) = if k % 2 == 1 {
        // V = cos(c y), V' = -c sin(c y), V'(-1) = c sin(c).
        (cos_series(c, m), sin_series(c, m).scale(-c), c * c.sin())
    } else {
        // V = sin(c y) / c after normalizing the slope at 0 to 1.
        (
            sin_series(c, m).scale(1.0 / c),
            cos_series(c, m),
            c.cos(),
        )
    };
    Ok(EigenPoint {
        k,
        lambda: 0.0,
        mu: c * c,
        delta: [0.0, delta2],
        a: [
            ChebSeq::zeros(m),
            ChebSeq::zeros(m),
            ChebSeq::basis(0).truncated(m),
            a4,
            a5,
        ],
    })
}

pub fn pack(p: &EigenPoint, m: usize) -> DVector<f64> {
    let mut v = DVector::zeros(5 * m + 3);
    v[0] = p.mu;
    v[1] = p.delta[0];
    v[2] = p.delta[1];
    for j in 0..5 {
        for n in 0..m {
            v[3 + j * m + n] = p.a[j].get(n);
        }
    }
    v
}

pub fn unpack(k: usize, lambda: f64, v: &DVector<f64>, m: usize) -> EigenPoint {
    let a = core::array::from_fn(|j| ChebSeq::new((0..m).map(|n| v[3 + j * m + n]).collect()));
    EigenPoint { k, lambda, mu: v[0], delta: [v[1], v[2]], a }
}

enum Pinned {
    Lambda,
    Mu,
}

/// Newton with either the voltage or the eigenvalue held fixed.
fn newton_pinned(
    p0: &EigenPoint,
    m: usize,
    tol: f64,
    max_iter: usize,
    pinned: Pinned,
) -> Result<EigenPoint> {
    let mut p = EigenPoint {
        k: p0.k,
        lambda: p0.lambda,
        mu: p0.mu,
        delta: p0.delta,
        a: core::array::from_fn(|j| p0.a[j].truncated(m)),
    };
    let n_unknowns = 5 * m + 3;
    let mut res = residual(&p);
    let mut rn = res.sup_norm();
    for _ in 0..max_iter {
        if rn <= tol {
            return Ok(p);
        }
        let jac_full = jacobian(&p, m).to_dmatrix();
        // Unknown columns: drop lambda (col 0) or mu (col 1).
        let jac = match pinned {
            Pinned::Lambda => jac_full.columns(1, n_unknowns).into_owned(),
            Pinned::Mu => {
                let mut sel = nalgebra::DMatrix::zeros(5 * m + 3, n_unknowns);
                sel.column_mut(0).copy_from(&jac_full.column(0));
                for c in 0..(n_unknowns - 1) {
                    sel.column_mut(1 + c).copy_from(&jac_full.column(2 + c));
                }
                sel
            }
        };
        let rhs = -DVector::from_vec(res.project(m));
        let step = jac.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
        match pinned {
            Pinned::Lambda => {
                let x = pack(&p, m) + step;
                p = unpack(p.k, p.lambda, &x, m);
            }
            Pinned::Mu => {
                let lambda = p.lambda + step[0];
                let mut x = pack(&p, m);
                for i in 1..n_unknowns {
                    x[i] += step[i];
                }
                x[0] = p.mu;
                p = unpack(p.k, lambda, &x, m);
            }
        }
        res = residual(&p);
        rn = res.sup_norm();
    }
    if rn <= tol {
        Ok(p)
    } else {
        Err(Error::NewtonDiverged { residual: rn, iters: max_iter })
    }
}

/// Newton at fixed `lambda`.
pub fn newton_solve(p0: &EigenPoint, m: usize, tol: f64, max_iter: usize) -> Result<EigenPoint> {
    newton_pinned(p0, m, tol, max_iter, Pinned::Lambda)
}

/// Solve with the eigenvalue pinned to `mu_target` and `lambda` free,
/// marching in `mu` from the seed. The branch is regular in `mu` even at
/// the fold (where `mu -> 0`), so this stays well conditioned where
/// continuation in `lambda` degenerates.
pub fn solve_at_mu(p0: &EigenPoint, mu_target: f64, m: usize, tol: f64) -> Result<EigenPoint> {
    let mut p = p0.clone();
    let mut step = (mu_target - p.mu).clamp(-0.2, 0.2);
    loop {
        if (p.mu - mu_target).abs() < 1e-15 * (1.0 + mu_target.abs()) {
            return Ok(p);
        }
        let remaining = mu_target - p.mu;
        let d = if remaining.abs() <= step.abs() { remaining } else { step };
        let mut trial = p.clone();
        trial.mu = p.mu + d;
        match newton_pinned(&trial, m, tol, 25, Pinned::Mu) {
            Ok(next) => {
                p = next;
                step = (2.0 * d).clamp(-0.2, 0.2);
            }
            Err(e) => {
                step = d * 0.5;
                if step.abs() < 1e-12 {
                    return Err(e);
                }
            }
        }
    }
}

/// Eigenvalue branch sampled on the uniform grid `0, dl, 2 dl, ...` up to
/// `lambda_max`. Internal sub-steps are taken as needed; only grid points
/// are returned.
pub fn continue_branch(
    k: usize,
    m: usize,
    dl: f64,
    lambda_max: f64,
    tol: f64,
) -> Result<Vec<EigenPoint>> {
    let seed = seed_at_zero(k, m)?;
    let mut points = vec![newton_solve(&seed, m, tol, 10)?];
    let n_grid = (lambda_max / dl).round() as usize;
    for i in 1..=n_grid {
        let target = i as f64 * dl;
        let p = march_to_lambda(points.last().unwrap(), target, m, tol)?;
        points.push(p);
    }
    Ok(points)
}

fn march_to_lambda(from: &EigenPoint, target: f64, m: usize, tol: f64) -> Result<EigenPoint> {
    let mut p = from.clone();
    let mut step = target - p.lambda;
    while (p.lambda - target).abs() > 0.0 {
        let remaining = target - p.lambda;
        let d = if remaining.abs() <= step.abs() { remaining } else { step.abs() * remaining.signum() };
        let mut trial = p.clone();
        trial.lambda = p.lambda + d;
        match newton_solve(&trial, m, tol, 25) {
            Ok(next) => {
                p = next;
                step = 2.0 * d;
            }
            Err(e) => {
                step = d * 0.5;
                if step.abs() < 1e-10 {
                    return Err(e);
                }
            }
        }
    }
    Ok(p)
}

/// Converged eigenvalue `mu_k(lambda)` by continuation from the zero seed.
pub fn mu_of_lambda(k: usize, lambda: f64, m: usize, tol: f64) -> Result<f64> {
    let seed = seed_at_zero(k, m)?;
    let p0 = newton_solve(&seed, m, tol, 10)?;
    Ok(march_to_lambda(&p0, lambda, m, tol)?.mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_matches_known_values() {
        // J_0(1) and J_1(1), 15 digits.
        let j = bessel_j(1.0, 4);
        assert!((j[0] - 0.765197686557967).abs() < 1e-14);
        assert!((j[1] - 0.440050585744934).abs() < 1e-14);
    }

    #[test]
    fn seed_values_k1() {
        let m = 32;
        let p = seed_at_zero(1, m).unwrap();
        let want_mu = (core::f64::consts::PI / 2.0).powi(2);
        assert!((p.mu - want_mu).abs() < 1e-14);
        assert!((p.mu - 2.4674011002723395).abs() < 1e-12);
        // delta2 = (pi/2) sin(pi/2) = pi/2.
        assert!((p.delta[1] - core::f64::consts::FRAC_PI_2).abs() < 1e-14);
        // The series should evaluate to cos(pi y / 2).
        for &y in &[-1.0, -0.5, 0.0, 0.3, 1.0] {
            let v = p.a[3].eval(y).unwrap();
            assert!((v - (core::f64::consts::FRAC_PI_2 * y).cos()).abs() < 1e-14);
        }
        let r = residual(&p);
        assert!(r.sup_norm() < 1e-10, "seed residual {}", r.sup_norm());
    }

    #[test]
    fn seed_k2_is_odd_series() {
        let p = seed_at_zero(2, 32).unwrap();
        for (n, &c) in p.a[3].coeffs().iter().enumerate() {
            if n % 2 == 0 {
                assert_eq!(c, 0.0);
            }
        }
        // Phase normalized: slope 1 at 0.
        assert!((phase(2, &p.a[3]) - 1.0).abs() < 1e-13);
        let r = residual(&p);
        assert!(r.sup_norm() < 1e-10);
    }

    #[test]
    fn zero_eigenvector_violates_phase_row() {
        let mut p = seed_at_zero(1, 16).unwrap();
        p.a[3] = ChebSeq::zeros(16);
        p.a[4] = ChebSeq::zeros(16);
        p.delta[1] = 0.0;
        let r = residual(&p);
        assert_eq!(r.eta[2], -1.0);
    }

    #[test]
    fn newton_converges_at_small_lambda() {
        let m = 40;
        let seed = seed_at_zero(1, m).unwrap();
        let mut p0 = newton_solve(&seed, m, 1e-12, 10).unwrap();
        p0.lambda = 0.1;
        let p = newton_solve(&p0, m, 1e-12, 30).unwrap();
        assert!(residual(&p).sup_norm() <= 1e-12);
        assert!(p.mu < seed.mu);
    }

    #[test]
    fn solve_at_mu_recovers_lambda() {
        let m = 40;
        let seed = seed_at_zero(1, m).unwrap();
        let p0 = newton_solve(&seed, m, 1e-12, 10).unwrap();
        let target = 2.0;
        let p = solve_at_mu(&p0, target, m, 1e-12).unwrap();
        assert!((p.mu - target).abs() < 1e-12);
        // Cross-check: continue in lambda to that point, mu must agree.
        let mu = mu_of_lambda(1, p.lambda, m, 1e-12).unwrap();
        assert!((mu - target).abs() < 1e-9, "mu({}) = {}", p.lambda, mu);
    }
}
