//! Time-periodic solutions in an even-in-time cosine basis crossed with
//! Chebyshev polynomials in space.
//!
//! For a fixed rational frequency `omega = pi p / (2 q)` (coprime `p, q`)
//! the rescaled orbit is `2 pi`-periodic and expands as
//! `U_j(y, t) = sum_{n,k >= 0} (a_j)_{n,k} m_{n,k} T_n(y) cos(k t)` with
//! `m_{n,k} = (n == 0 ? 1 : 2)(k == 0 ? 1 : 2)`; the two-sided
//! identification `a_{n,k} = a_{|n|,|k|}` governs the convolutions. The
//! unknown left slope becomes a cosine series `delta(t)`. Branches bifurcate
//! from the steady branch where an eigenvalue crosses `omega^2` and are
//! followed in `lambda` with the arclength engine.

use crate::continuation::{self, Branch, BranchPoint, ContinuationProblem, Settings};
use crate::eigen::{self, EigenPoint};
use crate::error::Error;
use crate::matrix::Mat;
use crate::seqspace::ChebSeq;
use crate::Result;
use nalgebra::{DMatrix, DVector};

/// Dense two-index coefficient array: `n` Chebyshev rows, `k` cosine
/// columns, implicit zeros beyond.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCheb {
    n_cheb: usize,
    n_four: usize,
    data: Vec<f64>,
}

impl FourierCheb {
    pub fn zeros(n_cheb: usize, n_four: usize) -> Self {
        Self { n_cheb, n_four, data: vec![0.0; n_cheb * n_four] }
    }

    pub fn n_cheb(&self) -> usize {
        self.n_cheb
    }

    pub fn n_four(&self) -> usize {
        self.n_four
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> f64 {
        if n < self.n_cheb && k < self.n_four {
            self.data[n * self.n_four + k]
        } else {
            0.0
        }
    }

    #[inline]
    pub fn set(&mut self, n: usize, k: usize, v: f64) {
        assert!(n < self.n_cheb && k < self.n_four);
        self.data[n * self.n_four + k] = v;
    }

    /// Embed a one-dimensional Chebyshev sequence into cosine slice `k`.
    pub fn from_cheb_slice(seq: &ChebSeq<f64>, n_cheb: usize, n_four: usize, k: usize) -> Self {
        let mut g = Self::zeros(n_cheb, n_four);
        for n in 0..n_cheb {
            g.set(n, k, seq.get(n));
        }
        g
    }

    /// Cosine slice `k` as a one-dimensional sequence.
    pub fn cheb_slice(&self, k: usize) -> ChebSeq<f64> {
        ChebSeq::new((0..self.n_cheb).map(|n| self.get(n, k)).collect())
    }

    pub fn sup_entry(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Two-sided discrete convolution with symmetric extension in both
    /// indices; the support grows additively along each axis.
    pub fn conv2(&self, other: &Self) -> Self {
        let (ma, ka) = (self.n_cheb as isize, self.n_four as isize);
        let (mb, kb) = (other.n_cheb as isize, other.n_four as isize);
        if ma == 0 || ka == 0 || mb == 0 || kb == 0 {
            return Self::zeros(0, 0);
        }
        let mo = (ma + mb - 1) as usize;
        let ko = (ka + kb - 1) as usize;
        let mut out = Self::zeros(mo, ko);
        for n in 0..mo as isize {
            for k in 0..ko as isize {
                let mut acc = 0.0;
                for n1 in (1 - ma)..ma {
                    let n2 = n - n1;
                    if n2 <= -mb || n2 >= mb {
                        continue;
                    }
                    let an = n1.unsigned_abs() * self.n_four;
                    let bn = n2.unsigned_abs() * other.n_four;
                    for k1 in (1 - ka)..ka {
                        let k2 = k - k1;
                        if k2 > -kb && k2 < kb {
                            acc += self.data[an + k1.unsigned_abs()]
                                * other.data[bn + k2.unsigned_abs()];
                        }
                    }
                }
                out.data[n as usize * ko + k as usize] = acc;
            }
        }
        out
    }

    /// Value `U(y, t)`: cosine sums per Chebyshev mode, then Clenshaw.
    pub fn eval(&self, y: f64, t: f64) -> Result<f64> {
        let mut s = Vec::with_capacity(self.n_cheb);
        for n in 0..self.n_cheb {
            let mut acc = self.get(n, 0);
            for k in 1..self.n_four {
                acc += 2.0 * self.get(n, k) * (k as f64 * t).cos();
            }
            s.push(acc);
        }
        ChebSeq::new(s).eval(y)
    }

    /// Matrix of `h -> c * h` on one-sided `(n, k)` arrays: the entry at
    /// (row `(n, k)`, column `(n', k')`) sums `c(|n -+ n'|, |k -+ k'|)` over
    /// sign choices, a single term per axis when the column index is 0.
    pub fn mult_op_matrix(&self, rows_n: usize, rows_k: usize, cols_n: usize, cols_k: usize) -> Mat<f64> {
        let mut mat = Mat::zeros(rows_n * rows_k, cols_n * cols_k);
        for n in 0..rows_n {
            for k in 0..rows_k {
                let r = n * rows_k + k;
                for np in 0..cols_n {
                    for kp in 0..cols_k {
                        let mut v = 0.0;
                        let n_ids: &[usize] = if np == 0 {
                            &[n]
                        } else {
                            &[n.abs_diff(np), n + np]
                        };
                        // Fold the two sign choices per axis.
                        for &ni in n_ids.iter().take(if np == 0 { 1 } else { 2 }) {
                            if kp == 0 {
                                v += self.get(ni, k);
                            } else {
                                v += self.get(ni, k.abs_diff(kp)) + self.get(ni, k + kp);
                            }
                        }
                        mat.set(r, np * cols_k + kp, v);
                    }
                }
            }
        }
        mat
    }
}

/// A candidate periodic orbit at fixed frequency.
#[derive(Clone, Debug)]
pub struct PeriodicPoint {
    pub lambda: f64,
    pub omega: f64,
    pub delta: Vec<f64>,
    pub a: [FourierCheb; 3],
}

impl PeriodicPoint {
    pub fn eval_u(&self, y: f64, t: f64) -> Result<f64> {
        self.a[0].eval(y, t)
    }

    /// Max of `|U|` over a tensor grid.
    pub fn sup_norm(&self, n_y: usize, n_t: usize) -> f64 {
        let mut m = 0.0f64;
        for i in 0..=n_y {
            let y = -1.0 + 2.0 * i as f64 / n_y as f64;
            for j in 0..n_t {
                let t = 2.0 * core::f64::consts::PI * j as f64 / n_t as f64;
                m = m.max(self.eval_u(y, t).unwrap().abs());
            }
        }
        m
    }

    /// Min of `U` over a tensor grid (touchdown monitor).
    pub fn min_u(&self, n_y: usize, n_t: usize) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..=n_y {
            let y = -1.0 + 2.0 * i as f64 / n_y as f64;
            for j in 0..n_t {
                let t = 2.0 * core::f64::consts::PI * j as f64 / n_t as f64;
                m = m.min(self.eval_u(y, t).unwrap());
            }
        }
        m
    }

    /// Largest trailing-mode magnitude relative to the largest entry, per
    /// axis; small values indicate the truncation resolves the orbit.
    pub fn tail_ratio(&self) -> (f64, f64) {
        let mut top = 0.0f64;
        let mut tail_n = 0.0f64;
        let mut tail_k = 0.0f64;
        for g in &self.a {
            top = top.max(g.sup_entry());
            let (mc, kc) = (g.n_cheb(), g.n_four());
            for k in 0..kc {
                tail_n = tail_n.max(g.get(mc - 1, k).abs());
            }
            for n in 0..mc {
                tail_k = tail_k.max(g.get(n, kc - 1).abs());
            }
        }
        if top == 0.0 {
            (0.0, 0.0)
        } else {
            (tail_n / top, tail_k / top)
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodicResidual {
    pub eta: Vec<f64>,
    pub rows: [FourierCheb; 3],
}

impl PeriodicResidual {
    pub fn sup_norm(&self) -> f64 {
        let mut m = self.eta.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        for r in &self.rows {
            m = m.max(r.sup_entry());
        }
        m
    }

    pub fn project(&self, m: usize, kk: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(kk + 3 * m * kk);
        for k in 0..kk {
            v.push(self.eta.get(k).copied().unwrap_or(0.0));
        }
        for r in &self.rows {
            for n in 0..m {
                for k in 0..kk {
                    v.push(r.get(n, k));
                }
            }
        }
        v
    }
}

fn rhs_coeffs(p: &PeriodicPoint) -> [FourierCheb; 3] {
    let a3sq = p.a[2].conv2(&p.a[2]);
    // c2 = lambda a3^2 - omega^2 k^2 a1, entrywise in (n, k).
    let (m1, k1) = (p.a[0].n_cheb(), p.a[0].n_four());
    let mut c2 = FourierCheb::zeros(a3sq.n_cheb().max(m1), a3sq.n_four().max(k1));
    for n in 0..c2.n_cheb() {
        for k in 0..c2.n_four() {
            let v = p.lambda * a3sq.get(n, k)
                - p.omega * p.omega * (k * k) as f64 * p.a[0].get(n, k);
            c2.set(n, k, v);
        }
    }
    let mut c3 = p.a[1].conv2(&a3sq);
    for v in c3.data.iter_mut() {
        *v = -*v;
    }
    [p.a[1].clone(), c2, c3]
}

/// Full residual of the periodic map: per cosine mode, the right boundary
/// scalar on `U_1` and the three component sequences.
pub fn residual(p: &PeriodicPoint) -> PeriodicResidual {
    let c = rhs_coeffs(p);
    let kk = p.a[0].n_four();
    let eta = (0..kk)
        .map(|k| p.a[0].cheb_slice(k).value_at_one())
        .collect();

    let rows = core::array::from_fn(|j| {
        let cj = &c[j];
        let mn = p.a[j].n_cheb().max(cj.n_cheb() + 1);
        let kn = p.a[j].n_four().max(cj.n_four());
        let mut out = FourierCheb::zeros(mn, kn);
        for k in 0..kn {
            // Row 0: left boundary value minus its target.
            let alpha = match j {
                0 => 0.0,
                1 => p.delta.get(k).copied().unwrap_or(0.0),
                _ => {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            out.set(0, k, p.a[j].cheb_slice(k).value_at_minus_one() - alpha);
            for n in 1..mn {
                let v = 2.0 * n as f64 * p.a[j].get(n, k) + cj.get(n + 1, k) - cj.get(n - 1, k);
                out.set(n, k, v);
            }
        }
        out
    });
    PeriodicResidual { eta, rows }
}

/// Jacobian of the `(m, kk)` projection. Rows `[eta(kk); g1; g2; g3]`,
/// columns `[lambda | delta(kk) | a1 | a2 | a3]` with `(n, k)` flattened as
/// `n * kk + k`.
pub fn jacobian(p: &PeriodicPoint, m: usize, kk: usize) -> Mat<f64> {
    let blk = m * kk;
    let rows = kk + 3 * blk;
    let mut jac = Mat::zeros(rows, 1 + kk + 3 * blk);
    let col_lambda = 0;
    let col_delta = |k: usize| 1 + k;
    let col_a = |j: usize, n: usize, k: usize| 1 + kk + j * blk + n * kk + k;
    let row_g = |j: usize, n: usize, k: usize| kk + j * blk + n * kk + k;

    // eta rows.
    for k in 0..kk {
        for n in 0..m {
            jac.set(k, col_a(0, n, k), if n == 0 { 1.0 } else { 2.0 });
        }
    }

    // Left boundary rows.
    for j in 0..3 {
        for k in 0..kk {
            for n in 0..m {
                let w = if n == 0 {
                    1.0
                } else if n % 2 == 0 {
                    2.0
                } else {
                    -2.0
                };
                jac.set(row_g(j, 0, k), col_a(j, n, k), w);
            }
        }
    }
    for k in 0..kk {
        jac.set(row_g(1, 0, k), col_delta(k), -1.0);
    }

    let a3sq = p.a[2].conv2(&p.a[2]);
    let a2a3 = p.a[1].conv2(&p.a[2]);
    let m_a3 = p.a[2].mult_op_matrix(m + 1, kk, m, kk);
    let m_a3sq = a3sq.mult_op_matrix(m + 1, kk, m, kk);
    let m_a2a3 = a2a3.mult_op_matrix(m + 1, kk, m, kk);
    let row2 = |n: usize, k: usize| n * kk + k;

    let osq = p.omega * p.omega;
    for j in 0..3 {
        for n in 1..m {
            for k in 0..kk {
                jac.add_to(row_g(j, n, k), col_a(j, n, k), 2.0 * n as f64);
            }
        }
    }
    for n in 1..m {
        for k in 0..kk {
            // g1: c1 = a2.
            if n + 1 < m {
                jac.add_to(row_g(0, n, k), col_a(1, n + 1, k), 1.0);
            }
            jac.add_to(row_g(0, n, k), col_a(1, n - 1, k), -1.0);

            // g2: c2 = lambda a3^2 - omega^2 k^2 a1.
            for s in 0..blk {
                let d = m_a3.at(row2(n + 1, k), s) - m_a3.at(row2(n - 1, k), s);
                if d != 0.0 {
                    jac.add_to(row_g(1, n, k), 1 + kk + 2 * blk + s, 2.0 * p.lambda * d);
                }
            }
            let w = osq * (k * k) as f64;
            if n + 1 < m {
                jac.add_to(row_g(1, n, k), col_a(0, n + 1, k), -w);
            }
            jac.add_to(row_g(1, n, k), col_a(0, n - 1, k), w);
            jac.add_to(
                row_g(1, n, k),
                col_lambda,
                a3sq.get(n + 1, k) - a3sq.get(n - 1, k),
            );

            // g3: c3 = -a2 a3^2.
            for s in 0..blk {
                let d2 = m_a3sq.at(row2(n + 1, k), s) - m_a3sq.at(row2(n - 1, k), s);
                if d2 != 0.0 {
                    jac.add_to(row_g(2, n, k), 1 + kk + blk + s, -d2);
                }
                let d3 = m_a2a3.at(row2(n + 1, k), s) - m_a2a3.at(row2(n - 1, k), s);
                if d3 != 0.0 {
                    jac.add_to(row_g(2, n, k), 1 + kk + 2 * blk + s, -2.0 * d3);
                }
            }
        }
    }
    jac
}

pub fn pack(p: &PeriodicPoint, m: usize, kk: usize) -> DVector<f64> {
    let blk = m * kk;
    let mut v = DVector::zeros(kk + 3 * blk);
    for k in 0..kk {
        v[k] = p.delta.get(k).copied().unwrap_or(0.0);
    }
    for j in 0..3 {
        for n in 0..m {
            for k in 0..kk {
                v[kk + j * blk + n * kk + k] = p.a[j].get(n, k);
            }
        }
    }
    v
}

pub fn unpack(lambda: f64, omega: f64, v: &DVector<f64>, m: usize, kk: usize) -> PeriodicPoint {
    let blk = m * kk;
    let delta = (0..kk).map(|k| v[k]).collect();
    let a = core::array::from_fn(|j| {
        let mut g = FourierCheb::zeros(m, kk);
        for n in 0..m {
            for k in 0..kk {
                g.set(n, k, v[kk + j * blk + n * kk + k]);
            }
        }
        g
    });
    PeriodicPoint { lambda, omega, delta, a }
}

/// Continuation problem at fixed frequency.
pub struct PeriodicProblem {
    pub m: usize,
    pub kk: usize,
    pub omega: f64,
}

impl ContinuationProblem for PeriodicProblem {
    fn dim(&self) -> usize {
        self.kk + 3 * self.m * self.kk
    }

    fn residual(&self, lambda: f64, u: &DVector<f64>) -> DVector<f64> {
        let p = unpack(lambda, self.omega, u, self.m, self.kk);
        DVector::from_vec(residual(&p).project(self.m, self.kk))
    }

    fn jacobian(&self, lambda: f64, u: &DVector<f64>) -> DMatrix<f64> {
        let p = unpack(lambda, self.omega, u, self.m, self.kk);
        jacobian(&p, self.m, self.kk).to_dmatrix()
    }
}

/// Embed an eigen-branch point (steady data in its first three sequences)
/// as a time-independent orbit.
fn embed_steady(ep: &EigenPoint, omega: f64, m: usize, kk: usize) -> PeriodicPoint {
    let mut delta = vec![0.0; kk];
    delta[0] = ep.delta[0];
    let a = core::array::from_fn(|j| FourierCheb::from_cheb_slice(&ep.a[j], m, kk, 0));
    PeriodicPoint { lambda: ep.lambda, omega, delta, a }
}

/// First-order bifurcation direction in the extended space `[lambda; u]`:
/// the time-harmonic eigenvector placed in cosine slice 1, including the
/// induced slope and `1/(1+U)` perturbations.
fn kernel_direction(ep: &EigenPoint, m: usize, kk: usize) -> DVector<f64> {
    let blk = m * kk;
    let mut d = DVector::zeros(1 + kk + 3 * blk);
    if kk < 2 {
        return d;
    }
    d[1 + 1] = ep.delta[1] / 2.0; // delta slice k = 1
    let u3sq_v = ep.a[2].conv(&ep.a[2]).conv(&ep.a[3]).scale(-1.0);
    let slices = [&ep.a[3], &ep.a[4], &u3sq_v];
    for (j, s) in slices.iter().enumerate() {
        for n in 0..m {
            d[1 + kk + j * blk + n * kk + 1] = s.get(n) / 2.0;
        }
    }
    d
}

/// Predictor for the branch with mode `k` and frequency `omega = pi p/(2q)`:
/// the steady state at the unique `lambda0` with `mu_k(lambda0) = omega^2`
/// plus amplitude `b` times the harmonic eigenvector.
pub fn predictor(
    k: usize,
    p: usize,
    q: usize,
    b: f64,
    eig_branch: &[EigenPoint],
    m: usize,
    kk: usize,
    tol: f64,
) -> Result<(PeriodicPoint, EigenPoint)> {
    if gcd(p, q) != 1 {
        return Err(Error::InvalidParameter(format!("p = {p}, q = {q} must be coprime")));
    }
    let omega = core::f64::consts::PI * p as f64 / (2.0 * q as f64);
    let target = omega * omega;
    let first = eig_branch.first().ok_or_else(|| {
        Error::InvalidParameter("empty eigenvalue branch".into())
    })?;
    if first.k != k {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue branch is for mode {}, requested mode {k}",
            first.k
        )));
    }
    if target >= first.mu || eig_branch.len() < 2 {
        return Err(Error::NoBifurcation { omega_sq: target });
    }
    // Bisection on the stored branch: eigenvalues decrease along it.
    let mut seed = first;
    for ep in eig_branch {
        if ep.mu >= target {
            seed = ep;
        } else {
            break;
        }
    }
    let m_eig = seed.a[0].len().max(seed.a[3].len());
    let ep = eigen::solve_at_mu(seed, target, m_eig, tol)?;

    let mut point = embed_steady(&ep, omega, m, kk);
    let dir = kernel_direction(&ep, m, kk);
    let u = pack(&point, m, kk) + b * dir.rows(1, dir.len() - 1);
    point = unpack(ep.lambda, omega, &u, m, kk);
    Ok((point, ep))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Options for a periodic branch run.
#[derive(Clone, Debug)]
pub struct BranchRun {
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub b: f64,
    pub m: usize,
    pub kk: usize,
    pub max_steps: usize,
    /// Stop once `lambda` leaves this window.
    pub lambda_window: (f64, f64),
}

impl Default for BranchRun {
    fn default() -> Self {
        Self {
            k: 1,
            p: 1,
            q: 11,
            b: 1e-3,
            m: 40,
            kk: 20,
            max_steps: 400,
            lambda_window: (1e-4, 0.36),
        }
    }
}

/// Continue a periodic branch from the analytic predictor. Returns the
/// engine branch; unpack points with [`unpack`] and the run's sizes.
pub fn run_branch(
    run: &BranchRun,
    eig_branch: &[EigenPoint],
    settings: &Settings,
    tol: f64,
) -> Result<Branch> {
    let (pred, ep) = predictor(run.k, run.p, run.q, run.b, eig_branch, run.m, run.kk, tol)?;
    let omega = pred.omega;
    let problem = PeriodicProblem { m: run.m, kk: run.kk, omega };

    // Correct the predictor on the hyperplane orthogonal to the kernel
    // direction: one arclength step of length b from the embedded steady
    // state, which is itself an exact branch point.
    let trivial = embed_steady(&ep, omega, run.m, run.kk);
    let dir = kernel_direction(&ep, run.m, run.kk);
    let dn = dir.norm();
    if dn == 0.0 {
        return Err(Error::SingularSystem);
    }
    let tangent = &dir / dn;
    let start = BranchPoint {
        param: ep.lambda,
        unknowns: pack(&trivial, run.m, run.kk),
        residual_norm: residual(&trivial).project(run.m, run.kk).iter().fold(0.0f64, |a, b| a.max(b.abs())),
        tangent,
    };
    let (first, _) = continuation::arclength_step(&problem, &start, run.b * dn, settings)?;

    let window = run.lambda_window;
    let mkk = (run.m, run.kk);
    let branch = continuation::run(
        &problem,
        first,
        settings,
        run.max_steps,
        &format!("periodic k={} p={} q={}", run.k, run.p, run.q),
        vec![run.m, run.kk],
        |pt| {
            if pt.param < window.0 || pt.param > window.1 {
                return true;
            }
            let pp = unpack(pt.param, omega, &pt.unknowns, mkk.0, mkk.1);
            pp.min_u(24, 16) <= -0.999
        },
    );
    Ok(branch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady;

    #[test]
    fn conv2_identity() {
        let mut delta00 = FourierCheb::zeros(1, 1);
        delta00.set(0, 0, 1.0);
        let mut b = FourierCheb::zeros(3, 2);
        b.set(0, 0, 0.5);
        b.set(1, 1, -0.25);
        b.set(2, 0, 0.125);
        assert_eq!(delta00.conv2(&b), b);
    }

    #[test]
    fn conv2_reduces_to_1d_for_time_constant_grids() {
        let a1 = ChebSeq::new(vec![0.3, -0.1, 0.05]);
        let b1 = ChebSeq::new(vec![1.0, 0.2]);
        let a = FourierCheb::from_cheb_slice(&a1, 3, 1, 0);
        let b = FourierCheb::from_cheb_slice(&b1, 2, 1, 0);
        let c2 = a.conv2(&b);
        let c1 = a1.conv(&b1);
        for n in 0..c1.len() {
            assert!((c2.get(n, 0) - c1.get(n)).abs() < 1e-15);
        }
    }

    #[test]
    fn conv2_eval_product() {
        let mut a = FourierCheb::zeros(3, 2);
        let mut b = FourierCheb::zeros(2, 3);
        let mut v = 0.1;
        for n in 0..3 {
            for k in 0..2 {
                a.set(n, k, v);
                v += 0.07;
            }
        }
        for n in 0..2 {
            for k in 0..3 {
                b.set(n, k, v);
                v -= 0.05;
            }
        }
        let c = a.conv2(&b);
        for &y in &[-0.8, 0.0, 0.6] {
            for &t in &[0.0, 0.9, 2.4] {
                let lhs = c.eval(y, t).unwrap();
                let rhs = a.eval(y, t).unwrap() * b.eval(y, t).unwrap();
                assert!((lhs - rhs).abs() < 1e-11, "({y},{t}): {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn zero_state_residual_vanishes() {
        let p = PeriodicPoint {
            lambda: 0.0,
            omega: 0.7,
            delta: vec![0.0; 4],
            a: [
                FourierCheb::zeros(6, 4),
                FourierCheb::zeros(6, 4),
                FourierCheb::from_cheb_slice(&ChebSeq::basis(0), 6, 4, 0),
            ],
        };
        assert_eq!(residual(&p).sup_norm(), 0.0);
    }

    #[test]
    fn predictor_examples() {
        let eig = crate::eigen::continue_branch(1, 48, 0.005, 0.34, 1e-12).unwrap();
        let (m, kk) = (24, 6);

        // b = 0 reduces to the steady embedding: the residual is a steady
        // residual, zero on every nonconstant cosine mode.
        let (pt, _) = predictor(1, 9, 11, 0.0, &eig, m, kk, 1e-12).unwrap();
        let r = residual(&pt);
        assert!(r.sup_norm() < 1e-11);
        for row in &r.rows {
            for n in 0..row.n_cheb() {
                for k in 1..row.n_four() {
                    assert_eq!(row.get(n, k), 0.0);
                }
            }
        }

        // The bifurcation voltage climbs toward the fold as the frequency
        // drops (the eigenvalue decreases in lambda).
        let mut last = 0.0;
        for p in [10usize, 7, 4, 1] {
            let (_, ep) = predictor(1, p, 11, 1e-3, &eig, m, kk, 1e-12).unwrap();
            let omega_sq = (core::f64::consts::PI * p as f64 / 22.0).powi(2);
            assert!((ep.mu - omega_sq).abs() < 1e-12);
            assert!(ep.lambda > last, "lambda0 not increasing as p drops");
            last = ep.lambda;
        }

        // p / q -> 1^- pushes lambda0 toward 0.
        let (_, ep10) = predictor(1, 10, 11, 1e-3, &eig, m, kk, 1e-12).unwrap();
        let (_, ep21) = predictor(1, 21, 22, 1e-3, &eig, m, kk, 1e-12).unwrap();
        assert!(ep21.lambda < ep10.lambda && ep21.lambda > 0.0);

        // Frequencies outside the eigenvalue range have no bifurcation, and
        // the frequency ratio must be in lowest terms.
        assert!(matches!(
            predictor(1, 12, 11, 1e-3, &eig, m, kk, 1e-12),
            Err(Error::NoBifurcation { .. })
        ));
        assert!(matches!(
            predictor(1, 11, 11, 1e-3, &eig, m, kk, 1e-12),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn steady_zero_embeds_for_any_omega() {
        let m = 24;
        let mut p0 = steady::zero_state(m);
        p0.lambda = 0.2;
        let s = steady::newton_solve(&p0, m, 1e-12, 30).unwrap();
        let steady_res = steady::residual(&s).sup_norm();

        for &omega in &[0.3, 0.7, 1.9] {
            let kk = 5;
            let mut delta = vec![0.0; kk];
            delta[0] = s.delta;
            let p = PeriodicPoint {
                lambda: s.lambda,
                omega,
                delta,
                a: core::array::from_fn(|j| FourierCheb::from_cheb_slice(&s.a[j], m, kk, 0)),
            };
            let r = residual(&p);
            assert!(r.sup_norm() <= steady_res + 1e-15);
            // Nonzero cosine modes are exactly zero.
            for row in &r.rows {
                for n in 0..row.n_cheb() {
                    for k in 1..row.n_four() {
                        assert_eq!(row.get(n, k), 0.0);
                    }
                }
            }
        }
    }
}
