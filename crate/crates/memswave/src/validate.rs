//! Rigorous enclosure of the saddle-node point of the steady branch.
//!
//! The fold is a zero of the augmented map
//!
//! ```text
//! F(lambda, delta, a, gamma, b) = (phase(b) - 1,  f(lambda, delta, a),  g)
//! ```
//!
//! where `f` is the steady map, `g` its directional derivative in
//! `(delta, a)` along `(gamma, b)` (so a zero of `F` carries a kernel
//! vector), and the phase row normalizes that kernel. A numerical zero
//! `x_bar` of the truncated map is certified with a Newton-Kantorovich
//! argument: with `A_dagger` the approximate derivative (finite Jacobian
//! block plus the diagonal derivative tail `2n`) and `A` the approximate
//! inverse (floating inverse of the finite block plus the `1/(2n)` tail),
//! interval-arithmetic bounds
//!
//! ```text
//! ||A F(x_bar)||        <= Y0
//! ||I - A A_dagger||    <= Z0
//! ||A (DF - A_dagger)|| <= Z1
//! ||A (DF(x_bar + z) - DF(x_bar))|| <= Z2 r   for ||z|| <= r
//! ```
//!
//! feed the radii polynomial `p(r) = Z2 r^2 + (Z1 + Z0 - 1) r + Y0`; a
//! verified `p(r0) < 0` proves a unique true zero within `r0` of `x_bar` in
//! the product of geometrically weighted sequence norms.

use crate::continuation::{self, Settings};
use crate::error::Error;
use crate::interval::Interval;
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::seqspace::{ChebSeq, Weight};
use crate::steady::{self, SteadyPoint};
use crate::Result;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Point of the augmented space: the steady unknowns plus a kernel candidate
/// `(gamma, b)` for the derivative in `(delta, a)`.
#[derive(Clone, Debug)]
pub struct SaddlePoint<T> {
    pub lambda: T,
    pub delta: T,
    pub a: [ChebSeq<T>; 3],
    pub gamma: T,
    pub b: [ChebSeq<T>; 3],
}

impl SaddlePoint<f64> {
    pub fn to_intervals(&self) -> SaddlePoint<Interval> {
        self.to_intervals_widened(0.0)
    }

    /// Interval lift with every entry widened by `r >= 0`; used to probe
    /// that the bound computations are stable under extra outward rounding.
    pub fn to_intervals_widened(&self, r: f64) -> SaddlePoint<Interval> {
        let lift = |v: f64| Interval::point(v).widen(r);
        let lift_seq = |s: &ChebSeq<f64>| ChebSeq::new(s.coeffs().iter().map(|&c| lift(c)).collect());
        SaddlePoint {
            lambda: lift(self.lambda),
            delta: lift(self.delta),
            a: core::array::from_fn(|j| lift_seq(&self.a[j])),
            gamma: lift(self.gamma),
            b: core::array::from_fn(|j| lift_seq(&self.b[j])),
        }
    }

    pub fn steady_part(&self) -> SteadyPoint<f64> {
        SteadyPoint { lambda: self.lambda, delta: self.delta, a: self.a.clone() }
    }
}

/// The phase row: a fixed linear functional on the first `m` coefficients
/// of `b_1` (the series value at `y = 0`, rescaled once so the numerically
/// computed kernel has phase exactly 1). Keeping the support finite makes
/// the approximate derivative capture the row exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseFunctional {
    pub weights: Vec<f64>,
}

impl PhaseFunctional {
    /// Unscaled value-at-zero weights on `m` modes.
    pub fn value_at_zero(m: usize) -> Self {
        let mut w = vec![0.0; m];
        for (n, slot) in w.iter_mut().enumerate() {
            if n == 0 {
                *slot = 1.0;
            } else if n % 2 == 0 {
                *slot = if (n / 2) % 2 == 0 { 2.0 } else { -2.0 };
            }
        }
        Self { weights: w }
    }

    /// Rescale so that `apply(kernel) = 1`.
    pub fn normalized_to(mut self, kernel_b1: &ChebSeq<f64>) -> Result<Self> {
        let s: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(n, w)| w * kernel_b1.get(n))
            .sum();
        if s.abs() < 1e-12 {
            return Err(Error::SingularSystem);
        }
        for w in self.weights.iter_mut() {
            *w /= s;
        }
        Ok(self)
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for w in self.weights.iter_mut() {
            *w *= factor;
        }
        self
    }

    pub fn apply<T: Scalar>(&self, b1: &ChebSeq<T>) -> T {
        let mut acc = T::zero();
        for (n, &w) in self.weights.iter().enumerate() {
            if w != 0.0 {
                acc = acc + T::from_f64(w) * b1.get(n);
            }
        }
        acc
    }
}

#[derive(Clone, Debug)]
pub struct SaddleResidual<T> {
    pub phase: T,
    pub eta_a: T,
    pub f: [ChebSeq<T>; 3],
    pub eta_b: T,
    pub g: [ChebSeq<T>; 3],
}

impl<T: Scalar> SaddleResidual<T> {
    pub fn sup_norm(&self) -> f64 {
        let mut m = self.phase.mag().max(self.eta_a.mag()).max(self.eta_b.mag());
        for r in self.f.iter().chain(self.g.iter()) {
            for &c in r.coeffs() {
                m = m.max(c.mag());
            }
        }
        m
    }

    pub fn project(&self, m: usize) -> Vec<T> {
        let mut v = Vec::with_capacity(6 * m + 3);
        v.push(self.phase);
        v.push(self.eta_a);
        for r in &self.f {
            for n in 0..m {
                v.push(r.get(n));
            }
        }
        v.push(self.eta_b);
        for r in &self.g {
            for n in 0..m {
                v.push(r.get(n));
            }
        }
        v
    }
}

/// Directional-derivative sequences `d = (b2, 2 lambda a3 b3,
/// -a3^2 b2 - 2 a2 a3 b3)`.
pub fn dir_coeffs<T: Scalar>(x: &SaddlePoint<T>) -> [ChebSeq<T>; 3] {
    let a3b3 = x.a[2].conv(&x.b[2]);
    let d2 = a3b3.scale(T::from_f64(2.0) * x.lambda);
    let a3sq = x.a[2].conv(&x.a[2]);
    let a2a3 = x.a[1].conv(&x.a[2]);
    let d3 = a3sq.conv(&x.b[1]).add(&a2a3.conv(&x.b[2]).scale(T::from_f64(2.0))).scale(-T::one());
    [x.b[1].clone(), d2, d3]
}

/// Full residual of the augmented map.
pub fn residual<T: Scalar>(x: &SaddlePoint<T>, ell: &PhaseFunctional) -> SaddleResidual<T> {
    let sp = SteadyPoint { lambda: x.lambda, delta: x.delta, a: x.a.clone() };
    let fr = steady::residual(&sp);

    let d = dir_coeffs(x);
    let alpha = [T::zero(), x.gamma, T::zero()];
    let eta_b = x.b[0].value_at_one();
    let g = core::array::from_fn(|j| {
        let mut row = x.b[j].lambda_op().add(&d[j].t_op());
        row.set(0, x.b[j].value_at_minus_one() - alpha[j]);
        row
    });
    SaddleResidual {
        phase: ell.apply(&x.b[0]) - T::one(),
        eta_a: fr.eta,
        f: fr.rows,
        eta_b,
        g,
    }
}

/// Square Jacobian of the `m`-mode projection, rows and columns both in the
/// order `[lambda | delta | a1 a2 a3 | gamma | b1 b2 b3]` (size `6m + 3`).
pub fn jacobian<T: Scalar>(x: &SaddlePoint<T>, ell: &PhaseFunctional, m: usize) -> Mat<T> {
    let n = 6 * m + 3;
    let mut jac = Mat::zeros(n, n);
    let col_lambda = 0;
    let col_a = |j: usize, s: usize| 2 + j * m + s;
    let col_gamma = 2 + 3 * m;
    let col_b = |j: usize, s: usize| 3 + 3 * m + j * m + s;
    let row_g = |j: usize, s: usize| 3 + 3 * m + j * m + s;
    let row_eta_b = 2 + 3 * m;

    // Steady block: rows [eta_a, f1, f2, f3] land at 1..3m+2 with identical
    // column order.
    let sp = SteadyPoint { lambda: x.lambda, delta: x.delta, a: x.a.clone() };
    let sj = steady::jacobian(&sp, m);
    for r in 0..(3 * m + 1) {
        for c in 0..(3 * m + 2) {
            jac.set(1 + r, c, sj.at(r, c));
        }
    }

    // Phase row.
    for (s, &w) in ell.weights.iter().take(m).enumerate() {
        jac.set(0, col_b(0, s), T::from_f64(w));
    }

    // eta_b row.
    for s in 0..m {
        jac.set(row_eta_b, col_b(0, s), if s == 0 { T::one() } else { T::from_f64(2.0) });
    }

    // g boundary rows.
    let two = T::from_f64(2.0);
    for j in 0..3 {
        for s in 0..m {
            let w = if s == 0 {
                T::one()
            } else if s % 2 == 0 {
                two
            } else {
                -two
            };
            jac.set(row_g(j, 0), col_b(j, s), w);
        }
    }
    jac.set(row_g(1, 0), col_gamma, -T::one());

    // g interior rows.
    let a3sq = x.a[2].conv(&x.a[2]);
    let a2a3 = x.a[1].conv(&x.a[2]);
    let a3b3 = x.a[2].conv(&x.b[2]);
    let a3b2 = x.a[2].conv(&x.b[1]);
    let a2b3 = x.a[1].conv(&x.b[2]);
    let m_a3 = x.a[2].mult_op_matrix(m + 1, m);
    let m_b3 = x.b[2].mult_op_matrix(m + 1, m);
    let m_a3sq = a3sq.mult_op_matrix(m + 1, m);
    let m_a2a3 = a2a3.mult_op_matrix(m + 1, m);
    let m_a3b3 = a3b3.mult_op_matrix(m + 1, m);
    let m_a3b2 = a3b2.mult_op_matrix(m + 1, m);
    let m_a2b3 = a2b3.mult_op_matrix(m + 1, m);

    for j in 0..3 {
        for s in 1..m {
            jac.add_to(row_g(j, s), col_b(j, s), T::from_f64(2.0 * s as f64));
        }
    }
    for nrow in 1..m {
        // g1: d1 = b2.
        if nrow + 1 < m {
            jac.add_to(row_g(0, nrow), col_b(1, nrow + 1), T::one());
        }
        jac.add_to(row_g(0, nrow), col_b(1, nrow - 1), -T::one());

        // g2: d2 = 2 lambda a3 b3.
        let tl = two * x.lambda;
        for s in 0..m {
            let da3 = m_a3.at(nrow + 1, s) - m_a3.at(nrow - 1, s);
            jac.add_to(row_g(1, nrow), col_b(2, s), tl * da3);
            let db3 = m_b3.at(nrow + 1, s) - m_b3.at(nrow - 1, s);
            jac.add_to(row_g(1, nrow), col_a(2, s), tl * db3);
        }
        jac.add_to(
            row_g(1, nrow),
            col_lambda,
            two * (a3b3.get(nrow + 1) - a3b3.get(nrow - 1)),
        );

        // g3: d3 = -a3^2 b2 - 2 a2 a3 b3.
        for s in 0..m {
            let d_b2 = m_a3sq.at(nrow + 1, s) - m_a3sq.at(nrow - 1, s);
            jac.add_to(row_g(2, nrow), col_b(1, s), -d_b2);
            let d_b3 = m_a2a3.at(nrow + 1, s) - m_a2a3.at(nrow - 1, s);
            jac.add_to(row_g(2, nrow), col_b(2, s), -(two * d_b3));
            let d_a2 = m_a3b3.at(nrow + 1, s) - m_a3b3.at(nrow - 1, s);
            jac.add_to(row_g(2, nrow), col_a(1, s), -(two * d_a2));
            let d_a3 = (m_a3b2.at(nrow + 1, s) - m_a3b2.at(nrow - 1, s))
                + (m_a2b3.at(nrow + 1, s) - m_a2b3.at(nrow - 1, s));
            jac.add_to(row_g(2, nrow), col_a(2, s), -(two * d_a3));
        }
    }
    jac
}

pub fn pack(x: &SaddlePoint<f64>, m: usize) -> DVector<f64> {
    let mut v = DVector::zeros(6 * m + 3);
    v[0] = x.lambda;
    v[1] = x.delta;
    for j in 0..3 {
        for s in 0..m {
            v[2 + j * m + s] = x.a[j].get(s);
        }
    }
    v[2 + 3 * m] = x.gamma;
    for j in 0..3 {
        for s in 0..m {
            v[3 + 3 * m + j * m + s] = x.b[j].get(s);
        }
    }
    v
}

pub fn unpack(v: &DVector<f64>, m: usize) -> SaddlePoint<f64> {
    let a = core::array::from_fn(|j| ChebSeq::new((0..m).map(|s| v[2 + j * m + s]).collect()));
    let b = core::array::from_fn(|j| ChebSeq::new((0..m).map(|s| v[3 + 3 * m + j * m + s]).collect()));
    SaddlePoint { lambda: v[0], delta: v[1], a, gamma: v[2 + 3 * m], b }
}

/// Newton on the square projected map (the voltage is an unknown here).
pub fn newton_solve(
    x0: &SaddlePoint<f64>,
    ell: &PhaseFunctional,
    m: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SaddlePoint<f64>> {
    let mut x = SaddlePoint {
        lambda: x0.lambda,
        delta: x0.delta,
        a: core::array::from_fn(|j| x0.a[j].truncated(m)),
        gamma: x0.gamma,
        b: core::array::from_fn(|j| x0.b[j].truncated(m)),
    };
    let mut res = residual(&x, ell);
    let mut rn = res.sup_norm();
    for _ in 0..max_iter {
        if rn <= tol {
            return Ok(x);
        }
        let jac = jacobian(&x, ell, m).to_dmatrix();
        let rhs = -DVector::from_vec(res.project(m));
        let step = jac.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
        let v = pack(&x, m) + step;
        x = unpack(&v, m);
        res = residual(&x, ell);
        rn = res.sup_norm();
    }
    if rn <= tol {
        Ok(x)
    } else {
        Err(Error::NewtonDiverged { residual: rn, iters: max_iter })
    }
}

/// Follow the steady branch from zero, refine the fold, and polish the
/// augmented system. The kernel seed is the fold tangent restricted to
/// `(delta, a)`; the phase functional is scaled to it.
pub fn find_saddle(m: usize, tol: f64) -> Result<(SaddlePoint<f64>, PhaseFunctional)> {
    find_saddle_scaled(m, tol, 1.0)
}

/// As [`find_saddle`], with the kernel normalized so its center value
/// `b_1(0)` equals `kernel_scale`. The scale trades the conditioning of the
/// kernel rows against the steady rows in the Z1 bound; 1 is the natural
/// value, smaller values shrink the kernel block.
pub fn find_saddle_scaled(
    m: usize,
    tol: f64,
    kernel_scale: f64,
) -> Result<(SaddlePoint<f64>, PhaseFunctional)> {
    let settings = Settings::default();
    let branch = steady::continue_from_zero(m, &settings, 600)?;
    let problem = steady::SteadyProblem { m };
    let fold = continuation::detect_fold(&problem, &branch, &settings)?
        .ok_or_else(|| Error::ProofFailure { reason: "steady branch has no fold".into() })?;

    let sp = steady::unpack(fold.param, &fold.unknowns, m);
    let t = &fold.tangent;
    // Kernel candidate: the tangent restricted to (delta, a), scaled so its
    // first component has value kernel_scale at y = 0.
    let raw_b1 = ChebSeq::new((0..m).map(|s| t[2 + s]).collect());
    let base = PhaseFunctional::value_at_zero(m);
    let s0 = base.apply(&raw_b1);
    if s0.abs() < 1e-12 {
        return Err(Error::SingularSystem);
    }
    let c = kernel_scale / s0;
    let gamma = c * t[1];
    let b: [ChebSeq<f64>; 3] = core::array::from_fn(|j| {
        ChebSeq::new((0..m).map(|s| c * t[2 + j * m + s]).collect())
    });
    let ell = base.scaled(1.0 / kernel_scale);
    let seed = SaddlePoint { lambda: sp.lambda, delta: sp.delta, a: sp.a, gamma, b };
    let x = newton_solve(&seed, &ell, m, tol, 40)?;
    Ok((x, ell))
}

/// Diagonal tail rule attached to a finite block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailRule {
    /// `2n` (approximate derivative).
    Deriv,
    /// `1 / (2n)` (approximate inverse).
    InverseDeriv,
}

impl TailRule {
    pub fn factor(self, n: usize) -> f64 {
        match self {
            TailRule::Deriv => 2.0 * n as f64,
            TailRule::InverseDeriv => 1.0 / (2.0 * n as f64),
        }
    }

    /// Enclosure of the exact tail factor (`1/(2n)` is not a float, so the
    /// interval lift must round outward; `2n` is exact).
    pub fn factor_interval(self, n: usize) -> Interval {
        match self {
            TailRule::Deriv => Interval::point(2.0 * n as f64),
            TailRule::InverseDeriv => Interval::ONE / Interval::point(2.0 * n as f64),
        }
    }
}

/// Finite interval block plus the diagonal tail acting on the six sequence
/// components beyond mode `m - 1`.
#[derive(Clone, Debug)]
pub struct BlockOp {
    pub m: usize,
    pub finite: Mat<Interval>,
    pub tail: TailRule,
}

/// Build the approximate derivative (interval Jacobian block, derivative
/// tail) and approximate inverse (interval lift of the floating inverse,
/// `1/(2n)` tail). Also returns the float defect `||I - A DF||_max` as a
/// cheap quality check.
pub fn build_operators(
    x_bar: &SaddlePoint<f64>,
    ell: &PhaseFunctional,
    m: usize,
) -> Result<(BlockOp, BlockOp, f64)> {
    let xi = x_bar.to_intervals();
    let a_dagger = BlockOp { m, finite: jacobian(&xi, ell, m), tail: TailRule::Deriv };

    let df = jacobian(x_bar, ell, m).to_dmatrix();
    let inv = df.clone().try_inverse().ok_or(Error::SingularSystem)?;
    let defect = (nalgebra::DMatrix::identity(6 * m + 3, 6 * m + 3) - &inv * &df).amax();
    let a = BlockOp { m, finite: Mat::from_dmatrix(&inv).to_intervals(), tail: TailRule::InverseDeriv };
    Ok((a_dagger, a, defect))
}

// Index layout of the nine component groups.
struct Groups {
    m: usize,
}

#[derive(Clone, Copy)]
struct Group {
    offset: usize,
    len: usize,
    seq: bool,
}

impl Groups {
    fn new(m: usize) -> Self {
        Self { m }
    }

    fn all(&self) -> [Group; 9] {
        let m = self.m;
        [
            Group { offset: 0, len: 1, seq: false },
            Group { offset: 1, len: 1, seq: false },
            Group { offset: 2, len: m, seq: true },
            Group { offset: 2 + m, len: m, seq: true },
            Group { offset: 2 + 2 * m, len: m, seq: true },
            Group { offset: 2 + 3 * m, len: 1, seq: false },
            Group { offset: 3 + 3 * m, len: m, seq: true },
            Group { offset: 3 + 4 * m, len: m, seq: true },
            Group { offset: 3 + 5 * m, len: m, seq: true },
        ]
    }
}

fn omegas(nu: Interval, count: usize) -> Vec<Interval> {
    let w = Weight::geometric(nu);
    (0..count).map(|n| w.omega(n)).collect()
}

/// Operator norm of a finite block on the product space: max over row
/// groups of the summed action of each column group (dual-weighted rows for
/// scalar outputs, weighted column sums for sequence outputs). `tail_diag`
/// is added to every sequence row group (the diagonal tails of the block
/// operators bring `sup_{n >= m} factor(n)`).
fn block_op_norm(abs_block: &Mat<Interval>, m: usize, nu: Interval, tail_diag: Option<Interval>) -> Interval {
    let groups = Groups::new(m).all();
    let om = omegas(nu, m);
    let mut best = Interval::ZERO;
    for row in groups.iter() {
        let mut total = Interval::ZERO;
        for col in groups.iter() {
            let part = if !row.seq {
                if !col.seq {
                    abs_block.at(row.offset, col.offset)
                } else {
                    // Dual norm of the row segment.
                    let mut sup = Interval::ZERO;
                    for s in 0..col.len {
                        sup = sup.max_with(abs_block.at(row.offset, col.offset + s) / om[s]);
                    }
                    sup
                }
            } else if !col.seq {
                // Weighted column norm.
                let mut sum = Interval::ZERO;
                for l in 0..row.len {
                    sum = sum + abs_block.at(row.offset + l, col.offset) * om[l];
                }
                sum
            } else {
                // Max over columns of weighted column sums.
                let mut sup = Interval::ZERO;
                for s in 0..col.len {
                    let mut sum = Interval::ZERO;
                    for l in 0..row.len {
                        sum = sum + abs_block.at(row.offset + l, col.offset + s) * om[l];
                    }
                    sup = sup.max_with(sum / om[s]);
                }
                sup
            };
            total = total + part;
        }
        if row.seq {
            if let Some(t) = tail_diag {
                total = total + t;
            }
        }
        best = best.max_with(total);
    }
    best
}

fn max_with(acc: Interval, v: Interval) -> Interval {
    Scalar::max_with(acc, v)
}

/// Defect bound `||A F(x_bar)|| <= Y0`. The residual has finite support, so
/// the finite block handles the first `m` modes and the `1/(2n)` tail the
/// exactly-known remainder.
pub fn bound_y0(xi: &SaddlePoint<Interval>, ell: &PhaseFunctional, a_op: &BlockOp, nu: f64) -> Interval {
    let m = a_op.m;
    let nui = Interval::point(nu);
    let res = residual(xi, ell);
    let finite = res.project(m);
    let w = a_op.finite.mul_vec(&finite);

    let seqs: [&ChebSeq<Interval>; 6] =
        [&res.f[0], &res.f[1], &res.f[2], &res.g[0], &res.g[1], &res.g[2]];
    let max_len = seqs.iter().map(|s| s.len()).max().unwrap_or(m);
    let om = omegas(nui, max_len.max(m));

    let groups = Groups::new(m).all();
    let mut y0 = Interval::ZERO;
    let mut seq_idx = 0;
    for g in groups.iter() {
        let val = if !g.seq {
            w[g.offset].abs()
        } else {
            let mut sum = Interval::ZERO;
            for n in 0..m {
                sum = sum + w[g.offset + n].abs() * om[n];
            }
            // Tail: A acts as 1/(2n) there and the residual support is exact.
            let r = seqs[seq_idx];
            for n in m..r.len() {
                let t = a_op.tail.factor_interval(n);
                sum = sum + r.get(n).abs() * om[n] * t;
            }
            seq_idx += 1;
            sum
        };
        y0 = max_with(y0, val);
    }
    y0
}

/// `||I - A A_dagger|| <= Z0`: the tails cancel exactly, so only the finite
/// block contributes.
pub fn bound_z0(a_op: &BlockOp, a_dagger: &BlockOp, nu: f64) -> Interval {
    let m = a_op.m;
    let n = 6 * m + 3;
    let b = Mat::<Interval>::identity(n).sub(&a_op.finite.mul_mat(&a_dagger.finite));
    block_op_norm(&b.abs(), m, Interval::point(nu), None)
}

fn psi_hat_vectors(
    x: &SaddlePoint<Interval>,
    m: usize,
    nu: Interval,
) -> ([Vec<Interval>; 6], [Interval; 6]) {
    let wt = Weight::geometric(nu);
    let a2a3 = x.a[1].conv(&x.a[2]);
    let a3sq = x.a[2].conv(&x.a[2]);
    let a3b3 = x.a[2].conv(&x.b[2]);
    let mix = x.a[2].conv(&x.b[1]).add(&x.a[1].conv(&x.b[2])); // a3 b2 + a2 b3
    let two = Interval::point(2.0);
    let abs_l = x.lambda.abs();

    let psi = |alpha: &ChebSeq<Interval>, n: usize| alpha.psi_bound(n, m, nu).expect("n < m");
    let full = |alpha: &ChebSeq<Interval>, n: usize| alpha.conv_functional_norm(n, nu);

    // Tail-mode entry bound for a unit-norm coefficient: |h_m| <= 1/omega_m.
    let unit_entry = Interval::ONE / wt.omega(m);

    let mut out: [Vec<Interval>; 6] = core::array::from_fn(|_| vec![Interval::ZERO; m + 1]);
    for n in 0..m {
        out[1][n] = two * abs_l * psi(&x.a[2], n);
        out[2][n] = two * psi(&a2a3, n) + psi(&a3sq, n);
        out[4][n] = two * abs_l * (psi(&x.a[2], n) + psi(&x.b[2], n));
        out[5][n] = two * psi(&a3b3, n)
            + two * psi(&mix, n)
            + psi(&a3sq, n)
            + two * psi(&a2a3, n);
    }
    // Index m sits in the full-ball regime: the convolution functional norm
    // plus the entries multiplying the scalar directions.
    out[0][m] = unit_entry;
    out[3][m] = unit_entry;
    out[1][m] = two * abs_l * full(&x.a[2], m) + a3sq.get(m).abs();
    out[2][m] = two * full(&a2a3, m) + full(&a3sq, m);
    out[4][m] = two * abs_l * (full(&x.a[2], m) + full(&x.b[2], m)) + two * a3b3.get(m).abs();
    out[5][m] = two * full(&a3b3, m) + two * full(&mix, m) + full(&a3sq, m) + two * full(&a2a3, m);

    let na3 = x.a[2].norm(&wt);
    let nb3 = x.b[2].norm(&wt);
    let psi_inf = [
        Interval::ONE,
        two * abs_l * na3 + a3sq.norm(&wt),
        two * a2a3.norm(&wt) + a3sq.norm(&wt),
        Interval::ONE,
        two * abs_l * (na3 + nb3) + two * a3b3.norm(&wt),
        two * a3b3.norm(&wt) + two * mix.norm(&wt) + a3sq.norm(&wt) + two * a2a3.norm(&wt),
    ];
    (out, psi_inf)
}

/// `||A (DF(x_bar) - A_dagger)|| <= Z1`. The difference only sees tail modes
/// of the input, bounded entrywise through the convolution-functional
/// estimates, then pushed through `|A|` with the weighted column sums; the
/// `n >= m` output rows contribute the `nu / m` scaled tail list.
pub fn bound_z1(xi: &SaddlePoint<Interval>, a_op: &BlockOp, nu: f64, m: usize) -> Interval {
    assert_eq!(a_op.m, m);
    let nui = Interval::point(nu);
    let (psi_hat, psi_inf) = psi_hat_vectors(xi, m, nui);

    // Boundary rows only see tail modes: |2 sum_{l >= m} (+-1)^l h_l| <=
    // nu^{-m} ||h||.
    let tail_sum = Interval::ONE / nui.powi(m as u32);
    let n = 6 * m + 3;
    let groups = Groups::new(m).all();
    let mut zhat = vec![Interval::ZERO; n];
    zhat[1] = tail_sum; // delta row
    zhat[2 + 3 * m] = tail_sum; // gamma row
    let seq_groups = [2usize, 3, 4, 6, 7, 8];
    for (si, &gi) in seq_groups.iter().enumerate() {
        let g = groups[gi];
        zhat[g.offset] = tail_sum;
        for row in 1..m {
            zhat[g.offset + row] = psi_hat[si][row - 1] + psi_hat[si][row + 1];
        }
    }

    let w = a_op.finite.abs().mul_vec(&zhat);
    let om = omegas(nui, m);
    let tail_scale = nui / Interval::point(m as f64); // (1/2m) * ||T|| with ||T|| <= 2 nu
    let mut z1 = Interval::ZERO;
    let mut si = 0;
    for (gi, g) in groups.iter().enumerate() {
        let val = if !g.seq {
            w[g.offset]
        } else {
            let mut sum = Interval::ZERO;
            for l in 0..m {
                sum = sum + w[g.offset + l] * om[l];
            }
            if std::env::var("MEMSWAVE_Z1_DEBUG").is_ok() {
                eprintln!(
                    "z1 group {gi}: finite {:.4} tail {:.4} (psi_inf {:.3})",
                    sum.hi,
                    (tail_scale * psi_inf[si]).hi,
                    psi_inf[si].hi
                );
            }
            sum = sum + tail_scale * psi_inf[si];
            si += 1;
            sum
        };
        z1 = max_with(z1, val);
    }
    z1
}

/// `||A (DF(x_bar + z) - DF(x_bar))|| <= Z2 r` for `||z|| <= r <= r_star`:
/// second-derivative norms of the quadratic and cubic terms, times the
/// tridiagonal coupling norm `2 nu` and the operator norm of `A`.
pub fn bound_z2(xi: &SaddlePoint<Interval>, a_op: &BlockOp, nu: f64, r_star: f64) -> Interval {
    let m = a_op.m;
    let nui = Interval::point(nu);
    let wt = Weight::geometric(nui);
    let na2 = xi.a[1].norm(&wt);
    let na3 = xi.a[2].norm(&wt);
    let nb2 = xi.b[1].norm(&wt);
    let nb3 = xi.b[2].norm(&wt);
    let abs_l = xi.lambda.abs();
    let r = Interval::point(r_star);
    let c = |v: f64| Interval::point(v);

    let z_a2 = c(4.0) * na3 + c(2.0) * abs_l + c(3.0) * r;
    let z_a3 = c(4.0) * na3 + c(2.0) * na2 + c(3.0) * r;
    let z_b2 = c(4.0) * nb3 + c(4.0) * na3 + c(4.0) * abs_l + c(6.0) * r;
    let z_b3 = c(4.0) * na2 + c(2.0) * nb2 + c(4.0) * nb3 + c(8.0) * na3 + c(9.0) * r;
    let zmax = max_with(max_with(z_a2, z_a3), max_with(z_b2, z_b3));

    let tail = a_op.tail.factor_interval(m);
    let norm_a = block_op_norm(&a_op.finite.abs(), m, nui, Some(tail));
    c(2.0) * nui * norm_a * zmax
}

/// The four bounds plus the verified radius.
#[derive(Clone, Debug)]
pub struct RadiiBounds {
    pub y0: Interval,
    pub z0: Interval,
    pub z1: Interval,
    pub z2: Interval,
    pub r0: Option<f64>,
}

impl RadiiBounds {
    /// Interval evaluation of `p(r) = Z2 r^2 + (Z1 + Z0 - 1) r + Y0`.
    pub fn poly(&self, r: f64) -> Interval {
        let r = Interval::point(r);
        self.z2 * r * r + (self.z1 + self.z0 - Interval::ONE) * r + self.y0
    }
}

/// Find the smallest conveniently verifiable radius: take the float lower
/// root of the quadratic, nudge outward, and confirm `p(r0) < 0` in interval
/// arithmetic together with `r0 <= r_star`.
pub fn radii_verify(bounds: &mut RadiiBounds, r_star: f64) -> Result<f64> {
    let y0 = bounds.y0.hi;
    let z0 = bounds.z0.hi;
    let z1 = bounds.z1.hi;
    let z2 = bounds.z2.hi;
    let s = 1.0 - z0 - z1;
    if s <= 0.0 {
        return Err(Error::ProofFailure {
            reason: format!("Z0 + Z1 = {:.6} >= 1 (contraction lost)", z0 + z1),
        });
    }
    let disc = s * s - 4.0 * z2 * y0;
    if disc <= 0.0 {
        return Err(Error::ProofFailure {
            reason: format!(
                "negative discriminant: Y0 = {y0:.3e} too large against (1 - Z0 - Z1)^2 / (4 Z2) = {:.3e}",
                s * s / (4.0 * z2).max(f64::MIN_POSITIVE)
            ),
        });
    }
    let base = if z2 > 0.0 { (s - disc.sqrt()) / (2.0 * z2) } else { y0 / s };
    for inflate in [1e-12, 1e-9, 1e-6, 1e-3, 1e-2, 1e-1, 0.5, 1.0, 5.0, 50.0] {
        let r = base * (1.0 + inflate);
        if !(r > 0.0) || r > r_star {
            continue;
        }
        if bounds.poly(r).hi < 0.0 {
            bounds.r0 = Some(r);
            return Ok(r);
        }
    }
    Err(Error::ProofFailure {
        reason: format!(
            "no verifiable radius at or above the float root {base:.3e} (r_star = {r_star:.1e})"
        ),
    })
}

/// Machine-checkable summary of a completed proof run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub m: usize,
    pub nu: f64,
    pub kernel_scale: f64,
    pub lambda_hat: f64,
    pub u_center_hat: f64,
    pub y0: [f64; 2],
    pub z0: [f64; 2],
    pub z1: [f64; 2],
    pub z2: [f64; 2],
    pub r0: f64,
    pub r_star: f64,
    /// Enclosure of the fold voltage.
    pub lambda_star: [f64; 2],
    /// Enclosure of the deflection at the center.
    pub u_center: [f64; 2],
    pub x_bar: CertificateVec,
    pub phase_weights: Vec<f64>,
    pub notes: CertificateNotes,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateVec {
    pub lambda: f64,
    pub delta: f64,
    pub gamma: f64,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateNotes {
    pub phase: String,
    pub operator_norm: String,
    pub injectivity: String,
}

#[derive(Clone, Debug)]
pub struct Validation {
    pub x_bar: SaddlePoint<f64>,
    pub phase: PhaseFunctional,
    pub bounds: RadiiBounds,
    pub certificate: Certificate,
    /// Float defect of the approximate inverse, `||I - A DF||_max`.
    pub inverse_defect: f64,
    pub kernel_scale: f64,
}

/// Kernel center values tried in order; the Z1 balance between the steady
/// rows and the kernel rows shifts with this scale, and the first scale
/// whose radii polynomial verifies wins.
pub const KERNEL_SCALES: [f64; 7] = [0.25, 0.2, 0.35, 0.15, 0.5, 0.7, 1.0];

/// Full pipeline: continue the steady branch, refine the fold, polish the
/// augmented zero, compute the four interval bounds and verify a radius.
/// Deterministically walks [`KERNEL_SCALES`].
pub fn validate_saddle_node(m: usize, nu: f64, tol: f64, r_star: f64) -> Result<Validation> {
    let mut last = None;
    for &kappa in KERNEL_SCALES.iter() {
        match validate_with_scale(m, nu, tol, r_star, kappa) {
            Ok(v) => return Ok(v),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::ProofFailure { reason: "no kernel scale attempted".into() }))
}

/// One pipeline pass at a fixed kernel scale.
pub fn validate_with_scale(
    m: usize,
    nu: f64,
    tol: f64,
    r_star: f64,
    kernel_scale: f64,
) -> Result<Validation> {
    let (x_bar, ell) = find_saddle_scaled(m, tol, kernel_scale)?;
    let (a_dagger, a_op, inverse_defect) = build_operators(&x_bar, &ell, m)?;
    let xi = x_bar.to_intervals();
    let mut bounds = RadiiBounds {
        y0: bound_y0(&xi, &ell, &a_op, nu),
        z0: bound_z0(&a_op, &a_dagger, nu),
        z1: bound_z1(&xi, &a_op, nu, m),
        z2: bound_z2(&xi, &a_op, nu, r_star),
        r0: None,
    };
    let r0 = radii_verify(&mut bounds, r_star)?;

    let lam = Interval::point(x_bar.lambda).widen(r0);
    let uc = xi.a[0].eval(Interval::ZERO)?.widen(r0);
    let certificate = Certificate {
        m,
        nu,
        kernel_scale,
        lambda_hat: x_bar.lambda,
        u_center_hat: x_bar.a[0].eval(0.0)?,
        y0: [bounds.y0.lo, bounds.y0.hi],
        z0: [bounds.z0.lo, bounds.z0.hi],
        z1: [bounds.z1.lo, bounds.z1.hi],
        z2: [bounds.z2.lo, bounds.z2.hi],
        r0,
        r_star,
        lambda_star: [lam.lo, lam.hi],
        u_center: [uc.lo, uc.hi],
        x_bar: CertificateVec {
            lambda: x_bar.lambda,
            delta: x_bar.delta,
            gamma: x_bar.gamma,
            a: x_bar.a.iter().map(|s| s.coeffs().to_vec()).collect(),
            b: x_bar.b.iter().map(|s| s.coeffs().to_vec()).collect(),
        },
        phase_weights: ell.weights.clone(),
        notes: CertificateNotes {
            phase: format!(
                "value of the b1 series at y = 0 truncated to m modes, scaled so the kernel \
                 has center value {kernel_scale} and phase 1; finite support keeps the row \
                 inside the finite Jacobian block"
            ),
            operator_norm: "||A|| bounded by the max over the nine row groups of omega-weighted \
                            column sums of |A^(m)|, plus 1/(2m) for the diagonal sequence tails"
                .into(),
            injectivity: "A is injective whenever Z0 + Z1 < 1: A A_dagger = I - B with \
                          ||B|| <= Z0 < 1 is invertible, so A is surjective onto the range \
                          needed, and ||I - A DF|| <= Z0 + Z1 < 1 makes A DF invertible, \
                          hence A injective on the relevant subspace (Neumann series)"
                .into(),
        },
    };
    Ok(Validation { x_bar, phase: ell, bounds, certificate, inverse_defect, kernel_scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_rules_cancel() {
        for n in 65..200 {
            let prod = TailRule::Deriv.factor(n) * TailRule::InverseDeriv.factor(n);
            assert!((prod - 1.0).abs() < 1e-15);
            // The interval lifts bracket the exact cancellation.
            let prod_i =
                TailRule::Deriv.factor_interval(n) * TailRule::InverseDeriv.factor_interval(n);
            assert!(prod_i.contains(1.0));
        }
    }

    #[test]
    fn phase_row_is_minus_one_for_zero_kernel() {
        let m = 6;
        let ell = PhaseFunctional::value_at_zero(m);
        let x = SaddlePoint {
            lambda: 0.2,
            delta: -0.1,
            a: [ChebSeq::zeros(m), ChebSeq::zeros(m), ChebSeq::basis(0).truncated(m)],
            gamma: 0.0,
            b: [ChebSeq::zeros(m), ChebSeq::zeros(m), ChebSeq::zeros(m)],
        };
        let r = residual(&x, &ell);
        assert_eq!(r.phase, -1.0);
    }

    #[test]
    fn directional_rows_match_steady_difference_quotient() {
        let m = 8;
        let a: [ChebSeq<f64>; 3] = [
            ChebSeq::new((0..m).map(|n| -0.2 / (1.0 + n as f64).powi(2)).collect()),
            ChebSeq::new((0..m).map(|n| 0.15 / (1.0 + n as f64).powi(2)).collect()),
            ChebSeq::new((0..m).map(|n| if n == 0 { 1.2 } else { 0.3 / (n as f64).powi(2) }).collect()),
        ];
        let b: [ChebSeq<f64>; 3] = [
            ChebSeq::new((0..m).map(|n| 0.7 / (1.0 + n as f64)).collect()),
            ChebSeq::new((0..m).map(|n| -0.4 / (1.0 + n as f64)).collect()),
            ChebSeq::new((0..m).map(|n| 0.9 / (1.0 + n as f64)).collect()),
        ];
        let x = SaddlePoint { lambda: 0.27, delta: -0.33, a: a.clone(), gamma: 0.8, b: b.clone() };
        let ell = PhaseFunctional::value_at_zero(m);
        let r = residual(&x, &ell);

        let h = 1e-7;
        let shifted = |sign: f64| SteadyPoint {
            lambda: x.lambda,
            delta: x.delta + sign * h * x.gamma,
            a: core::array::from_fn(|j| x.a[j].add(&x.b[j].scale(sign * h))),
        };
        let rp = steady::residual(&shifted(1.0));
        let rm = steady::residual(&shifted(-1.0));
        let eta_fd = (rp.eta - rm.eta) / (2.0 * h);
        assert!((r.eta_b - eta_fd).abs() < 1e-6);
        for j in 0..3 {
            let len = r.g[j].len().max(rp.rows[j].len());
            for n in 0..len {
                let fd = (rp.rows[j].get(n) - rm.rows[j].get(n)) / (2.0 * h);
                assert!(
                    (r.g[j].get(n) - fd).abs() < 1e-6 * (1.0 + fd.abs()),
                    "component {j} row {n}: {} vs {}",
                    r.g[j].get(n),
                    fd
                );
            }
        }
    }

    #[test]
    fn radii_verify_quadratic_oracle() {
        // p(r) = r^2 - 0.4 r + 1e-3: lower root near 2.5158e-3.
        let mut b = RadiiBounds {
            y0: Interval::point(1e-3),
            z0: Interval::point(0.3),
            z1: Interval::point(0.3),
            z2: Interval::point(1.0),
            r0: None,
        };
        let r0 = radii_verify(&mut b, 1.0).unwrap();
        assert!(r0 > 0.00251 && r0 < 0.0026, "r0 = {r0}");
        assert!(b.poly(0.0026).hi < 0.0);
    }

    #[test]
    fn radii_verify_negative_discriminant_fails() {
        // 0.2025 - 0.4 < 0.
        let mut b = RadiiBounds {
            y0: Interval::point(0.1),
            z0: Interval::point(0.25),
            z1: Interval::point(0.3),
            z2: Interval::point(1.0),
            r0: None,
        };
        assert!(radii_verify(&mut b, 1.0).is_err());
    }

    #[test]
    fn radii_window_shrinks_under_inflation() {
        let base = RadiiBounds {
            y0: Interval::point(1e-3),
            z0: Interval::point(0.3),
            z1: Interval::point(0.3),
            z2: Interval::point(1.0),
            r0: None,
        };
        let mut b = base.clone();
        let r_small = radii_verify(&mut b, 1.0).unwrap();
        let mut inflated = base.clone();
        inflated.y0 = Interval::point(5e-3);
        let r_big = radii_verify(&mut inflated, 1.0).unwrap();
        assert!(r_big > r_small);
        let mut broken = base;
        broken.z0 = Interval::point(0.9);
        assert!(radii_verify(&mut broken, 1.0).is_err());
    }
}
