//! Cross-checks against independent solution paths: a finite-difference
//! boundary-value solver, an SVD kernel probe, and widened-rounding probes
//! of the interval bounds.

use memswave::interval::Interval;
use memswave::matrix::Mat;
use memswave::seqspace::{ChebSeq, Weight};
use memswave::steady;
use memswave::validate::{self, BlockOp, TailRule};

/// Second-order finite-difference solve of `U'' = lambda / (1+U)^2`,
/// `U(+-1) = 0`, with a tridiagonal Newton iteration. Fully independent of
/// the coefficient-space path.
fn fd_bvp_solve(lambda: f64, n: usize) -> Vec<f64> {
    let h = 2.0 / n as f64;
    let mut u = vec![0.0f64; n + 1];
    for _ in 0..60 {
        // Residual and tridiagonal Jacobian on interior nodes.
        let mut rhs = vec![0.0; n - 1];
        let mut diag = vec![0.0; n - 1];
        let mut off = vec![0.0; n - 1]; // sub- and super-diagonal are equal
        let mut rmax = 0.0f64;
        for i in 1..n {
            let f = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) - lambda / (1.0 + u[i]).powi(2);
            rhs[i - 1] = -f;
            diag[i - 1] = -2.0 / (h * h) + 2.0 * lambda / (1.0 + u[i]).powi(3);
            off[i - 1] = 1.0 / (h * h);
            rmax = rmax.max(f.abs());
        }
        if rmax < 1e-13 {
            break;
        }
        // Thomas algorithm.
        let mut c = vec![0.0; n - 1];
        let mut d = vec![0.0; n - 1];
        c[0] = off[0] / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..(n - 1) {
            let w = diag[i] - off[i] * c[i - 1];
            c[i] = off[i] / w;
            d[i] = (rhs[i] - off[i] * d[i - 1]) / w;
        }
        let mut step = vec![0.0; n - 1];
        step[n - 2] = d[n - 2];
        for i in (0..(n - 2)).rev() {
            step[i] = d[i] - c[i] * step[i + 1];
        }
        for i in 1..n {
            u[i] += step[i - 1];
        }
    }
    u
}

#[test]
fn steady_matches_finite_difference_oracle() {
    let lambda = 0.01;
    let n = 10_000;
    let fd = fd_bvp_solve(lambda, n);

    let m = 24;
    let mut p0 = steady::zero_state(m);
    p0.lambda = lambda;
    let p = steady::newton_solve(&p0, m, 1e-12, 30).unwrap();

    // Center value: perturbative estimate and the grid oracle.
    let u0 = p.eval_u(0.0).unwrap();
    assert!((u0 + lambda / 2.0).abs() < 1e-4);
    assert!((u0 - fd[n / 2]).abs() < 1e-7, "spectral {u0} vs grid {}", fd[n / 2]);

    // A few off-center nodes too.
    for &frac in &[0.25, 0.4, 0.75] {
        let i = (frac * n as f64) as usize;
        let y = -1.0 + 2.0 * i as f64 / n as f64;
        let diff = (p.eval_u(y).unwrap() - fd[i]).abs();
        assert!(diff < 1e-7, "y = {y}: diff {diff:.2e}");
    }
}

#[test]
fn fold_jacobian_has_numerical_kernel() {
    let m = 65;
    let (x, _) = validate::find_saddle(m, 1e-12).unwrap();
    let sp = x.steady_part();
    let full = steady::jacobian(&sp, m).to_dmatrix();
    // Square block in (delta, a): drop the lambda column.
    let block = full.columns(1, 3 * m + 1).into_owned();
    let scale = block.amax();
    let svd = block.svd(false, false);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        smin <= 1e-8 * scale,
        "smallest singular value {smin:.3e} (scale {scale:.3e}) is not a kernel"
    );
}

#[test]
fn defect_bound_is_stable_under_widened_rounding() {
    let m = 65;
    let nu = 1.05;
    let (x, ell) = validate::find_saddle(m, 1e-12).unwrap();
    let (_, a_op, _) = validate::build_operators(&x, &ell, m).unwrap();

    let base = validate::bound_y0(&x.to_intervals(), &ell, &a_op, nu);
    // Pre-widened inputs must still enclose the same defect, so the result
    // intervals overlap; widening can only grow the enclosure.
    for &w in &[1e-16, 1e-14, 3e-13] {
        let loose = validate::bound_y0(&x.to_intervals_widened(w), &ell, &a_op, nu);
        assert!(loose.hi >= base.lo, "widened bound lost the base enclosure");
        assert!(loose.hi >= base.hi - 1e-30);
    }

    // Plain float evaluation of ||A F(x_bar)|| lies inside the enclosure.
    let res = validate::residual(&x, &ell);
    let finite: Vec<f64> = res.project(m);
    let a_mid: Mat<f64> = a_op.finite.map(|v| v.mid());
    let w = a_mid.mul_vec(&finite);
    let wt = Weight::geometric(nu);
    let omega: Vec<f64> = (0..(6 * m)).map(|n| wt.omega(n)).collect();
    let seqs: [&ChebSeq<f64>; 6] = [&res.f[0], &res.f[1], &res.f[2], &res.g[0], &res.g[1], &res.g[2]];
    let offsets = [2, 2 + m, 2 + 2 * m, 3 + 3 * m, 3 + 4 * m, 3 + 5 * m];
    let mut y0_float = w[0].abs().max(w[1].abs()).max(w[2 + 3 * m].abs());
    for (si, &off) in offsets.iter().enumerate() {
        let mut sum = 0.0;
        for n in 0..m {
            sum += w[off + n].abs() * omega[n];
        }
        for n in m..seqs[si].len() {
            sum += seqs[si].get(n).abs() * omega[n] / (2.0 * n as f64);
        }
        y0_float = y0_float.max(sum);
    }
    assert!(
        base.lo - 1e-25 <= y0_float && y0_float <= base.hi + 1e-25,
        "float defect {y0_float:.6e} outside [{:.6e}, {:.6e}]",
        base.lo,
        base.hi
    );
}

#[test]
fn z0_reacts_to_inverse_perturbation() {
    // Damaging one entry of the approximate inverse must show up in Z0 at a
    // comparable size.
    let m = 33;
    let nu = 1.05;
    // The full-residual stopping floor sits near 1e-9 at this truncation.
    let (x, ell) = validate::find_saddle(m, 1e-8).unwrap();
    let (adag, a_op, _) = validate::build_operators(&x, &ell, m).unwrap();
    let clean = validate::bound_z0(&a_op, &adag, nu);
    let mut damaged = a_op.clone();
    let v = damaged.finite.at(2, 2);
    damaged.finite.set(2, 2, v + Interval::point(1e-3));
    let dirty = validate::bound_z0(&damaged, &adag, nu);
    assert!(dirty.hi > clean.hi + 1e-4, "Z0 {} -> {}", clean.hi, dirty.hi);
    assert!(dirty.hi < clean.hi + 1.0);
}

#[test]
fn z1_shrinks_with_finer_truncation() {
    // The boundary tail sums scale like nu^-m and the tail list like 1/m.
    let nu = 1.05;
    let mut values = vec![];
    for m in [33usize, 65] {
        let tol = if m < 50 { 1e-8 } else { 1e-12 };
        let (x, ell) = validate::find_saddle_scaled(m, tol, 0.25).unwrap();
        let (_, a_op, _) = validate::build_operators(&x, &ell, m).unwrap();
        values.push(validate::bound_z1(&x.to_intervals(), &a_op, nu, m).hi);
    }
    assert!(values[1] < values[0], "Z1(65) = {} not below Z1(33) = {}", values[1], values[0]);
}

#[test]
fn z1_bound_at_zero_point_with_identity_inverse() {
    // With x_bar = 0 and |A| = I the only surviving rows are the boundary
    // tail sums nu^-m, the mode-m spill of the first components (weight
    // 1/nu after the omega factor) and the unit tail list, all computable
    // by hand.
    let m = 20;
    let nu = 1.05;
    let zero = validate::SaddlePoint {
        lambda: 0.0,
        delta: 0.0,
        a: [ChebSeq::zeros(m), ChebSeq::zeros(m), ChebSeq::zeros(m)],
        gamma: 0.0,
        b: [ChebSeq::zeros(m), ChebSeq::zeros(m), ChebSeq::zeros(m)],
    };
    let a_op = BlockOp { m, finite: Mat::<Interval>::identity(6 * m + 3), tail: TailRule::InverseDeriv };
    let z1 = validate::bound_z1(&zero.to_intervals(), &a_op, nu, m);
    let expect = nu.powi(-(m as i32)) + 1.0 / nu + nu / m as f64;
    assert!((z1.hi - expect).abs() < 1e-16 * expect.abs().max(1.0) + 1e-12, "Z1 = {} vs {expect}", z1.hi);
}

#[test]
fn steady_fold_location() {
    let m = 65;
    let settings = memswave::continuation::Settings::default();
    let branch = steady::continue_from_zero(m, &settings, 600).unwrap();
    let problem = steady::SteadyProblem { m };
    let fold = memswave::continuation::detect_fold(&problem, &branch, &settings)
        .unwrap()
        .expect("fold on the steady branch");
    assert!(
        (fold.param - 0.350004119342744).abs() <= 1e-6,
        "fold refined to {}",
        fold.param
    );
}

#[test]
fn first_eigenvalue_collapses_at_the_fold() {
    // mu_1 vanishes like sqrt(lambda* - lambda): the ratio over a factor-4
    // distance change is close to 1/2, and the value near the fold is small.
    let m = 65;
    let lambda_star = 0.350004119342744;
    let mu_near = memswave::eigen::mu_of_lambda(1, 0.3499, m, 1e-12).unwrap();
    let mu_far = memswave::eigen::mu_of_lambda(1, lambda_star - 4.0 * (lambda_star - 0.3499), m, 1e-12).unwrap();
    assert!(mu_near < 0.1, "mu_1(0.3499) = {mu_near}");
    let ratio = mu_near / mu_far;
    assert!((0.4..0.6).contains(&ratio), "sqrt scaling broken: ratio {ratio}");
}

#[test]
fn even_mode_branch_has_half_period_symmetry() {
    // A k = 2 branch (q = 47) satisfies U(t, y) = U(t + pi, -y).
    use memswave::continuation::Settings;
    use memswave::periodic;

    // Symmetry-breaking roundoff gets amplified deep into a branch, so the
    // pointwise check lives near the bifurcation where the orbit is clean.
    let eig = memswave::eigen::continue_branch(2, 48, 0.005, 0.32, 1e-12).unwrap();
    let (m, kk) = (24, 6);
    let run = periodic::BranchRun {
        k: 2,
        p: 88,
        q: 47,
        b: 1e-3,
        m,
        kk,
        max_steps: 12,
        lambda_window: (0.02, 0.36),
    };
    let mut settings = Settings::default();
    settings.exact_jacobian = false;
    let branch = periodic::run_branch(&run, &eig, &settings, 1e-12).unwrap();
    assert!(branch.points.len() >= 10);
    let pt = branch.points.last().unwrap();
    let omega = core::f64::consts::PI * 88.0 / 94.0;
    let pp = periodic::unpack(pt.param, omega, &pt.unknowns, m, kk);
    let pi = core::f64::consts::PI;
    let mut asym = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..=8 {
        let y = -1.0 + i as f64 / 4.0;
        for j in 0..8 {
            let t = 2.0 * pi * j as f64 / 8.0;
            let u = pp.eval_u(y, t).unwrap();
            asym = asym.max((u - pp.eval_u(-y, t + pi).unwrap()).abs());
            scale = scale.max(u.abs());
        }
    }
    assert!(asym <= 1e-8 * (1.0 + scale), "half-period symmetry broken: {asym:.2e}");
}

#[test]
fn duality_pairing_bound() {
    // |sum c_n a_n| <= dual_norm(c) * norm(a) on deterministic samples.
    let w = Weight::geometric(1.05);
    let mut state = 12345u64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    for _ in 0..200 {
        let a = ChebSeq::new((0..17).map(|_| next()).collect());
        let c = ChebSeq::new((0..23).map(|_| next()).collect());
        let pair: f64 = (0..23).map(|n| c.get(n) * a.get(n)).sum();
        assert!(pair.abs() <= c.dual_norm(&w) * a.norm(&w) * (1.0 + 1e-12));
    }
}
