//! Chebyshev coefficient sequences with geometrically weighted norms.
//!
//! A sequence `a = (a_0, a_1, ...)` represents the function
//! `u(y) = a_0 + 2 sum_{n>=1} a_n T_n(y)` on `[-1, 1]`; the factor-2
//! convention makes the space a Banach algebra under the symmetric-extension
//! discrete convolution, with `||a * b|| <= ||a|| ||b||` for the weighted
//! norm `||a|| = sum_n |a_n| omega_n`, `omega_0 = 1`, `omega_n = 2 nu^n`.
//!
//! Storage is a dense finite array with an implicit zero tail. All
//! operations compute exact support lengths, so no truncation error is
//! introduced silently; instantiated with [`Interval`] scalars they produce
//! rigorous enclosures.

use crate::error::Error;
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::Result;

/// One-sided Chebyshev coefficient sequence (entries beyond the stored
/// support are zero; negative indices are read by symmetry `a_{-n} = a_n`).
#[derive(Clone, Debug, PartialEq)]
pub struct ChebSeq<T> {
    coeffs: Vec<T>,
}

/// Weight mode for the geometric norms: plain `omega_n = 2 nu^n`, or the
/// weaker `2 nu^n / n` picked up by the diagonal derivative operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    Geometric,
    GeometricOverN,
}

/// Geometric weight `nu >= 1` together with its mode.
#[derive(Clone, Copy, Debug)]
pub struct Weight<T> {
    nu: T,
    mode: WeightMode,
}

impl<T: Scalar> Weight<T> {
    pub fn geometric(nu: T) -> Self {
        assert!(nu.mid() >= 1.0, "weight rate must be >= 1");
        Self { nu, mode: WeightMode::Geometric }
    }

    pub fn geometric_over_n(nu: T) -> Self {
        assert!(nu.mid() >= 1.0, "weight rate must be >= 1");
        Self { nu, mode: WeightMode::GeometricOverN }
    }

    pub fn nu(&self) -> T {
        self.nu
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    /// `omega_n`.
    pub fn omega(&self, n: usize) -> T {
        if n == 0 {
            return T::one();
        }
        let two = T::from_f64(2.0);
        let p = pow(self.nu, n);
        match self.mode {
            WeightMode::Geometric => two * p,
            WeightMode::GeometricOverN => (two * p).div(T::from_f64(n as f64)),
        }
    }
}

fn pow<T: Scalar>(base: T, n: usize) -> T {
    let mut acc = T::one();
    for _ in 0..n {
        acc = acc * base;
    }
    acc
}

impl<T: Scalar> ChebSeq<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(len: usize) -> Self {
        Self { coeffs: vec![T::zero(); len] }
    }

    /// Basis sequence `e_n`.
    pub fn basis(n: usize) -> Self {
        let mut c = vec![T::zero(); n + 1];
        c[n] = T::one();
        Self { coeffs: c }
    }

    pub fn constant(v: T) -> Self {
        Self { coeffs: vec![v] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Entry with the implicit zero tail.
    pub fn get(&self, n: usize) -> T {
        self.coeffs.get(n).copied().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, n: usize, v: T) {
        if n >= self.coeffs.len() {
            self.coeffs.resize(n + 1, T::zero());
        }
        self.coeffs[n] = v;
    }

    /// Keep the first `m` entries (zero-padding if shorter).
    pub fn truncated(&self, m: usize) -> Self {
        let mut c = vec![T::zero(); m];
        for (n, slot) in c.iter_mut().enumerate() {
            *slot = self.get(n);
        }
        Self { coeffs: c }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        let mut c = Vec::with_capacity(len);
        for n in 0..len {
            c.push(self.get(n) + other.get(n));
        }
        Self { coeffs: c }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        let mut c = Vec::with_capacity(len);
        for n in 0..len {
            c.push(self.get(n) - other.get(n));
        }
        Self { coeffs: c }
    }

    /// Weighted norm `sum_n |a_n| omega_n`. For interval scalars the result
    /// is an enclosure of the norm; its upper endpoint is a rigorous bound.
    pub fn norm(&self, w: &Weight<T>) -> T {
        let mut acc = T::zero();
        let two = T::from_f64(2.0);
        let mut p = T::one();
        for (n, &c) in self.coeffs.iter().enumerate() {
            if n == 0 {
                acc = acc + c.abs_bound();
            } else {
                p = p * w.nu();
                let omega = match w.mode() {
                    WeightMode::Geometric => two * p,
                    WeightMode::GeometricOverN => (two * p).div(T::from_f64(n as f64)),
                };
                acc = acc + c.abs_bound() * omega;
            }
        }
        acc
    }

    /// Dual norm `sup_n |c_n| / omega_n` (a max over the finite support).
    pub fn dual_norm(&self, w: &Weight<T>) -> T {
        let mut acc = T::zero();
        for (n, &c) in self.coeffs.iter().enumerate() {
            acc = acc.max_with(c.abs_bound().div(w.omega(n)));
        }
        acc
    }

    /// Symmetric-extension discrete convolution
    /// `c_n = sum_{n1 + n2 = n, n_i in Z} a_{|n1|} b_{|n2|}`,
    /// support `len(a) + len(b) - 1`. Exact under interval scalars.
    pub fn conv(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::zeros(0);
        }
        let la = self.len() as isize;
        let lb = other.len() as isize;
        let out = (la + lb - 1) as usize;
        let mut c = vec![T::zero(); out];
        for (n, slot) in c.iter_mut().enumerate() {
            let n = n as isize;
            let mut acc = T::zero();
            for i in (1 - la)..la {
                let j = n - i;
                if j > -lb && j < lb {
                    acc = acc + self.coeffs[i.unsigned_abs()] * other.coeffs[j.unsigned_abs()];
                }
            }
            *slot = acc;
        }
        Self { coeffs: c }
    }

    /// Tridiagonal coupling operator: row 0 is zero, row `n >= 1` is
    /// `c_{n+1} - c_{n-1}`. The support grows by one.
    pub fn t_op(&self) -> Self {
        if self.is_empty() {
            return Self::zeros(0);
        }
        let len = self.len() + 1;
        let mut out = vec![T::zero(); len];
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = self.get(n + 1) - self.get(n - 1);
        }
        Self { coeffs: out }
    }

    /// Diagonal derivative operator: entrywise `2 n a_n` (entry 0 vanishes).
    pub fn lambda_op(&self) -> Self {
        let mut out = self.coeffs.clone();
        for (n, c) in out.iter_mut().enumerate() {
            *c = *c * T::from_f64(2.0 * n as f64);
        }
        Self { coeffs: out }
    }

    /// Series value at `y` via the Clenshaw recurrence.
    pub fn eval(&self, y: T) -> Result<T> {
        if y.mag() > 1.0 {
            return Err(Error::OutOfDomain(y.mid()));
        }
        Ok(self.eval_unchecked(y))
    }

    fn eval_unchecked(&self, y: T) -> T {
        let n = self.len();
        if n == 0 {
            return T::zero();
        }
        let two_y = T::from_f64(2.0) * y;
        let mut b1 = T::zero();
        let mut b2 = T::zero();
        for k in (1..n).rev() {
            let ck = T::from_f64(2.0) * self.coeffs[k];
            let b = ck + two_y * b1 - b2;
            b2 = b1;
            b1 = b;
        }
        self.coeffs[0] + y * b1 - b2
    }

    /// Series value at `y = +1`: `a_0 + 2 sum_{n>=1} a_n`.
    pub fn value_at_one(&self) -> T {
        let mut acc = T::zero();
        for (n, &c) in self.coeffs.iter().enumerate().rev() {
            if n == 0 {
                acc = acc + c;
            } else {
                acc = acc + T::from_f64(2.0) * c;
            }
        }
        acc
    }

    /// Series value at `y = -1`: the alternating sum `a_0 + 2 sum (-1)^n a_n`.
    pub fn value_at_minus_one(&self) -> T {
        let mut acc = T::zero();
        for (n, &c) in self.coeffs.iter().enumerate().rev() {
            if n == 0 {
                acc = acc + c;
            } else if n % 2 == 0 {
                acc = acc + T::from_f64(2.0) * c;
            } else {
                acc = acc - T::from_f64(2.0) * c;
            }
        }
        acc
    }

    /// Series derivative at `y = 0`: `2 sum_{n odd} n (-1)^((n-1)/2) a_n`
    /// from `T_n'(0) = n sin(n pi / 2)`.
    pub fn deriv_at_zero(&self) -> T {
        let mut acc = T::zero();
        for (n, &c) in self.coeffs.iter().enumerate() {
            if n % 2 == 1 {
                let sign = if (n - 1) / 2 % 2 == 0 { 1.0 } else { -1.0 };
                acc = acc + c * T::from_f64(2.0 * sign * n as f64);
            }
        }
        acc
    }

    /// Bound on `|(alpha * h)_k|` over the tail `h` with `h_n = 0` for
    /// `n < m` and `||h|| <= 1`:
    ///
    /// `Psi_k(alpha) = max_j |alpha_{k-j} + alpha_{k+j}| / (2 nu^j)`,
    ///
    /// with the max over `j = m ..= max(k + m - 1, deg(alpha) + k)`; terms
    /// beyond the support vanish, so the upper limit covers every nonzero
    /// term. Empty range (k = 0 with support below m) gives 0.
    pub fn psi_bound(&self, k: usize, m: usize, nu: T) -> Result<T> {
        if k >= m {
            return Err(Error::ModeIndex { k, m });
        }
        let deg = self.len().saturating_sub(1);
        let j_hi = (k + m - 1).max(deg + k);
        let mut acc = T::zero();
        let two = T::from_f64(2.0);
        let mut p = pow(nu, m);
        for j in m..=j_hi {
            if j > m {
                p = p * nu;
            }
            let amj = self.get(j - k); // alpha_{k-j} = alpha_{j-k} by symmetry (j >= m > k)
            let apj = self.get(k + j);
            let term = (amj + apj).abs_bound().div(two * p);
            acc = acc.max_with(term);
        }
        Ok(acc)
    }

    /// Operator norm bound for the functional `h -> (alpha * h)_k` over the
    /// whole unit ball: `sup_j |alpha_{k-j}| / nu^{|j|} = max_i |alpha_i| /
    /// nu^{|k-i|}` over the finite support.
    pub fn conv_functional_norm(&self, k: usize, nu: T) -> T {
        let mut acc = T::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            let e = k.abs_diff(i);
            acc = acc.max_with(c.abs_bound().div(pow(nu, e)));
        }
        acc
    }

    /// Matrix of the multiplication operator `h -> c * h` acting on
    /// one-sided sequences: `K[n][j] = c_{|n-j|} + c_{n+j}` for `j >= 1`,
    /// `K[n][0] = c_n`.
    pub fn mult_op_matrix(&self, rows: usize, cols: usize) -> Mat<T> {
        let mut k = Mat::zeros(rows, cols);
        for n in 0..rows {
            for j in 0..cols {
                let v = if j == 0 {
                    self.get(n)
                } else {
                    self.get(n.abs_diff(j)) + self.get(n + j)
                };
                k.set(n, j, v);
            }
        }
        k
    }
}

impl ChebSeq<f64> {
    /// Lift to degenerate intervals (float entries are exact).
    pub fn to_intervals(&self) -> ChebSeq<crate::interval::Interval> {
        ChebSeq::new(self.coeffs.iter().map(|&c| crate::interval::Interval::point(c)).collect())
    }

    pub fn sup_entry(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}
