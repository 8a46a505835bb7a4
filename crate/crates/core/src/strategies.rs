//! Explicit finite-dimensional strategies: PVM/POVM families of complex
//! Hermitian matrices, the densities they induce through the normalized
//! trace, and the first-order / exchange / POVM optimality checkers.
//!
//! Complex matrices live here only; the real SDP layers never see them.
//! Hermitian eigenvalue bounds go through the real embedding
//! `[[Re X, -Im X], [Im X, Re X]]`, whose spectrum doubles the complex one.

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{GameInstance, Graph};
use crate::linalg::{eig_sym, SymMatrix};
use crate::scalar::Scalar;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<S> {
    dim: usize,
    data: Vec<Complex<S>>,
}

impl<S: Scalar> CMat<S> {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![Complex::new(S::zero(), S::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(S::one(), S::zero()));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<S>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMat { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<S> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<S>) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &CMat<S>) -> CMat<S> {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat<S>) -> CMat<S> {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: S) -> CMat<S> {
        let c = Complex::new(c, S::zero());
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn scale_complex(&self, c: Complex<S>) -> CMat<S> {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn mul(&self, other: &CMat<S>) -> CMat<S> {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.re == S::zero() && aik.im == S::zero() {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat<S> {
        CMat::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn herm_part(&self) -> CMat<S> {
        let half = Complex::new(S::of(0.5), S::zero());
        CMat::from_fn(self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * half
        })
    }

    pub fn commutator(&self, other: &CMat<S>) -> CMat<S> {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn frobenius_norm(&self) -> S {
        self.data.iter().map(|v| v.norm_sqr()).sum::<S>().sqrt()
    }

    /// Frobenius norm in the normalized trace, `sqrt(tr_m(X* X))`.
    pub fn trace_frobenius_norm(&self) -> S {
        self.frobenius_norm() / S::of(self.dim as f64).sqrt()
    }

    pub fn trace(&self) -> Complex<S> {
        (0..self.dim)
            .map(|i| self.get(i, i))
            .fold(Complex::new(S::zero(), S::zero()), |a, b| a + b)
    }

    /// Normalized trace `tr_m = Tr / m`.
    pub fn normalized_trace(&self) -> Complex<S> {
        let m = Complex::new(S::of(self.dim as f64), S::zero());
        self.trace() / m
    }

    /// Real symmetric embedding of a Hermitian matrix; its eigenvalues are
    /// those of the complex matrix, doubled in multiplicity.
    pub fn real_embedding(&self) -> SymMatrix<S> {
        let m = self.dim;
        SymMatrix::from_fn(2 * m, |i, j| {
            let (bi, ii) = (i / m, i % m);
            let (bj, jj) = (j / m, j % m);
            match (bi, bj) {
                (0, 0) | (1, 1) => self.get(ii, jj).re,
                (0, 1) => -self.get(ii, jj).im,
                _ => self.get(ii, jj).im,
            }
        })
        .expect("finite embedding")
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eig_hermitian(&self) -> S {
        let spec = eig_sym(&self.herm_part().real_embedding());
        spec.eigenvalues[0]
    }
}

/// A family of `n` POVMs with `k` outcomes in dimension `m`: each element is
/// PSD and each question's elements sum to the identity (both within 1e-9).
#[derive(Debug, Clone)]
pub struct PovmFamily<S> {
    n: usize,
    k: usize,
    m: usize,
    ops: Vec<CMat<S>>,
}

const FAMILY_TOL: f64 = 1e-9;

impl<S: Scalar> PovmFamily<S> {
    pub fn new(n: usize, k: usize, m: usize, ops: Vec<CMat<S>>) -> Result<Self> {
        validate_shape(n, k, m, &ops)?;
        let tol = S::of(FAMILY_TOL);
        for (idx, e) in ops.iter().enumerate() {
            if e.sub(&e.adjoint()).frobenius_norm() > tol {
                return Err(Error::InvariantViolation(format!(
                    "element ({},{}) is not Hermitian",
                    idx / k,
                    idx % k
                )));
            }
            if e.min_eig_hermitian() < -tol {
                return Err(Error::InvariantViolation(format!(
                    "element ({},{}) is not PSD",
                    idx / k,
                    idx % k
                )));
            }
        }
        validate_sums(n, k, m, &ops)?;
        Ok(PovmFamily { n, k, m, ops })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn op(&self, x: usize, a: usize) -> &CMat<S> {
        &self.ops[x * self.k + a]
    }
}

fn validate_shape<S: Scalar>(n: usize, k: usize, m: usize, ops: &[CMat<S>]) -> Result<()> {
    if ops.len() != n * k {
        return Err(Error::InvariantViolation(format!(
            "family needs {} elements, got {}",
            n * k,
            ops.len()
        )));
    }
    if ops.iter().any(|e| e.dim() != m) {
        return Err(Error::InvariantViolation(
            "element dimension mismatch".into(),
        ));
    }
    if ops.iter().any(|e| {
        e.data
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
    }) {
        return Err(Error::InvariantViolation("non-finite matrix entry".into()));
    }
    Ok(())
}

fn validate_sums<S: Scalar>(n: usize, k: usize, m: usize, ops: &[CMat<S>]) -> Result<()> {
    let tol = S::of(FAMILY_TOL);
    for x in 0..n {
        let mut sum = CMat::zeros(m);
        for a in 0..k {
            sum = sum.add(&ops[x * k + a]);
        }
        if sum.sub(&CMat::identity(m)).frobenius_norm() > tol {
            return Err(Error::InvariantViolation(format!(
                "question {x}: elements do not sum to the identity"
            )));
        }
    }
    Ok(())
}

/// A family of `n` PVMs: a `PovmFamily` whose elements are projections
/// (`||E^2 - E||_F <= 1e-9`).
#[derive(Debug, Clone)]
pub struct PvmFamily<S> {
    inner: PovmFamily<S>,
}

impl<S: Scalar> PvmFamily<S> {
    pub fn new(n: usize, k: usize, m: usize, ops: Vec<CMat<S>>) -> Result<Self> {
        validate_shape(n, k, m, &ops)?;
        let tol = S::of(FAMILY_TOL);
        for (idx, e) in ops.iter().enumerate() {
            if e.sub(&e.adjoint()).frobenius_norm() > tol {
                return Err(Error::InvariantViolation(format!(
                    "element ({},{}) is not Hermitian",
                    idx / k,
                    idx % k
                )));
            }
            if e.mul(e).sub(e).frobenius_norm() > tol {
                return Err(Error::InvariantViolation(format!(
                    "element ({},{}) is not a projection",
                    idx / k,
                    idx % k
                )));
            }
        }
        validate_sums(n, k, m, &ops)?;
        Ok(PvmFamily {
            inner: PovmFamily { n, k, m, ops },
        })
    }

    /// A deterministic PVM in dimension `m`: `E_{x, f(x)} = I`, all other
    /// elements zero.
    pub fn deterministic(n: usize, k: usize, m: usize, f: &[usize]) -> Result<Self> {
        if f.len() != n || f.iter().any(|&a| a >= k) {
            return Err(Error::InvariantViolation(
                "reply function out of range".into(),
            ));
        }
        let ops = (0..n * k)
            .map(|idx| {
                if idx % k == f[idx / k] {
                    CMat::identity(m)
                } else {
                    CMat::zeros(m)
                }
            })
            .collect();
        PvmFamily::new(n, k, m, ops)
    }

    pub fn as_povm(&self) -> &PovmFamily<S> {
        &self.inner
    }
}

impl<S> std::ops::Deref for PvmFamily<S> {
    type Target = PovmFamily<S>;
    fn deref(&self) -> &PovmFamily<S> {
        &self.inner
    }
}

/// A conditional probability density `p(a, b | x, y)`: nonnegative,
/// normalized per question pair, and non-signalling, all within 1e-9.
#[derive(Debug, Clone)]
pub struct Density<S> {
    n_a: usize,
    n_b: usize,
    k_a: usize,
    k_b: usize,
    p: Vec<S>,
}

impl<S: Scalar> Density<S> {
    pub fn new(n_a: usize, n_b: usize, k_a: usize, k_b: usize, p: Vec<S>) -> Result<Self> {
        if p.len() != n_a * n_b * k_a * k_b {
            return Err(Error::DimensionMismatch(format!(
                "density needs {} entries, got {}",
                n_a * n_b * k_a * k_b,
                p.len()
            )));
        }
        let tol = S::of(1e-9);
        let d = Density {
            n_a,
            n_b,
            k_a,
            k_b,
            p,
        };
        for (i, &v) in d.p.iter().enumerate() {
            if !v.is_finite() || v < -tol {
                return Err(Error::InvariantViolation(format!(
                    "density entry {i} is {v}"
                )));
            }
        }
        for x in 0..n_a {
            for y in 0..n_b {
                let total: S = d.outcomes(x, y).sum();
                if (total - S::one()).abs() > tol {
                    return Err(Error::InvariantViolation(format!(
                        "p(.|{x},{y}) sums to {total}"
                    )));
                }
            }
        }
        // Alice's marginal must be independent of Bob's question and vice versa.
        for x in 0..n_a {
            for a in 0..k_a {
                let m0: S = (0..k_b).map(|b| d.get(x, 0, a, b)).sum();
                for y in 1..n_b {
                    let my: S = (0..k_b).map(|b| d.get(x, y, a, b)).sum();
                    if (my - m0).abs() > tol {
                        return Err(Error::InvariantViolation(format!(
                            "signalling marginal at x={x}, a={a}, y={y}"
                        )));
                    }
                }
            }
        }
        for y in 0..n_b {
            for b in 0..k_b {
                let m0: S = (0..k_a).map(|a| d.get(0, y, a, b)).sum();
                for x in 1..n_a {
                    let mx: S = (0..k_a).map(|a| d.get(x, y, a, b)).sum();
                    if (mx - m0).abs() > tol {
                        return Err(Error::InvariantViolation(format!(
                            "signalling marginal at y={y}, b={b}, x={x}"
                        )));
                    }
                }
            }
        }
        Ok(d)
    }

    fn outcomes(&self, x: usize, y: usize) -> impl Iterator<Item = S> + '_ {
        let base = (x * self.n_b + y) * self.k_a * self.k_b;
        self.p[base..base + self.k_a * self.k_b].iter().copied()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> S {
        self.p[((x * self.n_b + y) * self.k_a + a) * self.k_b + b]
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.n_a, self.n_b, self.k_a, self.k_b)
    }

    /// `p(a, b | x, x) <= tol` for all `a != b` (square densities only).
    pub fn is_synchronous(&self, tol: S) -> bool {
        assert!(
            self.n_a == self.n_b && self.k_a == self.k_b,
            "square density required"
        );
        for x in 0..self.n_a {
            for a in 0..self.k_a {
                for b in 0..self.k_b {
                    if a != b && self.get(x, x, a, b) > tol {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The 0/1 density of a deterministic strategy pair.
    pub fn from_deterministic(
        n_a: usize,
        n_b: usize,
        k_a: usize,
        k_b: usize,
        f_a: &[usize],
        f_b: &[usize],
    ) -> Result<Self> {
        let mut p = vec![S::zero(); n_a * n_b * k_a * k_b];
        for x in 0..n_a {
            for y in 0..n_b {
                let idx = ((x * n_b + y) * k_a + f_a[x]) * k_b + f_b[y];
                p[idx] = S::one();
            }
        }
        Density::new(n_a, n_b, k_a, k_b, p)
    }
}

/// Density induced by a measurement family through the normalized trace,
/// `p(a, b | x, y) = Re tr_m(E_{x,a} E_{y,b})`. For PVM families the result
/// is synchronous.
pub fn density_from_povm<S: Scalar>(fam: &PovmFamily<S>) -> Result<Density<S>> {
    let (n, k) = (fam.n(), fam.k());
    let mut p = Vec::with_capacity(n * n * k * k);
    for x in 0..n {
        for y in 0..n {
            for a in 0..k {
                for b in 0..k {
                    p.push(fam.op(x, a).mul(fam.op(y, b)).normalized_trace().re);
                }
            }
        }
    }
    Density::new(n, n, k, k, p)
}

pub fn density_from_pvm<S: Scalar>(fam: &PvmFamily<S>) -> Result<Density<S>> {
    density_from_povm(fam.as_povm())
}

/// The uniform synchronous density: `1/c^2` off the diagonal, `1/c` on
/// diagonal question pairs with equal answers, 0 otherwise.
pub fn uniform_sync_density<S: Scalar>(n: usize, c: usize) -> Density<S> {
    let off = S::one() / S::of((c * c) as f64);
    let diag = S::one() / S::of(c as f64);
    let mut p = Vec::with_capacity(n * n * c * c);
    for x in 0..n {
        for y in 0..n {
            for a in 0..c {
                for b in 0..c {
                    p.push(if x != y {
                        off
                    } else if a == b {
                        diag
                    } else {
                        S::zero()
                    });
                }
            }
        }
    }
    Density::new(n, n, c, c, p).expect("uniform synchronous density is valid")
}

/// Expected winning probability of a density against a game instance.
pub fn game_value<S: Scalar>(inst: &GameInstance<S>, p: &Density<S>) -> Result<S> {
    let g = &inst.game;
    if p.shape() != (g.n_a(), g.n_b(), g.k_a(), g.k_b()) {
        return Err(Error::DimensionMismatch(format!(
            "density shape {:?} does not match game shape {:?}",
            p.shape(),
            (g.n_a(), g.n_b(), g.k_a(), g.k_b())
        )));
    }
    let mut value = S::zero();
    for (x, y, w) in inst.prior.support() {
        for a in 0..g.k_a() {
            for b in 0..g.k_b() {
                if g.wins(x, y, a, b) {
                    value += w * p.get(x, y, a, b);
                }
            }
        }
    }
    Ok(value)
}

fn require_square_and_matching<S: Scalar>(
    inst: &GameInstance<S>,
    fam: &PovmFamily<S>,
) -> Result<()> {
    if !inst.game.is_square() {
        return Err(Error::NotSquare);
    }
    if fam.n() != inst.game.n_a() || fam.k() != inst.game.k_a() {
        return Err(Error::DimensionMismatch(format!(
            "family is ({}, {}), game is ({}, {})",
            fam.n(),
            fam.k(),
            inst.game.n_a(),
            inst.game.k_a()
        )));
    }
    Ok(())
}

/// The null-set collectors
/// `Q_{x,a} = sum_{(x,y,a,b) losing, y != x} pi(x,y) E_{y,b}
///          + sum_{(y,x,b,a) losing, y != x} pi(y,x) E_{y,b}`,
/// returned as an `n * k` row-major array.
pub fn q_operators<S: Scalar>(inst: &GameInstance<S>, fam: &PovmFamily<S>) -> Result<Vec<CMat<S>>> {
    require_square_and_matching(inst, fam)?;
    let g = &inst.game;
    let (n, k, m) = (fam.n(), fam.k(), fam.m());
    let mut out = vec![CMat::zeros(m); n * k];
    for x in 0..n {
        for a in 0..k {
            let q = &mut out[x * k + a];
            for y in 0..n {
                if y == x {
                    continue;
                }
                for b in 0..k {
                    let mut w = S::zero();
                    if !g.wins(x, y, a, b) {
                        w += inst.prior.get(x, y);
                    }
                    if !g.wins(y, x, b, a) {
                        w += inst.prior.get(y, x);
                    }
                    if w != S::zero() {
                        *q = q.add(&fam.op(y, b).scale(w));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// First-order stationarity report.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderReport<S> {
    pub pass: bool,
    /// `max_x || Omega_x - Omega_x^* ||_F` with `Omega_x = sum_a E_{x,a} Q_{x,a}`.
    pub residual: S,
}

/// Checks the stationarity condition
/// `sum_a E_{x,a} Q_{x,a} = sum_a Q_{x,a} E_{x,a}` for every question, i.e.
/// Hermiticity of each `Omega_x`.
pub fn check_first_order<S: Scalar>(
    inst: &GameInstance<S>,
    fam: &PvmFamily<S>,
    tol: S,
) -> Result<FirstOrderReport<S>> {
    let q = q_operators(inst, fam.as_povm())?;
    let (n, k, m) = (fam.n(), fam.k(), fam.m());
    let mut residual = S::zero();
    for x in 0..n {
        let mut omega = CMat::zeros(m);
        for a in 0..k {
            omega = omega.add(&fam.op(x, a).mul(&q[x * k + a]));
        }
        residual = residual.max(omega.sub(&omega.adjoint()).frobenius_norm());
    }
    Ok(FirstOrderReport {
        pass: residual <= tol,
        residual,
    })
}

/// Exchange-inequality report.
#[derive(Debug, Clone, Copy)]
pub struct ExchangeReport<S> {
    pub pass: bool,
    /// Most negative eigenvalue encountered over all `(x, a != b)` tests.
    pub worst: S,
}

/// Checks, for every question `x` and outcome pair `a != b`, that moving
/// answer mass from `a` to `b` cannot reduce the loss:
///
/// `E_{x,a} Q_{x,b} E_{x,a} + delta_x^a E_{x,a}
///    >= E_{x,a} Q_{x,a} E_{x,a} + delta_x^b E_{x,a}`,
///
/// with `delta_x^a = pi(x,x) lambda(x,x,a,a)`. Swapping a sub-projection of
/// `E_{x,a}` into outcome `b` trades the penalty `Q_{x,a}` for `Q_{x,b}` and
/// the diagonal win `delta^a` for `delta^b`; at an optimum the trade is never
/// favourable, which is exactly PSD-ness of the displayed difference.
pub fn check_exchange_inequality<S: Scalar>(
    inst: &GameInstance<S>,
    fam: &PvmFamily<S>,
    tol: S,
) -> Result<ExchangeReport<S>> {
    let q = q_operators(inst, fam.as_povm())?;
    let g = &inst.game;
    let (n, k) = (fam.n(), fam.k());
    let mut worst = S::infinity();
    for x in 0..n {
        let delta = |a: usize| {
            if g.wins(x, x, a, a) {
                inst.prior.get(x, x)
            } else {
                S::zero()
            }
        };
        for a in 0..k {
            let e = fam.op(x, a);
            for b in 0..k {
                if a == b {
                    continue;
                }
                let diff = e
                    .mul(&q[x * k + b].sub(&q[x * k + a]))
                    .mul(e)
                    .add(&e.scale(delta(a) - delta(b)));
                worst = worst.min(diff.min_eig_hermitian());
            }
        }
    }
    if !worst.is_finite() {
        worst = S::zero();
    }
    Ok(ExchangeReport {
        pass: worst >= -tol,
        worst,
    })
}

/// Report of the POVM optimality conditions.
#[derive(Debug, Clone)]
pub struct PovmConditionReport<S> {
    pub pass: bool,
    pub psd_pass: bool,
    pub annihilation_pass: bool,
    /// Most negative eigenvalue over the per-`(x,b)` PSD tests.
    pub worst_psd_eig: S,
    /// Largest annihilation residual over the per-`(x,b)` tests.
    pub worst_annihilation: S,
    /// `lambda_min` of each `Omega_x`, for corollary bounds such as the
    /// colouring floor of `coloring_omega_floor`.
    pub omega_min_eigs: Vec<S>,
}

/// Checks the primal-dual optimality conditions for families optimal over
/// POVMs: with the win-weighted collectors
/// `R_{x,a} = sum_{(x,y,a,b) winning, y != x} pi(x,y) E_{y,b} + (mirror term)`
/// and `Omega_x = sum_a E_{x,a} R_{x,a}`, every difference
/// `Omega_x - R_{x,b}` must be PSD and must annihilate `E_{x,b}` on both
/// sides.
///
/// Requires a synchronous game whose diagonal same-answer tuples all win
/// (`lambda(x,x,a,a) = 1`).
pub fn check_povm_conditions<S: Scalar>(
    inst: &GameInstance<S>,
    fam: &PvmFamily<S>,
    tol: S,
) -> Result<PovmConditionReport<S>> {
    require_square_and_matching(inst, fam.as_povm())?;
    let g = &inst.game;
    if !crate::game::is_synchronous(g)? {
        return Err(Error::Precondition("game must be synchronous".into()));
    }
    let (n, k, m) = (fam.n(), fam.k(), fam.m());
    for x in 0..n {
        for a in 0..k {
            if !g.wins(x, x, a, a) {
                return Err(Error::Precondition(
                    "diagonal same-answer tuples must all win".into(),
                ));
            }
        }
    }

    // Win-weighted collectors: R_{x,a} = rho_x I - Q_{x,a}, where rho_x is the
    // total prior mass paired with question x.
    let q = q_operators(inst, fam.as_povm())?;
    let mut report = PovmConditionReport {
        pass: false,
        psd_pass: true,
        annihilation_pass: true,
        worst_psd_eig: S::infinity(),
        worst_annihilation: S::zero(),
        omega_min_eigs: Vec::with_capacity(n),
    };
    for x in 0..n {
        let rho: S = (0..n)
            .filter(|&y| y != x)
            .map(|y| inst.prior.get(x, y) + inst.prior.get(y, x))
            .sum();
        let rho_id = CMat::identity(m).scale(rho);
        let r: Vec<CMat<S>> = (0..k).map(|a| rho_id.sub(&q[x * k + a])).collect();
        let mut omega = CMat::zeros(m);
        for a in 0..k {
            omega = omega.add(&fam.op(x, a).mul(&r[a]));
        }
        report.omega_min_eigs.push(omega.min_eig_hermitian());
        for b in 0..k {
            let t = omega.sub(&r[b]);
            report.worst_psd_eig = report.worst_psd_eig.min(t.min_eig_hermitian());
            let left = t.mul(fam.op(x, b)).frobenius_norm();
            let right = fam.op(x, b).mul(&t).frobenius_norm();
            report.worst_annihilation = report.worst_annihilation.max(left.max(right));
        }
    }
    if !report.worst_psd_eig.is_finite() {
        report.worst_psd_eig = S::zero();
    }
    report.psd_pass = report.worst_psd_eig >= -tol;
    report.annihilation_pass = report.worst_annihilation <= tol;
    report.pass = report.psd_pass && report.annihilation_pass;
    Ok(report)
}

/// Lower bounds `(2 d_x) / (c |E|)` that `lambda_min(Omega_x)` must meet for
/// a colouring game under the uniform edge prior.
pub fn coloring_omega_floor<S: Scalar>(g: &Graph, c: usize) -> Vec<S> {
    let m = g.ordered_edge_count();
    (0..g.n())
        .map(|x| S::of(2.0 * g.degree(x) as f64) / (S::of(c as f64) * S::of(m as f64)))
        .collect()
}

/// Frobenius norm (in the normalized trace) of `[E_{0,0}, E_{1,0}]` for a
/// two-question binary family. A family passing the first-order check on the
/// CHSH game at tolerance `t` has commutator norm at most `t`.
pub fn chsh_commutation_audit<S: Scalar>(fam: &PvmFamily<S>) -> Result<S> {
    if fam.n() != 2 || fam.k() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "audit needs a 2-question binary family, got ({}, {})",
            fam.n(),
            fam.k()
        )));
    }
    Ok(fam.op(0, 0).commutator(fam.op(1, 0)).trace_frobenius_norm())
}

/// Random PVM family: per question, a uniformly random assignment of the `m`
/// basis directions to the `k` outcomes, conjugated by a Haar-ish random
/// unitary (QR of a complex Gaussian matrix).
pub fn random_pvm<S: Scalar>(n: usize, k: usize, m: usize, rng: &mut ChaCha8Rng) -> PvmFamily<S> {
    let mut ops = Vec::with_capacity(n * k);
    for _ in 0..n {
        let assignment: Vec<usize> = (0..m).map(|_| rng.random_range(0..k)).collect();
        let u = random_unitary::<S>(m, rng);
        let ustar = u.adjoint();
        for a in 0..k {
            let d = CMat::from_fn(m, |i, j| {
                if i == j && assignment[i] == a {
                    Complex::new(S::one(), S::zero())
                } else {
                    Complex::new(S::zero(), S::zero())
                }
            });
            ops.push(u.mul(&d).mul(&ustar));
        }
    }
    PvmFamily::new(n, k, m, ops).expect("random construction satisfies invariants")
}

fn random_unitary<S: Scalar>(m: usize, rng: &mut ChaCha8Rng) -> CMat<S> {
    let gaussian = |rng: &mut ChaCha8Rng| -> S {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        S::of((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
    };
    let a = CMat::from_fn(m, |_, _| Complex::new(S::zero(), S::zero()));
    let mut a = a;
    for i in 0..m {
        for j in 0..m {
            a.set(i, j, Complex::new(gaussian(rng), gaussian(rng)));
        }
    }
    // Modified Gram-Schmidt on columns.
    let mut q = a;
    for j in 0..m {
        for prev in 0..j {
            let mut inner = Complex::new(S::zero(), S::zero());
            for i in 0..m {
                inner += q.get(i, prev).conj() * q.get(i, j);
            }
            for i in 0..m {
                let v = q.get(i, j) - q.get(i, prev) * inner;
                q.set(i, j, v);
            }
        }
        let norm: S = (0..m).map(|i| q.get(i, j).norm_sqr()).sum::<S>().sqrt();
        let inv = Complex::new(S::one() / norm, S::zero());
        for i in 0..m {
            let v = q.get(i, j) * inv;
            q.set(i, j, v);
        }
    }
    q
}
