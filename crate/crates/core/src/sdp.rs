//! Maximization of `Tr(A P)` over the elliptope `{P >= 0, diag(P) = 1}` with
//! an a-posteriori dual certificate.
//!
//! The primal is attacked through the low-rank factorization `P = V V^T` with
//! unit-norm rows of `V` and rank strictly above the `ceil(sqrt(2n))` bound,
//! from several deterministic restarts. Each restart runs Gauss-Seidel row
//! maximization, `v_i <- normalize(sum_{j != i} A_ij v_j)`: every update is
//! the exact maximizer of the objective over that row, ascent is monotone,
//! the fixed points are exactly the Riemannian stationary points, and
//! convergence is declared on the Riemannian gradient norm. At a stationary
//! point the diagonal `y_i = (A V V^T)_{ii}` is the natural dual candidate:
//! the solution is certified when `Diag(y) - A` is PSD, and otherwise `y` is
//! lifted uniformly by the most negative eigenvalue so that the reported gap
//! stays an honest upper-bound distance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{circulant_spectrum, eig_sym, Mat, SymMatrix};
use crate::scalar::Scalar;

/// Objective of the elliptope problem `max Tr(A P)`.
#[derive(Debug, Clone)]
pub struct ElliptopeProblem<S> {
    pub a: SymMatrix<S>,
}

impl<S: Scalar> ElliptopeProblem<S> {
    pub fn new(a: SymMatrix<S>) -> Self {
        ElliptopeProblem { a }
    }
}

/// Solver knobs. Restart `j` is seeded with `seed + j`, so runs are
/// reproducible bit-for-bit for a fixed configuration.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub seed: u64,
    pub restarts: usize,
    /// A solution is certified when `gap <= gap_tol * max(1, |value|)`.
    pub gap_tol: f64,
    pub max_iters: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 42,
            restarts: 8,
            gap_tol: 1e-6,
            max_iters: 50_000,
        }
    }
}

impl SolveConfig {
    pub fn with_seed(seed: u64, restarts: usize) -> Self {
        SolveConfig {
            seed,
            restarts,
            ..Default::default()
        }
    }
}

/// Primal-dual output of `solve_elliptope`.
#[derive(Debug, Clone)]
pub struct SdpSolution<S> {
    /// `Tr(A P)` at the best primal found; a valid lower bound.
    pub value: S,
    /// The primal point `P = V V^T` on the elliptope.
    pub primal: SymMatrix<S>,
    /// Dual-feasible diagonal `y` (`Diag(y) - A >= 0`); `sum(y)` is a valid
    /// upper bound.
    pub dual: Vec<S>,
    /// `sum(y) - value >= 0`.
    pub gap: S,
    pub certified: bool,
}

struct Factor<S> {
    n: usize,
    r: usize,
    v: Vec<S>, // row-major n x r, unit rows
}

impl<S: Scalar> Factor<S> {
    fn random(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut v = vec![S::zero(); n * r];
        for row in 0..n {
            loop {
                // Box-Muller pairs give rotation-invariant rows, hence uniform
                // points on the sphere after normalization.
                for c in 0..r {
                    let u1: f64 = rng.random::<f64>().max(1e-300);
                    let u2: f64 = rng.random();
                    let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                    v[row * r + c] = S::of(g);
                }
                let norm = norm_slice(&v[row * r..(row + 1) * r]);
                if norm > S::of(1e-12) {
                    for c in 0..r {
                        v[row * r + c] /= norm;
                    }
                    break;
                }
            }
        }
        Factor { n, r, v }
    }

    fn row(&self, i: usize) -> &[S] {
        &self.v[i * self.r..(i + 1) * self.r]
    }
}

fn norm_slice<S: Scalar>(s: &[S]) -> S {
    s.iter().map(|&v| v * v).sum::<S>().sqrt()
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// `W = A V`, row-major like `V`.
fn apply<S: Scalar>(a: &SymMatrix<S>, f: &Factor<S>, w: &mut [S]) {
    let (n, r) = (f.n, f.r);
    for x in w.iter_mut() {
        *x = S::zero();
    }
    for i in 0..n {
        let arow = a.row(i);
        for (j, &aij) in arow.iter().enumerate() {
            if aij == S::zero() {
                continue;
            }
            let vrow = f.row(j);
            let wrow = &mut w[i * r..(i + 1) * r];
            for c in 0..r {
                wrow[c] += aij * vrow[c];
            }
        }
    }
}

fn objective<S: Scalar>(f: &Factor<S>, w: &[S]) -> S {
    dot(&f.v, w)
}

/// Riemannian gradient norm at `f` given `w = A V`: the tangent component of
/// `2 w_i` on each row's sphere.
fn riemannian_grad_norm<S: Scalar>(f: &Factor<S>, w: &[S]) -> S {
    let r = f.r;
    let mut total = S::zero();
    for i in 0..f.n {
        let vrow = f.row(i);
        let wrow = &w[i * r..(i + 1) * r];
        let radial = dot(wrow, vrow);
        for c in 0..r {
            let g = S::of(2.0) * (wrow[c] - radial * vrow[c]);
            total += g * g;
        }
    }
    total.sqrt()
}

/// One ascent run from a random start; returns the factor left at a
/// stationary point together with its objective value.
///
/// Each sweep updates every row to its exact per-row maximizer,
/// `v_i <- g_i / |g_i|` with `g_i = sum_{j != i} A_ij v_j`, in place
/// (Gauss-Seidel), then tests stationarity on the Riemannian gradient norm
/// against `1e-10 * max(1, ||A||_F)`.
fn ascend<S: Scalar>(a: &SymMatrix<S>, mut f: Factor<S>, cfg: &SolveConfig) -> (Factor<S>, S) {
    let (n, r) = (f.n, f.r);
    // floored at a few machine epsilons so f32 runs terminate
    let grad_tol = S::of(1e-10).max(S::epsilon() * S::of(8.0)) * S::one().max(a.frobenius_norm());
    let tiny = S::of(1e-300);
    let mut g = vec![S::zero(); r];
    let mut w = vec![S::zero(); n * r];

    for _sweep in 0..cfg.max_iters {
        for i in 0..n {
            for x in g.iter_mut() {
                *x = S::zero();
            }
            let arow = a.row(i);
            for (j, &aij) in arow.iter().enumerate() {
                if j == i || aij == S::zero() {
                    continue;
                }
                let vrow = &f.v[j * r..(j + 1) * r];
                for c in 0..r {
                    g[c] += aij * vrow[c];
                }
            }
            let norm = norm_slice(&g);
            if norm > tiny {
                for c in 0..r {
                    f.v[i * r + c] = g[c] / norm;
                }
            }
        }
        apply(a, &f, &mut w);
        if riemannian_grad_norm(&f, &w) <= grad_tol {
            break;
        }
    }
    apply(a, &f, &mut w);
    let value = objective(&f, &w);
    (f, value)
}

/// Solves `max Tr(A P)` over the elliptope. Always returns bounds; when the
/// dual candidate is not PSD it is repaired by a uniform lift and the widened
/// gap is reported with `certified = false` if it exceeds the tolerance.
pub fn solve_elliptope<S: Scalar>(prob: &ElliptopeProblem<S>, cfg: &SolveConfig) -> SdpSolution<S> {
    let a = &prob.a;
    let n = a.n();
    if n == 0 {
        return SdpSolution {
            value: S::zero(),
            primal: SymMatrix::zeros(0),
            dual: vec![],
            gap: S::zero(),
            certified: true,
        };
    }
    // Rank strictly above the ceil(sqrt(2n)) bound.
    let r = ((2 * n) as f64).sqrt().ceil() as usize + 1;

    let mut best: Option<(S, Factor<S>)> = None;
    let restarts = cfg.restarts.max(1);
    for j in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(j as u64));
        let start = Factor::random(n, r, &mut rng);
        let (f, value) = ascend(a, start, cfg);
        let better = match &best {
            None => true,
            Some((bv, _)) => value > *bv,
        };
        if better {
            best = Some((value, f));
        }
    }
    let (_, mut f) = best.expect("at least one restart");
    // Renormalize rows so the primal diagonal is exactly 1 up to rounding.
    for i in 0..n {
        let norm = norm_slice(f.row(i));
        for c in 0..f.r {
            f.v[i * f.r + c] /= norm;
        }
    }

    let primal = SymMatrix::from_fn(n, |i, j| dot(f.row(i), f.row(j))).expect("finite primal");
    let mut w = vec![S::zero(); n * f.r];
    apply(a, &f, &mut w);
    let mut dual: Vec<S> = (0..n)
        .map(|i| dot(&w[i * f.r..(i + 1) * f.r], f.row(i)))
        .collect();
    let value: S = dual.iter().copied().sum();

    let slack = SymMatrix::from_fn(n, |i, j| {
        let d = if i == j { dual[i] } else { S::zero() };
        d - a.get(i, j)
    })
    .expect("finite slack");
    let lambda_min = eig_sym(&slack).eigenvalues[0];
    let lift = (-lambda_min).max(S::zero());
    for y in dual.iter_mut() {
        *y += lift;
    }
    let total: S = dual.iter().copied().sum();
    let gap = total - value;
    let certified = gap <= S::of(cfg.gap_tol) * S::one().max(value.abs());

    SdpSolution {
        value,
        primal,
        dual,
        gap,
        certified,
    }
}

/// Minimizes `sum(y)` over diagonal `y` with `Diag(y) - A >= 0`.
///
/// Constant-diagonal circulants are solved in closed form, `y = lambda_max 1`:
/// averaging any feasible diagonal over the cyclic shifts preserves the trace
/// and feasibility, so a constant diagonal is optimal. Everything else goes
/// through `solve_elliptope` with default configuration.
pub fn solve_diag_dual<S: Scalar>(a: &SymMatrix<S>) -> (Vec<S>, S) {
    let n = a.n();
    if let Some(row) = circulant_first_row(a) {
        if let Ok(lams) = circulant_spectrum(&row) {
            let lam_max = lams.into_iter().fold(S::neg_infinity(), S::max);
            let total = lam_max * S::of(n as f64);
            return (vec![lam_max; n], total);
        }
    }
    let sol = solve_elliptope(&ElliptopeProblem::new(a.clone()), &SolveConfig::default());
    let total = sol.dual.iter().copied().sum();
    (sol.dual, total)
}

/// Detects whether `a` is a circulant (every row a cyclic shift of the first)
/// and returns its first row if so.
fn circulant_first_row<S: Scalar>(a: &SymMatrix<S>) -> Option<Vec<S>> {
    let n = a.n();
    if n == 0 {
        return None;
    }
    let row0: Vec<S> = a.row(0).to_vec();
    let scale = row0.iter().fold(S::one(), |m, &v| m.max(v.abs()));
    let tol = scale * S::of(1e-12);
    for i in 1..n {
        for j in 0..n {
            if (a.get(i, j) - row0[(j + n - i) % n]).abs() > tol {
                return None;
            }
        }
    }
    Some(row0)
}

/// Complementary-slackness check `P (Diag(y) - A) = 0` within 1e-6 (max-abs
/// entry). Requires a certified solution.
pub fn dual_uniqueness_check<S: Scalar>(a: &SymMatrix<S>, sol: &SdpSolution<S>) -> Result<bool> {
    if !sol.certified {
        return Err(Error::Uncertified);
    }
    let n = a.n();
    let slack = Mat::from_fn(n, n, |i, j| {
        let d = if i == j { sol.dual[i] } else { S::zero() };
        d - a.get(i, j)
    });
    let prod = sol.primal.to_mat().matmul(&slack);
    Ok(prod.max_abs() <= S::of(1e-6))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{chsh_game, Graph};
    use crate::xor::cost_matrices;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    fn solve(a: SymMatrix<f64>) -> SdpSolution<f64> {
        solve_elliptope(&ElliptopeProblem::new(a), &SolveConfig::default())
    }

    #[test]
    fn identity_objective() {
        let sol = solve(SymMatrix::identity(3));
        assert_close(sol.value, 3.0, 1e-9);
        assert!(sol.certified);
        assert!(sol.gap >= -1e-10);
    }

    #[test]
    fn chsh_sync_objective() {
        let a = cost_matrices(&chsh_game::<f64>()).a_sym;
        let sol = solve(a);
        assert_close(sol.value, 0.5, 1e-8);
        assert!(sol.certified);
        assert_close(sol.primal.get(0, 1), 1.0, 1e-6);
    }

    #[test]
    fn cycle_cost_closed_form() {
        // circulant with diagonal 1/2n and -1/4n on the two neighbours
        let n = 5usize;
        let a = SymMatrix::from_fn(n, |i, j| {
            let d = (j + n - i) % n;
            match d {
                0 => 1.0 / (2.0 * n as f64),
                1 => -1.0 / (4.0 * n as f64),
                _ if d == n - 1 => -1.0 / (4.0 * n as f64),
                _ => 0.0,
            }
        })
        .unwrap();
        let sol = solve(a);
        let want = 0.5 * (1.0 + (std::f64::consts::PI / n as f64).cos());
        assert_close(sol.value, want, 1e-7);
        assert!(sol.certified);
    }

    #[test]
    fn negated_k5_adjacency() {
        let a = Graph::complete(5).adjacency::<f64>().scaled(-1.0);
        let sol = solve(a);
        assert_close(sol.value, 5.0, 1e-7);
        assert!(sol.certified);
    }

    #[test]
    fn scaling_equivariance_and_permutation_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5usize {
            let a = SymMatrix::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0).unwrap();
            let base = solve(a.clone());
            assert!(base.certified);

            let c = 0.25 + rng.random::<f64>() * 3.0;
            let scaled = solve(a.scaled(c));
            assert!((scaled.value - c * base.value).abs() <= 1e-7 * (1.0 + c * base.value.abs()));

            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let permuted = SymMatrix::from_fn(n, |i, j| a.get(perm[i], perm[j])).unwrap();
            let psol = solve(permuted);
            assert!((psol.value - base.value).abs() <= 1e-7 * (1.0 + base.value.abs()));
        }
    }

    #[test]
    fn weak_duality_on_random_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let n = rng.random_range(1..=8usize);
            let a = SymMatrix::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0).unwrap();
            let sol = solve(a.clone());
            assert!(sol.gap >= -1e-10, "weak duality violated: gap {}", sol.gap);
            // dual feasibility after the lift
            let slack = SymMatrix::from_fn(n, |i, j| {
                (if i == j { sol.dual[i] } else { 0.0 }) - a.get(i, j)
            })
            .unwrap();
            assert!(crate::linalg::is_psd(&slack, 1e-8));
            // primal feasibility
            for i in 0..n {
                assert_close(sol.primal.get(i, i), 1.0, 1e-8);
            }
            assert!(crate::linalg::is_psd(&sol.primal, 1e-8));
        }
    }

    #[test]
    fn circulant_value_matches_spectrum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for n in 2..=9usize {
            let mut row = vec![0.0f64; n];
            for j in 0..=(n / 2) {
                let v = rng.random::<f64>() - 0.5;
                row[j] = v;
                row[(n - j) % n] = v;
            }
            let a = SymMatrix::from_fn(n, |i, j| row[(j + n - i) % n]).unwrap();
            let lam_max = circulant_spectrum(&row)
                .unwrap()
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            let sol = solve(a);
            assert!((sol.value - n as f64 * lam_max).abs() <= 1e-7 * (1.0 + sol.value.abs()));
        }
    }

    #[test]
    fn brute_force_grid_oracle_small() {
        // n = 2: off-diagonal cosine grid
        let a2 = SymMatrix::new(2, vec![0.3, -0.9, -0.9, -0.2]).unwrap();
        let mut grid_max = f64::NEG_INFINITY;
        for i in 0..10_000 {
            let t = (2.0 * std::f64::consts::PI * i as f64 / 10_000.0).cos();
            let val = a2.get(0, 0) + a2.get(1, 1) + 2.0 * a2.get(0, 1) * t;
            grid_max = grid_max.max(val);
        }
        let sol = solve(a2);
        assert!(sol.value >= grid_max - 1e-3);

        // n = 3: rank-2 points P_ij = cos(t_i - t_j) with t_0 = 0
        let a3 = SymMatrix::new(3, vec![0.1, 0.7, -0.4, 0.7, -0.3, 0.5, -0.4, 0.5, 0.2]).unwrap();
        let mut grid_max = f64::NEG_INFINITY;
        let steps = 100;
        for i in 0..steps {
            let t1 = 2.0 * std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..steps {
                let t2 = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
                let val = a3.get(0, 0)
                    + a3.get(1, 1)
                    + a3.get(2, 2)
                    + 2.0 * a3.get(0, 1) * t1.cos()
                    + 2.0 * a3.get(0, 2) * t2.cos()
                    + 2.0 * a3.get(1, 2) * (t1 - t2).cos();
                grid_max = grid_max.max(val);
            }
        }
        let sol = solve(a3);
        assert!(sol.value >= grid_max - 1e-3);
    }

    #[test]
    fn diag_dual_cases() {
        // symmetric cycle cost: y = lambda_max, total = q + p cos(pi/n)
        let (n, p) = (5usize, 0.6f64);
        let q = 1.0 - p;
        let a = SymMatrix::from_fn(n, |i, j| {
            let d = (j + n - i) % n;
            match d {
                0 => q / n as f64,
                1 => -p / (2.0 * n as f64),
                _ if d == n - 1 => -p / (2.0 * n as f64),
                _ => 0.0,
            }
        })
        .unwrap();
        let (y, total) = solve_diag_dual(&a);
        let lam_max = q / n as f64 + (p / n as f64) * (std::f64::consts::PI / n as f64).cos();
        for yi in &y {
            assert_close(*yi, lam_max, 1e-12);
        }
        assert_close(
            total,
            q + p * (std::f64::consts::PI / n as f64).cos(),
            1e-12,
        );

        let (y, total) = solve_diag_dual(&SymMatrix::<f64>::zeros(3));
        assert!(y.iter().all(|&v| v.abs() < 1e-15));
        assert!(total.abs() < 1e-15);

        // bias counterexample matrix: constant y = 4/21, total 4/7
        let a =
            SymMatrix::from_fn(3, |i, j| if i == j { 1.0 / 21.0 } else { -3.0 / 21.0 }).unwrap();
        let (y, total) = solve_diag_dual(&a);
        for yi in &y {
            assert_close(*yi, 4.0 / 21.0, 1e-9);
        }
        assert_close(total, 4.0 / 7.0, 1e-9);
    }

    #[test]
    fn f32_instantiation() {
        let a =
            SymMatrix::<f32>::new(3, vec![0.3, -0.9, 0.1, -0.9, -0.2, 0.4, 0.1, 0.4, 0.0]).unwrap();
        let sol32 = solve_elliptope(&ElliptopeProblem::new(a.clone()), &SolveConfig::default());
        let a64 = SymMatrix::<f64>::from_fn(3, |i, j| a.get(i, j) as f64).unwrap();
        let sol64 = solve_elliptope(&ElliptopeProblem::new(a64), &SolveConfig::default());
        assert!((sol32.value as f64 - sol64.value).abs() < 1e-3);
        assert!(sol32.gap >= -1e-3);
    }

    #[test]
    fn uniqueness_check_cases() {
        let a =
            SymMatrix::from_fn(3, |i, j| if i == j { 1.0 / 21.0 } else { -3.0 / 21.0 }).unwrap();
        let sol = solve(a.clone());
        assert!(sol.certified);
        assert!(dual_uniqueness_check(&a, &sol).unwrap());

        let chsh = cost_matrices(&chsh_game::<f64>()).a_sym;
        let sol = solve(chsh.clone());
        assert!(dual_uniqueness_check(&chsh, &sol).unwrap());

        let mut perturbed = sol.clone();
        perturbed.dual[0] += 0.05;
        assert!(!dual_uniqueness_check(&chsh, &perturbed).unwrap());

        let mut uncert = sol;
        uncert.certified = false;
        assert!(matches!(
            dual_uniqueness_check(&chsh, &uncert),
            Err(Error::Uncertified)
        ));
    }
}
