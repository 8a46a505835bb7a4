//! XOR games: cost matrices, quantum and synchronous-quantum values and
//! biases through the elliptope SDP, quantum cut numbers, balancedness, and
//! the odd-cycle closed forms.
//!
//! The two optimizations behind everything here are
//! `omega = 1/2 + 1/2 max Tr(B P)` over the `2n x 2n` elliptope and
//! `omega_sync = 1/2 + 1/2 max Tr(A_sym P)` over the `n x n` elliptope,
//! where `A = ((-1)^{f(x,y)} pi(x,y))`, `A_sym = (A + A^T)/2` and
//! `B = 1/2 [[0, A], [A^T, 0]]`.

use crate::error::{Error, Result};
use crate::game::{Graph, PriorDistribution, XorGame};
use crate::linalg::{is_psd, Mat, SymMatrix};
use crate::scalar::Scalar;
use crate::sdp::{solve_diag_dual, solve_elliptope, ElliptopeProblem, SdpSolution, SolveConfig};

/// The signed cost matrix of an XOR game with its symmetrization and the
/// off-diagonal block embedding.
#[derive(Debug, Clone)]
pub struct CostMatrices<S> {
    pub a: Mat<S>,
    pub a_sym: SymMatrix<S>,
    pub b: SymMatrix<S>,
}

pub fn cost_matrices<S: Scalar>(g: &XorGame<S>) -> CostMatrices<S> {
    let n = g.n();
    let sign = |x: usize, y: usize| if g.f(x, y) == 1 { -S::one() } else { S::one() };
    let a = Mat::from_fn(n, n, |x, y| sign(x, y) * g.prior().get(x, y));
    let a_sym = SymMatrix::from_fn(n, |x, y| (a.get(x, y) + a.get(y, x)) * S::of(0.5))
        .expect("finite cost entries");
    let b = SymMatrix::from_fn(2 * n, |i, j| {
        if i < n && j >= n {
            a.get(i, j - n) * S::of(0.5)
        } else if i >= n && j < n {
            a.get(j, i - n) * S::of(0.5)
        } else {
            S::zero()
        }
    })
    .expect("finite block entries");
    CostMatrices { a, a_sym, b }
}

/// An SDP-backed value together with its certification status.
#[derive(Debug, Clone, Copy)]
pub struct CertifiedValue<S> {
    pub value: S,
    pub certified: bool,
    pub gap: S,
}

fn half_plus_half<S: Scalar>(sol: &SdpSolution<S>) -> CertifiedValue<S> {
    CertifiedValue {
        value: S::of(0.5) + S::of(0.5) * sol.value,
        certified: sol.certified,
        gap: sol.gap,
    }
}

/// Quantum (= quantum-commuting) value of an XOR game via the `2n x 2n` SDP.
pub fn xor_value<S: Scalar>(g: &XorGame<S>, cfg: &SolveConfig) -> CertifiedValue<S> {
    let cm = cost_matrices(g);
    half_plus_half(&solve_elliptope(&ElliptopeProblem::new(cm.b), cfg))
}

/// Synchronous quantum value via the `n x n` SDP on the symmetrized cost.
pub fn xor_sync_value<S: Scalar>(g: &XorGame<S>, cfg: &SolveConfig) -> CertifiedValue<S> {
    let cm = cost_matrices(g);
    half_plus_half(&solve_elliptope(&ElliptopeProblem::new(cm.a_sym), cfg))
}

/// Quantum max-2-cut: `|E|/4 - 1/4 min Tr(A_G P)` with `A_G` the adjacency
/// matrix and `|E|` the ordered edge count.
pub fn quantum_max_cut2<S: Scalar>(g: &Graph, cfg: &SolveConfig) -> Result<CertifiedValue<S>> {
    let m = g.ordered_edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let neg_adj = g.adjacency::<S>().scaled(-S::one());
    let sol = solve_elliptope(&ElliptopeProblem::new(neg_adj), cfg);
    let quarter = S::of(0.25);
    Ok(CertifiedValue {
        value: S::of(m as f64) * quarter + quarter * sol.value,
        certified: sol.certified,
        gap: sol.gap,
    })
}

/// The graph correlation function at 1/2: `(|E|/2) (1 - omega_sync)` where
/// `omega_sync` is the synchronous value of the 2-colouring game under the
/// uniform edge prior.
pub fn graph_corr_half<S: Scalar>(g: &Graph, cfg: &SolveConfig) -> Result<CertifiedValue<S>> {
    let m = g.ordered_edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let prior = crate::game::uniform_edge_prior::<S>(g)?;
    let xg = two_coloring_xor(g, prior)?;
    let omega_sync = xor_sync_value(&xg, cfg);
    Ok(CertifiedValue {
        value: S::of(m as f64 / 2.0) * (S::one() - omega_sync.value),
        certified: omega_sync.certified,
        gap: omega_sync.gap,
    })
}

/// Views the 2-colouring game of `g` as an XOR game. Valid only when the
/// prior vanishes on non-adjacent distinct pairs; the rule on those
/// don't-care pairs is set to 0.
pub fn two_coloring_xor<S: Scalar>(g: &Graph, prior: PriorDistribution<S>) -> Result<XorGame<S>> {
    let n = g.n();
    if prior.n_a() != n || prior.n_b() != n {
        return Err(Error::DimensionMismatch(format!(
            "prior is {}x{}, graph has {n} vertices",
            prior.n_a(),
            prior.n_b()
        )));
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && !g.has_edge(x, y) && prior.get(x, y) > S::zero() {
                return Err(Error::Precondition(format!(
                    "prior mass {} on non-adjacent pair ({x},{y})",
                    prior.get(x, y)
                )));
            }
        }
    }
    XorGame::from_fn(n, |x, y| u8::from(x != y && g.has_edge(x, y)), prior)
}

/// The 2-colouring game of the n-cycle with the non-symmetric prior putting
/// mass `1/2n` on each pair `(x, x)` and `(x, x+1 mod n)`.
pub fn cycle_game<S: Scalar>(n: usize) -> Result<XorGame<S>> {
    if n < 3 {
        return Err(Error::InvalidCycleLength(n));
    }
    let w = S::one() / S::of(2.0 * n as f64);
    let prior = PriorDistribution::from_fn(n, n, |x, y| {
        if y == x || y == (x + 1) % n {
            w
        } else {
            S::zero()
        }
    })?;
    two_coloring_xor(&Graph::cycle(n), prior)
}

/// The 2-colouring game of the n-cycle with the symmetric prior: mass `q/n`
/// on the diagonal and `p/2n` on each ordered edge, `q = 1 - p`.
pub fn cycle_game_symmetric<S: Scalar>(n: usize, p: S) -> Result<XorGame<S>> {
    if n < 3 {
        return Err(Error::InvalidCycleLength(n));
    }
    if !(S::zero()..=S::one()).contains(&p) {
        return Err(Error::InvalidWeight(p.to_f64c()));
    }
    let q = S::one() - p;
    let diag = q / S::of(n as f64);
    let edge = p / S::of(2.0 * n as f64);
    let prior = PriorDistribution::from_fn(n, n, |x, y| {
        if x == y {
            diag
        } else if y == (x + 1) % n || x == (y + 1) % n {
            edge
        } else {
            S::zero()
        }
    })?;
    two_coloring_xor(&Graph::cycle(n), prior)
}

/// Outcome of the balancedness test.
#[derive(Debug, Clone)]
pub struct BalanceReport<S> {
    /// True iff `-Diag(y) <= A <= Diag(y)` for the unique dual optimum `y`.
    pub balanced: bool,
    /// The dual optimum, re-embedded with zeros on pruned questions.
    pub dual: Vec<S>,
}

/// Balancedness of a synchronous XOR game. Questions carrying no prior mass
/// are pruned first (their unique dual coordinate is 0 and they do not affect
/// the PSD tests).
pub fn balanced_check<S: Scalar>(g: &XorGame<S>) -> Result<BalanceReport<S>> {
    if !g.is_synchronous_xor() {
        return Err(Error::NotSynchronousXor(
            "balancedness needs f(x,x) = 0, symmetric f and symmetric prior",
        ));
    }
    let n = g.n();
    let a = cost_matrices(g).a_sym;
    let kept: Vec<usize> = (0..n)
        .filter(|&i| (0..n).any(|j| a.get(i, j) != S::zero()))
        .collect();
    if kept.is_empty() {
        return Ok(BalanceReport {
            balanced: true,
            dual: vec![S::zero(); n],
        });
    }
    let pruned =
        SymMatrix::from_fn(kept.len(), |i, j| a.get(kept[i], kept[j])).expect("finite entries");
    let report = balanced_check_matrix(&pruned);
    let mut dual = vec![S::zero(); n];
    for (slot, &i) in kept.iter().enumerate() {
        dual[i] = report.dual[slot];
    }
    Ok(BalanceReport {
        balanced: report.balanced,
        dual,
    })
}

/// Matrix-level balancedness: computes the diagonal dual optimum of
/// `max Tr(A P)` and tests `Diag(y) - A >= 0` and `Diag(y) + A >= 0` at
/// tolerance 1e-8.
pub fn balanced_check_matrix<S: Scalar>(a: &SymMatrix<S>) -> BalanceReport<S> {
    let (dual, _) = solve_diag_dual(a);
    let n = a.n();
    let tol = S::of(1e-8);
    let minus = SymMatrix::from_fn(n, |i, j| {
        (if i == j { dual[i] } else { S::zero() }) - a.get(i, j)
    })
    .expect("finite");
    let plus = SymMatrix::from_fn(n, |i, j| {
        (if i == j { dual[i] } else { S::zero() }) + a.get(i, j)
    })
    .expect("finite");
    BalanceReport {
        balanced: is_psd(&minus, tol) && is_psd(&plus, tol),
        dual,
    }
}

/// All four values of an XOR game plus balancedness and the synchronous dual.
#[derive(Debug, Clone)]
pub struct BiasReport<S> {
    pub omega: S,
    pub omega_sync: S,
    pub bias: S,
    pub bias_sync: S,
    pub balanced: bool,
    pub dual_y: Vec<S>,
    pub gap: S,
    pub gap_sync: S,
    pub certified: bool,
    pub certified_sync: bool,
}

pub fn bias_report<S: Scalar>(g: &XorGame<S>, cfg: &SolveConfig) -> BiasReport<S> {
    let cm = cost_matrices(g);
    let sol_b = solve_elliptope(&ElliptopeProblem::new(cm.b), cfg);
    let sol_s = solve_elliptope(&ElliptopeProblem::new(cm.a_sym), cfg);
    let half = S::of(0.5);
    let balanced = if g.is_synchronous_xor() {
        balanced_check(g).map(|r| r.balanced).unwrap_or(false)
    } else {
        false
    };
    BiasReport {
        omega: half + half * sol_b.value,
        omega_sync: half + half * sol_s.value,
        bias: sol_b.value,
        bias_sync: sol_s.value,
        balanced,
        dual_y: sol_s.dual.clone(),
        gap: sol_b.gap,
        gap_sync: sol_s.gap,
        certified: sol_b.certified,
        certified_sync: sol_s.certified,
    }
}

/// Closed-form values for the 2-colouring game of an odd cycle.
#[derive(Debug, Clone, Copy)]
pub struct CycleValues<S> {
    pub omega: S,
    pub omega_sync: S,
}

/// Closed forms for odd `n`. Without `p` (non-symmetric prior):
/// `omega = cos^2(pi/4n)` and `omega_sync = 1/2 + cos^2(pi/2n)/2`. With the
/// symmetric prior of weight `p`: `omega = p` when `p` exceeds the threshold
/// `1/(2 - cos^2(pi/2n))` and `q + p cos^2(pi/2n)` otherwise, while
/// `omega_sync = q + p cos^2(pi/2n)` throughout.
///
/// The threshold comparison is strict with a 1e-12 guard band; at the
/// threshold itself the two branches agree.
pub fn cycle_closed_forms<S: Scalar>(n: usize, p: Option<S>) -> Result<CycleValues<S>> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidCycleLength(n));
    }
    let nf = S::of(n as f64);
    let cos_half = (S::PI() / (S::of(2.0) * nf)).cos();
    let cos_sq = cos_half * cos_half;
    match p {
        None => {
            let quarter_angle = (S::PI() / (S::of(4.0) * nf)).cos();
            Ok(CycleValues {
                omega: quarter_angle * quarter_angle,
                omega_sync: S::of(0.5) + S::of(0.5) * cos_sq,
            })
        }
        Some(p) => {
            if !(S::zero()..=S::one()).contains(&p) {
                return Err(Error::InvalidWeight(p.to_f64c()));
            }
            let q = S::one() - p;
            let threshold = S::one() / (S::of(2.0) - cos_sq);
            let sync = q + p * cos_sq;
            let omega = if p - threshold > S::of(1e-12) {
                p
            } else {
                sync
            };
            Ok(CycleValues {
                omega,
                omega_sync: sync,
            })
        }
    }
}

/// The 3-question synchronous XOR game with cost matrix
/// `(1/21) [[1,-3,-3],[-3,1,-3],[-3,-3,1]]`: its synchronous bias is 4/7 but
/// the bias of its XOR-square is 25/49, so the synchronous bias is not
/// multiplicative.
pub fn bias_counterexample_game<S: Scalar>() -> XorGame<S> {
    let diag = S::one() / S::of(21.0);
    let off = S::of(3.0) / S::of(21.0);
    let prior = PriorDistribution::from_fn(3, 3, |x, y| if x == y { diag } else { off })
        .expect("normalized");
    XorGame::from_fn(3, |x, y| u8::from(x != y), prior).expect("valid game")
}
