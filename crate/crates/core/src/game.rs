//! Games, prior distributions, graphs, and the constructions every other
//! module consumes: colouring games, products, XOR-sums.
//!
//! All types are immutable after construction and all operations are pure.
//! Index conventions are fixed here once: product questions pair row-major,
//! `(x1, x2) -> x1 * n2 + x2`, and likewise for answers.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Cap on dense rule-tensor storage. Products whose tensor would exceed this
/// many entries are rejected instead of allocated.
pub const DEFAULT_TENSOR_CAP: u128 = 1 << 28;

/// A finite two-player game: input sizes, output sizes, and the 0/1 rule
/// tensor `lambda(x, y, a, b)` stored dense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    n_a: usize,
    n_b: usize,
    k_a: usize,
    k_b: usize,
    rule: Vec<bool>,
}

impl Game {
    pub fn from_fn(
        n_a: usize,
        n_b: usize,
        k_a: usize,
        k_b: usize,
        mut wins: impl FnMut(usize, usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let needed = (n_a as u128) * (n_b as u128) * (k_a as u128) * (k_b as u128);
        if needed > DEFAULT_TENSOR_CAP {
            return Err(Error::TensorCap {
                needed,
                cap: DEFAULT_TENSOR_CAP,
            });
        }
        let mut rule = Vec::with_capacity(needed as usize);
        for x in 0..n_a {
            for y in 0..n_b {
                for a in 0..k_a {
                    for b in 0..k_b {
                        rule.push(wins(x, y, a, b));
                    }
                }
            }
        }
        Ok(Game {
            n_a,
            n_b,
            k_a,
            k_b,
            rule,
        })
    }

    /// Builds a game from its winning tuples; everything absent loses.
    pub fn from_win_set(
        n_a: usize,
        n_b: usize,
        k_a: usize,
        k_b: usize,
        wins: &[(usize, usize, usize, usize)],
    ) -> Result<Self> {
        for &(x, y, a, b) in wins {
            if x >= n_a || y >= n_b || a >= k_a || b >= k_b {
                return Err(Error::Parse(format!(
                    "winning tuple ({x},{y},{a},{b}) out of range for sizes ({n_a},{n_b},{k_a},{k_b})"
                )));
            }
        }
        let mut g = Game::from_fn(n_a, n_b, k_a, k_b, |_, _, _, _| false)?;
        for &(x, y, a, b) in wins {
            let idx = g.idx(x, y, a, b);
            g.rule[idx] = true;
        }
        Ok(g)
    }

    #[inline]
    fn idx(&self, x: usize, y: usize, a: usize, b: usize) -> usize {
        ((x * self.n_b + y) * self.k_a + a) * self.k_b + b
    }

    #[inline]
    pub fn wins(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        self.rule[self.idx(x, y, a, b)]
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }
    pub fn n_b(&self) -> usize {
        self.n_b
    }
    pub fn k_a(&self) -> usize {
        self.k_a
    }
    pub fn k_b(&self) -> usize {
        self.k_b
    }

    /// Square games have equal question sets and equal answer sets.
    pub fn is_square(&self) -> bool {
        self.n_a == self.n_b && self.k_a == self.k_b
    }
}

/// Prior distribution on question pairs. Construction rejects unnormalized
/// input (sum must be 1 within 1e-12) rather than rescaling silently.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorDistribution<S> {
    n_a: usize,
    n_b: usize,
    pi: Vec<S>,
}

impl<S: Scalar> PriorDistribution<S> {
    pub fn new(n_a: usize, n_b: usize, pi: Vec<S>) -> Result<Self> {
        if pi.len() != n_a * n_b {
            return Err(Error::DimensionMismatch(format!(
                "prior needs {} entries, got {}",
                n_a * n_b,
                pi.len()
            )));
        }
        for (i, &v) in pi.iter().enumerate() {
            if !v.is_finite() || v < S::zero() {
                return Err(Error::InvalidPriorEntry {
                    x: i / n_b,
                    y: i % n_b,
                });
            }
        }
        let sum: S = pi.iter().copied().sum();
        if (sum - S::one()).abs() > S::of(1e-12) {
            return Err(Error::UnnormalizedPrior { sum: sum.to_f64c() });
        }
        Ok(PriorDistribution { n_a, n_b, pi })
    }

    pub fn from_fn(n_a: usize, n_b: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        let mut pi = Vec::with_capacity(n_a * n_b);
        for x in 0..n_a {
            for y in 0..n_b {
                pi.push(f(x, y));
            }
        }
        PriorDistribution::new(n_a, n_b, pi)
    }

    pub fn uniform(n_a: usize, n_b: usize) -> Self {
        let w = S::one() / S::of((n_a * n_b) as f64);
        PriorDistribution {
            n_a,
            n_b,
            pi: vec![w; n_a * n_b],
        }
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }
    pub fn n_b(&self) -> usize {
        self.n_b
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> S {
        self.pi[x * self.n_b + y]
    }

    /// Question pairs with nonzero mass.
    pub fn support(&self) -> Vec<(usize, usize, S)> {
        let mut out = Vec::new();
        for x in 0..self.n_a {
            for y in 0..self.n_b {
                let w = self.get(x, y);
                if w > S::zero() {
                    out.push((x, y, w));
                }
            }
        }
        out
    }
}

/// A game paired with a prior distribution on its question pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance<S> {
    pub game: Game,
    pub prior: PriorDistribution<S>,
}

impl<S: Scalar> GameInstance<S> {
    pub fn new(game: Game, prior: PriorDistribution<S>) -> Result<Self> {
        if prior.n_a() != game.n_a() || prior.n_b() != game.n_b() {
            return Err(Error::DimensionMismatch(format!(
                "prior is {}x{} but game has {}x{} questions",
                prior.n_a(),
                prior.n_b(),
                game.n_a(),
                game.n_b()
            )));
        }
        Ok(GameInstance { game, prior })
    }
}

/// Simple undirected graph without loops. Edges are stored unordered; the
/// ordered-pair count `2 |edges|` is what all value formulas use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidEdge { u, v, n });
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).expect("cycle edges valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges).expect("complete-graph edges valid")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        Graph::new(a + b, &edges).expect("bipartite edges valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unordered_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn unordered_edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Cardinality of the ordered edge set (twice the number of edges).
    pub fn ordered_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.has_edge(x, y)).collect()
    }

    pub fn degree(&self, x: usize) -> usize {
        self.neighbors(x).len()
    }

    /// Adjacency matrix as a dense symmetric 0/1 matrix.
    pub fn adjacency<S: Scalar>(&self) -> crate::linalg::SymMatrix<S> {
        crate::linalg::SymMatrix::from_fn(self.n, |i, j| {
            if self.has_edge(i, j) {
                S::one()
            } else {
                S::zero()
            }
        })
        .expect("adjacency entries finite")
    }
}

/// XOR game: a binary rule matrix `f` and a prior on question pairs. The
/// induced game wins on `(x, y, a, b)` iff `a xor b = f(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct XorGame<S> {
    n: usize,
    f: Vec<u8>,
    prior: PriorDistribution<S>,
}

impl<S: Scalar> XorGame<S> {
    pub fn new(n: usize, f: Vec<u8>, prior: PriorDistribution<S>) -> Result<Self> {
        if f.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "rule matrix needs {} entries, got {}",
                n * n,
                f.len()
            )));
        }
        if f.iter().any(|&v| v > 1) {
            return Err(Error::Parse("rule matrix entries must be 0 or 1".into()));
        }
        if prior.n_a() != n || prior.n_b() != n {
            return Err(Error::DimensionMismatch(format!(
                "prior is {}x{} but XOR game has {n} questions",
                prior.n_a(),
                prior.n_b()
            )));
        }
        Ok(XorGame { n, f, prior })
    }

    pub fn from_fn(
        n: usize,
        mut f: impl FnMut(usize, usize) -> u8,
        prior: PriorDistribution<S>,
    ) -> Result<Self> {
        let mut rule = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                rule.push(f(x, y));
            }
        }
        XorGame::new(n, rule, prior)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn f(&self, x: usize, y: usize) -> u8 {
        self.f[x * self.n + y]
    }

    pub fn prior(&self) -> &PriorDistribution<S> {
        &self.prior
    }

    pub fn to_game(&self) -> Game {
        Game::from_fn(self.n, self.n, 2, 2, |x, y, a, b| {
            (a ^ b) as u8 == self.f(x, y)
        })
        .expect("XOR rule tensor within cap")
    }

    pub fn to_instance(&self) -> GameInstance<S> {
        GameInstance::new(self.to_game(), self.prior.clone()).expect("shapes agree")
    }

    /// Synchronous XOR game: `f(x,x) = 0`, `f` symmetric, prior symmetric.
    pub fn is_synchronous_xor(&self) -> bool {
        let tol = S::of(1e-12);
        for x in 0..self.n {
            if self.f(x, x) != 0 {
                return false;
            }
            for y in 0..self.n {
                if self.f(x, y) != self.f(y, x) {
                    return false;
                }
                if (self.prior.get(x, y) - self.prior.get(y, x)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// True iff equal questions force equal answers: `lambda(x,x,a,b) = 0` for all
/// `a != b`. Undefined (an error) for non-square games.
pub fn is_synchronous(game: &Game) -> Result<bool> {
    if !game.is_square() {
        return Err(Error::NotSquare);
    }
    let (n, k) = (game.n_a(), game.k_a());
    for x in 0..n {
        for a in 0..k {
            for b in 0..k {
                if a != b && game.wins(x, x, a, b) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Returns `(rule symmetric, prior symmetric)` where rule symmetry means
/// `lambda(x,y,a,b) = lambda(y,x,b,a)`.
pub fn is_symmetric<S: Scalar>(game: &Game, prior: &PriorDistribution<S>) -> Result<(bool, bool)> {
    if !game.is_square() {
        return Err(Error::NotSquare);
    }
    let (n, k) = (game.n_a(), game.k_a());
    let mut rule_sym = true;
    'outer: for x in 0..n {
        for y in 0..n {
            for a in 0..k {
                for b in 0..k {
                    if game.wins(x, y, a, b) != game.wins(y, x, b, a) {
                        rule_sym = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    let tol = S::of(1e-12);
    let mut prior_sym = true;
    'outer2: for x in 0..n {
        for y in 0..n {
            if (prior.get(x, y) - prior.get(y, x)).abs() > tol {
                prior_sym = false;
                break 'outer2;
            }
        }
    }
    Ok((rule_sym, prior_sym))
}

/// The graph c-colouring game: questions are vertices, answers are colours.
/// The null set consists of adjacent questions answered with equal colours and
/// equal questions answered with different colours.
pub fn coloring_game(g: &Graph, c: usize) -> Game {
    assert!(c >= 1, "colour count must be positive");
    Game::from_fn(g.n(), g.n(), c, c, |x, y, a, b| {
        if x == y {
            a == b
        } else if g.has_edge(x, y) {
            a != b
        } else {
            true
        }
    })
    .expect("colouring tensor within cap")
}

/// Uniform density on the ordered edge set: each of the `2 |edges|` ordered
/// pairs gets equal mass.
pub fn uniform_edge_prior<S: Scalar>(g: &Graph) -> Result<PriorDistribution<S>> {
    let m = g.ordered_edge_count();
    if m == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let w = S::one() / S::of(m as f64);
    PriorDistribution::from_fn(
        g.n(),
        g.n(),
        |x, y| {
            if g.has_edge(x, y) {
                w
            } else {
                S::zero()
            }
        },
    )
}

/// Product of two games with the product prior, using the row-major index
/// pairing `(x1, x2) -> x1 * n2 + x2` for questions and answers alike.
pub fn product_game<S: Scalar>(
    g1: &GameInstance<S>,
    g2: &GameInstance<S>,
) -> Result<GameInstance<S>> {
    product_game_capped(g1, g2, DEFAULT_TENSOR_CAP)
}

/// `product_game` with an explicit cap on the dense rule-tensor size.
pub fn product_game_capped<S: Scalar>(
    g1: &GameInstance<S>,
    g2: &GameInstance<S>,
    cap: u128,
) -> Result<GameInstance<S>> {
    let (a, b) = (&g1.game, &g2.game);
    let n_a = a.n_a() * b.n_a();
    let n_b = a.n_b() * b.n_b();
    let k_a = a.k_a() * b.k_a();
    let k_b = a.k_b() * b.k_b();
    let needed = (n_a as u128) * (n_b as u128) * (k_a as u128) * (k_b as u128);
    if needed > cap {
        return Err(Error::TensorCap { needed, cap });
    }
    let game = Game::from_fn(n_a, n_b, k_a, k_b, |x, y, aa, bb| {
        let (x1, x2) = (x / b.n_a(), x % b.n_a());
        let (y1, y2) = (y / b.n_b(), y % b.n_b());
        let (a1, a2) = (aa / b.k_a(), aa % b.k_a());
        let (b1, b2) = (bb / b.k_b(), bb % b.k_b());
        a.wins(x1, y1, a1, b1) && b.wins(x2, y2, a2, b2)
    })?;
    let prior = PriorDistribution::from_fn(n_a, n_b, |x, y| {
        let (x1, x2) = (x / b.n_a(), x % b.n_a());
        let (y1, y2) = (y / b.n_b(), y % b.n_b());
        g1.prior.get(x1, y1) * g2.prior.get(x2, y2)
    })?;
    GameInstance::new(game, prior)
}

/// XOR of two XOR games: `f((x1,x2),(y1,y2)) = f1(x1,y1) xor f2(x2,y2)` with
/// the product prior. Same row-major pairing as `product_game`; the cost
/// matrix of the result is the Kronecker product of the factor cost matrices.
pub fn xor_sum<S: Scalar>(g1: &XorGame<S>, g2: &XorGame<S>) -> Result<XorGame<S>> {
    let (n1, n2) = (g1.n(), g2.n());
    let n = n1 * n2;
    if (n as u128) * (n as u128) > DEFAULT_TENSOR_CAP {
        return Err(Error::TensorCap {
            needed: (n as u128) * (n as u128),
            cap: DEFAULT_TENSOR_CAP,
        });
    }
    let prior = PriorDistribution::from_fn(n, n, |x, y| {
        g1.prior.get(x / n2, y / n2) * g2.prior.get(x % n2, y % n2)
    })?;
    XorGame::from_fn(n, |x, y| g1.f(x / n2, y / n2) ^ g2.f(x % n2, y % n2), prior)
}

/// The n-fold parallel repetition of the two-question game whose prior pins
/// the second player's question to 1: base questions and answers are both
/// `{0,1}`, `pi(0,1) = pi(1,1) = 1/2`, and the winning tuples are
/// `(0,1,1,1)` and `(1,1,0,1)`.
///
/// Its ordinary value is 1 for every n, while the synchronous value is
/// `1 - 2^{-n}` and therefore strictly increases with n.
pub fn pinned_game<S: Scalar>(n: usize) -> Result<GameInstance<S>> {
    assert!(n >= 1, "repetition count must be positive");
    let base_game = Game::from_win_set(2, 2, 2, 2, &[(0, 1, 1, 1), (1, 1, 0, 1)])?;
    let half = S::of(0.5);
    let base_prior =
        PriorDistribution::from_fn(2, 2, |_, y| if y == 1 { half } else { S::zero() })?;
    let base = GameInstance::new(base_game, base_prior)?;
    let mut out = base.clone();
    for _ in 1..n {
        out = product_game(&out, &base)?;
    }
    Ok(out)
}

/// The CHSH game with uniform prior: win iff `a xor b = x and y`.
pub fn chsh_game<S: Scalar>() -> XorGame<S> {
    XorGame::from_fn(2, |x, y| (x & y) as u8, PriorDistribution::uniform(2, 2))
        .expect("CHSH shapes valid")
}
