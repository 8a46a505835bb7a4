//! Exact classical values by enumeration: ordinary and synchronous local
//! values, max c-cut, and the bipartite double cover. These are the exact
//! oracles the rest of the repo is checked against, so there is no sampling
//! fallback: past the cap the functions refuse.

use crate::error::{Error, Result};
use crate::game::{coloring_game, uniform_edge_prior, GameInstance, Graph};
use crate::scalar::Scalar;

/// Default enumeration cap (number of candidate functions).
pub const DEFAULT_ENUM_CAP: u128 = 100_000_000;

/// A deterministic strategy: one reply function per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub f_a: Vec<usize>,
    pub f_b: Vec<usize>,
}

fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
        if acc > u128::MAX / 2 {
            return None;
        }
    }
    Some(acc)
}

/// Base-k odometer over `len` digits, visiting functions in ascending
/// lexicographic order (last digit fastest).
struct FnCounter {
    digits: Vec<usize>,
    k: usize,
    done: bool,
}

impl FnCounter {
    fn new(len: usize, k: usize) -> Self {
        FnCounter {
            digits: vec![0; len],
            k,
            done: k == 0 && len > 0,
        }
    }

    fn advance(&mut self) -> bool {
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.k {
                return true;
            }
            *d = 0;
        }
        self.done = true;
        false
    }
}

/// Exact ordinary local value: the maximum winning probability over all pairs
/// of deterministic reply functions, with a witness pair.
///
/// One side is enumerated and the other side's replies are maximized exactly
/// per question, so the enumeration count is the cheaper of
/// `k_a^{n_a}` and `k_b^{n_b}`. When Alice's side is enumerated the witness is
/// the lexicographically first maximizing pair in Alice-major order; when only
/// Bob's side fits under the cap it is first in Bob-major order.
pub fn local_value<S: Scalar>(inst: &GameInstance<S>) -> Result<(S, DeterministicStrategy)> {
    local_value_capped(inst, DEFAULT_ENUM_CAP)
}

pub fn local_value_capped<S: Scalar>(
    inst: &GameInstance<S>,
    cap: u128,
) -> Result<(S, DeterministicStrategy)> {
    let g = &inst.game;
    let count_a = checked_pow(g.k_a(), g.n_a());
    let count_b = checked_pow(g.k_b(), g.n_b());
    let fits = |c: Option<u128>| c.map(|v| v <= cap).unwrap_or(false);
    if fits(count_a) {
        let (value, f_a, f_b) = best_response_scan(inst, false)?;
        Ok((value, DeterministicStrategy { f_a, f_b }))
    } else if fits(count_b) {
        let (value, f_b, f_a) = best_response_scan(inst, true)?;
        Ok((value, DeterministicStrategy { f_a, f_b }))
    } else {
        let needed = count_a
            .or(count_b)
            .unwrap_or(u128::MAX)
            .min(count_a.unwrap_or(u128::MAX))
            .min(count_b.unwrap_or(u128::MAX));
        Err(Error::EnumerationCap { needed, cap })
    }
}

/// Enumerates one player's functions; the other player's reply is chosen
/// per-question by exact maximization (smallest maximizing answer). Returns
/// `(value, enumerated player's function, responder's function)`.
fn best_response_scan<S: Scalar>(
    inst: &GameInstance<S>,
    swap_players: bool,
) -> Result<(S, Vec<usize>, Vec<usize>)> {
    let g = &inst.game;
    let (n_enum, k_enum, n_resp, k_resp) = if swap_players {
        (g.n_b(), g.k_b(), g.n_a(), g.k_a())
    } else {
        (g.n_a(), g.k_a(), g.n_b(), g.k_b())
    };
    // support entries as (enumerated question, responder question, weight)
    let support: Vec<(usize, usize, S)> = inst
        .prior
        .support()
        .into_iter()
        .map(|(x, y, w)| if swap_players { (y, x, w) } else { (x, y, w) })
        .collect();
    let wins = |xe: usize, xr: usize, ae: usize, ar: usize| -> bool {
        if swap_players {
            g.wins(xr, xe, ar, ae)
        } else {
            g.wins(xe, xr, ae, ar)
        }
    };

    // Only responder questions carrying prior mass matter.
    let mut slot = vec![usize::MAX; n_resp];
    let mut active = Vec::new();
    for &(_, y, _) in &support {
        if slot[y] == usize::MAX {
            slot[y] = active.len();
            active.push(y);
        }
    }

    let mut best_value = S::neg_infinity();
    let mut best_fn: Vec<usize> = vec![];
    let mut counter = FnCounter::new(n_enum, k_enum);
    let mut scores = vec![S::zero(); active.len() * k_resp];
    if counter.done {
        return Err(Error::Precondition("empty answer set".into()));
    }
    loop {
        for s in scores.iter_mut() {
            *s = S::zero();
        }
        for &(xe, xr, w) in &support {
            let ae = counter.digits[xe];
            let base = slot[xr] * k_resp;
            for ar in 0..k_resp {
                if wins(xe, xr, ae, ar) {
                    scores[base + ar] += w;
                }
            }
        }
        let mut value = S::zero();
        for s in 0..active.len() {
            let row = &scores[s * k_resp..(s + 1) * k_resp];
            value += row.iter().copied().fold(S::neg_infinity(), S::max);
        }
        if value > best_value {
            best_value = value;
            best_fn = counter.digits.clone();
        }
        if !counter.advance() {
            break;
        }
    }

    // Rebuild the responder's replies for the winning enumerated function:
    // per active question the smallest maximizing answer, 0 elsewhere.
    let mut scores = vec![S::zero(); active.len() * k_resp];
    for &(xe, xr, w) in &support {
        let ae = best_fn[xe];
        let base = slot[xr] * k_resp;
        for ar in 0..k_resp {
            if wins(xe, xr, ae, ar) {
                scores[base + ar] += w;
            }
        }
    }
    let mut f_resp = vec![0usize; n_resp];
    for (s, &y) in active.iter().enumerate() {
        let row = &scores[s * k_resp..(s + 1) * k_resp];
        let best = row.iter().copied().fold(S::neg_infinity(), S::max);
        f_resp[y] = row.iter().position(|&v| v == best).unwrap_or(0);
    }
    Ok((best_value, best_fn, f_resp))
}

/// Exact synchronous local value: maximum over single functions used by both
/// players, with the lexicographically first maximizing function as witness.
pub fn sync_local_value<S: Scalar>(inst: &GameInstance<S>) -> Result<(S, Vec<usize>)> {
    sync_local_value_capped(inst, DEFAULT_ENUM_CAP)
}

pub fn sync_local_value_capped<S: Scalar>(
    inst: &GameInstance<S>,
    cap: u128,
) -> Result<(S, Vec<usize>)> {
    let g = &inst.game;
    if !g.is_square() {
        return Err(Error::NotSquare);
    }
    let (n, k) = (g.n_a(), g.k_a());
    match checked_pow(k, n) {
        Some(c) if c <= cap => {}
        c => {
            return Err(Error::EnumerationCap {
                needed: c.unwrap_or(u128::MAX),
                cap,
            })
        }
    }
    let support = inst.prior.support();
    let mut best_value = S::neg_infinity();
    let mut best_fn = vec![];
    let mut counter = FnCounter::new(n, k);
    if counter.done {
        return Err(Error::Precondition("empty answer set".into()));
    }
    loop {
        let mut value = S::zero();
        for &(x, y, w) in &support {
            if g.wins(x, y, counter.digits[x], counter.digits[y]) {
                value += w;
            }
        }
        if value > best_value {
            best_value = value;
            best_fn = counter.digits.clone();
        }
        if !counter.advance() {
            break;
        }
    }
    Ok((best_value, best_fn))
}

/// Exact max c-cut by enumeration over all colourings. The cut counts
/// unordered edges; the ordered convention enters only in value formulas.
pub fn max_c_cut(g: &Graph, c: usize) -> Result<(usize, Vec<usize>)> {
    max_c_cut_capped(g, c, DEFAULT_ENUM_CAP)
}

pub fn max_c_cut_capped(g: &Graph, c: usize, cap: u128) -> Result<(usize, Vec<usize>)> {
    match checked_pow(c, g.n()) {
        Some(v) if v <= cap => {}
        v => {
            return Err(Error::EnumerationCap {
                needed: v.unwrap_or(u128::MAX),
                cap,
            })
        }
    }
    let edges: Vec<(usize, usize)> = g.unordered_edges().collect();
    let mut best = 0usize;
    let mut witness = vec![0; g.n()];
    let mut counter = FnCounter::new(g.n(), c);
    if counter.done {
        return Err(Error::Precondition("colour count must be positive".into()));
    }
    loop {
        let cut = edges
            .iter()
            .filter(|&&(u, v)| counter.digits[u] != counter.digits[v])
            .count();
        if cut > best {
            best = cut;
            witness = counter.digits.clone();
        }
        if !counter.advance() {
            break;
        }
    }
    Ok((best, witness))
}

/// Bipartite double cover: vertices `(x, i)` mapped to index `x + i*n`, with
/// `(x,i)` adjacent to `(y,j)` iff `i != j` and `x ~ y`.
pub fn bipartite_double_cover(g: &Graph) -> Graph {
    let n = g.n();
    let mut edges = Vec::with_capacity(g.ordered_edge_count());
    for (x, y) in g.unordered_edges() {
        edges.push((x, y + n));
        edges.push((y, x + n));
    }
    Graph::new(2 * n, &edges).expect("cover edges valid")
}

/// Cross-check of the complete-graph colouring value.
#[derive(Debug, Clone)]
pub struct ColoringCrossCheck<S> {
    /// Exact synchronous local value of the c-colouring game on `K_n` under
    /// the uniform edge prior, by brute force.
    pub brute_force: S,
    /// The closed form `1 + 1/n - 1/c`.
    pub closed_form: S,
    /// True iff the two disagree by more than 1e-9.
    pub discrepancy: bool,
    pub witness: Vec<usize>,
}

/// Computes the exact synchronous local value of `Hom(K_n, K_c)` under the
/// uniform edge prior and reports it next to the closed form `1 + 1/n - 1/c`.
/// The brute-force number is the ground truth; the discrepancy flag fires when
/// the closed form disagrees with it.
pub fn complete_coloring_crosscheck<S: Scalar>(
    n: usize,
    c: usize,
) -> Result<ColoringCrossCheck<S>> {
    let g = Graph::complete(n);
    let inst = GameInstance::new(coloring_game(&g, c), uniform_edge_prior::<S>(&g)?)?;
    let (brute_force, witness) = sync_local_value(&inst)?;
    let closed_form = S::one() + S::one() / S::of(n as f64) - S::one() / S::of(c as f64);
    let discrepancy = (brute_force - closed_form).abs() > S::of(1e-9);
    Ok(ColoringCrossCheck {
        brute_force,
        closed_form,
        discrepancy,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{chsh_game, pinned_game, GameInstance};

    fn chsh_inst() -> GameInstance<f64> {
        chsh_game::<f64>().to_instance()
    }

    fn coloring_inst(g: &Graph, c: usize) -> GameInstance<f64> {
        GameInstance::new(coloring_game(g, c), uniform_edge_prior(g).unwrap()).unwrap()
    }

    #[test]
    fn chsh_values() {
        let (v, w) = local_value(&chsh_inst()).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        // lexicographically first maximizer: Alice all-zero, Bob all-zero
        assert_eq!(w.f_a, vec![0, 0]);
        assert_eq!(w.f_b, vec![0, 0]);

        let (v, f) = sync_local_value(&chsh_inst()).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        assert_eq!(f, vec![0, 0]);
    }

    #[test]
    fn c5_two_coloring_values() {
        let g = Graph::cycle(5);
        let inst = coloring_inst(&g, 2);
        let (v, _) = local_value(&inst).unwrap();
        assert!(
            (v - 1.0).abs() < 1e-12,
            "double cover of C5 is C10, 2-colourable"
        );
        let (vs, _) = sync_local_value(&inst).unwrap();
        assert!((vs - 0.8).abs() < 1e-12, "2 * Cut_2(C5) / |E| = 8/10");
    }

    #[test]
    fn pinned_game_values() {
        for n in 1..=2usize {
            let inst = pinned_game::<f64>(n).unwrap();
            let (v, _) = local_value(&inst).unwrap();
            assert_eq!(v, 1.0);
            let (vs, _) = sync_local_value(&inst).unwrap();
            assert_eq!(vs, 1.0 - 0.5f64.powi(n as i32));
        }
    }

    #[test]
    fn max_cut_cases() {
        assert_eq!(max_c_cut(&Graph::complete(3), 2).unwrap().0, 2);
        assert_eq!(max_c_cut(&Graph::cycle(5), 2).unwrap().0, 4);
        let bip = Graph::complete_bipartite(2, 3);
        assert_eq!(max_c_cut(&bip, 2).unwrap().0, bip.unordered_edge_count());
    }

    #[test]
    fn double_cover_cases() {
        // C5 -> C10: connected, 2-regular on 10 vertices
        let cover = bipartite_double_cover(&Graph::cycle(5));
        assert_eq!(cover.n(), 10);
        assert_eq!(cover.unordered_edge_count(), 10);
        for v in 0..10 {
            assert_eq!(cover.degree(v), 2);
        }
        let mut seen = [false; 10];
        let mut at = 0usize;
        let mut prev = usize::MAX;
        for _ in 0..10 {
            seen[at] = true;
            let next = cover
                .neighbors(at)
                .into_iter()
                .find(|&u| u != prev)
                .unwrap();
            prev = at;
            at = next;
        }
        assert!(seen.iter().all(|&s| s), "cover traversal closes a 10-cycle");
        assert_eq!(at, 0);

        // single edge -> two disjoint edges
        let single = Graph::new(2, &[(0, 1)]).unwrap();
        let cover = bipartite_double_cover(&single);
        assert_eq!(cover.n(), 4);
        assert!(cover.has_edge(0, 3));
        assert!(cover.has_edge(1, 2));
        assert_eq!(cover.unordered_edge_count(), 2);
    }

    #[test]
    fn cut_identities_small_graphs() {
        // sync value = 2 Cut_c / |E|, ordinary value = Cut_c(cover) / |E|
        let graphs = [
            Graph::cycle(5),
            Graph::complete(4),
            Graph::complete_bipartite(2, 2),
            Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)]).unwrap(),
        ];
        for g in &graphs {
            let m = g.ordered_edge_count() as f64;
            for c in [2usize, 3] {
                let inst = coloring_inst(g, c);
                let (vs, _) = sync_local_value(&inst).unwrap();
                let (cut, _) = max_c_cut(g, c).unwrap();
                assert!(
                    (vs * m).round() as usize == 2 * cut
                        && (vs * m - (2 * cut) as f64).abs() < 1e-9
                );
                let (v, _) = local_value(&inst).unwrap();
                let (cover_cut, _) = max_c_cut(&bipartite_double_cover(g), c).unwrap();
                assert!(
                    (v * m).round() as usize == cover_cut
                        && (v * m - cover_cut as f64).abs() < 1e-9
                );
                assert!(vs <= v + 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_cap_errors() {
        let inst = pinned_game::<f64>(2).unwrap();
        assert!(matches!(
            local_value_capped(&inst, 3),
            Err(Error::EnumerationCap { .. })
        ));
        assert!(matches!(
            sync_local_value_capped(&inst, 3),
            Err(Error::EnumerationCap { .. })
        ));
        assert!(matches!(
            max_c_cut_capped(&Graph::cycle(5), 2, 3),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn crosscheck_flags_discrepancy() {
        let r = complete_coloring_crosscheck::<f64>(5, 3).unwrap();
        assert!(
            (r.brute_force - 0.8).abs() < 1e-12,
            "2 * Cut_3(K5) / 20 = 16/20"
        );
        assert!((r.closed_form - (1.0 + 0.2 - 1.0 / 3.0)).abs() < 1e-15);
        assert!(r.discrepancy);
    }
}
