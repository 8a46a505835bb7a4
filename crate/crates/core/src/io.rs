//! JSON file formats for graphs, games, XOR games and PVM families.
//!
//! Graph: `{"n": 5, "edges": [[0,1], ...]}` with 0-based vertices.
//! Game: `{"n_a":..,"n_b":..,"k_a":..,"k_b":..,"win":[[x,y,a,b],...]}`;
//! tuples absent from `win` lose. An optional `"pi"` matrix attaches a prior;
//! without it the uniform prior is used.
//! XOR game: `{"n":..,"f":[[..]],"pi":[[..]]}`.
//! PVM: `{"n":..,"k":..,"m":..,"matrices":[[[[ [re,im], ..] ..] ..] ..]}`
//! indexed `[x][a][row][col]`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, GameInstance, Graph, PriorDistribution, XorGame};
use crate::strategies::{CMat, PvmFamily};

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GameJson {
    pub n_a: usize,
    pub n_b: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub win: Vec<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct XorJson {
    pub n: usize,
    pub f: Vec<Vec<u8>>,
    pub pi: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PvmJson {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// `matrices[x][a][row][col] = [re, im]`
    pub matrices: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn graph_from_str(text: &str) -> Result<Graph> {
    let j: GraphJson = parse(text)?;
    let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
    Graph::new(j.n, &edges)
}

fn prior_from_matrix(n_a: usize, n_b: usize, pi: &[Vec<f64>]) -> Result<PriorDistribution<f64>> {
    if pi.len() != n_a || pi.iter().any(|row| row.len() != n_b) {
        return Err(Error::Parse(format!("pi must be a {n_a}x{n_b} matrix")));
    }
    PriorDistribution::new(n_a, n_b, pi.iter().flatten().copied().collect())
}

pub fn instance_from_game_str(text: &str) -> Result<GameInstance<f64>> {
    let j: GameJson = parse(text)?;
    let wins: Vec<(usize, usize, usize, usize)> =
        j.win.iter().map(|w| (w[0], w[1], w[2], w[3])).collect();
    let game = Game::from_win_set(j.n_a, j.n_b, j.k_a, j.k_b, &wins)?;
    let prior = match &j.pi {
        Some(pi) => prior_from_matrix(j.n_a, j.n_b, pi)?,
        None => PriorDistribution::uniform(j.n_a, j.n_b),
    };
    GameInstance::new(game, prior)
}

pub fn xor_from_str(text: &str) -> Result<XorGame<f64>> {
    let j: XorJson = parse(text)?;
    if j.f.len() != j.n || j.f.iter().any(|row| row.len() != j.n) {
        return Err(Error::Parse(format!("f must be a {0}x{0} matrix", j.n)));
    }
    let prior = prior_from_matrix(j.n, j.n, &j.pi)?;
    XorGame::new(j.n, j.f.iter().flatten().copied().collect(), prior)
}

pub fn pvm_from_str(text: &str) -> Result<PvmFamily<f64>> {
    let j: PvmJson = parse(text)?;
    if j.matrices.len() != j.n || j.matrices.iter().any(|per_x| per_x.len() != j.k) {
        return Err(Error::Parse("matrices must be indexed [x][a]".into()));
    }
    let mut ops = Vec::with_capacity(j.n * j.k);
    for per_x in &j.matrices {
        for rows in per_x {
            if rows.len() != j.m || rows.iter().any(|r| r.len() != j.m) {
                return Err(Error::Parse(format!("each matrix must be {0}x{0}", j.m)));
            }
            ops.push(CMat::from_fn(j.m, |r, c| {
                Complex::new(rows[r][c][0], rows[r][c][1])
            }));
        }
    }
    PvmFamily::new(j.n, j.k, j.m, ops)
}

/// Either plain-game or XOR-game input, detected by the keys present.
#[derive(Debug)]
pub enum GameFile {
    Plain(GameInstance<f64>),
    Xor(XorGame<f64>),
}

/// Parses a game file of either format: objects with a `win` key are plain
/// games, objects with an `f` key are XOR games.
pub fn game_file_from_str(text: &str) -> Result<GameFile> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    if obj.contains_key("win") {
        Ok(GameFile::Plain(instance_from_game_str(text)?))
    } else if obj.contains_key("f") {
        Ok(GameFile::Xor(xor_from_str(text)?))
    } else {
        Err(Error::Parse(
            "object is neither a game (win) nor an XOR game (f)".into(),
        ))
    }
}
