//! Interactive game sessions.
//!
//! Scrambles are drawn from ChaCha8 seeded with the session seed, one
//! `gen_range` call per vertex in vertex order, so a seed reproduces the same
//! puzzle on every platform.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::Modulus;
use crate::diagram::DiagramShadow;
use crate::game::{build_game_matrix, Coloring, GameConfig, GameError, GameMatrix, IncrementOverride, PushPattern};

/// Scramble range for `k = inf` sessions.
pub const DEFAULT_INFINITE_RANGE: (i64, i64) = (-9, 9);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("diagram has {0} components; games need a knot diagram")]
    NotAKnot(usize),
    #[error("diagram has no crossings, there is nothing to play")]
    NoVertices,
    #[error("negative pushes are only allowed when k = inf")]
    NegativePush,
    #[error("sign must be +1 or -1, got {0}")]
    BadSign(i64),
    #[error("unknown region {0}")]
    UnknownRegion(usize),
    #[error("nothing to undo")]
    EmptyHistory,
    #[error("stored session is inconsistent: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionSource {
    Seed(u64),
    Coloring(Coloring),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Solved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Push {
    pub region: usize,
    pub sign: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Hint {
    Push { region: usize, remaining: i64 },
    Solved { solved: bool },
}

/// Serialized session state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub diagram: String,
    pub k: Modulus,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub increments: Vec<IncrementOverride>,
    pub initial: Coloring,
    pub current: Coloring,
    pub history: Vec<Push>,
    pub seed: Option<u64>,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct GameSession {
    id: String,
    game: GameMatrix,
    initial: Coloring,
    current: Coloring,
    history: Vec<Push>,
    seed: Option<u64>,
}

fn scramble(n: usize, k: Modulus, seed: u64, infinite_range: (i64, i64)) -> Coloring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Coloring(
        (0..n)
            .map(|_| match k {
                Modulus::Finite(k) => BigInt::from(rng.gen_range(0..k)),
                Modulus::Infinite => BigInt::from(rng.gen_range(infinite_range.0..=infinite_range.1)),
            })
            .collect(),
    )
}

pub fn new_session(
    id: impl Into<String>,
    shadow: Arc<DiagramShadow>,
    config: GameConfig,
    source: SessionSource,
) -> Result<GameSession, SessionError> {
    new_session_with_range(id, shadow, config, source, DEFAULT_INFINITE_RANGE)
}

pub fn new_session_with_range(
    id: impl Into<String>,
    shadow: Arc<DiagramShadow>,
    config: GameConfig,
    source: SessionSource,
    infinite_range: (i64, i64),
) -> Result<GameSession, SessionError> {
    if !shadow.is_knot() {
        return Err(SessionError::NotAKnot(shadow.component_count()));
    }
    if shadow.vertex_count() == 0 {
        return Err(SessionError::NoVertices);
    }
    let game = build_game_matrix(shadow, config)?;
    let k = game.modulus();
    let (initial, seed) = match source {
        SessionSource::Seed(seed) => (scramble(game.vertex_count(), k, seed, infinite_range), Some(seed)),
        SessionSource::Coloring(c) => {
            if c.len() != game.vertex_count() {
                return Err(GameError::Length {
                    what: "coloring",
                    expected: game.vertex_count(),
                    found: c.len(),
                }
                .into());
            }
            (c.reduced(k), None)
        }
    };
    Ok(GameSession {
        id: id.into(),
        game,
        current: initial.clone(),
        initial,
        history: Vec::new(),
        seed,
    })
}

impl GameSession {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn game(&self) -> &GameMatrix {
        &self.game
    }

    pub fn initial(&self) -> &Coloring {
        &self.initial
    }

    pub fn current(&self) -> &Coloring {
        &self.current
    }

    pub fn history(&self) -> &[Push] {
        &self.history
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn status(&self) -> Status {
        if self.current.is_zero() {
            Status::Solved
        } else {
            Status::InProgress
        }
    }

    /// Net push count per region over the whole history.
    pub fn net_pattern(&self) -> PushPattern {
        let mut p = PushPattern::zeros(self.game.region_count());
        for push in &self.history {
            p.0[push.region] += push.sign;
        }
        p.reduced(self.game.modulus())
    }

    pub fn push(&mut self, region: usize, sign: i64) -> Result<(), SessionError> {
        if sign != 1 && sign != -1 {
            return Err(SessionError::BadSign(sign));
        }
        if sign == -1 && self.game.modulus().is_finite() {
            return Err(SessionError::NegativePush);
        }
        if region >= self.game.region_count() {
            return Err(SessionError::UnknownRegion(region));
        }
        let mut step = PushPattern::zeros(self.game.region_count());
        step.0[region] = BigInt::from(sign);
        self.current = self.game.apply_pattern(&self.current, &step)?;
        self.history.push(Push { region, sign });
        Ok(())
    }

    pub fn undo(&mut self) -> Result<(), SessionError> {
        let last = self.history.pop().ok_or(SessionError::EmptyHistory)?;
        let mut step = PushPattern::zeros(self.game.region_count());
        step.0[last.region] = BigInt::from(-last.sign);
        self.current = self.game.apply_pattern(&self.current, &step)?;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.current = self.initial.clone();
        self.history.clear();
    }

    /// Pinned solving pattern for the current coloring.
    pub fn solution(&self) -> Result<PushPattern, SessionError> {
        Ok(self.game.solve(&self.current)?)
    }

    /// Smallest region with a nonzero entry in [`solution`](Self::solution).
    /// A negative count (only for `k = inf`) asks for negative pushes.
    pub fn hint(&self) -> Result<Hint, SessionError> {
        let p = self.solution()?;
        Ok(match p.0.iter().position(|x| !x.is_zero()) {
            None => Hint::Solved { solved: true },
            Some(region) => Hint::Push {
                region,
                remaining: i64::try_from(&p.0[region]).unwrap_or(if p.0[region].is_negative() { i64::MIN } else { i64::MAX }),
            },
        })
    }

    pub fn state(&self) -> SessionState {
        SessionState {
            id: self.id.clone(),
            diagram: self.game.shadow().name().to_string(),
            k: self.game.modulus(),
            increments: self.game.config().overrides(),
            initial: self.initial.clone(),
            current: self.current.clone(),
            history: self.history.clone(),
            seed: self.seed,
            status: self.status(),
        }
    }

    /// Rebuilds a session from its serialized state, replaying the history.
    pub fn restore(state: &SessionState, shadow: Arc<DiagramShadow>) -> Result<GameSession, SessionError> {
        let config = GameConfig::new(state.k).with_overrides(&state.increments);
        let mut session = new_session(
            state.id.clone(),
            shadow,
            config,
            SessionSource::Coloring(state.initial.clone()),
        )?;
        session.seed = state.seed;
        for push in &state.history {
            session.push(push.region, push.sign)?;
        }
        if session.current != state.current || session.status() != state.status {
            return Err(SessionError::Corrupt("replayed history does not reach the stored coloring".into()));
        }
        Ok(session)
    }
}
