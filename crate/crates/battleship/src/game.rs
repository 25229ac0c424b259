//! Game state. Boards live in boxes inside a faceted interpreter; every value
//! handed back to Rust passes through [`publish`], which refuses facets and
//! star.

use std::collections::BTreeSet;
use std::fmt;

use faceted_core::facet::{Addr, Value};
use faceted_core::reader::{parse_expr, parse_program};
use faceted_core::{EvalError, Interpreter};
use serde::Serialize;

const GAME_SOURCE: &str = include_str!("game.rkts");

/// Boards are 10x10 so that a strike position fits in `x,y` single digits.
pub const BOARD_SIZE: i64 = 10;

pub type Tile = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Player {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Player {
    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }

    /// Parses a viewer id such as `player1`.
    pub fn from_id(id: &str) -> Option<Player> {
        match id {
            "player1" => Some(Player::One),
            "player2" => Some(Player::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    /// The key the player's label policy admits.
    pub fn id(self) -> &'static str {
        match self {
            Player::One => "player1",
            Player::Two => "player2",
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    fn label_var(self) -> &'static str {
        match self {
            Player::One => "p1l",
            Player::Two => "p2l",
        }
    }

    fn board_var(self) -> &'static str {
        match self {
            Player::One => "p1board",
            Player::Two => "p2board",
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("invalid board: {0}")]
    InvalidBoard(String),
    #[error("invalid coordinate ({0}, {1})")]
    InvalidCoordinate(i64, i64),
    #[error("it is {expected}'s turn")]
    OutOfTurn { expected: Player },
    #[error("the game is over")]
    GameOver,
    #[error("refusing to release a protected value: {0}")]
    Boundary(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrikeOutcome {
    pub hit: bool,
    /// Opponent tiles left, as declassified by the opponent's policy.
    pub remaining: i64,
    pub game_over: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LastStrike {
    pub by: Player,
    pub x: i64,
    pub y: i64,
    pub hit: bool,
}

/// The public part of the game: whose turn it is and how it ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PublicState {
    pub turn: Player,
    pub game_over: bool,
    pub winner: Option<Player>,
    pub strikes: u32,
    pub last: Option<LastStrike>,
}

pub struct GameState {
    interp: Interpreter,
    turn: Player,
    winner: Option<Player>,
    strikes: u32,
    last: Option<LastStrike>,
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameState").field("public", &self.public_state()).finish_non_exhaustive()
    }
}

/// The single exit from faceted code: a value may leave only once it holds
/// no facet and no star.
pub fn publish(v: Value) -> Result<Value, GameError> {
    if v.contains_facet_or_star() {
        return Err(GameError::Boundary(v.to_string()));
    }
    Ok(v)
}

fn check_coordinate(x: i64, y: i64) -> Result<(), GameError> {
    if (0..BOARD_SIZE).contains(&x) && (0..BOARD_SIZE).contains(&y) {
        Ok(())
    } else {
        Err(GameError::InvalidCoordinate(x, y))
    }
}

fn validate(tiles: &[Tile]) -> Result<(), GameError> {
    let mut seen = BTreeSet::new();
    for &(x, y) in tiles {
        check_coordinate(x, y).map_err(|e| GameError::InvalidBoard(e.to_string()))?;
        if !seen.insert((x, y)) {
            return Err(GameError::InvalidBoard(format!("duplicate tile ({x}, {y})")));
        }
    }
    Ok(())
}

fn tiles_of(v: &Value) -> Result<Vec<Tile>, GameError> {
    let bad = || GameError::Boundary(format!("not a board: {v}"));
    let mut tiles = v
        .list_items()
        .ok_or_else(bad)?
        .iter()
        .map(|t| match t {
            Value::Pair(p) => match (&p.0, &p.1) {
                (Value::Int(x), Value::Int(y)) => Ok((*x, *y)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    tiles.sort_unstable();
    Ok(tiles)
}

fn board_expr(tiles: &[Tile]) -> String {
    tiles
        .iter()
        .fold("(makeboard)".to_string(), |b, (x, y)| format!("(add-piece {b} {x} {y})"))
}

impl GameState {
    /// Loads the game program, creates one label per player and stores each
    /// board as `<pN ? tiles : empty>`.
    pub fn new(board1: &[Tile], board2: &[Tile]) -> Result<GameState, GameError> {
        validate(board1)?;
        validate(board2)?;
        let mut interp = Interpreter::new();
        let setup = format!(
            "{GAME_SOURCE}
             (define p1l (mkpol \"player1\"))
             (define p2l (mkpol \"player2\"))
             (define p1board (box (facet p1l {} (makeboard))))
             (define p2board (box (facet p2l {} (makeboard))))",
            board_expr(board1),
            board_expr(board2),
        );
        let program = parse_program(&setup).expect("game program parses");
        for item in &program.items {
            interp.run_item(item)?;
        }
        let mut game = GameState {
            interp,
            turn: Player::One,
            winner: None,
            strikes: 0,
            last: None,
        };
        // An empty board ends the game before the first move; player 1's
        // opponent is checked first.
        for striker in [Player::One, Player::Two] {
            if game.remaining(striker.opponent())? == 0 {
                game.winner = Some(striker);
                break;
            }
        }
        Ok(game)
    }

    pub fn public_state(&self) -> PublicState {
        PublicState {
            turn: self.turn,
            game_over: self.winner.is_some(),
            winner: self.winner,
            strikes: self.strikes,
            last: self.last,
        }
    }

    fn eval(&mut self, src: &str, bindings: &[(&str, Value)]) -> Result<Value, GameError> {
        let expr = parse_expr(src).expect("game expression parses");
        Ok(self.interp.eval_with_bindings(&expr, bindings)?)
    }

    /// The board box's address, for tests that inspect the raw cell.
    pub fn board_cell(&self, player: Player) -> Option<(Addr, &Value)> {
        match self.interp.global(player.board_var())? {
            Value::Addr(a) => self.interp.store().get(*a).map(|v| (*a, v)),
            _ => None,
        }
    }

    /// Observes `player`'s board with `viewer` as the policy key. The owner
    /// sees tiles; anyone else sees the empty board.
    pub fn view_board(&mut self, player: Player, viewer: &str) -> Result<Vec<Tile>, GameError> {
        let src = format!("(obs {} viewer (unbox {}))", player.label_var(), player.board_var());
        let v = publish(self.eval(&src, &[("viewer", Value::str(viewer))])?)?;
        tiles_of(&v)
    }

    fn remaining(&mut self, owner: Player) -> Result<i64, GameError> {
        let src = format!(
            "(board-size (obs {} \"{}\" (unbox {})))",
            owner.label_var(),
            owner.id(),
            owner.board_var()
        );
        match publish(self.eval(&src, &[])?)? {
            Value::Int(n) => Ok(n),
            other => Err(GameError::Boundary(format!("not a count: {other}"))),
        }
    }

    /// `striker` fires at (x, y) on the opponent's board. The hit flag is
    /// observed under the opponent's label with the opponent's key before it
    /// crosses back to Rust.
    pub fn strike(&mut self, striker: Player, x: i64, y: i64) -> Result<StrikeOutcome, GameError> {
        if self.winner.is_some() {
            return Err(GameError::GameOver);
        }
        if striker != self.turn {
            return Err(GameError::OutOfTurn { expected: self.turn });
        }
        check_coordinate(x, y)?;
        let target = striker.opponent();
        let (label, board, key) = (target.label_var(), target.board_var(), target.id());
        let src = format!(
            "(let* ([ans (mark-hit (unbox {board}) x y)])
               (begin
                 (set! {board} (car ans))
                 (cons (cdr (obs {label} \"{key}\" ans))
                       (board-size (obs {label} \"{key}\" (unbox {board}))))))"
        );
        let result = publish(self.eval(&src, &[("x", Value::Int(x)), ("y", Value::Int(y))])?)?;
        let (hit, remaining) = match &result {
            Value::Pair(p) => match (&p.0, &p.1) {
                (Value::Bool(h), Value::Int(n)) => (*h, *n),
                _ => return Err(GameError::Boundary(result.to_string())),
            },
            _ => return Err(GameError::Boundary(result.to_string())),
        };
        self.strikes += 1;
        self.last = Some(LastStrike { by: striker, x, y, hit });
        let game_over = remaining == 0;
        if game_over {
            self.winner = Some(striker);
        } else {
            self.turn = target;
        }
        Ok(StrikeOutcome {
            hit,
            remaining,
            game_over,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn owner_and_others_see_different_boards() {
        let mut g = GameState::new(&[(1, 2)], &[(3, 4)]).unwrap();
        assert_eq!(g.view_board(Player::One, "player1").unwrap(), [(1, 2)]);
        assert!(g.view_board(Player::One, "player2").unwrap().is_empty());
        assert!(g.view_board(Player::One, "mallory").unwrap().is_empty());
        assert_eq!(g.view_board(Player::Two, "player2").unwrap(), [(3, 4)]);
    }

    #[test]
    fn boards_are_faceted_in_the_store() {
        let g = GameState::new(&[(1, 2)], &[]).unwrap();
        let (_, cell) = g.board_cell(Player::One).unwrap();
        assert_eq!(cell.to_string(), "#facet<l ? ((1 . 2)) : '()>");
    }

    #[test]
    fn strikes_alternate_and_remove_tiles() {
        let mut g = GameState::new(&[(1, 2), (5, 5)], &[(2, 3), (0, 0)]).unwrap();
        let out = g.strike(Player::One, 2, 3).unwrap();
        assert_eq!(out, StrikeOutcome { hit: true, remaining: 1, game_over: false });
        assert_eq!(g.view_board(Player::Two, "player2").unwrap(), [(0, 0)]);
        assert_eq!(g.strike(Player::One, 0, 0), Err(GameError::OutOfTurn { expected: Player::Two }));
        let out = g.strike(Player::Two, 9, 9).unwrap();
        assert!(!out.hit);
        g.strike(Player::One, 0, 0).unwrap();
        let state = g.public_state();
        assert!(state.game_over);
        assert_eq!(state.winner, Some(Player::One));
        assert_eq!(g.strike(Player::Two, 1, 2), Err(GameError::GameOver));
    }

    #[test]
    fn invalid_boards_and_coordinates() {
        assert!(matches!(GameState::new(&[(1, 2), (1, 2)], &[]), Err(GameError::InvalidBoard(_))));
        assert!(matches!(GameState::new(&[(10, 2)], &[]), Err(GameError::InvalidBoard(_))));
        let mut g = GameState::new(&[(1, 2)], &[(3, 4)]).unwrap();
        assert_eq!(g.strike(Player::One, -1, 0), Err(GameError::InvalidCoordinate(-1, 0)));
    }

    #[test]
    fn empty_boards_end_the_game_immediately() {
        let g = GameState::new(&[], &[]).unwrap();
        assert!(g.public_state().game_over);
        assert_eq!(g.public_state().winner, Some(Player::One));
    }

    #[test]
    fn publish_rejects_protected_values() {
        assert!(publish(Value::Star).is_err());
        assert!(publish(Value::list([Value::Int(1), Value::Star])).is_err());
        assert!(publish(Value::Int(1)).is_ok());
    }
}
