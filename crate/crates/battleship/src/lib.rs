//! A two-player battleship server. Each board is protected by a label whose
//! policy admits only its owner, so the game logic itself never decides who
//! may see what.

pub mod board;
pub mod game;
pub mod http;

pub use board::{parse_board, BoardFileError};
pub use game::{publish, GameError, GameState, Player, PublicState, StrikeOutcome, Tile, BOARD_SIZE};
pub use http::{router, serve, SharedGame};
