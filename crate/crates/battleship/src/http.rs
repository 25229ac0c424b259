//! HTTP front end: HTML pages for browsers and a JSON API for the web UI.
//! Handlers only ever see values that went through [`crate::publish`].

use std::fmt::Write as _;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::game::{GameError, GameState, Player, StrikeOutcome, Tile, BOARD_SIZE};

pub type SharedGame = Arc<Mutex<GameState>>;

pub fn router(game: SharedGame) -> Router {
    Router::new()
        .route("/player1/{id}", get(|s, id| board_page(s, Player::One, id)))
        .route("/player2/{id}", get(|s, id| board_page(s, Player::Two, id)))
        .route("/player1strike/{pos}", get(|s, pos| strike_page(s, Player::One, pos)))
        .route("/player2strike/{pos}", get(|s, pos| strike_page(s, Player::Two, pos)))
        .route("/api/board/{player}", get(api_board))
        .route("/api/strike/{player}", post(api_strike))
        .route("/api/state", get(api_state))
        .with_state(game)
}

/// Serves the game on an already bound listener until the task is dropped.
pub async fn serve(listener: tokio::net::TcpListener, game: GameState) -> std::io::Result<()> {
    axum::serve(listener, router(Arc::new(Mutex::new(game)))).await
}

fn lock(game: &SharedGame) -> MutexGuard<'_, GameState> {
    // A panic inside the interpreter leaves no half-written Rust state.
    game.lock().unwrap_or_else(|e| e.into_inner())
}

#[derive(Debug)]
enum ApiError {
    Game(GameError),
    BadRequest(String),
    UnknownPlayer(String),
}

impl From<GameError> for ApiError {
    fn from(e: GameError) -> Self {
        ApiError::Game(e)
    }
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::Game(GameError::OutOfTurn { .. } | GameError::GameOver) => StatusCode::CONFLICT,
            ApiError::Game(GameError::InvalidCoordinate(..)) | ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::UnknownPlayer(_) => StatusCode::NOT_FOUND,
            ApiError::Game(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn message(&self) -> String {
        match self {
            ApiError::Game(e) => e.to_string(),
            ApiError::BadRequest(m) => m.clone(),
            ApiError::UnknownPlayer(p) => format!("unknown player `{p}`"),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.message() }))).into_response()
    }
}

fn player_path(p: &str) -> Result<Player, ApiError> {
    p.parse::<u8>()
        .ok()
        .and_then(Player::from_number)
        .or_else(|| Player::from_id(p))
        .ok_or_else(|| ApiError::UnknownPlayer(p.to_string()))
}

fn escape(s: &str) -> String {
    s.chars().fold(String::with_capacity(s.len()), |mut out, c| {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
        out
    })
}

fn render_board(owner: Player, viewer: &str, tiles: &[Tile]) -> String {
    let mut html = format!(
        "<html><head><title>Battleship</title></head><body>\n<h1>Player {}'s Game Board</h1>\n<p>Viewing as {}</p>\n<table class=\"board\">\n",
        owner.number(),
        escape(viewer)
    );
    for y in 0..BOARD_SIZE {
        html.push_str("<tr>");
        for x in 0..BOARD_SIZE {
            let cell = if tiles.contains(&(x, y)) { "#" } else { "." };
            let _ = write!(html, "<td>{cell}</td>");
        }
        html.push_str("</tr>\n");
    }
    html.push_str("</table>\n</body></html>\n");
    html
}

async fn board_page(State(game): State<SharedGame>, owner: Player, Path(id): Path<String>) -> Response {
    match lock(&game).view_board(owner, &id) {
        Ok(tiles) => Html(render_board(owner, &id, &tiles)).into_response(),
        Err(e) => ApiError::from(e).into_response(),
    }
}

fn parse_pos(pos: &str) -> Result<(i64, i64), ApiError> {
    let bad = || ApiError::BadRequest(format!("expected `x,y`, got `{pos}`"));
    let (x, y) = pos.split_once(',').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

async fn strike_page(State(game): State<SharedGame>, target: Player, Path(pos): Path<String>) -> Response {
    let outcome = parse_pos(&pos).and_then(|(x, y)| Ok(lock(&game).strike(target.opponent(), x, y)?));
    match outcome {
        Ok(StrikeOutcome { hit: true, .. }) => Html(format!(
            "<h1>Congratulations!</h1> <h4>You hit player {}!</h4>",
            target.number()
        ))
        .into_response(),
        Ok(_) => Html("<p>No hit :(</p>".to_string()).into_response(),
        Err(e) => {
            let status = e.status();
            (status, Html(format!("<p>{}</p>", escape(&e.message())))).into_response()
        }
    }
}

#[derive(Debug, Deserialize)]
struct ViewerQuery {
    viewer: Option<String>,
}

#[derive(Debug, Serialize)]
struct TileJson {
    x: i64,
    y: i64,
}

async fn api_board(
    State(game): State<SharedGame>,
    Path(player): Path<String>,
    Query(q): Query<ViewerQuery>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let owner = player_path(&player)?;
    let viewer = q.viewer.unwrap_or_default();
    let tiles = lock(&game).view_board(owner, &viewer)?;
    let tiles: Vec<_> = tiles.into_iter().map(|(x, y)| TileJson { x, y }).collect();
    Ok(Json(json!({ "tiles": tiles })))
}

#[derive(Debug, Deserialize)]
struct StrikeRequest {
    x: i64,
    y: i64,
    by: String,
}

async fn api_strike(
    State(game): State<SharedGame>,
    Path(player): Path<String>,
    body: Result<Json<StrikeRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let target = player_path(&player)?;
    let Json(req) = body.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    let striker = Player::from_id(&req.by)
        .ok_or_else(|| ApiError::BadRequest(format!("`by` must be player1 or player2, got `{}`", req.by)))?;
    if striker != target.opponent() {
        return Err(ApiError::BadRequest(format!("{striker} cannot strike its own board")));
    }
    let out = lock(&game).strike(striker, req.x, req.y)?;
    let message = if out.hit {
        format!("You hit player {}!", target.number())
    } else {
        "No hit :(".to_string()
    };
    Ok(Json(json!({
        "hit": out.hit,
        "remaining": out.remaining,
        "game_over": out.game_over,
        "message": message,
    })))
}

async fn api_state(State(game): State<SharedGame>) -> Json<serde_json::Value> {
    let s = lock(&game).public_state();
    Json(json!({
        "turn": s.turn.id(),
        "game_over": s.game_over,
        "winner": s.winner.map(Player::id),
        "strikes": s.strikes,
        "last": s.last.map(|l| json!({ "by": l.by.id(), "x": l.x, "y": l.y, "hit": l.hit })),
    }))
}
