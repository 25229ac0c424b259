//! Board files: whitespace-separated `x y` pairs, `;` starts a comment.

use crate::game::Tile;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoardFileError {
    #[error("line {line}: `{token}` is not an integer")]
    NotInteger { line: usize, token: String },
    #[error("odd number of coordinates")]
    Unpaired,
}

pub fn parse_board(text: &str) -> Result<Vec<Tile>, BoardFileError> {
    let mut nums = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        for token in line.split_whitespace() {
            let n = token.parse::<i64>().map_err(|_| BoardFileError::NotInteger {
                line: i + 1,
                token: token.to_string(),
            })?;
            nums.push(n);
        }
    }
    if nums.len() % 2 != 0 {
        return Err(BoardFileError::Unpaired);
    }
    Ok(nums.chunks(2).map(|c| (c[0], c[1])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        assert_eq!(parse_board("1 2 ; carrier\n3 4\n").unwrap(), [(1, 2), (3, 4)]);
        assert_eq!(parse_board("").unwrap(), []);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_board("1 2 3"), Err(BoardFileError::Unpaired));
        assert!(matches!(parse_board("1 x"), Err(BoardFileError::NotInteger { line: 1, .. })));
    }
}
