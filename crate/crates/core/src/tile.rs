use std::fmt;

use serde::{Deserialize, Serialize};

/// Integer tile coordinate; `(0, 0)` is the top-left tile, `y` grows downward.
/// Tile `(x, y)` covers the closed square `[x, x + 1] x [y, y + 1]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tile {
    pub x: i32,
    pub y: i32,
}

impl Tile {
    pub const fn new(x: i32, y: i32) -> Self {
        Tile { x, y }
    }

    pub fn neighbors4(self) -> [Tile; 4] {
        let Tile { x, y } = self;
        [Tile::new(x + 1, y), Tile::new(x - 1, y), Tile::new(x, y + 1), Tile::new(x, y - 1)]
    }

    pub fn neighbors8(self) -> [Tile; 8] {
        let Tile { x, y } = self;
        [
            Tile::new(x + 1, y),
            Tile::new(x - 1, y),
            Tile::new(x, y + 1),
            Tile::new(x, y - 1),
            Tile::new(x + 1, y + 1),
            Tile::new(x - 1, y - 1),
            Tile::new(x + 1, y - 1),
            Tile::new(x - 1, y + 1),
        ]
    }
}

impl fmt::Debug for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i32, i32)> for Tile {
    fn from((x, y): (i32, i32)) -> Self {
        Tile { x, y }
    }
}
